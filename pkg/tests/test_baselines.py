import numpy as np
import pytest

from qmem import baselines, tasks
from qmem.baselines import BaselineSpec
from qmem.errors import DomainError
from qmem.readout import SplitSpec


def test_poly_feature_examples():
    np.testing.assert_array_equal(baselines.poly_features([0.5], BaselineSpec(1)), [[1, 0.5]])
    np.testing.assert_array_equal(baselines.poly_features([2.0], BaselineSpec(3)), [[1, 2, 4, 8]])
    rows = baselines.poly_features([1.0, 1.0], BaselineSpec(3, True))
    np.testing.assert_array_equal(rows[1], np.ones(10))


@pytest.mark.parametrize("spec,cols", [
    (BaselineSpec(1), 2), (BaselineSpec(3), 4), (BaselineSpec(1, True), 3),
    (BaselineSpec(3, True), 10),
])
def test_column_counts(spec, cols):
    assert baselines.poly_features(np.linspace(0, 1, 5), spec).shape[1] == cols == spec.n_columns
    assert spec.free_parameters == cols - 1


def test_labels_and_validation():
    assert [s.label for s in baselines.TABLE1_SPECS] == ["L", "C", "L+M", "C+M"]
    with pytest.raises(DomainError):
        BaselineSpec(0)
    with pytest.raises(DomainError):
        baselines.poly_features([0.1], BaselineSpec(1, True))


def test_exact_cubic_recovery():
    x = np.random.default_rng(0).uniform(0, 1, 200)
    prev = np.concatenate([[0.0], x[:-1]])
    y = 0.1 + x - 2 * x**2 * prev + 0.5 * prev**3
    ds = tasks.Dataset(x, y, "synthetic", split=SplitSpec(20, 100, 80))
    _, tr, te = baselines.fit_baseline(ds, BaselineSpec(3, True))
    assert te < 1e-20 and tr < 1e-20


def test_nested_specs_train_monotone():
    for seed in range(10):
        ds = tasks.narma(1000, seed)
        tr = {s.label: baselines.fit_baseline(ds, s)[1] for s in baselines.TABLE1_SPECS}
        assert tr["C"] <= tr["L"] + 1e-15
        assert tr["C+M"] <= tr["L+M"] + 1e-15


def test_suite_identical_seeds_have_zero_std():
    rows = baselines.baseline_suite(lambda s: tasks.narma(1000, 0), runs=2)
    assert all(r.std == 0 for r in rows)
    with pytest.raises(DomainError):
        baselines.baseline_suite(lambda s: tasks.narma(1000, s), runs=1)


def test_degree_saturation():
    d3, d5 = [], []
    for seed in range(30):
        ds = tasks.narma(1000, seed)
        d3.append(baselines.fit_baseline(ds, BaselineSpec(3, True))[2])
        d5.append(baselines.fit_baseline(ds, BaselineSpec(5, True))[2])
    assert abs(np.mean(d5) / np.mean(d3) - 1) < 0.1


def test_output_predictor_runs():
    ds = tasks.narma(1000, 1)
    for spec in baselines.TABLE1_SPECS:
        te = baselines.fit_baseline(ds, spec, predictor="output")[2]
        assert 1e-4 < te < 1e-3
    with pytest.raises(DomainError):
        baselines.fit_baseline(ds, BaselineSpec(1), predictor="future")


def test_csv_and_table_format():
    rows = baselines.baseline_suite(lambda s: tasks.narma(1000, s), runs=3)
    csv = baselines.suite_csv(rows).splitlines()
    assert csv[0] == "model,mean_mse,std_mse,runs"
    assert [line.split(",")[0] for line in csv[1:]] == ["L", "C", "L+M", "C+M"]
    table = baselines.format_table(rows)
    assert "C+M" in table and "(" in table
