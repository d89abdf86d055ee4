"""Classical polynomial regressors used as comparison models."""

import io
from dataclasses import dataclass

import numpy as np

from . import readout
from .errors import DomainError


@dataclass(frozen=True)
class BaselineSpec:
    degree: int = 1
    memory: bool = False

    def __post_init__(self):
        if self.degree < 1:
            raise DomainError("degree must be >= 1")

    @property
    def label(self):
        base = {1: "L", 3: "C"}.get(self.degree, f"P{self.degree}")
        return base + ("+M" if self.memory else "")

    @property
    def n_columns(self):
        d = self.degree
        return (d + 1) * (d + 2) // 2 if self.memory else d + 1

    @property
    def free_parameters(self):
        """Coefficients excluding the intercept."""
        return self.n_columns - 1


TABLE1_SPECS = (
    BaselineSpec(1, False),
    BaselineSpec(3, False),
    BaselineSpec(1, True),
    BaselineSpec(3, True),
)


def poly_features(xs, spec):
    """Design matrix of all monomials of total degree <= d, constant column first.

    With memory the variables are ``(x_t, x_{t-1})`` and ``x_{-1}`` is taken as
    0. Columns are ordered by total degree, then by decreasing power of x_t.
    """
    x = np.asarray(xs, dtype=np.float64)
    if spec.memory:
        if x.size < 2:
            raise DomainError("memory features need at least two samples")
        prev = np.concatenate([[0.0], x[:-1]])
        cols = [x**(k - j) * prev**j for k in range(spec.degree + 1) for j in range(k + 1)]
    else:
        cols = [x**k for k in range(spec.degree + 1)]
    return np.column_stack(cols)


def _predictor(ds, predictor):
    if predictor == "input":
        return ds.inputs
    if predictor == "output":
        # previous target value y_t, predicting y_{t+1}
        return np.concatenate([[0.0], ds.targets[:-1]])
    raise DomainError(f"predictor must be 'input' or 'output', got {predictor!r}")


def fit_baseline(ds, spec, split=None, predictor="input"):
    """Least-squares fit on the training slice; returns (model, train mse, test mse)."""
    split = split or ds.split
    feats = poly_features(_predictor(ds, predictor), spec)
    # poly_features already carries the constant column
    model = readout.fit(feats, ds.targets, split, intercept=False)
    y_hat = readout.predict(model, feats)
    y = ds.targets
    return (model, readout.mse(y[split.train_slice], y_hat[split.train_slice]),
            readout.mse(y[split.test_slice], y_hat[split.test_slice]))


@dataclass
class SuiteRow:
    model: str
    mses: np.ndarray

    @property
    def mean(self):
        return float(np.mean(self.mses))

    @property
    def std(self):
        return float(np.std(self.mses, ddof=1)) if self.mses.size > 1 else float("nan")

    @property
    def runs(self):
        return int(self.mses.size)


def baseline_suite(make_dataset, runs=100, base_seed=0, specs=TABLE1_SPECS, predictor="input"):
    """Test MSE statistics of each spec over ``runs`` seeded datasets.

    ``make_dataset(seed)`` builds the dataset for one run; seeds are
    ``base_seed, base_seed + 1, ...``. Standard deviations use ddof=1.
    """
    if runs < 2:
        raise DomainError("a suite needs at least 2 runs")
    results = {spec.label: [] for spec in specs}
    for i in range(runs):
        ds = make_dataset(base_seed + i)
        for spec in specs:
            results[spec.label].append(fit_baseline(ds, spec, predictor=predictor)[2])
    return [SuiteRow(label, np.array(v)) for label, v in results.items()]


def suite_csv(rows):
    buf = io.StringIO()
    buf.write("model,mean_mse,std_mse,runs\n")
    for row in rows:
        std = "" if np.isnan(row.std) else f"{row.std:.17g}"
        buf.write(f"{row.model},{row.mean:.17g},{std},{row.runs}\n")
    return buf.getvalue()


def format_table(rows, scale=1e-4):
    """Text table in units of ``scale``, std shown in parentheses."""
    exp = int(round(np.log10(scale)))
    lines = [f"{'model':<8} MSE (x1e{exp})", "-" * 24]
    for row in rows:
        std = "" if np.isnan(row.std) else f" ({row.std / scale:.2f})"
        lines.append(f"{row.model:<8} {row.mean / scale:.2f}{std}")
    return "\n".join(lines) + "\n"
