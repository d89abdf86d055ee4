import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmem import optics, tomography
from qmem.errors import DomainError


def test_settings_table():
    s = tomography.SETTINGS
    assert (s["X"].phi_internal, s["X"].psi_external) == (math.pi / 2, 0.0)
    assert (s["Y"].phi_internal, s["Y"].psi_external) == (math.pi / 2, math.pi / 2)
    assert (s["Z"].phi_internal, s["Z"].psi_external) == (0.0, 0.0)


def test_pauli_examples():
    # x is the weight on |1>: x = 1 is |1>, x = 0 is |0>
    assert tomography.measure_pauli(1.0, 0.0, "Z") == pytest.approx(-1.0)
    for r in [0.0, 0.3, 1.0]:
        assert tomography.measure_pauli(0.0, r, "Z") == pytest.approx(1.0)
    assert tomography.measure_pauli(0.5, 0.0, "X") == pytest.approx(1.0)
    assert tomography.measure_pauli(0.5, 0.0, "Y") == pytest.approx(0.0, abs=1e-15)


def test_pauli_y_sees_phase():
    s = optics.dual_rail_state(0.5, math.pi / 2)
    rho = optics.fold_vacuum(s)
    assert np.trace(tomography.SIGMA["Y"] @ rho).real == pytest.approx(1.0)
    assert tomography.measure_pauli(0.5, 0.0, "Y") == pytest.approx(0.0, abs=1e-12)


def test_no_post_selected_events():
    with pytest.raises(DomainError):
        tomography.measure_pauli(1.0, 1.0, "X")
    with pytest.raises(DomainError):
        tomography.measure_pauli(1.5, 0.0, "X")
    np.testing.assert_array_equal(tomography.reconstruct(1.0, 1.0), [[1, 0], [0, 0]])


@pytest.mark.parametrize("x,r,expected", [(0.9, 0.5, 0.595), (0.1, 0.5, 0.995)])
def test_reconstruct_examples(x, r, expected):
    assert optics.purity(tomography.reconstruct(x, r)) == pytest.approx(expected, abs=1e-12)


def test_zero_reflectivity_gives_projector():
    for x in np.linspace(0, 1, 6):
        rho = tomography.reconstruct(x, 0.0)
        np.testing.assert_allclose(rho @ rho, rho, atol=1e-12)
        assert optics.purity(rho) == pytest.approx(1.0)


def test_round_trip_grid():
    for x in np.linspace(0, 1, 11):
        for r in np.linspace(0, 1, 11):
            rho = tomography.reconstruct(x, r)
            np.testing.assert_allclose(rho, optics.encoded_reduced_state(x, r), atol=1e-10)
            assert abs(optics.purity(rho) - tomography.purity_theory(x, r)) < 1e-10


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 0.95), st.floats(0, 1), st.integers(0, 2**31))
def test_shot_noise_purity(x, r, seed):
    rho = tomography.reconstruct(x, r, shots=10**5, seed=seed)
    assert np.linalg.eigvalsh(rho).min() >= -1e-12
    assert abs(optics.purity(rho) - tomography.purity_theory(x, r)) < 0.02


def test_grid_csv():
    text = tomography.grid_csv([0.5], [0.5])
    lines = text.splitlines()
    assert lines[0] == "x,R,purity_reconstructed,purity_closed_form"
    assert float(lines[1].split(",")[2]) == pytest.approx(0.875)
