import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmem import optics
from qmem.encoding import EncodingScheme, encode, encode_amplitudes, encoding_phase
from qmem.errors import DomainError

SIGMA_X = np.array([[0, 1], [1, 0]])
SIGMA_Z = np.array([[1, 0], [0, -1]])


def test_encode_examples():
    np.testing.assert_allclose(encode(0, EncodingScheme.SQRT), [0, 1, 0])
    np.testing.assert_allclose(encode(0.25, "sqrt"), [0.5, math.sqrt(0.75), 0])
    np.testing.assert_allclose(encode(0.6, "amplitude"), [0.6, 0.8, 0], atol=1e-15)
    np.testing.assert_allclose(encode(0.36, "sqrt-flipped"), [0.8, 0.6, 0], atol=1e-15)


@pytest.mark.parametrize("x", [-0.01, 1.01, float("nan")])
def test_encode_domain(x):
    with pytest.raises(DomainError):
        encode(x)
    with pytest.raises(DomainError):
        encode_amplitudes([0.5, x])


def test_unknown_scheme():
    with pytest.raises(DomainError):
        encode(0.5, "cubic")


@settings(max_examples=1000, deadline=None)
@given(st.floats(0, 1), st.sampled_from(list(EncodingScheme)))
def test_encode_normalized_and_vectorized(x, scheme):
    s = encode(x, scheme)
    assert abs(np.sum(np.abs(s) ** 2) - 1) < 1e-12
    assert s[2] == 0 and s.real.min() >= 0 and np.all(s.imag == 0)
    a, b = encode_amplitudes([x], scheme)
    assert a[0] == s[0].real and b[0] == s[1].real


def test_encoding_phase_examples():
    assert encoding_phase(1, "sqrt-flipped") == pytest.approx(math.pi)
    assert encoding_phase(0.5, "sqrt-flipped") == pytest.approx(math.pi / 2)


@pytest.mark.parametrize("scheme", list(EncodingScheme))
def test_encoding_phase_reproduces_encode(scheme):
    rng = np.random.default_rng(5)
    for x in rng.uniform(0, 1, 100):
        theta = encoding_phase(x, scheme)
        out = optics.apply(optics.embed(optics.mzi_unitary(theta), ("A", "B")), [0, 1, 0])
        np.testing.assert_allclose(optics.probabilities(out),
                                   optics.probabilities(encode(x, scheme)), atol=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 1))
def test_pauli_expectations_under_sqrt_encoding(x):
    s = encode(x, "sqrt")[:2]
    rho = np.outer(s, s.conj())
    assert np.trace(SIGMA_Z @ rho).real == pytest.approx(2 * x - 1, abs=1e-12)
    assert np.trace(SIGMA_X @ rho).real == pytest.approx(2 * math.sqrt(x * (1 - x)), abs=1e-12)
