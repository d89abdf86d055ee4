"""Scalar-to-photon encodings.

Each scheme maps ``x`` in [0, 1] to real, nonnegative amplitudes on modes A
and B with mode C empty.
"""

import enum
import math

import numpy as np

from .errors import DomainError


class EncodingScheme(str, enum.Enum):
    SQRT = "sqrt"                  # (sqrt(x), sqrt(1-x), 0)
    AMPLITUDE = "amplitude"        # (x, sqrt(1-x^2), 0)
    SQRT_FLIPPED = "sqrt-flipped"  # (sqrt(1-x), sqrt(x), 0)

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            names = ", ".join(s.value for s in cls)
            raise DomainError(f"unknown encoding {value!r}; expected one of {names}") from None


def _check_x(x):
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"input {x!r} outside [0, 1]")


def amplitudes(x, scheme):
    """Real (amp_A, amp_B) pair; both computed directly to keep precision at the ends."""
    scheme = EncodingScheme.parse(scheme)
    _check_x(x)
    if scheme is EncodingScheme.SQRT:
        return math.sqrt(x), math.sqrt(1.0 - x)
    if scheme is EncodingScheme.AMPLITUDE:
        return float(x), math.sqrt((1.0 - x) * (1.0 + x))
    return math.sqrt(1.0 - x), math.sqrt(x)


def encode(x, scheme=EncodingScheme.SQRT):
    """Photon state (amp_A, amp_B, 0) carrying ``x``."""
    a, b = amplitudes(x, scheme)
    return np.array([a, b, 0.0], dtype=np.complex128)


def encoding_phase(x, scheme=EncodingScheme.SQRT):
    """Internal MZI phase that prepares ``encode(x, scheme)`` from a photon in mode B.

    With a photon entering mode B, ``mzi_unitary(theta)`` sends power
    ``cos^2(theta/2)`` to mode A, so ``theta = 2 arccos(|amp_A|)``.
    """
    return 2.0 * math.acos(min(1.0, amplitudes(x, scheme)[0]))


def encode_amplitudes(xs, scheme=EncodingScheme.SQRT):
    """Vectorised :func:`encode` returning the real mode-A and mode-B columns."""
    scheme = EncodingScheme.parse(scheme)
    xs = np.asarray(xs, dtype=np.float64)
    if xs.size and (not np.all(np.isfinite(xs)) or xs.min() < 0.0 or xs.max() > 1.0):
        raise DomainError("inputs must lie in [0, 1]")
    if scheme is EncodingScheme.SQRT:
        return np.sqrt(xs), np.sqrt(1.0 - xs)
    if scheme is EncodingScheme.AMPLITUDE:
        return xs.copy(), np.sqrt((1.0 - xs) * (1.0 + xs))
    return np.sqrt(1.0 - xs), np.sqrt(xs)
