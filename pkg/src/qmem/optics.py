"""Single-photon linear optics over three spatial modes.

Modes are indexed A=0, B=1, C=2. A and B carry the dual-rail qubit
(|0> = photon in A, |1> = photon in B), C is the update mode read by the
memristor feedback. States are length-3 complex vectors, operators are
2x2 or 3x3 complex matrices; everything here is a pure function on numpy
arrays.
"""

import math

import numpy as np

from .errors import DomainError

MODES = {"A": 0, "B": 1, "C": 2}

NORM_TOL = 1e-12
# Roundoff below this is treated as zero probability.
CLAMP_TOL = 1e-12


def _mode_index(mode):
    if isinstance(mode, str):
        try:
            return MODES[mode.upper()]
        except KeyError:
            raise DomainError(f"unknown mode {mode!r}") from None
    idx = int(mode)
    if idx not in (0, 1, 2):
        raise DomainError(f"mode index {mode!r} out of range")
    return idx


def mzi_unitary(theta, psi=0.0):
    """Transfer matrix of a Mach-Zehnder interferometer.

    ``theta`` is the internal phase and ``psi`` the external phase applied to
    the first input port::

        [[e^{i psi} sin(theta/2),  cos(theta/2)],
         [e^{i psi} cos(theta/2), -sin(theta/2)]]

    The cross-coupling power between the two ports is ``cos^2(theta/2)``.
    theta=pi gives diag(1, -1) (identity up to a sign), theta=0 a full swap.
    """
    if not (math.isfinite(theta) and math.isfinite(psi)):
        raise DomainError("MZI phases must be finite")
    s = math.sin(theta / 2.0)
    c = math.cos(theta / 2.0)
    e = complex(math.cos(psi), math.sin(psi))
    return np.array([[e * s, c], [e * c, -s]], dtype=np.complex128)


def mzi_from_reflectivity(r):
    """``mzi_unitary(2 arccos(sqrt(r)), 0)`` built from ``sqrt(r)`` directly.

    Skipping the arccos round trip keeps full precision for ``r`` near 0 or 1.
    """
    if not 0.0 <= r <= 1.0:
        raise DomainError(f"reflectivity {r!r} outside [0, 1]")
    s = math.sqrt(1.0 - r)
    c = math.sqrt(r)
    return np.array([[s, c], [c, -s]], dtype=np.complex128)


def embed(u, modes):
    """Embed a 2x2 unitary acting on an ordered mode pair into a 3x3 operator."""
    u = np.asarray(u, dtype=np.complex128)
    if u.shape != (2, 2):
        raise DomainError(f"expected a 2x2 matrix, got shape {u.shape}")
    i, j = (_mode_index(m) for m in modes)
    if i == j:
        raise DomainError("embedding requires two distinct modes")
    out = np.eye(3, dtype=np.complex128)
    idx = (i, j)
    for r in range(2):
        for c in range(2):
            out[idx[r], idx[c]] = u[r, c]
    return out


def is_unitary(u, tol=NORM_TOL):
    u = np.asarray(u)
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) < tol)


def check_state(state, tol=NORM_TOL):
    state = np.asarray(state, dtype=np.complex128)
    if state.shape != (3,):
        raise DomainError(f"photon state must have 3 amplitudes, got {state.shape}")
    norm = float(np.sum(np.abs(state) ** 2))
    if abs(norm - 1.0) > tol:
        raise DomainError(f"photon state is not normalized (|psi|^2 = {norm!r})")
    return state


def apply(u, state):
    """Evolve a single-photon state through a 3x3 operator."""
    return np.asarray(u, dtype=np.complex128) @ check_state(state)


def probabilities(state):
    """Detection probabilities ``|amp_i|^2`` of the three output modes."""
    p = np.abs(np.asarray(state, dtype=np.complex128)) ** 2
    return p / p.sum()


def sample_counts(p, shots, rng=None):
    """Draw detector click counts for ``shots`` heralded photons.

    ``rng`` may be an integer seed or a ``numpy.random.Generator``; passing a
    generator lets a caller draw a reproducible stream across many steps.
    """
    if shots < 1:
        raise DomainError("shots must be at least 1")
    p = np.asarray(p, dtype=np.float64)
    if np.any(p < -CLAMP_TOL):
        raise DomainError(f"negative probability in {p!r}")
    p = np.clip(p, 0.0, None)
    p = p / p.sum()
    gen = np.random.default_rng(rng)
    return gen.multinomial(int(shots), p)


def dual_rail_state(x, phi=0.0):
    """The tomography input ``sqrt(1-x)|0> + e^{i phi} sqrt(x)|1>``, mode C empty."""
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x={x!r} outside [0, 1]")
    return np.array(
        [math.sqrt(1.0 - x), complex(math.cos(phi), math.sin(phi)) * math.sqrt(x), 0.0],
        dtype=np.complex128,
    )


def memristor_output(state, r):
    """State after the memristor MZI between modes B and C with reflectivity ``r``.

    ``r`` is the power fraction of mode B redirected to the update mode C.
    """
    return apply(embed(mzi_from_reflectivity(r), ("B", "C")), state)


def fold_vacuum(state):
    """Reduced dual-rail density matrix of modes A/B after tracing out C.

    The branch where the photon left through C leaves A and B in vacuum; it is
    merged into |0><0| so the result is a 2x2 state over {|0>, |1>}.
    """
    a, b, c = np.asarray(state, dtype=np.complex128)
    return np.array(
        [[abs(a) ** 2 + abs(c) ** 2, a * b.conjugate()],
         [b * a.conjugate(), abs(b) ** 2]],
        dtype=np.complex128,
    )


def reduced_state(state, r):
    """Reduced output state of the memristor for input ``state`` and reflectivity ``r``."""
    return fold_vacuum(memristor_output(check_state(state), r))


def encoded_reduced_state(x, r, phi=0.0):
    """Shorthand for :func:`reduced_state` on :func:`dual_rail_state`."""
    return reduced_state(dual_rail_state(x, phi), r)


def purity(rho):
    """``Tr(rho^2)`` of a density matrix."""
    rho = np.asarray(rho, dtype=np.complex128)
    return float(np.real(np.trace(rho @ rho)))


def purity_closed_form(sin2_alpha, r):
    """``1 - 2 sin^4(alpha) R (1 - R)`` for the memristor's reduced output."""
    # R(1-R) grouped first so the R <-> 1-R symmetry is exact
    return 1.0 - 2.0 * sin2_alpha**2 * (r * (1.0 - r))
