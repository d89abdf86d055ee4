"""Pauli tomography of the memristor's reduced output state.

MZI3 is set to one of three (internal, external) phase pairs to rotate the
measurement basis; the photon is then counted on the two dual-rail outputs D
(mode A) and E (mode B). Events in the update mode are not part of the
post-selected qubit and are added back as vacuum weight afterwards.
"""

import io
import math
from dataclasses import dataclass

import numpy as np

from . import optics
from .errors import DomainError

SIGMA = {
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


@dataclass(frozen=True)
class PauliSetting:
    basis: str
    phi_internal: float
    psi_external: float
    sign: int = 1  # orientation of (p_D - p_E) relative to the Pauli eigenvalues


SETTINGS = {
    "X": PauliSetting("X", math.pi / 2, 0.0),
    "Y": PauliSetting("Y", math.pi / 2, math.pi / 2),
    "Z": PauliSetting("Z", 0.0, 0.0, sign=-1),
}


def _output_state(x, r):
    return optics.memristor_output(optics.dual_rail_state(x), r)


def _detector_probs(x, r, setting):
    mzi3 = optics.embed(optics.mzi_unitary(setting.phi_internal, setting.psi_external), ("A", "B"))
    return optics.probabilities(optics.apply(mzi3, _output_state(x, r)))


def _counts(p, shots, rng):
    return optics.sample_counts(p, shots, rng).astype(np.float64)


def measure_pauli(x, r, setting, shots=None, rng=None):
    """Post-selected expectation of one Pauli operator.

    ``setting`` may be a :class:`PauliSetting` or a basis letter. With
    ``shots`` the detector probabilities are replaced by multinomial counts.
    """
    if not (0.0 <= x <= 1.0 and 0.0 <= r <= 1.0):
        raise DomainError("x and R must lie in [0, 1]")
    if isinstance(setting, str):
        setting = SETTINGS[setting.upper()]
    p = _detector_probs(x, r, setting)
    if shots is not None:
        p = _counts(p, shots, rng)
    mass = p[0] + p[1]
    if mass <= 0.0:
        raise DomainError("no post-selected events: the photon always leaves via the update mode")
    return setting.sign * float((p[0] - p[1]) / mass)


def _clip_psd(rho):
    w, v = np.linalg.eigh(rho)
    w = np.clip(w, 0.0, None)
    rho = (v * w) @ v.conj().T
    return rho / np.trace(rho).real


def reconstruct(x, r, shots=None, seed=0):
    """Linear-inversion estimate of the reduced state with vacuum weight folded in.

    The vacuum weight is the fraction of photons found in the update mode
    (``x R`` exactly). If every photon ends there the state is pure vacuum.
    With finite ``shots`` all three settings share one generator seeded by
    ``seed`` and the estimate is projected back onto valid density matrices.
    """
    if not (0.0 <= x <= 1.0 and 0.0 <= r <= 1.0):
        raise DomainError("x and R must lie in [0, 1]")
    rng = np.random.default_rng(seed) if shots is not None else None
    vac = np.array([[1, 0], [0, 0]], dtype=np.complex128)
    p_update = []
    bloch = {}
    for name, setting in SETTINGS.items():
        p = _detector_probs(x, r, setting)
        if shots is not None:
            p = _counts(p, shots, rng) / shots
        p_update.append(p[2])
        mass = p[0] + p[1]
        bloch[name] = setting.sign * (p[0] - p[1]) / mass if mass > 0 else None
    p_f = float(np.mean(p_update))
    if any(v is None for v in bloch.values()):
        return vac
    rho_ps = 0.5 * (np.eye(2, dtype=np.complex128) + sum(v * SIGMA[k] for k, v in bloch.items()))
    rho = (1.0 - p_f) * rho_ps + p_f * vac
    if shots is not None:
        rho = _clip_psd(rho)
    return rho


def purity_theory(x, r):
    """``1 - 2 x^2 R (1 - R)`` for the dual-rail input of weight ``x`` on |1>."""
    return 1.0 - 2.0 * x * x * r * (1.0 - r)


def grid_csv(xs, rs, shots=None, seed=0):
    buf = io.StringIO()
    buf.write("x,R,purity_reconstructed,purity_closed_form\n")
    for x in xs:
        for r in rs:
            pur = optics.purity(reconstruct(float(x), float(r), shots, seed))
            buf.write(f"{x:.17g},{r:.17g},{pur:.17g},{purity_theory(x, r):.17g}\n")
    return buf.getvalue()
