"""Adam search over the device phases and feedback gains for the monomial task.

The search runs in two rounds. Every candidate start first gets a short
burn-in; only the best few keep going for the full iteration budget. Early
loss turns out to be a good predictor of where a trajectory ends up, so this
spends most of the compute on trajectories that can still win.
"""

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import kernels, readout, reservoir, tasks
from .encoding import EncodingScheme, encode_amplitudes
from .errors import DomainError
from .memristor import DEFAULT_R0, Frozen, MovingAverage

N_PARAMS = 6
_FEEDBACK_MASK = np.ones(N_PARAMS, dtype=np.bool_)
_FROZEN_MASK = np.array([True, True, True, True, False, False])


@dataclass(frozen=True)
class HyperParams:
    theta1: float
    psi1: float
    theta5: float
    psi4: float
    a: float = 1.0
    b: float = 0.0
    m: int = 1
    feedback: bool = True

    def __post_init__(self):
        if not all(math.isfinite(v) for v in self.vector()):
            raise DomainError("hyperparameters must be finite")

    def vector(self):
        return np.array([self.theta1, self.psi1, self.theta5, self.psi4, self.a, self.b])

    @classmethod
    def from_vector(cls, q, m=1, feedback=True):
        return cls(*(float(v) for v in q), m=int(m), feedback=bool(feedback))

    def config(self):
        """Reservoir configuration realising these parameters."""
        rule = MovingAverage(self.m, self.a, self.b) if self.feedback else Frozen(DEFAULT_R0)
        return reservoir.ReservoirConfig(
            scheme=EncodingScheme.SQRT,
            u1=(self.theta1, self.psi1),
            u2=(self.theta5, self.psi4),
            rule=rule,
            coupling="cross",
        )

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class AdamConfig:
    lr: float = 0.4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    iters: int = 500
    fd_step: float = 1e-5
    lr_final_ratio: float = 0.01  # geometric decay of the step over the run
    burn_in: int = 50
    pool: int = 16  # burn-in candidates per survivor and memory length

    def __post_init__(self):
        if not self.lr > 0:
            raise DomainError("lr must be positive")
        if not (0 < self.beta1 < 1 and 0 < self.beta2 < 1):
            raise DomainError("beta1 and beta2 must lie in (0, 1)")
        if self.iters < 1 or not 0 <= self.burn_in <= self.iters:
            raise DomainError("need 0 <= burn_in <= iters and iters >= 1")
        if not 0 < self.lr_final_ratio <= 1:
            raise DomainError("lr_final_ratio must lie in (0, 1]")


@dataclass
class OptimizeResult:
    params: HyperParams
    loss: float
    history: np.ndarray
    nonfinite_restarts: int = 0
    candidates: int = 0

    def to_dict(self):
        return {
            "params": self.params.to_dict(),
            "loss": self.loss,
            "nonfinite_restarts": self.nonfinite_restarts,
            "candidates": self.candidates,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _problem(n_exp, grid):
    grid = np.linspace(0.0, 1.0, 101) if grid is None else np.asarray(grid, dtype=np.float64)
    if grid.size == 0 or grid.min() < 0 or grid.max() > 1:
        raise DomainError("grid must be nonempty and inside [0, 1]")
    amp_a, amp_b = encode_amplitudes(grid, EncodingScheme.SQRT)
    return grid, amp_a, amp_b, grid**n_exp


def _kind(feedback):
    return kernels.RULE_MA if feedback else kernels.RULE_FROZEN


def loss(hp, n_exp, grid=None):
    """Mean of ``(p_D(x) - x^n)^2`` with the grid fed as an ascending sequence."""
    grid, amp_a, amp_b, target = _problem(n_exp, grid)
    probs = np.empty((grid.size, 3))
    r_trace = np.empty(grid.size)
    return float(kernels.monomial_loss(hp.vector(), amp_a, amp_b, target, _kind(hp.feedback),
                                       hp.m, DEFAULT_R0, probs, r_trace))


def fd_gradient(hp, n_exp, grid=None, h=1e-5):
    grid, amp_a, amp_b, target = _problem(n_exp, grid)
    probs = np.empty((grid.size, 3))
    r_trace = np.empty(grid.size)
    g = np.zeros(N_PARAMS)
    kernels.fd_gradient(hp.vector(), h, amp_a, amp_b, target, _kind(hp.feedback), hp.m,
                        DEFAULT_R0, probs, r_trace, g)
    return g


def _draw(rng, count):
    return np.column_stack([
        rng.uniform(0.0, 2 * math.pi, (count, 4)),
        rng.uniform(0.0, 2.0, count),
        rng.uniform(-0.5, 0.5, count),
    ])


@dataclass
class _Trajectory:
    q: np.ndarray
    m: int
    mom: np.ndarray = field(default_factory=lambda: np.zeros(N_PARAMS))
    vel: np.ndarray = field(default_factory=lambda: np.zeros(N_PARAMS))
    best_q: Optional[np.ndarray] = None
    best: float = math.inf
    history: Optional[np.ndarray] = None


def optimize(n_exp, grid=None, adam=AdamConfig(), restarts=8, seed=0, feedback=True,
             m_values: Sequence[int] = range(1, 9)):
    """Best parameters found by ``restarts`` full Adam trajectories.

    Each memory length in ``m_values`` gets ``adam.pool * restarts`` random
    starts, all run for ``adam.burn_in`` iterations; the ``restarts`` best
    across every ``m`` continue to ``adam.iters``. Without feedback the memory
    length is irrelevant and the gains stay fixed, so the same total pool is
    drawn once. Fully deterministic for a given seed.
    """
    if restarts < 1:
        raise DomainError("restarts must be >= 1")
    grid, amp_a, amp_b, target = _problem(n_exp, grid)
    rng = np.random.default_rng(seed)
    kind = _kind(feedback)
    mask = _FEEDBACK_MASK if feedback else _FROZEN_MASK
    ms = list(m_values) if feedback else [1]
    per_m = adam.pool * restarts * (1 if feedback else len(list(m_values)))
    nonfinite = 0
    empty = np.empty(0)

    def advance(tr, k0, k1, hist):
        nonlocal nonfinite
        for _ in range(20):
            if tr.best_q is None:
                tr.best_q = tr.q.copy()
            best, ok = kernels.adam_steps(
                tr.q, tr.mom, tr.vel, k0, k1, adam.iters, adam.lr, adam.lr_final_ratio,
                adam.beta1, adam.beta2, adam.eps, adam.fd_step, amp_a, amp_b, target, kind,
                tr.m, DEFAULT_R0, mask, tr.best_q, hist)
            if ok:
                tr.best = best
                return tr
            # restart from a fresh draw, keeping the slot
            nonfinite += 1
            tr.q = _draw(rng, 1)[0]
            tr.mom[:] = 0.0
            tr.vel[:] = 0.0
            tr.best_q = None
            k0 = 0
        raise RuntimeError("optimisation kept producing non-finite losses")

    pool = []
    for m in ms:
        for q0 in _draw(rng, per_m):
            pool.append(advance(_Trajectory(q=q0, m=m), 0, adam.burn_in, empty))
    pool.sort(key=lambda tr: tr.best)
    survivors = pool[:restarts]
    winner = None
    for tr in survivors:
        tr.history = np.full(adam.iters, np.nan)
        tr.history[:adam.burn_in] = tr.best
        advance(tr, adam.burn_in, adam.iters, tr.history)
        if winner is None or tr.best < winner.best:
            winner = tr
    if adam.burn_in == adam.iters:
        winner.history[:] = winner.best
    params = HyperParams.from_vector(winner.best_q, m=winner.m, feedback=feedback)
    return OptimizeResult(params, float(winner.best), winner.history, nonfinite, len(pool))


@dataclass
class MonomialOutcome:
    n_exp: int
    params: HyperParams
    loss: float
    mse_train: float
    mse_test: float
    predictions: np.ndarray
    targets: np.ndarray
    clamp_events: int


def evaluate(params, n_exp, grid=None, train_cutoff=0.9, ridge=0.0):
    """Run the reservoir on the monomial grid and fit the readout."""
    ds = tasks.monomial(n_exp, grid, train_cutoff)
    fm = reservoir.run(ds.inputs, params.config())
    _, tr, te, y_hat = readout.evaluate(fm, ds.targets, ds.split, ridge=ridge)
    return MonomialOutcome(n_exp, params, loss(params, n_exp, ds.inputs), tr, te, y_hat,
                           ds.targets, fm.clamp_events)


def compare(n_exp, grid=None, adam=AdamConfig(), restarts=8, seed=0, m_values=range(1, 9)):
    """Independently optimised with- and without-feedback devices for one exponent."""
    fb = optimize(n_exp, grid, adam, restarts, seed, True, m_values)
    fr = optimize(n_exp, grid, adam, restarts, seed, False, m_values)
    return evaluate(fb.params, n_exp, grid), evaluate(fr.params, n_exp, grid), fb, fr


def accuracy_ratios(with_fb, without_fb, split):
    """Two readings of "how much worse" the ablation is on the test slice.

    Returns ``(mse_ratio, mean_abs_error_ratio)``, each ablation over feedback.
    """
    sl = split.test_slice
    err_fb = np.abs(with_fb.predictions[sl] - with_fb.targets[sl])
    err_fr = np.abs(without_fb.predictions[sl] - without_fb.targets[sl])
    return without_fb.mse_test / with_fb.mse_test, float(err_fr.mean() / err_fb.mean())
