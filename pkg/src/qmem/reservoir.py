"""The time-stepped photonic reservoir.

At every step the input is encoded on modes A/B, MZI1 applies ``U1`` on
(A, B), the memristor MZI couples B to the update mode C, MZI3 applies ``U2``
on (A, B), and the output probabilities feed both the readout and the
memristor feedback.
"""

import csv
import io
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Optional, Tuple

import numpy as np

from . import kernels, optics
from .encoding import EncodingScheme, encode, encode_amplitudes
from .errors import DomainError
from .memristor import (
    DEFAULT_R0,
    ExpMovingAverage,
    Frozen,
    MovingAverage,
    MemristorState,
    inclusive_window_r,
    update,
)

IDENTITY_PHASES = (math.pi, 0.0)
COUPLINGS = ("cross", "bar")


def rule_to_dict(rule):
    if isinstance(rule, MovingAverage):
        return {"kind": "ma", "m": int(rule.m), "a": float(rule.a), "b": float(rule.b)}
    if isinstance(rule, ExpMovingAverage):
        return {"kind": "ema", "m_d": float(rule.m_d)}
    if isinstance(rule, Frozen):
        return {"kind": "frozen", "r": float(rule.r)}
    raise TypeError(f"unknown feedback rule {rule!r}")


def rule_from_dict(d):
    kind = d.get("kind")
    if kind == "ma":
        return MovingAverage(int(d["m"]), float(d.get("a", 1.0)), float(d.get("b", 0.0)))
    if kind == "ema":
        return ExpMovingAverage(float(d["m_d"]))
    if kind == "frozen":
        return Frozen(float(d.get("r", DEFAULT_R0)))
    raise DomainError(f"unknown feedback rule kind {kind!r}")


@dataclass(frozen=True)
class ReservoirConfig:
    """Everything needed to reproduce a reservoir run.

    ``u1`` and ``u2`` are (internal, external) MZI phases; ``(pi, 0)`` is the
    identity up to a sign. ``coupling`` picks which memristor output port is the
    update mode (see README). ``shots=None`` means exact probabilities.
    """

    scheme: EncodingScheme = EncodingScheme.SQRT
    u1: Tuple[float, float] = IDENTITY_PHASES
    u2: Tuple[float, float] = IDENTITY_PHASES
    rule: object = field(default_factory=lambda: ExpMovingAverage(4.0))
    r0: float = DEFAULT_R0
    shots: Optional[int] = None
    seed: int = 0
    coupling: str = "cross"
    window_inclusive: bool = False

    def __post_init__(self):
        object.__setattr__(self, "scheme", EncodingScheme.parse(self.scheme))
        object.__setattr__(self, "u1", tuple(float(v) for v in self.u1))
        object.__setattr__(self, "u2", tuple(float(v) for v in self.u2))
        if len(self.u1) != 2 or len(self.u2) != 2:
            raise DomainError("u1 and u2 take (theta, psi) pairs")
        if not all(math.isfinite(v) for v in self.u1 + self.u2):
            raise DomainError("MZI phases must be finite")
        if not 0.0 <= self.r0 <= 1.0:
            raise DomainError(f"r0={self.r0!r} outside [0, 1]")
        if self.coupling not in COUPLINGS:
            raise DomainError(f"coupling must be one of {COUPLINGS}, got {self.coupling!r}")
        if self.shots is not None and int(self.shots) < 1:
            raise DomainError("shots must be at least 1")
        if not isinstance(self.rule, (MovingAverage, ExpMovingAverage, Frozen)):
            raise DomainError(f"unknown feedback rule {self.rule!r}")

    @property
    def initial_r(self):
        return self.rule.r if isinstance(self.rule, Frozen) else self.r0

    def frozen(self, r=None):
        """Same device with the feedback loop cut and R held at ``r`` (default r0)."""
        r = self.r0 if r is None else r
        return replace(self, rule=Frozen(r), r0=r)

    def to_dict(self):
        d = asdict(self)
        d["scheme"] = self.scheme.value
        d["u1"] = list(self.u1)
        d["u2"] = list(self.u2)
        d["rule"] = rule_to_dict(self.rule)
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        d["rule"] = rule_from_dict(d["rule"])
        d["u1"] = tuple(d["u1"])
        d["u2"] = tuple(d["u2"])
        return cls(**d)


@dataclass
class FeatureMatrix:
    rows: np.ndarray
    r_trace: np.ndarray
    clamp_events: int = 0

    def __len__(self):
        return self.rows.shape[0]

    def to_csv(self):
        buf = io.StringIO()
        buf.write("t,p0,p1,p2,R\n")
        for t, (row, r) in enumerate(zip(self.rows, self.r_trace)):
            buf.write(f"{t},{row[0]:.17g},{row[1]:.17g},{row[2]:.17g},{r:.17g}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text):
        reader = csv.reader(io.StringIO(text))
        header = next(reader)
        if header != ["t", "p0", "p1", "p2", "R"]:
            raise DomainError(f"unexpected feature header {header}")
        data = np.array([[float(v) for v in line[1:]] for line in reader if line])
        data = data.reshape(-1, 4)
        return cls(rows=data[:, :3].copy(), r_trace=data[:, 3].copy())


def _rule_args(cfg):
    rule = cfg.rule
    if isinstance(rule, MovingAverage):
        return kernels.RULE_MA, int(rule.m), float(rule.a), float(rule.b), 1.0
    if isinstance(rule, ExpMovingAverage):
        return kernels.RULE_EMA, 1, 1.0, 0.0, float(rule.m_d)
    return kernels.RULE_FROZEN, 1, 1.0, 0.0, 1.0


def _run_exact(xs, cfg, kernel):
    amp_a, amp_b = encode_amplitudes(xs, cfg.scheme)
    n = amp_a.shape[0]
    probs = np.empty((n, 3))
    r_trace = np.empty(n)
    kind, m, a, b, md = _rule_args(cfg)
    clamps = kernel(
        amp_a, amp_b, cfg.u1[0], cfg.u1[1], cfg.u2[0], cfg.u2[1], cfg.coupling == "bar",
        kind, m, a, b, md, float(cfg.initial_r), bool(cfg.window_inclusive), probs, r_trace,
    )
    return FeatureMatrix(rows=probs, r_trace=r_trace, clamp_events=int(clamps))


def run_reference(xs, cfg):
    """Step-by-step run built from the optics and memristor primitives.

    Slow but independent of the compiled kernel; also the only path that
    supports finite ``shots``, in which case the feedback sees count
    frequencies drawn from a generator seeded with ``cfg.seed``.
    """
    xs = np.asarray(xs, dtype=np.float64)
    u1 = optics.embed(optics.mzi_unitary(*cfg.u1), ("A", "B"))
    u2 = optics.embed(optics.mzi_unitary(*cfg.u2), ("A", "B"))
    gen = np.random.default_rng(cfg.seed) if cfg.shots is not None else None
    state = MemristorState(r=float(cfg.initial_r))
    rows = np.empty((xs.size, 3))
    r_trace = np.empty(xs.size)
    clamps = 0
    for t, x in enumerate(xs):
        psi = optics.apply(u1, encode(float(x), cfg.scheme))
        r = state.r
        if cfg.window_inclusive and isinstance(cfg.rule, MovingAverage):
            r, clamped = inclusive_window_r(state, cfg.rule, abs(psi[1]) ** 2, cfg.coupling)
            clamps += int(clamped)
        r_trace[t] = r
        r_port = r if cfg.coupling == "cross" else 1.0 - r
        mem = optics.embed(optics.mzi_from_reflectivity(r_port), ("B", "C"))
        p = optics.probabilities(optics.apply(u2, optics.apply(mem, psi)))
        if gen is not None:
            p = optics.sample_counts(p, cfg.shots, gen) / float(cfg.shots)
        rows[t] = p
        before = state.clamp_events
        state = update(state, cfg.rule, min(1.0, float(p[2])))
        if not cfg.window_inclusive:
            clamps += state.clamp_events - before
    return FeatureMatrix(rows=rows, r_trace=r_trace, clamp_events=clamps)


def run(xs, cfg):
    """Feature matrix for the input sequence ``xs`` under ``cfg``."""
    xs = np.asarray(xs, dtype=np.float64)
    if xs.ndim != 1:
        raise DomainError("inputs must be a 1-D sequence")
    if cfg.shots is not None:
        return run_reference(xs, cfg)
    return _run_exact(xs, cfg, kernels.reservoir_exact)


def run_pair(xs, cfg_feedback, cfg_frozen=None):
    """Run the same inputs with and without feedback.

    ``cfg_frozen`` defaults to ``cfg_feedback.frozen()``; it must carry a
    :class:`Frozen` rule.
    """
    cfg_frozen = cfg_feedback.frozen() if cfg_frozen is None else cfg_frozen
    if not isinstance(cfg_frozen.rule, Frozen):
        raise DomainError("the ablation config must use a Frozen rule")
    return run(xs, cfg_feedback), run(xs, cfg_frozen)


# Device presets for the time-series tasks (identity U1/U2, bar coupling).
PRESETS = {
    "narma": dict(scheme=EncodingScheme.AMPLITUDE, m_d=4.0),
    "mackey-glass": dict(scheme=EncodingScheme.SQRT_FLIPPED, m_d=2.0),
    "santa-fe": dict(scheme=EncodingScheme.SQRT_FLIPPED, m_d=6.0),
}


def preset(task, rule=None, **overrides):
    """Reservoir configuration used for a named time-series task."""
    try:
        spec = PRESETS[task]
    except KeyError:
        raise DomainError(f"no reservoir preset for task {task!r}") from None
    rule = ExpMovingAverage(spec["m_d"]) if rule is None else rule
    kw = dict(scheme=spec["scheme"], rule=rule, coupling="bar")
    kw.update(overrides)
    return ReservoirConfig(**kw)
