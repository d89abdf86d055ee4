"""Classical feedback laws driving the memristor reflectivity.

The memristor is an MZI whose reflectivity ``R_t`` is recomputed after every
photon from the detection probability ``p2`` of the update mode. Three rules
are supported:

* :class:`MovingAverage` - ``R_t`` is the mean of ``a * p2 + b`` over the last
  ``m`` steps (partial window during warm-up), clamped to [0, 1].
* :class:`ExpMovingAverage` - ``R_t = R_{t-1} + (p2_{t-1} - R_{t-1}) / m_d``.
* :class:`Frozen` - no feedback, ``R`` stays fixed.
"""

import math
from dataclasses import dataclass, field, replace
from typing import Tuple, Union

import numpy as np

from .errors import DomainError

DEFAULT_R0 = 0.5


@dataclass(frozen=True)
class MovingAverage:
    m: int
    a: float = 1.0
    b: float = 0.0

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise DomainError(f"window length must be a positive integer, got {self.m!r}")


@dataclass(frozen=True)
class ExpMovingAverage:
    m_d: float

    def __post_init__(self):
        if not self.m_d >= 1.0:
            raise DomainError(f"memory decay must be >= 1, got {self.m_d!r}")


@dataclass(frozen=True)
class Frozen:
    r: float = DEFAULT_R0

    def __post_init__(self):
        if not 0.0 <= self.r <= 1.0:
            raise DomainError(f"frozen reflectivity {self.r!r} outside [0, 1]")


FeedbackRule = Union[MovingAverage, ExpMovingAverage, Frozen]


@dataclass(frozen=True)
class MemristorState:
    r: float = DEFAULT_R0
    p2_history: Tuple[float, ...] = field(default_factory=tuple)
    t: int = 0
    clamp_events: int = 0


def phase_of(r):
    """Internal MZI phase ``2 arccos(sqrt(R))`` realising reflectivity ``r``."""
    if not 0.0 <= r <= 1.0:
        raise DomainError(f"reflectivity {r!r} outside [0, 1]")
    return 2.0 * math.acos(math.sqrt(r))


def _clamp(value):
    if value < 0.0:
        return 0.0, True
    if value > 1.0:
        return 1.0, True
    return value, False


def initial_state(rule, r0=DEFAULT_R0):
    if isinstance(rule, Frozen):
        r0 = rule.r
    if not 0.0 <= r0 <= 1.0:
        raise DomainError(f"initial reflectivity {r0!r} outside [0, 1]")
    return MemristorState(r=float(r0))


def update(state, rule, p2):
    """Advance the memristor by one step after observing ``p2`` on the update mode."""
    if not 0.0 <= p2 <= 1.0:
        raise DomainError(f"probability {p2!r} outside [0, 1]")
    t = state.t + 1
    clamped = False
    if isinstance(rule, MovingAverage):
        history = (state.p2_history + (float(p2),))[-rule.m:]
        r, clamped = _clamp(sum(rule.a * p + rule.b for p in history) / len(history))
    elif isinstance(rule, ExpMovingAverage):
        history = (float(p2),)
        r, clamped = _clamp(state.r + (p2 - state.r) / rule.m_d)
    elif isinstance(rule, Frozen):
        history = (float(p2),)
        r = state.r
    else:
        raise TypeError(f"unknown feedback rule {rule!r}")
    return MemristorState(
        r=r, p2_history=history, t=t, clamp_events=state.clamp_events + int(clamped)
    )


def inclusive_window_r(state, rule, q, coupling="cross"):
    """Reflectivity when the averaging window also contains the current step.

    The current step's ``p2`` depends on ``R_t`` itself (``p2 = R q`` for cross
    coupling, ``(1 - R) q`` for bar coupling, with ``q`` the power entering the
    memristor), so the window mean is solved for ``R_t`` in closed form.
    Returns ``(r, clamped)``.
    """
    if not isinstance(rule, MovingAverage):
        raise TypeError("the inclusive window only applies to MovingAverage")
    prev = state.p2_history[-(rule.m - 1):] if rule.m > 1 else ()
    k = len(prev) + 1
    s = sum(rule.a * p + rule.b for p in prev) + rule.b
    aq = rule.a * q
    if coupling == "cross":
        denom = k - aq
        # no fixed point below 1 when the gain outruns the window
        r = (s / denom) if denom > 0.0 else 2.0
    else:
        r = (s + aq) / (k + aq)
    return _clamp(r)


def closed_form_ema(r0, p2_seq, m_d):
    """Solved recursion of the exponential moving average.

    ``R_t = (1 - 1/m)^t R_0 + (1/m) sum_i (1 - 1/m)^(t-1-i) p_i``.
    """
    if not m_d >= 1.0:
        raise DomainError(f"memory decay must be >= 1, got {m_d!r}")
    p = np.asarray(p2_seq, dtype=np.float64)
    t = p.size
    keep = 1.0 - 1.0 / m_d
    if t == 0:
        return float(r0)
    weights = keep ** np.arange(t - 1, -1, -1, dtype=np.float64)
    return float(keep**t * r0 + np.dot(weights, p) / m_d)


def iterate(rule, p2_seq, r0=DEFAULT_R0):
    """Run :func:`update` over a sequence and return the final state."""
    state = initial_state(rule, r0)
    for p in p2_seq:
        state = update(state, rule, p)
    return state


def with_r(state, r):
    return replace(state, r=float(r))
