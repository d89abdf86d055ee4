"""Hot loops, compiled with numba unless ``QMEM_NO_NUMBA`` is set.

Every kernel is an ordinary Python function wrapped by :func:`_accel.jit`;
:func:`pure` returns the uncompiled body so both paths can be compared in one
process.
"""

import math

import numpy as np

from ._accel import jit

RULE_FROZEN = 0
RULE_EMA = 1
RULE_MA = 2


def pure(kernel):
    """The plain-Python body behind a (possibly) compiled kernel."""
    return getattr(kernel, "py_func", kernel)


@jit
def reservoir_exact(amp_a, amp_b, th1, ps1, th5, ps4, bar, kind, m, a, b, md, r0,
                    inclusive, probs, r_trace):
    """Run the three-MZI reservoir over pre-encoded amplitudes.

    Fills ``probs`` (n x 3) and ``r_trace`` (n) in place and returns the number
    of clamp events. ``bar`` selects which memristor port feeds the update
    mode: cross gives ``p2 = R |B|^2``, bar gives ``p2 = (1 - R) |B|^2``.
    """
    n = amp_a.shape[0]
    s1 = math.sin(th1 / 2.0)
    c1 = math.cos(th1 / 2.0)
    e1 = complex(math.cos(ps1), math.sin(ps1))
    s5 = math.sin(th5 / 2.0)
    c5 = math.cos(th5 / 2.0)
    e5 = complex(math.cos(ps4), math.sin(ps4))
    ring = np.zeros(max(m, 1))
    filled = 0
    head = 0
    r = r0
    clamps = 0
    for t in range(n):
        x_a = amp_a[t]
        x_b = amp_b[t]
        av = e1 * s1 * x_a + c1 * x_b
        bv = e1 * c1 * x_a - s1 * x_b
        q = bv.real * bv.real + bv.imag * bv.imag
        if kind == RULE_MA and inclusive:
            k = min(m, filled + 1)
            s = b
            for j in range(k - 1):
                s += ring[(head - 1 - j) % m]
            aq = a * q
            if bar:
                r = (s + aq) / (k + aq)
            else:
                den = k - aq
                r = s / den if den > 0.0 else 2.0
            if r < 0.0:
                r = 0.0
                clamps += 1
            elif r > 1.0:
                r = 1.0
                clamps += 1
        r_trace[t] = r
        if bar:
            keep = math.sqrt(r)
            out = math.sqrt(1.0 - r)
        else:
            keep = math.sqrt(1.0 - r)
            out = math.sqrt(r)
        b2 = keep * bv
        cv = out * bv
        a3 = e5 * s5 * av + c5 * b2
        b3 = e5 * c5 * av - s5 * b2
        p0 = a3.real * a3.real + a3.imag * a3.imag
        p1 = b3.real * b3.real + b3.imag * b3.imag
        p2 = cv.real * cv.real + cv.imag * cv.imag
        tot = p0 + p1 + p2
        p0 /= tot
        p1 /= tot
        p2 /= tot
        probs[t, 0] = p0
        probs[t, 1] = p1
        probs[t, 2] = p2
        if kind == RULE_EMA:
            r = r + (p2 - r) / md
            if r < 0.0:
                r = 0.0
                clamps += 1
            elif r > 1.0:
                r = 1.0
                clamps += 1
        elif kind == RULE_MA:
            ring[head] = a * p2 + b
            head = (head + 1) % m
            if filled < m:
                filled += 1
            if not inclusive:
                s = 0.0
                for j in range(filled):
                    s += ring[j]
                r = s / filled
                if r < 0.0:
                    r = 0.0
                    clamps += 1
                elif r > 1.0:
                    r = 1.0
                    clamps += 1
    return clamps


@jit
def narma_recurrence(x, y1, y2):
    """Second-order NARMA series ``y`` of length ``len(x) + 1``.

    ``y[0] = y1`` and ``y[1] = y2``; for t >= 1,
    ``y[t+1] = 0.4 y[t] + 0.4 y[t] y[t-1] + 0.6 x[t]^3 + 0.1``.
    """
    n = x.shape[0]
    y = np.zeros(n + 1)
    y[0] = y1
    if n >= 1:
        y[1] = y2
    for t in range(1, n):
        y[t + 1] = 0.4 * y[t] + 0.4 * y[t] * y[t - 1] + 0.6 * x[t] ** 3 + 0.1
    return y


@jit
def _mg_rhs(x, xd, beta, gamma, expo):
    return beta * xd / (1.0 + xd**expo) - gamma * x


@jit
def mackey_glass_rk4(n_steps, delay_steps, dt, beta, gamma, expo, x0):
    """Fixed-step RK4 for the Mackey-Glass delay equation.

    Returns ``delay_steps + 1 + n_steps`` values; the first ``delay_steps + 1``
    are the constant history. The delayed argument at half steps is the
    average of the two bracketing grid values.
    """
    d = delay_steps
    x = np.empty(d + 1 + n_steps)
    for i in range(d + 1):
        x[i] = x0
    for i in range(d, d + n_steps):
        xd0 = x[i - d]
        xd1 = x[i - d + 1]
        xdh = 0.5 * (xd0 + xd1)
        xi = x[i]
        k1 = _mg_rhs(xi, xd0, beta, gamma, expo)
        k2 = _mg_rhs(xi + 0.5 * dt * k1, xdh, beta, gamma, expo)
        k3 = _mg_rhs(xi + 0.5 * dt * k2, xdh, beta, gamma, expo)
        k4 = _mg_rhs(xi + dt * k3, xd1, beta, gamma, expo)
        x[i + 1] = xi + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return x


@jit
def monomial_loss(q, amp_a, amp_b, target, kind, m, r0, probs, r_trace):
    """Mean squared gap between p_D and the target for ``q = (th1, ps1, th5, ps4, a, b)``."""
    reservoir_exact(amp_a, amp_b, q[0], q[1], q[2], q[3], False, kind, m, q[4], q[5],
                    1.0, r0, False, probs, r_trace)
    s = 0.0
    n = target.shape[0]
    for t in range(n):
        d = probs[t, 0] - target[t]
        s += d * d
    return s / n


@jit
def fd_gradient(q, h, amp_a, amp_b, target, kind, m, r0, probs, r_trace, grad):
    """Central finite-difference gradient of :func:`monomial_loss`, written into ``grad``."""
    d = q.shape[0]
    for i in range(d):
        orig = q[i]
        q[i] = orig + h
        lp = monomial_loss(q, amp_a, amp_b, target, kind, m, r0, probs, r_trace)
        q[i] = orig - h
        lm = monomial_loss(q, amp_a, amp_b, target, kind, m, r0, probs, r_trace)
        q[i] = orig
        grad[i] = (lp - lm) / (2.0 * h)


@jit
def adam_steps(q, mom, vel, k_start, k_stop, k_total, lr, lr_final_ratio, beta1, beta2,
               eps, h, amp_a, amp_b, target, kind, m, r0, active, best_q, history):
    """Advance one Adam trajectory from iteration ``k_start`` to ``k_stop``.

    The step size decays geometrically from ``lr`` to ``lr * lr_final_ratio``
    over ``k_total`` iterations. ``active`` flags the coordinates being
    optimised. ``history[k]``, when present, receives the running minimum after
    iteration ``k``. Returns ``(best_loss, ok)``; ``ok`` is False when a non-finite
    loss or gradient appeared, leaving ``q`` at its last finite value.
    """
    n = amp_a.shape[0]
    probs = np.empty((n, 3))
    r_trace = np.empty(n)
    grad = np.zeros(q.shape[0])
    best = monomial_loss(best_q, amp_a, amp_b, target, kind, m, r0, probs, r_trace)
    if not math.isfinite(best):
        best = math.inf
    for k in range(k_start, k_stop):
        step = lr * lr_final_ratio ** (k / k_total)
        fd_gradient(q, h, amp_a, amp_b, target, kind, m, r0, probs, r_trace, grad)
        for i in range(q.shape[0]):
            if not math.isfinite(grad[i]):
                return best, False
        kk = k + 1
        for i in range(q.shape[0]):
            if not active[i]:
                continue
            mom[i] = beta1 * mom[i] + (1.0 - beta1) * grad[i]
            vel[i] = beta2 * vel[i] + (1.0 - beta2) * grad[i] * grad[i]
            mhat = mom[i] / (1.0 - beta1**kk)
            vhat = vel[i] / (1.0 - beta2**kk)
            q[i] -= step * mhat / (math.sqrt(vhat) + eps)
        cur = monomial_loss(q, amp_a, amp_b, target, kind, m, r0, probs, r_trace)
        if not math.isfinite(cur):
            return best, False
        if cur < best:
            best = cur
            best_q[:] = q
        if k < history.shape[0]:
            history[k] = best
    return best, True
