"""Time the numba kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each path runs in its own interpreter because ``QMEM_NO_NUMBA`` is read once
at import time.
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

from qmem import kernels
from qmem._accel import NUMBA_ENABLED
from qmem.encoding import EncodingScheme, encode_amplitudes


def _best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(n=1000):
    rng = np.random.default_rng(0)
    x = rng.uniform(0.0, 0.5, n)
    amp_a, amp_b = encode_amplitudes(x, EncodingScheme.AMPLITUDE)
    grid = np.linspace(0.0, 1.0, 101)
    ga, gb = encode_amplitudes(grid, EncodingScheme.SQRT)
    q = np.array([4.1, 0.0, 2.5, np.pi, 1.4, -0.08])

    def reservoir(k):
        probs, r = np.empty((n, 3)), np.empty(n)
        return lambda: k(amp_a, amp_b, np.pi, 0.0, np.pi, 0.0, True, kernels.RULE_EMA, 1,
                         1.0, 0.0, 4.0, 0.5, False, probs, r)

    def narma(k):
        return lambda: k(x, 0.0, 0.0)

    def mackey(k):
        return lambda: k(n * 10, 170, 0.1, 0.2, 0.1, 10.0, 1.2)

    def grad(k):
        probs, r, g = np.empty((101, 3)), np.empty(101), np.zeros(6)
        return lambda: k(q.copy(), 1e-5, ga, gb, grid**4, kernels.RULE_MA, 6, 0.5, probs, r, g)

    return {
        "reservoir_exact (1000 steps)": (kernels.reservoir_exact, reservoir),
        "narma_recurrence (1000 steps)": (kernels.narma_recurrence, narma),
        "mackey_glass_rk4 (10000 steps)": (kernels.mackey_glass_rk4, mackey),
        "fd_gradient (6 params, 101 pts)": (kernels.fd_gradient, grad),
    }


def measure(repeat):
    out = {}
    for name, (kernel, make) in cases().items():
        fn = make(kernel)
        fn()  # compile outside the timing
        out[name] = _best_of(fn, repeat)
    return out


def _child(flag, repeat):
    env = dict(os.environ, QMEM_NO_NUMBA=flag)
    cmd = [sys.executable, __file__, "--child", "--repeat", str(repeat)]
    res = subprocess.run(cmd, env=env, capture_output=True, text=True, check=True)
    return json.loads(res.stdout)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args(argv)
    if args.child:
        print(json.dumps({"numba": NUMBA_ENABLED, "times": measure(args.repeat)}))
        return
    fast, slow = _child("0", args.repeat), _child("1", args.repeat)
    if not fast["numba"] or slow["numba"]:
        print("warning: could not isolate the two paths", file=sys.stderr)
    print(f"{'kernel':<34}{'numba [ms]':>12}{'fallback [ms]':>15}{'speedup':>10}")
    for name, t_fast in fast["times"].items():
        t_slow = slow["times"][name]
        print(f"{name:<34}{t_fast * 1e3:>12.3f}{t_slow * 1e3:>15.3f}{t_slow / t_fast:>9.0f}x")


if __name__ == "__main__":
    main()
