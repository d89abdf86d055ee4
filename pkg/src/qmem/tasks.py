"""Benchmark datasets: NARMA, Mackey-Glass, Santa Fe laser and monomials."""

import io
import math
import os
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

from . import kernels
from .errors import DataFileError, DomainError
from .readout import SplitSpec

TASKS = ("narma", "mackey-glass", "santa-fe", "monomial")
NARMA_EPS = 1e-9
SANTA_FE_FILE = "santafe_laser.txt"


@dataclass
class Dataset:
    inputs: np.ndarray
    targets: np.ndarray
    name: str
    seed: Optional[int] = None
    split: SplitSpec = field(default_factory=SplitSpec)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.inputs = np.asarray(self.inputs, dtype=np.float64)
        self.targets = np.asarray(self.targets, dtype=np.float64)
        if self.inputs.shape != self.targets.shape:
            raise DomainError("inputs and targets must be aligned")
        if self.inputs.size and (self.inputs.min() < 0.0 or self.inputs.max() > 1.0):
            raise DomainError("dataset inputs must lie in [0, 1]")

    def __len__(self):
        return self.inputs.size

    def to_csv(self):
        buf = io.StringIO()
        buf.write("t,x,y\n")
        for t, (x, y) in enumerate(zip(self.inputs, self.targets)):
            buf.write(f"{t},{x:.17g},{y:.17g}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text, name="csv", split=None):
        lines = text.splitlines()
        if not lines or lines[0].strip() != "t,x,y":
            raise DataFileError("line 1: expected header 't,x,y'")
        xs, ys = [], []
        for lineno, line in enumerate(lines[1:], start=2):
            if not line.strip():
                continue
            parts = line.split(",")
            try:
                xs.append(float(parts[1]))
                ys.append(float(parts[2]))
            except (IndexError, ValueError):
                raise DataFileError(f"line {lineno}: cannot parse {line!r}") from None
        n = len(xs)
        split = split or SplitSpec(0, n, 0)
        return cls(np.array(xs), np.array(ys), name, split=split)


def _default_split(n):
    if n == 1000:
        return SplitSpec()
    # scale the 20/480/500 protocol to other lengths
    washout = min(20, n // 50)
    train = (n - washout) // 2
    return SplitSpec(washout, train, n - washout - train)


def narma(n=1000, seed=0, y_init=(0.0, 0.0), inputs=None, split=None):
    """Second-order NARMA task.

    Inputs are uniform on the open interval (0, 1/2); the model sees ``x_t``
    and must predict ``y_{t+1}``. ``inputs`` overrides the random draw.
    """
    if n < 3:
        raise DomainError("NARMA needs n >= 3")
    if inputs is None:
        x = np.random.default_rng(seed).uniform(NARMA_EPS, 0.5 - NARMA_EPS, n)
    else:
        x = np.asarray(inputs, dtype=np.float64)
        if x.shape != (n,):
            raise DomainError(f"expected {n} inputs, got shape {x.shape}")
    y = kernels.narma_recurrence(x, float(y_init[0]), float(y_init[1]))
    return Dataset(x, y[1:], "narma", seed, split or _default_split(n),
                   meta={"y_init": list(map(float, y_init))})


def narma_fixed_point():
    """Zero-input equilibrium of the recurrence, root of 0.4y^2 - 0.6y + 0.1."""
    return (0.6 - math.sqrt(0.2)) / 0.8


@dataclass(frozen=True)
class MackeyGlassParams:
    beta: float = 0.2
    gamma: float = 0.1
    n: float = 10.0
    tau: float = 17.0
    dt: float = 0.1
    x0: float = 1.2
    sample_stride: int = 10

    def __post_init__(self):
        if not self.dt > 0:
            raise DomainError("dt must be positive")
        if self.sample_stride < 1:
            raise DomainError("sample_stride must be >= 1")
        ratio = self.tau / self.dt
        if abs(ratio - round(ratio)) > 1e-9 or ratio < 0:
            raise DomainError("tau must be a nonnegative integer multiple of dt")

    @property
    def delay_steps(self):
        return int(round(self.tau / self.dt))

    def to_dict(self):
        return asdict(self)


def integrate_mackey_glass(n_samples, params=MackeyGlassParams()):
    """Raw (unscaled) samples ``x(k * stride * dt)`` for k = 0..n_samples-1.

    Sample 0 is the end of the constant history at t = 0.
    """
    if n_samples < 1:
        raise DomainError("need at least one sample")
    d = params.delay_steps
    steps = (n_samples - 1) * params.sample_stride
    traj = kernels.mackey_glass_rk4(steps, d, params.dt, params.beta, params.gamma,
                                    params.n, params.x0)
    return traj[d::params.sample_stride][:n_samples]


def mackey_glass(n=1000, params=MackeyGlassParams(), split=None):
    """One-step-ahead Mackey-Glass prediction, series scaled to max 1."""
    series = integrate_mackey_glass(n + 1, params)
    peak = series.max()
    if not peak > 0:
        raise DomainError("Mackey-Glass series has no positive maximum to scale by")
    series = series / peak
    return Dataset(series[:-1], series[1:], "mackey-glass", None, split or _default_split(n),
                   meta={"params": params.to_dict(), "scale": float(peak)})


def read_intensity_file(path):
    """Parse one nonnegative integer per line. Blank lines are skipped."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"Santa Fe data file not found: {path}")
    values = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            s = line.strip()
            if not s:
                continue
            try:
                v = int(s)
            except ValueError:
                raise DataFileError(f"{path}:{lineno}: not an integer: {s!r}") from None
            if v < 0:
                raise DataFileError(f"{path}:{lineno}: negative intensity {v}")
            values.append(v)
    if not values:
        raise DataFileError(f"{path}: file contains no samples")
    return np.array(values, dtype=np.float64)


def santa_fe_path():
    """Location of the bundled laser record, overridable via ``QMEM_DATA_DIR``."""
    env = os.environ.get("QMEM_DATA_DIR")
    if env:
        return Path(env) / SANTA_FE_FILE
    return Path(str(resources.files("qmem") / "data" / SANTA_FE_FILE))


def santa_fe_load(path=None, offset=0, length=None, split=None):
    """Santa Fe laser intensities as a one-step-ahead dataset.

    ``length`` raw samples starting at ``offset`` are scaled by their maximum;
    ``length`` samples give ``length - 1`` input/target pairs. With the
    defaults on the bundled record the excerpt is 1001 samples long, giving
    the usual 1000 pairs.
    """
    raw = read_intensity_file(santa_fe_path() if path is None else path)
    if length is None:
        length = min(1001, raw.size - offset) if path is None else raw.size - offset
    if offset < 0 or length < 2 or offset + length > raw.size:
        raise DomainError(f"excerpt [{offset}, {offset + length}) outside record of {raw.size}")
    seg = raw[offset:offset + length]
    peak = seg.max()
    if peak <= 0:
        raise DataFileError("all intensities are zero")
    seg = seg / peak
    n = seg.size - 1
    return Dataset(seg[:-1], seg[1:], "santa-fe", None, split or _default_split(n),
                   meta={"offset": int(offset), "length": int(length), "scale": float(peak)})


def monomial(n_exp=4, grid=None, train_cutoff=0.9):
    """Fit ``x^n`` on an ascending grid; points below the cutoff train, the rest test."""
    if not 0.0 < train_cutoff < 1.0:
        raise DomainError("train_cutoff must lie in (0, 1)")
    grid = np.linspace(0.0, 1.0, 101) if grid is None else np.asarray(grid, dtype=np.float64)
    if np.any(np.diff(grid) < 0):
        raise DomainError("grid must be sorted ascending")
    n_train = int(np.count_nonzero(grid < train_cutoff))
    split = SplitSpec(0, n_train, grid.size - n_train)
    return Dataset(grid, grid**n_exp, "monomial", None, split,
                   meta={"n": n_exp, "cutoff": train_cutoff})


def lag_correlation(series, tau):
    """Pearson correlation between ``s_t`` and ``s_{t-tau}``."""
    s = np.asarray(series, dtype=np.float64)
    if tau < 1 or tau >= s.size - 1:
        raise DomainError(f"lag {tau} invalid for series of length {s.size}")
    return float(np.corrcoef(s[tau:], s[:-tau])[0, 1])


def load(task, seed=0, n=1000, **kw):
    """Dataset by task name."""
    if task == "narma":
        return narma(n, seed, **kw)
    if task == "mackey-glass":
        return mackey_glass(n, **kw)
    if task == "santa-fe":
        return santa_fe_load(**kw)
    if task == "monomial":
        return monomial(**kw)
    raise DomainError(f"unknown task {task!r}; expected one of {', '.join(TASKS)}")
