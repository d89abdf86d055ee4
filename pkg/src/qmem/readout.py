"""Linear readout trained by least squares."""

import json
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class SplitSpec:
    washout: int = 20
    train: int = 480
    test: int = 500

    def __post_init__(self):
        if min(self.washout, self.train, self.test) < 0:
            raise DomainError("split sizes must be nonnegative")

    @property
    def total(self):
        return self.washout + self.train + self.test

    def check(self, n):
        if self.total != n:
            raise DomainError(f"split {self} covers {self.total} steps, series has {n}")

    @property
    def train_slice(self):
        return slice(self.washout, self.washout + self.train)

    @property
    def test_slice(self):
        return slice(self.washout + self.train, self.total)

    def to_dict(self):
        return {"washout": self.washout, "train": self.train, "test": self.test}


@dataclass(frozen=True)
class ReadoutModel:
    weights: np.ndarray
    intercept: float = 0.0
    ridge: float = 0.0
    rank_deficient: bool = False

    def to_dict(self):
        return {
            "weights": [float(w) for w in self.weights],
            "intercept": float(self.intercept),
            "ridge": float(self.ridge),
        }

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d):
        return cls(np.asarray(d["weights"], dtype=np.float64), float(d["intercept"]),
                   float(d.get("ridge", 0.0)))


def _as_matrix(features):
    rows = getattr(features, "rows", features)
    x = np.asarray(rows, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    return x


def fit_rows(x, y, ridge=0.0, intercept=True):
    """Least-squares fit on already-selected rows.

    Uses the minimum-norm solution when the design is rank deficient (e.g.
    probability features summing to one next to an intercept). A positive
    ``ridge`` penalises the weights but never the intercept.
    """
    x = _as_matrix(x)
    y = np.asarray(y, dtype=np.float64)
    if x.shape[0] != y.shape[0]:
        raise DomainError("features and targets differ in length")
    if ridge < 0:
        raise DomainError("ridge must be nonnegative")
    if intercept:
        design = np.column_stack([np.ones(x.shape[0]), x])
    else:
        design = x
    rank = np.linalg.matrix_rank(design)
    if ridge > 0:
        pen = np.sqrt(ridge) * np.eye(design.shape[1])
        if intercept:
            pen = pen[1:]
        design_aug = np.vstack([design, pen])
        y_aug = np.concatenate([y, np.zeros(pen.shape[0])])
        coef = np.linalg.lstsq(design_aug, y_aug, rcond=None)[0]
    else:
        coef = np.linalg.lstsq(design, y, rcond=None)[0]
    if intercept:
        b, w = float(coef[0]), coef[1:]
    else:
        b, w = 0.0, coef
    return ReadoutModel(w, b, float(ridge), rank_deficient=bool(rank < design.shape[1]))


def fit(features, targets, split, ridge=0.0, intercept=True):
    """Fit on the training slice of ``split``; washout rows are never seen."""
    x = _as_matrix(features)
    y = np.asarray(targets, dtype=np.float64)
    if x.shape[0] != y.shape[0]:
        raise DomainError("features and targets differ in length")
    split.check(x.shape[0])
    if split.train < 4:
        raise DomainError("need at least 4 training rows")
    sl = split.train_slice
    return fit_rows(x[sl], y[sl], ridge=ridge, intercept=intercept)


def predict(model, features):
    return _as_matrix(features) @ model.weights + model.intercept


def mse(y, y_hat):
    y = np.asarray(y, dtype=np.float64)
    y_hat = np.asarray(y_hat, dtype=np.float64)
    if y.shape != y_hat.shape:
        raise DomainError("length mismatch")
    if y.size == 0:
        raise DomainError("mse of an empty sequence")
    return float(np.mean((y - y_hat) ** 2))


def evaluate(features, targets, split, **fit_kw):
    """Fit and score in one go: returns (model, train mse, test mse, predictions)."""
    model = fit(features, targets, split, **fit_kw)
    y = np.asarray(targets, dtype=np.float64)
    y_hat = predict(model, features)
    return (model, mse(y[split.train_slice], y_hat[split.train_slice]),
            mse(y[split.test_slice], y_hat[split.test_slice]), y_hat)
