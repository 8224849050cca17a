"""Synthetic data generators for the simulation studies.

One-dimensional designs draw X uniformly on [0, 1].  Ten-dimensional
designs draw equicorrelated Gaussians realized as
x_j = sqrt(0.8) * z0 + z_j with independent standard normals, giving
marginal variance 1.8 and pairwise covariance 0.8.

Regression kinds add Normal(0, noise_sd) errors to the true mean;
classification (logit-*) kinds draw Bernoulli labels from a logistic
transform of a scaled and shifted copy of the matching mean function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .errors import ConfigError, UsageError

REGRESSION_KINDS = ("linear1d", "quad1d", "sqrt10d", "quad10d")
CLASSIFICATION_KINDS = (
    "logit-linear1d",
    "logit-quad1d",
    "logit-sqrt10d",
    "logit-quad10d",
)
ALL_KINDS = REGRESSION_KINDS + CLASSIFICATION_KINDS


@dataclass(frozen=True)
class SimModel:
    """A named simulation design; noise_sd applies to regression kinds only."""

    kind: str
    noise_sd: float = 0.1

    def __post_init__(self) -> None:
        if self.kind not in ALL_KINDS:
            raise ConfigError(f"unknown model kind {self.kind!r}; choose from {ALL_KINDS}")
        if self.noise_sd < 0:
            raise ConfigError(f"noise_sd must be >= 0, got {self.noise_sd}")

    @property
    def classification(self) -> bool:
        return self.kind in CLASSIFICATION_KINDS

    @property
    def dim(self) -> int:
        return 1 if self.kind.endswith("1d") else 10


def _as_rows(x: np.ndarray, dim: int) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 0 and dim == 1:
        return x.reshape(1, 1), True
    if x.ndim == 1:
        if x.shape[0] != dim:
            raise UsageError(f"point has {x.shape[0]} coordinates, model needs {dim}")
        return x.reshape(1, dim), True
    if x.ndim == 2 and x.shape[1] == dim:
        return x, False
    raise UsageError(f"cannot interpret shape {x.shape} as points of dimension {dim}")


def _mean_rows(kind: str, X: np.ndarray) -> np.ndarray:
    if kind == "linear1d":
        return X[:, 0].copy()
    if kind == "quad1d":
        return -((X[:, 0] - 0.5) ** 2)
    if kind == "sqrt10d":
        return np.sqrt(np.abs(X).sum(axis=1) / 10.0)
    if kind == "quad10d":
        return -(X**2).sum(axis=1) / 10.0
    raise UsageError(f"{kind!r} is not a regression kind")


def _logit_rows(kind: str, X: np.ndarray) -> np.ndarray:
    if kind == "logit-linear1d":
        return 3.0 * (X[:, 0] - 0.5)
    if kind == "logit-quad1d":
        return -30.0 * (X[:, 0] - 0.5) ** 2 - 2.17
    if kind == "logit-sqrt10d":
        return 5.0 * np.sqrt(np.abs(X).sum(axis=1)) - 5.0
    if kind == "logit-quad10d":
        return -2.0 * (X**2).sum(axis=1) + 2.4
    raise UsageError(f"{kind!r} is not a classification kind")


def true_mean(model: SimModel, x: np.ndarray) -> float | np.ndarray:
    """True regression mean at one point (or rowwise for a matrix)."""
    if model.classification:
        raise UsageError(f"true_mean is undefined for classification kind {model.kind!r}")
    rows, single = _as_rows(x, model.dim)
    out = _mean_rows(model.kind, rows)
    return float(out[0]) if single else out


def true_prob(model: SimModel, x: np.ndarray) -> float | np.ndarray:
    """True P(Y=1 | x) for classification kinds."""
    if not model.classification:
        raise UsageError(f"true_prob is undefined for regression kind {model.kind!r}")
    rows, single = _as_rows(x, model.dim)
    logit = _logit_rows(model.kind, rows)
    out = 1.0 / (1.0 + np.exp(-logit))
    return float(out[0]) if single else out


def draw_inputs(model: SimModel, n: int, rng: np.random.Generator) -> np.ndarray:
    """Feature matrix only, drawn from the model's input distribution."""
    n = int(n)
    if n < 1:
        raise ConfigError(f"need n >= 1, got {n}")
    if model.dim == 1:
        return rng.random((n, 1))
    z0 = rng.standard_normal(n)
    Z = rng.standard_normal((n, 10))
    return math.sqrt(0.8) * z0[:, None] + Z


def _draw_responses(model: SimModel, X: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    if model.classification:
        prob = true_prob(model, X)
        return (rng.random(X.shape[0]) < prob).astype(np.float64)
    y = true_mean(model, X)
    if model.noise_sd > 0:
        y = y + rng.normal(0.0, model.noise_sd, X.shape[0])
    return y


def gen_1d(model: SimModel, n: int, rng: np.random.Generator) -> Dataset:
    """n observations from a 1-d design: X ~ Uniform[0,1], then responses."""
    if model.dim != 1:
        raise UsageError(f"gen_1d needs a 1-d kind, got {model.kind!r}")
    X = draw_inputs(model, n, rng)
    return Dataset(X, _draw_responses(model, X, rng))


def gen_10d(model: SimModel, n: int, rng: np.random.Generator) -> Dataset:
    """n observations from the 10-d equicorrelated Gaussian design."""
    if model.dim != 10:
        raise UsageError(f"gen_10d needs a 10-d kind, got {model.kind!r}")
    X = draw_inputs(model, n, rng)
    return Dataset(X, _draw_responses(model, X, rng))


def generate(model: SimModel, n: int, rng: np.random.Generator) -> Dataset:
    """Dimension-dispatching convenience over gen_1d / gen_10d."""
    return gen_1d(model, n, rng) if model.dim == 1 else gen_10d(model, n, rng)
