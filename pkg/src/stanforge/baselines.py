"""Reference models the smooth-transition network is benchmarked against.

Three baselines share the training contract from ``stan_core``: a bias-only
linear network, a plain relu MLP of matching width and depth, and closed-form
multi-output linear regression (fit once, no gradient descent).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import ClassVar

import numpy as np

from .numerics import ShapeError, affine_backward, affine_forward, as_matrix, relu, relu_grad
from .stan_core import GradStore, NetworkSpec, ParamStore, glorot_uniform

__all__ = [
    "ConditioningError",
    "fit_linear_regression",
    "LinearRegressionModel",
    "LinearNetwork",
    "MlpNetwork",
    "mlp_count_parameters",
    "linear_count_parameters",
    "init_mlp",
    "init_linear",
]


class ConditioningError(ValueError):
    """Normal equations too ill-conditioned to solve reliably."""


def fit_linear_regression(x, y, ridge: float = 1e-8, cond_limit: float = 1e12) -> np.ndarray:
    """Least squares with intercept via ridge-stabilized normal equations.

    Parameters
    ----------
    x : array, shape (n, q)
    y : array, shape (n, tau)
    ridge : small diagonal loading added to the Gram matrix.
    cond_limit : reject the solve when the loaded Gram matrix is worse
        conditioned than this.

    Returns
    -------
    weights : array, shape (q + 1, tau); row 0 is the intercept.
    """
    x = as_matrix(x, "x")
    y = as_matrix(y, "y")
    n, q = x.shape
    if y.shape[0] != n:
        raise ShapeError(f"x has {n} rows but y has {y.shape[0]}")
    if n <= q:
        raise ValueError(f"need more rows than regressors to fit: {n} rows, {q} columns plus intercept")
    a = np.hstack([np.ones((n, 1)), x])
    gram = a.T @ a + ridge * np.eye(q + 1)
    eigs = np.linalg.eigvalsh(gram)
    low = max(float(eigs[0]), np.finfo(np.float64).tiny)
    cond = float(eigs[-1]) / low
    if cond > cond_limit:
        raise ConditioningError(
            f"normal equations are too ill-conditioned even with ridge {ridge:g}: "
            f"condition estimate {cond:.3e} exceeds {cond_limit:.1e}"
        )
    return np.linalg.solve(gram, a.T @ y)


@dataclass
class LinearRegressionModel:
    """Closed-form linear forecaster; one independent regression per horizon step."""

    weights: np.ndarray  # (q + 1, tau), row 0 is the intercept

    kind: ClassVar[str] = "linreg"

    @classmethod
    def fit(cls, x, y, ridge: float = 1e-8, cond_limit: float = 1e12) -> "LinearRegressionModel":
        return cls(weights=fit_linear_regression(x, y, ridge=ridge, cond_limit=cond_limit))

    def predict(self, x) -> np.ndarray:
        x = as_matrix(x, "x")
        if x.shape[1] + 1 != self.weights.shape[0]:
            raise ShapeError(f"input has {x.shape[1]} columns, model expects {self.weights.shape[0] - 1}")
        return self.weights[0] + x @ self.weights[1:]

    def num_params(self) -> int:
        return int(self.weights.size)

    @property
    def lookback(self) -> int:
        return int(self.weights.shape[0] - 1)

    @property
    def horizon(self) -> int:
        return int(self.weights.shape[1])


def mlp_count_parameters(spec: NetworkSpec) -> int:
    """Trainable scalars in a relu MLP: like the smooth-transition count minus
    the four per-unit coefficient vectors."""
    q, d, depth, tau = spec.lookback, spec.units, spec.depth, spec.horizon
    return (q * d + d) + (depth - 1) * (d * d + d) + (d * tau + tau)


def linear_count_parameters(lookback: int, horizon: int) -> int:
    return lookback * horizon + horizon


def init_mlp(spec: NetworkSpec, seed: int) -> ParamStore:
    """Glorot-uniform dense maps with zero biases, deterministic per seed."""
    rng = np.random.default_rng(seed)
    store: ParamStore = {}
    fan_in = spec.lookback
    for i in range(spec.depth):
        store[f"layers.{i}.W"] = glorot_uniform(rng, fan_in, spec.units)
        store[f"layers.{i}.b"] = np.zeros(spec.units)
        fan_in = spec.units
    store["proj.W"] = glorot_uniform(rng, fan_in, spec.horizon)
    store["proj.b"] = np.zeros(spec.horizon)
    return store


def init_linear(lookback: int, horizon: int, seed: int) -> ParamStore:
    rng = np.random.default_rng(seed)
    return {
        "proj.W": glorot_uniform(rng, lookback, horizon),
        "proj.b": np.zeros(horizon),
    }


@dataclass
class MlpLayerCache:
    x: np.ndarray
    pre: np.ndarray


@dataclass
class MlpCache:
    layers: list[MlpLayerCache]
    proj_input: np.ndarray


class MlpNetwork:
    """Plain relu MLP sharing the forecaster contract."""

    kind = "mlp"

    def __init__(self, spec: NetworkSpec, params: ParamStore | None = None, seed: int = 0):
        self.spec = spec
        self.params = init_mlp(spec, seed) if params is None else params

    def forward(self, x) -> tuple[np.ndarray, MlpCache]:
        x = as_matrix(x, "x")
        if x.shape[1] != self.spec.lookback:
            raise ShapeError(f"input has {x.shape[1]} columns, network expects lookback {self.spec.lookback}")
        h = x
        caches: list[MlpLayerCache] = []
        for i in range(self.spec.depth):
            pre = affine_forward(h, self.params[f"layers.{i}.W"], self.params[f"layers.{i}.b"])
            caches.append(MlpLayerCache(x=h, pre=pre))
            h = relu(pre)
        pred = affine_forward(h, self.params["proj.W"], self.params["proj.b"])
        return pred, MlpCache(layers=caches, proj_input=h)

    def backward(self, cache: MlpCache, dpred) -> GradStore:
        dpred = as_matrix(dpred, "dpred")
        grads: GradStore = {}
        dh, grads["proj.W"], grads["proj.b"] = affine_backward(
            cache.proj_input, self.params["proj.W"], dpred
        )
        for i in reversed(range(self.spec.depth)):
            layer = cache.layers[i]
            dpre = dh * relu_grad(layer.pre)
            dh, grads[f"layers.{i}.W"], grads[f"layers.{i}.b"] = affine_backward(
                layer.x, self.params[f"layers.{i}.W"], dpre
            )
        return grads

    def predict(self, x) -> np.ndarray:
        pred, _ = self.forward(x)
        return pred

    def num_params(self) -> int:
        return sum(arr.size for arr in self.params.values())


class LinearNetwork:
    """Single affine map trained by gradient descent; the sanity-floor baseline."""

    kind = "linear"

    def __init__(self, lookback: int, horizon: int, params: ParamStore | None = None, seed: int = 0):
        self.lookback = int(lookback)
        self.horizon = int(horizon)
        self.params = init_linear(self.lookback, self.horizon, seed) if params is None else params

    def forward(self, x) -> tuple[np.ndarray, np.ndarray]:
        x = as_matrix(x, "x")
        if x.shape[1] != self.lookback:
            raise ShapeError(f"input has {x.shape[1]} columns, network expects lookback {self.lookback}")
        pred = affine_forward(x, self.params["proj.W"], self.params["proj.b"])
        return pred, x

    def backward(self, cache: np.ndarray, dpred) -> GradStore:
        _, dw, db = affine_backward(cache, self.params["proj.W"], as_matrix(dpred, "dpred"))
        return {"proj.W": dw, "proj.b": db}

    def predict(self, x) -> np.ndarray:
        pred, _ = self.forward(x)
        return pred

    def num_params(self) -> int:
        return sum(arr.size for arr in self.params.values())
