"""Dense layer math, losses, Adam, and a finite-difference gradient referee.

Everything in this package runs on float64 numpy arrays: "matrices" are 2-D
row-major, "vectors" are 1-D. All gradients are derived by hand, so the
checker at the bottom of this module is the oracle every backward pass has
to answer to.
"""

from __future__ import annotations

from collections.abc import Callable, Mapping
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ShapeError",
    "NonFiniteError",
    "NondeterministicLossError",
    "AdamState",
    "affine_forward",
    "affine_backward",
    "relu",
    "relu_grad",
    "mse_loss",
    "adam_step",
    "finite_diff_errors",
    "finite_diff_check",
]

# loss_fn(params) -> (loss, grads); must be a pure function of the arrays.
LossFn = Callable[[Mapping[str, np.ndarray]], tuple[float, Mapping[str, np.ndarray]]]


class ShapeError(ValueError):
    """Operand shapes do not conform."""


class NonFiniteError(FloatingPointError):
    """A quantity that must stay finite came out NaN or infinite."""


class NondeterministicLossError(RuntimeError):
    """Two evaluations of a supposedly pure loss function disagreed."""


def as_matrix(x, name: str = "x") -> np.ndarray:
    a = np.asarray(x, dtype=np.float64)
    if a.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got shape {a.shape}")
    return a


def as_vector(x, name: str = "x") -> np.ndarray:
    a = np.asarray(x, dtype=np.float64)
    if a.ndim != 1:
        raise ShapeError(f"{name} must be 1-D, got shape {a.shape}")
    return a


def affine_forward(x, w, b) -> np.ndarray:
    """Compute ``x @ w + b``.

    Parameters
    ----------
    x : array, shape (m, p)
    w : array, shape (p, q)
    b : array, shape (q,)

    Returns
    -------
    array, shape (m, q)
    """
    x = as_matrix(x, "x")
    w = as_matrix(w, "w")
    b = as_vector(b, "b")
    if x.shape[1] != w.shape[0]:
        raise ShapeError(f"cannot multiply x with shape {x.shape} by w with shape {w.shape}")
    if b.shape[0] != w.shape[1]:
        raise ShapeError(f"bias shape {b.shape} does not match w with shape {w.shape}")
    return x @ w + b


def affine_backward(x, w, dy) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gradients of ``y = x @ w + b`` given upstream ``dy``.

    Returns ``(dx, dw, db)`` where ``dx = dy @ w.T``, ``dw = x.T @ dy`` and
    ``db`` holds the column sums of ``dy``.
    """
    x = as_matrix(x, "x")
    w = as_matrix(w, "w")
    dy = as_matrix(dy, "dy")
    if dy.shape != (x.shape[0], w.shape[1]):
        raise ShapeError(
            f"dy shape {dy.shape} does not match x {x.shape} @ w {w.shape}"
        )
    dx = dy @ w.T
    dw = x.T @ dy
    db = dy.sum(axis=0)
    return dx, dw, db


def relu(x):
    """Elementwise max(0, x)."""
    return np.maximum(x, 0.0)


def relu_grad(x):
    """Derivative of relu; the subgradient at exactly zero is taken as 0."""
    return np.where(np.asarray(x, dtype=np.float64) > 0.0, 1.0, 0.0)


def mse_loss(pred, target) -> tuple[float, np.ndarray]:
    """Mean squared error over all entries plus its gradient in ``pred``.

    Returns ``(loss, dpred)`` with ``dpred = 2 * (pred - target) / pred.size``.
    """
    pred = as_matrix(pred, "pred")
    target = as_matrix(target, "target")
    if pred.shape != target.shape:
        raise ShapeError(f"pred shape {pred.shape} does not match target shape {target.shape}")
    if pred.size == 0:
        raise ShapeError("mse_loss needs at least one element")
    diff = pred - target
    loss = float(np.mean(diff * diff))
    dpred = (2.0 / pred.size) * diff
    return loss, dpred


@dataclass
class AdamState:
    """First and second moment accumulators for one parameter array."""

    m: np.ndarray
    v: np.ndarray
    t: int = 0
    lr: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    @classmethod
    def for_param(cls, param: np.ndarray, lr: float = 0.001, beta1: float = 0.9,
                  beta2: float = 0.999, epsilon: float = 1e-8) -> "AdamState":
        param = np.asarray(param, dtype=np.float64)
        return cls(m=np.zeros_like(param), v=np.zeros_like(param), t=0,
                   lr=lr, beta1=beta1, beta2=beta2, epsilon=epsilon)


def adam_step(param: np.ndarray, grad, state: AdamState, name: str = "param") -> None:
    """One bias-corrected Adam update, applied to ``param`` in place.

    ``param`` must be a float64 ndarray so the in-place write reaches the
    caller's array. Raises NonFiniteError if the gradient contains NaN or
    infinity; ``name`` is used in that message.
    """
    if not isinstance(param, np.ndarray) or param.dtype != np.float64:
        raise TypeError(f"parameter '{name}' must be a float64 ndarray to be updated in place")
    grad = np.asarray(grad, dtype=np.float64)
    if grad.shape != param.shape:
        raise ShapeError(f"gradient shape {grad.shape} does not match parameter '{name}' shape {param.shape}")
    if state.m.shape != param.shape or state.v.shape != param.shape:
        raise ShapeError(f"optimizer state does not match parameter '{name}' shape {param.shape}")
    if not np.all(np.isfinite(grad)):
        raise NonFiniteError(f"non-finite gradient for parameter '{name}'")
    state.t += 1
    state.m *= state.beta1
    state.m += (1.0 - state.beta1) * grad
    state.v *= state.beta2
    state.v += (1.0 - state.beta2) * grad * grad
    m_hat = state.m / (1.0 - state.beta1 ** state.t)
    v_hat = state.v / (1.0 - state.beta2 ** state.t)
    param -= state.lr * m_hat / (np.sqrt(v_hat) + state.epsilon)


def finite_diff_errors(loss_fn: LossFn, params: dict[str, np.ndarray], eps: float = 1e-5) -> dict[str, float]:
    """Worst relative error per parameter between analytic and numeric gradients.

    Central differences: for each entry of each array in ``params`` the loss
    is evaluated at +eps and -eps and the slope compared against the analytic
    gradient returned by ``loss_fn``. The relative error for a pair (a, n) is
    ``|a - n| / max(|a|, |n|, 1e-8)``.

    ``loss_fn`` is called twice on the unperturbed parameters first; if the
    two losses differ the function is not deterministic and the check would
    be meaningless, so NondeterministicLossError is raised.
    """
    if eps <= 0.0:
        raise ValueError(f"eps must be positive, got {eps!r}")
    loss0, grads = loss_fn(params)
    loss1, _ = loss_fn(params)
    if loss0 != loss1:
        raise NondeterministicLossError(
            f"loss_fn returned {loss0!r} and then {loss1!r} on identical parameters"
        )
    errors: dict[str, float] = {}
    for name, p in params.items():
        if not isinstance(p, np.ndarray) or p.dtype != np.float64:
            raise TypeError(f"parameter '{name}' must be a float64 ndarray")
        g = np.asarray(grads[name], dtype=np.float64)
        if g.shape != p.shape:
            raise ShapeError(f"analytic gradient for '{name}' has shape {g.shape}, expected {p.shape}")
        worst = 0.0
        for idx in np.ndindex(p.shape):
            saved = p[idx]
            p[idx] = saved + eps
            lo_plus, _ = loss_fn(params)
            p[idx] = saved - eps
            lo_minus, _ = loss_fn(params)
            p[idx] = saved
            numeric = (lo_plus - lo_minus) / (2.0 * eps)
            analytic = float(g[idx])
            rel = abs(analytic - numeric) / max(abs(analytic), abs(numeric), 1e-8)
            if rel > worst:
                worst = rel
        errors[name] = worst
    return errors


def finite_diff_check(loss_fn: LossFn, params: dict[str, np.ndarray], eps: float = 1e-5) -> float:
    """Maximum relative gradient error across every entry of every parameter."""
    errors = finite_diff_errors(loss_fn, params, eps)
    return max(errors.values(), default=0.0)
