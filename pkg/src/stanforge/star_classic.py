"""Classical two-regime logistic smooth transition autoregression.

Provides the synthetic ground truth the rest of the package is validated
against: ``simulate_lstar`` generates series from known coefficients, and
``estimate_lstar`` recovers coefficients by concentrated least squares over
a (gamma, c) grid. The transition variable is the lagged series value itself
(self-exciting), the same convention the network layers use for their gates.

This module intentionally keeps its own logistic implementation so the
estimator stays an independent oracle for the layer code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .data import TimeSeries

__all__ = [
    "ExplosiveDynamicsError",
    "EstimationError",
    "LstarParams",
    "DEFAULT_GAMMA_GRID",
    "default_c_grid",
    "simulate_lstar",
    "estimate_lstar",
]

DIVERGENCE_LIMIT = 1e12

DEFAULT_GAMMA_GRID = (0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0)


class ExplosiveDynamicsError(RuntimeError):
    """Simulated series exceeded the divergence limit."""


class EstimationError(RuntimeError):
    """Estimation failed at every grid point."""


def _logistic(t):
    """Overflow-safe logistic, evaluated without exponentiating positive arguments."""
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    out = np.empty_like(t)
    pos = t >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-t[pos]))
    e = np.exp(t[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def _logistic_scalar(t: float) -> float:
    if t >= 0.0:
        return 1.0 / (1.0 + math.exp(-t))
    e = math.exp(t)
    return e / (1.0 + e)


@dataclass
class LstarParams:
    """Coefficients of a logistic STAR process of order q.

    y_t = phi0 + sum_i phi_i y_{t-i} + G(y_{t-delay}) * sum_i theta_i y_{t-i} + eps_t

    with G the logistic transition with steepness ``gamma`` and midpoint
    ``c``, and eps_t ~ N(0, sigma^2); ``sigma`` is a standard deviation.
    """

    phi0: float
    phi: np.ndarray
    theta: np.ndarray
    gamma: float
    c: float
    delay: int = 1
    sigma: float = 0.0

    def __post_init__(self):
        self.phi = np.atleast_1d(np.asarray(self.phi, dtype=np.float64))
        self.theta = np.atleast_1d(np.asarray(self.theta, dtype=np.float64))
        if self.phi.ndim != 1 or self.theta.shape != self.phi.shape:
            raise ValueError(
                f"phi and theta must be 1-D and the same length, got {self.phi.shape} and {self.theta.shape}"
            )
        if self.phi.size == 0:
            raise ValueError("order must be at least 1")
        if not 1 <= int(self.delay) <= self.phi.size:
            raise ValueError(f"delay must lie in [1, {self.phi.size}], got {self.delay}")
        if self.sigma < 0.0:
            raise ValueError(f"sigma must be non-negative, got {self.sigma}")

    @property
    def order(self) -> int:
        return int(self.phi.size)


def simulate_lstar(params: LstarParams, n: int, burn_in: int = 0, seed: int = 0,
                   name: str = "lstar") -> TimeSeries:
    """Simulate ``n`` observations after discarding ``burn_in``.

    Initial conditions are zero (the implicit pre-sample lags are zeros).
    Noise is drawn from numpy's PCG64 generator, so the same seed always
    yields the same series. Raises ExplosiveDynamicsError as soon as a value
    exceeds 1e12 in magnitude.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if burn_in < 0:
        raise ValueError(f"burn_in must be non-negative, got {burn_in}")
    q = params.order
    total = n + burn_in
    rng = np.random.default_rng(seed)
    noise = rng.normal(0.0, params.sigma, size=total) if params.sigma > 0 else np.zeros(total)
    y = np.zeros(total + q)
    for t in range(q, total + q):
        lags = y[t - q: t][::-1]  # y_{t-1}, ..., y_{t-q}
        z = y[t - params.delay]
        gate = _logistic_scalar(params.gamma * (z - params.c))
        value = params.phi0 + lags @ params.phi + gate * (lags @ params.theta) + noise[t - q]
        if abs(value) > DIVERGENCE_LIMIT:
            raise ExplosiveDynamicsError(
                f"series diverged at step {t - q}: |y| = {abs(value):.3e} exceeds {DIVERGENCE_LIMIT:.0e}"
            )
        y[t] = value
    values = y[q + burn_in:]
    return TimeSeries(name=name, timestamps=np.arange(n, dtype=np.int64), values=values.copy())


def default_c_grid(values, count: int = 15) -> np.ndarray:
    """Evenly spaced interior quantiles of the observed values."""
    probs = np.arange(1, count + 1) / (count + 1)
    return np.quantile(np.asarray(values, dtype=np.float64), probs)


@dataclass
class _Candidate:
    sse: float = np.inf
    gamma: float = np.nan
    c: float = np.nan
    coef: np.ndarray = field(default_factory=lambda: np.empty(0))


def estimate_lstar(series, order: int, delay: int = 1, gamma_grid=None, c_grid=None) -> tuple[LstarParams, float]:
    """Fit a logistic STAR by concentrated least squares over a (gamma, c) grid.

    For each grid point the gate values are fixed, which makes the remaining
    coefficients (intercept, AR terms, gated AR terms) an ordinary least
    squares problem on the regressor matrix ``[1, lags, lags * gate]``. The
    grid point with the smallest sum of squared residuals wins; exact ties go
    to the smallest gamma, then the smallest c. Grid points whose regressor
    matrix is numerically rank deficient are skipped; if every point is
    skipped, EstimationError is raised.

    Parameters
    ----------
    series : TimeSeries or 1-D array of observations.
    order : autoregressive order q.
    delay : index of the lag used as transition variable, in [1, order].
    gamma_grid : candidate steepness values; defaults to DEFAULT_GAMMA_GRID.
    c_grid : candidate midpoints; defaults to 15 evenly spaced interior
        quantiles of the series.

    Returns
    -------
    (params, sse) : the fitted LstarParams (its ``sigma`` is the residual
        standard deviation) and the winning sum of squared residuals.
    """
    values = series.values if isinstance(series, TimeSeries) else np.asarray(series, dtype=np.float64)
    n = len(values)
    q = int(order)
    if q < 1:
        raise ValueError(f"order must be at least 1, got {order}")
    if not 1 <= int(delay) <= q:
        raise ValueError(f"delay must lie in [1, {q}], got {delay}")
    min_rows = 2 * q + 2
    if n - q < min_rows:
        raise ValueError(
            f"series of length {n} is too short to fit order {q}: need at least {q + min_rows} points"
        )
    gamma_candidates = sorted(float(g) for g in (DEFAULT_GAMMA_GRID if gamma_grid is None else gamma_grid))
    c_candidates = sorted(float(c) for c in (default_c_grid(values) if c_grid is None else np.asarray(c_grid, dtype=np.float64)))
    if not gamma_candidates or not c_candidates:
        raise ValueError("gamma_grid and c_grid must be non-empty")
    if any(g <= 0 for g in gamma_candidates):
        raise ValueError("gamma candidates must be positive")

    target = values[q:]
    lags = np.column_stack([values[q - i: n - i] for i in range(1, q + 1)])
    z = values[q - int(delay): n - int(delay)]
    ones = np.ones(n - q)
    ncols = 1 + 2 * q

    best = _Candidate()
    skipped = 0
    for gamma in gamma_candidates:
        for c in c_candidates:
            gate = _logistic(gamma * (z - c))
            design = np.column_stack([ones, lags, lags * gate[:, None]])
            coef, _, rank, _ = np.linalg.lstsq(design, target, rcond=None)
            if rank < ncols:
                skipped += 1
                continue
            resid = target - design @ coef
            sse = float(resid @ resid)
            # strict < keeps the first (smallest gamma, then c) among exact ties
            if sse < best.sse:
                best = _Candidate(sse=sse, gamma=gamma, c=c, coef=coef)
    if not np.isfinite(best.sse):
        raise EstimationError(
            f"regressor matrix was rank deficient at all {skipped} grid points; "
            "the series may not excite both regimes"
        )
    sigma = float(np.sqrt(best.sse / (n - q)))
    params = LstarParams(
        phi0=float(best.coef[0]),
        phi=best.coef[1: q + 1].copy(),
        theta=best.coef[q + 1:].copy(),
        gamma=best.gamma,
        c=best.c,
        delay=int(delay),
        sigma=sigma,
    )
    return params, best.sse
