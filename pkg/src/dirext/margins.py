"""Univariate marginals: GEV and Gaussian.

GEV distribution function, with location ``loc``, scale ``scale > 0`` and
shape ``shape``::

    F(x) = exp(-(1 + shape * (x - loc) / scale) ** (-1 / shape))   shape != 0
    F(x) = exp(-exp(-(x - loc) / scale))                          shape == 0

``|shape| < 1e-12`` is treated as the Gumbel case. Outside the support the
CDF is clamped to 0 or 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special

from .errors import NonFinite, QOutOfRange

GUMBEL_TOL = 1e-12


def _check_q(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    if np.any(~((q > 0.0) & (q < 1.0))):
        raise QOutOfRange("quantile levels must lie strictly inside (0, 1)")
    return q


@dataclass(frozen=True)
class GevParams:
    loc: float
    scale: float
    shape: float

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError(f"GEV scale must be positive, got {self.scale}")

    @property
    def is_gumbel(self) -> bool:
        return abs(self.shape) < GUMBEL_TOL

    @property
    def support(self) -> tuple[float, float]:
        if self.is_gumbel:
            return -np.inf, np.inf
        edge = self.loc - self.scale / self.shape
        return (edge, np.inf) if self.shape > 0 else (-np.inf, edge)

    def cdf(self, x):
        z = (np.asarray(x, dtype=float) - self.loc) / self.scale
        if self.is_gumbel:
            return np.exp(-np.exp(-z))
        t = self.shape * z
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            inner = np.exp(-np.log1p(t) / self.shape)
            out = np.exp(-inner)
        outside = t <= -1.0
        if np.any(outside):
            out = np.where(outside, 0.0 if self.shape > 0 else 1.0, out)
        return out

    def sf(self, x):
        return 1.0 - self.cdf(x)

    def ppf(self, q):
        q = _check_q(q)
        y = -np.log(-np.log(q))  # Gumbel-reduced variate
        if self.is_gumbel:
            return self.loc + self.scale * y
        # (exp(shape*y) - 1) / shape, stable for small shape
        return self.loc + self.scale * np.expm1(self.shape * y) / self.shape

    def isf(self, q):
        return self.ppf(1.0 - _check_q(q))

    def sample(self, count: int, seed) -> np.ndarray:
        return gev_sample(self, count, seed)


@dataclass(frozen=True)
class GaussianParams:
    mean: float
    var: float

    def __post_init__(self):
        if not self.var > 0:
            raise ValueError(f"variance must be positive, got {self.var}")

    @property
    def sd(self) -> float:
        return float(np.sqrt(self.var))

    def cdf(self, x):
        return special.ndtr((np.asarray(x, dtype=float) - self.mean) / self.sd)

    def sf(self, x):
        return 1.0 - self.cdf(x)

    def ppf(self, q):
        return self.mean + self.sd * special.ndtri(_check_q(q))

    def isf(self, q):
        return self.ppf(1.0 - _check_q(q))

    def sample(self, count: int, seed) -> np.ndarray:
        u = np.random.default_rng(seed).random(count)
        return self.ppf(_open_unit(u))


@dataclass(frozen=True)
class UniformMargin:
    """Identity marginal on [0, 1]; lets copula samples pass through unchanged."""

    def cdf(self, x):
        return np.clip(np.asarray(x, dtype=float), 0.0, 1.0)

    def sf(self, x):
        return 1.0 - self.cdf(x)

    def ppf(self, q):
        return np.asarray(q, dtype=float)

    def isf(self, q):
        return 1.0 - np.asarray(q, dtype=float)


def _open_unit(u: np.ndarray) -> np.ndarray:
    # Generator.random draws from [0, 1); 0 would map to -inf
    tiny = np.finfo(float).tiny
    return np.where(u > 0.0, u, tiny)


def gev_cdf(p: GevParams, x):
    return p.cdf(x)


def gev_quantile(p: GevParams, q):
    return p.ppf(q)


def gev_sample(p: GevParams, count: int, seed) -> np.ndarray:
    """Inverse-transform draws, deterministic for a given seed."""
    if count < 1:
        raise ValueError("count must be >= 1")
    u = np.random.default_rng(seed).random(count)
    return p.ppf(_open_unit(u))


def _midpoint(fn: Callable, grid: int) -> np.ndarray:
    u = (np.arange(grid) + 0.5) / grid
    return np.asarray(fn(u), dtype=float)


def marginal_moments(quantile_fn: Callable, grid_size: int = 100_000, refinements: int = 4,
                     ratio_limit: float = 0.97) -> tuple[float, float]:
    """Mean and variance as midpoint-rule integrals of the quantile function on (0, 1).

    Divergence is detected by refining the grid ``refinements`` times (doubling
    each time): for a finite moment successive changes shrink geometrically,
    for an infinite one they stay constant or grow. A last-step ratio above
    ``ratio_limit`` raises ``NonFinite``.
    """
    if grid_size < 1000:
        raise ValueError("grid_size must be >= 1000")
    means, variances = [], []
    for k in range(refinements + 1):
        vals = _midpoint(quantile_fn, grid_size * 2 ** k)
        if not np.all(np.isfinite(vals)):
            raise NonFinite("quantile function returned non-finite values")
        mu = vals.mean()
        means.append(mu)
        variances.append(np.mean((vals - mu) ** 2))
    _cauchy_check(means, "mean", ratio_limit)
    _cauchy_check(variances, "variance", ratio_limit)
    return float(means[0]), float(variances[0])


def _cauchy_check(seq: list[float], what: str, ratio_limit: float) -> None:
    d = np.abs(np.diff(seq))
    scale = max(1.0, abs(seq[-1]))
    if d[-1] <= 1e-9 * scale:
        return
    if d[-2] == 0.0 or d[-1] / d[-2] > ratio_limit:
        raise NonFinite(f"{what} does not converge under grid refinement (steps {d.tolist()})")
