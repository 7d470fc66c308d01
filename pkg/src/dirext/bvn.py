"""Bivariate standard normal distribution function.

Drezner-Wesolowsky / Genz formulation with a fixed 20-point Gauss-Legendre
rule in every correlation regime, so results are reproducible to the bit.
Absolute error is far below 1e-7 over the whole (h, k, r) range.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtr

_T, _W = np.polynomial.legendre.leggauss(20)
# nodes mapped to (0, 2) so that the integral over (0, L) is (L / 2) * sum(w f(L x / 2))
_X = 1.0 + _T
_TWO_PI = 2.0 * np.pi


def bvnu(dh, dk, r: float) -> np.ndarray:
    """Upper orthant probability ``P(X > dh, Y > dk)`` for correlation ``r``."""
    h = np.asarray(dh, dtype=float)
    k = np.asarray(dk, dtype=float)
    h, k = np.broadcast_arrays(h, k)
    out = np.empty(h.shape, dtype=float)
    if not -1.0 <= r <= 1.0:
        raise ValueError(f"correlation must lie in [-1, 1], got {r}")

    pos_inf = (h == np.inf) | (k == np.inf)
    h_neg = h == -np.inf
    k_neg = k == -np.inf
    out[pos_inf] = 0.0
    m = ~pos_inf & h_neg
    out[m] = ndtr(-k[m])
    m = ~pos_inf & ~h_neg & k_neg
    out[m] = ndtr(-h[m])
    fin = ~pos_inf & ~h_neg & ~k_neg
    if np.any(fin):
        out[fin] = _bvnu_finite(h[fin], k[fin], float(r))
    return np.clip(out, 0.0, 1.0)


def _bvnu_finite(h: np.ndarray, k: np.ndarray, r: float) -> np.ndarray:
    if r == 0.0:
        return ndtr(-h) * ndtr(-k)
    hk = h * k
    if abs(r) < 0.925:
        hs = 0.5 * (h * h + k * k)
        asr = 0.5 * np.arcsin(r)
        sn = np.sin(asr * _X)[None, :]
        terms = np.exp((sn * hk[:, None] - hs[:, None]) / (1.0 - sn * sn))
        return terms @ _W * asr / _TWO_PI + ndtr(-h) * ndtr(-k)

    kk = -k if r < 0 else k
    hk = -hk if r < 0 else hk
    bvn = np.zeros_like(h)
    if abs(r) < 1.0:
        a2 = (1.0 - r) * (1.0 + r)
        a = np.sqrt(a2)
        bs = (h - kk) ** 2
        c = (4.0 - hk) / 8.0
        d = (12.0 - hk) / 80.0
        asr = -(bs / a2 + hk) / 2.0
        with np.errstate(under="ignore"):
            lead = a * np.exp(asr) * (1.0 - c * (bs - a2) * (1.0 - d * bs) / 3.0 + c * d * a2 * a2)
        bvn = np.where(asr > -100.0, lead, 0.0)
        b = np.sqrt(bs)
        with np.errstate(over="ignore", under="ignore"):
            tail = np.exp(-hk / 2.0) * np.sqrt(_TWO_PI) * ndtr(-b / a) * b * (1.0 - c * bs * (1.0 - d * bs) / 3.0)
        bvn = bvn - np.where(hk > -100.0, tail, 0.0)
        a_half = a / 2.0
        xs = (a_half * _X) ** 2  # (20,)
        asr_q = -(bs[:, None] / xs[None, :] + hk[:, None]) / 2.0
        sp = 1.0 + c[:, None] * xs[None, :] * (1.0 + 5.0 * d[:, None] * xs[None, :])
        rs = np.sqrt(1.0 - xs)
        with np.errstate(over="ignore", under="ignore", invalid="ignore"):
            ep = np.exp(-(hk[:, None] / 2.0) * xs[None, :] / (1.0 + rs[None, :]) ** 2) / rs[None, :]
            contrib = np.exp(asr_q) * (sp - ep)
        contrib = np.where(asr_q > -100.0, contrib, 0.0)
        bvn = (a_half * (contrib @ _W) - bvn) / _TWO_PI
    if r > 0:
        return bvn + ndtr(-np.maximum(h, kk))
    out = -bvn
    lo = h < kk
    if np.any(lo):
        span = np.where(h < 0, ndtr(kk) - ndtr(h), ndtr(-h) - ndtr(-kk))
        out = np.where(lo, span - bvn, out)
    return out


def bvn_cdf(x, y, r: float) -> np.ndarray:
    """``P(X <= x, Y <= y)`` for standard normals with correlation ``r``."""
    return bvnu(-np.asarray(x, dtype=float), -np.asarray(y, dtype=float), r)
