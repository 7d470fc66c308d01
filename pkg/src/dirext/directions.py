"""Analysis directions: the 2^n classical directions and the first principal component."""

from __future__ import annotations

import itertools

import numpy as np

from . import geometry
from .errors import AdmissibilityError, DegenerateCovariance, DimensionTooLarge

MAX_CLASSICAL_DIM = 16
TIE_TOL = 1e-9


def sign_pattern(u) -> str:
    return "".join("+" if c > 0 else "-" for c in np.asarray(u))


def classical_directions(n: int) -> dict[str, np.ndarray]:
    """All ``2**n`` unit vectors with components ``+-1/sqrt(n)``, keyed by sign pattern.

    ``"+" * n`` is ``e`` and ``"-" * n`` is ``-e``.
    """
    if n < 2:
        raise geometry.DimensionMismatch(f"need n >= 2, got {n}")
    if n > MAX_CLASSICAL_DIM:
        raise DimensionTooLarge(f"2**{n} classical directions exceeds the n <= {MAX_CLASSICAL_DIM} guard")
    e = geometry.canonical_diagonal(n)
    catalog = {}
    for signs in itertools.product((1.0, -1.0), repeat=n):
        u = e * np.array(signs)
        catalog[sign_pattern(u)] = u
    return catalog


def parse_direction(spec, n: int | None = None) -> np.ndarray:
    """Resolve a named pattern (``"e"``, ``"-e"``, ``"+-"``) or a numeric vector.

    Numeric vectors are normalized to unit length. ``"pca"`` is not handled
    here because it needs the sample.
    """
    if isinstance(spec, str):
        s = spec.strip()
        if s in ("e", "-e"):
            if n is None:
                raise ValueError(f"direction {s!r} needs the dimension")
            e = geometry.canonical_diagonal(n)
            return e if s == "e" else -e
        if s and set(s) <= {"+", "-"}:
            if n is not None and len(s) != n:
                raise geometry.DimensionMismatch(f"pattern {s!r} has length {len(s)}, data has n={n}")
            return classical_directions(len(s))[s]
        vec = np.array([float(t) for t in s.replace(";", ",").split(",")])
    else:
        vec = np.asarray(spec, dtype=float)
    if n is not None and vec.size != n:
        raise geometry.DimensionMismatch(f"direction has {vec.size} components, data has n={n}")
    norm = np.linalg.norm(vec)
    if not np.isfinite(norm) or norm == 0.0:
        raise AdmissibilityError("direction vector must be finite and non-zero")
    return geometry.as_direction(vec / norm)


def first_pca_direction(sample, standardize: bool = False) -> np.ndarray:
    """Leading eigenvector of the sample covariance, signed so that ``u @ e > 0``.

    Parameters
    ----------
    sample : array_like, shape (m, n)
        Raw observations, m >= 2. Data are centered but not scaled.
    standardize : bool
        Use the correlation matrix instead of the covariance. The returned
        vector then lives in standardized coordinates.

    Raises
    ------
    DegenerateCovariance
        Zero covariance or a repeated leading eigenvalue.
    AdmissibilityError
        The eigenvector has a zero component.
    """
    s = np.asarray(sample, dtype=float)
    if s.ndim != 2 or s.shape[0] < 2 or s.shape[1] < 2:
        raise DegenerateCovariance(f"need an (m, n) sample with m >= 2 and n >= 2, got {s.shape}")
    cov = np.cov(s, rowvar=False)
    if standardize:
        sd = np.sqrt(np.diag(cov))
        if np.any(sd == 0):
            raise DegenerateCovariance("constant column; correlation undefined")
        cov = cov / np.outer(sd, sd)
    vals, vecs = np.linalg.eigh(cov)
    top = vals[-1]
    if not top > 0.0:
        raise DegenerateCovariance("covariance matrix is zero")
    if vals[-1] - vals[-2] <= TIE_TOL * top:
        raise DegenerateCovariance(f"leading eigenvalue is not simple: {vals[-1]!r} vs {vals[-2]!r}")
    u = vecs[:, -1]
    u = u / np.linalg.norm(u)
    dot = u.sum()
    if abs(dot) > geometry.ZERO_TOL:
        if dot < 0:
            u = -u
    else:
        # u orthogonal to e: fall back to a positive first non-zero component
        lead = u[np.flatnonzero(np.abs(u) > geometry.ZERO_TOL)[0]]
        if lead < 0:
            u = -u
    if np.any(np.abs(u) < geometry.ZERO_TOL):
        raise AdmissibilityError(f"first principal direction {u.tolist()} has a zero component")
    return u
