"""QR-oriented orthants.

For a unit direction ``u`` with no zero component, the rotation ``R_u`` is the
unique orthogonal matrix ``Q_e @ Q_u.T`` built from positive-diagonal QR
factorizations of

    M_u = [u, sgn(u_2) e_2, ..., sgn(u_n) e_n]
    M_e = [e, e_2, ..., e_n]

where ``e = (1/sqrt(n)) * (1, ..., 1)``. It satisfies ``R_u @ u == e``; the
oriented orthant with vertex ``x`` is ``{z : R_u @ (z - x) >= 0}``.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, NotUnit, ZeroComponent

ZERO_TOL = 1e-12
UNIT_TOL = 1e-9


def canonical_diagonal(n: int) -> np.ndarray:
    """The main diagonal direction ``e`` of R^n."""
    if n < 2:
        raise DimensionMismatch(f"directions need n >= 2, got n={n}")
    return np.full(n, 1.0 / np.sqrt(n))


def as_direction(u) -> np.ndarray:
    """Validate ``u`` as an admissible direction and return it as a float array."""
    u = np.asarray(u, dtype=float)
    if u.ndim != 1 or u.size < 2:
        raise DimensionMismatch(f"direction must be a vector with n >= 2, got shape {u.shape}")
    if not np.all(np.isfinite(u)):
        raise NotUnit("direction has non-finite components")
    if np.any(np.abs(u) < ZERO_TOL):
        idx = np.flatnonzero(np.abs(u) < ZERO_TOL).tolist()
        raise ZeroComponent(f"direction has zero components at {idx}")
    norm = np.linalg.norm(u)
    if abs(norm - 1.0) > UNIT_TOL:
        raise NotUnit(f"direction norm is {norm!r}, expected 1")
    return u


def qr_positive(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """QR factorization whose triangular factor has a strictly positive diagonal."""
    q, t = np.linalg.qr(m)
    signs = np.sign(np.diag(t))
    signs[signs == 0] = 1.0
    return q * signs, t * signs[:, None]


def build_rotation(u) -> np.ndarray:
    """Rotation ``R_u`` of the QR oriented orthant in direction ``u``.

    Parameters
    ----------
    u : array_like, shape (n,)
        Unit vector with every component non-zero.

    Returns
    -------
    ndarray, shape (n, n)
        Orthogonal matrix with ``R_u @ u == e``. Exactly the identity when
        ``u`` is bitwise equal to ``canonical_diagonal(n)``.
    """
    u = as_direction(u)
    n = u.size
    e = canonical_diagonal(n)
    if np.array_equal(u, e):
        # Q_u == Q_e here, so R_u = Q Q' = I; return it without rounding noise.
        return np.eye(n)
    eye = np.eye(n)
    m_u = eye * np.sign(u)[None, :]
    m_u[:, 0] = u
    m_e = eye.copy()
    m_e[:, 0] = e
    q_u, _ = qr_positive(m_u)
    q_e, _ = qr_positive(m_e)
    return q_e @ q_u.T


def _check_points(points: np.ndarray, n: int) -> None:
    if points.shape[-1] != n:
        raise DimensionMismatch(f"points have dimension {points.shape[-1]}, direction has {n}")


def orthant_contains(vertex, u, z) -> bool:
    """Whether ``z`` lies in the closed oriented orthant at ``vertex`` in direction ``u``."""
    rot = build_rotation(u)
    vertex = np.asarray(vertex, dtype=float)
    z = np.asarray(z, dtype=float)
    n = rot.shape[0]
    if vertex.shape != (n,) or z.shape != (n,):
        raise DimensionMismatch(f"vertex {vertex.shape} and z {z.shape} must both be ({n},)")
    return bool(np.all(rot @ (z - vertex) >= 0.0))


def rotate_sample(sample, u) -> np.ndarray:
    """Apply ``R_u`` to every row of ``sample``; row order is preserved."""
    rot = build_rotation(u)
    sample = np.asarray(sample, dtype=float)
    if sample.ndim != 2 or sample.shape[0] == 0:
        raise DimensionMismatch(f"sample must be a non-empty (m, n) array, got {sample.shape}")
    _check_points(sample, rot.shape[0])
    return sample @ rot.T
