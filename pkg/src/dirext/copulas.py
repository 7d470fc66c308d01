"""Bivariate copulas, product nesting, Sklar mapping and copula-space level sets.

Orientation transforms of a base copula ``C``:

* survival: ``v1 + v2 - 1 + C(1 - v1, 1 - v2)``  (law of ``(1-V1, 1-V2)``)
* rot90:    ``v1 - C(v1, 1 - v2)``               (law of ``(V1, 1-V2)``)
* rot270:   ``v2 - C(1 - v1, v2)``               (law of ``(1-V1, V2)``)
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np
from scipy import integrate, special

from . import geometry
from .bvn import bvn_cdf
from .errors import BisectionFailure, OutOfUnitSquare, TreeInvalid
from .margins import GaussianParams, _open_unit


class Family(str, enum.Enum):
    GAUSSIAN = "gaussian"
    FRANK = "frank"
    GUMBEL = "gumbel"
    INDEPENDENCE = "independence"


class Orientation(str, enum.Enum):
    PLAIN = "plain"
    SURVIVAL = "survival"
    ROT90 = "rot90"
    ROT270 = "rot270"


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _check_unit(*vs: np.ndarray) -> None:
    for v in vs:
        if np.any(~((v >= 0.0) & (v <= 1.0))):
            raise OutOfUnitSquare("copula arguments must lie in [0, 1]")


# ---- base families ---------------------------------------------------------

def _gaussian_cdf(v1, v2, rho):
    return bvn_cdf(special.ndtri(v1), special.ndtri(v2), rho)


def _frank_cdf(v1, v2, theta):
    num = np.expm1(-theta * v1) * np.expm1(-theta * v2)
    return -np.log1p(num / np.expm1(-theta)) / theta


def _gumbel_cdf(v1, v2, theta):
    with np.errstate(divide="ignore"):
        a = -np.log(v1)
        b = -np.log(v2)
    return np.exp(-(a ** theta + b ** theta) ** (1.0 / theta))


def _gumbel_conditional(v1, v2, theta):
    """dC/dv1 at (v1, v2): the distribution of V2 given V1 = v1."""
    a = -np.log(v1)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        b = -np.log(v2)
        s = a ** theta + b ** theta
        c = np.exp(-s ** (1.0 / theta))
        return c * s ** (1.0 / theta - 1.0) * a ** (theta - 1.0) / v1


@dataclass(frozen=True)
class Copula:
    """A bivariate copula: family, parameter and orientation.

    ``param`` is Pearson's rho for the Gaussian family and theta for Frank
    (non-zero) and Gumbel (>= 1); it is ignored for independence.
    """

    family: Family
    param: float = 0.0
    orientation: Orientation = Orientation.PLAIN

    def __post_init__(self):
        fam = Family(self.family)
        object.__setattr__(self, "family", fam)
        object.__setattr__(self, "orientation", Orientation(self.orientation))
        p = float(self.param)
        if fam is Family.GAUSSIAN and not -1.0 < p < 1.0:
            raise ValueError(f"Gaussian rho must lie in (-1, 1), got {p}")
        if fam is Family.FRANK and p == 0.0:
            raise ValueError("Frank theta must be non-zero")
        if fam is Family.GUMBEL and not p >= 1.0:
            raise ValueError(f"Gumbel theta must be >= 1, got {p}")

    def base_cdf(self, v1, v2) -> np.ndarray:
        """Unoriented family CDF with exact grounding on the square's edges."""
        v1, v2 = np.broadcast_arrays(np.asarray(v1, dtype=float), np.asarray(v2, dtype=float))
        out = np.empty(v1.shape)
        zero = (v1 == 0.0) | (v2 == 0.0)
        one1 = (v1 == 1.0) & ~zero
        one2 = (v2 == 1.0) & ~zero & ~one1
        inner = ~(zero | one1 | one2)
        out[zero] = 0.0
        out[one1] = v2[one1]
        out[one2] = v1[one2]
        a, b = v1[inner], v2[inner]
        fam, p = self.family, float(self.param)
        if fam is Family.INDEPENDENCE:
            val = a * b
        elif fam is Family.GAUSSIAN:
            val = _gaussian_cdf(a, b, p)
        elif fam is Family.FRANK:
            val = _frank_cdf(a, b, p)
        else:
            val = _gumbel_cdf(a, b, p)
        # Frechet-Hoeffding bounds absorb rounding
        out[inner] = np.clip(val, np.maximum(a + b - 1.0, 0.0), np.minimum(a, b))
        return out

    def cdf(self, v1, v2) -> np.ndarray:
        v1 = np.asarray(v1, dtype=float)
        v2 = np.asarray(v2, dtype=float)
        _check_unit(v1, v2)
        o = self.orientation
        if o is Orientation.PLAIN:
            return self.base_cdf(v1, v2)
        if o is Orientation.SURVIVAL:
            return v1 + v2 - 1.0 + self.base_cdf(1.0 - v1, 1.0 - v2)
        if o is Orientation.ROT90:
            return v1 - self.base_cdf(v1, 1.0 - v2)
        return v2 - self.base_cdf(1.0 - v1, v2)

    def _base_sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        v1 = _open_unit(rng.random(count))
        w = _open_unit(rng.random(count))
        fam, p = self.family, float(self.param)
        if fam is Family.INDEPENDENCE:
            v2 = w
        elif fam is Family.GAUSSIAN:
            z = p * special.ndtri(v1) + np.sqrt(1.0 - p * p) * special.ndtri(w)
            v2 = special.ndtr(z)
        elif fam is Family.FRANK:
            a = np.exp(-p * v1)
            b = w * np.expm1(-p) / (w + a * (1.0 - w))
            v2 = -np.log1p(b) / p
        else:
            v2 = gumbel_conditional_inverse(v1, w, p)
        return np.column_stack([v1, np.clip(v2, 0.0, 1.0)])

    def sample(self, count: int, seed) -> np.ndarray:
        """``count`` draws of ``(V1, V2)`` by conditional inversion."""
        if count < 1:
            raise ValueError("count must be >= 1")
        v = self._base_sample(count, _rng(seed))
        o = self.orientation
        if o is Orientation.SURVIVAL:
            v = 1.0 - v
        elif o is Orientation.ROT90:
            v[:, 1] = 1.0 - v[:, 1]
        elif o is Orientation.ROT270:
            v[:, 0] = 1.0 - v[:, 0]
        return v

    def kendall_tau(self) -> float:
        """Population Kendall's tau (sign-flipped for the 90/270 rotations)."""
        fam, p = self.family, float(self.param)
        if fam is Family.INDEPENDENCE:
            tau = 0.0
        elif fam is Family.GAUSSIAN:
            tau = 2.0 / np.pi * np.arcsin(p)
        elif fam is Family.GUMBEL:
            tau = 1.0 - 1.0 / p
        else:
            tau = frank_kendall_tau(p)
        return -tau if self.orientation in (Orientation.ROT90, Orientation.ROT270) else tau


def gumbel_conditional_inverse(v1, w, theta: float, tol: float = 1e-12, max_iter: int = 200) -> np.ndarray:
    """Solve ``dC/dv1(v1, v2) = w`` for ``v2`` by bisection on [0, 1]."""
    v1 = np.asarray(v1, dtype=float)
    w = np.asarray(w, dtype=float)
    lo = np.zeros_like(v1)
    hi = np.ones_like(v1)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        val = _gumbel_conditional(v1, mid, theta)
        if not np.all(np.isfinite(val)):
            raise BisectionFailure("Gumbel conditional returned non-finite values")
        below = val < w
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.max(hi - lo) < tol:
            return 0.5 * (lo + hi)
    raise BisectionFailure(f"bisection did not reach tolerance {tol} in {max_iter} iterations")


def debye1(x: float) -> float:
    """First Debye function ``(1/x) * int_0^x t / (e^t - 1) dt``."""
    if x == 0.0:
        return 1.0
    val, _ = integrate.quad(lambda t: t / np.expm1(t) if t != 0.0 else 1.0, 0.0, x, epsabs=1e-13, epsrel=1e-13)
    return val / x


def frank_kendall_tau(theta: float) -> float:
    return 1.0 - 4.0 / theta * (1.0 - debye1(theta))


def survival_of(cdf: Callable) -> Callable:
    """The survival transform as a function-to-function map."""
    def surv(v1, v2):
        v1 = np.asarray(v1, dtype=float)
        v2 = np.asarray(v2, dtype=float)
        return v1 + v2 - 1.0 + cdf(1.0 - v1, 1.0 - v2)
    return surv


def copula_cdf(c: Copula, v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return c.cdf(v[..., 0], v[..., 1])


def copula_sample(c: Copula, count: int, seed) -> np.ndarray:
    return c.sample(count, seed)


# ---- nested models ---------------------------------------------------------

@dataclass(frozen=True)
class PairLeaf:
    copula: Copula
    coords: tuple[int, int]


@dataclass(frozen=True)
class ProductNest:
    """``v[coord] * child(...)``: an independent coordinate nested onto a sub-model."""

    child: "Tree"
    coord: int


Tree = Union[PairLeaf, ProductNest]


def tree_coords(tree: Tree) -> list[int]:
    if isinstance(tree, PairLeaf):
        return list(tree.coords)
    if isinstance(tree, ProductNest):
        return tree_coords(tree.child) + [tree.coord]
    raise TreeInvalid(f"unknown tree node {tree!r}")


def validate_tree(tree: Tree, n: int | None = None) -> int:
    coords = tree_coords(tree)
    dim = len(coords) if n is None else n
    if sorted(coords) != list(range(dim)):
        raise TreeInvalid(f"tree must cover coordinates 0..{dim - 1} exactly once, covers {coords}")
    return dim


def nested_cdf(tree: Tree, v) -> np.ndarray:
    """Evaluate the nested copula at ``v`` (shape ``(n,)`` or ``(count, n)``)."""
    v = np.asarray(v, dtype=float)
    n = validate_tree(tree)
    if v.shape[-1] != n:
        raise TreeInvalid(f"point has {v.shape[-1]} coordinates, tree covers {n}")
    _check_unit(v)
    return _eval_tree(tree, v)


def _eval_tree(tree: Tree, v: np.ndarray) -> np.ndarray:
    if isinstance(tree, PairLeaf):
        i, j = tree.coords
        return tree.copula.cdf(v[..., i], v[..., j])
    return v[..., tree.coord] * _eval_tree(tree.child, v)


def sample_tree(tree: Tree, count: int, seed) -> np.ndarray:
    """Draw from the nested copula: pair from its copula, nested coordinates independent uniforms."""
    n = validate_tree(tree)
    rng = _rng(seed)
    out = np.empty((count, n))
    _fill(tree, out, rng)
    return out


def _fill(tree: Tree, out: np.ndarray, rng: np.random.Generator) -> None:
    if isinstance(tree, PairLeaf):
        pair = tree.copula.sample(out.shape[0], rng)
        out[:, tree.coords[0]] = pair[:, 0]
        out[:, tree.coords[1]] = pair[:, 1]
        return
    _fill(tree.child, out, rng)
    out[:, tree.coord] = _open_unit(rng.random(out.shape[0]))


@dataclass(frozen=True)
class JointModel:
    """Marginals plus a copula tree glued by Sklar's theorem.

    With ``survival=False`` copula coordinates are ``F_i(x_i)``; with
    ``survival=True`` they are the marginal survivals ``1 - F_i(x_i)``.
    """

    marginals: tuple
    tree: Tree
    survival: bool = False
    names: tuple[str, ...] | None = None

    def __post_init__(self):
        validate_tree(self.tree, len(self.marginals))
        if self.names is not None and len(self.names) != len(self.marginals):
            raise TreeInvalid("names must match the number of marginals")

    @property
    def n(self) -> int:
        return len(self.marginals)

    def sample_copula(self, count: int, seed) -> np.ndarray:
        return sample_tree(self.tree, count, seed)

    def sample(self, count: int, seed) -> np.ndarray:
        return sklar_transform(self, self.sample_copula(count, seed))

    def cdf(self, x) -> np.ndarray:
        """Joint distribution (or joint survival when ``survival``) at ``x``."""
        x = np.asarray(x, dtype=float)
        cols = [(m.sf if self.survival else m.cdf)(x[..., i]) for i, m in enumerate(self.marginals)]
        return nested_cdf(self.tree, np.stack(cols, axis=-1))


def sklar_transform(model: JointModel, points) -> np.ndarray:
    """Map copula-space points to data space coordinate by coordinate."""
    v = np.asarray(points, dtype=float)
    if v.ndim != 2 or v.shape[1] != model.n:
        raise TreeInvalid(f"expected (count, {model.n}) copula points, got {v.shape}")
    _check_unit(v)
    cols = []
    for i, m in enumerate(model.marginals):
        q = v[:, i]
        cols.append(m.isf(q) if model.survival else m.ppf(q))
    return np.column_stack(cols)


# ---- level sets in the unit square ----------------------------------------

@dataclass(frozen=True)
class LevelSetGrid:
    v1: np.ndarray
    v2: np.ndarray
    values: np.ndarray
    labels: np.ndarray  # detector.Label codes: 0 lower, 1 quantile, 2 upper
    alpha: float
    band: float

    def mask(self, label: int) -> np.ndarray:
        return self.labels == label


def copula_level_sets(c: Copula, alpha: float, grid: int = 200) -> LevelSetGrid:
    """Classify a ``grid x grid`` lattice of cell midpoints by ``C(v)`` against ``alpha``.

    Quantile band ``|C - alpha| <= 1/grid``; upper ``C < alpha``; lower
    ``C > alpha`` (outside the band). Pass a survival-oriented copula for the
    usual survival-side analysis.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    if grid < 100:
        raise ValueError("grid must be >= 100")
    ticks = (np.arange(grid) + 0.5) / grid
    v1, v2 = np.meshgrid(ticks, ticks, indexing="ij")
    vals = c.cdf(v1, v2)
    band = 1.0 / grid
    labels = np.full(vals.shape, 1, dtype=np.int8)
    labels[vals < alpha - band] = 2
    labels[vals > alpha + band] = 0
    return LevelSetGrid(v1=v1, v2=v2, values=vals, labels=labels, alpha=alpha, band=band)


# ---- Gaussian closed forms under rotation ---------------------------------

def gaussian_covariance(m1: GaussianParams, m2: GaussianParams, rho: float) -> np.ndarray:
    cross = rho * m1.sd * m2.sd
    return np.array([[m1.var, cross], [cross, m2.var]])


def rotated_gaussian_params(m1: GaussianParams, m2: GaussianParams, rho: float,
                            u) -> tuple[GaussianParams, GaussianParams, float]:
    """Marginals and correlation of ``R_u X`` for a bivariate Gaussian ``X``.

    Means are ``R_u mu``, variances the diagonal of ``R_u S R_u'`` and the
    correlation its off-diagonal entry divided by the new standard deviations.
    """
    rot = geometry.build_rotation(u)
    if rot.shape != (2, 2):
        raise geometry.DimensionMismatch("rotated Gaussian closed forms are bivariate")
    mu = rot @ np.array([m1.mean, m2.mean])
    cov = rot @ gaussian_covariance(m1, m2, rho) @ rot.T
    rho_u = cov[0, 1] / np.sqrt(cov[0, 0] * cov[1, 1])
    return GaussianParams(mu[0], cov[0, 0]), GaussianParams(mu[1], cov[1, 1]), float(rho_u)


def gaussian_directional_probability(m1: GaussianParams, m2: GaussianParams, rho: float,
                                     u, points) -> np.ndarray:
    """Exact ``P[X in oriented orthant at x, direction u]`` for a bivariate Gaussian.

    Evaluated through the copula route: rotate, take marginal survivals of the
    rotated model, and apply its Gaussian survival copula.
    """
    r1, r2, rho_u = rotated_gaussian_params(m1, m2, rho, u)
    y = geometry.rotate_sample(np.atleast_2d(points), u)
    surv = Copula(Family.GAUSSIAN, rho_u, Orientation.SURVIVAL)
    return surv.cdf(r1.sf(y[:, 0]), r2.sf(y[:, 1]))


__all__ = [
    "Copula",
    "Family",
    "JointModel",
    "LevelSetGrid",
    "Orientation",
    "PairLeaf",
    "ProductNest",
    "copula_cdf",
    "copula_level_sets",
    "copula_sample",
    "debye1",
    "frank_kendall_tau",
    "gaussian_covariance",
    "gaussian_directional_probability",
    "gumbel_conditional_inverse",
    "nested_cdf",
    "rotated_gaussian_params",
    "sample_tree",
    "sklar_transform",
    "survival_of",
]
