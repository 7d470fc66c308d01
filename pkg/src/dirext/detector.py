"""Non-parametric directional quantiles and level sets.

For a sample ``x_1..x_m`` and direction ``u`` the empirical orthant probability
of point ``i`` is ``P_i = k_i / m`` with ``k_i`` the number of sample points in
the closed oriented orthant at ``x_i``. Points are then labeled against the
level ``alpha`` with a slack ``h``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import geometry
from .dominance import dominance_counts, naive_counts
from .errors import ConfigInvalid, DimensionMismatch


class Mode(str, enum.Enum):
    SURVIVAL = "survival"
    DISTRIBUTION = "distribution"


class Label(enum.IntEnum):
    LOWER = 0
    QUANTILE = 1
    UPPER = 2

    def __str__(self) -> str:
        return self.name.capitalize()


def as_sample(sample) -> np.ndarray:
    s = np.asarray(sample, dtype=float)
    if s.ndim != 2 or s.shape[0] < 1:
        raise DimensionMismatch(f"sample must be a non-empty (m, n) array, got shape {s.shape}")
    if not np.all(np.isfinite(s)):
        raise ConfigInvalid("sample contains non-finite values")
    return s


def orthant_counts(sample, u, method: str = "auto") -> np.ndarray:
    """Integer counts ``k_i``; probabilities are ``k_i / m``."""
    s = as_sample(sample)
    rotated = geometry.rotate_sample(s, u)
    return dominance_counts(rotated, method=method)


def orthant_probabilities(sample, u, method: str = "auto") -> np.ndarray:
    """Empirical probability of the oriented orthant at each sample point."""
    counts = orthant_counts(sample, u, method=method)
    return counts / counts.size


def naive_orthant_counts(sample, u) -> np.ndarray:
    """All-pairs evaluation of ``R_u @ (x_j - x_i) >= 0``; used as a test oracle.

    Rows ``i`` are processed in blocks so memory stays bounded; the
    arithmetic per pair is exactly the literal differencing then rotation.
    """
    s = as_sample(sample)
    rot = geometry.build_rotation(u)
    if s.shape[1] != rot.shape[0]:
        raise DimensionMismatch("sample and direction dimensions differ")
    m = s.shape[0]
    out = np.empty(m, dtype=np.int64)
    block = max(1, 2**20 // max(m * s.shape[1], 1))
    for lo in range(0, m, block):
        diff = (s[None, :, :] - s[lo:lo + block, None, :]) @ rot.T
        out[lo:lo + block] = np.all(diff >= 0.0, axis=2).sum(axis=1)
    return out


@dataclass(frozen=True)
class DetectionConfig:
    alpha: float
    direction: np.ndarray
    slack_h: float | None = None
    mode: Mode = Mode.SURVIVAL

    def slack_for(self, m: int) -> float:
        """The configured slack, or ``1/(2m)`` when unset."""
        return 1.0 / (2 * m) if self.slack_h is None else float(self.slack_h)

    def validate(self, m: int) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise ConfigInvalid(f"alpha must lie in (0, 1), got {self.alpha}")
        h = self.slack_for(m)
        if not (h >= 0.0 and np.isfinite(h)):
            raise ConfigInvalid(f"slack must be finite and >= 0, got {h}")
        if Mode(self.mode) is Mode.SURVIVAL and not self.alpha - h > 0.0:
            raise ConfigInvalid(f"alpha - h must be positive (alpha={self.alpha}, h={h})")
        if not self.alpha + h < 1.0:
            raise ConfigInvalid(f"alpha + h must be below 1 (alpha={self.alpha}, h={h})")
        geometry.as_direction(self.direction)


@dataclass(frozen=True)
class DetectionResult:
    counts: np.ndarray
    labels: np.ndarray
    slack_h: float
    mode: Mode
    direction: np.ndarray = field(repr=False)

    @property
    def m(self) -> int:
        return int(self.counts.size)

    @property
    def probabilities(self) -> np.ndarray:
        return self.counts / self.m

    def indices(self, label: Label) -> np.ndarray:
        return np.flatnonzero(self.labels == label)

    @property
    def upper(self) -> np.ndarray:
        return self.indices(Label.UPPER)

    @property
    def quantile(self) -> np.ndarray:
        return self.indices(Label.QUANTILE)

    @property
    def lower(self) -> np.ndarray:
        return self.indices(Label.LOWER)

    @property
    def positives(self) -> np.ndarray:
        """Boolean mask of points flagged critical: Upper or Quantile."""
        return self.labels != Label.LOWER

    def summary(self) -> dict[str, int]:
        return {str(lab): int(np.sum(self.labels == lab)) for lab in (Label.UPPER, Label.QUANTILE, Label.LOWER)}


def label_probabilities(p: np.ndarray, alpha: float, h: float, mode: Mode) -> np.ndarray:
    """Label orthant probabilities. Ties ``|P - level| == h`` go to Quantile."""
    p = np.asarray(p, dtype=float)
    labels = np.full(p.shape, Label.QUANTILE, dtype=np.int8)
    if Mode(mode) is Mode.SURVIVAL:
        labels[p < alpha - h] = Label.UPPER
        labels[p > alpha + h] = Label.LOWER
    else:
        level = 1.0 - alpha
        labels[p > level + h] = Label.UPPER
        labels[p < level - h] = Label.LOWER
    return labels


def detect(sample, cfg: DetectionConfig, method: str = "auto") -> DetectionResult:
    """Split the sample into Upper (extreme), Quantile and Lower (non-risky) points.

    Survival mode uses orthants in direction ``u`` against ``alpha``;
    distribution mode uses direction ``-u`` against ``1 - alpha`` with the
    inequalities reversed.
    """
    s = as_sample(sample)
    m = s.shape[0]
    cfg.validate(m)
    u = geometry.as_direction(cfg.direction)
    if u.size != s.shape[1]:
        raise DimensionMismatch(f"direction has n={u.size}, sample has {s.shape[1]} columns")
    mode = Mode(cfg.mode)
    h = cfg.slack_for(m)
    look = u if mode is Mode.SURVIVAL else -u
    counts = orthant_counts(s, look, method=method)
    labels = label_probabilities(counts / m, cfg.alpha, h, mode)
    return DetectionResult(counts=counts, labels=labels, slack_h=h, mode=mode, direction=u)


@dataclass(frozen=True)
class ContainmentReport:
    violations: list[int]
    distribution_upper: np.ndarray
    survival_upper: np.ndarray

    @property
    def holds(self) -> bool:
        return not self.violations


def containment_check(sample, u, alpha: float) -> ContainmentReport:
    """Empirical check that the distribution-mode upper set sits inside the survival one.

    A sample point with ``P[C^{-u}] > 1 - alpha`` must have
    ``P[C^{u}] < alpha + 1/m``; the ``1/m`` allows for the vertex belonging to
    both orthants. Violating indices are reported.
    """
    s = as_sample(sample)
    m = s.shape[0]
    u = geometry.as_direction(u)
    k_up = orthant_counts(s, u)
    k_down = orthant_counts(s, -u)
    dist_upper = k_down / m > 1.0 - alpha
    surv_upper = k_up / m < alpha
    bad = dist_upper & ~(k_up / m < alpha + 1.0 / m)
    return ContainmentReport(
        violations=np.flatnonzero(bad).tolist(),
        distribution_upper=np.flatnonzero(dist_upper),
        survival_upper=np.flatnonzero(surv_upper),
    )


__all__ = [
    "ContainmentReport",
    "DetectionConfig",
    "DetectionResult",
    "Label",
    "Mode",
    "containment_check",
    "detect",
    "label_probabilities",
    "naive_counts",
    "naive_orthant_counts",
    "orthant_counts",
    "orthant_probabilities",
]
