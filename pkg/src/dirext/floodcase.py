"""Dam flood case study: simulate (Q, V, L) years, route triangular hydrographs
through a level-pool reservoir with an uncontrolled spillway, and score the
directional detector against the routing outcome.

Units: peak Q in m^3/s, volume V in 10^6 m^3, levels in m a.s.l., times in hours.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import directions
from .copulas import Copula, Family, JointModel, PairLeaf, ProductNest
from .detector import DetectionConfig, DetectionResult, Mode, detect
from .errors import LengthMismatch, ResolutionTooCoarse, SpecInvalid
from .geometry import canonical_diagonal
from .margins import GevParams

SECONDS_PER_HOUR = 3600.0
RISE_FACTOR = 2.67
RECESSION_FACTOR = 1.67

Q_MARGIN = GevParams(loc=59.358, scale=36.203, shape=0.368)
V_MARGIN = GevParams(loc=1.7231, scale=1.5246, shape=0.6149)
L_MARGIN = GevParams(loc=780.6261, scale=0.7623, shape=-1.5476)
QV_THETA = 3.1378


def flood_model() -> JointModel:
    """GEV marginals for Q, V, L; Gumbel copula on (Q, V); L nested as an independent factor."""
    tree = ProductNest(PairLeaf(Copula(Family.GUMBEL, QV_THETA), (0, 1)), 2)
    return JointModel(marginals=(Q_MARGIN, V_MARGIN, L_MARGIN), tree=tree, names=("Q", "V", "L"))


class EventClass(enum.IntEnum):
    REGULAR = 0
    RISKY = 1
    CATASTROPHIC = 2

    def __str__(self) -> str:
        return self.name.capitalize()


@dataclass(frozen=True)
class Hydrograph:
    peak: float  # m^3/s
    base_time: float  # h
    rise_time: float  # h
    recession_time: float  # h

    @classmethod
    def triangular(cls, peak: float, volume: float) -> "Hydrograph":
        """Triangle of peak ``peak`` (m^3/s) and volume ``volume`` (10^6 m^3)."""
        if not (peak > 0 and volume > 0):
            raise SpecInvalid("peak and volume must be positive")
        tb = 2.0 * volume * 1e6 / peak / SECONDS_PER_HOUR
        tp = tb / RISE_FACTOR
        return cls(peak=peak, base_time=tb, rise_time=tp, recession_time=RECESSION_FACTOR * tp)

    @property
    def volume(self) -> float:
        """Triangle area in 10^6 m^3, taking the base time as authoritative."""
        return 0.5 * self.peak * self.base_time * SECONDS_PER_HOUR / 1e6

    def inflow(self, t_hours):
        return triangular_inflow(np.asarray(t_hours, dtype=float), self.peak, self.rise_time, self.base_time)


def triangular_inflow(t, peak, tp, tb):
    rising = peak * t / tp
    falling = peak * (tb - t) / (tb - tp)
    q = np.where(t <= tp, rising, falling)
    return np.where((t < 0) | (t > tb), 0.0, q)


@dataclass(frozen=True)
class DamSpec:
    """Reservoir geometry and spillway rating.

    Storage is piecewise linear in elevation through ``storage_levels`` /
    ``storage_volumes`` (m a.s.l., m^3), extrapolated past the last point with
    the last slope. Spillway outflow is ``coeff * width * (h - spillway)^1.5``.
    """

    spillway_level: float = 781.50
    max_regulation_level: float = 782.50
    crest_level: float = 784.00
    storage_levels: tuple[float, ...] = (775.0, 784.0)
    storage_volumes: tuple[float, ...] = (0.0, 3.0e6)
    spillway_coeff: float = 2.1
    spillway_width: float = 250.0

    def validate(self) -> None:
        if not self.spillway_level < self.max_regulation_level < self.crest_level:
            raise SpecInvalid("need spillway < max regulation < crest")
        lv = np.asarray(self.storage_levels)
        vol = np.asarray(self.storage_volumes)
        if lv.size < 2 or lv.size != vol.size:
            raise SpecInvalid("storage curve needs >= 2 matching points")
        if np.any(np.diff(lv) <= 0) or np.any(np.diff(vol) <= 0):
            raise SpecInvalid("storage curve must be strictly increasing")
        if not (self.spillway_coeff > 0 and self.spillway_width > 0):
            raise SpecInvalid("spillway rating must be positive")

    def storage(self, level):
        lv = np.asarray(self.storage_levels)
        vol = np.asarray(self.storage_volumes)
        level = np.asarray(level, dtype=float)
        lo = vol[0] + (level - lv[0]) * (vol[1] - vol[0]) / (lv[1] - lv[0])
        hi = vol[-1] + (level - lv[-1]) * (vol[-1] - vol[-2]) / (lv[-1] - lv[-2])
        return np.where(level < lv[0], lo, np.where(level > lv[-1], hi, np.interp(level, lv, vol)))

    def level(self, storage):
        lv = np.asarray(self.storage_levels)
        vol = np.asarray(self.storage_volumes)
        s = np.asarray(storage, dtype=float)
        lo = lv[0] + (s - vol[0]) * (lv[1] - lv[0]) / (vol[1] - vol[0])
        hi = lv[-1] + (s - vol[-1]) * (lv[-1] - lv[-2]) / (vol[-1] - vol[-2])
        return np.where(s < vol[0], lo, np.where(s > vol[-1], hi, np.interp(s, vol, lv)))

    def outflow(self, level):
        head = np.maximum(np.asarray(level, dtype=float) - self.spillway_level, 0.0)
        return self.spillway_coeff * self.spillway_width * head ** 1.5

    def classify(self, max_level):
        """Regular / Risky (above max regulation, up to the crest) / Catastrophic (above crest)."""
        h = np.asarray(max_level, dtype=float)
        cls = np.full(h.shape, EventClass.REGULAR, dtype=np.int8)
        cls[h > self.max_regulation_level] = EventClass.RISKY
        cls[h > self.crest_level] = EventClass.CATASTROPHIC
        return cls


DEFAULT_DAM = DamSpec()


@dataclass(frozen=True)
class RoutingOutcome:
    max_level: float
    event_class: EventClass

    @property
    def critical(self) -> bool:
        return self.event_class != EventClass.REGULAR


@dataclass(frozen=True)
class RoutingTrace:
    """Per-step record of a routing run (arrays over steps, or steps x events)."""

    times: np.ndarray
    levels: np.ndarray
    inflow_volume: np.ndarray  # m^3, cumulative
    outflow_volume: np.ndarray  # m^3, cumulative
    storage: np.ndarray  # m^3


def _solve_storage(rhs, half_dt, dam: DamSpec, tol: float = 1e-9, max_iter: int = 100):
    """Solve ``S + half_dt * O(h(S)) = rhs`` for ``S`` (vectorized).

    The left side is strictly increasing in ``S``; with no outflow below the
    spillway the root is ``rhs`` itself there. Above it Newton's method runs
    inside a shrinking bracket, falling back to bisection when a step leaves it.
    """
    s_spill = float(dam.storage(dam.spillway_level))
    out = np.array(rhs, dtype=float, copy=True)
    act = rhs > s_spill
    if not np.any(act):
        return out
    r = rhs[act]
    hd = half_dt[act] if np.ndim(half_dt) else half_dt
    lo = np.full(r.shape, s_spill)
    hi = r.copy()
    x = hi.copy()
    rating = dam.spillway_coeff * dam.spillway_width
    for _ in range(max_iter):
        lev = dam.level(x)
        g = x + hd * dam.outflow(lev) - r
        lo = np.where(g < 0, x, lo)
        hi = np.where(g > 0, x, hi)
        # storage curve is piecewise linear: dh/dS from a one-cubic-metre chord
        dh_ds = dam.level(x + 1.0) - lev
        head = np.maximum(lev - dam.spillway_level, 0.0)
        slope = 1.0 + hd * 1.5 * rating * np.sqrt(head) * dh_ds
        nxt = x - g / slope
        bad = ~((nxt > lo) & (nxt < hi))
        nxt = np.where(bad, 0.5 * (lo + hi), nxt)
        done = np.abs(nxt - x) <= tol * np.maximum(1.0, np.abs(r))
        x = nxt
        if np.all(done):
            break
    out[act] = x
    return out


def route(inflow, level0, dam: DamSpec, t_end, steps: int, record: bool = False, t_knot=None):
    """Level-pool routing by the storage-indication (trapezoidal) method.

    Each fixed step solves
    ``S1 + dt/2 O1 = S0 + dt/2 (I0 + I1) - dt/2 O0``,
    which is stable for any step and closes the water budget exactly:
    cumulative inflow minus cumulative outflow equals the storage change.

    ``inflow(t)`` maps an array of times (hours, one per event) to m^3/s.
    ``level0``, ``t_end`` and ``t_knot`` may be arrays to route many events
    at once. When ``t_knot`` is given (the hydrograph peak) the step count is
    split between ``[0, t_knot]`` and ``[t_knot, t_end]`` so the kink is a
    grid node and the inflow volume is integrated exactly.
    Returns the maximum level per event, plus a ``RoutingTrace`` when
    ``record`` is set.
    """
    dam.validate()
    level0 = np.atleast_1d(np.asarray(level0, dtype=float))
    t_end = np.broadcast_to(np.asarray(t_end, dtype=float), level0.shape)
    if t_knot is None:
        t_knot, k = t_end, steps
    else:
        t_knot = np.broadcast_to(np.asarray(t_knot, dtype=float), level0.shape)
        k = min(max(int(round(steps * float(np.mean(t_knot / t_end)))), 1), steps - 1)
    dt_a = t_knot / k
    dt_b = (t_end - t_knot) / max(steps - k, 1)
    s = dam.storage(level0)
    h = level0.copy()
    hmax = h.copy()
    vin = np.zeros_like(s)
    vout = np.zeros_like(s)
    t = np.zeros_like(s)
    i0 = inflow(t)
    o0 = dam.outflow(h)
    trace = [(t.copy(), h.copy(), vin.copy(), vout.copy(), s.copy())] if record else None
    for step in range(steps):
        dt = dt_a if step < k else dt_b
        half = 0.5 * dt * SECONDS_PER_HOUR
        t = t_knot if step == k - 1 else (t_end if step == steps - 1 else t + dt)
        i1 = inflow(t)
        rhs = s + half * (i0 + i1) - half * o0
        s_new = _solve_storage(rhs, half, dam)
        h = dam.level(s_new)
        o1 = dam.outflow(h)
        vin = vin + half * (i0 + i1)
        vout = vout + half * (o0 + o1)
        s, i0, o0 = s_new, i1, o1
        hmax = np.maximum(hmax, h)
        if record:
            trace.append((t.copy(), h.copy(), vin.copy(), vout.copy(), s.copy()))
    if not record:
        return hmax
    cols = [np.array(c) for c in zip(*trace)]
    return hmax, RoutingTrace(*cols)


def route_events(peak, volume, level0, dam: DamSpec = DEFAULT_DAM, steps_per_rise: int = 50):
    """Maximum reservoir level for each (Q, V, L) event, vectorized over events.

    The step is ``T_p / steps_per_rise`` hours, rounded so the run ends
    exactly at ``T_b``; after ``T_b`` inflow is zero and the level can only
    fall. Events with a non-positive peak or volume carry no inflow and keep
    their initial level.
    """
    if steps_per_rise < 10:
        raise ResolutionTooCoarse("need at least 10 steps over the rising limb (dt <= T_p/10)")
    peak, volume, level0 = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (peak, volume, level0)))
    if not (np.all(np.isfinite(peak)) and np.all(np.isfinite(volume))):
        raise SpecInvalid("peaks and volumes must be finite")
    # GEV margins with a negative lower endpoint can draw Q <= 0 or V <= 0: no flood that year
    flood = (peak > 0) & (volume > 0)
    hmax = level0.copy()
    if np.any(flood):
        q, v = peak[flood], volume[flood]
        tb = 2.0 * v * 1e6 / q / SECONDS_PER_HOUR
        tp = tb / RISE_FACTOR
        steps = math.ceil(RISE_FACTOR * steps_per_rise)
        hmax[flood] = route(lambda t: triangular_inflow(t, q, tp, tb), level0[flood], dam, tb, steps, t_knot=tp)
    return hmax


def route_event(peak: float, volume: float, level0: float, dam: DamSpec = DEFAULT_DAM,
                dt: float | None = None) -> RoutingOutcome:
    """Route one event. ``dt`` (hours) is the largest step allowed; it defaults
    to ``T_p / 50`` and must not exceed ``T_p / 10``."""
    hyd = Hydrograph.triangular(peak, volume)
    if dt is None:
        steps_per_rise = 50
    else:
        if dt <= 0 or dt > hyd.rise_time / 10.0:
            raise ResolutionTooCoarse(f"dt={dt} h exceeds T_p/10 = {hyd.rise_time / 10.0} h")
        steps_per_rise = math.ceil(hyd.rise_time / dt)
    steps = math.ceil(hyd.base_time / hyd.rise_time * steps_per_rise)
    hmax = route(hyd.inflow, np.array([level0]), dam, hyd.base_time, steps, t_knot=hyd.rise_time)[0]
    return RoutingOutcome(max_level=float(hmax), event_class=EventClass(int(dam.classify(hmax))))


# ---- evaluation --------------------------------------------------------------

@dataclass(frozen=True)
class EvaluationReport:
    false_positive_ratio: float | None
    true_positive_ratio: float | None
    extremes_detection_ratio: float
    true_extremes_ratio: float
    detected: int
    critical: int
    m: int


def evaluate_detection(detected, critical) -> EvaluationReport:
    """Score detections (``DetectionResult`` or boolean mask) against true critical events.

    False positive ratio = wrong detections / detections (None when nothing
    is detected); true positive ratio = caught critical / critical (None when
    nothing is critical); detection and true-extremes ratios are over all m.
    """
    pos = detected.positives if isinstance(detected, DetectionResult) else np.asarray(detected, dtype=bool)
    crit = np.asarray(critical)
    if crit.dtype != bool:
        crit = crit != EventClass.REGULAR
    if pos.shape != crit.shape:
        raise LengthMismatch(f"{pos.size} detections vs {crit.size} routing outcomes")
    m = pos.size
    n_pos = int(pos.sum())
    n_crit = int(crit.sum())
    hits = int((pos & crit).sum())
    return EvaluationReport(
        false_positive_ratio=None if n_pos == 0 else (n_pos - hits) / n_pos,
        true_positive_ratio=None if n_crit == 0 else hits / n_crit,
        extremes_detection_ratio=n_pos / m,
        true_extremes_ratio=n_crit / m,
        detected=n_pos,
        critical=n_crit,
        m=m,
    )


# ---- experiment --------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentConfig:
    replicas: int = 100
    years: int = 1000
    alpha: float = 0.01
    seed: int = 0
    mode: Mode = Mode.SURVIVAL
    slack_h: float | None = None
    steps_per_rise: int = 50
    dam: DamSpec = field(default_factory=DamSpec)


@dataclass
class ReplicaResult:
    index: int
    events: np.ndarray  # (years, 3)
    max_level: np.ndarray
    event_class: np.ndarray
    pca_direction: np.ndarray
    classical: DetectionResult
    pca: DetectionResult
    report_classical: EvaluationReport
    report_pca: EvaluationReport


def replica_seed(base_seed: int, index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(base_seed), int(index)])


def simulate_floods(years: int, seed, model: JointModel | None = None) -> np.ndarray:
    """One (Q, V, L) event per year from the flood joint model."""
    if years < 1:
        raise ValueError("years must be >= 1")
    model = flood_model() if model is None else model
    return model.sample(years, np.random.default_rng(seed))


def run_replica(cfg: ExperimentConfig, index: int) -> ReplicaResult:
    events = simulate_floods(cfg.years, replica_seed(cfg.seed, index))
    hmax = route_events(events[:, 0], events[:, 1], events[:, 2], cfg.dam, cfg.steps_per_rise)
    cls = cfg.dam.classify(hmax)
    e = canonical_diagonal(events.shape[1])
    u_pca = directions.first_pca_direction(events)
    det_e = detect(events, DetectionConfig(cfg.alpha, e, cfg.slack_h, cfg.mode))
    det_p = detect(events, DetectionConfig(cfg.alpha, u_pca, cfg.slack_h, cfg.mode))
    return ReplicaResult(
        index=index, events=events, max_level=hmax, event_class=cls, pca_direction=u_pca,
        classical=det_e, pca=det_p,
        report_classical=evaluate_detection(det_e, cls),
        report_pca=evaluate_detection(det_p, cls),
    )


def _mean(values) -> float | None:
    vals = [v for v in values if v is not None]
    return float(np.mean(vals)) if vals else None


def aggregate(results: list[ReplicaResult], cfg: ExperimentConfig) -> dict:
    """Mean ratios per direction plus the per-replica classical-vs-PCA comparison."""
    out = {"schema_version": 1, "config": {
        "replicas": cfg.replicas, "years": cfg.years, "alpha": cfg.alpha, "seed": cfg.seed,
        "mode": Mode(cfg.mode).value, "slack_h": cfg.slack_h, "steps_per_rise": cfg.steps_per_rise,
        "dam": asdict(cfg.dam)}}
    for key, attr in (("classical", "report_classical"), ("pca", "report_pca")):
        reps = [getattr(r, attr) for r in results]
        out[key] = {
            "false_positive_ratio": _mean(r.false_positive_ratio for r in reps),
            "true_positive_ratio": _mean(r.true_positive_ratio for r in reps),
            "extremes_detection_ratio": _mean(r.extremes_detection_ratio for r in reps),
            "true_extremes_ratio": _mean(r.true_extremes_ratio for r in reps),
        }
    fpr_better = [
        r.report_pca.false_positive_ratio is not None and r.report_classical.false_positive_ratio is not None
        and r.report_pca.false_positive_ratio < r.report_classical.false_positive_ratio
        for r in results
    ]
    det_more = [r.report_classical.extremes_detection_ratio > r.report_pca.extremes_detection_ratio
                for r in results]
    out["comparison"] = {
        "share_fpr_pca_below_classical": float(np.mean(fpr_better)),
        "share_detection_classical_above_pca": float(np.mean(det_more)),
    }
    out["replicas"] = [
        {"index": r.index, "pca_direction": r.pca_direction.tolist(),
         "classical": asdict(r.report_classical), "pca": asdict(r.report_pca)}
        for r in results
    ]
    return out


def run_experiment(cfg: ExperimentConfig, workers: int = 1) -> tuple[list[ReplicaResult], dict]:
    """Run all replicas; each replica's seed depends only on (seed, index)."""
    if cfg.replicas < 1:
        raise ValueError("replicas must be >= 1")
    idx = range(cfg.replicas)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_replica, [cfg] * cfg.replicas, idx))
    else:
        results = [run_replica(cfg, i) for i in idx]
    return results, aggregate(results, cfg)
