"""Command-line entry point: ``dirext {detect,simulate,flood,pca,levelsets}``.

Failures exit with status 2 and print ``{"error": {"code", "message"}}`` on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import directions, io
from .copulas import Copula, copula_level_sets
from .detector import DetectionConfig, Label, Mode, detect
from .errors import ConfigInvalid, DirextError
from .floodcase import DamSpec, EventClass, ExperimentConfig, run_experiment
from .geometry import canonical_diagonal


@dataclass(frozen=True)
class RunConfig:
    mode: Mode
    alpha: float
    direction: str
    input: Path
    output: Path
    slack_h: float | None = None
    seed: int = 0

    def validate(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise ConfigInvalid(f"--alpha must lie in (0, 1), got {self.alpha}")
        if self.slack_h is not None and not self.slack_h >= 0.0:
            raise ConfigInvalid(f"--slack must be >= 0, got {self.slack_h}")


def resolve_direction(spec: str, sample: np.ndarray, standardize: bool = False) -> tuple[np.ndarray, str]:
    if spec.strip().lower() == "pca":
        return directions.first_pca_direction(sample, standardize=standardize), "pca"
    u = directions.parse_direction(spec, sample.shape[1])
    return u, spec.strip()


def _summary_path(output: Path) -> Path:
    return output.with_name(output.stem + ".summary.json")


def cmd_detect(args) -> None:
    cfg = RunConfig(mode=Mode(args.mode), alpha=args.alpha, direction=args.direction,
                    input=Path(args.input), output=Path(args.output), slack_h=args.slack, seed=args.seed)
    cfg.validate()
    sample = io.load_csv(cfg.input)
    u, name = resolve_direction(cfg.direction, sample.data)
    res = detect(sample.data, DetectionConfig(cfg.alpha, u, cfg.slack_h, cfg.mode))
    rows = [list(x) + [float(p), str(Label(int(lab)))]
            for x, p, lab in zip(sample.data.tolist(), res.probabilities, res.labels)]
    io.write_csv(cfg.output, list(sample.columns) + ["P", "label"], rows)
    summary = {
        "schema_version": io.SCHEMA_VERSION,
        "m": res.m,
        "n": sample.n,
        "alpha": cfg.alpha,
        "slack_h": res.slack_h,
        "mode": cfg.mode.value,
        "direction_spec": name,
        "direction": [float(c) for c in u],
        "counts": res.summary(),
    }
    io.dump_json(args.summary or _summary_path(cfg.output), summary)


def cmd_simulate(args) -> None:
    model = io.load_model(args.config) if args.config else io.model_from_dict(io.flood_model_config())
    if args.rows < 1:
        raise ConfigInvalid("--rows must be >= 1")
    data = model.sample(args.rows, np.random.default_rng(args.seed))
    names = model.names or tuple(f"X{i + 1}" for i in range(model.n))
    io.write_csv(args.output, list(names), data.tolist())


def cmd_pca(args) -> None:
    sample = io.load_csv(args.input)
    u = directions.first_pca_direction(sample.data, standardize=args.standardize)
    e = canonical_diagonal(sample.n)
    out = {
        "schema_version": io.SCHEMA_VERSION,
        "columns": list(sample.columns),
        "direction": [float(c) for c in u],
        "dot_e": float(u @ e),
        "standardized": bool(args.standardize),
    }
    text = json.dumps(out, indent=2, sort_keys=True) + "\n"
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_levelsets(args) -> None:
    c = Copula(args.family, args.param, args.orientation)
    grid = copula_level_sets(c, args.alpha, args.grid)
    rows = [[float(a), float(b), float(v), str(Label(int(lab)))]
            for a, b, v, lab in zip(grid.v1.ravel(), grid.v2.ravel(), grid.values.ravel(), grid.labels.ravel())]
    io.write_csv(args.output, ["v1", "v2", "C", "label"], rows)


def cmd_flood(args) -> None:
    dam = io.load_dam(args.dam) if args.dam else DamSpec()
    cfg = ExperimentConfig(replicas=args.replicas, years=args.years, alpha=args.alpha, seed=args.seed,
                           mode=Mode(args.mode), slack_h=args.slack, dam=dam)
    results, report = run_experiment(cfg, workers=args.workers)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    cols = ["Q", "V", "L", "P_e", "P_pca", "label_e", "label_pca", "max_level", "class"]
    for r in results:
        rows = []
        for i in range(cfg.years):
            q, v, lv = r.events[i].tolist()
            rows.append([q, v, lv, float(r.classical.probabilities[i]), float(r.pca.probabilities[i]),
                         str(Label(int(r.classical.labels[i]))), str(Label(int(r.pca.labels[i]))),
                         float(r.max_level[i]), str(EventClass(int(r.event_class[i])))])
        io.write_csv(out / f"replica_{r.index:04d}.csv", cols, rows)
    io.dump_json(out / "report.json", report)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dirext", description="Directional multivariate extremes.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, need_input=True):
        if need_input:
            sp.add_argument("--input", required=True, help="CSV with a header row")
        sp.add_argument("--output", required=True)
        sp.add_argument("--seed", type=int, default=0)

    d = sub.add_parser("detect", help="label each row Upper / Quantile / Lower")
    common(d)
    d.add_argument("--alpha", type=float, required=True)
    d.add_argument("--direction", default="e",
                   help="'e', '-e', a sign pattern like '+-+', a comma vector, or 'pca'")
    d.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.SURVIVAL.value)
    d.add_argument("--slack", type=float, default=None, help="slack h (default 1/(2m))")
    d.add_argument("--summary", default=None, help="summary JSON path (default <output>.summary.json)")
    d.set_defaults(func=cmd_detect)

    s = sub.add_parser("simulate", help="sample a joint model to CSV")
    common(s, need_input=False)
    s.add_argument("--config", default=None, help="model JSON (default: the dam flood model)")
    s.add_argument("--rows", type=int, default=1000)
    s.set_defaults(func=cmd_simulate)

    f = sub.add_parser("flood", help="dam flood Monte Carlo experiment")
    f.add_argument("--output", required=True, help="output directory")
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--replicas", type=int, default=100)
    f.add_argument("--years", type=int, default=1000)
    f.add_argument("--alpha", type=float, default=0.01)
    f.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.SURVIVAL.value)
    f.add_argument("--slack", type=float, default=None)
    f.add_argument("--dam", default=None, help="dam JSON (default: built-in calibration)")
    f.add_argument("--workers", type=int, default=1)
    f.set_defaults(func=cmd_flood)

    c = sub.add_parser("pca", help="first principal component direction as JSON")
    c.add_argument("--input", required=True)
    c.add_argument("--output", default=None)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--standardize", action="store_true", help="use the correlation matrix")
    c.set_defaults(func=cmd_pca)

    lv = sub.add_parser("levelsets", help="classify a unit-square lattice by a copula level")
    lv.add_argument("--output", required=True)
    lv.add_argument("--seed", type=int, default=0)
    lv.add_argument("--family", choices=["gaussian", "frank", "gumbel", "independence"], required=True)
    lv.add_argument("--param", type=float, default=0.0)
    lv.add_argument("--orientation", choices=["plain", "survival", "rot90", "rot270"], default="survival")
    lv.add_argument("--alpha", type=float, required=True)
    lv.add_argument("--grid", type=int, default=200)
    lv.set_defaults(func=cmd_levelsets)
    return p


def error_payload(exc: BaseException) -> dict:
    code = getattr(exc, "code", None) or ("IO_ERROR" if isinstance(exc, OSError) else "INVALID_ARGUMENT")
    return {"error": {"code": code, "message": str(exc)}}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (DirextError, ValueError, OSError) as exc:
        sys.stderr.write(json.dumps(error_payload(exc)) + "\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
