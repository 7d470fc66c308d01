"""CSV samples and JSON configs.

CSV files are RFC 4180 with a header row and numeric cells; numbers are
written in shortest round-trip form so a write/read cycle is bitwise exact.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .copulas import Copula, JointModel, PairLeaf, ProductNest
from .errors import NonFiniteValue, ParseError, TreeInvalid
from .floodcase import DamSpec, flood_model
from .margins import GaussianParams, GevParams, UniformMargin

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Sample:
    data: np.ndarray
    columns: tuple[str, ...]

    def __post_init__(self):
        arr = np.array(self.data, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)
        if arr.ndim != 2 or arr.shape[1] != len(self.columns):
            raise ParseError(f"{arr.shape} data does not match {len(self.columns)} column names")

    @property
    def m(self) -> int:
        return self.data.shape[0]

    @property
    def n(self) -> int:
        return self.data.shape[1]


def fmt(x: float) -> str:
    return repr(float(x))


def load_csv(path) -> Sample:
    """Read a numeric CSV with a header. Errors name the line and column."""
    path = Path(path)
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file, header row required") from None
        header = [h.strip() for h in header]
        if not header or any(h == "" for h in header):
            raise ParseError(f"{path}:1: blank column name in header")
        rows = []
        for row in reader:
            line = reader.line_num
            if not row or all(c.strip() == "" for c in row):
                continue
            if len(row) != len(header):
                raise ParseError(f"{path}:{line}: expected {len(header)} fields, found {len(row)}")
            vals = []
            for j, cell in enumerate(row):
                try:
                    v = float(cell)
                except ValueError:
                    raise ParseError(f"{path}:{line}: column {j + 1} ({header[j]}): not a number: {cell!r}") from None
                if not math.isfinite(v):
                    raise NonFiniteValue(f"{path}:{line}: column {j + 1} ({header[j]}): non-finite value {cell!r}")
                vals.append(v)
            rows.append(vals)
    if not rows:
        raise ParseError(f"{path}: no data rows")
    return Sample(np.array(rows), tuple(header))


def write_csv(path, columns, rows) -> None:
    """Write rows of numbers/strings; floats get full round-trip precision."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(columns))
        for row in rows:
            w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])


def write_sample(path, sample: Sample) -> None:
    write_csv(path, sample.columns, sample.data.tolist())


def dump_json(path, obj) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True, allow_nan=False)
    Path(path).write_text(text + "\n", encoding="utf-8")


def _check_version(cfg: dict, what: str) -> None:
    v = cfg.get("schema_version", SCHEMA_VERSION)
    if v != SCHEMA_VERSION:
        raise ParseError(f"{what}: unsupported schema_version {v!r} (expected {SCHEMA_VERSION})")


# ---- joint model configs ----------------------------------------------------

def marginal_from_dict(d: dict):
    kind = d.get("type", "").lower()
    if kind == "gev":
        return GevParams(loc=float(d["loc"]), scale=float(d["scale"]), shape=float(d["shape"]))
    if kind == "gaussian":
        return GaussianParams(mean=float(d["mean"]), var=float(d["var"]))
    if kind == "uniform":
        return UniformMargin()
    raise ParseError(f"unknown marginal type {kind!r}")


def marginal_to_dict(m) -> dict:
    if isinstance(m, GevParams):
        return {"type": "gev", **asdict(m)}
    if isinstance(m, GaussianParams):
        return {"type": "gaussian", **asdict(m)}
    return {"type": "uniform"}


def tree_from_dict(d: dict):
    if "pair" in d:
        p = d["pair"]
        cop = Copula(p["family"], float(p.get("param", 0.0)), p.get("orientation", "plain"))
        coords = tuple(int(c) for c in p["coords"])
        if len(coords) != 2:
            raise TreeInvalid("a pair leaf needs exactly two coordinates")
        return PairLeaf(cop, coords)
    if "product" in d:
        p = d["product"]
        return ProductNest(tree_from_dict(p["child"]), int(p["coord"]))
    raise TreeInvalid(f"tree node needs 'pair' or 'product', got keys {sorted(d)}")


def tree_to_dict(t) -> dict:
    if isinstance(t, PairLeaf):
        c = t.copula
        return {"pair": {"family": c.family.value, "param": float(c.param),
                         "orientation": c.orientation.value, "coords": list(t.coords)}}
    return {"product": {"child": tree_to_dict(t.child), "coord": t.coord}}


def model_from_dict(cfg: dict) -> JointModel:
    _check_version(cfg, "model config")
    try:
        margs = tuple(marginal_from_dict(d) for d in cfg["marginals"])
        names = tuple(d.get("name", f"X{i + 1}") for i, d in enumerate(cfg["marginals"]))
        tree = tree_from_dict(cfg["tree"])
    except KeyError as exc:
        raise ParseError(f"model config is missing key {exc}") from None
    return JointModel(margs, tree, survival=bool(cfg.get("survival", False)), names=names)


def model_to_dict(model: JointModel) -> dict:
    names = model.names or tuple(f"X{i + 1}" for i in range(model.n))
    return {
        "schema_version": SCHEMA_VERSION,
        "marginals": [{"name": nm, **marginal_to_dict(m)} for nm, m in zip(names, model.marginals)],
        "tree": tree_to_dict(model.tree),
        "survival": model.survival,
    }


def load_model(path) -> JointModel:
    return model_from_dict(_read_json(path))


def flood_model_config() -> dict:
    return model_to_dict(flood_model())


# ---- dam configs ------------------------------------------------------------

def dam_from_dict(cfg: dict) -> DamSpec:
    _check_version(cfg, "dam config")
    fields = {k: v for k, v in cfg.items() if k != "schema_version"}
    for key in ("storage_levels", "storage_volumes"):
        if key in fields:
            fields[key] = tuple(float(x) for x in fields[key])
    try:
        dam = DamSpec(**fields)
    except TypeError as exc:
        raise ParseError(f"dam config: {exc}") from None
    dam.validate()
    return dam


def dam_to_dict(dam: DamSpec) -> dict:
    d = asdict(dam)
    d["storage_levels"] = list(d["storage_levels"])
    d["storage_volumes"] = list(d["storage_volumes"])
    return {"schema_version": SCHEMA_VERSION, **d}


def load_dam(path) -> DamSpec:
    return dam_from_dict(_read_json(path))


def _read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from None
