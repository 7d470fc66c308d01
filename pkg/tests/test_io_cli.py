import json

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from dirext import cli, io
from dirext.copulas import Copula, Family, JointModel, Orientation, PairLeaf, ProductNest
from dirext.directions import first_pca_direction
from dirext.errors import NonFiniteValue, ParseError
from dirext.floodcase import DEFAULT_DAM, flood_model
from dirext.margins import GaussianParams, GevParams


def run(argv, capsys):
    code = cli.main([str(a) for a in argv])
    return code, capsys.readouterr()


def test_load_small(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text("a,b\n1,2\n3,4.5\n-1e3,0\n")
    s = io.load_csv(p)
    assert s.data.shape == (3, 2) and s.columns == ("a", "b")
    assert s.data[2, 0] == -1000.0
    with pytest.raises(ValueError):
        s.data[0, 0] = 9.0


@pytest.mark.parametrize("text,err,where", [
    ("a,b\n1,2\n3,NaN\n", NonFiniteValue, r":3: column 2"),
    ("a,b\n1,inf\n", NonFiniteValue, r":2: column 2"),
    ("a,b\n1,x\n", ParseError, r":2: column 2"),
    ("a,b\n1\n", ParseError, r":2: expected 2 fields"),
    ("a,b\n", ParseError, "no data rows"),
    ("", ParseError, "header"),
])
def test_load_errors(tmp_path, text, err, where):
    p = tmp_path / "bad.csv"
    p.write_text(text)
    with pytest.raises(err, match=where):
        io.load_csv(p)


@settings(suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(st.lists(st.lists(st.floats(allow_nan=False, allow_infinity=False), min_size=3, max_size=3),
                min_size=1, max_size=30))
def test_roundtrip_bitwise(tmp_path, rows):
    s = io.Sample(np.array(rows), ("x", "y", "z"))
    p = tmp_path / "rt.csv"
    io.write_sample(p, s)
    back = io.load_csv(p)
    assert back.columns == s.columns
    assert back.data.tobytes() == s.data.tobytes() or np.array_equal(back.data, s.data)
    assert np.array_equal(np.signbit(back.data), np.signbit(s.data))


def test_model_json_roundtrip(tmp_path):
    model = JointModel(
        (GevParams(1.0, 2.0, 0.1), GaussianParams(0.0, 4.0), GevParams(0.0, 1.0, 0.0)),
        ProductNest(PairLeaf(Copula(Family.FRANK, -3.0, Orientation.ROT90), (0, 2)), 1),
        survival=True, names=("a", "b", "c"))
    d = io.model_to_dict(model)
    assert d["schema_version"] == io.SCHEMA_VERSION
    p = tmp_path / "m.json"
    io.dump_json(p, d)
    assert io.load_model(p) == model
    assert io.model_from_dict(io.flood_model_config()) == flood_model()
    with pytest.raises(ParseError):
        io.model_from_dict({**d, "schema_version": 99})
    dam = io.dam_from_dict(io.dam_to_dict(DEFAULT_DAM))
    assert dam == DEFAULT_DAM


def test_sea_storm_shape(tmp_path):
    """415 five-variable storms: detection runs in both e and the PCA direction."""
    r = np.random.default_rng(415)
    z = r.multivariate_normal(np.zeros(5), 0.5 * np.eye(5) + 0.5, size=415)
    data = np.column_stack([2 + np.exp(0.3 * z[:, 0]), 40 * np.exp(0.5 * z[:, 1]), 90 * np.exp(0.6 * z[:, 2]),
                            180 + 40 * z[:, 3], 300 * np.exp(0.8 * z[:, 4])])
    p = tmp_path / "storms.csv"
    io.write_sample(p, io.Sample(data, ("H", "D", "M", "O", "I")))
    s = io.load_csv(p)
    assert s.data.shape == (415, 5)
    from dirext.detector import DetectionConfig, detect
    from dirext.geometry import canonical_diagonal

    for u in (canonical_diagonal(5), first_pca_direction(s.data)):
        res = detect(s.data, DetectionConfig(0.05, u))
        assert res.m == 415 and len(res.upper) > 0


def _gaussian_csv(path, seed=7, m=1000):
    r = np.random.default_rng(seed)
    x = r.multivariate_normal([25, 25], [[4, 0.3], [0.3, 1]], size=m)
    io.write_sample(path, io.Sample(x, ("x1", "x2")))
    return x


def test_cli_detect(tmp_path, capsys):
    src = tmp_path / "g.csv"
    x = _gaussian_csv(src)
    out = tmp_path / "lab.csv"
    code, _ = run(["detect", "--input", src, "--output", out, "--alpha", 0.05, "--direction", "e"], capsys)
    assert code == 0
    summary = json.loads((tmp_path / "lab.summary.json").read_text())
    c = summary["counts"]
    assert sum(c.values()) == 1000 and all(v > 0 for v in c.values())
    # oracle: exact Gaussian orthant probabilities put about a fifth of the cloud below 5%
    from dirext.copulas import gaussian_directional_probability
    from dirext.geometry import canonical_diagonal
    from dirext.margins import GaussianParams

    exact = gaussian_directional_probability(GaussianParams(25, 4), GaussianParams(25, 1), 0.15,
                                             canonical_diagonal(2), x)
    assert abs(c["Upper"] - np.sum(exact < 0.05)) <= 3 * np.sqrt(1000 * 0.2)
    assert c["Upper"] < 1000 / 4
    assert summary["slack_h"] == 1 / 2000 and summary["alpha"] == 0.05
    lines = out.read_text().splitlines()
    assert lines[0] == "x1,x2,P,label" and len(lines) == 1001
    assert float(lines[1].split(",")[0]) == x[0, 0]


@pytest.mark.parametrize("direction", ["pca", "-+", "-1,1", "-e"])
def test_cli_detect_directions(tmp_path, capsys, direction):
    src = tmp_path / "g.csv"
    _gaussian_csv(src, m=200)
    out = tmp_path / "o.csv"
    code, _ = run(["detect", "--input", src, "--output", out, "--alpha", 0.1, f"--direction={direction}",
                   "--mode", "distribution", "--slack", 0.0, "--summary", tmp_path / "s.json"], capsys)
    assert code == 0
    s = json.loads((tmp_path / "s.json").read_text())
    assert s["mode"] == "distribution" and s["slack_h"] == 0.0
    assert abs(np.linalg.norm(s["direction"]) - 1) < 1e-12


def test_cli_pca(tmp_path, capsys):
    src = tmp_path / "g.csv"
    x = _gaussian_csv(src)
    code, cap = run(["pca", "--input", src], capsys)
    assert code == 0
    d = json.loads(cap.out)
    assert d["dot_e"] > 0
    np.testing.assert_allclose(d["direction"], first_pca_direction(x), atol=1e-15)


def test_cli_simulate(tmp_path, capsys):
    out = tmp_path / "sim.csv"
    code, _ = run(["simulate", "--output", out, "--rows", 1000, "--seed", 1], capsys)
    assert code == 0
    s = io.load_csv(out)
    assert s.columns == ("Q", "V", "L") and s.data.shape == (1000, 3)
    cfg = tmp_path / "model.json"
    io.dump_json(cfg, io.model_to_dict(JointModel((GaussianParams(0, 1),) * 2,
                                                  PairLeaf(Copula(Family.GAUSSIAN, 0.5), (0, 1)))))
    code, _ = run(["simulate", "--config", cfg, "--output", out, "--rows", 10], capsys)
    assert code == 0 and io.load_csv(out).columns == ("X1", "X2")


def test_cli_levelsets(tmp_path, capsys):
    out = tmp_path / "ls.csv"
    code, _ = run(["levelsets", "--output", out, "--family", "gaussian", "--param", 0.2, "--alpha", 0.01,
                   "--grid", 100], capsys)
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "v1,v2,C,label" and len(lines) == 100 * 100 + 1


def test_cli_flood(tmp_path, capsys):
    out = tmp_path / "flood"
    code, _ = run(["flood", "--output", out, "--replicas", 2, "--years", 150, "--seed", 3], capsys)
    assert code == 0
    rep = json.loads((out / "report.json").read_text())
    assert rep["config"]["replicas"] == 2
    head = (out / "replica_0001.csv").read_text().splitlines()
    assert head[0] == "Q,V,L,P_e,P_pca,label_e,label_pca,max_level,class" and len(head) == 151


@pytest.mark.parametrize("argv,code_name", [
    (["detect", "--input", "missing.csv", "--output", "o.csv", "--alpha", "0.1"], "PARSE_ERROR"),
    (["detect", "--input", "{src}", "--output", "o.csv", "--alpha", "1.5"], "CONFIG_INVALID"),
    (["detect", "--input", "{src}", "--output", "o.csv", "--alpha", "0.1", "--direction=1,0"], "ZERO_COMPONENT"),
    (["detect", "--input", "{src}", "--output", "o.csv", "--alpha", "0.1", "--direction=+-+"], "DIMENSION_MISMATCH"),
    (["flood", "--output", "f", "--replicas", "0"], "INVALID_ARGUMENT"),
])
def test_cli_errors(tmp_path, capsys, monkeypatch, argv, code_name):
    monkeypatch.chdir(tmp_path)
    _gaussian_csv(tmp_path / "g.csv", m=20)
    argv = [a.replace("{src}", "g.csv") for a in argv]
    code, cap = run(argv, capsys)
    assert code != 0
    err = json.loads(cap.err)["error"]
    assert err["code"] == code_name and err["message"]


def _tree_bytes(root):
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def test_cli_determinism(tmp_path, capsys):
    src = tmp_path / "g.csv"
    _gaussian_csv(src, m=300)
    outs = []
    for k in range(2):
        d = tmp_path / f"run{k}"
        d.mkdir()
        for argv in (["detect", "--input", src, "--output", d / "lab.csv", "--alpha", 0.05, "--direction", "pca"],
                     ["simulate", "--output", d / "sim.csv", "--rows", 200, "--seed", 9],
                     ["pca", "--input", src, "--output", d / "pca.json"],
                     ["levelsets", "--output", d / "ls.csv", "--family", "frank", "--param", -8, "--alpha", 0.2],
                     ["flood", "--output", d / "flood", "--replicas", 2, "--years", 100, "--seed", 4]):
            assert run(argv, capsys)[0] == 0
        outs.append(_tree_bytes(d))
    assert outs[0] == outs[1] and len(outs[0]) == 8
