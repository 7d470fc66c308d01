"""Acceptance criteria as plain functions returning ``(passed, detail)``.

Used by ``test_acceptance.py`` and runnable directly:
``python tests/acceptance_checks.py``.
"""

from __future__ import annotations

import subprocess
import sys
import tempfile
import time
from pathlib import Path

import mpmath
import numpy as np
from scipy import stats

from dirext import cli
from dirext.copulas import Copula, Family, Orientation, gaussian_covariance, rotated_gaussian_params
from dirext.detector import DetectionConfig, Mode, containment_check, detect, naive_orthant_counts, orthant_counts
from dirext.floodcase import L_MARGIN, Q_MARGIN, QV_THETA, V_MARGIN, ExperimentConfig, run_experiment
from dirext.geometry import build_rotation, canonical_diagonal, rotate_sample
from dirext.margins import GaussianParams, GevParams


def _direction(rng, n):
    u = rng.standard_normal(n)
    return u / np.linalg.norm(u)


def check_rotation():
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    worst_orth = worst_map = worst_id = 0.0
    for n in (2, 3, 5):
        e = canonical_diagonal(n)
        worst_id = max(worst_id, np.max(np.abs(build_rotation(e) - np.eye(n))))
        for _ in range(1000):
            u = _direction(rng, n)
            r = build_rotation(u)
            worst_orth = max(worst_orth, np.max(np.abs(r @ r.T - np.eye(n))))
            worst_map = max(worst_map, np.max(np.abs(r @ u - e)))
    dt = time.perf_counter() - t0
    ok = worst_orth <= 1e-10 and worst_map <= 1e-10 and worst_id <= 1e-12 and dt < 5
    return ok, f"max|RR'-I|={worst_orth:.1e} max|Ru-e|={worst_map:.1e} max|R_e-I|={worst_id:.1e} ({dt:.2f}s)"


def check_rotation_equivalence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    mismatched = 0
    for k in range(50):
        n = (2, 3, 5)[k % 3]
        s = rng.multivariate_normal(np.zeros(n), np.cov(rng.normal(size=(n, 2 * n))), size=1000)
        u = _direction(rng, n)
        alpha = float(rng.choice([0.01, 0.05, 0.1]))
        a = detect(s, DetectionConfig(alpha, u))
        b = detect(rotate_sample(s, u), DetectionConfig(alpha, canonical_diagonal(n)))
        mismatched += not np.array_equal(a.labels, b.labels)
    dt = time.perf_counter() - t0
    return mismatched == 0 and dt < 30, f"{mismatched}/50 pairs differ ({dt:.2f}s)"


def check_containment():
    rng = np.random.default_rng(3)
    bad = 0
    for k in range(100):
        n = (2, 3, 5)[k % 3]
        s = rng.standard_t(4, size=(int(rng.integers(50, 600)), n))
        for _ in range(10):
            bad += len(containment_check(s, _direction(rng, n), float(rng.uniform(0.005, 0.3))).violations)
    return bad == 0, f"{bad} violations over 100 samples x 10 directions"


def check_dominance():
    t0 = time.perf_counter()
    rng = np.random.default_rng(4)
    sizes = np.round(np.geomspace(2, 5000, 200)).astype(int).tolist()
    diff = 0
    for m in sizes:
        n = int(rng.integers(2, 6))
        s = rng.normal(size=(m, n))
        u = _direction(rng, n)
        diff += not np.array_equal(orthant_counts(s, u), naive_orthant_counts(s, u))
    dt = time.perf_counter() - t0
    return diff == 0, f"{diff}/{len(sizes)} inputs differ, m up to {max(sizes)} ({dt:.1f}s)"


def _frank_tau(theta):
    d1 = mpmath.quad(lambda t: t / mpmath.expm1(t), [0, abs(theta)]) / abs(theta)
    if theta < 0:
        d1 += abs(theta) / 2
    return float(1 - 4 / theta * (1 - d1))


def check_copulas():
    t0 = time.perf_counter()
    v = np.linspace(0, 1, 1001)
    worst = 0.0
    for fam, p in ((Family.GAUSSIAN, 0.2), (Family.FRANK, 5.0), (Family.FRANK, -8.0), (Family.GUMBEL, QV_THETA),
                   (Family.INDEPENDENCE, 0.0)):
        for o in Orientation:
            c = Copula(fam, p, o)
            for got, want in ((c.cdf(v, 0), 0 * v), (c.cdf(0, v), 0 * v), (c.cdf(v, 1), v), (c.cdf(1, v), v)):
                worst = max(worst, np.max(np.abs(got - want)))
    g = Copula(Family.GUMBEL, QV_THETA).sample(100_000, 5)
    tau_g = stats.kendalltau(g[:, 0], g[:, 1]).statistic
    ok = worst <= 1e-12 and abs(tau_g - (1 - 1 / QV_THETA)) <= 0.01
    parts = [f"grounding {worst:.1e}", f"Gumbel tau {tau_g:.4f} vs {1 - 1 / QV_THETA:.4f}"]
    for theta in (5.0, -8.0):
        f = Copula(Family.FRANK, theta).sample(100_000, 6)
        tau = stats.kendalltau(f[:, 0], f[:, 1]).statistic
        ref = _frank_tau(theta)
        ok &= abs(tau - ref) <= 0.01
        parts.append(f"Frank({theta:g}) tau {tau:.4f} vs {ref:.4f}")
    dt = time.perf_counter() - t0
    return ok and dt < 60, ", ".join(parts) + f" ({dt:.1f}s)"


def check_gev_roundtrip():
    q = np.concatenate([np.geomspace(1e-6, 0.5, 5000), 1 - np.geomspace(1e-6, 0.5, 5000)])
    sets = [Q_MARGIN, V_MARGIN, L_MARGIN, GevParams(10.0, 5.0, -0.5), GevParams(2.0, 0.5, 1.0)]
    worst = max(np.max(np.abs(p.cdf(p.ppf(q)) - q)) for p in sets)
    return worst <= 1e-9, f"max |cdf(quantile(q)) - q| = {worst:.1e} over {len(sets)} parameter sets"


def check_rotated_gaussian():
    m1, m2, rho = GaussianParams(5.0, 25.0), GaussianParams(10.0, 1.0), 0.2
    cov = gaussian_covariance(m1, m2, rho)
    rng = np.random.default_rng(7)
    n = 100_000
    x = rng.multivariate_normal([5.0, 10.0], cov, size=n)
    worst_z = worst_tr = 0.0
    for _ in range(10):
        u = _direction(rng, 2)
        r1, r2, rho_u = rotated_gaussian_params(m1, m2, rho, u)
        c12 = rho_u * r1.sd * r2.sd
        y = x @ build_rotation(u).T
        mean, c = y.mean(axis=0), np.cov(y.T)
        z = [abs(mean[0] - r1.mean) / (r1.sd / np.sqrt(n)), abs(mean[1] - r2.mean) / (r2.sd / np.sqrt(n)),
             abs(c[0, 0] - r1.var) / (r1.var * np.sqrt(2 / n)), abs(c[1, 1] - r2.var) / (r2.var * np.sqrt(2 / n)),
             abs(c[0, 1] - c12) / np.sqrt((r1.var * r2.var + c12 ** 2) / n)]
        worst_z = max(worst_z, *z)
        worst_tr = max(worst_tr, abs(r1.var + r2.var - 26.0))
    return worst_z <= 4 and worst_tr <= 1e-10, f"max |z| = {worst_z:.2f} (<= 4), trace error {worst_tr:.1e}"


def check_flood():
    t0 = time.perf_counter()
    _, s = run_experiment(ExperimentConfig(replicas=20, years=1000, alpha=0.01, seed=2024))
    _, d = run_experiment(ExperimentConfig(replicas=20, years=1000, alpha=0.01, seed=2024, mode=Mode.DISTRIBUTION))
    dt = time.perf_counter() - t0
    a = s["comparison"]["share_fpr_pca_below_classical"]
    b = s["comparison"]["share_detection_classical_above_pca"]
    de, dp = s["classical"]["extremes_detection_ratio"], s["pca"]["extremes_detection_ratio"]
    te, tp = d["classical"]["true_positive_ratio"], d["pca"]["true_positive_ratio"]
    ok = (a >= 0.95 and b == 1.0 and 0.05 <= de <= 0.15 and 0.008 <= dp <= 0.05 and te <= 0.05 and tp >= 0.90
          and dt < 600)
    detail = (f"(a) {a:.0%} (b) {b:.0%} (c) detection e {de:.2%} pca {dp:.2%} "
              f"(d) TPR e {te:.2%} pca {tp:.2%}; true extremes {s['classical']['true_extremes_ratio']:.2%} ({dt:.0f}s)")
    return ok, detail


def _snapshot(root: Path) -> dict:
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def check_determinism():
    def invocations(d: Path):
        src = d / "in.csv"
        return [
            ["simulate", "--output", src, "--rows", 400, "--seed", 11],
            ["detect", "--input", src, "--output", d / "e.csv", "--alpha", 0.05],
            ["detect", "--input", src, "--output", d / "p.csv", "--alpha", 0.05, "--direction", "pca",
             "--mode", "distribution"],
            ["pca", "--input", src, "--output", d / "pca.json"],
            ["levelsets", "--output", d / "ls.csv", "--family", "gumbel", "--param", QV_THETA, "--alpha", 0.1],
            ["flood", "--output", d / "flood", "--replicas", 2, "--years", 200, "--seed", 5],
        ]

    snaps = []
    with tempfile.TemporaryDirectory() as tmp:
        for k in range(2):
            d = Path(tmp) / f"run{k}"
            d.mkdir()
            for argv in invocations(d):
                argv = [str(a) for a in argv]
                if k == 0:
                    code = cli.main(argv)
                else:
                    code = subprocess.run([sys.executable, "-m", "dirext", *argv], capture_output=True).returncode
                if code != 0:
                    return False, f"'{argv[0]}' exited {code}"
            snaps.append(_snapshot(d))
    same = snaps[0] == snaps[1]
    return same, f"{len(snaps[0])} output files {'byte-identical' if same else 'DIFFER'} across runs"


CRITERIA = [
    ("1 rotation correctness", check_rotation),
    ("2 rotated-sample label equivalence", check_rotation_equivalence),
    ("3 distribution/survival containment", check_containment),
    ("4 fast dominance counts = naive", check_dominance),
    ("5 copula axioms and samplers", check_copulas),
    ("6 GEV quantile roundtrip", check_gev_roundtrip),
    ("7 rotated Gaussian closed form", check_rotated_gaussian),
    ("8 flood experiment ordering", check_flood),
    ("9 CLI determinism", check_determinism),
]


def line(name, ok, detail):
    return f"[{'PASS' if ok else 'FAIL'}] AC{name}: {detail}"


if __name__ == "__main__":
    failed = 0
    for name, fn in CRITERIA:
        ok, detail = fn()
        failed += not ok
        print(line(name, ok, detail), flush=True)
    sys.exit(1 if failed else 0)
