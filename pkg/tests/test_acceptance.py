"""Acceptance suite, one test per criterion.

A summary line ``criterion k: PASS|FAIL`` is printed at the end of the run
(see ``conftest.py``).
"""

import math
import time
from pathlib import Path

import numpy as np
import pytest

import oracles
from conftest import FIXTURES, MALFORMED
from conefix import (AffineSingle, BallMap, ContractionCertificate, LinearComparator,
                     PerturbedFamily, SolverConfig, TwoBranch, certify, check_metric_axioms,
                     check_uniqueness_condition, componentwise_metric, distance, hausdorff,
                     lambda_iterate, leq, picard_selection, sample_pairs, scalar_metric,
                     stability_experiment)
from conefix.applications import Box, DiffIncProblem, MviProblem, solve_inclusion, solve_mvi
from conefix.cli import run
from conefix.cone_order import norm
from conefix.solvers import observed_rate, sample_seeds

TOL = 1e-12

BUILTIN_METRICS = [
    scalar_metric(1), scalar_metric(3), scalar_metric(3, "sup"),
    scalar_metric(2, "weighted", [2.0, 0.5]),
    componentwise_metric(2), componentwise_metric(3, "sup"),
    componentwise_metric(3, "weighted", [3.0, 1.0, 2.0]),
]


def _cone_order_violations(spec, rng, count=1000):
    m, bad = spec.dimension, 0
    for _ in range(count):
        a, b, c = rng.normal(size=(3, m))
        # close the triple under the order so transitivity is exercised
        b = a + np.abs(b)
        c = b + np.abs(c)
        t = rng.uniform(0, 5)
        bad += not leq(a, a, spec, TOL)
        bad += not (leq(a, b, spec, TOL) and leq(b, c, spec, TOL) and leq(a, c, spec, TOL))
        bad += not leq(a + c, b + c, spec, TOL)
        bad += not leq(t * a, t * b, spec, TOL)
        bad += leq(a, b, spec) and leq(b, a, spec) and not np.array_equal(a, b)
    return bad


def test_criterion_1_axioms():
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    for spec in BUILTIN_METRICS:
        pts = rng.normal(scale=3, size=(500, spec.dimension))
        pts[1] = pts[0]
        rep = check_metric_axioms(spec, pts, tol=TOL)
        assert rep.passed, (spec, rep.to_dict())
        assert _cone_order_violations(spec.cone, rng) == 0
    assert time.perf_counter() - start < 5


def test_criterion_2_hausdorff_oracle():
    rng = np.random.default_rng(2)
    start = time.perf_counter()
    worst = 0.0
    for trial in range(1000):
        n = int(rng.integers(1, 4))
        spec = scalar_metric(n) if trial % 2 else componentwise_metric(n)
        A = rng.normal(size=(int(rng.integers(1, 7)), n))
        B = rng.normal(size=(int(rng.integers(1, 7)), n))
        got = hausdorff(A, B, spec)
        want = oracles.hausdorff(A.tolist(), B.tolist(),
                                 lambda x, y: oracles.cone_distance(x, y, spec.kind))
        worst = max(worst, float(np.max(np.abs(got - np.array(want)))))
    assert worst <= 1e-12
    assert time.perf_counter() - start < 10


CATALOG_INSTANCES = [
    ("affine_single 1-D", AffineSingle(0.5, [0.0]), scalar_metric(1)),
    ("affine_single 2-D", AffineSingle([[0.3, 0.1], [0.0, 0.4]], [1.0, -2.0]), scalar_metric(2)),
    ("affine_single componentwise",
     AffineSingle([[0.5, 0.0], [0.0, 0.25]], [1.0, 1.0]), componentwise_metric(2)),
    ("two_branch", TwoBranch(0.5, [0.0], 0.5, [0.25]), scalar_metric(1)),
    ("ball_map", BallMap(0.4, [1.0, 0.0], 0.2), scalar_metric(2)),
    ("perturbed_family", PerturbedFamily(0.5, [0.0], [1.0], 10), scalar_metric(1)),
    ("translation", AffineSingle(1.0, [1.0]), scalar_metric(1)),
]


def test_criterion_3_picard_reproduction():
    start = time.perf_counter()
    box = (-5.0, 5.0)
    certified = 0
    for label, T, metric in CATALOG_INSTANCES:
        try:
            cert = certify(T, metric, sample_pairs(T, 100, box, seed=3))
        except Exception:
            continue
        if not cert.hypotheses_hold:
            continue
        certified += 1
        cfg = SolverConfig(max_iter=2000, tol=1e-10)
        for x0 in sample_seeds(T.dimension, 20, box, seed=4):
            rep = picard_selection(T, metric, x0, cfg)
            assert rep.status == "converged", label
            assert rep.residual_norms[-1] <= 1e-10, label
            rate = observed_rate(rep.residual_norms)
            if rate is not None:
                assert math.log(rate) <= math.log(cert.delta + cert.L) + 0.05, (label, rate, cert)
    assert certified >= 5
    assert time.perf_counter() - start < 10


def test_criterion_4_lambda_bound():
    T, metric = AffineSingle(0.5, [1.0, -0.5]), scalar_metric(2)
    cert = ContractionCertificate(0.5, 0.2, 1.0)
    tol = 1e-10
    cfg = SolverConfig(max_iter=500, tol=tol, lam=1.0)
    for x0 in sample_seeds(2, 10, (-10.0, 10.0), seed=5):
        rep = lambda_iterate(T, metric, x0, cert, cfg)
        assert rep.status == "converged" and rep.sigma == pytest.approx(0.85)
        xs = rep.fixed_point
        for x, bound in zip(rep.iterates, rep.bound_sequence):
            assert norm(distance(x, xs, metric), metric.cone) <= bound + 10 * tol


def test_criterion_5_uniqueness_discrimination():
    metric = scalar_metric(1)
    pairs = [([0.0], [0.5]), ([-1.0], [1.0]), ([0.2], [0.3]), ([2.0], [-3.0])]
    single = AffineSingle(0.5, [0.0])
    assert check_uniqueness_condition(single, metric, LinearComparator(0.4), pairs).holds
    double = TwoBranch(0.5, [0.0], 0.5, [0.25])
    for c in np.round(np.arange(0.05, 1.0, 0.05), 2):
        res = check_uniqueness_condition(double, metric, LinearComparator(float(c)), pairs)
        assert not res.holds and res.violating_pair is not None, c


def test_criterion_6_stability():
    tol = 1e-12
    rows, fix_limit = stability_experiment(
        PerturbedFamily(0.5, [0.0], [1.0]), AffineSingle(0.5, [0.0]), scalar_metric(1),
        [10, 100, 1000], [[-1.0], [1.0], [3.0]], SolverConfig(max_iter=500, tol=tol, seed=7))
    H = [r["hausdorff"] for r in rows]
    for r in rows:
        assert abs(r["hausdorff"] - 2 / r["n"]) <= 10 * tol
    assert all(a > b for a, b in zip(H, H[1:]))


def test_criterion_7_differential_inclusion():
    start = time.perf_counter()
    prob = DiffIncProblem(AffineSingle(-1.0, [0.0]), [1.0], 1.0, 1000, weight_lambda=2.0)
    traj, rep = solve_inclusion(prob, SolverConfig(tol=1e-10, max_iter=50))
    assert rep.status == "converged" and rep.residual_norms[-1] <= 1e-10
    assert len(rep.residual_norms) < 50
    assert abs(traj.states[-1, 0] - math.exp(-1)) <= 2e-3
    assert abs(oracles.euler_decay(10 ** 6) - math.exp(-1)) <= 1e-6
    assert time.perf_counter() - start < 5


def test_criterion_8_mvi():
    prob = MviProblem(AffineSingle(1.0, [-2.0, -0.5]), Box([0, 0], [1, 1]), 1.0, 0.5,
                      ContractionCertificate(0.3, 0.1, 1.0))
    rep = solve_mvi(prob, [0.0, 0.0], SolverConfig(tol=1e-13, max_iter=500))
    assert rep.status == "converged"
    assert np.max(np.abs(rep.fixed_point - [1.0, 0.5])) <= 1e-8
    assert rep.extra["kkt_ok"]
    assert rep.sigma == pytest.approx(0.2, abs=1e-12)
    xs = rep.fixed_point
    errs = [float(np.linalg.norm(x - xs)) for x in rep.iterates]
    C = errs[0]
    bad = [(n, e, 1.1 * C * rep.sigma ** n) for n, e in enumerate(errs)
           if e > 1.1 * C * rep.sigma ** n]
    assert not bad, f"envelope broken at {len(bad)} iterates, first {bad[0]}"


@pytest.mark.parametrize("name", ["solve_picard_componentwise", "solve_lambda", "stability",
                                  "diffinc_drift", "mvi_ball"])
def test_criterion_9_determinism(name, tmp_path):
    command = name.split("_")[0]
    out = []
    for tag in "ab":
        argv = [command, str(FIXTURES / f"{name}.json"), "--seed", "11",
                "--out", str(tmp_path / tag)]
        if "lambda" in name:
            argv += ["--scheme", "lambda"]
        run(argv)
        out.append((tmp_path / tag / "trace.csv").read_bytes())
    assert out[0] == out[1]


EXPECTED_EXIT = {
    "certify_isometry": 3, "solve_picard_translation": 3, "solve_picard_diverge": 3,
    "solve_lambda_sigma_fail": 2,
}


def test_criterion_10_cli_contract(tmp_path, monkeypatch, capsys):
    monkeypatch.delenv("CONEFIX_OUT", raising=False)
    fixtures = sorted(FIXTURES.glob("*.json"))
    assert fixtures
    for path in fixtures:
        argv = [path.stem.split("_")[0], str(path), "--out", str(tmp_path / path.stem)]
        if "lambda" in path.stem:
            argv += ["--scheme", "lambda"]
        code, report = run(argv)
        assert code == EXPECTED_EXIT.get(path.stem, 0), path.stem
        assert report["exit_code"] == code
    malformed = sorted(MALFORMED.glob("*.json"))
    assert len(malformed) >= 6
    for path in malformed:
        capsys.readouterr()
        code, _ = run(["solve", str(path), "--out", str(tmp_path / "bad")])
        assert code == 1, path.stem
        assert "field '" in capsys.readouterr().err, path.stem
