"""Command-line front end.

    conefix <command> SPEC.json [--scheme picard|lambda] [--tol T]
            [--max-iter N] [--seed S] [--out DIR]

Commands: axioms, certify, solve, stability, diffinc, mvi. Every run writes
``trace.csv`` and ``report.json`` into the output directory (``CONEFIX_OUT``
overrides ``--out``). Exit codes depend only on ``report.status``:
0 converged/pass, 2 hypothesis_failed, 3 diverged/no_certificate and other
failed runs, 1 usage or spec errors.
"""

import argparse
import csv
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from .applications import (DiffIncProblem, MviProblem, constraint_from_dict, solve_inclusion,
                           solve_mvi, suggest_step)
from .cone_order import ConeSpec, as_vector
from .contraction import (DEFAULT_L_GRID, ContractionCertificate, LinearComparator, certify,
                          check_uniqueness_condition, sample_pairs)
from .errors import EmptyFixedPointSetError, InvalidArgument, NoCertificateError
from .metric_space import MetricSpec, check_metric_axioms
from .setmap import TimeDependent, map_from_dict
from .solvers import (CONVERGED, SolverConfig, lambda_iterate, observed_rate, picard_selection,
                      sample_seeds, stability_experiment)

COMMANDS = ("axioms", "certify", "solve", "stability", "diffinc", "mvi")
EXIT_CODES = {
    "converged": 0, "pass": 0,
    "hypothesis_failed": 2,
    "diverged": 3, "no_certificate": 3, "max_iter_exceeded": 3, "fail": 3,
    "empty_fixed_point_set": 3,
}
TOP_LEVEL_KEYS = {
    "description", "cone", "metric", "map", "solver", "x0", "certificate", "pairs", "L_grid",
    "phi", "uniqueness_comparator", "points", "seeds", "n_list", "family", "limit", "box",
    "rhs", "horizon", "grid_size", "weight_lambda", "operator", "constraint", "mu",
    "step_lambda",
}


class SpecError(Exception):
    def __init__(self, field, message):
        super().__init__(f"field '{field}': {message}")
        self.field = field


def exit_code(status):
    return EXIT_CODES[status]


def _fmt(v):
    if v is None:
        return ""
    return format(float(v), ".17g")


# -- spec parsing ---------------------------------------------------------

def load_spec(path):
    text = Path(path).read_text(encoding="utf-8")
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError("<document>", f"line {exc.lineno} column {exc.colno}: {exc.msg}")
    if not isinstance(spec, dict):
        raise SpecError("<document>", "top level must be a JSON object")
    unknown = sorted(set(spec) - TOP_LEVEL_KEYS)
    if unknown:
        raise SpecError(unknown[0], f"unknown key (allowed: {sorted(TOP_LEVEL_KEYS)})")
    return spec


def _require(spec, key, where=""):
    if key not in spec:
        raise SpecError(where + key, "required for this command")
    return spec[key]


def _block(spec, key, allowed, required=()):
    blk = _require(spec, key)
    if not isinstance(blk, dict):
        raise SpecError(key, "must be an object")
    unknown = sorted(set(blk) - set(allowed))
    if unknown:
        raise SpecError(f"{key}.{unknown[0]}", f"unknown key (allowed: {sorted(allowed)})")
    for r in required:
        if r not in blk:
            raise SpecError(f"{key}.{r}", "missing")
    return blk


def _number(value, field, positive=False, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SpecError(field, f"expected a number, got {value!r}")
    if integer and int(value) != value:
        raise SpecError(field, "expected an integer")
    if positive and not value > 0:
        raise SpecError(field, "must be > 0")
    return int(value) if integer else float(value)


def _vector(value, field, dim=None):
    try:
        v = as_vector(value, field)
    except (InvalidArgument, ValueError, TypeError) as exc:
        raise SpecError(field, str(exc))
    if dim is not None and v.size != dim:
        raise SpecError(field, f"expected dimension {dim}, got {v.size}")
    return v


def _wrap(field, fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except (InvalidArgument, ValueError, TypeError) as exc:
        raise SpecError(field, str(exc))


def parse_metric(spec):
    blk = _block(spec, "metric", {"kind", "dimension", "norm", "weights"}, ("kind", "dimension"))
    dim = _number(blk["dimension"], "metric.dimension", positive=True, integer=True)
    kind = blk["kind"]
    if kind not in ("scalar", "componentwise"):
        raise SpecError("metric.kind", f"unknown metric kind {kind!r}")
    m = 1 if kind == "scalar" else dim
    cone_norm, cone_w = "euclidean", None
    if "cone" in spec:
        cblk = _block(spec, "cone", {"dimension", "norm", "weights", "kind"})
        if "dimension" in cblk and cblk["dimension"] != m:
            raise SpecError("cone.dimension",
                            f"{kind} metric in dimension {dim} needs a cone of dimension {m}")
        cone_norm = cblk.get("norm", "euclidean")
        cone_w = cblk.get("weights")
    cone = _wrap("cone", ConeSpec, m, norm=cone_norm, weights=cone_w)
    if kind == "componentwise" and ("norm" in blk or "weights" in blk):
        raise SpecError("metric.norm", "componentwise metrics take their norm from the cone block")
    return _wrap("metric", MetricSpec, kind, dim, cone, norm=blk.get("norm", "euclidean"),
                 weights=blk.get("weights"))


def parse_map(spec, key, dim=None):
    blk = _require(spec, key)
    if not isinstance(blk, dict):
        raise SpecError(key, "must be an object")
    T = _wrap(key, map_from_dict, blk)
    if dim is not None and T.dimension != dim:
        raise SpecError(key, f"map acts on dimension {T.dimension}, metric has {dim}")
    return T


def parse_solver(spec, args):
    blk = spec.get("solver", {})
    if not isinstance(blk, dict):
        raise SpecError("solver", "must be an object")
    allowed = {"max_iter", "tol", "slack_scale", "lambda", "seed"}
    unknown = sorted(set(blk) - allowed)
    if unknown:
        raise SpecError(f"solver.{unknown[0]}", f"unknown key (allowed: {sorted(allowed)})")
    kw = {}
    if "max_iter" in blk:
        kw["max_iter"] = _number(blk["max_iter"], "solver.max_iter", True, True)
    if "tol" in blk:
        kw["tol"] = _number(blk["tol"], "solver.tol", positive=True)
    if "slack_scale" in blk:
        kw["slack_scale"] = _number(blk["slack_scale"], "solver.slack_scale")
    if "lambda" in blk:
        kw["lam"] = _number(blk["lambda"], "solver.lambda", positive=True)
    if "seed" in blk:
        kw["seed"] = _number(blk["seed"], "solver.seed", integer=True)
    if args.tol is not None:
        kw["tol"] = args.tol
    if args.max_iter is not None:
        kw["max_iter"] = args.max_iter
    if args.seed is not None:
        kw["seed"] = args.seed
    return _wrap("solver", SolverConfig, **kw)


def _points(spec, key, dim, seed):
    """Explicit list of points, or ``{"count": k, "box": [lo, hi]}`` sampled with ``seed``."""
    blk = _require(spec, key)
    if isinstance(blk, dict):
        unknown = sorted(set(blk) - {"count", "box"})
        if unknown:
            raise SpecError(f"{key}.{unknown[0]}", "unknown key (allowed: ['box', 'count'])")
        count = _number(_require(blk, "count", key + "."), f"{key}.count", True, True)
        box = _box(blk, key)
        return sample_seeds(dim, count, box, seed)
    if not isinstance(blk, list) or not blk:
        raise SpecError(key, "expected a nonempty list of points or a {count, box} object")
    return [_vector(p, f"{key}[{i}]", dim) for i, p in enumerate(blk)]


def _box(blk, key):
    box = _require(blk, "box", key + ".")
    if not (isinstance(box, list) and len(box) == 2):
        raise SpecError(f"{key}.box", "expected [lo, hi]")
    lo = _number(box[0], f"{key}.box[0]")
    hi = _number(box[1], f"{key}.box[1]")
    if not lo < hi:
        raise SpecError(f"{key}.box", "needs lo < hi")
    return lo, hi


def _pairs(spec, T, dim, seed):
    blk = _require(spec, "pairs")
    if isinstance(blk, dict):
        unknown = sorted(set(blk) - {"count", "box"})
        if unknown:
            raise SpecError(f"pairs.{unknown[0]}", "unknown key (allowed: ['box', 'count'])")
        count = _number(_require(blk, "count", "pairs."), "pairs.count", True, True)
        return sample_pairs(T, count, _box(blk, "pairs"), seed)
    if not isinstance(blk, list) or not blk:
        raise SpecError("pairs", "expected a nonempty list of [x, y] pairs or {count, box}")
    out = []
    for i, p in enumerate(blk):
        if not (isinstance(p, list) and len(p) == 2):
            raise SpecError(f"pairs[{i}]", "expected [x, y]")
        out.append((_vector(p[0], f"pairs[{i}][0]", dim), _vector(p[1], f"pairs[{i}][1]", dim)))
    return out


def _given_certificate(spec, default_kappa):
    blk = _block(spec, "certificate", {"delta", "L", "kappa"}, ("delta", "L"))
    delta = _number(blk["delta"], "certificate.delta")
    L = _number(blk["L"], "certificate.L")
    kappa = _number(blk.get("kappa", default_kappa), "certificate.kappa", positive=True)
    if L < 0:
        raise SpecError("certificate.L", "must be >= 0")
    return ContractionCertificate(delta, L, kappa)


def _l_grid(spec):
    if "L_grid" not in spec:
        return DEFAULT_L_GRID
    grid = spec["L_grid"]
    if not isinstance(grid, list) or not grid:
        raise SpecError("L_grid", "expected a nonempty list")
    return [_number(v, f"L_grid[{i}]") for i, v in enumerate(grid)]


# -- commands -------------------------------------------------------------

def cmd_axioms(spec, args):
    metric = parse_metric(spec)
    cfg = parse_solver(spec, args)
    pts = _points(spec, "points", metric.dimension, cfg.seed)
    if len(pts) < 3:
        raise SpecError("points", "need at least 3 points")
    rep = check_metric_axioms(metric, np.array(pts))
    report = {"status": "pass" if rep.passed else "fail", "metric": metric.to_dict()}
    report.update(rep.to_dict())
    return report, [], {}


def cmd_certify(spec, args):
    metric = parse_metric(spec)
    cfg = parse_solver(spec, args)
    T = parse_map(spec, "map", metric.dimension)
    pairs = _pairs(spec, T, metric.dimension, cfg.seed)
    report = {"metric": metric.to_dict(), "map": T.to_dict(), "n_pairs": len(pairs)}
    try:
        cert = _wrap("pairs", certify, T, metric, pairs, _l_grid(spec))
    except NoCertificateError as exc:
        report.update({
            "status": "no_certificate",
            "diagnostic": str(exc),
            "best_delta": _finite(exc.best_delta),
            "best_L": exc.best_L,
            "worst_pair": [np.asarray(p).tolist() for p in exc.worst_pair],
        })
        return report, [], {}
    report["certificate"] = cert.to_dict()
    report["status"] = "pass" if cert.hypotheses_hold else "hypothesis_failed"
    if "phi" in spec:
        phi_blk = _block(spec, "phi", {"kind", "c"}, ("kind", "c"))
        if phi_blk["kind"] != "linear":
            raise SpecError("phi.kind", "only 'linear' comparators are supported")
        phi = _wrap("phi.c", LinearComparator, _number(phi_blk["c"], "phi.c"))
        comparator = spec.get("uniqueness_comparator", "max_distance")
        distinct = [(x, y) for x, y in pairs if not np.array_equal(x, y)]
        res = _wrap("uniqueness_comparator", check_uniqueness_condition, T, metric, phi,
                    distinct, comparator)
        report["uniqueness"] = {
            "holds_on_samples": res.holds,
            "comparator": res.comparator,
            "phi_c": phi.c,
            "violating_pair": None if res.violating_pair is None
            else [p.tolist() for p in res.violating_pair],
        }
    return report, [], {}


def _finite(v):
    return float(v) if v is not None and math.isfinite(v) else None


def cmd_solve(spec, args):
    metric = parse_metric(spec)
    cfg = parse_solver(spec, args)
    T = parse_map(spec, "map", metric.dimension)
    x0 = _vector(_require(spec, "x0"), "x0", metric.dimension)
    cert, cert_failed = None, False
    if "certificate" in spec:
        cert = _given_certificate(spec, metric.kappa)
    elif "pairs" in spec:
        try:
            cert = certify(T, metric, _pairs(spec, T, metric.dimension, cfg.seed), _l_grid(spec))
        except NoCertificateError as exc:
            if args.scheme == "lambda":
                return {"status": "no_certificate", "diagnostic": str(exc)}, [], {}
            cert_failed = True
    if args.scheme == "lambda":
        if cert is None:
            raise SpecError("certificate", "the lambda scheme needs 'certificate' or 'pairs'")
        rep = lambda_iterate(T, metric, x0, cert, cfg)
        hyp_ok = rep.hypothesis_ok
    else:
        rep = picard_selection(T, metric, x0, cfg)
        hyp_ok = False if cert_failed else (None if cert is None else cert.hypotheses_hold)
    report = rep.summary()
    report["scheme"] = args.scheme
    report["observed_rate"] = observed_rate(rep.residual_norms)
    if cert is not None:
        report["certificate"] = cert.to_dict()
    report["status"] = _solver_status(rep.status, hyp_ok)
    return report, list(rep.trace_rows()), {}


def _solver_status(solver_status, hypothesis_ok):
    if solver_status != CONVERGED:
        return solver_status
    return "hypothesis_failed" if hypothesis_ok is False else "converged"


def cmd_stability(spec, args):
    metric = parse_metric(spec)
    cfg = parse_solver(spec, args)
    fam_blk = dict(_require(spec, "family"))
    if fam_blk.get("kind") != "perturbed_family":
        raise SpecError("family.kind", "must be 'perturbed_family'")
    family = parse_map({"family": fam_blk}, "family", metric.dimension)
    limit = parse_map(spec, "limit", metric.dimension) if "limit" in spec else family.limit()
    n_list = _require(spec, "n_list")
    if not isinstance(n_list, list) or not n_list:
        raise SpecError("n_list", "expected a nonempty list of positive integers")
    n_list = [_number(v, f"n_list[{i}]", True, True) for i, v in enumerate(n_list)]
    seeds = _points(spec, "seeds", metric.dimension, cfg.seed)
    try:
        rows, fix_limit = stability_experiment(family, limit, metric, n_list, seeds, cfg)
    except EmptyFixedPointSetError as exc:
        return {"status": "empty_fixed_point_set", "diagnostic": str(exc)}, [], {}
    h = [r["hausdorff"] for r in rows]
    monotone = all(b <= a + 10 * cfg.tol for a, b in zip(h, h[1:]))
    report = {"status": "pass" if monotone else "fail", "rows": rows,
              "fix_limit": fix_limit.tolist(), "hausdorff_non_increasing": monotone}
    table = [["n", "sup_perturbation", "hausdorff"]]
    table += [[r["n"], _fmt(r["sup_perturbation"]), _fmt(r["hausdorff"])] for r in rows]
    return report, [], {"stability.csv": table}


def cmd_diffinc(spec, args):
    cfg = parse_solver(spec, args)
    blk = dict(_require(spec, "rhs"))
    drift = blk.pop("drift", None)
    base = parse_map({"rhs": blk}, "rhs")
    rhs = _wrap("rhs.drift", TimeDependent, base, drift)
    prob = _wrap("diffinc", DiffIncProblem, rhs,
                 _vector(_require(spec, "x0"), "x0", base.dimension),
                 _number(_require(spec, "horizon"), "horizon", positive=True),
                 _number(_require(spec, "grid_size"), "grid_size", True, True),
                 _number(spec.get("weight_lambda", 1.0), "weight_lambda", positive=True))
    traj, rep = solve_inclusion(prob, cfg)
    report = rep.summary()
    report["status"] = _solver_status(rep.status, None)
    report["final_state"] = traj.states[-1].tolist()
    rows = [[_fmt(v) for v in r] if i else r for i, r in enumerate(traj.csv_rows())]
    return report, list(rep.trace_rows()), {"trajectory.csv": rows}


def cmd_mvi(spec, args):
    cfg = parse_solver(spec, args)
    F = parse_map(spec, "operator")
    cblk = _require(spec, "constraint")
    if not isinstance(cblk, dict):
        raise SpecError("constraint", "must be an object")
    K = _wrap("constraint", constraint_from_dict, cblk)
    if K.dimension != F.dimension:
        raise SpecError("constraint", f"dimension {K.dimension} differs from operator {F.dimension}")
    cert = _given_certificate(spec, 1.0)
    mu = _number(_require(spec, "mu"), "mu", positive=True)
    step = _require(spec, "step_lambda")
    suggestion = None
    if step == "auto":
        suggestion = suggest_step(MviProblem(F, K, mu, 1.0, cert))
        step = suggestion.step
    step = _number(step, "step_lambda", positive=True)
    prob = _wrap("mvi", MviProblem, F, K, mu, step, cert)
    x0 = _vector(_require(spec, "x0"), "x0", F.dimension)
    rep = solve_mvi(prob, x0, cfg)
    report = rep.summary()
    report["status"] = _solver_status(rep.status, rep.hypothesis_ok)
    report["certificate"] = cert.to_dict()
    if suggestion is not None:
        report["suggested_step"] = {"step": suggestion.step, "sigma": suggestion.sigma,
                                    "clamped": suggestion.clamped, "warning": suggestion.warning}
    return report, list(rep.trace_rows()), {}


HANDLERS = {"axioms": cmd_axioms, "certify": cmd_certify, "solve": cmd_solve,
            "stability": cmd_stability, "diffinc": cmd_diffinc, "mvi": cmd_mvi}


# -- output ---------------------------------------------------------------

def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        return float(obj) if math.isfinite(obj) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_outputs(out_dir, report, trace, extra_tables):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "trace.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["iter", "residual_norm", "bound"])
        for i, r, b in trace:
            w.writerow([i, _fmt(r), _fmt(b)])
    for name, rows in extra_tables.items():
        with open(out_dir / name, "w", newline="", encoding="utf-8") as fh:
            csv.writer(fh, lineterminator="\n").writerows(rows)
    with open(out_dir / "report.json", "w", encoding="utf-8") as fh:
        json.dump(_jsonable(report), fh, indent=2, sort_keys=True)
        fh.write("\n")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser():
    p = _Parser(prog="conefix", description=__doc__.split("\n\n")[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("spec", help="path to a JSON problem spec")
    p.add_argument("--scheme", choices=("picard", "lambda"), default="picard",
                   help="iteration scheme for 'solve'")
    p.add_argument("--tol", type=float)
    p.add_argument("--max-iter", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", default="conefix_out")
    return p


def run(argv=None):
    """Run one command; returns ``(exit_code, report or None)``."""
    args = build_parser().parse_args(argv)
    if args.tol is not None and not args.tol > 0:
        print("conefix: error: --tol must be > 0", file=sys.stderr)
        return 1, None
    if args.max_iter is not None and args.max_iter < 1:
        print("conefix: error: --max-iter must be >= 1", file=sys.stderr)
        return 1, None
    out_dir = os.environ.get("CONEFIX_OUT") or args.out
    try:
        spec = load_spec(args.spec)
        report, trace, tables = HANDLERS[args.command](spec, args)
    except FileNotFoundError as exc:
        print(f"conefix: error: {exc}", file=sys.stderr)
        return 1, None
    except SpecError as exc:
        print(f"conefix: spec error in {args.spec}: {exc}", file=sys.stderr)
        return 1, None
    report = {"command": args.command, "spec": str(args.spec), **report}
    report["exit_code"] = exit_code(report["status"])
    write_outputs(out_dir, report, trace, tables)
    print(f"{args.command}: {report['status']} (exit {report['exit_code']}) -> {out_dir}")
    return report["exit_code"], report


def main(argv=None):
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
