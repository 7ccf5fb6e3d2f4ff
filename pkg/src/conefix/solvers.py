"""Selection-based fixed-point iterations for multivalued maps.

``picard_selection`` follows ``x_{n+1} in T x_n`` choosing the nearest image
point (optionally any point within a shrinking slack ``eps_n / 2^n``).
``lambda_iterate`` averages ``x_{n+1} = (x_n + lam * f(x_n)) / (1 + lam)``
and carries the a-priori bound ``kappa sigma^n / (1 - sigma) ||d(x_0, x_1)||``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .cone_order import norm
from .errors import EmptyFixedPointSetError, InvalidArgument
from .metric_space import as_point, distance, scalar_metric
from .setmap import FiniteSet, hausdorff, select

DIVERGENCE_THRESHOLD = 1e12
CONVERGED, MAX_ITER, DIVERGED = "converged", "max_iter_exceeded", "diverged"


@dataclass
class SolverConfig:
    max_iter: int = 1000
    tol: float = 1e-10
    slack_scale: float = 0.0
    lam: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if int(self.max_iter) < 1:
            raise InvalidArgument("max_iter must be >= 1")
        if not self.tol > 0:
            raise InvalidArgument("tol must be > 0")
        if not self.slack_scale >= 0:
            raise InvalidArgument("slack_scale must be >= 0")
        self.max_iter = int(self.max_iter)
        self.seed = int(self.seed)

    def to_dict(self):
        return {"max_iter": self.max_iter, "tol": self.tol, "slack_scale": self.slack_scale,
                "lambda": self.lam, "seed": self.seed}


@dataclass
class ConvergenceReport:
    iterates: list
    residual_norms: list
    status: str
    fixed_point: np.ndarray = None
    sigma: float = None
    bound_sequence: list = None
    hypothesis_ok: bool = None
    extra: dict = field(default_factory=dict)

    @property
    def iterations(self):
        return len(self.iterates) - 1

    @property
    def final_residual(self):
        return self.residual_norms[-1]

    def summary(self):
        fp = None if self.fixed_point is None else [float(v) for v in self.fixed_point]
        out = {
            "solver_status": self.status,
            "fixed_point": fp,
            "sigma": self.sigma,
            "hypothesis_ok": self.hypothesis_ok,
            "iterations": self.iterations,
            "final_residual": _finite_or_none(self.final_residual),
        }
        out.update(self.extra)
        return out

    def trace_rows(self):
        bounds = self.bound_sequence
        for i, r in enumerate(self.residual_norms):
            yield i, r, (None if bounds is None else bounds[i])


def _finite_or_none(v):
    return float(v) if v is not None and math.isfinite(v) else None


def residual(x, T, metric):
    """Norm of ``d(x, z)`` for the image point ``z`` nearest to ``x``."""
    x = as_point(x, metric, "x")
    z = select(x, T.evaluate(x), metric)
    return norm(distance(x, z, metric), metric.cone)


def _step_residual(x, Tx, metric):
    z = select(x, Tx, metric)
    return z, norm(distance(x, z, metric), metric.cone)


def _finish(iterates, residuals, status, **kw):
    fp = iterates[-1].copy() if status == CONVERGED else None
    return ConvergenceReport(iterates, residuals, status, fp, **kw)


def picard_selection(T, metric, x0, cfg=None):
    """Picard iteration with nearest-point selection.

    Stops when the residual drops to ``cfg.tol`` (converged), exceeds
    ``1e12`` or turns non-finite (diverged), or after ``cfg.max_iter``
    steps.
    """
    cfg = cfg or SolverConfig()
    x = as_point(x0, metric, "x0").copy()
    unit = metric.cone.unit()
    iterates, residuals = [x], []
    for n in range(cfg.max_iter + 1):
        if not np.all(np.isfinite(x)):
            residuals.append(math.inf)
            return _finish(iterates, residuals, DIVERGED)
        Tx = T.evaluate(x)
        z, r = _step_residual(x, Tx, metric)
        residuals.append(r)
        if not math.isfinite(r) or r > DIVERGENCE_THRESHOLD:
            return _finish(iterates, residuals, DIVERGED)
        if r <= cfg.tol:
            return _finish(iterates, residuals, CONVERGED)
        if n == cfg.max_iter:
            break
        if cfg.slack_scale > 0:
            z = select(x, Tx, metric, cfg.slack_scale * 0.5 ** n * unit)
        x = np.array(z, dtype=float)
        iterates.append(x)
    return _finish(iterates, residuals, MAX_ITER)


def lambda_sigma(delta, L, kappa, lam):
    return kappa * (delta + L + lam) / (1 + lam)


def lambda_iterate(T, metric, x0, cert, cfg=None):
    """Averaged iteration ``x_{n+1} = (x_n + lam f(x_n)) / (1 + lam)``.

    ``f(x_n)`` is the image point nearest to ``x_n``; its distance to
    ``x_n`` is the recorded residual, so boundedness of that gap can be
    read off the trace. When ``sigma >= 1`` the iteration still runs and
    ``hypothesis_ok`` is False.
    """
    cfg = cfg or SolverConfig()
    lam = float(cfg.lam)
    if not lam > 0:
        raise InvalidArgument("lambda must be > 0")
    sigma = lambda_sigma(cert.delta, cert.L, cert.kappa, lam)
    x = as_point(x0, metric, "x0").copy()
    iterates, residuals = [x], []
    status = MAX_ITER
    for n in range(cfg.max_iter + 1):
        if not np.all(np.isfinite(x)):
            residuals.append(math.inf)
            status = DIVERGED
            break
        y, r = _step_residual(x, T.evaluate(x), metric)
        residuals.append(r)
        if not math.isfinite(r) or r > DIVERGENCE_THRESHOLD:
            status = DIVERGED
            break
        if r <= cfg.tol:
            status = CONVERGED
            break
        if n == cfg.max_iter:
            break
        x = (x + lam * y) / (1 + lam)
        iterates.append(x)

    bounds = None
    if sigma < 1:
        x1 = iterates[1] if len(iterates) > 1 else iterates[0]
        d01 = norm(distance(iterates[0], x1, metric), metric.cone)
        scale = cert.kappa * d01 / (1 - sigma)
        bounds = [scale * sigma ** n for n in range(len(iterates))]
    report = _finish(iterates, residuals, status, sigma=sigma, bound_sequence=bounds,
                     hypothesis_ok=bool(sigma < 1))
    report.extra["lambda"] = lam
    return report


def observed_rate(residuals, tail=0.5):
    """``exp`` of the least-squares slope of log residuals over the last
    ``tail`` fraction of the positive entries; None if fewer than 3."""
    r = np.asarray([v for v in residuals if v > 0 and math.isfinite(v)], dtype=float)
    r = r[int(len(r) * (1 - tail)):] if len(r) >= 6 else r
    if len(r) < 3:
        return None
    slope = np.polyfit(np.arange(len(r)), np.log(r), 1)[0]
    return float(np.exp(slope))


def _dedupe(points, metric, tol):
    kept = []
    for p in points:
        if all(norm(distance(p, q, metric), metric.cone) > tol for q in kept):
            kept.append(p)
    return kept


def fixed_point_set(T, metric, seeds, cfg=None):
    """Fixed points reached by Picard runs from every seed.

    Converged end points closer than ``10 * tol`` are merged; the first
    one (in seed order) is kept.
    """
    cfg = cfg or SolverConfig()
    seeds = list(seeds)
    if not seeds:
        raise InvalidArgument("need at least one seed")
    found = []
    for s in seeds:
        rep = picard_selection(T, metric, s, cfg)
        if rep.status == CONVERGED:
            found.append(rep.fixed_point)
    if not found:
        raise EmptyFixedPointSetError(f"none of {len(seeds)} seeds converged")
    return FiniteSet(_dedupe(found, metric, 10 * cfg.tol))


def sample_seeds(dimension, count, box, seed=0):
    lo, hi = box
    rng = np.random.default_rng(seed)
    return [rng.uniform(lo, hi, dimension) for _ in range(count)]


def sup_perturbation(Tn, T, metric, samples):
    """Largest norm of ``H(Tn y, T y)`` over the sample points."""
    return max(norm(hausdorff(Tn.evaluate(y), T.evaluate(y), metric), metric.cone)
               for y in samples)


def stability_experiment(family, limit, metric, n_list, seeds, cfg=None, box=None,
                         n_samples=200):
    """Distance between ``Fix(T_n)`` and ``Fix(T)`` along ``n_list``.

    Returns one row per ``n`` with the sampled sup-perturbation over a box
    (default: the seeds' bounding box) and the Hausdorff distance between
    the fixed-point sets measured in the euclidean norm.
    """
    cfg = cfg or SolverConfig()
    if not hasattr(family, "member"):
        raise InvalidArgument("family must be a perturbed_family map")
    if family.dimension != limit.dimension:
        raise InvalidArgument("family and limit act on different dimensions")
    seeds = [as_point(s, metric, "seed") for s in seeds]
    if box is None:
        S = np.array(seeds)
        lo, hi = S.min(axis=0), S.max(axis=0)
        if np.all(lo == hi):
            lo, hi = lo - 1, hi + 1
        box = (lo, hi)
    rng = np.random.default_rng(cfg.seed)
    samples = [rng.uniform(box[0], box[1]) for _ in range(n_samples)]
    euclid = scalar_metric(limit.dimension)

    fix_limit = fixed_point_set(limit, metric, seeds, cfg)
    rows = []
    for n in n_list:
        Tn = family.member(int(n))
        fix_n = fixed_point_set(Tn, metric, seeds, cfg)
        rows.append({
            "n": int(n),
            "sup_perturbation": sup_perturbation(Tn, limit, metric, samples),
            "hausdorff": float(hausdorff(fix_n, fix_limit, euclid)[0]),
            "fix_n": fix_n.tolist(),
        })
    return rows, fix_limit
