"""Differential inclusions and multivalued variational inequalities.

``solve_inclusion`` runs Picard iteration over whole Euler trajectories of
``x'(t) in F(t, x(t))``, measuring successive sweeps in the weighted sup
metric ``max_i exp(-lam t_i) ||y(t_i) - z(t_i)||``. ``solve_mvi`` runs the
projected iteration ``x_{n+1} = proj_K(x_n - step * f_n)``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .contraction import ContractionCertificate, verify_certificate
from .errors import InvalidArgument
from .metric_space import as_point, scalar_metric
from .setmap import MultiMap, TimeDependent, select
from .solvers import CONVERGED, DIVERGED, DIVERGENCE_THRESHOLD, MAX_ITER, ConvergenceReport, SolverConfig


@dataclass
class DiffIncProblem:
    rhs: TimeDependent
    x0: np.ndarray
    horizon: float
    grid_size: int
    weight_lambda: float = 1.0

    def __post_init__(self):
        if isinstance(self.rhs, MultiMap):
            self.rhs = TimeDependent(self.rhs)
        self.x0 = as_point(self.x0, name="x0")
        if self.x0.size != self.rhs.dimension:
            raise InvalidArgument("x0 dimension does not match the right-hand side")
        if not (math.isfinite(self.horizon) and self.horizon > 0):
            raise InvalidArgument("horizon must be > 0")
        if int(self.grid_size) < 2:
            raise InvalidArgument("grid_size must be >= 2")
        if not self.weight_lambda > 0:
            raise InvalidArgument("weight_lambda must be > 0")
        self.grid_size = int(self.grid_size)


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    velocities: np.ndarray

    def csv_rows(self):
        n = self.states.shape[1]
        yield ["t"] + [f"x_{i + 1}" for i in range(n)] + [f"v_{i + 1}" for i in range(n)]
        for i, t in enumerate(self.times):
            v = self.velocities[i] if i < len(self.velocities) else [None] * n
            yield [t, *self.states[i], *v]


def _euler(x0, V, dt):
    Y = np.empty((V.shape[0] + 1, V.shape[1]))
    Y[0] = x0
    for i in range(V.shape[0]):
        Y[i + 1] = Y[i] + V[i] * dt
    return Y


def solve_inclusion(prob, cfg=None):
    """Picard sweeps over Euler trajectories.

    Sweep ``k + 1`` picks, at each grid time, the point of
    ``F(t_i, y^k(t_i))`` nearest to the previous sweep's velocity (zero on
    the first sweep) and integrates it with explicit Euler from ``x0``.
    Returns the last trajectory and a report whose residuals are the
    weighted distances between successive sweeps.
    """
    cfg = cfg or SolverConfig()
    N, n = prob.grid_size, prob.rhs.dimension
    times = np.array([i * prob.horizon / N for i in range(N + 1)])
    dt = prob.horizon / N
    weights = np.exp(-prob.weight_lambda * times)
    euclid = scalar_metric(n)

    Y = np.tile(prob.x0, (N + 1, 1))
    V = np.zeros((N, n))
    ends, residuals = [], []
    status = MAX_ITER
    for _ in range(cfg.max_iter):
        if not np.all(np.isfinite(Y)):
            status = DIVERGED
            break
        V_new = np.empty_like(V)
        for i in range(N):
            V_new[i] = select(V[i], prob.rhs.evaluate_at(times[i], Y[i]), euclid)
        Y_new = _euler(prob.x0, V_new, dt)
        gap = np.sqrt(((Y_new - Y) ** 2).sum(axis=1))
        r = float(np.max(weights * gap))
        Y, V = Y_new, V_new
        ends.append(Y[-1].copy())
        residuals.append(r)
        if not math.isfinite(r) or r > DIVERGENCE_THRESHOLD:
            status = DIVERGED
            break
        if r <= cfg.tol:
            status = CONVERGED
            break

    traj = Trajectory(times, Y, V)
    report = ConvergenceReport(ends, residuals, status,
                               Y[-1].copy() if status == CONVERGED else None)
    report.extra["sweeps"] = len(residuals)
    if status != DIVERGED:
        report.extra["feasibility_gap"] = feasibility_gap(prob, traj)
    return traj, report


def feasibility_gap(prob, traj):
    """Largest distance from ``velocities[i]`` to ``F(t_i, states[i])``."""
    worst = 0.0
    for i, v in enumerate(traj.velocities):
        pts = prob.rhs.evaluate_at(traj.times[i], traj.states[i]).points
        worst = max(worst, float(np.min(np.sqrt(((pts - v) ** 2).sum(axis=1)))))
    return worst


class ConvexSet:
    kind = None

    def project(self, x):
        raise NotImplementedError

    def contains(self, x, tol=1e-12):
        x = np.asarray(x, dtype=float)
        return bool(np.linalg.norm(self.project(x) - x) <= tol)


class Box(ConvexSet):
    kind = "box"

    def __init__(self, lo, hi):
        self.lo = np.atleast_1d(np.asarray(lo, dtype=float))
        self.hi = np.atleast_1d(np.asarray(hi, dtype=float))
        if self.lo.shape != self.hi.shape or np.any(self.lo > self.hi):
            raise InvalidArgument("box needs lo <= hi with matching shapes")
        self.dimension = self.lo.size

    def project(self, x):
        return np.clip(x, self.lo, self.hi)

    def to_dict(self):
        return {"kind": self.kind, "lo": self.lo.tolist(), "hi": self.hi.tolist()}


class Ball(ConvexSet):
    kind = "ball"

    def __init__(self, center, radius):
        self.center = np.atleast_1d(np.asarray(center, dtype=float))
        self.radius = float(radius)
        if not self.radius >= 0:
            raise InvalidArgument("ball radius must be >= 0")
        self.dimension = self.center.size

    def project(self, x):
        v = x - self.center
        r = np.linalg.norm(v)
        if r <= self.radius:
            return np.array(x, dtype=float)
        return self.center + v * (self.radius / r)

    def to_dict(self):
        return {"kind": self.kind, "center": self.center.tolist(), "radius": self.radius}


class Halfspace(ConvexSet):
    """``{x : <normal, x> <= offset}``."""

    kind = "halfspace"

    def __init__(self, normal, offset):
        self.normal = np.atleast_1d(np.asarray(normal, dtype=float))
        self.offset = float(offset)
        if not np.any(self.normal):
            raise InvalidArgument("halfspace normal must be nonzero")
        self.dimension = self.normal.size

    def project(self, x):
        excess = float(self.normal @ x) - self.offset
        if excess <= 0:
            return np.array(x, dtype=float)
        return x - (excess / float(self.normal @ self.normal)) * self.normal

    def to_dict(self):
        return {"kind": self.kind, "normal": self.normal.tolist(), "offset": self.offset}


CONSTRAINTS = {"box": (Box, ("lo", "hi")), "ball": (Ball, ("center", "radius")),
               "halfspace": (Halfspace, ("normal", "offset"))}


def constraint_from_dict(block):
    kind = block.get("kind")
    if kind not in CONSTRAINTS:
        raise InvalidArgument(f"unknown constraint kind {kind!r}; known: {sorted(CONSTRAINTS)}")
    cls, params = CONSTRAINTS[kind]
    extra = set(block) - set(params) - {"kind"}
    if extra:
        raise InvalidArgument(f"unknown keys for {kind}: {sorted(extra)}")
    missing = [p for p in params if p not in block]
    if missing:
        raise InvalidArgument(f"{kind} is missing parameters {missing}")
    return cls(**{p: block[p] for p in params})


def project(K, x):
    """Euclidean projection onto a catalog convex set."""
    x = np.asarray(x, dtype=float)
    if x.shape != (K.dimension,):
        raise InvalidArgument(f"point must have dimension {K.dimension}")
    return K.project(x)


@dataclass
class MviProblem:
    operator: MultiMap
    constraint: ConvexSet
    mu: float
    step_lambda: float
    cert: ContractionCertificate

    def __post_init__(self):
        if not self.mu > 0:
            raise InvalidArgument("mu must be > 0")
        if not self.step_lambda > 0:
            raise InvalidArgument("step_lambda must be > 0")
        if self.operator.dimension != self.constraint.dimension:
            raise InvalidArgument("operator and constraint dimensions differ")


def mvi_sigma_squared(mu, delta, L, step):
    return 1 - 2 * step * mu + step ** 2 * (delta + L) ** 2


def mvi_sigma(mu, delta, L, step):
    """Rate ``sqrt(1 - 2 step mu + step^2 (delta + L)^2)``, radicand clamped at 0."""
    return math.sqrt(max(0.0, mvi_sigma_squared(mu, delta, L, step)))


@dataclass
class StepSuggestion:
    step: float
    sigma: float
    clamped: bool
    warning: bool


def suggest_step(prob):
    """Step minimising ``sigma^2(step) = 1 - 2 step mu + step^2 s^2``, ``s = delta + L``.

    The minimiser is ``mu / s^2``. When the parabola dips below zero there
    (``mu > s``), the step is pulled back to the smaller root, where
    ``sigma = 0``. With ``s = 0`` the step is ``1 / mu`` and sigma is
    reported as 0.
    """
    mu = float(prob.mu)
    if not mu > 0:
        raise InvalidArgument("mu must be > 0")
    s = prob.cert.delta + prob.cert.L
    if s == 0:
        return StepSuggestion(1.0 / mu, 0.0, True, False)
    step = mu / s ** 2
    clamped = False
    if mvi_sigma_squared(mu, prob.cert.delta, prob.cert.L, step) < 0:
        step = (mu - math.sqrt(mu * mu - s * s)) / (s * s)
        return StepSuggestion(step, 0.0, True, False)
    sigma = mvi_sigma(mu, prob.cert.delta, prob.cert.L, step)
    return StepSuggestion(step, sigma, clamped, not sigma < 1)


def kkt_check(K, x, f, tol):
    """Check ``-f`` lies in the normal cone of ``K`` at ``x`` up to ``tol``."""
    x, f = np.asarray(x, dtype=float), np.asarray(f, dtype=float)
    if isinstance(K, Box):
        at_lo = x <= K.lo + tol
        at_hi = x >= K.hi - tol
        ok = np.where(at_lo & at_hi, True,
                      np.where(at_lo, f >= -tol, np.where(at_hi, f <= tol, np.abs(f) <= tol)))
        return bool(np.all(ok))
    if isinstance(K, Ball):
        v = x - K.center
        r = np.linalg.norm(v)
        if r < K.radius - tol or K.radius == 0:
            return bool(np.linalg.norm(f) <= tol) if K.radius > 0 else True
        u = v / r
    else:
        excess = float(K.normal @ x) - K.offset
        if excess < -tol:
            return bool(np.linalg.norm(f) <= tol)
        u = K.normal / np.linalg.norm(K.normal)
    along = float(f @ u)
    return bool(along <= tol and np.linalg.norm(f - along * u) <= tol)


def monotonicity_violations(F, mu, points, tol=1e-12):
    """Sampled pairs violating ``<f_x - f_y, x - y> >= mu ||x - y||^2`` for some selections."""
    bad = 0
    images = [F.evaluate(p).points for p in points]
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            dx = points[i] - points[j]
            inner = (images[i][:, None, :] - images[j][None, :, :]) @ dx
            if np.min(inner) < mu * float(dx @ dx) - tol:
                bad += 1
    return bad


def _sample_region(K, x0, count, seed):
    rng = np.random.default_rng(seed)
    if isinstance(K, Box):
        lo, hi = K.lo, K.hi
    elif isinstance(K, Ball):
        lo, hi = K.center - K.radius, K.center + K.radius
    else:
        lo, hi = x0 - 1, x0 + 1
    return [K.project(rng.uniform(lo, hi)) for _ in range(count)]


def solve_mvi(prob, x0, cfg=None, n_check=40):
    """Projected iteration for the multivalued variational inequality.

    ``f_n`` is the point of ``F(x_n)`` nearest to ``f_{n-1}`` (zero at the
    start). Converged when the natural residual
    ``||x_n - proj_K(x_n - step f_n)||`` is at most ``tol``. The report
    carries the formula rate ``sigma_mvi`` and sampled checks of the
    supplied ``mu`` and certificate; none of them gates the iteration.
    """
    cfg = cfg or SolverConfig()
    F, K, step = prob.operator, prob.constraint, float(prob.step_lambda)
    x = as_point(x0, name="x0").copy()
    if x.size != F.dimension:
        raise InvalidArgument("x0 dimension does not match the operator")
    euclid = scalar_metric(F.dimension)
    c = prob.cert
    sigma = mvi_sigma(prob.mu, c.delta, c.L, step)

    f = np.zeros(F.dimension)
    iterates, residuals = [x], []
    status = MAX_ITER
    for n in range(cfg.max_iter + 1):
        if not np.all(np.isfinite(x)):
            residuals.append(math.inf)
            status = DIVERGED
            break
        f = np.array(select(f, F.evaluate(x), euclid))
        x_next = K.project(x - step * f)
        r = float(np.linalg.norm(x - x_next))
        residuals.append(r)
        if not math.isfinite(r) or r > DIVERGENCE_THRESHOLD:
            status = DIVERGED
            break
        if r <= cfg.tol:
            status = CONVERGED
            break
        if n == cfg.max_iter:
            break
        x = x_next
        iterates.append(x)

    report = ConvergenceReport(iterates, residuals, status,
                               x.copy() if status == CONVERGED else None,
                               sigma=sigma, hypothesis_ok=bool(sigma < 1))
    kkt_tol = 10 * cfg.tol * max(1.0, 1.0 / step)
    samples = _sample_region(K, iterates[0], n_check, cfg.seed)
    pairs = [(samples[i], samples[i + 1]) for i in range(len(samples) - 1)]
    report.extra.update({
        "sigma_mvi": sigma,
        "sigma_squared": mvi_sigma_squared(prob.mu, c.delta, c.L, step),
        "step_lambda": step,
        "mu": prob.mu,
        "rate_condition": "sigma_mvi < 1",
        "mu_condition": bool(prob.mu > c.kappa * (c.delta + c.L)),
        "kkt_ok": bool(status == CONVERGED and kkt_check(K, x, f, kkt_tol)),
        "monotonicity_violations": monotonicity_violations(F, prob.mu, samples),
        "certificate_violations": len(verify_certificate(c, F, euclid, pairs)),
    })
    return report
