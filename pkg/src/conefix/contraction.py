"""Sample-based weak-contraction certificates and the uniqueness check.

A map is a weak contraction with constants ``(delta, L)`` when

    H(Tx, Ty) <= delta * d(x, y) + L * inf_{z in Ty} d(x, z)

in the cone order. Constants fitted here are lower bounds on the true
ones: they hold on the supplied pairs and nowhere else is checked.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .cone_order import STRICT_TOL, strictly_less
from .errors import InvalidArgument, NoCertificateError
from .metric_space import as_point, distance
from .setmap import directed_distance, hausdorff

FIT_TOL = 1e-10
DEFAULT_L_GRID = tuple(round(0.1 * i, 1) for i in range(10))
DELTA_FLOOR = 1e-12


def hypotheses_hold(delta, L, kappa):
    """Existence hypotheses: ``delta*kappa < 1`` and ``L*kappa < 1 - delta*kappa``."""
    return bool(delta * kappa < 1 and L * kappa < 1 - delta * kappa)


@dataclass
class ContractionCertificate:
    delta: float
    L: float
    kappa: float
    hypotheses_hold: bool = None
    evidence: list = field(default_factory=list)
    worst_pair: tuple = None
    grid: list = field(default_factory=list)

    def __post_init__(self):
        if self.hypotheses_hold is None:
            self.hypotheses_hold = hypotheses_hold(self.delta, self.L, self.kappa)

    @property
    def rate(self):
        return self.delta + self.L

    def to_dict(self):
        out = {
            "delta": self.delta,
            "L": self.L,
            "kappa": self.kappa,
            "hypotheses_hold": self.hypotheses_hold,
            "worst_pair": None if self.worst_pair is None
            else [np.asarray(p).tolist() for p in self.worst_pair],
            "sampled": bool(self.evidence),
        }
        if self.grid:
            out["grid"] = self.grid
        return out


@dataclass(frozen=True)
class LinearComparator:
    """``phi(p) = c * p`` with ``0 < c < 1``."""

    c: float

    def __post_init__(self):
        if not 0 < self.c < 1:
            raise InvalidArgument("linear comparator needs 0 < c < 1")

    def __call__(self, p):
        return self.c * np.asarray(p, dtype=float)


def _pair_terms(T, metric, pairs):
    rows = []
    for x, y in pairs:
        x = as_point(x, metric, "x")
        y = as_point(y, metric, "y")
        if np.array_equal(x, y):
            continue
        Tx, Ty = T.evaluate(x), T.evaluate(y)
        d = distance(x, y, metric)
        H = hausdorff(Tx, Ty, metric)
        gap = directed_distance(x[None, :], Ty, metric)
        rows.append((x, y, d, H, gap))
    return rows


def _fit_delta(rows, L, fit_tol):
    """Minimal delta for fixed L, with the index of the pair attaining it."""
    best, worst = -np.inf, 0
    for idx, (_, _, d, H, gap) in enumerate(rows):
        excess = H - L * gap
        live = d > fit_tol
        if np.any(excess[~live] > fit_tol):
            return np.inf, idx
        if np.any(live):
            r = float(np.max(excess[live] / d[live]))
            if r > best:
                best, worst = r, idx
    return best, worst


def certify(T, metric, pairs, L_grid=DEFAULT_L_GRID, fit_tol=FIT_TOL):
    """Fit ``(delta, L)`` over sample pairs.

    For each ``L`` in the grid the smallest admissible ``delta`` is the
    worst ratio ``(H - L*gap)_i / d_i`` over pairs and coordinates. Among
    entries with ``delta`` in ``(0, 1)`` the one minimising
    ``kappa*(delta + L)`` is returned. Nonpositive ratios are lifted to a
    tiny positive ``delta``, which keeps the inequality valid.

    Raises
    ------
    NoCertificateError
        If no grid entry gives ``delta < 1``.
    """
    L_grid = [float(L) for L in L_grid]
    if not L_grid or any(L < 0 for L in L_grid):
        raise InvalidArgument("L_grid must be a nonempty list of nonnegative reals")
    rows = _pair_terms(T, metric, pairs)
    if not rows:
        raise InvalidArgument("no pairs of distinct points to certify on")
    kappa = metric.kappa

    grid, best = [], None
    fallback = None
    for L in L_grid:
        delta, worst = _fit_delta(rows, L, fit_tol)
        if delta <= 0:
            delta = DELTA_FLOOR
        grid.append({"L": L, "delta": delta})
        score = kappa * (delta + L)
        if delta < 1 and (best is None or score < best[0]):
            best = (score, delta, L, worst)
        if fallback is None or delta + L < fallback[0] + fallback[1]:
            fallback = (delta, L, worst)

    if best is None:
        delta, L, worst = fallback
        x, y = rows[worst][:2]
        raise NoCertificateError(
            f"no L in grid gives delta < 1 (best delta={delta:.6g} at L={L:g}, "
            f"worst pair x={x.tolist()}, y={y.tolist()})",
            delta, L, (x, y))

    _, delta, L, worst = best
    evidence = []
    for x, y, d, H, gap in rows:
        slack = delta * d + L * gap - H
        evidence.append({"x": x, "y": y, "slack": float(np.min(slack))})
    return ContractionCertificate(delta, L, kappa, evidence=evidence,
                                  worst_pair=(rows[worst][0], rows[worst][1]), grid=grid)


def verify_certificate(cert, T, metric, pairs, fit_tol=FIT_TOL):
    """Pairs (x, y) on which the certificate's inequality fails beyond ``fit_tol``."""
    bad = []
    for x, y, d, H, gap in _pair_terms(T, metric, pairs):
        if np.any(H > cert.delta * d + cert.L * gap + fit_tol):
            bad.append((x, y))
    return bad


def max_image_distance(Tx, Ty, metric):
    """Coordinatewise largest distance between a point of ``Tx`` and one of ``Ty``."""
    table = kernels.pair_table(Tx.points, Ty.points, *metric.kernel_args())
    return table.max(axis=(0, 1))


@dataclass
class UniquenessResult:
    holds: bool
    violating_pair: tuple = None
    comparator: str = "max_distance"

    def __bool__(self):
        return self.holds


def check_uniqueness_condition(T, metric, phi, pairs, comparator="max_distance",
                               strict_tol=STRICT_TOL):
    """Check ``D(Tx, Ty) < d(x, y) - phi(d(x, y))`` on every pair.

    ``comparator="hausdorff"`` takes ``D = H``, the literal condition. That
    alone does not rule out several fixed points when images have more
    than one point (two parallel contracting branches pass it), so the
    default ``"max_distance"`` uses the largest distance between image
    points, which does bound ``d(x*, y*)`` for fixed points ``x*, y*``.
    Both coincide for single-valued maps.

    A true result only means no violation was found on ``pairs``.
    """
    if comparator not in ("max_distance", "hausdorff"):
        raise InvalidArgument(f"unknown comparator {comparator!r}")
    for x, y in pairs:
        x = as_point(x, metric, "x")
        y = as_point(y, metric, "y")
        if np.array_equal(x, y):
            raise InvalidArgument("uniqueness check needs pairs of distinct points")
        Tx, Ty = T.evaluate(x), T.evaluate(y)
        if comparator == "hausdorff":
            lhs = hausdorff(Tx, Ty, metric)
        else:
            lhs = max_image_distance(Tx, Ty, metric)
        d = distance(x, y, metric)
        if not strictly_less(lhs, d - phi(d), metric.cone, strict_tol):
            return UniquenessResult(False, (x, y), comparator)
    return UniquenessResult(True, None, comparator)


def sample_pairs(T, count, box, seed=0):
    """Random certification pairs from the box ``[lo, hi]^n``.

    Half the pairs are independent uniform draws. The other half pair a
    uniform ``y`` with a point of ``T(y)``, where the displacement term
    ``inf_{z in Ty} d(x, z)`` vanishes and ``L`` cannot help.
    """
    lo, hi = box
    rng = np.random.default_rng(seed)
    n = T.dimension
    pairs = []
    for _ in range(count):
        x = rng.uniform(lo, hi, n)
        y = rng.uniform(lo, hi, n)
        pairs.append((x, y))
        pairs.append((T.evaluate(y)[0].copy(), y))
    return pairs
