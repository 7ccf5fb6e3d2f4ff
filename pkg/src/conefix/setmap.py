"""Finite point sets, the multivalued-map catalog, Hausdorff cone distances
and nearest-point selection."""

import numpy as np

from . import kernels
from .cone_order import as_vector, cone_contains, leq
from .errors import InvalidArgument
from .metric_space import as_point

DEDUP_TOL = 1e-12


class FiniteSet:
    """Nonempty, deduplicated, ordered set of points in ``R^n``.

    Points closer than ``dedup_tol`` (euclidean) to an earlier point are
    dropped; insertion order is the canonical order used for tie-breaks.
    """

    __slots__ = ("points",)

    def __init__(self, points, dedup_tol=DEDUP_TOL):
        P = np.array(points, dtype=float)
        if P.ndim == 1:
            P = P[:, None]
        if P.ndim != 2 or P.shape[0] == 0:
            raise InvalidArgument("a finite set needs at least one point")
        keep = [0]
        for i in range(1, P.shape[0]):
            gaps = np.sqrt(((P[keep] - P[i]) ** 2).sum(axis=1))
            if np.all(gaps > dedup_tol):
                keep.append(i)
        self.points = P[keep] if len(keep) < P.shape[0] else P
        self.points.setflags(write=False)

    @property
    def dimension(self):
        return self.points.shape[1]

    def __len__(self):
        return self.points.shape[0]

    def __iter__(self):
        return iter(self.points)

    def __getitem__(self, i):
        return self.points[i]

    def __repr__(self):
        return f"FiniteSet({self.points.tolist()!r})"

    def tolist(self):
        return self.points.tolist()


def _as_set(S):
    return S if isinstance(S, FiniteSet) else FiniteSet(S)


def _matrix(A, n):
    A = np.asarray(A, dtype=float)
    if A.ndim == 0:
        return float(A) * np.eye(n)
    if A.shape != (n, n):
        raise InvalidArgument(f"matrix must be {n}x{n}, got {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidArgument("matrix has non-finite entries")
    return A


class MultiMap:
    """Base class for catalog maps ``T: R^n -> finite point sets``."""

    kind = None
    dimension = None

    def images(self, x):
        """Raw image points as a ``(k, n)`` array, before deduplication."""
        raise NotImplementedError

    def evaluate(self, x):
        x = as_point(x, name="x")
        if x.size != self.dimension:
            raise InvalidArgument(f"x has dimension {x.size}, map expects {self.dimension}")
        return FiniteSet(self.images(x))

    def to_dict(self):
        raise NotImplementedError

    def __eq__(self, other):
        return type(self) is type(other) and self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(repr(self.to_dict()))


class AffineSingle(MultiMap):
    """``T(x) = {A x + b}``."""

    kind = "affine_single"

    def __init__(self, A, b):
        self.b = as_vector(b, "b")
        self.dimension = self.b.size
        self.A = _matrix(A, self.dimension)

    def images(self, x):
        return (self.A @ x + self.b)[None, :]

    def to_dict(self):
        return {"kind": self.kind, "A": self.A.tolist(), "b": self.b.tolist()}


class TwoBranch(MultiMap):
    """``T(x) = {A1 x + b1, A2 x + b2}``."""

    kind = "two_branch"

    def __init__(self, A1, b1, A2, b2):
        self.b1 = as_vector(b1, "b1")
        self.b2 = as_vector(b2, "b2")
        if self.b1.size != self.b2.size:
            raise InvalidArgument("branch offsets differ in dimension")
        self.dimension = self.b1.size
        self.A1 = _matrix(A1, self.dimension)
        self.A2 = _matrix(A2, self.dimension)

    def images(self, x):
        return np.stack([self.A1 @ x + self.b1, self.A2 @ x + self.b2])

    def to_dict(self):
        return {"kind": self.kind, "A1": self.A1.tolist(), "b1": self.b1.tolist(),
                "A2": self.A2.tolist(), "b2": self.b2.tolist()}


class BallMap(MultiMap):
    """Discretised ball ``{A x + b + r u}`` with ``u`` in ``{0, +-e_1, ..., +-e_n}``.

    The center comes first, then ``+r e_i, -r e_i`` for each axis in turn.
    Only these ``2n + 1`` points are represented; anything finer is up to
    the caller.
    """

    kind = "ball_map"

    def __init__(self, A, b, r):
        self.b = as_vector(b, "b")
        self.dimension = self.b.size
        self.A = _matrix(A, self.dimension)
        self.r = float(r)
        if not np.isfinite(self.r) or self.r < 0:
            raise InvalidArgument("radius must be finite and >= 0")
        n = self.dimension
        offsets = np.zeros((2 * n + 1, n))
        for i in range(n):
            offsets[2 * i + 1, i] = self.r
            offsets[2 * i + 2, i] = -self.r
        self._offsets = offsets

    def images(self, x):
        return (self.A @ x + self.b)[None, :] + self._offsets

    def to_dict(self):
        return {"kind": self.kind, "A": self.A.tolist(), "b": self.b.tolist(), "r": self.r}


class PerturbedFamily(MultiMap):
    """Member ``n`` of the family ``T_n(x) = {A x + b + c / n}``."""

    kind = "perturbed_family"

    def __init__(self, A, b, c, n=1):
        self.b = as_vector(b, "b")
        self.c = as_vector(c, "c")
        if self.c.size != self.b.size:
            raise InvalidArgument("c and b differ in dimension")
        self.dimension = self.b.size
        self.A = _matrix(A, self.dimension)
        if int(n) < 1:
            raise InvalidArgument("family index n must be a positive integer")
        self.n = int(n)

    def member(self, n):
        return PerturbedFamily(self.A, self.b, self.c, n)

    def limit(self):
        return AffineSingle(self.A, self.b)

    def images(self, x):
        return (self.A @ x + self.b + self.c / self.n)[None, :]

    def to_dict(self):
        return {"kind": self.kind, "A": self.A.tolist(), "b": self.b.tolist(),
                "c": self.c.tolist(), "n": self.n}


class TimeDependent:
    """Right-hand side ``F(t, x) = base(x) + t * drift`` for differential inclusions."""

    def __init__(self, base, drift=None):
        self.base = base
        self.dimension = base.dimension
        self.drift = np.zeros(self.dimension) if drift is None else as_vector(drift, "drift")
        if self.drift.size != self.dimension:
            raise InvalidArgument("drift dimension does not match the base map")

    def evaluate_at(self, t, x):
        x = as_point(x, name="x")
        if x.size != self.dimension:
            raise InvalidArgument(f"x has dimension {x.size}, map expects {self.dimension}")
        return FiniteSet(self.base.images(x) + t * self.drift)

    def to_dict(self):
        out = dict(self.base.to_dict())
        out["drift"] = self.drift.tolist()
        return out


CATALOG = {
    "affine_single": (AffineSingle, ("A", "b")),
    "two_branch": (TwoBranch, ("A1", "b1", "A2", "b2")),
    "ball_map": (BallMap, ("A", "b", "r")),
    "perturbed_family": (PerturbedFamily, ("A", "b", "c", "n")),
}


def map_from_dict(block):
    """Build a catalog map from ``{"kind": ..., <parameters>}``."""
    if "kind" not in block:
        raise InvalidArgument("map block needs a 'kind'")
    kind = block["kind"]
    if kind not in CATALOG:
        raise InvalidArgument(f"unknown map kind {kind!r}; known: {sorted(CATALOG)}")
    cls, params = CATALOG[kind]
    extra = set(block) - set(params) - {"kind"}
    if extra:
        raise InvalidArgument(f"unknown keys for {kind}: {sorted(extra)}")
    required = [p for p in params if not (kind == "perturbed_family" and p == "n")]
    missing = [p for p in required if p not in block]
    if missing:
        raise InvalidArgument(f"{kind} is missing parameters {missing}")
    return cls(**{p: block[p] for p in params if p in block})


def evaluate(T, x):
    return T.evaluate(x)


def _check_sets(A, B, metric):
    A, B = _as_set(A), _as_set(B)
    if A.dimension != metric.dimension or B.dimension != metric.dimension:
        raise InvalidArgument(
            f"set dimensions {A.dimension}, {B.dimension} do not match metric dimension "
            f"{metric.dimension}")
    return A, B


def directed_distance(A, B, metric):
    """Least cone vector ``r`` with ``inf_b d(a, b) <= r`` for every ``a`` in ``A``.

    In the orthant this is ``max_a min_b d(a, b)_i`` coordinate by coordinate.
    """
    A, B = _check_sets(A, B, metric)
    return kernels.directed_distance(A.points, B.points, *metric.kernel_args())


def hausdorff(A, B, metric):
    A, B = _check_sets(A, B, metric)
    args = metric.kernel_args()
    return np.maximum(kernels.directed_distance(A.points, B.points, *args),
                      kernels.directed_distance(B.points, A.points, *args))


def select(y, target, metric, slack=None):
    """Pick a point of ``target`` close to ``y``.

    With zero slack this is the norm-nearest point (lowest index on ties).
    With slack ``eps`` it returns the first point ``z`` in canonical order
    satisfying ``d(y, z) <= d(y, z*) + eps``, where ``z*`` is the nearest
    point, i.e. any point admissible under the selection bound.
    """
    target = _as_set(target)
    y = as_point(y, metric, "y")
    if target.dimension != metric.dimension:
        raise InvalidArgument("target dimension does not match metric")
    cone = metric.cone
    j = kernels.nearest_index(y, target.points, *metric.kernel_args(),
                              cone.norm_code, cone._w)
    if slack is None:
        return target.points[j]
    slack = as_vector(slack, "slack")
    if not cone_contains(slack, cone):
        raise InvalidArgument("slack must lie in the cone")
    if not np.any(slack):
        return target.points[j]
    args = metric.kernel_args()
    bound = kernels.pair_distance(y, target.points[j], *args) + slack
    for z in target.points[:j]:
        if leq(kernels.pair_distance(y, z, *args), bound, cone):
            return z
    return target.points[j]
