"""Cone metrics on points of ``R^n`` and a sampled axiom checker."""

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .cone_order import ConeSpec, as_vector
from .errors import InvalidArgument

TRIANGLE_TOL = 1e-12


@dataclass(frozen=True)
class MetricSpec:
    """A builtin cone metric.

    ``scalar``: ``d(x, y) = ||x - y||`` as a one-dimensional cone vector,
    with the point norm given by ``norm``/``weights`` (on ``R^n``).
    ``componentwise``: ``d(x, y)_i = |x_i - y_i|``, valued in ``R^n``.
    """

    kind: str
    dimension: int
    cone: ConeSpec
    norm: str = "euclidean"
    weights: tuple = None
    _w: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in ("scalar", "componentwise"):
            raise InvalidArgument(f"unknown metric kind {self.kind!r}")
        if int(self.dimension) < 1:
            raise InvalidArgument("metric dimension must be >= 1")
        if self.kind == "scalar" and self.cone.dimension != 1:
            raise InvalidArgument("scalar metric needs a one-dimensional cone")
        if self.kind == "componentwise" and self.cone.dimension != self.dimension:
            raise InvalidArgument("componentwise metric needs cone dimension == point dimension")
        if self.norm not in kernels.NORM_CODES:
            raise InvalidArgument(f"unknown norm {self.norm!r}")
        if self.norm == "weighted":
            if self.weights is None:
                raise InvalidArgument("weighted norm needs weights")
            w = as_vector(self.weights, "weights")
            if w.size != self.dimension or np.any(w <= 0):
                raise InvalidArgument("metric weights must be positive, one per coordinate")
            object.__setattr__(self, "weights", tuple(float(x) for x in w))
        else:
            w = np.ones(self.dimension)
        object.__setattr__(self, "_w", w)

    @property
    def componentwise(self):
        return self.kind == "componentwise"

    @property
    def kappa(self):
        return self.cone.kappa

    def kernel_args(self):
        return self.componentwise, kernels.NORM_CODES[self.norm], self._w

    def to_dict(self):
        out = {"kind": self.kind, "dimension": self.dimension, "cone": self.cone.to_dict()}
        if self.kind == "scalar":
            out["norm"] = self.norm
            if self.weights is not None:
                out["weights"] = list(self.weights)
        return out


def scalar_metric(n, norm="euclidean", weights=None):
    return MetricSpec("scalar", n, ConeSpec(1), norm=norm, weights=weights)


def componentwise_metric(n, cone_norm="euclidean", cone_weights=None):
    return MetricSpec("componentwise", n, ConeSpec(n, norm=cone_norm, weights=cone_weights))


def as_point(x, spec=None, name="point"):
    x = as_vector(x, name)
    if spec is not None and x.size != spec.dimension:
        raise InvalidArgument(f"{name} has dimension {x.size}, expected {spec.dimension}")
    return x


def distance(x, y, spec):
    """Cone-valued distance between two points."""
    x = as_point(x, spec, "x")
    y = as_point(y, spec, "y")
    return kernels.pair_distance(x, y, *spec.kernel_args())


def distance_matrix(points, spec):
    """All pairwise distances, shape ``(k, k, m)``."""
    P = np.asarray(points, dtype=float)
    if P.ndim != 2 or P.shape[1] != spec.dimension:
        raise InvalidArgument(f"points must have shape (k, {spec.dimension})")
    return kernels.pair_table(P, P, *spec.kernel_args())


@dataclass
class AxiomReport:
    n_points: int
    n_pairs: int
    n_triples: int
    identity_failures: list
    symmetry_failures: list
    triangle_failures: list
    n_triangle_failures: int = 0

    @property
    def passed(self):
        return not (self.identity_failures or self.symmetry_failures or self.n_triangle_failures)

    def to_dict(self, limit=20):
        return {
            "passed": self.passed,
            "n_points": self.n_points,
            "n_pairs": self.n_pairs,
            "n_triples": self.n_triples,
            "identity_failures": self.identity_failures[:limit],
            "symmetry_failures": self.symmetry_failures[:limit],
            "triangle_failures": self.triangle_failures[:limit],
            "n_triangle_failures": self.n_triangle_failures,
        }


def check_metric_axioms(spec, points, distance_fn=None, tol=TRIANGLE_TOL, max_listed=100):
    """Check identity, symmetry and the cone triangle inequality.

    Every ordered pair and every triple of ``points`` is examined. A custom
    ``distance_fn(x, y)`` may replace the builtin metric, which is how a
    broken metric is fed through the same checker.
    """
    P = np.asarray(points, dtype=float)
    if P.ndim != 2 or P.shape[0] < 3:
        raise InvalidArgument("need at least 3 points")
    if P.shape[1] != spec.dimension:
        raise InvalidArgument(f"points must have dimension {spec.dimension}")
    k = P.shape[0]
    if distance_fn is None:
        D = distance_matrix(P, spec)
    else:
        D = np.array([[np.atleast_1d(distance_fn(P[i], P[j])) for j in range(k)]
                      for i in range(k)], dtype=float)

    same = (P[:, None, :] == P[None, :, :]).all(axis=2)
    zero = ~D.any(axis=2)
    in_cone = (D >= 0).all(axis=2)
    bad_identity = (same != zero) | ~in_cone
    identity = [(int(i), int(j)) for i, j in zip(*np.nonzero(bad_identity))]
    asym = np.triu(~(D == D.transpose(1, 0, 2)).all(axis=2), 1)
    symmetry = [(int(i), int(j)) for i, j in zip(*np.nonzero(asym))]

    # d(i,k) <= d(i,j) + d(j,k): vectorised over (j, k) for each i
    n_bad, triangle = kernels.triangle_violations(D, tol, max_listed)
    return AxiomReport(k, k * (k - 1) // 2, k ** 3, identity, symmetry, triangle, n_bad)
