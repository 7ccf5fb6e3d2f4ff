"""Ordered vector spaces ``(R^m, P)`` with ``P`` the nonnegative orthant.

The order is ``a <= b`` iff ``b - a`` lies in ``P``. A cone is normal with
coefficient ``kappa`` when ``0 <= a <= b`` implies ``||a|| <= kappa ||b||``.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import InvalidArgument

STRICT_TOL = 1e-12


def as_vector(v, name="vector"):
    """Coerce ``v`` to a finite 1-D float array with at least one entry."""
    arr = np.atleast_1d(np.asarray(v, dtype=float))
    if arr.ndim != 1 or arr.size == 0:
        raise InvalidArgument(f"{name} must be a nonempty 1-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidArgument(f"{name} has non-finite coordinates")
    return arr


@dataclass(frozen=True)
class ConeSpec:
    """Orthant cone in ``R^dimension`` together with the ambient norm.

    ``norm`` is one of ``euclidean``, ``sup`` or ``weighted``; the weighted
    norm is ``||w * v||_2`` and needs positive ``weights``.
    """

    dimension: int
    norm: str = "euclidean"
    weights: tuple = None
    kind: str = "orthant"
    _w: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if int(self.dimension) < 1:
            raise InvalidArgument("cone dimension must be >= 1")
        if self.kind != "orthant":
            raise InvalidArgument(f"unsupported cone kind {self.kind!r}")
        if self.norm not in kernels.NORM_CODES:
            raise InvalidArgument(f"unknown norm {self.norm!r}")
        if self.norm == "weighted":
            if self.weights is None:
                raise InvalidArgument("weighted norm needs weights")
            w = as_vector(self.weights, "weights")
            if w.size != self.dimension or np.any(w <= 0):
                raise InvalidArgument("weights must be positive with one entry per dimension")
            object.__setattr__(self, "weights", tuple(float(x) for x in w))
        else:
            w = np.ones(self.dimension)
        object.__setattr__(self, "_w", w)

    @property
    def norm_code(self):
        return kernels.NORM_CODES[self.norm]

    @property
    def kappa(self):
        if self.norm == "weighted":
            return max(self.weights) / min(self.weights)
        return 1.0

    def zero(self):
        return np.zeros(self.dimension)

    def unit(self):
        return np.ones(self.dimension)

    def to_dict(self):
        out = {"dimension": self.dimension, "norm": self.norm}
        if self.weights is not None:
            out["weights"] = list(self.weights)
        return out


def _check_dim(v, spec, name="vector"):
    v = as_vector(v, name)
    if v.size != spec.dimension:
        raise InvalidArgument(
            f"{name} has dimension {v.size}, cone has dimension {spec.dimension}")
    return v


def cone_contains(v, spec, tol=0.0):
    """True iff every coordinate of ``v`` is ``>= -tol``."""
    v = _check_dim(v, spec)
    return bool(np.all(v >= -tol))


def leq(a, b, spec, tol=0.0):
    """Cone order ``a <= b``, with per-coordinate slack ``tol``."""
    a = _check_dim(a, spec, "a")
    b = _check_dim(b, spec, "b")
    return bool(np.all(b - a >= -tol))


def strictly_less(a, b, spec, strict_tol=STRICT_TOL):
    """Strict order: ``a <= b`` with every coordinate gap above ``strict_tol``."""
    a = _check_dim(a, spec, "a")
    b = _check_dim(b, spec, "b")
    return bool(np.all(b - a > strict_tol))


def norm(v, spec):
    v = _check_dim(v, spec)
    return kernels.vector_norm(v, spec.norm_code, spec._w)


def estimate_normality(spec, samples):
    """Largest observed ``||a|| / ||b||`` over pairs with ``0 <= a <= b``.

    This is a lower bound on the true normality coefficient.
    """
    samples = list(samples)
    if not samples:
        raise InvalidArgument("need at least one sample pair")
    best = 0.0
    for a, b in samples:
        if not (cone_contains(a, spec) and leq(a, b, spec)):
            raise InvalidArgument(f"sample pair violates 0 <= a <= b: {a!r}, {b!r}")
        nb = norm(b, spec)
        if nb == 0.0:
            raise InvalidArgument("sample with b = 0")
        best = max(best, norm(a, spec) / nb)
    return best
