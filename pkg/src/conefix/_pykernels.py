"""NumPy implementation of the hot kernels.

Used when the compiled ``_ckernels`` extension is unavailable or when
``CONEFIX_PURE_PYTHON=1`` is set. Signatures match ``_ckernels.pyx``.

Norm codes: 0 euclidean, 1 sup, 2 weighted euclidean ``||w * v||_2``.
"""

from itertools import islice

import numpy as np

EUCLIDEAN, SUP, WEIGHTED = 0, 1, 2


def _norms(diff, norm_code, w):
    # reduce over the last axis
    if norm_code == EUCLIDEAN:
        return np.sqrt(np.sum(diff * diff, axis=-1))
    if norm_code == SUP:
        return np.max(np.abs(diff), axis=-1)
    scaled = diff * w
    return np.sqrt(np.sum(scaled * scaled, axis=-1))


def vector_norm(v, norm_code, w):
    return float(_norms(np.asarray(v, dtype=float), norm_code, w))


def _pair_table(A, B, componentwise, norm_code, w):
    diff = A[:, None, :] - B[None, :, :]
    if componentwise:
        return np.abs(diff)
    return _norms(diff, norm_code, w)[:, :, None]


def pair_table(A, B, componentwise, norm_code, w):
    return _pair_table(A, B, componentwise, norm_code, w)


def pair_distance(x, y, componentwise, norm_code, w):
    return _pair_table(x[None, :], y[None, :], componentwise, norm_code, w)[0, 0]


def directed_distance(A, B, componentwise, norm_code, w):
    table = _pair_table(A, B, componentwise, norm_code, w)
    return table.min(axis=1).max(axis=0)


def nearest_index(y, B, componentwise, norm_code, w, cone_code, cone_w):
    d = _pair_table(y[None, :], B, componentwise, norm_code, w)[0]
    # np.argmin returns the first minimiser, which is the tie-break we want
    return int(np.argmin(_norms(d, cone_code, cone_w)))


def triangle_violations(D, tol, max_listed):
    D = np.asarray(D, dtype=float)
    k = D.shape[0]
    planes = np.ascontiguousarray(D.transpose(2, 0, 1))
    rhs = np.empty((k, k))
    cmp = np.empty((k, k), dtype=bool)
    bad = np.empty((k, k), dtype=bool)
    listed, count = [], 0
    for i in range(k):
        bad.fill(False)
        for P in planes:
            # d(i,k) - d(j,k) > d(i,j) + tol
            np.subtract(P[i][None, :], P, out=rhs)
            np.greater(rhs, (P[i] + tol)[:, None], out=cmp)
            bad |= cmp
        n_i = int(bad.sum())
        if n_i:
            count += n_i
            if len(listed) < max_listed:
                js, ks = np.nonzero(bad)
                listed.extend((i, int(j), int(kk)) for j, kk in
                              islice(zip(js, ks), max_listed - len(listed)))
    return count, listed
