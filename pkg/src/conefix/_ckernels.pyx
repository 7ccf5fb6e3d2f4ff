# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for pair distances, directed Hausdorff distances and
nearest-point selection. Mirrors ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, INFINITY

cnp.import_array()


cdef inline double _norm(const double[:] v, int code, const double[:] w) noexcept nogil:
    cdef Py_ssize_t i, n = v.shape[0]
    cdef double acc = 0.0, t
    if code == 1:
        for i in range(n):
            t = fabs(v[i])
            if t > acc:
                acc = t
        return acc
    if code == 2:
        for i in range(n):
            t = w[i] * v[i]
            acc += t * t
        return sqrt(acc)
    for i in range(n):
        acc += v[i] * v[i]
    return sqrt(acc)


cdef inline double _scalar_dist(const double[:] x, const double[:] y, int code,
                                const double[:] w) noexcept nogil:
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double acc = 0.0, t
    if code == 1:
        for i in range(n):
            t = fabs(x[i] - y[i])
            if t > acc:
                acc = t
        return acc
    if code == 2:
        for i in range(n):
            t = w[i] * (x[i] - y[i])
            acc += t * t
        return sqrt(acc)
    for i in range(n):
        t = x[i] - y[i]
        acc += t * t
    return sqrt(acc)


def vector_norm(v, int norm_code, w):
    cdef const double[:] vv = np.ascontiguousarray(v, dtype=np.float64)
    cdef const double[:] ww = np.ascontiguousarray(w, dtype=np.float64)
    return _norm(vv, norm_code, ww)


def pair_distance(x, y, bint componentwise, int norm_code, w):
    cdef const double[:] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[:] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef const double[:] ww = np.ascontiguousarray(w, dtype=np.float64)
    cdef Py_ssize_t i, n = xv.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out
    if componentwise:
        out = np.empty(n)
        for i in range(n):
            out[i] = fabs(xv[i] - yv[i])
        return out
    out = np.empty(1)
    out[0] = _scalar_dist(xv, yv, norm_code, ww)
    return out


def pair_table(A, B, bint componentwise, int norm_code, w):
    cdef const double[:, :] Av = np.ascontiguousarray(A, dtype=np.float64)
    cdef const double[:, :] Bv = np.ascontiguousarray(B, dtype=np.float64)
    cdef const double[:] ww = np.ascontiguousarray(w, dtype=np.float64)
    cdef Py_ssize_t ka = Av.shape[0], kb = Bv.shape[0], n = Av.shape[1]
    cdef Py_ssize_t i, j, c, m = n if componentwise else 1
    out_arr = np.empty((ka, kb, m))
    cdef double[:, :, :] out = out_arr
    with nogil:
        for i in range(ka):
            for j in range(kb):
                if componentwise:
                    for c in range(n):
                        out[i, j, c] = fabs(Av[i, c] - Bv[j, c])
                else:
                    out[i, j, 0] = _scalar_dist(Av[i], Bv[j], norm_code, ww)
    return out_arr


def directed_distance(A, B, bint componentwise, int norm_code, w):
    cdef const double[:, :] Av = np.ascontiguousarray(A, dtype=np.float64)
    cdef const double[:, :] Bv = np.ascontiguousarray(B, dtype=np.float64)
    cdef const double[:] ww = np.ascontiguousarray(w, dtype=np.float64)
    cdef Py_ssize_t ka = Av.shape[0], kb = Bv.shape[0], n = Av.shape[1]
    cdef Py_ssize_t i, j, c, m = n if componentwise else 1
    cdef double t, best
    out_arr = np.zeros(m)
    cdef double[:] out = out_arr
    cdef double[:] mins = np.empty(m)
    with nogil:
        for i in range(ka):
            for c in range(m):
                mins[c] = INFINITY
            for j in range(kb):
                if componentwise:
                    for c in range(n):
                        t = fabs(Av[i, c] - Bv[j, c])
                        if t < mins[c]:
                            mins[c] = t
                else:
                    t = _scalar_dist(Av[i], Bv[j], norm_code, ww)
                    if t < mins[0]:
                        mins[0] = t
            for c in range(m):
                if mins[c] > out[c]:
                    out[c] = mins[c]
    return out_arr


def nearest_index(y, B, bint componentwise, int norm_code, w, int cone_code, cone_w):
    cdef const double[:] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef const double[:, :] Bv = np.ascontiguousarray(B, dtype=np.float64)
    cdef const double[:] ww = np.ascontiguousarray(w, dtype=np.float64)
    cdef const double[:] cw = np.ascontiguousarray(cone_w, dtype=np.float64)
    cdef Py_ssize_t kb = Bv.shape[0], n = Bv.shape[1], j, c
    cdef Py_ssize_t best_j = 0
    cdef double best = INFINITY, t
    cdef double[:] buf = np.empty(n)
    with nogil:
        for j in range(kb):
            if componentwise:
                for c in range(n):
                    buf[c] = fabs(yv[c] - Bv[j, c])
                t = _norm(buf, cone_code, cw)
            else:
                t = fabs(_scalar_dist(yv, Bv[j], norm_code, ww))
                if cone_code == 2:
                    t = cw[0] * t
            if t < best:
                best = t
                best_j = j
    return best_j


cdef long long _triangle_row(const double[:, :, ::1] P, Py_ssize_t i, double tol,
                             unsigned char[:, ::1] mask) noexcept nogil:
    # P is plane-major (m, n, n); the inner loop runs over contiguous k
    cdef Py_ssize_t m = P.shape[0], n = P.shape[1], j, kk, c
    cdef long long count = 0
    cdef double base
    cdef const double* row_i
    cdef const double* row_j
    cdef unsigned char* out
    for j in range(n):
        out = &mask[j, 0]
        for kk in range(n):
            out[kk] = 0
        for c in range(m):
            base = P[c, i, j] + tol
            row_i = &P[c, i, 0]
            row_j = &P[c, j, 0]
            for kk in range(n):
                out[kk] |= row_i[kk] > base + row_j[kk]
        for kk in range(n):
            count += out[kk]
    return count


def triangle_violations(D, double tol, Py_ssize_t max_listed):
    """Count triples with ``D[i, k] > D[i, j] + D[j, k] + tol`` in some
    coordinate; also return the first ``max_listed`` of them."""
    cdef const double[:, :, ::1] d = np.ascontiguousarray(
        np.asarray(D, dtype=np.float64).transpose(2, 0, 1))
    cdef Py_ssize_t n = d.shape[1], i
    cdef long long total = 0, row
    mask_arr = np.zeros((n, n), dtype=np.uint8)
    cdef unsigned char[:, ::1] mask = mask_arr
    listed = []
    for i in range(n):
        with nogil:
            row = _triangle_row(d, i, tol, mask)
        if row:
            total += row
            if len(listed) < max_listed:
                js, ks = np.nonzero(mask_arr)
                for j, kk in zip(js, ks):
                    if len(listed) >= max_listed:
                        break
                    listed.append((int(i), int(j), int(kk)))
    return int(total), listed
