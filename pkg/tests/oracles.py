"""Independent reference computations used to freeze expected values.

Nothing here calls into conefix: distances are recomputed from scratch
with plain Python loops.
"""

import itertools
import math


def cone_distance(x, y, kind, norm="euclidean", weights=None):
    diff = [a - b for a, b in zip(x, y)]
    if kind == "componentwise":
        return [abs(t) for t in diff]
    if norm == "sup":
        return [max(abs(t) for t in diff)]
    if norm == "weighted":
        return [math.sqrt(sum((w * t) ** 2 for w, t in zip(weights, diff)))]
    return [math.sqrt(sum(t * t for t in diff))]


def pair_table(A, B, dist):
    return [[dist(a, b) for b in B] for a in A]


def directed(A, B, dist):
    """max over a of min over b, one cone coordinate at a time, by loops."""
    table = pair_table(A, B, dist)
    m = len(table[0][0])
    out = []
    for c in range(m):
        worst = 0.0
        for row in table:
            best = math.inf
            for d in row:
                if d[c] < best:
                    best = d[c]
            if best > worst:
                worst = best
        out.append(worst)
    return out


def hausdorff(A, B, dist):
    return [max(u, v) for u, v in zip(directed(A, B, dist), directed(B, A, dist))]


def lattice_hausdorff(A, B, dist):
    """Greatest lower bound of the feasible radii, by enumerating choice functions.

    A feasible radius r needs, for each a, some b with d(a, b) <= r, and
    vice versa. For a fixed choice a -> b(a), b -> a(b) the least feasible
    radius is the coordinatewise max of the chosen distances; the infimum
    over all choices is taken coordinatewise.
    """
    best = None
    for fa in itertools.product(range(len(B)), repeat=len(A)):
        for fb in itertools.product(range(len(A)), repeat=len(B)):
            ds = [dist(A[i], B[j]) for i, j in enumerate(fa)]
            ds += [dist(B[j], A[i]) for j, i in enumerate(fb)]
            r = [max(d[c] for d in ds) for c in range(len(ds[0]))]
            best = r if best is None else [min(u, v) for u, v in zip(best, r)]
    return best


def euler_decay(n_steps, horizon=1.0, x0=1.0):
    """Explicit Euler for x' = -x by a plain loop."""
    h = horizon / n_steps
    x = x0
    for _ in range(n_steps):
        x = x - h * x
    return x


def box_vi_grid(F, lo, hi, step):
    """Grid point of a 2-D box minimising the VI gap max_y <F(x), x - y>."""
    best, arg = math.inf, None
    nx = int(round((hi[0] - lo[0]) / step))
    ny = int(round((hi[1] - lo[1]) / step))
    for i in range(nx + 1):
        for j in range(ny + 1):
            x = (lo[0] + i * step, lo[1] + j * step)
            f = F(x)
            # the linear form <f, y> is minimised at a vertex of the box
            ymin = [lo[k] if f[k] > 0 else hi[k] for k in range(2)]
            gap = sum(f[k] * (x[k] - ymin[k]) for k in range(2))
            if gap < best:
                best, arg = gap, x
    return arg, best
