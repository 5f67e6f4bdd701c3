"""Numba kernels for exact point-to-boundary distances.

All geometry is handled in 3D; 2D segments are lifted with z = 0. Elements
are stored as ``(E, k, 3)`` coordinate arrays with k = 2 (segments) or
k = 3 (triangles). The BVH is a flat array layout produced by
:func:`meshdist.distance.build_index`.
"""

import numba
import numpy as np
from numba import njit, prange

# the bundled TBB is often too old; OpenMP is thread-safe and warning-free
numba.config.THREADING_LAYER_PRIORITY = ["omp", "tbb", "workqueue"]

# pruning slack so that rounding in the box bound never discards an element
# the linear scan would pick
_BOX_SLACK = 1e-12


@njit(cache=True, inline="always")
def _dot(ax, ay, az, bx, by, bz):
    return ax * bx + ay * by + az * bz


@njit(cache=True)
def seg_dist2(px, py, pz, e):
    ax, ay, az = e[0, 0], e[0, 1], e[0, 2]
    dx, dy, dz = e[1, 0] - ax, e[1, 1] - ay, e[1, 2] - az
    wx, wy, wz = px - ax, py - ay, pz - az
    ll = _dot(dx, dy, dz, dx, dy, dz)
    t = _dot(wx, wy, wz, dx, dy, dz)
    if t <= 0.0 or ll <= 0.0:
        t = 0.0
    elif t >= ll:
        t = 1.0
    else:
        t = t / ll
    cx, cy, cz = wx - t * dx, wy - t * dy, wz - t * dz
    return _dot(cx, cy, cz, cx, cy, cz)


@njit(cache=True)
def tri_dist2(px, py, pz, e):
    """Squared distance from a point to a triangle (closest-feature regions)."""
    ax, ay, az = e[0, 0], e[0, 1], e[0, 2]
    abx, aby, abz = e[1, 0] - ax, e[1, 1] - ay, e[1, 2] - az
    acx, acy, acz = e[2, 0] - ax, e[2, 1] - ay, e[2, 2] - az
    apx, apy, apz = px - ax, py - ay, pz - az

    d1 = _dot(abx, aby, abz, apx, apy, apz)
    d2 = _dot(acx, acy, acz, apx, apy, apz)
    if d1 <= 0.0 and d2 <= 0.0:
        return _dot(apx, apy, apz, apx, apy, apz)

    bpx, bpy, bpz = px - e[1, 0], py - e[1, 1], pz - e[1, 2]
    d3 = _dot(abx, aby, abz, bpx, bpy, bpz)
    d4 = _dot(acx, acy, acz, bpx, bpy, bpz)
    if d3 >= 0.0 and d4 <= d3:
        return _dot(bpx, bpy, bpz, bpx, bpy, bpz)

    vc = d1 * d4 - d3 * d2
    if vc <= 0.0 and d1 >= 0.0 and d3 <= 0.0:
        v = d1 / (d1 - d3)
        qx, qy, qz = apx - v * abx, apy - v * aby, apz - v * abz
        return _dot(qx, qy, qz, qx, qy, qz)

    cpx, cpy, cpz = px - e[2, 0], py - e[2, 1], pz - e[2, 2]
    d5 = _dot(abx, aby, abz, cpx, cpy, cpz)
    d6 = _dot(acx, acy, acz, cpx, cpy, cpz)
    if d6 >= 0.0 and d5 <= d6:
        return _dot(cpx, cpy, cpz, cpx, cpy, cpz)

    vb = d5 * d2 - d1 * d6
    if vb <= 0.0 and d2 >= 0.0 and d6 <= 0.0:
        w = d2 / (d2 - d6)
        qx, qy, qz = apx - w * acx, apy - w * acy, apz - w * acz
        return _dot(qx, qy, qz, qx, qy, qz)

    va = d3 * d6 - d5 * d4
    if va <= 0.0 and (d4 - d3) >= 0.0 and (d5 - d6) >= 0.0:
        w = (d4 - d3) / ((d4 - d3) + (d5 - d6))
        bcx, bcy, bcz = e[2, 0] - e[1, 0], e[2, 1] - e[1, 1], e[2, 2] - e[1, 2]
        qx, qy, qz = bpx - w * bcx, bpy - w * bcy, bpz - w * bcz
        return _dot(qx, qy, qz, qx, qy, qz)

    denom = 1.0 / (va + vb + vc)
    v = vb * denom
    w = vc * denom
    qx = apx - abx * v - acx * w
    qy = apy - aby * v - acy * w
    qz = apz - abz * v - acz * w
    return _dot(qx, qy, qz, qx, qy, qz)


@njit(cache=True)
def elem_dist2(px, py, pz, e):
    if e.shape[0] == 2:
        return seg_dist2(px, py, pz, e)
    return tri_dist2(px, py, pz, e)


@njit(cache=True)
def _box_dist2(px, py, pz, lo, hi):
    d = 0.0
    for axis, p in ((0, px), (1, py), (2, pz)):
        if p < lo[axis]:
            t = lo[axis] - p
            d += t * t
        elif p > hi[axis]:
            t = p - hi[axis]
            d += t * t
    return d


@njit(cache=True)
def _query_one(px, py, pz, elems, node_lo, node_hi, node_left, node_right, node_start, node_count, stop_below):
    """Exact minimum squared distance; stops early once it drops below ``stop_below``."""
    best = np.inf
    stack = np.empty(128, dtype=np.int64)
    top = 0
    stack[0] = 0
    top = 1
    while top > 0:
        top -= 1
        node = stack[top]
        bound = _box_dist2(px, py, pz, node_lo[node], node_hi[node])
        if bound > best * (1.0 + _BOX_SLACK):
            continue
        cnt = node_count[node]
        if cnt > 0:
            s = node_start[node]
            for i in range(s, s + cnt):
                d = elem_dist2(px, py, pz, elems[i])
                if d < best:
                    best = d
            if best < stop_below:
                return best
        else:
            left = node_left[node]
            right = node_right[node]
            bl = _box_dist2(px, py, pz, node_lo[left], node_hi[left])
            br = _box_dist2(px, py, pz, node_lo[right], node_hi[right])
            # visit the nearer child first
            if bl <= br:
                stack[top] = right
                stack[top + 1] = left
            else:
                stack[top] = left
                stack[top + 1] = right
            top += 2
    return best


@njit(cache=True, parallel=True)
def query_min_dist2(points, elems, node_lo, node_hi, node_left, node_right, node_start, node_count):
    n = points.shape[0]
    out = np.empty(n)
    for i in prange(n):
        out[i] = _query_one(
            points[i, 0], points[i, 1], points[i, 2], elems,
            node_lo, node_hi, node_left, node_right, node_start, node_count, -1.0,
        )
    return out


@njit(cache=True, parallel=True)
def query_within(points, radius, elems, node_lo, node_hi, node_left, node_right, node_start, node_count):
    """``sqrt(min distance) < radius`` for each point, with early termination."""
    n = points.shape[0]
    out = np.zeros(n, dtype=np.bool_)
    # any element with d2 below this certainly has sqrt(d2) < radius
    r2_safe = radius * radius * (1.0 - 4e-16)
    for i in prange(n):
        d2 = _query_one(
            points[i, 0], points[i, 1], points[i, 2], elems,
            node_lo, node_hi, node_left, node_right, node_start, node_count, r2_safe,
        )
        out[i] = np.sqrt(d2) < radius
    return out


@njit(cache=True, parallel=True)
def linear_min_dist2(points, elems):
    n = points.shape[0]
    out = np.empty(n)
    for i in prange(n):
        best = np.inf
        for j in range(elems.shape[0]):
            d = elem_dist2(points[i, 0], points[i, 1], points[i, 2], elems[j])
            if d < best:
                best = d
        out[i] = best
    return out
