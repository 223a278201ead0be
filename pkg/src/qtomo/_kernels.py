"""Compiled inner loops.

Two hot paths live here: the deque pass over angularly sorted halfplanes
and the per-direction order-statistic selection over large samples.
Everything else in the package is plain numpy.
"""
import math
import os

import numba
import numpy as np
from numba import njit, prange

if "NUMBA_THREADING_LAYER" not in os.environ:
    # prefer OpenMP; an outdated TBB only produces a warning at first use
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]


def set_threads_from_env():
    """Honour ``QTOMO_THREADS`` as a cap on kernel worker threads."""
    value = os.environ.get("QTOMO_THREADS")
    if not value:
        return
    try:
        want = int(value)
    except ValueError:
        return
    numba.set_num_threads(max(1, min(want, numba.config.NUMBA_NUM_THREADS)))

EMPTY = 0
POINT = 1
SEGMENT = 2
POLYGON = 3

# |sin| of the angle below which two normals count as parallel
PARALLEL_SIN = 1e-10


@njit(cache=True)
def _meet(nx, ny, q, a, b):
    det = nx[a] * ny[b] - ny[a] * nx[b]
    x = (q[a] * ny[b] - ny[a] * q[b]) / det
    y = (nx[a] * q[b] - q[a] * nx[b]) / det
    return x, y


@njit(cache=True)
def _violates(nx, ny, q, c, x, y, tol):
    return nx[c] * x + ny[c] * y < q[c] - tol


@njit(cache=True)
def halfplane_chain(nx, ny, q, tol):
    """Deque pass over halfplanes {x: n.x >= q} sorted by normal angle.

    Normals must be pairwise non-parallel and must not fit in a closed
    half circle. Returns ``(ok, lines)``: ``lines`` are the surviving
    constraint positions in angular order, or the witnesses of emptiness
    when ``ok`` is False.
    """
    m = nx.size
    dq = np.empty(m, np.int64)
    head = 0
    tail = 0
    for i in range(m):
        while tail - head >= 2:
            px, py = _meet(nx, ny, q, dq[tail - 2], dq[tail - 1])
            if _violates(nx, ny, q, i, px, py, tol):
                tail -= 1
            else:
                break
        while tail - head >= 2:
            px, py = _meet(nx, ny, q, dq[head], dq[head + 1])
            if _violates(nx, ny, q, i, px, py, tol):
                head += 1
            else:
                break
        if tail > head:
            b = dq[tail - 1]
            cr = nx[b] * ny[i] - ny[b] * nx[i]
            dot = nx[b] * nx[i] + ny[b] * ny[i]
            if abs(cr) < PARALLEL_SIN and dot < 0.0 and q[b] + q[i] > tol:
                w = np.empty(2, np.int64)
                w[0] = b
                w[1] = i
                return False, w
        dq[tail] = i
        tail += 1
    while tail - head >= 3:
        px, py = _meet(nx, ny, q, dq[tail - 2], dq[tail - 1])
        if _violates(nx, ny, q, dq[head], px, py, tol):
            tail -= 1
        else:
            break
    while tail - head >= 3:
        px, py = _meet(nx, ny, q, dq[head], dq[head + 1])
        if _violates(nx, ny, q, dq[tail - 1], px, py, tol):
            head += 1
        else:
            break
    return tail - head >= 3, dq[head:tail].copy()


@njit(cache=True)
def _cycle_vertices(nx, ny, q, lines):
    k = lines.size
    v = np.empty((k, 2))
    for j in range(k):
        x, y = _meet(nx, ny, q, lines[j], lines[(j + 1) % k])
        v[j, 0] = x
        v[j, 1] = y
    return v


@njit(cache=True)
def max_violation(nx, ny, q, lines):
    """Largest amount by which the chain's polygon violates any constraint.

    Both the constraints and ``lines`` are in angular order, so the vertex
    minimizing n.x for constraint h is found by a merge walk.
    """
    m = nx.size
    k = lines.size
    v = _cycle_vertices(nx, ny, q, lines)
    worst = -np.inf
    where = -1
    j = 0
    for h in range(m):
        while j < k - 1 and lines[j + 1] <= h:
            j += 1
        if h < lines[0] or j == k - 1:
            t = k - 1
        else:
            t = j
        viol = q[h] - (nx[h] * v[t, 0] + ny[h] * v[t, 1])
        if viol > worst:
            worst = viol
            where = h
    return worst, where


@njit(cache=True)
def _collapse(cloud, tol):
    k = cloud.shape[0]
    a = 0
    best = -1.0
    for t in range(k):
        d = (cloud[t, 0] - cloud[0, 0]) ** 2 + (cloud[t, 1] - cloud[0, 1]) ** 2
        if d > best:
            best = d
            a = t
    b = a
    best = -1.0
    for t in range(k):
        d = (cloud[t, 0] - cloud[a, 0]) ** 2 + (cloud[t, 1] - cloud[a, 1]) ** 2
        if d > best:
            best = d
            b = t
    if math.sqrt(best) <= tol:
        out = np.empty((1, 2))
        out[0, 0] = cloud[:, 0].mean()
        out[0, 1] = cloud[:, 1].mean()
        return POINT, out
    out = np.empty((2, 2))
    first, second = a, b
    if cloud[b, 0] < cloud[a, 0] or (cloud[b, 0] == cloud[a, 0]
                                     and cloud[b, 1] < cloud[a, 1]):
        first, second = b, a
    out[0, :] = cloud[first, :]
    out[1, :] = cloud[second, :]
    return SEGMENT, out


@njit(cache=True)
def _width(nx, ny, q, act, w):
    k = act.size
    c = act[0]
    ptr = 0
    best = nx[c] * w[0, 0] + ny[c] * w[0, 1]
    for t in range(1, k):
        val = nx[c] * w[t, 0] + ny[c] * w[t, 1]
        if val > best:
            best = val
            ptr = t
    width = np.inf
    for j in range(k):
        c = act[j]
        for _ in range(k):
            nxt = (ptr + 1) % k
            if (nx[c] * w[nxt, 0] + ny[c] * w[nxt, 1]
                    > nx[c] * w[ptr, 0] + ny[c] * w[ptr, 1]):
                ptr = nxt
            else:
                break
        ext = nx[c] * w[ptr, 0] + ny[c] * w[ptr, 1] - q[c]
        if ext < width:
            width = ext
    return width


@njit(cache=True)
def _prune_redundant(nx, ny, q, lines, tol):
    """Drop chain lines that the crossing of their neighbours satisfies.

    Several lines through one point leave a cluster of nearly equal
    vertices whose spread is pure rounding; a line is dropped when its two
    neighbours (less than a half turn apart) meet within ``tol`` of its
    feasible side, which moves the region by at most about ``tol``.
    """
    k = lines.size
    nxt = np.empty(k, np.int64)
    prv = np.empty(k, np.int64)
    for j in range(k):
        nxt[j] = (j + 1) % k
        prv[j] = (j - 1) % k
    alive = np.ones(k, np.bool_)
    stack = np.empty(3 * k + 3, np.int64)
    top = 0
    for j in range(k):
        stack[top] = j
        top += 1
    left = k
    while top > 0 and left > 3:
        top -= 1
        b = stack[top]
        if not alive[b]:
            continue
        a = lines[prv[b]]
        c = lines[nxt[b]]
        cr = nx[a] * ny[c] - ny[a] * nx[c]
        if cr <= PARALLEL_SIN:
            continue
        px, py = _meet(nx, ny, q, a, c)
        if nx[lines[b]] * px + ny[lines[b]] * py >= q[lines[b]] - tol:
            alive[b] = False
            left -= 1
            pa = prv[b]
            nc = nxt[b]
            nxt[pa] = nc
            prv[nc] = pa
            stack[top] = pa
            stack[top + 1] = nc
            top += 2
    return lines[alive]


@njit(cache=True)
def finalize_chain(nx, ny, q, lines, tol):
    """Turn a surviving chain into (kind, vertices, active positions)."""
    full = lines
    lines = _prune_redundant(nx, ny, q, lines, tol)
    k = lines.size
    v = _cycle_vertices(nx, ny, q, lines)
    keep = np.zeros(k, np.bool_)
    n_act = 0
    for j in range(k):
        pj = (j - 1) % k
        d = math.sqrt((v[j, 0] - v[pj, 0]) ** 2 + (v[j, 1] - v[pj, 1]) ** 2)
        if d > tol:
            keep[j] = True
            n_act += 1
    if n_act >= 3:
        act = lines[keep]
        w = _cycle_vertices(nx, ny, q, act)
        if _width(nx, ny, q, act, w) > tol:
            return POLYGON, w, act
        kind, pts = _collapse(w, tol)
        return kind, pts, full
    kind, pts = _collapse(v, tol)
    return kind, pts, full


@njit(cache=True)
def _select(v, m, k):
    """k-th smallest of v[:m] (0-based), rearranging v in place."""
    lo = 0
    hi = m - 1
    while hi > lo:
        mid = (lo + hi) >> 1
        # median of three as pivot
        if v[mid] < v[lo]:
            v[mid], v[lo] = v[lo], v[mid]
        if v[hi] < v[lo]:
            v[hi], v[lo] = v[lo], v[hi]
        if v[hi] < v[mid]:
            v[hi], v[mid] = v[mid], v[hi]
        pivot = v[mid]
        i = lo
        j = hi
        while i <= j:
            while v[i] < pivot:
                i += 1
            while v[j] > pivot:
                j -= 1
            if i <= j:
                v[i], v[j] = v[j], v[i]
                i += 1
                j -= 1
        if k <= j:
            hi = j
        elif k >= i:
            lo = i
        else:
            return v[k]
    return v[k]


@njit(cache=True)
def _scan4(x, y, a, b, lo, hi, proj, mask, buf):
    """Project, count values below each of four bands, gather band members.

    Bands are closed intervals ``[lo[g], hi[g]]``. ``mask[k]`` counts the
    bands holding value k using the same comparisons as the below-counts,
    so the two always agree. Returns ``(below, count)`` with the members of
    any band in ``buf[:count]``.
    """
    n = x.size
    lo0, lo1, lo2, lo3 = lo[0], lo[1], lo[2], lo[3]
    hi0, hi1, hi2, hi3 = hi[0], hi[1], hi[2], hi[3]
    c0 = 0
    c1 = 0
    c2 = 0
    c3 = 0
    for k in range(n):
        v = a * x[k] + b * y[k]
        proj[k] = v
        u0 = v < lo0
        u1 = v < lo1
        u2 = v < lo2
        u3 = v < lo3
        c0 += u0
        c1 += u1
        c2 += u2
        c3 += u3
        mask[k] = 4 - (u0 + u1 + u2 + u3) - ((v > hi0) + (v > hi1) + (v > hi2) + (v > hi3))
    cnt = 0
    for k in range(n):
        if mask[k]:
            buf[cnt] = proj[k]
            cnt += 1
    below = np.empty(4, np.int64)
    below[0] = c0
    below[1] = c1
    below[2] = c2
    below[3] = c3
    return below, cnt


@njit(cache=True)
def _pick(buf, cnt, lo, hi, rank, vals):
    """Value of 0-based ``rank`` among members of ``[lo, hi]``, or NaN."""
    m = 0
    for k in range(cnt):
        v = buf[k]
        vals[m] = v
        m += (v >= lo) & (v <= hi)
    if rank < 0 or rank >= m:
        return np.nan
    return _select(vals, m, rank)


@njit(cache=True)
def _pilot_band(pilot, rank, n):
    ns = pilot.size
    f = (rank + 0.5) / n
    c = f * ns
    w = 5.0 * math.sqrt(ns * f * (1.0 - f)) + 3.0
    klo = int(math.floor(c - w))
    khi = int(math.ceil(c + w))
    lo = pilot[klo] if klo >= 0 else -np.inf
    hi = pilot[khi] if khi < ns else np.inf
    return lo, hi


@njit(cache=True)
def _banded(x, y, a, b, ranks, lo, hi, proj, mask, buf, out):
    """Fill ``out`` for ranks whose band holds them; False if any missed."""
    r = ranks.size
    glo = np.empty(4)
    ghi = np.empty(4)
    ok = True
    for g0 in range(0, r, 4):
        for t in range(4):
            i = min(g0 + t, r - 1)
            glo[t] = lo[i]
            ghi[t] = hi[i]
        below, cnt = _scan4(x, y, a, b, glo, ghi, proj, mask, buf)
        # proj is free again and serves as selection scratch
        for t in range(min(4, r - g0)):
            i = g0 + t
            v = _pick(buf, cnt, glo[t], ghi[t], ranks[i] - below[t], proj)
            if v != v:
                ok = False
            out[i] = v
    return ok


@njit(cache=True)
def _sorted_stats(x, y, a, b, ranks, proj, out):
    for k in range(x.size):
        proj[k] = a * x[k] + b * y[k]
    proj.sort()
    for i in range(ranks.size):
        out[i] = proj[ranks[i]]


@njit(cache=True)
def _fresh(x, y, a, b, ranks, sub, proj, mask, buf, out):
    """Order statistics in a direction with no usable neighbour."""
    ns = sub.size
    if ns == 0:
        _sorted_stats(x, y, a, b, ranks, proj, out)
        return
    pilot = np.empty(ns)
    for k in range(ns):
        pilot[k] = a * x[sub[k]] + b * y[sub[k]]
    pilot.sort()
    r = ranks.size
    lo = np.empty(r)
    hi = np.empty(r)
    for i in range(r):
        lo[i], hi[i] = _pilot_band(pilot, ranks[i], x.size)
    if not _banded(x, y, a, b, ranks, lo, hi, proj, mask, buf, out):
        # the pilot band missed a rank
        _sorted_stats(x, y, a, b, ranks, proj, out)


@njit(parallel=True, cache=True)
def directional_order_stats(x, y, sx, sy, ranks, sub, chunks):
    """Order statistics (0-based ``ranks``) of x*sx[j] + y*sy[j] for each j.

    Directions are processed in ``chunks`` contiguous runs, each direction
    starting from its predecessor. Every projection moves by at most
    R*|s - t| around the centroid term (R the largest distance of a point
    from the centroid), which bounds the move of each order statistic. A
    narrower band predicted from the recent trend is tried first; any band
    is verified by exact counting and widened on a miss (predicted, then
    guaranteed, then pilot band, then a full sort). Results are therefore
    exact and do not depend on the chunking.
    """
    m = sx.size
    n = x.size
    r = ranks.size
    out = np.empty((m, r))
    if m == 0 or r == 0:
        return out
    mx = x.mean()
    my = y.mean()
    rad = 0.0
    for k in range(n):
        d = math.sqrt((x[k] - mx) ** 2 + (y[k] - my) ** 2)
        if d > rad:
            rad = d
    eps = 1e-12 * (rad + abs(mx) + abs(my)) + 1e-300
    chunks = max(1, min(chunks, m))
    for c in prange(chunks):
        proj = np.empty(n)
        mask = np.empty(n, np.int64)
        buf = np.empty(n)
        res = np.empty(r)
        last = np.empty(r)
        prev = np.empty(r)
        guess = np.empty(r)
        miss = np.empty(r)
        lo = np.empty(r)
        hi = np.empty(r)
        j0 = c * m // chunks
        j1 = (c + 1) * m // chunks
        step = 0.0
        for j in range(j0, j1):
            a = sx[j]
            b = sy[j]
            done = False
            warm = j > j0 and n > 64
            trend = warm and j > j0 + 1 and step > 0.0
            if warm:
                da = a - sx[j - 1]
                db = b - sy[j - 1]
                shift = da * mx + db * my
                rho = math.sqrt(da * da + db * db)
                w = rad * rho + eps
                for i in range(r):
                    last[i] = res[i]
                    guess[i] = res[i] + shift
                if trend:
                    ratio = rho / step
                    for i in range(r):
                        guess[i] = last[i] + (last[i] - prev[i]) * ratio
                        h = 4.0 * miss[i] + 0.02 * w + eps
                        lo[i] = max(guess[i] - h, last[i] + shift - w)
                        hi[i] = min(guess[i] + h, last[i] + shift + w)
                    done = _banded(x, y, a, b, ranks, lo, hi, proj, mask, buf, res)
                if not done:
                    for i in range(r):
                        lo[i] = last[i] + shift - w
                        hi[i] = last[i] + shift + w
                    done = _banded(x, y, a, b, ranks, lo, hi, proj, mask, buf, res)
            if not done:
                _fresh(x, y, a, b, ranks, sub, proj, mask, buf, res)
            if warm:
                for i in range(r):
                    miss[i] = abs(res[i] - guess[i])
                    prev[i] = last[i]
                step = rho
            out[j, :] = res
    return out



@njit(parallel=True, cache=True)
def depth_counts(px, py, qx, qy, atol):
    """Closed halfplane depth counts of probes (qx, qy) in the sample (px, py).

    For each probe the data angles are swept once: the deepest open
    half-turn window starting at a data angle holds the most points a line
    through the probe can cut off, and the depth is the rest. Angles within
    ``atol`` of the window edges count as on the line, i.e. inside every
    closed halfplane touching it.
    """
    n = px.size
    m = qx.size
    out = np.empty(m, np.int64)
    for t in prange(m):
        ang = np.empty(n)
        k0 = 0
        k = 0
        for i in range(n):
            dx = px[i] - qx[t]
            dy = py[i] - qy[t]
            if dx == 0.0 and dy == 0.0:
                k0 += 1
            else:
                ang[k] = math.atan2(dy, dx)
                k += 1
        if k == 0:
            out[t] = n
            continue
        a = np.sort(ang[:k])
        ext = np.empty(3 * k)
        for i in range(k):
            ext[i] = a[i] - 2.0 * math.pi
            ext[k + i] = a[i]
            ext[2 * k + i] = a[i] + 2.0 * math.pi
        lo = 0
        hi = k
        best = 0
        for i in range(k, 2 * k):
            while ext[lo] < ext[i] - atol:
                lo += 1
            if hi < i:
                hi = i
            while hi < 3 * k and ext[hi] < ext[i] + math.pi - atol:
                hi += 1
            c = hi - lo
            if c > best:
                best = c
        if best > k:
            best = k
        out[t] = k0 + k - best
    return out


@njit(cache=True)
def hull_indices(px, py):
    """Monotone chain hull of points sorted by (x, y); CCW vertex indices."""
    n = px.size
    h = np.empty(2 * n + 1, np.int64)
    k = 0
    for i in range(n):
        while k >= 2 and ((px[h[k - 1]] - px[h[k - 2]]) * (py[i] - py[h[k - 2]])
                          - (py[h[k - 1]] - py[h[k - 2]]) * (px[i] - px[h[k - 2]])) <= 0.0:
            k -= 1
        h[k] = i
        k += 1
    lower = k + 1
    for i in range(n - 2, -1, -1):
        while k >= lower and ((px[h[k - 1]] - px[h[k - 2]]) * (py[i] - py[h[k - 2]])
                              - (py[h[k - 1]] - py[h[k - 2]]) * (px[i] - px[h[k - 2]])) <= 0.0:
            k -= 1
        h[k] = i
        k += 1
    return h[:max(k - 1, 1)].copy()
