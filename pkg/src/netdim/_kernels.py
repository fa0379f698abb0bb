"""numba kernels for the inner loops that cannot be vectorized well.

Everything here is single-threaded and deterministic: randomness comes
from splitmix64 streams keyed by caller-supplied seeds, never from global
state. Kernels are cached on disk, so the compile cost is paid once.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV_2_53 = 1.0 / 9007199254740992.0


@njit(cache=True, nogil=True, inline="always")
def _mix_to_unit(key, seed64):
    # identical to rng.keyed_uniforms for a single key
    z = (key ^ seed64) + _GOLDEN
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    z = z ^ (z >> _S31)
    return (z >> _S11) * _INV_2_53


@njit(cache=True, nogil=True, inline="always")
def _splitmix_next(state):
    z = state + _GOLDEN
    mixed = z
    mixed = (mixed ^ (mixed >> _S30)) * _MIX1
    mixed = (mixed ^ (mixed >> _S27)) * _MIX2
    mixed = mixed ^ (mixed >> _S31)
    return z, (mixed >> _S11) * _INV_2_53


@njit(cache=True, nogil=True)
def grid_query_band(pos, radii, p, seed64, queries, g, cell_starts, cell_points):
    """Range queries for one grid band.

    cell_starts/cell_points form a CSR index over the g^m uniform cells
    (points bucketed by cell id, row-major over axes). Each query visits
    the cells covering its influence box, at most three per axis, and
    tests gathered points exactly once.
    """
    n, m = pos.shape
    un = np.uint64(n)
    axcells = np.empty((m, 3), dtype=np.int64)
    axlen = np.empty(m, dtype=np.int64)
    odo = np.empty(m, dtype=np.int64)
    cap = 1024
    us = np.empty(cap, dtype=np.int64)
    ts = np.empty(cap, dtype=np.int64)
    cnt = 0
    for qi in range(queries.size):
        t = queries[qi]
        r = radii[t]
        for d in range(m):
            lo = np.int64(np.floor((pos[t, d] - r) * g))
            hi = np.int64(np.floor((pos[t, d] + r) * g))
            span = hi - lo + 1
            if span > g:
                span = g
            axlen[d] = span
            for j in range(span):
                axcells[d, j] = (lo + j) % g
            odo[d] = 0
        while True:
            cell = np.int64(0)
            for d in range(m):
                cell = cell * g + axcells[d, odo[d]]
            for k in range(cell_starts[cell], cell_starts[cell + 1]):
                u = cell_points[k]
                if u >= t:
                    continue
                ok = True
                for d in range(m):
                    dd = abs(pos[t, d] - pos[u, d])
                    if dd > 0.5:
                        dd = 1.0 - dd
                    if dd > r:
                        ok = False
                        break
                if not ok:
                    continue
                if p < 1.0:
                    key = np.uint64(t) * un + np.uint64(u)
                    if _mix_to_unit(key, seed64) >= p:
                        continue
                if cnt == cap:
                    cap *= 2
                    grown_u = np.empty(cap, dtype=np.int64)
                    grown_t = np.empty(cap, dtype=np.int64)
                    grown_u[:cnt] = us
                    grown_t[:cnt] = ts
                    us = grown_u
                    ts = grown_t
                us[cnt] = u
                ts[cnt] = t
                cnt += 1
            d = m - 1
            while d >= 0:
                odo[d] += 1
                if odo[d] < axlen[d]:
                    break
                odo[d] = 0
                d -= 1
            if d < 0:
                break
    return us[:cnt], ts[:cnt]


@njit(cache=True, nogil=True)
def scan_rows(pos, radii, p, seed64, rows):
    """Pair scan of arriving rows against all earlier nodes.

    For each t in rows, links every u < t within torus L-infinity distance
    radii[t], keeping the pair with probability p via a coin keyed on
    (seed64, t * n + u). Returns (earlier, later) id arrays.
    """
    n, m = pos.shape
    un = np.uint64(n)
    cap = 1024
    us = np.empty(cap, dtype=np.int64)
    ts = np.empty(cap, dtype=np.int64)
    cnt = 0
    for ri in range(rows.size):
        t = rows[ri]
        r = radii[t]
        for u in range(t):
            ok = True
            for d in range(m):
                dd = abs(pos[t, d] - pos[u, d])
                if dd > 0.5:
                    dd = 1.0 - dd
                if dd > r:
                    ok = False
                    break
            if not ok:
                continue
            if p < 1.0:
                key = np.uint64(t) * un + np.uint64(u)
                if _mix_to_unit(key, seed64) >= p:
                    continue
            if cnt == cap:
                cap *= 2
                grown_u = np.empty(cap, dtype=np.int64)
                grown_t = np.empty(cap, dtype=np.int64)
                grown_u[:cnt] = us
                grown_t[:cnt] = ts
                us = grown_u
                ts = grown_t
            us[cnt] = u
            ts[cnt] = t
            cnt += 1
    return us[:cnt], ts[:cnt]


@njit(cache=True, nogil=True)
def bfs_distance_counts(indptr, indices, sources):
    """Histogram of ordered reachable pairs by exact distance.

    hist[d] counts pairs (s, v), v != s, with dist(s, v) == d, summed over
    the given source nodes. The returned array is trimmed to the largest
    distance seen.
    """
    n = indptr.size - 1
    hist = np.zeros(n + 1, dtype=np.int64)
    dist = np.empty(n, dtype=np.int32)
    queue = np.empty(n, dtype=np.int64)
    maxd = 0
    for si in range(sources.size):
        s = sources[si]
        dist[:] = -1
        dist[s] = 0
        queue[0] = s
        head = 0
        tail = 1
        while head < tail:
            v = queue[head]
            head += 1
            dv = dist[v]
            for ei in range(indptr[v], indptr[v + 1]):
                w = indices[ei]
                if dist[w] < 0:
                    dist[w] = dv + 1
                    queue[tail] = w
                    tail += 1
                    hist[dv + 1] += 1
                    if dv + 1 > maxd:
                        maxd = dv + 1
    return hist[: maxd + 1]


@njit(cache=True, nogil=True, inline="always")
def _has_edge(indptr, indices, a, b):
    lo = indptr[a]
    hi = indptr[a + 1]
    while lo < hi:
        mid = (lo + hi) >> 1
        val = indices[mid]
        if val == b:
            return 1
        if val < b:
            lo = mid + 1
        else:
            hi = mid
    return 0


@njit(cache=True, nogil=True)
def esu_accumulate(indptr, indices, k, pd, weight, seed64, counts):
    """Enumerate connected induced k-subgraphs, each vertex set once.

    Candidate extensions at every depth survive an independent coin with
    probability pd (skipped entirely when pd == 1), and every surviving
    complete subgraph adds `weight` to its class bin in `counts`: 3-node
    classes land in bins 0..1, 4-node classes in bins 2..7. The coin
    stream is a sequential splitmix64 run seeded by seed64, so a call is
    deterministic and single-threaded.
    """
    n = indptr.size - 1
    nbr_mark = np.zeros(n, dtype=np.uint8)
    sub = np.empty(k, dtype=np.int64)
    ebuf = np.empty((k, n), dtype=np.int64)
    elen = np.zeros(k, dtype=np.int64)
    eidx = np.zeros(k, dtype=np.int64)
    undo = np.empty(k * n + 1, dtype=np.int64)
    undo_start = np.zeros(k + 1, dtype=np.int64)
    state = seed64

    for v in range(n):
        undo_ptr = 0
        nbr_mark[v] = 1
        undo[undo_ptr] = v
        undo_ptr += 1
        cnt = 0
        for ei in range(indptr[v], indptr[v + 1]):
            u = indices[ei]
            if nbr_mark[u] == 0:
                nbr_mark[u] = 1
                undo[undo_ptr] = u
                undo_ptr += 1
            if u > v:
                ebuf[1, cnt] = u
                cnt += 1
        elen[1] = cnt
        eidx[1] = 0
        sub[0] = v
        d = 1
        while d >= 1:
            if eidx[d] >= elen[d]:
                if d >= 2:
                    while undo_ptr > undo_start[d]:
                        undo_ptr -= 1
                        nbr_mark[undo[undo_ptr]] = 0
                d -= 1
                continue
            w = ebuf[d, eidx[d]]
            eidx[d] += 1
            if pd < 1.0:
                state, r = _splitmix_next(state)
                if r >= pd:
                    continue
            sub[d] = w
            if d == k - 1:
                if k == 3:
                    e = (
                        _has_edge(indptr, indices, sub[0], sub[1])
                        + _has_edge(indptr, indices, sub[0], sub[2])
                        + _has_edge(indptr, indices, sub[1], sub[2])
                    )
                    if e == 2:
                        counts[0] += weight
                    else:
                        counts[1] += weight
                else:
                    b01 = _has_edge(indptr, indices, sub[0], sub[1])
                    b02 = _has_edge(indptr, indices, sub[0], sub[2])
                    b03 = _has_edge(indptr, indices, sub[0], sub[3])
                    b12 = _has_edge(indptr, indices, sub[1], sub[2])
                    b13 = _has_edge(indptr, indices, sub[1], sub[3])
                    b23 = _has_edge(indptr, indices, sub[2], sub[3])
                    e = b01 + b02 + b03 + b12 + b13 + b23
                    d0 = b01 + b02 + b03
                    d1 = b01 + b12 + b13
                    d2 = b02 + b12 + b23
                    d3 = b03 + b13 + b23
                    mdeg = max(max(d0, d1), max(d2, d3))
                    if e == 3:
                        cls = 2 if mdeg == 2 else 3
                    elif e == 4:
                        cls = 4 if mdeg == 2 else 5
                    elif e == 5:
                        cls = 6
                    else:
                        cls = 7
                    counts[cls] += weight
                continue
            undo_start[d + 1] = undo_ptr
            clen = 0
            for j in range(eidx[d], elen[d]):
                ebuf[d + 1, clen] = ebuf[d, j]
                clen += 1
            for ei in range(indptr[w], indptr[w + 1]):
                u = indices[ei]
                if nbr_mark[u] == 0:
                    if u > v:
                        ebuf[d + 1, clen] = u
                        clen += 1
                    nbr_mark[u] = 1
                    undo[undo_ptr] = u
                    undo_ptr += 1
            elen[d + 1] = clen
            eidx[d + 1] = 0
            d += 1
        while undo_ptr > 0:
            undo_ptr -= 1
            nbr_mark[undo[undo_ptr]] = 0
    return counts
