"""Comparison graphs for sensitivity studies: edge-count-matched ER,
degree-preserving rewiring, and random edge percolation.

Rewiring uses double-edge swaps ({a,b},{c,d} -> {a,d},{c,b}, rejected
when a loop or duplicate would appear), which preserve the degree
sequence exactly. Reported null-model outputs tag this as
nullmodel="swap" since swap chains explore the fixed-degree ensemble as
a Markov chain rather than sampling it i.i.d.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InputError
from .graph import Graph
from .rng import child_seed


def _pair_count(n: int) -> int:
    return n * (n - 1) // 2


def _decode_pair_indices(flat: np.ndarray, n: int) -> np.ndarray:
    """Map flat indices in [0, C(n,2)) to (i, j) pairs with i < j, in the
    row-major upper-triangle order used to define the index."""
    row_sizes = np.arange(n - 1, 0, -1, dtype=np.int64)
    offsets = np.zeros(n, dtype=np.int64)
    np.cumsum(row_sizes, out=offsets[1:])
    i = np.searchsorted(offsets, flat, side="right") - 1
    j = flat - offsets[i] + i + 1
    return np.stack([i, j], axis=1)


def _distinct_uniform(rng, total: int, k: int) -> np.ndarray:
    """k distinct uniform draws from range(total) without materializing
    the range; resamples collisions, which stay rare while k << total."""
    seen: set[int] = set()
    out = np.empty(k, dtype=np.int64)
    filled = 0
    while filled < k:
        batch = rng.integers(0, total, size=max(k - filled, 16))
        for v in batch.tolist():
            if v not in seen:
                seen.add(v)
                out[filled] = v
                filled += 1
                if filled == k:
                    break
    return out


def er_matched(n: int, target_edges: int, seed: int) -> Graph:
    """G(n, p) with p chosen so the expected edge count equals
    target_edges; the realized count is Binomial(C(n,2), p)."""
    if n < 1:
        raise InputError(f"need at least one node, got n={n}")
    if target_edges < 0:
        raise InputError(f"target edge count must be >= 0, got {target_edges}")
    total = _pair_count(n)
    if target_edges > total:
        raise InputError(
            f"target of {target_edges} edges is infeasible for n={n} "
            f"(max {total})"
        )
    if total == 0 or target_edges == 0:
        return Graph(n, [])
    p = target_edges / total
    rng = np.random.default_rng(child_seed(seed, "er"))
    count = int(rng.binomial(total, p))
    if count == 0:
        return Graph(n, [])
    flat = np.sort(_distinct_uniform(rng, total, count))
    return Graph(n, _decode_pair_indices(flat, n))


def degree_preserving_rewire(
    g: Graph, swaps_per_edge: float = 10.0, seed: int = 0
) -> Graph:
    """Randomize edges while keeping every vertex degree fixed.

    Attempts ceil(swaps_per_edge * |E|) double-edge swaps; proposals that
    would create a self-loop or a duplicate edge are rejected, so the
    graph stays simple throughout.
    """
    if g.edge_count < 2:
        raise InputError("rewiring needs at least 2 edges")
    if swaps_per_edge < 0:
        raise InputError(f"swaps_per_edge must be >= 0, got {swaps_per_edge}")
    attempts = math.ceil(swaps_per_edge * g.edge_count)
    u = g.edges[:, 0].astype(np.int64).copy()
    v = g.edges[:, 1].astype(np.int64).copy()
    present = {(int(a), int(b)) for a, b in zip(u, v)}
    rng = np.random.default_rng(child_seed(seed, "rewire"))
    m = g.edge_count
    e1s = rng.integers(0, m, size=attempts)
    e2s = rng.integers(0, m, size=attempts)
    flips = rng.integers(0, 2, size=attempts)
    for e1, e2, flip in zip(e1s, e2s, flips):
        if e1 == e2:
            continue
        a, b = int(u[e1]), int(v[e1])
        c, d = int(u[e2]), int(v[e2])
        if flip:
            c, d = d, c
        # propose {a,d} and {c,b}
        if a == d or c == b:
            continue
        new1 = (a, d) if a < d else (d, a)
        new2 = (c, b) if c < b else (b, c)
        if new1 == new2 or new1 in present or new2 in present:
            continue
        present.discard((min(a, b), max(a, b)))
        present.discard((min(c, d), max(c, d)))
        present.add(new1)
        present.add(new2)
        u[e1], v[e1] = new1
        u[e2], v[e2] = new2
    return Graph(g.n, np.stack([u, v], axis=1))


def percolate(g: Graph, fraction: float, seed: int = 0) -> Graph:
    """Delete-and-replace perturbation: ceil(fraction * |E|) times, remove
    a uniformly chosen edge and insert one between two uniformly drawn
    nodes, redrawing endpoints that would make a loop or duplicate. The
    edge count never changes."""
    if not 0.0 <= fraction <= 1.0:
        raise InputError(f"fraction must be in [0, 1], got {fraction}")
    steps = math.ceil(fraction * g.edge_count)
    if steps == 0:
        return Graph(g.n, g.edges)
    u = g.edges[:, 0].astype(np.int64).copy()
    v = g.edges[:, 1].astype(np.int64).copy()
    present = {(int(a), int(b)) for a, b in zip(u, v)}
    rng = np.random.default_rng(child_seed(seed, "percolate"))
    for _ in range(steps):
        slot = int(rng.integers(0, u.size))
        present.discard((int(u[slot]), int(v[slot])))
        while True:
            x = int(rng.integers(0, g.n))
            y = int(rng.integers(0, g.n))
            if x == y:
                continue
            pair = (x, y) if x < y else (y, x)
            if pair in present:
                continue
            break
        present.add(pair)
        u[slot], v[slot] = pair
    return Graph(g.n, np.stack([u, v], axis=1))
