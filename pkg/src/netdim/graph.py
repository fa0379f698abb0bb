"""Undirected simple graphs with compact integer ids.

The graph type is intentionally small: a canonical edge array plus a CSR
adjacency view, immutable once built. Node ids are always 0..n-1; the
edge-list loader compacts arbitrary ids by first appearance and reports
what it had to drop.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple

import numpy as np

from .errors import InputError


@dataclass(frozen=True)
class LoadSummary:
    """What an edge-list load had to clean up."""

    duplicate_edges: int
    self_loops: int


@dataclass(frozen=True)
class DegreeStats:
    degrees: np.ndarray
    average: float


class KCoreResult(NamedTuple):
    graph: "Graph"
    node_map: np.ndarray  # old id -> new id, -1 where the node was peeled


class Graph:
    """Immutable undirected simple graph on nodes 0..n-1.

    ``edges`` is an (E, 2) int array with u < v, sorted lexicographically.
    Self-loops are rejected at construction and duplicate edges merge.
    """

    __slots__ = ("n", "edges", "indptr", "indices")

    def __init__(self, n: int, edges: Iterable | np.ndarray = ()) -> None:
        n = int(n)
        if n < 0:
            raise InputError(f"node count must be >= 0, got {n}")
        self.n = n

        e = np.asarray(edges, dtype=np.int64)
        if e.size == 0:
            e = np.empty((0, 2), dtype=np.int64)
        if e.ndim != 2 or e.shape[1] != 2:
            raise InputError("edges must be pairs of node ids")
        if e.size and (e.min() < 0 or e.max() >= n):
            raise InputError(f"edge endpoint out of range for n={n}")
        if e.size and np.any(e[:, 0] == e[:, 1]):
            raise InputError("self-loops are not allowed; drop them before construction")

        lo = np.minimum(e[:, 0], e[:, 1])
        hi = np.maximum(e[:, 0], e[:, 1])
        keys = np.unique(lo * np.int64(n) + hi) if e.size else lo
        canon = np.empty((keys.size, 2), dtype=np.int32)
        if keys.size:
            canon[:, 0] = keys // n
            canon[:, 1] = keys % n
        self.edges = canon
        self.edges.setflags(write=False)

        counts = np.bincount(canon.ravel(), minlength=n) if canon.size else np.zeros(n, dtype=np.int64)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        if canon.size:
            src = np.concatenate([canon[:, 0], canon[:, 1]])
            dst = np.concatenate([canon[:, 1], canon[:, 0]])
            order = np.lexsort((dst, src))
            indices = dst[order].astype(np.int32)
        else:
            indices = np.empty(0, dtype=np.int32)
        self.indptr = indptr
        self.indices = indices
        self.indptr.setflags(write=False)
        self.indices.setflags(write=False)

    @property
    def edge_count(self) -> int:
        return int(self.edges.shape[0])

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def neighbors(self, v: int) -> np.ndarray:
        """Sorted neighbor ids of v (a read-only view)."""
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        row = self.neighbors(u)
        i = np.searchsorted(row, v)
        return bool(i < row.size and row[i] == v)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.edges, other.edges)

    __hash__ = None

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.edge_count})"


def neighbors_of_many(g: Graph, nodes: np.ndarray) -> np.ndarray:
    """Concatenated neighbor lists for a batch of nodes (with repeats)."""
    starts = g.indptr[nodes]
    lengths = (g.indptr[nodes + 1] - starts).astype(np.int64)
    total = int(lengths.sum())
    if total == 0:
        return np.empty(0, dtype=np.int32)
    out_starts = np.cumsum(lengths) - lengths
    idx = np.arange(total, dtype=np.int64) - np.repeat(out_starts, lengths) + np.repeat(starts, lengths)
    return g.indices[idx]


def load_edge_list_with_summary(path: str | Path) -> tuple[Graph, LoadSummary]:
    """Parse a whitespace edge list, compacting ids by first appearance.

    Blank lines and lines starting with '#' are skipped. Self-loops and
    duplicate edges are dropped and counted in the summary.
    """
    ids: dict[int, int] = {}
    seen: set[int] = set()
    us: list[int] = []
    vs: list[int] = []
    loops = 0
    dups = 0

    def compact(raw: int) -> int:
        got = ids.get(raw)
        if got is None:
            got = len(ids)
            ids[raw] = got
        return got

    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            parts = text.split()
            if len(parts) != 2:
                raise InputError(f"{path}:{lineno}: expected 'u v', got {text!r}")
            try:
                a, b = int(parts[0]), int(parts[1])
            except ValueError:
                raise InputError(f"{path}:{lineno}: node ids must be integers, got {text!r}") from None
            ca, cb = compact(a), compact(b)
            if ca == cb:
                loops += 1
                continue
            lo, hi = (ca, cb) if ca < cb else (cb, ca)
            key = lo * (1 << 32) + hi
            if key in seen:
                dups += 1
                continue
            seen.add(key)
            us.append(lo)
            vs.append(hi)

    n = len(ids)
    edges = np.stack([np.asarray(us, dtype=np.int64), np.asarray(vs, dtype=np.int64)], axis=1) if us else ()
    return Graph(n, edges), LoadSummary(duplicate_edges=dups, self_loops=loops)


def load_edge_list(path: str | Path) -> Graph:
    graph, _ = load_edge_list_with_summary(path)
    return graph


def save_edge_list(g: Graph, path: str | Path) -> None:
    """Write edges as 'u v' lines, u < v, lexicographically sorted."""
    with open(path, "w", encoding="utf-8") as fh:
        for u, v in g.edges:
            fh.write(f"{u} {v}\n")


def connected_components(g: Graph) -> list[np.ndarray]:
    """Connected components as sorted id arrays, largest first.

    Ties in size break on the smallest contained id, so the order is
    deterministic.
    """
    comp = np.full(g.n, -1, dtype=np.int64)
    cid = 0
    for start in range(g.n):
        if comp[start] >= 0:
            continue
        comp[start] = cid
        frontier = np.asarray([start], dtype=np.int64)
        while frontier.size:
            nbrs = neighbors_of_many(g, frontier).astype(np.int64)
            nbrs = nbrs[comp[nbrs] < 0]
            if nbrs.size == 0:
                break
            comp[nbrs] = cid
            frontier = np.unique(nbrs)
        cid += 1
    groups = [np.flatnonzero(comp == c) for c in range(cid)]
    groups.sort(key=lambda a: (-a.size, int(a[0])))
    return groups


def largest_component(g: Graph) -> np.ndarray:
    if g.n == 0:
        raise InputError("empty graph has no components")
    return connected_components(g)[0]


def induced_subgraph(g: Graph, nodes: np.ndarray) -> tuple[Graph, np.ndarray]:
    """Subgraph on ``nodes`` with ids recompacted in ascending old-id order.

    Returns the new graph and an old->new map (-1 for dropped nodes).
    """
    keep = np.unique(np.asarray(nodes, dtype=np.int64))
    if keep.size and (keep[0] < 0 or keep[-1] >= g.n):
        raise InputError("node id out of range")
    node_map = np.full(g.n, -1, dtype=np.int64)
    node_map[keep] = np.arange(keep.size)
    e = g.edges
    if e.size:
        mask = (node_map[e[:, 0]] >= 0) & (node_map[e[:, 1]] >= 0)
        new_edges = node_map[e[mask].astype(np.int64)]
    else:
        new_edges = ()
    return Graph(keep.size, new_edges), node_map


def k_core(g: Graph, k: int) -> KCoreResult:
    """Maximal subgraph with minimum degree >= k, ids recompacted.

    Peels iteratively; an empty core comes back as a 0-node graph.
    """
    if k < 0:
        raise InputError(f"core order must be >= 0, got {k}")
    alive = np.ones(g.n, dtype=bool)
    deg = g.degrees.astype(np.int64).copy()
    stack = list(np.flatnonzero(deg < k))
    while stack:
        v = stack.pop()
        if not alive[v]:
            continue
        alive[v] = False
        for u in g.neighbors(v):
            if alive[u]:
                deg[u] -= 1
                if deg[u] == k - 1:
                    stack.append(int(u))
    core, node_map = induced_subgraph(g, np.flatnonzero(alive))
    return KCoreResult(core, node_map)


def degree_stats(g: Graph) -> DegreeStats:
    if g.n == 0:
        raise InputError("degree stats are undefined on an empty graph")
    degrees = g.degrees
    return DegreeStats(degrees=degrees, average=float(degrees.mean()))
