"""Memoryless geometric protean graph generation on the unit torus.

Nodes arrive one at a time. Each carries a uniform position in [0,1)^m and
a rank drawn from a uniform permutation of 1..n; an arriving node links to
every earlier node within its rank-dependent influence radius, keeping each
such link with probability p. Distances are L-infinity on the torus, so the
influence region is an axis-aligned box of volume rank^-alpha * n^-beta.

Generation is a pure function of (params, seed): positions, ranks, and the
per-pair link coins draw from independent named substreams, so the point
cloud is reusable across p values and the spatial-index path produces the
same graph as the naive path for every p.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import grid_query_band, scan_rows
from .errors import InputError
from .graph import Graph
from .rng import child_seed, substream

# production cutoff below which the O(n^2) path is used outright
NAIVE_CUTOFF = 2000


@dataclass(frozen=True)
class MgeopParams:
    """Model parameters: n nodes in dimension m, attachment strength alpha,
    density parameter beta, link probability p."""

    n: int
    m: int
    alpha: float
    beta: float
    p: float = 1.0

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 1:
            raise InputError(f"n must be a positive integer, got {self.n}")
        if int(self.m) != self.m or self.m < 1:
            raise InputError(f"m must be a positive integer, got {self.m}")
        if not 0.0 < self.alpha < 1.0:
            raise InputError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not 0.0 < self.beta < 1.0 - self.alpha:
            raise InputError(
                f"beta must lie in (0, 1 - alpha) = (0, {1.0 - self.alpha}), got {self.beta}"
            )
        if not 0.0 < self.p <= 1.0:
            raise InputError(f"p must lie in (0, 1], got {self.p}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "m", int(self.m))


@dataclass(frozen=True)
class NodeState:
    position: np.ndarray
    rank: int


@dataclass(frozen=True)
class MgeopSample:
    """A generated graph together with the node state that produced it.

    Node ids are arrival order: node t is the (t+1)-th arrival.
    """

    params: MgeopParams
    seed: int
    graph: Graph
    ranks: np.ndarray
    positions: np.ndarray

    def node_state(self, v: int) -> NodeState:
        return NodeState(position=self.positions[v], rank=int(self.ranks[v]))


def influence_radius(rank: int, params: MgeopParams) -> float:
    """Half the side of the influence box for a node of the given rank."""
    if not 1 <= rank <= params.n:
        raise InputError(f"rank must lie in 1..{params.n}, got {rank}")
    return float(_radii(np.asarray([rank]), params)[0])


def _radii(ranks: np.ndarray, params: MgeopParams) -> np.ndarray:
    volume = ranks.astype(np.float64) ** -params.alpha * params.n ** -params.beta
    return 0.5 * volume ** (1.0 / params.m)


def torus_distance(x: np.ndarray, y: np.ndarray) -> float:
    """L-infinity distance on the unit torus (coordinates wrap at 1)."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise InputError(f"dimension mismatch: {x.shape} vs {y.shape}")
    d = np.abs(x - y)
    return float(np.maximum.reduce(np.minimum(d, 1.0 - d), axis=None))


def _edges_bruteforce(pos, radii, p, coin_seed, rows):
    """Exact pair scan for the given arriving rows against all earlier nodes."""
    seed64 = np.uint64(coin_seed & 0xFFFFFFFFFFFFFFFF)
    us, ts = scan_rows(pos, radii, float(p), seed64, np.ascontiguousarray(rows, dtype=np.int64))
    return [np.stack([us, ts], axis=1)]


def _grid_levels(g_max: int) -> np.ndarray:
    """Geometric ladder of cells-per-axis values, ratio about 1.25."""
    levels = [4]
    while True:
        nxt = max(levels[-1] + 1, int(levels[-1] * 1.25))
        if nxt > g_max:
            break
        levels.append(nxt)
    return np.asarray(levels, dtype=np.int64)


def _edges_grid(pos, radii, p, coin_seed):
    """Banded uniform-grid range queries; one query per arriving node.

    Queries are bucketed into bands whose cells-per-axis value is no finer
    than 1/radius, so a query touches at most three cells per axis. Queries
    too coarse for a useful grid fall back to the pair scan.
    """
    n, m = pos.shape
    seed64 = np.uint64(coin_seed & 0xFFFFFFFFFFFFFFFF)
    g_cap = max(2, int((4.0 * n) ** (1.0 / m)))
    g_nat = np.floor(1.0 / radii).astype(np.int64)
    g_eff = np.minimum(g_nat, g_cap)
    out = []

    brute_rows = np.flatnonzero(g_eff < 4)
    if brute_rows.size:
        out.extend(_edges_bruteforce(pos, radii, p, coin_seed, brute_rows))

    gridable = np.flatnonzero(g_eff >= 4)
    if gridable.size:
        levels = _grid_levels(int(g_eff[gridable].max()))
        band_g = np.zeros(n, dtype=np.int64)
        band_g[gridable] = levels[np.searchsorted(levels, g_eff[gridable], side="right") - 1]
        for g in np.unique(band_g[gridable]):
            queries = np.flatnonzero(band_g == g)
            g = int(g)
            combined = np.floor(pos[:, 0] * g).astype(np.int64)
            for d in range(1, m):
                combined *= g
                combined += np.floor(pos[:, d] * g).astype(np.int64)
            order = np.argsort(combined, kind="stable").astype(np.int64)
            counts = np.bincount(combined, minlength=g ** m)
            starts = np.zeros(g ** m + 1, dtype=np.int64)
            np.cumsum(counts, out=starts[1:])
            us, ts = grid_query_band(pos, radii, float(p), seed64, queries, g, starts, order)
            if us.size:
                out.append(np.stack([us, ts], axis=1))
    return out


def sample(params: MgeopParams, seed: int, method: str = "auto") -> MgeopSample:
    """Generate a graph along with its ranks and positions.

    method: "auto" (naive scan up to n=2000, grid above), "grid", or "naive".
    All three give identical graphs for identical (params, seed).
    """
    if method not in ("auto", "grid", "naive"):
        raise InputError(f"unknown generation method {method!r}")
    n, m = params.n, params.m
    positions = substream(seed, "positions").random((n, m))
    ranks = substream(seed, "ranks").permutation(n).astype(np.int64) + 1
    radii = _radii(ranks, params)
    coin_seed = child_seed(seed, "coins")

    if method == "auto":
        method = "naive" if n <= NAIVE_CUTOFF else "grid"
    if method == "naive":
        parts = _edges_bruteforce(positions, radii, params.p, coin_seed, np.arange(n, dtype=np.int64))
    else:
        parts = _edges_grid(positions, radii, params.p, coin_seed)

    edges = np.concatenate(parts, axis=0) if parts else np.empty((0, 2), dtype=np.int64)
    graph = Graph(n, edges)
    return MgeopSample(params=params, seed=seed, graph=graph, ranks=ranks, positions=positions)


def generate(params: MgeopParams, seed: int, method: str = "auto") -> Graph:
    """Generate just the graph; see ``sample`` for the full node state."""
    return sample(params, seed, method=method).graph


def match_edge_count(g: Graph, target_edges: int, seed: int) -> Graph:
    """Randomly delete edges until exactly target_edges remain.

    A graph already at or below the target is returned unchanged. Node
    count and ids are preserved.
    """
    if target_edges < 0:
        raise InputError(f"target edge count must be >= 0, got {target_edges}")
    if g.edge_count <= target_edges:
        return g
    keep = substream(seed, "match").choice(g.edge_count, size=target_edges, replace=False)
    return Graph(g.n, g.edges[np.sort(keep)])
