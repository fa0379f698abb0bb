"""Counts of the eight connected induced 3- and 4-node subgraphs.

Enumeration visits every connected induced vertex set of size 3 or 4
exactly once, growing candidate sets only through exclusive neighborhoods
and only past the root vertex. Sampling mode prunes each extension with a
per-depth coin so that a k-node subgraph survives with probability q
overall, and every survivor contributes 1/q to its class count, keeping
the estimates unbiased. q = 1 takes the identical code path with the coins
skipped, so its counts match exact counting bit for bit.

Class order: path_3, triangle, path_4, star_4, cycle_4, paw, diamond,
clique_4. The 2-node graphlet (a single edge) is carried as edge_count
metadata, not as a count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import esu_accumulate
from .errors import InputError
from .graph import Graph
from .rng import child_seed

GRAPHLET_NAMES = (
    "path_3",
    "triangle",
    "path_4",
    "star_4",
    "cycle_4",
    "paw",
    "diamond",
    "clique_4",
)


@dataclass(frozen=True)
class GraphletVector:
    """Eight class counts plus the edge count they were measured beside.

    counts are reals so reweighted sampled estimates fit; exact counting
    always produces integral values.
    """

    counts: np.ndarray
    edge_count: int
    sampled: bool
    sample_prob: float


def default_sample_prob(n: int) -> float:
    """Continuation probability used by the fitting pipelines: 10/n,
    capped at 1 for tiny graphs."""
    if n < 1:
        raise InputError(f"need a positive node count, got {n}")
    return min(1.0, 10.0 / n)


def _accumulate(g: Graph, q: float, seed: int) -> np.ndarray:
    counts = np.zeros(8, dtype=np.float64)
    weight = 1.0 / q
    for k in (3, 4):
        pd = q ** (1.0 / (k - 1)) if q < 1.0 else 1.0
        seed64 = np.uint64(child_seed(seed, ("esu", k)) & 0xFFFFFFFFFFFFFFFF)
        esu_accumulate(g.indptr, g.indices, k, pd, weight, seed64, counts)
    counts.setflags(write=False)
    return counts


def count_graphlets_exact(g: Graph) -> GraphletVector:
    """Exact counts over all connected induced 3- and 4-vertex subgraphs."""
    return GraphletVector(
        counts=_accumulate(g, 1.0, 0),
        edge_count=g.edge_count,
        sampled=False,
        sample_prob=1.0,
    )


def count_graphlets_sampled(g: Graph, q: float, seed: int) -> GraphletVector:
    """Unbiased sampled counts; q is the overall per-subgraph survival
    probability. q = 1 degenerates to exact counting."""
    if not 0.0 < q <= 1.0:
        raise InputError(f"sample probability must lie in (0, 1], got {q}")
    return GraphletVector(
        counts=_accumulate(g, q, seed),
        edge_count=g.edge_count,
        sampled=q < 1.0,
        sample_prob=q,
    )


def features(v: GraphletVector, include_edge_count: bool = False) -> np.ndarray:
    """log10(count + 1) per class; zero counts map to zero.

    The edge count is left out by default: pipelines match it across all
    candidate dimensions, which makes it carry no signal there. Pass
    include_edge_count=True to append log10(edge_count + 1) as a ninth
    component.
    """
    out = np.log10(v.counts + 1.0)
    if include_edge_count:
        out = np.append(out, np.log10(v.edge_count + 1.0))
    return out
