"""Normalized-Laplacian spectra, smoothed 201-bin densities, and the KL
comparison used to pick a dimension.

The Laplacian is L = I - D^{-1/2} A D^{-1/2} with the row of an isolated
vertex taken as zero, so every graph on n vertices yields exactly n
eigenvalues and each isolated vertex adds an extra zero to the spectrum.
Eigenvalues live in [0, 2]; tiny solver overshoot (up to 1e-9) is clamped,
anything worse is treated as a numeric failure.

Histograms use 201 equal bins over [0, 2], the last bin closed so a
bipartite component's eigenvalue 2 lands in bin 200 instead of falling
off the end. Counts get add-one smoothing before normalization, which
keeps every bin strictly positive and makes KL divergence finite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, NumericError
from .graph import Graph

N_BINS = 201
DENSE_SOLVER_CAP = 10000
_CLAMP_TOL = 1e-9


@dataclass(frozen=True)
class SpectralHistogram:
    """Smoothed spectral density: bins[i] = (raw_counts[i] + 1) / (n_eigs + 201)."""

    bins: np.ndarray
    raw_counts: np.ndarray
    n_eigs: int


def normalized_laplacian_eigenvalues(g: Graph, cap: int = DENSE_SOLVER_CAP) -> np.ndarray:
    """All n eigenvalues of the normalized Laplacian, ascending.

    Uses a dense symmetric solver, so graphs above cap nodes are refused;
    raise cap explicitly if you have the memory and patience for the
    O(n^3) solve.
    """
    if g.n < 1:
        raise InputError("graph must have at least one vertex")
    if g.n > cap:
        raise InputError(
            f"dense eigensolver handles up to {cap} vertices, got {g.n}; "
            "pass a larger cap to force the solve"
        )
    deg = g.degrees.astype(np.float64)
    inv_sqrt = np.zeros(g.n)
    nz = deg > 0
    inv_sqrt[nz] = 1.0 / np.sqrt(deg[nz])

    lap = np.zeros((g.n, g.n))
    if g.edge_count:
        u = g.edges[:, 0]
        v = g.edges[:, 1]
        w = -inv_sqrt[u] * inv_sqrt[v]
        lap[u, v] = w
        lap[v, u] = w
    lap[np.diag_indices(g.n)] = nz.astype(np.float64)

    eigs = np.linalg.eigvalsh(lap)
    if eigs[0] < -_CLAMP_TOL or eigs[-1] > 2.0 + _CLAMP_TOL:
        raise NumericError(
            f"eigenvalues escaped [0, 2] beyond clamp tolerance: "
            f"range [{eigs[0]}, {eigs[-1]}]"
        )
    return np.clip(eigs, 0.0, 2.0)


def spectral_histogram(eigs: np.ndarray) -> SpectralHistogram:
    """201-bin smoothed histogram of eigenvalues in [0, 2].

    Bin i covers [2i/201, 2(i+1)/201), except the last bin which also
    includes 2 itself. Values straying past [0, 2] by at most 1e-9 are
    clamped; anything further is rejected.
    """
    vals = np.asarray(eigs, dtype=np.float64)
    if vals.ndim != 1:
        raise InputError(f"expected a flat array of eigenvalues, got shape {vals.shape}")
    if vals.size:
        lo = vals.min()
        hi = vals.max()
        if lo < -_CLAMP_TOL or hi > 2.0 + _CLAMP_TOL:
            raise InputError(f"eigenvalues must lie in [0, 2], got range [{lo}, {hi}]")
        vals = np.clip(vals, 0.0, 2.0)
    idx = np.minimum((vals * (N_BINS / 2.0)).astype(np.int64), N_BINS - 1)
    raw = np.bincount(idx, minlength=N_BINS).astype(np.int64)
    bins = (raw + 1.0) / (vals.size + N_BINS)
    bins.setflags(write=False)
    raw.setflags(write=False)
    return SpectralHistogram(bins=bins, raw_counts=raw, n_eigs=int(vals.size))


def kl_divergence(a, b) -> float:
    """KL(A, B) = sum_i P^A_i ln(P^A_i / P^B_i), natural log.

    Accepts SpectralHistogram or any probability vector; smoothing keeps
    histogram bins strictly positive so the sum is always finite.
    """
    p = a.bins if isinstance(a, SpectralHistogram) else np.asarray(a, dtype=np.float64)
    q = b.bins if isinstance(b, SpectralHistogram) else np.asarray(b, dtype=np.float64)
    if p.shape != q.shape:
        raise InputError(f"histogram shapes differ: {p.shape} vs {q.shape}")
    if np.any(p <= 0.0) or np.any(q <= 0.0):
        raise InputError("KL divergence needs strictly positive probabilities")
    return float(np.sum(p * np.log(p / q)))


def dimension_interval(
    divergences: dict[int, float], tolerance: float = 1.05
) -> tuple[int, tuple[int, int]]:
    """Best dimension and its plausibility interval.

    best is the argmin of the divergences (ties toward smaller m); the
    interval is the maximal run of consecutive dimensions around best
    whose divergence stays within tolerance times the minimum.
    """
    if not divergences:
        raise InputError("need at least one (dimension, divergence) entry")
    if tolerance < 1.0:
        raise InputError(f"tolerance must be >= 1, got {tolerance}")
    dims = sorted(divergences)
    if dims != list(range(dims[0], dims[-1] + 1)):
        raise InputError(f"dimensions must be consecutive integers, got {dims}")
    vals = np.array([divergences[m] for m in dims], dtype=np.float64)
    best_i = int(np.argmin(vals))
    limit = tolerance * vals[best_i]
    lo = best_i
    while lo > 0 and vals[lo - 1] <= limit:
        lo -= 1
    hi = best_i
    while hi < len(dims) - 1 and vals[hi + 1] <= limit:
        hi += 1
    return dims[best_i], (dims[lo], dims[hi])
