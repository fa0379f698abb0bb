"""End-to-end dimension fitting: train-on-matched-samples orchestration,
sensitivity sweeps, and the dimension-vs-log(n) regression.

Both fitting pipelines share the same skeleton: estimate (alpha, beta)
from the input graph, generate candidate model graphs for each dimension
m with the edge count matched to the input (generation runs at p = 1 and
the matching step plays the role of an effective p), then score the
input against the candidates. The graphlet pipeline trains a one-vs-one
SVM on sampled graphlet features of 50 candidates per dimension; the
spectral pipeline compares 201-bin Laplacian spectral densities against
one candidate per dimension by KL divergence (input histogram first).

Every random choice derives from the master seed through named
substreams: ("train", m, s) seeds candidate generation, ("match", m, s)
its edge matching, ("features", m, s) its graphlet sampling, and
("features", <tag>) the features of classified graphs, so any single
cell of a sweep can be recomputed in isolation. Worker threads only
partition the (m, s) task grid; results are assembled in task order,
which keeps outputs byte-identical for any --threads value.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats

from . import nullmodels, svm
from .errors import InputError
from .estimators import EstimatedParams, estimate_parameters
from .graph import Graph
from .graphlets import count_graphlets_sampled, default_sample_prob, features
from .mgeop import MgeopParams, generate, match_edge_count
from .rng import child_seed
from .spectral import (
    DENSE_SOLVER_CAP,
    dimension_interval,
    kl_divergence,
    normalized_laplacian_eigenvalues,
    spectral_histogram,
)

DEFAULT_DIMS = tuple(range(1, 13))
DEFAULT_SAMPLES_PER_DIM = 50

# Published reference slopes for m vs log10(n) on the large social-network
# corpora, echoed in reports for orientation; nothing here asserts them.
REFERENCE_SLOPES = {"graphlets": 2.06, "spectral": 1.21}

SENSITIVITY_STUDIES = ("er", "rewire", "percolation")


@dataclass(frozen=True)
class DimensionFit:
    """Outcome of one dimension fit.

    scores maps each scanned dimension to its vote count (graphlets) or
    KL divergence (spectral); interval is the spectral plausibility range
    and None for the graphlet method.
    """

    method: str
    input_graph_id: str
    fitted_m: int
    scores: dict
    interval: tuple | None
    params_used: EstimatedParams
    seed: int
    substreams: tuple

    def to_dict(self) -> dict:
        p = self.params_used
        return {
            "method": self.method,
            "input_graph_id": self.input_graph_id,
            "fitted_m": self.fitted_m,
            "scores": {str(m): float(v) for m, v in sorted(self.scores.items())},
            "interval": list(self.interval) if self.interval is not None else None,
            "params_used": {
                "n": p.n,
                "edges": p.edges,
                "rho": p.rho,
                "eta": p.eta,
                "x_min": p.x_min,
                "eta_raw": p.eta_raw,
                "alpha": p.alpha,
                "beta": p.beta,
                "clamped": p.clamped,
                "eff_diameter": p.eff_diameter,
                "m_model": p.m_model,
                "lcc_n": p.lcc_n,
            },
            "seeds": {
                "master": self.seed,
                "substreams": list(self.substreams),
            },
        }


def _validate_dims(dims) -> tuple:
    out = tuple(int(m) for m in dims)
    if not out:
        raise InputError("dimension scan must be non-empty")
    if any(m < 1 for m in out):
        raise InputError(f"dimensions must be >= 1, got {out}")
    if len(set(out)) != len(out):
        raise InputError(f"dimension scan has repeats: {out}")
    return tuple(sorted(out))


def _run_tasks(fn, tasks, threads: int):
    """Apply fn over tasks, preserving task order in the results."""
    if threads < 1:
        raise InputError(f"threads must be >= 1, got {threads}")
    if threads == 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, tasks))


@dataclass(frozen=True)
class TrainedGraphletClassifier:
    """A dimension classifier trained on matched candidates of one input
    graph, reusable for classifying perturbed variants of that input."""

    model: object
    params: EstimatedParams
    dims: tuple
    sample_prob: float
    samples_per_dim: int
    seed: int
    edge_target: int


def _candidate_features(n, m, alpha, beta, edge_target, q, seed, s) -> np.ndarray:
    g = generate(
        MgeopParams(n=n, m=m, alpha=alpha, beta=beta, p=1.0),
        child_seed(seed, ("train", m, s)),
    )
    g = match_edge_count(g, edge_target, child_seed(seed, ("match", m, s)))
    vec = count_graphlets_sampled(g, q, child_seed(seed, ("features", m, s)))
    return features(vec)


def train_graphlet_classifier(
    g: Graph,
    dims=DEFAULT_DIMS,
    samples_per_dim: int = DEFAULT_SAMPLES_PER_DIM,
    seed: int = 0,
    threads: int = 1,
    sample_prob: float | None = None,
    svm_c: float = 1.0,
    svm_tol: float = 1e-3,
    max_passes: int = 200,
) -> TrainedGraphletClassifier:
    """Estimate (alpha, beta) from g, then train the one-vs-one SVM on
    sampled graphlet features of samples_per_dim matched candidates per
    dimension. A single-dimension scan skips training (nothing to
    separate) and classifies everything as that dimension."""
    dims = _validate_dims(dims)
    if samples_per_dim < 1:
        raise InputError(f"samples_per_dim must be >= 1, got {samples_per_dim}")
    if g.edge_count == 0:
        raise InputError("cannot fit a dimension to an edgeless graph")
    params = estimate_parameters(g, seed=child_seed(seed, "params"))
    q = default_sample_prob(g.n) if sample_prob is None else float(sample_prob)
    if not 0.0 < q <= 1.0:
        raise InputError(f"sample_prob must be in (0, 1], got {q}")
    tasks = [(m, s) for m in dims for s in range(samples_per_dim)]

    def run(task):
        m, s = task
        return _candidate_features(
            g.n, m, params.alpha, params.beta, g.edge_count, q, seed, s
        )

    rows = _run_tasks(run, tasks, threads)
    if len(dims) == 1:
        model = None
    else:
        x = np.vstack(rows)
        y = np.array([m for m, _ in tasks], dtype=np.int64)
        ts = svm.make_training_set(x, y)
        model = svm.train(ts, c=svm_c, tol=svm_tol, max_passes=max_passes)
    return TrainedGraphletClassifier(
        model=model,
        params=params,
        dims=dims,
        sample_prob=q,
        samples_per_dim=samples_per_dim,
        seed=seed,
        edge_target=g.edge_count,
    )


def classify_graph(clf: TrainedGraphletClassifier, g: Graph, tag) -> tuple:
    """(fitted_m, scores) for one graph under an already-trained
    classifier; tag names the ("features", tag) sampling substream."""
    vec = count_graphlets_sampled(
        g, clf.sample_prob, child_seed(clf.seed, ("features", tag))
    )
    if clf.model is None:
        only = clf.dims[0]
        return only, {only: 0.0}
    votes = svm.vote_counts(clf.model, features(vec))
    fitted = max(votes, key=lambda lbl: (votes[lbl], -lbl))
    return int(fitted), {int(m): float(v) for m, v in votes.items()}


_GRAPHLET_SUBSTREAMS = (
    "params",
    "('train', m, s)",
    "('match', m, s)",
    "('features', m, s)",
    "('features', 'input')",
)


def fit_dimension_graphlets(
    g: Graph,
    dims=DEFAULT_DIMS,
    samples_per_dim: int = DEFAULT_SAMPLES_PER_DIM,
    seed: int = 0,
    threads: int = 1,
    sample_prob: float | None = None,
    graph_id: str = "input",
    svm_c: float = 1.0,
    svm_tol: float = 1e-3,
    max_passes: int = 200,
) -> DimensionFit:
    """Dimension of g by the graphlet-and-SVM route."""
    clf = train_graphlet_classifier(
        g,
        dims=dims,
        samples_per_dim=samples_per_dim,
        seed=seed,
        threads=threads,
        sample_prob=sample_prob,
        svm_c=svm_c,
        svm_tol=svm_tol,
        max_passes=max_passes,
    )
    fitted, scores = classify_graph(clf, g, "input")
    return DimensionFit(
        method="graphlets",
        input_graph_id=graph_id,
        fitted_m=fitted,
        scores=scores,
        interval=None,
        params_used=clf.params,
        seed=seed,
        substreams=_GRAPHLET_SUBSTREAMS,
    )


_SPECTRAL_SUBSTREAMS = (
    "params",
    "('train', m, 0)",
    "('match', m, 0)",
)


def fit_dimension_spectral(
    g: Graph,
    dims=DEFAULT_DIMS,
    seed: int = 0,
    threads: int = 1,
    cap: int = DENSE_SOLVER_CAP,
    graph_id: str = "input",
) -> DimensionFit:
    """Dimension of g by the spectral route: one matched candidate per
    dimension, KL(input density, candidate density), argmin, and the
    105% plausibility interval."""
    dims = _validate_dims(dims)
    if g.edge_count == 0:
        raise InputError("cannot fit a dimension to an edgeless graph")
    params = estimate_parameters(g, seed=child_seed(seed, "params"))
    hist_in = spectral_histogram(normalized_laplacian_eigenvalues(g, cap))

    def run(m):
        cand = generate(
            MgeopParams(n=g.n, m=m, alpha=params.alpha, beta=params.beta, p=1.0),
            child_seed(seed, ("train", m, 0)),
        )
        cand = match_edge_count(cand, g.edge_count, child_seed(seed, ("match", m, 0)))
        hist = spectral_histogram(normalized_laplacian_eigenvalues(cand, cap))
        return kl_divergence(hist_in, hist)

    divergences = dict(zip(dims, _run_tasks(run, list(dims), threads)))
    fitted, interval = dimension_interval(divergences, tolerance=1.05)
    return DimensionFit(
        method="spectral",
        input_graph_id=graph_id,
        fitted_m=fitted,
        scores={int(m): float(v) for m, v in divergences.items()},
        interval=interval,
        params_used=params,
        seed=seed,
        substreams=_SPECTRAL_SUBSTREAMS,
    )


@dataclass(frozen=True)
class SensitivityResult:
    """Long-format perturbation sweep: one row per (level, trial)."""

    study: str
    baseline_m: int
    rows: tuple  # of (study, level, trial, fitted_m)
    nullmodel_flag: str | None

    def to_csv(self) -> str:
        lines = ["study,level,trial,fitted_m"]
        for study, level, trial, fitted in self.rows:
            lines.append(f"{study},{level:g},{trial},{fitted}")
        return "\n".join(lines) + "\n"


def _null_graph(g: Graph, study: str, level: float, trial: int, seed: int) -> Graph:
    s = child_seed(seed, ("null", study, repr(float(level)), trial))
    if study == "er":
        return nullmodels.er_matched(g.n, g.edge_count, s)
    if study == "rewire":
        return nullmodels.degree_preserving_rewire(g, swaps_per_edge=level, seed=s)
    return nullmodels.percolate(g, level, seed=s)


def run_sensitivity(
    g: Graph,
    study: str,
    levels,
    trials: int,
    seed: int = 0,
    dims=DEFAULT_DIMS,
    samples_per_dim: int = DEFAULT_SAMPLES_PER_DIM,
    threads: int = 1,
    sample_prob: float | None = None,
) -> SensitivityResult:
    """Classify null-model variants of g with a classifier trained once
    on g itself.

    level means: percolation = fraction of edges delete-and-replaced;
    rewire = attempted swaps per edge; er = unused (each trial draws a
    fresh edge-matched ER graph). A percolation level of exactly 0 is the
    unperturbed graph, so its rows reuse the baseline classification.
    """
    if study not in SENSITIVITY_STUDIES:
        raise InputError(
            f"unknown study {study!r}; pick one of {SENSITIVITY_STUDIES}"
        )
    levels = [float(v) for v in levels]
    if not levels:
        raise InputError("need at least one perturbation level")
    if trials < 1:
        raise InputError(f"trials must be >= 1, got {trials}")
    clf = train_graphlet_classifier(
        g,
        dims=dims,
        samples_per_dim=samples_per_dim,
        seed=seed,
        threads=threads,
        sample_prob=sample_prob,
    )
    baseline_m, _ = classify_graph(clf, g, "baseline")

    def run(task):
        level, trial = task
        if study == "percolation" and level == 0.0:
            return baseline_m
        null_g = _null_graph(g, study, level, trial, seed)
        fitted, _ = classify_graph(clf, null_g, (study, repr(level), trial))
        return fitted

    tasks = [(level, t) for level in levels for t in range(trials)]
    fits = _run_tasks(run, tasks, threads)
    rows = tuple(
        (study, level, trial, fitted)
        for (level, trial), fitted in zip(tasks, fits)
    )
    return SensitivityResult(
        study=study,
        baseline_m=baseline_m,
        rows=rows,
        nullmodel_flag="swap" if study == "rewire" else None,
    )


@dataclass(frozen=True)
class RegressionReport:
    """OLS of fitted dimension on log10(n), with 95% t-intervals and the
    closed-form model curve m = log(n) / log(eff. diameter) per input."""

    points: tuple  # of (log10 n, fitted_m)
    slope: float
    intercept: float
    r_squared: float
    ci_slope: tuple
    ci_intercept: tuple
    model_curve: tuple  # of (n, m_model)

    def to_dict(self) -> dict:
        return {
            "points": [[x, y] for x, y in self.points],
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "ci_slope": list(self.ci_slope),
            "ci_intercept": list(self.ci_intercept),
            "model_curve": [[n, m] for n, m in self.model_curve],
            "reference_slopes": dict(REFERENCE_SLOPES),
        }


def regression_report(fits) -> RegressionReport:
    """Fit fitted_m = slope * log10(n) + intercept over a family of fits."""
    fits = list(fits)
    if len(fits) < 3:
        raise InputError(f"need at least 3 fits for a regression, got {len(fits)}")
    x = np.array([math.log10(f.params_used.n) for f in fits])
    y = np.array([float(f.fitted_m) for f in fits])
    sxx = float(np.sum((x - x.mean()) ** 2))
    if sxx == 0.0:
        raise InputError("all inputs have the same node count; slope is undefined")
    slope = float(np.sum((x - x.mean()) * (y - y.mean())) / sxx)
    intercept = float(y.mean() - slope * x.mean())
    resid = y - (slope * x + intercept)
    sse = float(resid @ resid)
    sst = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 if sst == 0.0 else 1.0 - sse / sst
    dof = len(fits) - 2
    s2 = sse / dof
    se_slope = math.sqrt(s2 / sxx)
    se_intercept = math.sqrt(s2 * (1.0 / len(fits) + x.mean() ** 2 / sxx))
    tcrit = float(stats.t.ppf(0.975, dof))
    curve = sorted(
        (f.params_used.n, float(f.params_used.m_model)) for f in fits
    )
    points = sorted(zip(x.tolist(), y.tolist()))
    return RegressionReport(
        points=tuple(points),
        slope=slope,
        intercept=intercept,
        r_squared=float(np.clip(r_squared, 0.0, 1.0)),
        ci_slope=(slope - tcrit * se_slope, slope + tcrit * se_slope),
        ci_intercept=(
            intercept - tcrit * se_intercept,
            intercept + tcrit * se_intercept,
        ),
        model_curve=tuple(curve),
    )
