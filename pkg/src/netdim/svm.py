"""One-vs-one linear SVM classifier for dimension labels.

One binary soft-margin SVM per unordered label pair, trained by a
sequential-minimal-optimization loop; prediction runs every pair and
takes the majority vote, ties toward the smaller label. Features are
standardized to zero mean and unit variance using statistics stored in
the model, with zero-variance features dropped (and recorded), so
rescaling all raw features by a positive constant changes nothing.

Training is deterministic: alphas start at zero, the outer loop sweeps
samples in order and takes the first KKT violator, the partner is the
sample with the largest |E_i - E_j| (ties toward the smallest index),
and there is no random restart. The only randomness in the module sits
in cross-validation fold assignment and subsampling, both seeded.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .rng import child_seed

_MIN_ALPHA_STEP = 1e-5


@dataclass(frozen=True)
class Standardization:
    """Per-feature training mean and standard deviation, plus the indices
    of features retained (std > 0). mean and std are stored only for the
    retained features."""

    mean: np.ndarray
    std: np.ndarray
    kept: np.ndarray
    n_features: int

    def apply(self, x: np.ndarray) -> np.ndarray:
        return (x[..., self.kept] - self.mean) / self.std

    @property
    def dropped(self) -> np.ndarray:
        mask = np.ones(self.n_features, dtype=bool)
        mask[self.kept] = False
        return np.flatnonzero(mask)


@dataclass(frozen=True)
class TrainingSet:
    features: np.ndarray
    labels: np.ndarray
    standardization: Standardization


@dataclass(frozen=True)
class BinaryModel:
    """Linear decision for one label pair: vote b when w.z + bias > 0,
    else a (a < b, so exact-zero decisions fall toward the smaller label).
    constant is set when one side had no training samples; that pair
    votes constant unconditionally."""

    a: int
    b: int
    weights: np.ndarray
    bias: float
    constant: int | None = None
    converged: bool = True

    def vote(self, z: np.ndarray) -> int:
        if self.constant is not None:
            return self.constant
        return self.b if float(z @ self.weights) + self.bias > 0.0 else self.a


@dataclass(frozen=True)
class PairwiseSvmModel:
    labels: tuple
    standardization: Standardization
    pairs: tuple


def make_training_set(features, labels) -> TrainingSet:
    x = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels)
    if x.ndim != 2:
        raise InputError(f"features must be a 2-d array, got shape {x.shape}")
    if y.shape != (x.shape[0],):
        raise InputError(
            f"got {x.shape[0]} feature rows but {y.shape} labels"
        )
    if not np.isfinite(x).all():
        raise InputError("features contain NaN or infinity")
    if not np.issubdtype(y.dtype, np.integer):
        if not np.all(y == np.floor(y)):
            raise InputError("labels must be integers")
        y = y.astype(np.int64)
    if np.unique(y).size < 2:
        raise InputError("need at least 2 distinct labels to train")
    mean = x.mean(axis=0)
    std = x.std(axis=0)
    kept = np.flatnonzero(std > 0.0)
    if kept.size == 0:
        raise InputError("every feature has zero variance; nothing to train on")
    st = Standardization(
        mean=mean[kept], std=std[kept], kept=kept, n_features=x.shape[1]
    )
    return TrainingSet(features=x, labels=y.astype(np.int64), standardization=st)


class _SmoState:
    """Mutable working set for one binary subproblem."""

    def __init__(self, x, y, c, tol):
        self.x = x
        self.y = y
        self.c = c
        self.tol = tol
        self.n = x.shape[0]
        self.alpha = np.zeros(self.n)
        self.w = np.zeros(x.shape[1])
        self.b = 0.0
        self.gram = x @ x.T

    def errors(self):
        return self.x @ self.w + self.b - self.y

    def take_step(self, i, j, e_i, e_j):
        """Joint update of (alpha[i], alpha[j]); returns False when the
        pair cannot move (box corner, duplicate points, or a step below
        the progress threshold)."""
        if i == j:
            return False
        y, c, gram, alpha = self.y, self.c, self.gram, self.alpha
        a_i, a_j = alpha[i], alpha[j]
        if y[i] != y[j]:
            lo, hi = max(0.0, a_j - a_i), min(c, c + a_j - a_i)
        else:
            lo, hi = max(0.0, a_i + a_j - c), min(c, a_i + a_j)
        if lo >= hi:
            return False
        eta = 2.0 * gram[i, j] - gram[i, i] - gram[j, j]
        if eta >= 0.0:
            return False
        a_j_new = float(np.clip(a_j - y[j] * (e_i - e_j) / eta, lo, hi))
        if abs(a_j_new - a_j) < _MIN_ALPHA_STEP:
            return False
        a_i_new = a_i + y[i] * y[j] * (a_j - a_j_new)
        b1 = (
            self.b - e_i
            - y[i] * (a_i_new - a_i) * gram[i, i]
            - y[j] * (a_j_new - a_j) * gram[i, j]
        )
        b2 = (
            self.b - e_j
            - y[i] * (a_i_new - a_i) * gram[i, j]
            - y[j] * (a_j_new - a_j) * gram[j, j]
        )
        if 0.0 < a_i_new < c:
            self.b = b1
        elif 0.0 < a_j_new < c:
            self.b = b2
        else:
            self.b = 0.5 * (b1 + b2)
        self.w = self.w + y[i] * (a_i_new - a_i) * self.x[i] + y[j] * (
            a_j_new - a_j
        ) * self.x[j]
        alpha[i], alpha[j] = a_i_new, a_j_new
        return True

    def examine(self, i):
        """If sample i violates KKT beyond tol, try partners until one
        moves: largest-|E_i - E_j| first, then non-bound alphas, then
        everything, all in deterministic index order."""
        errors = self.errors()
        e_i = float(errors[i])
        r = self.y[i] * e_i
        if not (
            (r < -self.tol and self.alpha[i] < self.c)
            or (r > self.tol and self.alpha[i] > 0)
        ):
            return False
        gap = np.abs(errors - e_i)
        gap[i] = -1.0
        best = int(np.argmax(gap))
        if self.take_step(i, best, e_i, float(errors[best])):
            return True
        non_bound = (self.alpha > 0) & (self.alpha < self.c)
        for j in np.flatnonzero(non_bound):
            if j != best and self.take_step(i, int(j), e_i, float(errors[j])):
                return True
        for j in np.flatnonzero(~non_bound):
            if j != best and self.take_step(i, int(j), e_i, float(errors[j])):
                return True
        return False


def _smo(x, y, c, tol, max_passes):
    """Soft-margin linear-kernel dual via pairwise coordinate updates.

    Sweeps samples in order, fixing each KKT violation it finds; a
    violator that the preferred partner cannot move is retried against
    every other sample before being abandoned. Stops after a clean sweep
    (KKT holds within tol everywhere) or max_passes sweeps. Returns
    (w, b, alpha, converged).
    """
    state = _SmoState(x, y, c, tol)
    converged = False
    for _ in range(max_passes):
        changed = 0
        for i in range(state.n):
            if state.examine(i):
                changed += 1
        if changed == 0:
            converged = True
            break
    return state.w, state.b, state.alpha, converged


def kkt_violations(x, y, alpha, w, b, c, tol):
    """Indices where the first-order KKT conditions fail beyond tol."""
    r = y * (x @ w + b - y)
    bad = ((r < -tol) & (alpha < c)) | ((r > tol) & (alpha > 0))
    return np.flatnonzero(bad)


def train(
    ts: TrainingSet, c: float = 1.0, tol: float = 1e-3, max_passes: int = 200
) -> PairwiseSvmModel:
    """Train one binary SVM per unordered pair of observed labels."""
    if c <= 0:
        raise InputError(f"c must be positive, got {c}")
    if max_passes < 1:
        raise InputError(f"max_passes must be >= 1, got {max_passes}")
    labels = tuple(int(v) for v in np.unique(ts.labels))
    z = ts.standardization.apply(ts.features)
    pairs = []
    for ai in range(len(labels)):
        for bi in range(ai + 1, len(labels)):
            a, b = labels[ai], labels[bi]
            mask = (ts.labels == a) | (ts.labels == b)
            n_a = int(np.count_nonzero(ts.labels == a))
            n_b = int(np.count_nonzero(ts.labels == b))
            if n_a == 0 or n_b == 0:
                winner = a if n_a >= n_b else b
                pairs.append(
                    BinaryModel(
                        a=a,
                        b=b,
                        weights=np.zeros(z.shape[1]),
                        bias=0.0,
                        constant=winner,
                    )
                )
                continue
            x_pair = z[mask]
            y_pair = np.where(ts.labels[mask] == b, 1.0, -1.0)
            w, bias, _, ok = _smo(x_pair, y_pair, c, tol, max_passes)
            pairs.append(
                BinaryModel(a=a, b=b, weights=w, bias=float(bias), converged=ok)
            )
    return PairwiseSvmModel(
        labels=labels, standardization=ts.standardization, pairs=tuple(pairs)
    )


def vote_counts(model: PairwiseSvmModel, x) -> dict:
    """Votes each label collected over all pairwise models for one input."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.shape != (model.standardization.n_features,):
        raise InputError(
            f"expected a feature vector of length "
            f"{model.standardization.n_features}, got shape {arr.shape}"
        )
    z = model.standardization.apply(arr)
    votes = {lbl: 0 for lbl in model.labels}
    for pair in model.pairs:
        votes[pair.vote(z)] += 1
    return votes


def predict(model: PairwiseSvmModel, x) -> int:
    """Majority vote over all pairwise models; ties toward the smaller label."""
    votes = vote_counts(model, x)
    best = max(votes, key=lambda lbl: (votes[lbl], -lbl))
    return int(best)


def predict_many(model: PairwiseSvmModel, xs) -> np.ndarray:
    arr = np.asarray(xs, dtype=np.float64)
    if arr.ndim != 2:
        raise InputError(f"expected a 2-d feature array, got shape {arr.shape}")
    return np.array([predict(model, row) for row in arr], dtype=np.int64)


@dataclass(frozen=True)
class CrossValResult:
    accuracy: float
    confusion: np.ndarray
    labels: tuple
    fold_accuracies: np.ndarray


def _stratified_folds(labels: np.ndarray, folds: int, rng) -> list:
    assignments = [[] for _ in range(folds)]
    for lbl in np.unique(labels):
        idx = np.flatnonzero(labels == lbl)
        if idx.size < folds:
            raise InputError(
                f"label {int(lbl)} has {idx.size} samples, cannot fill "
                f"{folds} stratified folds"
            )
        idx = rng.permutation(idx)
        for f in range(folds):
            assignments[f].extend(idx[f::folds].tolist())
    return [np.sort(np.array(a, dtype=np.int64)) for a in assignments]


def cross_validate(
    ts: TrainingSet,
    folds: int = 5,
    seed: int = 0,
    c: float = 1.0,
    tol: float = 1e-3,
    max_passes: int = 200,
) -> CrossValResult:
    """Stratified k-fold accuracy and confusion matrix (rows true, cols
    predicted, over the sorted observed labels). Each fold refits its own
    standardization."""
    if folds < 2:
        raise InputError(f"need at least 2 folds, got {folds}")
    rng = np.random.default_rng(child_seed(seed, "cv"))
    fold_idx = _stratified_folds(ts.labels, folds, rng)
    labels = np.unique(ts.labels)
    pos = {int(lbl): k for k, lbl in enumerate(labels)}
    confusion = np.zeros((labels.size, labels.size), dtype=np.int64)
    fold_acc = np.zeros(folds)
    for f, test_idx in enumerate(fold_idx):
        train_mask = np.ones(ts.labels.size, dtype=bool)
        train_mask[test_idx] = False
        sub = make_training_set(ts.features[train_mask], ts.labels[train_mask])
        model = train(sub, c=c, tol=tol, max_passes=max_passes)
        got = predict_many(model, ts.features[test_idx])
        want = ts.labels[test_idx]
        for t, p in zip(want, got):
            confusion[pos[int(t)], pos[int(p)]] += 1
        fold_acc[f] = float(np.mean(got == want))
    accuracy = float(np.trace(confusion) / confusion.sum())
    return CrossValResult(
        accuracy=accuracy,
        confusion=confusion,
        labels=tuple(int(v) for v in labels),
        fold_accuracies=fold_acc,
    )


def _stratified_subsample(labels: np.ndarray, fraction: float, rng) -> np.ndarray:
    picked = []
    for lbl in np.unique(labels):
        idx = np.flatnonzero(labels == lbl)
        n_take = max(1, int(round(fraction * idx.size)))
        picked.extend(rng.permutation(idx)[:n_take].tolist())
    return np.sort(np.array(picked, dtype=np.int64))


def subsample_train(
    ts: TrainingSet,
    fraction: float,
    seed: int,
    c: float = 1.0,
    tol: float = 1e-3,
    max_passes: int = 200,
) -> PairwiseSvmModel:
    """Train on a stratified random fraction of the training set; used to
    measure how stable fitted dimensions are under training-data thinning."""
    if not 0.0 < fraction <= 1.0:
        raise InputError(f"fraction must be in (0, 1], got {fraction}")
    rng = np.random.default_rng(child_seed(seed, "subsample"))
    idx = _stratified_subsample(ts.labels, fraction, rng)
    sub = make_training_set(ts.features[idx], ts.labels[idx])
    return train(sub, c=c, tol=tol, max_passes=max_passes)


def subsample_validate(
    ts: TrainingSet,
    fraction: float,
    repeats: int,
    seed: int = 0,
    c: float = 1.0,
    tol: float = 1e-3,
    max_passes: int = 200,
) -> np.ndarray:
    """Accuracy on the held-out complement for each of `repeats` stratified
    subsample-trained models."""
    if repeats < 1:
        raise InputError(f"repeats must be >= 1, got {repeats}")
    if not 0.0 < fraction < 1.0:
        raise InputError(
            f"fraction must be in (0, 1) to leave a held-out set, got {fraction}"
        )
    out = np.zeros(repeats)
    for r in range(repeats):
        rng = np.random.default_rng(child_seed(seed, ("subsample", r)))
        idx = _stratified_subsample(ts.labels, fraction, rng)
        mask = np.zeros(ts.labels.size, dtype=bool)
        mask[idx] = True
        sub = make_training_set(ts.features[mask], ts.labels[mask])
        model = train(sub, c=c, tol=tol, max_passes=max_passes)
        got = predict_many(model, ts.features[~mask])
        out[r] = float(np.mean(got == ts.labels[~mask]))
    return out


def model_to_json(model: PairwiseSvmModel) -> str:
    st = model.standardization
    obj = {
        "labels": list(model.labels),
        "n_features": int(st.n_features),
        "standardization": {
            "mean": st.mean.tolist(),
            "std": st.std.tolist(),
            "kept": st.kept.tolist(),
        },
        "pairs": [
            {
                "a": p.a,
                "b": p.b,
                "weights": p.weights.tolist(),
                "bias": p.bias,
                **({"constant": p.constant} if p.constant is not None else {}),
            }
            for p in model.pairs
        ],
    }
    return json.dumps(obj, indent=2)


def model_from_json(text: str) -> PairwiseSvmModel:
    try:
        obj = json.loads(text)
        st = Standardization(
            mean=np.array(obj["standardization"]["mean"], dtype=np.float64),
            std=np.array(obj["standardization"]["std"], dtype=np.float64),
            kept=np.array(obj["standardization"]["kept"], dtype=np.int64),
            n_features=int(obj["n_features"]),
        )
        pairs = tuple(
            BinaryModel(
                a=int(p["a"]),
                b=int(p["b"]),
                weights=np.array(p["weights"], dtype=np.float64),
                bias=float(p["bias"]),
                constant=int(p["constant"]) if "constant" in p else None,
            )
            for p in obj["pairs"]
        )
        labels = tuple(int(v) for v in obj["labels"])
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise InputError(f"malformed model JSON: {exc}") from exc
    return PairwiseSvmModel(labels=labels, standardization=st, pairs=pairs)
