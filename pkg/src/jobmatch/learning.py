"""Learned match scorer: feature extraction, a bagged decision-tree
ensemble with deterministic parallel training, isotonic calibration and
evaluation metrics.

Determinism contract: every tree draws from its own PCG64 stream keyed by
(seed, tree index), and training rows are put in a canonical order first,
so the fitted forest is identical for any worker count and any permutation
of the input rows.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from multiprocessing import get_context

import numpy as np

from .errors import DegenerateDataError, ParameterError, ScoringError, ShapeError
from .geo import haversine_km
from .scoring import (
    CandidateProfile,
    CompanyProfile,
    ScoringConfig,
    company_factor,
    distance_factor,
)
from .text_it import TfidfModel, similarity

FEATURE_NAMES = (
    "compat",
    "distance_km",
    "dist_factor",
    "attitude",
    "company_factor",
    "education_level",
    "years_experience",
    "unemployment_months",
    "remote_available",
    "certified",
)

N_FEATURES = len(FEATURE_NAMES)

MODEL_FORMAT = "jobmatch-forest"
MODEL_VERSION = 1


def featurize_pair(
    cand: CandidateProfile,
    comp: CompanyProfile,
    tfidf: TfidfModel,
    cfg: ScoringConfig,
) -> tuple[float, ...]:
    """Fixed-order numeric feature vector for one candidate/company pair."""
    if tfidf is None:
        raise ScoringError("tfidf model is not fitted")
    if cand.residence is None:
        raise ScoringError(f"candidate {cand.id} has no geocoded residence")
    if comp.location is None:
        raise ScoringError(f"company {comp.id} has no geocoded location")
    d_km = haversine_km(cand.residence, comp.location)
    return (
        similarity(tfidf, cand.skills_text, comp.tasks_text),
        d_km,
        distance_factor(d_km, cfg.distance_max_km),
        cand.attitude,
        company_factor(comp),
        float(cand.education_level),
        float(cand.years_experience),
        float(cand.unemployment_months),
        1.0 if comp.remote_available else 0.0,
        1.0 if comp.certified else 0.0,
    )


@dataclass(frozen=True, slots=True)
class ForestParams:
    n_trees: int = 100
    max_depth: int = 12
    min_samples_leaf: int = 5
    features_per_split: int = math.ceil(math.sqrt(N_FEATURES))
    bootstrap: bool = True

    def __post_init__(self):
        for name in ("n_trees", "max_depth", "min_samples_leaf", "features_per_split"):
            if getattr(self, name) <= 0:
                raise ParameterError(f"{name} must be positive, got {getattr(self, name)}")


@dataclass
class Tree:
    """Flat array representation; feature == -1 marks a leaf."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    def predict(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(len(X), dtype=np.int32)
        rows = np.nonzero(self.feature[node] >= 0)[0]
        while rows.size:
            nd = node[rows]
            go_left = X[rows, self.feature[nd]] <= self.threshold[nd]
            node[rows] = np.where(go_left, self.left[nd], self.right[nd])
            rows = rows[self.feature[node[rows]] >= 0]
        return self.value[node]


@dataclass
class Forest:
    trees: list[Tree]
    params: ForestParams
    train_seed: int
    n_features: int = N_FEATURES


def _best_split(
    Xb: np.ndarray,
    yb: np.ndarray,
    samples: np.ndarray,
    feats: np.ndarray,
    min_leaf: int,
) -> tuple[int, float] | None:
    """Exhaustive Gini search over midpoint thresholds of the given features.

    Features are scanned in ascending index order and only strictly better
    impurity replaces the incumbent, so ties resolve to the lowest feature
    index and then the lowest threshold.
    """
    m = samples.size
    y_node = yb[samples]
    best_imp = np.inf
    best: tuple[int, float] | None = None
    for f in feats:
        vals = Xb[samples, f]
        order = np.argsort(vals, kind="stable")
        v = vals[order]
        pos = np.cumsum(y_node[order])
        total_pos = pos[-1]
        s = np.arange(min_leaf, m - min_leaf + 1)
        if s.size == 0:
            continue
        distinct = v[s - 1] < v[s]
        s = s[distinct]
        if s.size == 0:
            continue
        n_l = s.astype(np.float64)
        n_r = m - n_l
        pos_l = pos[s - 1]
        pos_r = total_pos - pos_l
        p_l = pos_l / n_l
        p_r = pos_r / n_r
        imp = (n_l * 2.0 * p_l * (1.0 - p_l) + n_r * 2.0 * p_r * (1.0 - p_r)) / m
        arg = int(np.argmin(imp))
        if imp[arg] < best_imp:
            best_imp = float(imp[arg])
            cut = int(s[arg])
            best = (int(f), (v[cut - 1] + v[cut]) / 2.0)
    return best


def _build_tree(X: np.ndarray, y: np.ndarray, params: ForestParams, seed: int, tree_index: int) -> Tree:
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, tree_index])))
    n = len(y)
    if params.bootstrap:
        bag = rng.integers(0, n, size=n)
    else:
        bag = np.arange(n)
    Xb = X[bag]
    yb = y[bag].astype(np.float64)

    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    value: list[float] = []

    def new_node() -> int:
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(0.0)
        return len(feature) - 1

    n_feat = X.shape[1]
    k = min(params.features_per_split, n_feat)
    root = new_node()
    stack: list[tuple[int, np.ndarray, int]] = [(root, np.arange(n), 0)]
    while stack:
        node_id, samples, depth = stack.pop()
        y_node = yb[samples]
        frac = float(y_node.mean())
        value[node_id] = frac
        if depth >= params.max_depth or samples.size < 2 * params.min_samples_leaf or frac in (0.0, 1.0):
            continue
        feats = np.sort(rng.choice(n_feat, size=k, replace=False))
        split = _best_split(Xb, yb, samples, feats, params.min_samples_leaf)
        if split is None:
            continue
        f, thr = split
        mask = Xb[samples, f] <= thr
        left_samples = samples[mask]
        right_samples = samples[~mask]
        if left_samples.size < params.min_samples_leaf or right_samples.size < params.min_samples_leaf:
            continue
        feature[node_id] = f
        threshold[node_id] = thr
        left_id = new_node()
        right_id = new_node()
        left[node_id] = left_id
        right[node_id] = right_id
        # right pushed first so the left child is processed next (fixed
        # traversal order keeps the per-tree RNG consumption deterministic)
        stack.append((right_id, right_samples, depth + 1))
        stack.append((left_id, left_samples, depth + 1))

    return Tree(
        feature=np.asarray(feature, dtype=np.int32),
        threshold=np.asarray(threshold, dtype=np.float64),
        left=np.asarray(left, dtype=np.int32),
        right=np.asarray(right, dtype=np.int32),
        value=np.asarray(value, dtype=np.float64),
    )


def pairs_to_arrays(pairs) -> tuple[np.ndarray, np.ndarray]:
    """Stack .features/.label attributes into (X, y) arrays."""
    X = np.asarray([p.features for p in pairs], dtype=np.float64)
    y = np.asarray([p.label for p in pairs], dtype=np.int8)
    return X, y


def _canonical_order(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Lexicographic row order so training is invariant to input shuffles."""
    keys = [y.astype(np.float64)] + [X[:, j] for j in range(X.shape[1] - 1, -1, -1)]
    return np.lexsort(keys)


_WORKER_X: np.ndarray | None = None
_WORKER_Y: np.ndarray | None = None
_WORKER_PARAMS: ForestParams | None = None
_WORKER_SEED: int = 0


def _tree_task(tree_index: int) -> Tree:
    return _build_tree(_WORKER_X, _WORKER_Y, _WORKER_PARAMS, _WORKER_SEED, tree_index)


def train_forest(pairs, params: ForestParams, seed: int, workers: int = 1) -> Forest:
    """Fit a bagged Gini forest; identical output for any worker count."""
    if workers < 1:
        raise ParameterError(f"workers must be >= 1, got {workers}")
    X, y = pairs_to_arrays(pairs)
    if len(y) < 2:
        raise DegenerateDataError(f"need at least 2 training pairs, got {len(y)}")
    if X.shape[1] != N_FEATURES:
        raise ShapeError(f"expected {N_FEATURES} features, got {X.shape[1]}")
    classes = np.unique(y)
    if classes.size < 2:
        raise DegenerateDataError(f"training data has a single class {classes.tolist()}")

    order = _canonical_order(X, y)
    X = np.ascontiguousarray(X[order])
    y = y[order]

    global _WORKER_X, _WORKER_Y, _WORKER_PARAMS, _WORKER_SEED
    _WORKER_X, _WORKER_Y, _WORKER_PARAMS, _WORKER_SEED = X, y, params, seed
    try:
        if workers == 1:
            trees = [_tree_task(t) for t in range(params.n_trees)]
        else:
            # fork inherits the module globals, so the training matrix is
            # shared with workers without per-task pickling
            with ProcessPoolExecutor(max_workers=workers, mp_context=get_context("fork")) as pool:
                trees = list(pool.map(_tree_task, range(params.n_trees), chunksize=4))
    finally:
        _WORKER_X = _WORKER_Y = _WORKER_PARAMS = None
    return Forest(trees=trees, params=params, train_seed=seed, n_features=X.shape[1])


def predict_proba(forest: Forest, fv) -> float:
    """Raw score for one feature vector: mean leaf positive fraction."""
    x = np.asarray(fv, dtype=np.float64)
    if x.shape != (forest.n_features,):
        raise ShapeError(f"expected feature vector of length {forest.n_features}, got shape {x.shape}")
    return float(predict_proba_batch(forest, x.reshape(1, -1))[0])


def predict_proba_batch(forest: Forest, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != forest.n_features:
        raise ShapeError(f"expected (n, {forest.n_features}) matrix, got shape {X.shape}")
    acc = np.zeros(len(X), dtype=np.float64)
    for tree in forest.trees:
        acc += tree.predict(X)
    return acc / len(forest.trees)


@dataclass(frozen=True)
class Calibrator:
    """Monotone map from raw scores to calibrated probabilities."""

    breakpoints: np.ndarray  # increasing raw-score knots
    values: np.ndarray  # non-decreasing probabilities, same length


def fit_isotonic(scores, labels) -> Calibrator:
    """Pool-adjacent-violators fit of labels against scores.

    Tied scores are averaged first (the calibrator must be a function of
    the score), then PAVA merges adjacent blocks until non-decreasing.
    """
    s = np.asarray(scores, dtype=np.float64)
    t = np.asarray(labels, dtype=np.float64)
    if s.ndim != 1 or s.shape != t.shape:
        raise ShapeError(f"scores and labels must be equal-length 1-d, got {s.shape} and {t.shape}")
    if s.size == 0:
        raise ShapeError("need at least one point")

    order = np.argsort(s, kind="stable")
    s = s[order]
    t = t[order]
    xs, start = np.unique(s, return_index=True)
    sums = np.add.reduceat(t, start)
    counts = np.diff(np.append(start, len(t))).astype(np.float64)

    # blocks of (weighted mean, weight); merge while decreasing
    means: list[float] = []
    weights: list[float] = []
    sizes: list[int] = []
    for mean, w in zip(sums / counts, counts):
        means.append(float(mean))
        weights.append(float(w))
        sizes.append(1)
        while len(means) > 1 and means[-2] > means[-1]:
            w2 = weights[-2] + weights[-1]
            means[-2] = (means[-2] * weights[-2] + means[-1] * weights[-1]) / w2
            weights[-2] = w2
            sizes[-2] += sizes[-1]
            del means[-1], weights[-1], sizes[-1]

    fitted = np.repeat(means, sizes)
    return Calibrator(breakpoints=xs, values=fitted)


def apply_calibrator(cal: Calibrator, s: float) -> float:
    """Linear interpolation between knots, clamped outside their range."""
    return float(np.interp(s, cal.breakpoints, cal.values))


def apply_calibrator_batch(cal: Calibrator, scores) -> np.ndarray:
    return np.interp(np.asarray(scores, dtype=np.float64), cal.breakpoints, cal.values)


@dataclass(frozen=True, slots=True)
class EvalReport:
    precision: float
    recall: float
    f1: float
    roc_auc: float | None
    tp: int
    fp: int
    tn: int
    fn: int


def _roc_auc(probs: np.ndarray, labels: np.ndarray) -> float | None:
    """Mann-Whitney AUC with average ranks, i.e. 0.5 credit for ties."""
    n_pos = int(labels.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        return None
    order = np.argsort(probs, kind="stable")
    sorted_p = probs[order]
    ranks = np.empty(len(probs), dtype=np.float64)
    i = 0
    while i < len(sorted_p):
        j = i
        while j + 1 < len(sorted_p) and sorted_p[j + 1] == sorted_p[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    rank_sum_pos = float(ranks[labels == 1].sum())
    return (rank_sum_pos - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def evaluate(probs, labels, threshold: float = 0.5) -> EvalReport:
    p = np.asarray(probs, dtype=np.float64)
    t = np.asarray(labels)
    if p.ndim != 1 or p.shape != t.shape:
        raise ShapeError(f"probs and labels must be equal-length 1-d, got {p.shape} and {t.shape}")
    if p.size == 0:
        raise ShapeError("need at least one point")
    pred = p >= threshold
    actual = t == 1
    tp = int(np.sum(pred & actual))
    fp = int(np.sum(pred & ~actual))
    tn = int(np.sum(~pred & ~actual))
    fn = int(np.sum(~pred & actual))
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return EvalReport(
        precision=precision,
        recall=recall,
        f1=f1,
        roc_auc=_roc_auc(p, actual.astype(np.int8)),
        tp=tp,
        fp=fp,
        tn=tn,
        fn=fn,
    )


SEARCH_GRID = {
    "n_trees": (50, 100, 200),
    "max_depth": (6, 9, 12, 16),
    "min_samples_leaf": (2, 5, 10),
}

_STREAM_SEARCH = 101
_STREAM_SPLIT = 102

_TRIAL_STATE: dict | None = None


def _run_trial(t: int) -> float:
    st = _TRIAL_STATE
    forest = train_forest(st["train"], st["params"][t], seed=st["seeds"][t], workers=1)
    probs = predict_proba_batch(forest, st["val_X"])
    return evaluate(probs, st["val_y"]).f1


def random_search(pairs, budget: int, seed: int, workers: int = 1) -> tuple[ForestParams, EvalReport]:
    """Uniform random search over the declared grid on a fixed 80/20 split.

    Returns the configuration with the best validation F1 (ties go to the
    earlier trial) together with its validation report.
    """
    if budget < 1:
        raise ParameterError(f"budget must be >= 1, got {budget}")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, _STREAM_SEARCH])))
    trial_params = [
        ForestParams(
            n_trees=int(rng.choice(SEARCH_GRID["n_trees"])),
            max_depth=int(rng.choice(SEARCH_GRID["max_depth"])),
            min_samples_leaf=int(rng.choice(SEARCH_GRID["min_samples_leaf"])),
        )
        for _ in range(budget)
    ]
    trial_seeds = [int(x) for x in rng.integers(0, 2**62, size=budget)]

    split_rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, _STREAM_SPLIT])))
    perm = split_rng.permutation(len(pairs))
    cut = int(len(pairs) * 0.8)
    train = [pairs[i] for i in perm[:cut]]
    val = [pairs[i] for i in perm[cut:]]
    val_X, val_y = pairs_to_arrays(val)

    global _TRIAL_STATE
    _TRIAL_STATE = {"train": train, "params": trial_params, "seeds": trial_seeds, "val_X": val_X, "val_y": val_y}
    try:
        if workers == 1:
            f1s = [_run_trial(t) for t in range(budget)]
        else:
            with ProcessPoolExecutor(max_workers=workers, mp_context=get_context("fork")) as pool:
                f1s = list(pool.map(_run_trial, range(budget)))
    finally:
        _TRIAL_STATE = None

    best_t = max(range(budget), key=lambda t: (f1s[t], -t))
    best_forest = train_forest(pairs=train, params=trial_params[best_t], seed=trial_seeds[best_t], workers=workers)
    report = evaluate(predict_proba_batch(best_forest, val_X), val_y)
    return trial_params[best_t], report


def save_model(path: str, forest: Forest, calibrator: Calibrator | None = None) -> None:
    payload = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "params": asdict(forest.params),
        "seed": forest.train_seed,
        "n_features": forest.n_features,
        "trees": [
            {
                "feature": t.feature.tolist(),
                "threshold": t.threshold.tolist(),
                "left": t.left.tolist(),
                "right": t.right.tolist(),
                "value": t.value.tolist(),
            }
            for t in forest.trees
        ],
        "calibrator": None
        if calibrator is None
        else {"breakpoints": calibrator.breakpoints.tolist(), "values": calibrator.values.tolist()},
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True)


def load_model(path: str) -> tuple[Forest, Calibrator | None]:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format") != MODEL_FORMAT:
        raise ParameterError(f"not a {MODEL_FORMAT} file: {path}")
    if payload.get("version") != MODEL_VERSION:
        raise ParameterError(f"unsupported model version {payload.get('version')}")
    trees = [
        Tree(
            feature=np.asarray(t["feature"], dtype=np.int32),
            threshold=np.asarray(t["threshold"], dtype=np.float64),
            left=np.asarray(t["left"], dtype=np.int32),
            right=np.asarray(t["right"], dtype=np.int32),
            value=np.asarray(t["value"], dtype=np.float64),
        )
        for t in payload["trees"]
    ]
    forest = Forest(
        trees=trees,
        params=ForestParams(**payload["params"]),
        train_seed=payload["seed"],
        n_features=payload["n_features"],
    )
    cal = payload.get("calibrator")
    calibrator = (
        None
        if cal is None
        else Calibrator(
            breakpoints=np.asarray(cal["breakpoints"], dtype=np.float64),
            values=np.asarray(cal["values"], dtype=np.float64),
        )
    )
    return forest, calibrator
