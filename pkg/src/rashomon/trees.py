"""Complete binary decision trees over unit-cube features.

A depth-D tree stores its ``2**D - 1`` internal nodes in heap order (children of
node ``i`` are ``2i+1`` and ``2i+2``) and its ``2**D`` leaves left to right.
A row goes left when ``x[feature] <= threshold``.

Random trees are drawn in batches: a :class:`TreeBatch` holds ``k`` trees of one
depth as stacked arrays so routing and risk evaluation are vectorized.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _rng
from .dataset import Dataset

BINARY_THRESHOLD = 0.5


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class DecisionTree:
    depth: int
    features: np.ndarray
    thresholds: np.ndarray
    leaves: np.ndarray

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        f = _frozen(self.features, np.int64)
        t = _frozen(self.thresholds, float)
        lv = _frozen(self.leaves, np.int8)
        if f.shape != (2**self.depth - 1,) or t.shape != f.shape:
            raise ValueError(f"depth {self.depth} needs {2**self.depth - 1} internal nodes")
        if lv.shape != (2**self.depth,):
            raise ValueError(f"depth {self.depth} needs {2**self.depth} leaves")
        if not np.all(np.isin(lv, (-1, 1))):
            raise ValueError("leaf labels must be -1 or +1")
        object.__setattr__(self, "features", f)
        object.__setattr__(self, "thresholds", t)
        object.__setattr__(self, "leaves", lv)

    @property
    def n_internal(self) -> int:
        return 2**self.depth - 1

    def to_dict(self) -> dict:
        return {
            "depth": int(self.depth),
            "splits": [
                {"feature": int(f), "threshold": float(t)} for f, t in zip(self.features, self.thresholds)
            ],
            "leaves": [int(v) for v in self.leaves],
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "DecisionTree":
        return cls(
            obj["depth"],
            [s["feature"] for s in obj["splits"]],
            [s["threshold"] for s in obj["splits"]],
            obj["leaves"],
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "DecisionTree":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class SampledHypothesis:
    tree: DecisionTree
    weight: float
    empirical_risk: float


def constant_tree(depth: int, label: int) -> DecisionTree:
    m = 2**depth - 1
    return DecisionTree(depth, np.zeros(m, int), np.full(m, 1.0), np.full(2**depth, label))


def _check_features(t: DecisionTree, d: Dataset):
    if t.features.max(initial=0) >= d.p or t.features.min(initial=0) < 0:
        raise ValueError(f"tree uses feature index outside [0, {d.p})")


def leaf_index(t: DecisionTree, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    node = np.zeros(X.shape[0], dtype=np.int64)
    rows = np.arange(X.shape[0])
    for _ in range(t.depth):
        go_right = X[rows, t.features[node]] > t.thresholds[node]
        node = 2 * node + 1 + go_right
    return node - t.n_internal


def predictions(t: DecisionTree, d: Dataset | np.ndarray) -> np.ndarray:
    if isinstance(d, Dataset):
        _check_features(t, d)
        X = d.features
    else:
        X = d
    return t.leaves[leaf_index(t, X)].astype(np.int8)


def empirical_risk(t: DecisionTree, d: Dataset) -> float:
    """Mean 0-1 loss of ``t`` on ``d``."""
    if d.task != "classification":
        raise ValueError("0-1 risk needs a classification dataset")
    return float(np.mean(predictions(t, d) != d.labels))


# ---------------------------------------------------------------- CART


def _majority(pos: int, tot: int) -> int:
    # ties go to +1
    return 1 if 2 * pos >= tot else -1


def _best_gini_split(X: np.ndarray, y: np.ndarray):
    """Best (feature, threshold) by weighted Gini over midpoints of distinct values.

    Ties resolve to the lowest feature index, then the lowest threshold.
    Returns None when no column has two distinct values.
    """
    n = y.size
    best = None
    best_score = np.inf
    for j in range(X.shape[1]):
        order = np.argsort(X[:, j], kind="stable")
        xs = X[order, j]
        ys = (y[order] > 0).astype(float)
        cut = np.flatnonzero(xs[1:] > xs[:-1])
        if cut.size == 0:
            continue
        left_n = cut + 1.0
        left_pos = np.cumsum(ys)[cut]
        right_n = n - left_n
        right_pos = ys.sum() - left_pos
        pl = left_pos / left_n
        pr = right_pos / right_n
        # weighted impurity n_l*g_l + n_r*g_r with g = 2 q (1 - q)
        score = left_n * 2 * pl * (1 - pl) + right_n * 2 * pr * (1 - pr)
        i = int(np.argmin(score))
        if score[i] < best_score - 1e-12:
            best_score = score[i]
            best = (j, 0.5 * (xs[cut[i]] + xs[cut[i] + 1]))
    return best


def cart_fit(d: Dataset, depth: int) -> DecisionTree:
    """Greedy Gini tree grown to exactly ``depth``; unsplittable nodes become constant subtrees."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    m = 2**depth - 1
    feats = np.zeros(m, dtype=np.int64)
    thr = np.ones(m)
    binary = d.binary_mask
    leaves = np.ones(2**depth, dtype=np.int8)
    X, y = d.features, d.labels

    full = int(np.sum(y > 0)), d.n

    def grow(node: int, idx: np.ndarray, inherited: int):
        if idx.size:
            inherited = _majority(int(np.sum(y[idx] > 0)), idx.size)
        if node >= m:
            leaves[node - m] = inherited
            return
        split = None
        if idx.size and np.unique(y[idx]).size > 1:
            split = _best_gini_split(X[idx], y[idx])
        if split is None:
            # filler split; every descendant gets the same label
            feats[node] = 0
            thr[node] = BINARY_THRESHOLD if binary[0] else 1.0
        else:
            feats[node], thr[node] = split
            if binary[split[0]]:
                thr[node] = BINARY_THRESHOLD
        go_right = X[idx, feats[node]] > thr[node]
        grow(2 * node + 1, idx[~go_right], inherited)
        grow(2 * node + 2, idx[go_right], inherited)

    grow(0, np.arange(d.n), _majority(*full))
    return DecisionTree(depth, feats, thr, leaves)


# ---------------------------------------------------------------- random trees


@dataclass(frozen=True)
class TreeBatch:
    """``k`` trees of one depth plus their training-set error counts."""

    depth: int
    features: np.ndarray  # (k, 2**D - 1)
    thresholds: np.ndarray  # (k, 2**D - 1)
    leaves: np.ndarray  # (k, 2**D)
    errors: np.ndarray  # (k,) misclassified training points
    n: int
    weight: float

    @property
    def k(self) -> int:
        return self.features.shape[0]

    @property
    def risks(self) -> np.ndarray:
        return self.errors / self.n

    def tree(self, i: int) -> DecisionTree:
        return DecisionTree(self.depth, self.features[i], self.thresholds[i], self.leaves[i])

    def hypothesis(self, i: int) -> SampledHypothesis:
        return SampledHypothesis(self.tree(i), self.weight, float(self.risks[i]))


def importance_weight(depth: int) -> float:
    """Target-to-proposal density ratio for a tree with data-assigned leaves."""
    return 0.5 ** (2**depth)


def _random_splits(d: Dataset, depth: int, k: int, rng: np.random.Generator):
    m = 2**depth - 1
    feats = rng.integers(0, d.p, size=(k, m))
    thr = rng.random((k, m))
    binary = d.binary_mask
    if binary.any():
        thr = np.where(binary[feats], BINARY_THRESHOLD, thr)
    return feats, thr


def _route(X, feats, thr, depth):
    """Leaf index of every row under every tree, shape (k, n)."""
    k = feats.shape[0]
    n = X.shape[0]
    node = np.zeros((k, n), dtype=np.int64)
    trees = np.arange(k)[:, None]
    cols = np.arange(n)[None, :]
    for _ in range(depth):
        f = feats[trees, node]
        go_right = X[cols, f] > thr[trees, node]
        node = 2 * node + 1 + go_right
    return node - (2**depth - 1)


def _leaf_counts(leaf, y, depth):
    k = leaf.shape[0]
    L = 2**depth
    flat = leaf + (np.arange(k) * L)[:, None]
    pos_mask = np.broadcast_to(y > 0, leaf.shape)
    tot = np.bincount(flat.ravel(), minlength=k * L).reshape(k, L)
    pos = np.bincount(flat[pos_mask], minlength=k * L).reshape(k, L)
    return pos, tot


def _data_labels(pos, tot, depth):
    """Majority leaf labels; empty leaves take the label of the nearest ancestor holding data."""
    labels = np.where(2 * pos >= tot, 1, -1).astype(np.int8)
    empty = tot == 0
    if not empty.any():
        return labels
    level_pos, level_tot = [pos], [tot]
    for _ in range(depth):
        p, t = level_pos[-1], level_tot[-1]
        level_pos.append(p[:, 0::2] + p[:, 1::2])
        level_tot.append(t[:, 0::2] + t[:, 1::2])
    resolved = ~empty
    for up in range(1, depth + 1):
        if resolved.all():
            break
        anc_tot = np.repeat(level_tot[up], 2**up, axis=1)
        anc_pos = np.repeat(level_pos[up], 2**up, axis=1)
        hit = ~resolved & (anc_tot > 0)
        labels[hit] = np.where(2 * anc_pos[hit] >= anc_tot[hit], 1, -1)
        resolved |= hit
    return labels


def _errors(labels, pos, tot):
    return np.where(labels > 0, tot - pos, pos).sum(axis=1)


def _sample_block(d: Dataset, depth: int, k: int, rng, leaf_mode: str):
    feats, thr = _random_splits(d, depth, k, rng)
    leaf = _route(d.features, feats, thr, depth)
    pos, tot = _leaf_counts(leaf, d.labels, depth)
    if leaf_mode == "data":
        labels = _data_labels(pos, tot, depth)
    else:
        labels = np.where(rng.random((k, 2**depth)) < 0.5, -1, 1).astype(np.int8)
    return feats, thr, labels, _errors(labels, pos, tot)


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("RASHOMON_WORKERS", "1")))
    except ValueError:
        return 1


def sample_trees(
    d: Dataset,
    depth: int,
    k: int,
    seed: int,
    leaf_mode: str = "data",
    workers: int | None = None,
    stream: tuple[int, ...] = (),
) -> TreeBatch:
    """Draw ``k`` random trees.

    ``leaf_mode="data"`` is the proposal distribution (majority leaves, weight
    ``(1/2)**(2**depth)``); ``leaf_mode="uniform"`` is the target distribution
    (fair-coin leaves, weight 1). Block ``b`` of the sample always uses substream
    ``(seed, leaf_mode, depth, *stream, b)`` so the batch is identical for any
    worker count.
    """
    if d.task != "classification":
        raise ValueError("tree sampling needs a classification dataset")
    if depth < 1 or k < 1:
        raise ValueError("depth and k must be >= 1")
    if leaf_mode not in ("data", "uniform"):
        raise ValueError(f"unknown leaf_mode {leaf_mode!r}")
    # keep each routing block around a few million cells
    block = max(1, min(_rng.BLOCK, 4_000_000 // max(1, d.n)))

    def run(spec):
        b, start, stop = spec
        return _sample_block(d, depth, stop - start, _rng.substream(seed, "tree-" + leaf_mode, depth, *stream, b), leaf_mode)

    specs = list(_rng.blocks(k, block))
    workers = default_workers() if workers is None else workers
    if workers > 1 and len(specs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, specs))
    else:
        parts = [run(s) for s in specs]
    feats, thr, labels, errs = (np.concatenate(x) for x in zip(*parts))
    weight = importance_weight(depth) if leaf_mode == "data" else 1.0
    return TreeBatch(depth, feats, thr, labels, errs, d.n, weight)


def sample_proposal_tree(d: Dataset, depth: int, rng: np.random.Generator) -> SampledHypothesis:
    feats, thr, labels, errs = _sample_block(d, depth, 1, rng, "data")
    tree = DecisionTree(depth, feats[0], thr[0], labels[0])
    return SampledHypothesis(tree, importance_weight(depth), float(errs[0] / d.n))


def sample_target_tree(d: Dataset, depth: int, rng: np.random.Generator) -> SampledHypothesis:
    feats, thr, labels, errs = _sample_block(d, depth, 1, rng, "uniform")
    tree = DecisionTree(depth, feats[0], thr[0], labels[0])
    return SampledHypothesis(tree, 1.0, float(errs[0] / d.n))
