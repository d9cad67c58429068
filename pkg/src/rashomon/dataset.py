"""Tabular data ingestion, unit-cube normalization, folds and feature maps."""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal, Sequence

import numpy as np

Task = Literal["classification", "regression"]

BINARY = "binary"
REAL = "real"

MAX_POLY_COLUMNS = 10**6


class DataError(ValueError):
    """Raised for unreadable or unusable input data."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def _infer_kinds(features: np.ndarray) -> tuple[str, ...]:
    kinds = []
    for j in range(features.shape[1]):
        col = features[:, j]
        kinds.append(BINARY if np.all((col == 0.0) | (col == 1.0)) else REAL)
    return tuple(kinds)


@dataclass(frozen=True)
class Dataset:
    features: np.ndarray
    labels: np.ndarray
    task: Task = "classification"
    feature_kinds: tuple[str, ...] = ()
    name: str = ""
    feature_names: tuple[str, ...] = ()
    label_mapping: dict = field(default_factory=dict)

    def __post_init__(self):
        X = np.asarray(self.features, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        y = np.asarray(self.labels, dtype=float).ravel()
        if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
            raise DataError(f"features must be a non-empty 2-D matrix, got shape {X.shape}")
        if y.shape[0] != X.shape[0]:
            raise DataError(f"{y.shape[0]} labels for {X.shape[0]} rows")
        if not np.all(np.isfinite(X)):
            raise DataError("features contain non-finite values")
        if X.min() < 0.0 or X.max() > 1.0:
            raise DataError("features must lie in [0, 1]; normalize first")
        if self.task == "classification" and not np.all(np.isin(y, (-1.0, 1.0))):
            raise DataError("classification labels must be -1 or +1")
        kinds = tuple(self.feature_kinds) or _infer_kinds(X)
        if len(kinds) != X.shape[1]:
            raise DataError("feature_kinds length does not match column count")
        for j, kind in enumerate(kinds):
            if kind == BINARY and not np.all((X[:, j] == 0.0) | (X[:, j] == 1.0)):
                raise DataError(f"column {j} flagged binary but holds values outside {{0, 1}}")
        names = tuple(self.feature_names) or tuple(f"x{j + 1}" for j in range(X.shape[1]))
        object.__setattr__(self, "features", _frozen(X))
        object.__setattr__(self, "labels", _frozen(y))
        object.__setattr__(self, "feature_kinds", kinds)
        object.__setattr__(self, "feature_names", names)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def p(self) -> int:
        return self.features.shape[1]

    @property
    def binary_mask(self) -> np.ndarray:
        return np.array([k == BINARY for k in self.feature_kinds])

    def subset(self, index) -> "Dataset":
        """Rows selected by ``index``; column kinds are carried over unchanged."""
        return Dataset(
            self.features[index],
            self.labels[index],
            task=self.task,
            feature_kinds=self.feature_kinds,
            name=self.name,
            feature_names=self.feature_names,
            label_mapping=self.label_mapping,
        )

    def with_features(self, features: np.ndarray, names: Sequence[str] = (), suffix: str = "") -> "Dataset":
        return Dataset(
            features,
            self.labels,
            task=self.task,
            name=self.name + suffix,
            feature_names=tuple(names),
            label_mapping=self.label_mapping,
        )


def minmax_normalize(X: np.ndarray) -> np.ndarray:
    """Scale every column to [0, 1]; constant columns become 0."""
    X = np.asarray(X, dtype=float)
    lo = X.min(axis=0)
    span = X.max(axis=0) - lo
    out = np.zeros_like(X)
    ok = span > 0
    out[:, ok] = (X[:, ok] - lo[ok]) / span[ok]
    # guard against rounding just outside the unit interval
    return np.clip(out, 0.0, 1.0)


def map_labels(raw: Sequence[str]) -> tuple[np.ndarray, dict]:
    """Map two class names to -1/+1 in lexicographic order."""
    classes = sorted(set(raw))
    if len(classes) < 2:
        raise DataError("classification needs at least 2 distinct labels")
    if len(classes) > 2:
        raise DataError(f"only binary classification is supported, found {len(classes)} labels")
    mapping = {classes[0]: -1, classes[1]: 1}
    return np.array([mapping[v] for v in raw], dtype=float), mapping


def _is_missing(cell: str) -> bool:
    return cell.strip().lower() in ("", "na", "nan", "?", "null")


def load_csv(path, label_column: str | int = -1, task: Task = "classification") -> Dataset:
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except (OSError, UnicodeDecodeError) as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise DataError(f"{path} is empty")
    header = [h.strip() for h in rows[0]]
    if isinstance(label_column, str) and not label_column.lstrip("-").isdigit():
        if label_column not in header:
            raise DataError(f"label column {label_column!r} not in header {header}")
        li = header.index(label_column)
    else:
        li = int(label_column)
        if not -len(header) <= li < len(header):
            raise DataError(f"label column index {li} out of range")
        li %= len(header)

    feat_cols = [j for j in range(len(header)) if j != li]
    if not feat_cols:
        raise DataError("no feature columns besides the label")
    feats, raw_labels = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise DataError(f"line {lineno}: expected {len(header)} cells, got {len(row)}")
        if any(_is_missing(c) for c in row):
            continue
        try:
            feats.append([float(row[j]) for j in feat_cols])
        except ValueError as exc:
            raise DataError(f"line {lineno}: non-numeric feature cell ({exc})") from exc
        raw_labels.append(row[li].strip())
    if not feats:
        raise DataError("no rows left after dropping missing values")

    X = minmax_normalize(np.array(feats))
    if task == "classification":
        y, mapping = map_labels(raw_labels)
    else:
        try:
            y = np.array([float(v) for v in raw_labels])
        except ValueError as exc:
            raise DataError(f"non-numeric regression target ({exc})") from exc
        mapping = {}
    return Dataset(
        X,
        y,
        task=task,
        name=path.stem,
        feature_names=tuple(header[j] for j in feat_cols),
        label_mapping=mapping,
    )


def save_csv(d: Dataset, path, label_name: str = "label") -> None:
    inverse = {v: k for k, v in d.label_mapping.items()}
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(list(d.feature_names) + [label_name])
        for row, y in zip(d.features, d.labels):
            lab = inverse.get(int(y), int(y)) if d.task == "classification" else repr(float(y))
            w.writerow([repr(float(v)) for v in row] + [lab])


# ---------------------------------------------------------------- folds


@dataclass(frozen=True)
class FoldPlan:
    fold_count: int
    assignments: np.ndarray
    seed: int
    stratified: bool = False

    def __post_init__(self):
        object.__setattr__(self, "assignments", _frozen(np.asarray(self.assignments, dtype=np.int64)))

    def train_index(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments != fold)

    def test_index(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == fold)

    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignments, minlength=self.fold_count)


def default_fold_count(n: int) -> int:
    return 10 if n > 200 else 5


def make_folds(d: Dataset, fold_count: int | None = None, seed: int = 0, groups=None) -> FoldPlan:
    """Balanced fold assignment; stratified by label when every class can fill every fold.

    With ``groups`` (one id per row) whole groups are dealt to folds instead of
    rows, so rows sharing an id always land in the same fold.
    """
    k = default_fold_count(d.n) if fold_count is None else int(fold_count)
    if k < 1:
        raise ValueError("fold_count must be positive")
    if k > d.n:
        raise ValueError(f"fold_count {k} exceeds n={d.n}")
    rng = np.random.default_rng(seed)
    if groups is not None:
        groups = np.asarray(groups)
        if groups.shape != (d.n,):
            raise ValueError("one group id per row required")
        ids = np.unique(groups)
        if k > ids.size:
            raise ValueError(f"fold_count {k} exceeds the {ids.size} groups")
        group_fold = np.empty(ids.size, dtype=np.int64)
        group_fold[rng.permutation(ids.size)] = np.arange(ids.size) % k
        return FoldPlan(k, group_fold[np.searchsorted(ids, groups)], seed)
    stratified = False
    if d.task == "classification":
        classes, counts = np.unique(d.labels, return_counts=True)
        stratified = bool(np.all(counts >= k))
    if stratified:
        order = np.concatenate([rng.permutation(np.flatnonzero(d.labels == c)) for c in classes])
    else:
        order = rng.permutation(d.n)
    assignments = np.empty(d.n, dtype=np.int64)
    assignments[order] = np.arange(d.n) % k
    return FoldPlan(k, assignments, seed, stratified)


# ---------------------------------------------------------------- PCA


@dataclass(frozen=True)
class PCAProjection:
    mean: np.ndarray
    components: np.ndarray  # k x p, rows are right singular vectors
    singular_values: np.ndarray  # full spectrum of the centered matrix
    score_min: np.ndarray
    score_span: np.ndarray

    @property
    def k(self) -> int:
        return self.components.shape[0]

    def scores(self, X: np.ndarray) -> np.ndarray:
        return (np.asarray(X, dtype=float) - self.mean) @ self.components.T

    def transform(self, X: np.ndarray) -> np.ndarray:
        """Scores rescaled with the fitting data's range; rows outside it are clipped."""
        s = self.scores(X)
        out = np.zeros_like(s)
        ok = self.score_span > 0
        out[:, ok] = (s[:, ok] - self.score_min[ok]) / self.score_span[ok]
        return np.clip(out, 0.0, 1.0)

    def explained_variance(self) -> np.ndarray:
        return self.singular_values[: self.k] ** 2


def fit_pca(X: np.ndarray, k: int, rtol: float = 1e-10) -> PCAProjection:
    X = np.asarray(X, dtype=float)
    n, p = X.shape
    if not 1 <= k <= p:
        raise ValueError(f"k={k} must be in [1, {p}]")
    mean = X.mean(axis=0)
    _, s, vt = np.linalg.svd(X - mean, full_matrices=False)
    spectrum = np.zeros(p)
    spectrum[: s.size] = s
    scale = spectrum[0] if spectrum[0] > 0 else 1.0
    rank = int(np.sum(spectrum > rtol * scale)) if spectrum[0] > 0 else 0
    if k > rank:
        raise ValueError(f"k={k} exceeds the numerical rank {rank} of the centered features")
    comps = vt[:k]
    scores = (X - mean) @ comps.T
    lo = scores.min(axis=0)
    return PCAProjection(mean, comps, spectrum, lo, scores.max(axis=0) - lo)


def pca_top_k(d: Dataset, k: int) -> Dataset:
    proj = fit_pca(d.features, k)
    return d.with_features(proj.transform(d.features), [f"pc{i + 1}" for i in range(k)], f"|pca{k}")


# ---------------------------------------------------------------- polynomials


def monomial_exponents(p: int, degree: int) -> list[tuple[int, ...]]:
    """Exponent tuples of total degree 1..degree in graded lexicographic order."""
    if degree < 1:
        raise ValueError("degree must be >= 1")
    count = math.comb(p + degree, degree) - 1
    if count > MAX_POLY_COLUMNS:
        raise ValueError(f"{count} polynomial columns exceeds the limit {MAX_POLY_COLUMNS}")
    out = []
    for deg in range(1, degree + 1):
        for combo in itertools.combinations_with_replacement(range(p), deg):
            e = [0] * p
            for j in combo:
                e[j] += 1
            out.append(tuple(e))
    return out


def polynomial_matrix(X: np.ndarray, degree: int) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    exps = monomial_exponents(X.shape[1], degree)
    return np.column_stack([np.prod(X ** np.array(e), axis=1) for e in exps])


def polynomial_features(d: Dataset, degree: int) -> Dataset:
    exps = monomial_exponents(d.p, degree)
    names = []
    for e in exps:
        parts = [d.feature_names[j] + (f"^{k}" if k > 1 else "") for j, k in enumerate(e) if k]
        names.append("*".join(parts))
    # monomials of unit-cube inputs stay in [0, 1]
    return d.with_features(polynomial_matrix(d.features, degree), names, f"|poly{degree}")
