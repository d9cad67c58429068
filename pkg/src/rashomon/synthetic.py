"""Small synthetic corpora shipped with the package (and their generators)."""

from __future__ import annotations

from importlib import resources

import numpy as np

from .dataset import Dataset, load_csv, minmax_normalize

BUNDLED = {
    "separable": "classification",
    "xor": "classification",
    "circles": "classification",
    "noisy_margin": "classification",
    "poly_regression": "regression",
}


def _classification(X, y, name):
    return Dataset(minmax_normalize(X), np.where(y > 0, 1.0, -1.0), name=name, label_mapping={"neg": -1, "pos": 1})


def make_separable(n: int = 100, seed: int = 0, gap: float = 0.2) -> Dataset:
    """Two real features; the label is the side of x1 = 0.5, with a margin ``gap``."""
    rng = np.random.default_rng(seed)
    half = (1.0 - gap) / 2
    side = np.arange(n) % 2
    x1 = np.where(side == 1, 1.0 - half * rng.random(n), half * rng.random(n))
    X = np.column_stack([x1, rng.random(n)])
    X[0, 0], X[1, 0] = 0.0, 1.0
    return _classification(X, side * 2 - 1, "separable")


def make_xor(n_per_quadrant: int = 25, seed: int = 0, spread: float = 0.3) -> Dataset:
    """XOR of the two half-planes x1 > 0.5, x2 > 0.5.

    One cloud of ``n_per_quadrant`` points is copied into all four quadrants, so
    every x1 value (and every x2 value) carries one point of each class and no
    axis-aligned single split beats risk 1/2.
    """
    rng = np.random.default_rng(seed)
    base = rng.random((n_per_quadrant, 2)) * spread
    base[0] = (0.0, 0.0)
    shift = 1.0 - spread
    blocks, labels = [], []
    for dx, dy in ((0, 0), (1, 1), (0, 1), (1, 0)):
        blocks.append(base + shift * np.array([dx, dy]))
        labels.append(np.full(n_per_quadrant, 1 if dx != dy else -1))
    return _classification(np.vstack(blocks), np.concatenate(labels), "xor")


def make_circles(n: int = 200, seed: int = 0, noise: float = 0.05) -> Dataset:
    rng = np.random.default_rng(seed)
    angle = rng.random(n) * 2 * np.pi
    outer = np.arange(n) % 2
    radius = np.where(outer == 1, 1.0, 0.5) + noise * rng.standard_normal(n)
    X = np.column_stack([radius * np.cos(angle), radius * np.sin(angle)])
    return _classification(X, outer * 2 - 1, "circles")


def make_noisy_margin(n: int = 200, seed: int = 0, flip: float = 0.1) -> Dataset:
    rng = np.random.default_rng(seed)
    X = rng.random((n, 2))
    y = np.where(X[:, 0] + X[:, 1] > 1.0, 1, -1)
    y = np.where(rng.random(n) < flip, -y, y)
    return _classification(X, y, "noisy_margin")


def make_poly_regression(n: int = 240, p: int = 5, seed: int = 0, noise: float = 0.05) -> Dataset:
    """Real features with a cubic target in the leading directions plus noise."""
    rng = np.random.default_rng(seed)
    latent = rng.random((n, 3))
    mix = rng.standard_normal((3, p))
    X = minmax_normalize(latent @ mix + 0.02 * rng.standard_normal((n, p)))
    t = latent[:, 0]
    y = 1.0 + 2.0 * t - 3.0 * t**2 + 4.0 * t**3 * latent[:, 1] + noise * rng.standard_normal(n)
    return Dataset(X, y, task="regression", name="poly_regression")


GENERATORS = {
    "separable": make_separable,
    "xor": make_xor,
    "circles": make_circles,
    "noisy_margin": make_noisy_margin,
    "poly_regression": make_poly_regression,
}


def fold_groups(d: Dataset):
    """Row groups that cross-validation must keep together, or None.

    The XOR corpus is four copies of one cloud (rows ``i``, ``i + m``, ``i + 2m``,
    ``i + 3m``); splitting a copy set across folds would let a single split beat
    risk 1/2 on the training part.
    """
    if d.name == "xor" and d.n % 4 == 0:
        return np.arange(d.n) % (d.n // 4)
    return None


def load_bundled(name: str) -> Dataset:
    if name not in BUNDLED:
        raise KeyError(f"unknown bundled dataset {name!r}; choose from {sorted(BUNDLED)}")
    ref = resources.files("rashomon") / "data" / f"{name}.csv"
    with resources.as_file(ref) as path:
        return load_csv(path, "label", BUNDLED[name])
