"""Tree Rashomon curves on the bundled classification datasets.

Prints a table per dataset and writes the curve JSON next to it when --out is set.
"""

import argparse
from dataclasses import dataclass, field
from pathlib import Path

from rashomon import curves
from rashomon.dataset import make_folds
from rashomon.synthetic import fold_groups, load_bundled


@dataclass
class TreeCurveConfig:
    datasets: list[str] = field(default_factory=lambda: ["separable", "xor", "circles", "noisy_margin"])
    depths: list[int] = field(default_factory=lambda: [1, 2, 3, 4, 5])
    theta: float = 0.05
    samples: int = 100_000
    folds: int = 5
    seed: int = 0
    workers: int | None = None


def run(cfg: TreeCurveConfig, out: Path | None = None):
    for name in cfg.datasets:
        d = load_bundled(name)
        folds = make_folds(d, cfg.folds, cfg.seed, groups=fold_groups(d)) if cfg.folds else None
        curve = curves.build_tree_curve(d, folds, cfg.depths, cfg.theta, cfg.samples, cfg.seed, workers=cfg.workers)
        elbows = curves.all_elbows(curve)
        print(f"# {name} (n={d.n}, theta={cfg.theta}, k={cfg.samples})")
        print("depth  train   test    ratio")
        for p in curve.points:
            test = "  -   " if p.test_risk is None else f"{p.test_risk:.4f}"
            print(f"{p.space_label:>5}  {p.empirical_risk:.4f}  {test}  {p.measure:.4e}")
        print("elbows:", ", ".join(f"{k}={v}" for k, v in elbows.items()))
        print()
        if out:
            out.mkdir(parents=True, exist_ok=True)
            (out / f"tree_curve_{name}.json").write_text(curves.curve_to_json(curve, elbows) + "\n")


def main():
    cfg = TreeCurveConfig()
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--datasets", nargs="+", default=cfg.datasets)
    ap.add_argument("--max-depth", type=int, default=max(cfg.depths))
    ap.add_argument("--theta", type=float, default=cfg.theta)
    ap.add_argument("--samples", type=int, default=cfg.samples)
    ap.add_argument("--folds", type=int, default=cfg.folds)
    ap.add_argument("--seed", type=int, default=cfg.seed)
    ap.add_argument("--workers", type=int)
    ap.add_argument("--out", type=Path)
    a = ap.parse_args()
    cfg = TreeCurveConfig(a.datasets, list(range(1, a.max_depth + 1)), a.theta, a.samples, a.folds, a.seed, a.workers)
    run(cfg, a.out)


if __name__ == "__main__":
    main()
