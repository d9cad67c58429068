"""Ridge Rashomon volume along the polynomial-degree hierarchy.

Uses the bundled regression dataset unless --data points at a CSV.
"""

import argparse
import math
from dataclasses import dataclass, field
from pathlib import Path

from rashomon import curves
from rashomon.dataset import load_csv, make_folds
from rashomon.synthetic import load_bundled


@dataclass
class RidgeCurveConfig:
    data: str | None = None
    degrees: list[int] = field(default_factory=lambda: [1, 2, 3, 4, 5])
    reg: float = 0.01
    theta_rel: float = 0.1
    pca: int | None = 3
    pca_scope: str = "all"
    folds: int = 5
    seed: int = 0


def run(cfg: RidgeCurveConfig, out: Path | None = None):
    d = load_csv(cfg.data, task="regression") if cfg.data else load_bundled("poly_regression")
    folds = make_folds(d, cfg.folds, cfg.seed) if cfg.folds else None
    curve = curves.build_ridge_curve(d, folds, cfg.degrees, cfg.reg, cfg.theta_rel, cfg.pca, cfg.pca_scope)
    print(f"# {d.name} (n={d.n}, reg={cfg.reg}, theta_rel={cfg.theta_rel}, pca={cfg.pca})")
    print("degree  train_mse  test_mse   log10_volume")
    for p in curve.points:
        if "error" in p.extra:
            print(f"{p.space_label:>6}  {p.extra['error']}")
            continue
        test = p.extra.get("test_mse")
        test = "   -     " if test is None else f"{test:.5f}"
        vol = p.measure_log10 if p.measure > 0 else -math.inf
        print(f"{p.space_label:>6}  {p.extra['train_mse']:.5f}    {test}  {vol:.3f}")
    usable = [p for p in curve.points if p.ok]
    elbows = curves.all_elbows(curve) if len(usable) >= 2 else {}
    print("elbows:", ", ".join(f"{k}={v}" for k, v in elbows.items()))
    if out:
        out.mkdir(parents=True, exist_ok=True)
        (out / "ridge_curve.json").write_text(curves.curve_to_json(curve, elbows) + "\n")


def main():
    cfg = RidgeCurveConfig()
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--data")
    ap.add_argument("--max-degree", type=int, default=max(cfg.degrees))
    ap.add_argument("--reg", type=float, default=cfg.reg)
    ap.add_argument("--theta-rel", type=float, default=cfg.theta_rel)
    ap.add_argument("--pca", type=int, default=cfg.pca, help="0 keeps all features")
    ap.add_argument("--pca-scope", choices=("all", "train"), default=cfg.pca_scope)
    ap.add_argument("--folds", type=int, default=cfg.folds)
    ap.add_argument("--seed", type=int, default=cfg.seed)
    ap.add_argument("--out", type=Path)
    a = ap.parse_args()
    cfg = RidgeCurveConfig(
        a.data, list(range(1, a.max_degree + 1)), a.reg, a.theta_rel, a.pca or None, a.pca_scope, a.folds, a.seed
    )
    run(cfg, a.out)


if __name__ == "__main__":
    main()
