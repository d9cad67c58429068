"""Regenerate the bundled synthetic CSVs under src/rashomon/data/."""

import argparse
from pathlib import Path

from rashomon.dataset import save_csv
from rashomon.synthetic import GENERATORS

OUT = Path(__file__).resolve().parents[1] / "src" / "rashomon" / "data"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, default=OUT)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for name, make in GENERATORS.items():
        d = make(seed=args.seed)
        save_csv(d, args.out / f"{name}.csv")
        print(f"{name}: n={d.n} p={d.p} task={d.task}")


if __name__ == "__main__":
    main()
