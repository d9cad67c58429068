"""Command-line front end: ``rashomon <subcommand> [flags]``.

Exit codes: 0 success, 2 usage error, 1 computation error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__, bounds, curves, estimator, ridge, svm1
from .dataset import DataError, Dataset, load_csv, make_folds, pca_top_k, polynomial_features
from .synthetic import BUNDLED, fold_groups, load_bundled


class UsageError(Exception):
    """Bad flag combination detected after parsing."""


@dataclass
class Result:
    payload: dict
    headline: str | None = None  # key printed bare on the first plain-format line
    csv_text: str | None = None  # preformatted table for --format csv
    extra: dict = field(default_factory=dict)


# ---------------------------------------------------------------- parsing helpers


def fraction(text: str) -> float:
    """Accept ``0.001`` or ``0.1%``."""
    text = text.strip()
    try:
        if text.endswith("%"):
            return float(text[:-1]) / 100.0
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def int_range(text: str) -> list[int]:
    """``1-5``, ``1,3,5`` or ``2``."""
    out = []
    try:
        for part in text.split(","):
            part = part.strip()
            if "-" in part[1:]:
                lo, hi = part.split("-", 1)
                out.extend(range(int(lo), int(hi) + 1))
            else:
                out.append(int(part))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer range {text!r}") from None
    if not out:
        raise argparse.ArgumentTypeError("empty range")
    return out


def float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from None


def read_matrix(path: str) -> np.ndarray:
    """Numeric CSV without header; a first row that does not parse is skipped."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise DataError(f"{path} is empty")
    try:
        [float(c) for c in rows[0]]
    except ValueError:
        rows = rows[1:]
    try:
        return np.array([[float(c) for c in r] for r in rows])
    except ValueError as exc:
        raise DataError(f"{path}: non-numeric cell ({exc})") from exc


def clean(x: Any) -> Any:
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(x, dict):
        return {str(k): clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return clean(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return x


def _add_data(p: argparse.ArgumentParser, task: str | None = None):
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--data", help="CSV file with a header row")
    g.add_argument("--dataset", choices=sorted(BUNDLED), help="bundled synthetic dataset")
    p.add_argument("--label-column", default="-1", help="label column name or index (default: last)")
    if task is None:
        p.add_argument("--task", choices=("classification", "regression"), default="classification")
    p.set_defaults(fixed_task=task)


def _load(args) -> Dataset:
    if args.dataset:
        return load_bundled(args.dataset)
    task = args.fixed_task or args.task
    label = args.label_column
    return load_csv(args.data, int(label) if label.lstrip("-").isdigit() else label, task)


def _data_source(args) -> str:
    return f"bundled:{args.dataset}" if args.dataset else str(args.data)


def _fold_plan(args, d: Dataset):
    if args.folds == 0:
        return None
    k = None if args.folds is None else args.folds
    groups = fold_groups(d) if args.dataset else None
    return make_folds(d, k, args.seed, groups=groups)


# ---------------------------------------------------------------- subcommands


def cmd_sample_size(args) -> Result:
    k = estimator.hoeffding_sample_size(args.t, args.alpha)
    return Result({"k": k, "t": args.t, "alpha": args.alpha, "confidence": 1 - args.alpha}, "k")


def cmd_ratio(args) -> Result:
    d = _load(args)
    if d.task != "classification":
        raise UsageError("ratio needs a classification dataset")
    if args.gamma is not None:
        spec = estimator.RashomonSpec(0.0, anchored=True, gamma=args.gamma)
    else:
        spec = estimator.RashomonSpec(args.theta, args.reference_risk)
    if args.estimator == "importance":
        est = estimator.estimate_ratio_importance(d, args.depth, spec, args.k, args.seed, args.alpha, args.workers)
    else:
        est = estimator.estimate_tree_ratio_rejection(d, args.depth, spec, args.k, args.seed, args.alpha, args.workers)
    out = est.to_dict()
    out.update(
        depth=args.depth,
        threshold=est.threshold,
        theta=None if spec.anchored else spec.theta,
        gamma=spec.gamma,
        importance_weight=est.weight,
        min_nonzero_fraction=est.min_nonzero,
        min_nonzero_percent=100 * est.min_nonzero,
        data=_data_source(args),
    )
    return Result(out, "ratio_fraction")


def cmd_curve(args) -> Result:
    d = _load(args)
    kind = args.kind or ("tree" if d.task == "classification" else "ridge")
    folds = _fold_plan(args, d)
    if kind == "tree":
        if args.theta_rel is not None:
            raise UsageError("tree curves take an absolute --theta")
        curve = curves.build_tree_curve(
            d, folds, args.depths or list(range(1, 6)), args.theta if args.theta is not None else 0.05,
            args.k, args.seed, args.alpha, args.workers,
        )
    else:
        if args.theta is not None:
            raise UsageError("ridge curves take --theta-rel")
        curve = curves.build_ridge_curve(
            d, folds, args.degrees or list(range(1, 6)), args.reg,
            args.theta_rel if args.theta_rel is not None else 0.1,
            None if args.pca == 0 else args.pca, args.pca_scope,
        )
        curve = curves.RashomonCurve(curve.points, curve.theta_policy, curve.kind, args.seed)
    elbows = None
    if len([p for p in curve.points if p.ok]) >= 2:
        elbows = curves.all_elbows(curve, args.tolerance, args.jump)
    payload = curves.curve_to_dict(curve, elbows or {})
    payload["data"] = _data_source(args)
    payload["folds"] = 0 if folds is None else folds.fold_count
    return Result(payload, csv_text=curves.curve_to_csv(curve))


def cmd_elbow(args) -> Result:
    if args.curve:
        text = Path(args.curve).read_text(encoding="utf-8")
        if args.curve.endswith(".csv"):
            curve = curves.curve_from_csv(text)
        else:
            curve = curves.curve_from_dict(json.loads(text))
    else:
        if args.risks is None or args.measures is None:
            raise UsageError("give --curve FILE or both --risks and --measures")
        if len(args.risks) != len(args.measures):
            raise UsageError("--risks and --measures differ in length")
        labels = args.labels.split(",") if args.labels else [str(i + 1) for i in range(len(args.risks))]
        if len(labels) != len(args.risks):
            raise UsageError("--labels length does not match --risks")
        pts = tuple(curves.CurvePoint(l, r, m) for l, r, m in zip(labels, args.risks, args.measures))
        curve = curves.RashomonCurve(pts, {}, "tree", args.seed)
    out = {"labels": curve.labels()}
    rules = ["maximin", "geometric", "risk_jump"] if args.rule == "all" else [args.rule]
    elbows = {}
    for rule in rules:
        if rule == "maximin":
            elbows[rule] = curves.elbow_maximin(curve, args.combiner, args.weight, args.tolerance)
        elif rule == "geometric":
            elbows[rule] = curves.elbow_geometric(curve, args.tolerance) if len(curve.points) >= 3 else None
        else:
            elbows[rule] = curves.elbow_risk_jump(curve, args.jump)
    out.update(elbows=elbows, combiner=args.combiner, tolerance=args.tolerance, jump_threshold=args.jump)
    return Result(out, extra={"plain_head": elbows.get(args.rule) if args.rule != "all" else None})


def cmd_ridge_volume(args) -> Result:
    d = _load(args)
    if d.task != "regression":
        raise UsageError("ridge-volume needs a regression dataset (use --task regression)")
    if args.pca:
        d = pca_top_k(d, args.pca)
    if args.degree > 1:
        d = polynomial_features(d, args.degree)
    X = ridge.design(d, args.intercept)
    fit = ridge.ridge_fit_arrays(X, np.asarray(d.labels), args.reg)
    sse = ridge.objective(fit.w_hat, X, np.asarray(d.labels), 0.0)
    obj = ridge.objective(fit.w_hat, X, np.asarray(d.labels), args.reg)
    if args.theta_rel is not None:
        theta, policy = args.theta_rel * obj, {"mode": "relative", "theta_rel": args.theta_rel}
    else:
        theta, policy = args.theta, {"mode": "absolute", "theta": args.theta}
    spec = ridge.RidgeSpec.from_matrix(X, args.reg, theta)
    vol = ridge.ridge_volume(spec) if theta > 0 else 0.0
    out = {
        "volume": vol,
        "log_volume": ridge.log_ridge_volume(spec) if theta > 0 else -math.inf,
        "log10_volume": ridge.log10_ridge_volume(spec) if theta > 0 else -math.inf,
        "theta": theta,
        "theta_policy": policy,
        "reg": args.reg,
        "dim": spec.dim,
        "n": d.n,
        "singular_values": list(spec.singular_values),
        "w_hat": list(fit.w_hat),
        "train_risk_sum": sse,
        "train_risk_mean": sse / d.n,
        "objective_sum": obj,
        "intercept": args.intercept,
        "data": _data_source(args),
    }
    if theta > 0:
        fro = float(np.linalg.norm(X))
        out["frobenius_lower_bound"] = ridge.ridge_volume_lower_bounds(spec, "frobenius", frobenius=fro)
    return Result(out, "volume")


def cmd_svm1(args) -> Result:
    d = _load(args)
    center = svm1.svm1_fit(d, args.reg)
    bound = svm1.inscribed_cross_polytope(d, center, args.theta, args.box_radius)
    out = bound.to_dict()
    out.update(
        theta=args.theta,
        reg=args.reg,
        center_hinge=bound.center_loss,
        unbounded=bound.unbounded,
        box_radius=args.box_radius,
        data=_data_source(args),
    )
    return Result(out, "volume_lower_bound")


def cmd_bounds(args) -> Result:
    v = args.verb
    if v == "thm-anchored":
        inp = bounds.BoundInputs(n=args.n, b=args.b, epsilon=args.epsilon, gamma=args.gamma, f1_size=args.f1)
        return Result({"rhs": bounds.thm_anchored_I_rhs(inp), "inputs": vars_of(inp)}, "rhs")
    if v == "thm-approx":
        inp = bounds.BoundInputs(n=args.n, b=args.b, epsilon=args.epsilon, gamma=args.gamma)
        return Result({"rhs": bounds.thm_approximating_set_rhs(inp), "inputs": vars_of(inp)}, "rhs")
    if v == "subclass-prob":
        if (args.rset is None) == (args.ratio is None):
            raise UsageError("give exactly one of --rset and --ratio")
        rset = args.rset if args.rset is not None else bounds.rset_size_from_ratio(args.f2, args.ratio)
        p = bounds.sampled_subclass_probability(args.f2, args.f1, rset)
        return Result({"probability": p, "f2": args.f2, "f1": args.f1, "rset": rset}, "probability")
    if v == "min-class-size":
        f1 = bounds.min_reference_class_size(args.f2, args.ratio, args.confidence)
        return Result(
            {
                "f1_min": f1,
                "f2": args.f2,
                "ratio_fraction": args.ratio,
                "ratio_percent": 100 * args.ratio,
                "rset": bounds.rset_size_from_ratio(args.f2, args.ratio),
                "confidence": args.confidence,
                "split_epsilon": 1 - math.sqrt(args.confidence),
            },
            "f1_min",
        )
    if v == "lemma-threshold":
        r = bounds.lemma_ratio_threshold(args.f1, args.epsilon)
        return Result({"ratio_fraction": r, "ratio_percent": 100 * r, "f1": args.f1, "epsilon": args.epsilon}, "ratio_fraction")
    if v == "membership-prob":
        p = bounds.membership_probability(args.n, args.epsilon, args.b)
        return Result({"probability": p, "n": args.n, "epsilon": args.epsilon, "b": args.b}, "probability")
    if v == "pattern-limit":
        out = {"limit": bounds.pattern_ratio_limit(args.n, args.theta), "n": args.n, "theta": args.theta}
        if 0 < args.theta <= 0.5:
            lo, hi = bounds.entropy_bounds(args.n, args.theta)
            out.update(entropy_lower=lo, entropy_upper=hi)
        return Result(out, "limit")
    if v == "lipschitz":
        inp = bounds.BoundInputs(
            n=args.n, b=args.b, epsilon=args.epsilon, rademacher=args.rademacher,
            lipschitz=args.lipschitz, theta=args.theta, delta=args.delta,
        )
        res = bounds.lipschitz_generalization_rhs(inp, args.variant)
        return Result({"rhs": res.rhs, "radius": res.radius, "variant": args.variant, "inputs": vars_of(inp)}, "rhs")
    if v == "growth":
        return Result({"count": bounds.growth_lower_bound(args.C, args.T), "C": args.C, "T": args.T}, "count")
    if v == "packing":
        if (args.radius is None) == (args.delta is None):
            raise UsageError("give exactly one of --radius and --delta")
        radius = args.radius if args.radius is not None else 2 * args.delta
        pts = read_matrix(args.points) if args.points else np.array(args.values)[:, None] if args.values else None
        if pts is None:
            raise UsageError("give --points FILE or --values LIST")
        kept = bounds.packing_count_lower_bound(pts, radius, args.metric)
        return Result({"count": len(kept), "kept": kept, "radius": radius, "metric": args.metric}, "count")
    raise UsageError(f"unknown bounds verb {v!r}")


def vars_of(inp) -> dict:
    return {k: getattr(inp, k) for k in inp.__dataclass_fields__}


def _zero_one(P: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.mean(np.where(P >= 0, 1, -1) != y, axis=1)


def cmd_pattern_ratio(args) -> Result:
    if args.enumerate_n is not None:
        if args.predictions:
            raise UsageError("--enumerate-n and --predictions are exclusive")
        n = args.enumerate_n
        if not 1 <= n <= 20:
            raise UsageError("--enumerate-n must be in 1..20")
        P = estimator.all_labelings(n)
    elif args.predictions:
        P = read_matrix(args.predictions)
        n = P.shape[1]
    else:
        raise UsageError("give --predictions FILE or --enumerate-n N")
    y = np.ones(n) if args.labels is None else np.asarray(args.labels, dtype=float)
    if y.shape != (n,):
        raise UsageError(f"--labels needs {n} values")
    risks = _zero_one(P, y)
    spec = estimator.RashomonSpec(args.theta, float(risks.min()))
    tally = estimator.pattern_ratio_exact(P, risks, spec, args.pattern, y)
    out = tally.to_dict()
    out.update(ratio_percent=100 * tally.ratio, theta=args.theta, reference_risk=spec.reference_risk, n=n, pattern=args.pattern)
    if args.enumerate_n is not None:
        out["limit"] = bounds.pattern_ratio_limit(n, args.theta)
    return Result(out, "ratio")


def cmd_diversity(args) -> Result:
    P = read_matrix(args.predictions)
    return Result({"average_hamming": estimator.average_hamming(P), "models": P.shape[0], "n": P.shape[1]}, "average_hamming")


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "plain"), default="plain")
    common.add_argument("--output", help="write here instead of stdout")
    common.add_argument("--seed", type=int, default=0)

    ap = argparse.ArgumentParser(prog="rashomon", description="Rashomon set ratios, volumes, bounds and curves.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample-size", parents=[common], help="Hoeffding sample size")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--alpha", type=float, default=0.05)
    p.set_defaults(func=cmd_sample_size)

    p = sub.add_parser("ratio", parents=[common], help="tree-space Rashomon ratio")
    _add_data(p, "classification")
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--k", type=int, default=250_000, help="samples")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--theta", type=float, default=0.05)
    g.add_argument("--gamma", type=float, help="anchored set at absolute risk gamma")
    p.add_argument("--reference-risk", type=float)
    p.add_argument("--estimator", choices=("importance", "rejection"), default="importance")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_ratio)

    p = sub.add_parser("curve", parents=[common], help="Rashomon curve with elbows")
    _add_data(p)
    p.add_argument("--kind", choices=("tree", "ridge"))
    p.add_argument("--depths", type=int_range)
    p.add_argument("--degrees", type=int_range)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--theta", type=float)
    g.add_argument("--theta-rel", type=float)
    p.add_argument("--k", type=int, default=250_000, help="samples per depth")
    p.add_argument("--folds", type=int, help="fold count; 0 trains on all rows (default: 10 if n > 200 else 5)")
    p.add_argument("--reg", type=float, default=0.01)
    p.add_argument("--pca", type=int, default=3, help="principal components, 0 to skip")
    p.add_argument("--pca-scope", choices=("all", "train"), default="all")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--tolerance", type=float, default=0.01)
    p.add_argument("--jump", type=float, default=0.01)
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("elbow", parents=[common], help="elbow of a saved curve")
    p.add_argument("--curve", help="curve JSON or CSV")
    p.add_argument("--risks", type=float_list)
    p.add_argument("--measures", type=float_list)
    p.add_argument("--labels")
    p.add_argument("--rule", choices=("all", "maximin", "geometric", "risk_jump"), default="all")
    p.add_argument("--combiner", choices=("lexicographic", "weighted_sum", "product"), default="lexicographic")
    p.add_argument("--weight", type=float, default=0.5)
    p.add_argument("--tolerance", type=float, default=0.01)
    p.add_argument("--jump", type=float, default=0.01)
    p.set_defaults(func=cmd_elbow)

    p = sub.add_parser("ridge-volume", parents=[common], help="closed-form ridge Rashomon volume")
    _add_data(p, "regression")
    p.add_argument("--reg", type=float, default=0.0)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--theta", type=float)
    g.add_argument("--theta-rel", type=float)
    p.add_argument("--pca", type=int, default=0)
    p.add_argument("--degree", type=int, default=1)
    p.add_argument("--intercept", action="store_true")
    p.set_defaults(func=cmd_ridge_volume)

    p = sub.add_parser("svm1-bound", parents=[common], help="cross-polytope volume lower bound")
    _add_data(p, "classification")
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--reg", type=float, default=1.0)
    p.add_argument("--box-radius", type=float, default=1e6)
    p.set_defaults(func=cmd_svm1)

    p = sub.add_parser("bounds", help="bound calculators")
    verbs = p.add_subparsers(dest="verb", required=True)

    def verb(name, help_):
        q = verbs.add_parser(name, parents=[common], help=help_)
        q.set_defaults(func=cmd_bounds)
        return q

    q = verb("thm-anchored", "anchored finite-class bound")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--f1", type=int, required=True)
    q.add_argument("--epsilon", type=float, default=0.05)
    q.add_argument("--gamma", type=float, default=0.0)
    q.add_argument("--b", type=float, default=1.0)
    q = verb("thm-approx", "approximating-set bound")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--epsilon", type=float, default=0.05)
    q.add_argument("--gamma", type=float, default=0.0)
    q.add_argument("--b", type=float, default=1.0)
    q = verb("subclass-prob", "chance a sampled subclass meets the Rashomon set")
    q.add_argument("--f2", type=int, required=True)
    q.add_argument("--f1", type=int, required=True)
    q.add_argument("--rset", type=int)
    q.add_argument("--ratio", type=fraction)
    q = verb("min-class-size", "smallest |F1| for a target confidence")
    q.add_argument("--f2", type=int, required=True)
    q.add_argument("--ratio", type=fraction, required=True, help="fraction or percent, e.g. 0.001 or 0.1%%")
    q.add_argument("--confidence", type=float, default=0.99)
    q = verb("lemma-threshold", "ratio above which a random F1 meets the set")
    q.add_argument("--f1", type=int, required=True)
    q.add_argument("--epsilon", type=float, required=True)
    q = verb("membership-prob", "empirical-vs-true anchored membership probability")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--epsilon", type=float, required=True)
    q.add_argument("--b", type=float, default=1.0)
    q = verb("pattern-limit", "limiting pattern ratio and entropy bounds")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--theta", type=float, required=True)
    q = verb("lipschitz", "Lipschitz generalization bounds")
    q.add_argument("--variant", choices=("existence_I", "existence_II", "multiple", "reduced_complexity"), default="existence_I")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--rademacher", type=float, required=True)
    q.add_argument("--lipschitz", type=float, required=True)
    q.add_argument("--epsilon", type=float, default=0.05)
    q.add_argument("--b", type=float, default=1.0)
    q.add_argument("--delta", type=float, default=0.0)
    q.add_argument("--theta", type=float)
    q = verb("growth", "hierarchy growth count")
    q.add_argument("--C", type=float, required=True)
    q.add_argument("--T", type=int, required=True)
    q = verb("packing", "greedy packing lower bound")
    q.add_argument("--points", help="numeric CSV, one point per row")
    q.add_argument("--values", type=float_list, help="1-D points, comma separated")
    q.add_argument("--radius", type=float, help="pairwise separation (2 delta)")
    q.add_argument("--delta", type=float, help="radius is 2 delta")
    q.add_argument("--metric", choices=("l1", "l2", "hamming"), default="l2")

    p = sub.add_parser("pattern-ratio", parents=[common], help="exact pattern Rashomon ratio")
    p.add_argument("--predictions", help="CSV, one hypothesis per row")
    p.add_argument("--enumerate-n", type=int, help="use all 2^n labelings")
    p.add_argument("--labels", type=float_list)
    p.add_argument("--theta", type=float, default=0.05)
    p.add_argument("--pattern", choices=("sign", "loss"), default="sign")
    p.set_defaults(func=cmd_pattern_ratio)

    p = sub.add_parser("diversity", parents=[common], help="average pairwise Hamming distance")
    p.add_argument("--predictions", required=True)
    p.set_defaults(func=cmd_diversity)
    return ap


# ---------------------------------------------------------------- output


def _flat(payload: dict) -> dict:
    return {k: json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else v for k, v in payload.items()}


def render(res: Result, fmt: str) -> str:
    payload = clean(res.payload)
    if fmt == "json":
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        if res.csv_text is not None:
            return res.csv_text
        buf = io.StringIO()
        flat = _flat(payload)
        w = csv.DictWriter(buf, fieldnames=sorted(flat), lineterminator="\n")
        w.writeheader()
        w.writerow({k: "" if v is None else v for k, v in flat.items()})
        return buf.getvalue()
    lines = []
    head = res.extra.get("plain_head")
    if res.headline is not None:
        lines.append(str(payload[res.headline]))
    elif head is not None:
        lines.append(str(head))
    for k in sorted(payload):
        v = payload[k]
        if isinstance(v, (dict, list)):
            v = json.dumps(v, sort_keys=True)
        lines.append(f"{k}: {v}")
    return "\n".join(lines) + "\n"


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        res = args.func(args)
    except UsageError as exc:
        print(f"rashomon: usage error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, ArithmeticError, OSError, RuntimeError, np.linalg.LinAlgError) as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"rashomon: error: {msg}", file=sys.stderr)
        return 1
    res.payload = {"command": args.command if args.command != "bounds" else f"bounds {args.verb}", "seed": args.seed, **res.payload}
    text = render(res, args.format)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
