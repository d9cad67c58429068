"""Rashomon curves over nested hypothesis spaces and elbow selection."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import estimator, ridge, trees
from .dataset import Dataset, FoldPlan, fit_pca, polynomial_matrix

NEG_INF = "-inf"


@dataclass(frozen=True)
class CurvePoint:
    space_label: str
    empirical_risk: float
    measure: float
    test_risk: float | None = None
    estimate_meta: estimator.RatioEstimate | None = None
    measure_floor: float | None = None  # stand-in for zero measures on log axes
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (self.measure >= 0 or math.isnan(self.measure)):
            raise ValueError("measure must be nonnegative")

    @property
    def measure_log10(self) -> float:
        if self.measure > 0:
            return math.log10(self.measure)
        return -math.inf

    @property
    def ok(self) -> bool:
        return math.isfinite(self.measure) and math.isfinite(self.empirical_risk)

    def plot_log10(self) -> float:
        if self.measure > 0:
            return math.log10(self.measure)
        if self.measure_floor and self.measure_floor > 0:
            return math.log10(self.measure_floor)
        return -math.inf


@dataclass(frozen=True)
class RashomonCurve:
    points: tuple[CurvePoint, ...]
    theta_policy: dict
    kind: str = "tree"
    seed: int | None = None

    def labels(self) -> list[str]:
        return [p.space_label for p in self.points]

    def risks(self) -> list[float]:
        return [p.empirical_risk for p in self.points]

    def measures(self) -> list[float]:
        return [p.measure for p in self.points]


# ---------------------------------------------------------------- construction


def _mean(xs):
    xs = [x for x in xs if x is not None]
    return math.fsum(xs) / len(xs) if xs else None


def _folds(folds: FoldPlan | None, n: int):
    if folds is None:
        yield np.arange(n), np.array([], dtype=int)
        return
    for f in range(folds.fold_count):
        yield folds.train_index(f), folds.test_index(f)


def build_tree_curve(
    d: Dataset,
    folds: FoldPlan | None,
    depths: Sequence[int],
    theta: float = 0.05,
    samples_per_depth: int = 250_000,
    seed: int = 0,
    alpha: float = 0.05,
    workers: int | None = None,
) -> RashomonCurve:
    """Importance-sampled ratio per depth, fold-averaged.

    Per fold the reference model is the better of CART and the best sampled tree
    (CART on ties); its training risk, test risk and the ratio estimate are
    averaged arithmetically over folds.
    """
    if d.task != "classification":
        raise ValueError("tree curves need a classification dataset")
    points = []
    for depth in depths:
        train_risks, test_risks, ratios, ests = [], [], [], []
        for f, (tr, te) in enumerate(_folds(folds, d.n)):
            dtr = d.subset(tr)
            batch = trees.sample_trees(dtr, depth, samples_per_depth, seed, "data", workers, stream=(f,))
            cart = trees.cart_fit(dtr, depth)
            cart_risk = trees.empirical_risk(cart, dtr)
            best = int(np.argmin(batch.errors))
            if batch.risks[best] < cart_risk:
                ref_tree, ref_risk = batch.tree(best), float(batch.risks[best])
            else:
                ref_tree, ref_risk = cart, cart_risk
            spec = estimator.RashomonSpec(theta, ref_risk)
            est = estimator.ratio_from_batch(batch, spec, seed, alpha)
            train_risks.append(ref_risk)
            ratios.append(est.ratio)
            ests.append(est)
            if te.size:
                test_risks.append(trees.empirical_risk(ref_tree, d.subset(te)))
        ratio = math.fsum(ratios) / len(ratios)
        meta = estimator.RatioEstimate(
            ratio=ratio,
            samples=samples_per_depth,
            confidence_radius=ests[0].confidence_radius,
            confidence=1.0 - alpha,
            estimator="importance",
            in_set_count=sum(e.in_set_count for e in ests),
            seed=seed,
            weight=trees.importance_weight(depth),
        )
        points.append(
            CurvePoint(
                space_label=str(depth),
                empirical_risk=_mean(train_risks),
                measure=ratio,
                test_risk=_mean(test_risks),
                estimate_meta=meta,
                measure_floor=meta.min_nonzero / 10.0,
                extra={"folds": len(ratios)},
            )
        )
    return RashomonCurve(tuple(points), {"mode": "absolute", "theta": theta}, "tree", seed)


def build_ridge_curve(
    d: Dataset,
    folds: FoldPlan | None,
    degrees: Sequence[int],
    reg: float = 0.01,
    theta_rel: float = 0.1,
    pca_components: int | None = 3,
    pca_scope: str = "all",
) -> RashomonCurve:
    """Closed-form ridge volumes along a polynomial-degree hierarchy.

    Features are reduced to ``pca_components`` principal components (fitted on
    the whole dataset, or per training fold with ``pca_scope="train"``), expanded
    to monomials of each degree, and fitted by ridge with penalty ``reg``. The
    Rashomon parameter per degree is ``theta_rel`` times the penalized training
    objective. Risks are sums of squares; mean forms are kept in ``extra``.
    """
    if d.task != "regression":
        raise ValueError("ridge curves need a regression dataset")
    if pca_scope not in ("all", "train"):
        raise ValueError("pca_scope must be 'all' or 'train'")
    X_all = np.asarray(d.features)
    if pca_components is not None and pca_scope == "all":
        X_all = fit_pca(X_all, pca_components).transform(X_all)
    y = np.asarray(d.labels)

    points = []
    for degree in degrees:
        rows = []
        error = None
        for tr, te in _folds(folds, d.n):
            Xtr, Xte = X_all[tr], X_all[te]
            if pca_components is not None and pca_scope == "train":
                proj = fit_pca(Xtr, pca_components)
                Xtr, Xte = proj.transform(Xtr), proj.transform(Xte)
            Ptr = polynomial_matrix(Xtr, degree)
            try:
                fit = ridge.ridge_fit_arrays(Ptr, y[tr], reg)
            except ridge.SingularGramError as exc:
                error = str(exc)
                break
            obj = ridge.objective(fit.w_hat, Ptr, y[tr], reg)
            theta = theta_rel * obj
            vol = ridge.ridge_volume(ridge.RidgeSpec.from_matrix(Ptr, reg, theta)) if theta > 0 else 0.0
            test = None
            if te.size:
                r = polynomial_matrix(Xte, degree) @ fit.w_hat - y[te]
                test = float(r @ r)
            rows.append((obj, vol, test, tr.size, te.size, theta))
        if error is not None:
            points.append(CurvePoint(str(degree), math.nan, math.nan, extra={"error": error}))
            continue
        obj, vol, test, ntr, nte, th = zip(*rows)
        extra = {
            "train_mse": _mean([o / m for o, m in zip(obj, ntr)]),
            "theta": _mean(th),
            "folds": len(rows),
        }
        if nte[0]:
            extra["test_mse"] = _mean([t / m for t, m in zip(test, nte)])
        points.append(
            CurvePoint(
                space_label=str(degree),
                empirical_risk=_mean(obj),
                measure=math.fsum(vol) / len(vol),
                test_risk=_mean(test),
                extra=extra,
            )
        )
    policy = {"mode": "relative", "theta_rel": theta_rel, "reg": reg}
    return RashomonCurve(tuple(points), policy, "ridge", None)


# ---------------------------------------------------------------- elbows


def _usable(curve: RashomonCurve) -> list[int]:
    idx = [i for i, p in enumerate(curve.points) if p.ok]
    if not idx:
        raise ValueError("curve has no usable points")
    return idx


def elbow_maximin(curve: RashomonCurve, G: str = "lexicographic", weight: float = 0.5, tolerance: float = 0.01) -> str:
    """argmax of G(1 - risk, measure); ties go to the simplest space.

    ``lexicographic`` keeps spaces whose risk is within ``tolerance`` of the best
    and takes the largest measure; ``weighted_sum`` is
    ``weight (1 - risk) + (1 - weight) measure``; ``product`` is ``(1 - risk) measure``.
    """
    idx = _usable(curve)
    risk = np.array([curve.points[i].empirical_risk for i in idx])
    meas = np.array([curve.points[i].measure for i in idx])
    if G == "lexicographic":
        keep = risk <= risk.min() + tolerance + 1e-12
        score = np.where(keep, meas, -np.inf)
    elif G == "weighted_sum":
        score = weight * (1 - risk) + (1 - weight) * meas
    elif G == "product":
        score = (1 - risk) * meas
    else:
        raise ValueError(f"unknown combiner {G!r}")
    return curve.points[idx[int(np.argmax(score))]].space_label


def _scale(v: np.ndarray) -> np.ndarray:
    lo, hi = v.min(), v.max()
    return np.zeros_like(v) if hi == lo else (v - lo) / (hi - lo)


def geometric_distances(curve: RashomonCurve) -> tuple[list[int], np.ndarray]:
    idx = _usable(curve)
    pts = [curve.points[i] for i in idx]
    logs = np.array([p.plot_log10() for p in pts])
    finite = np.isfinite(logs)
    if not finite.all():
        # zero measures with no floor: one decade below the smallest positive point
        logs[~finite] = (logs[finite].min() - 1.0) if finite.any() else 0.0
    x = _scale(np.array([p.empirical_risk for p in pts]))
    y = _scale(logs)
    a = np.array([x[0], y[0]])
    b = np.array([x[-1], y[-1]])
    ab = b - a
    norm = float(np.hypot(*ab))
    if norm == 0:
        return idx, np.full(len(idx), np.nan)
    dist = np.abs(ab[0] * (y - a[1]) - ab[1] * (x - a[0])) / norm
    return idx, dist


def elbow_geometric(curve: RashomonCurve, tolerance: float = 0.01) -> str:
    """Interior point farthest from the chord joining the first and last points in
    the (risk, log10 measure) plane, both axes min-max scaled to [0, 1].

    Falls back to the lexicographic maximin rule when the endpoints coincide.
    """
    idx = _usable(curve)
    if len(idx) < 3:
        raise ValueError("geometric elbow needs at least 3 points")
    idx, dist = geometric_distances(curve)
    if np.isnan(dist).all():
        return elbow_maximin(curve, "lexicographic", tolerance=tolerance)
    inner = dist[1:-1]
    return curve.points[idx[1 + int(np.argmax(inner))]].space_label


def risk_jump_index(risks: Sequence[float], jump_threshold: float = 0.01) -> int:
    r = list(risks)
    if len(r) < 2:
        raise ValueError("need at least two risks")
    last = r[-1]
    j = len(r) - 1
    while j > 0 and r[j - 1] - last <= jump_threshold + 1e-12:
        j -= 1
    return j


def elbow_risk_jump(curve_or_risks, jump_threshold: float = 0.01) -> str | int:
    """Walk down from the most complex space and stop before the first space whose
    risk exceeds the most complex one's by more than ``jump_threshold``.

    Given a curve, returns its label; given a bare list of risks, the index.
    """
    if isinstance(curve_or_risks, RashomonCurve):
        idx = _usable(curve_or_risks)
        j = risk_jump_index([curve_or_risks.points[i].empirical_risk for i in idx], jump_threshold)
        return curve_or_risks.points[idx[j]].space_label
    return risk_jump_index(curve_or_risks, jump_threshold)


def all_elbows(curve: RashomonCurve, tolerance: float = 0.01, jump_threshold: float = 0.01) -> dict:
    out = {"maximin": elbow_maximin(curve, "lexicographic", tolerance=tolerance)}
    try:
        out["geometric"] = elbow_geometric(curve, tolerance)
    except ValueError:
        out["geometric"] = None
    out["risk_jump"] = elbow_risk_jump(curve, jump_threshold)
    return out


# ---------------------------------------------------------------- serialization


def _num(x):
    if x is None:
        return None
    x = float(x)
    if math.isnan(x):
        return None
    if math.isinf(x):
        return NEG_INF if x < 0 else "inf"
    return x


def point_to_dict(p: CurvePoint) -> dict:
    meta = p.estimate_meta
    out = {
        "label": p.space_label,
        "train_risk": _num(p.empirical_risk),
        "test_risk": _num(p.test_risk),
        "measure_fraction": _num(p.measure),
        "measure_percent": _num(100.0 * p.measure) if math.isfinite(p.measure) else None,
        "measure_log10": _num(p.measure_log10) if math.isfinite(p.measure) else None,
        "k": meta.samples if meta else None,
        "seed": meta.seed if meta else None,
    }
    if p.measure == 0 and p.measure_floor:
        out["measure_floor"] = p.measure_floor
        out["floored"] = True
    if p.extra:
        out["extra"] = {k: _num(v) if isinstance(v, float) else v for k, v in p.extra.items()}
    return out


def curve_to_dict(curve: RashomonCurve, elbows: dict | None = None) -> dict:
    if elbows is None:
        elbows = all_elbows(curve) if len(_usable(curve)) >= 2 else {}
    return {
        "kind": curve.kind,
        "measure": "ratio" if curve.kind == "tree" else "volume",
        "seed": curve.seed,
        "theta_policy": curve.theta_policy,
        "points": [point_to_dict(p) for p in curve.points],
        "elbows": elbows,
    }


def _parse_num(v):
    if v is None or v == "":
        return None
    if v == NEG_INF:
        return -math.inf
    if v == "inf":
        return math.inf
    return float(v)


def curve_from_dict(obj: dict) -> RashomonCurve:
    pts = []
    for q in obj["points"]:
        meas = _parse_num(q.get("measure_fraction"))
        pts.append(
            CurvePoint(
                space_label=str(q["label"]),
                empirical_risk=_parse_num(q.get("train_risk")) if q.get("train_risk") is not None else math.nan,
                measure=math.nan if meas is None else meas,
                test_risk=_parse_num(q.get("test_risk")),
                measure_floor=_parse_num(q.get("measure_floor")),
                extra=q.get("extra", {}),
            )
        )
    return RashomonCurve(tuple(pts), obj.get("theta_policy", {}), obj.get("kind", "tree"), obj.get("seed"))


def curve_to_json(curve: RashomonCurve, elbows: dict | None = None) -> str:
    return json.dumps(curve_to_dict(curve, elbows), indent=2, sort_keys=True)


CSV_FIELDS = ["label", "train_risk", "test_risk", "measure_fraction", "measure_percent", "measure_log10", "k", "seed"]


def curve_to_csv(curve: RashomonCurve) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for p in curve.points:
        w.writerow({k: ("" if v is None else v) for k, v in point_to_dict(p).items()})
    return buf.getvalue()


def curve_from_csv(text: str, kind: str = "tree") -> RashomonCurve:
    rows = list(csv.DictReader(io.StringIO(text)))
    return curve_from_dict({"points": rows, "kind": kind})
