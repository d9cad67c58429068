"""Rashomon ratio estimation: rejection / importance sampling, exhaustive counting,
pattern ratios and prediction diversity."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np

from . import _rng, trees
from .dataset import Dataset

# absorbs float noise such as 0.1 + 0.2 > 0.3 at the inclusive boundary
MEMBERSHIP_EPS = 1e-12
DEFAULT_ENUMERATION_CAP = 100_000


@dataclass(frozen=True)
class RashomonSpec:
    """Membership rule: risk <= reference_risk + theta, or risk <= gamma when anchored."""

    theta: float = 0.05
    reference_risk: float | None = None
    anchored: bool = False
    gamma: float | None = None

    def __post_init__(self):
        if self.theta < 0:
            raise ValueError("theta must be >= 0")
        if self.anchored:
            if self.gamma is None or self.gamma < 0:
                raise ValueError("an anchored set needs gamma >= 0")

    @property
    def threshold(self) -> float:
        if self.anchored:
            return float(self.gamma)
        if self.reference_risk is None:
            raise ValueError("reference_risk is not set")
        return float(self.reference_risk) + float(self.theta)

    def with_reference(self, reference_risk: float) -> "RashomonSpec":
        return RashomonSpec(self.theta, float(reference_risk), self.anchored, self.gamma)

    def contains(self, risk) -> np.ndarray | bool:
        return np.asarray(risk) <= self.threshold + MEMBERSHIP_EPS


@dataclass(frozen=True)
class RatioEstimate:
    ratio: float
    samples: int
    confidence_radius: float
    confidence: float
    estimator: str  # rejection | importance | exhaustive
    in_set_count: int
    seed: int | None = None
    weight: float = 1.0
    threshold: float | None = None

    @property
    def ratio_percent(self) -> float:
        return 100.0 * self.ratio

    @property
    def alpha(self) -> float:
        # confidence is stored as 1 - alpha; undo the float noise of that subtraction
        return round(1.0 - self.confidence, 12)

    @property
    def min_nonzero(self) -> float:
        """Smallest positive value this estimator can report."""
        return self.weight / self.samples

    def to_dict(self) -> dict[str, Any]:
        return {
            "ratio_fraction": self.ratio,
            "ratio_percent": self.ratio_percent,
            "k": self.samples,
            "t": self.confidence_radius,
            "alpha": self.alpha,
            "estimator": self.estimator,
            "in_set_count": self.in_set_count,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "RatioEstimate":
        return cls(
            ratio=obj["ratio_fraction"],
            samples=obj["k"],
            confidence_radius=obj["t"],
            confidence=1.0 - obj["alpha"],
            estimator=obj["estimator"],
            in_set_count=obj["in_set_count"],
            seed=obj.get("seed"),
        )


def hoeffding_sample_size(t: float, alpha: float) -> int:
    """Smallest k with 2 exp(-2 k t^2) <= alpha."""
    if t <= 0:
        raise ValueError("t must be positive")
    if not 0 < alpha <= 2:
        raise ValueError("alpha must be in (0, 2]")
    return math.ceil(math.log(2.0 / alpha) / (2.0 * t * t))


def hoeffding_radius(k: int, alpha: float) -> float:
    return math.sqrt(math.log(2.0 / alpha) / (2.0 * k))


class FiniteSpace:
    """A uniformly weighted finite hypothesis space."""

    def __init__(self, hypotheses: Sequence):
        if len(hypotheses) == 0:
            raise ValueError("empty hypothesis space")
        self.hypotheses = list(hypotheses)

    def __len__(self):
        return len(self.hypotheses)

    def sample(self, rng: np.random.Generator, size: int) -> list:
        idx = rng.integers(0, len(self.hypotheses), size=size)
        return [self.hypotheses[i] for i in idx]


def _in_set(risks, spec: RashomonSpec) -> np.ndarray:
    return spec.contains(np.asarray(risks, dtype=float))


def estimate_ratio_rejection(
    space_sampler: FiniteSpace | Callable[[np.random.Generator, int], Sequence],
    risk_fn: Callable[[Any], float],
    spec: RashomonSpec,
    k: int,
    seed: int = 0,
    alpha: float = 0.05,
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP,
) -> RatioEstimate:
    """Fraction of draws from the target distribution that land in the Rashomon set.

    ``space_sampler`` is either a :class:`FiniteSpace` or a callable
    ``(rng, size) -> hypotheses``. A finite space no larger than
    ``enumeration_cap`` is counted exhaustively instead of sampled.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if isinstance(space_sampler, FiniteSpace) and len(space_sampler) <= enumeration_cap:
        risks = [risk_fn(h) for h in space_sampler.hypotheses]
        hits = int(np.sum(_in_set(risks, spec)))
        return RatioEstimate(hits / len(risks), len(risks), 0.0, 1.0, "exhaustive", hits, seed)
    draw = space_sampler.sample if isinstance(space_sampler, FiniteSpace) else space_sampler
    hits = 0
    for b, start, stop in _rng.blocks(k):
        batch = draw(_rng.substream(seed, "rejection", b), stop - start)
        hits += int(np.sum(_in_set([risk_fn(h) for h in batch], spec)))
    return RatioEstimate(hits / k, k, hoeffding_radius(k, alpha), 1.0 - alpha, "rejection", hits, seed)


def default_reference_risk(batch: trees.TreeBatch, d: Dataset) -> float:
    """min(best sampled risk, CART risk at the same depth)."""
    cart = trees.empirical_risk(trees.cart_fit(d, batch.depth), d)
    return min(float(batch.risks.min()), cart)


def ratio_from_batch(batch: trees.TreeBatch, spec: RashomonSpec, seed: int | None = None, alpha: float = 0.05):
    hits = int(np.sum(_in_set(batch.risks, spec)))
    kind = "importance" if batch.weight != 1.0 else "rejection"
    return RatioEstimate(
        ratio=batch.weight * hits / batch.k,
        samples=batch.k,
        confidence_radius=hoeffding_radius(batch.k, alpha),
        confidence=1.0 - alpha,
        estimator=kind,
        in_set_count=hits,
        seed=seed,
        weight=batch.weight,
        threshold=spec.threshold,
    )


def estimate_ratio_importance(
    d: Dataset,
    depth: int,
    spec: RashomonSpec,
    k: int,
    seed: int = 0,
    alpha: float = 0.05,
    workers: int | None = None,
) -> RatioEstimate:
    """Importance-sampled tree ratio: proposal trees with data-assigned leaves, each
    carrying weight (1/2)**(2**depth). A missing reference risk defaults to
    min(best sampled, CART).

    The reported radius is the plain Hoeffding radius of the in-set frequency
    before weighting.
    """
    batch = trees.sample_trees(d, depth, k, seed, "data", workers)
    if not spec.anchored and spec.reference_risk is None:
        spec = spec.with_reference(default_reference_risk(batch, d))
    return ratio_from_batch(batch, spec, seed, alpha)


def estimate_tree_ratio_rejection(
    d: Dataset,
    depth: int,
    spec: RashomonSpec,
    k: int,
    seed: int = 0,
    alpha: float = 0.05,
    workers: int | None = None,
) -> RatioEstimate:
    """Plain rejection sampling from the uniform-leaf target distribution over trees."""
    batch = trees.sample_trees(d, depth, k, seed, "uniform", workers)
    if not spec.anchored and spec.reference_risk is None:
        proposal = trees.sample_trees(d, depth, k, seed, "data", workers)
        ref = min(default_reference_risk(proposal, d), float(batch.risks.min()))
        spec = spec.with_reference(ref)
    return ratio_from_batch(batch, spec, seed, alpha)


def anchored_membership(risk: float, gamma: float) -> bool:
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    return bool(risk <= gamma + MEMBERSHIP_EPS)


# ---------------------------------------------------------------- patterns


@dataclass(frozen=True)
class PatternTally:
    numerator: int
    denominator: int

    @property
    def ratio(self) -> float:
        return self.numerator / self.denominator

    def to_dict(self) -> dict:
        return {"numerator": self.numerator, "denominator": self.denominator, "ratio": self.ratio}


def pattern_ratio_exact(
    hypotheses: Sequence[Sequence[float]] | np.ndarray,
    risks: Sequence[float],
    spec: RashomonSpec,
    pattern: str = "sign",
    labels: Sequence[float] | None = None,
) -> PatternTally:
    """Distinct patterns among in-set hypotheses over distinct patterns overall.

    ``pattern="sign"`` uses sign(prediction); ``pattern="loss"`` uses the 0-1
    loss vector against ``labels``.
    """
    P = np.asarray(hypotheses, dtype=float)
    if P.size == 0:
        raise ValueError("empty hypothesis list")
    if P.ndim != 2:
        raise ValueError("hypotheses must be a list of equal-length prediction vectors")
    risks = np.asarray(risks, dtype=float)
    if risks.shape != (P.shape[0],):
        raise ValueError("one risk per hypothesis required")
    if pattern == "sign":
        Z = P >= 0
    elif pattern == "loss":
        if labels is None:
            raise ValueError("loss patterns need labels")
        Z = np.sign(P) != np.asarray(labels, dtype=float)
    else:
        raise ValueError(f"unknown pattern kind {pattern!r}")
    packed = np.packbits(Z, axis=1)
    rows = [r.tobytes() for r in packed]
    member = _in_set(risks, spec)
    num = len({r for r, m in zip(rows, member) if m})
    den = len(set(rows))
    return PatternTally(num, den)


def all_labelings(n: int) -> np.ndarray:
    """Every {-1,+1}^n vector; row j is binary(j) with 0 mapped to -1."""
    j = np.arange(2**n, dtype=np.int64)[:, None]
    bits = (j >> np.arange(n - 1, -1, -1)) & 1
    return (2 * bits - 1).astype(np.int8)


def average_hamming(predictions: Sequence[Sequence[float]] | np.ndarray) -> float:
    P = np.asarray(predictions)
    if P.ndim != 2:
        raise ValueError("predictions must have equal lengths")
    m = P.shape[0]
    if m < 2:
        raise ValueError("need at least two prediction vectors")
    # per coordinate, the number of disagreeing pairs is a * (m - a) for a values of one kind
    total = 0
    for col in P.T:
        _, counts = np.unique(col, return_counts=True)
        total += (m * m - int(np.sum(counts.astype(np.int64) ** 2))) // 2
    return total / (m * (m - 1) / 2)


__all__ = [
    "RashomonSpec",
    "RatioEstimate",
    "PatternTally",
    "FiniteSpace",
    "hoeffding_sample_size",
    "hoeffding_radius",
    "estimate_ratio_rejection",
    "estimate_ratio_importance",
    "estimate_tree_ratio_rejection",
    "ratio_from_batch",
    "default_reference_risk",
    "anchored_membership",
    "pattern_ratio_exact",
    "all_labelings",
    "average_hamming",
]
