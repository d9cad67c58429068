"""Calculators for finite-class and Lipschitz generalization bounds, sampling
probabilities, pattern-ratio limits and growth counts.

Natural logarithms throughout, except the binary entropy which uses log2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, NamedTuple, Sequence

import numpy as np
from scipy.special import gammaln, logsumexp


@dataclass(frozen=True)
class BoundInputs:
    n: int = 1
    b: float = 1.0
    epsilon: float = 0.05
    gamma: float = 0.0
    f1_size: int = 1
    f2_size: int | None = None
    rset_size: int | None = None
    rademacher: float | None = None
    lipschitz: float | None = None
    theta: float | None = None
    delta: float = 0.0

    def __post_init__(self):
        for name in ("n", "b", "gamma", "f1_size", "delta"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if self.f2_size is not None:
            if self.f1_size > self.f2_size:
                raise ValueError("f1_size cannot exceed f2_size")
            if self.rset_size is not None and self.rset_size > self.f2_size:
                raise ValueError("rset_size cannot exceed f2_size")


def _check_n_eps(inp: BoundInputs):
    if inp.n < 1:
        raise ValueError("n must be >= 1")
    if inp.epsilon <= 0:
        raise ValueError("epsilon must be positive")


def thm_anchored_I_rhs(inp: BoundInputs) -> float:
    """gamma + 2b sqrt((log|F1| + log(2/eps)) / (2n))."""
    _check_n_eps(inp)
    if inp.f1_size < 1:
        raise ValueError("f1_size must be >= 1")
    return inp.gamma + 2 * inp.b * math.sqrt((math.log(inp.f1_size) + math.log(2 / inp.epsilon)) / (2 * inp.n))


def thm_approximating_set_rhs(inp: BoundInputs) -> float:
    """2 gamma + b sqrt(log(1/eps) / (2n))."""
    _check_n_eps(inp)
    return 2 * inp.gamma + inp.b * math.sqrt(max(0.0, math.log(1 / inp.epsilon)) / (2 * inp.n))


def sampled_subclass_probability(f2_size: int, f1_size: int, rset_size: int) -> float:
    """Chance that |F1| functions drawn without replacement from F2 hit a Rashomon
    set of size |Rset|: 1 - prod_{i=1}^{|Rset|} (1 - |F1| / (|F2| - |Rset| + i))."""
    if min(f2_size, f1_size, rset_size) < 0:
        raise ValueError("sizes must be nonnegative")
    if f1_size > f2_size:
        raise ValueError("f1_size cannot exceed f2_size")
    if rset_size > f2_size:
        raise ValueError("rset_size cannot exceed f2_size")
    if rset_size == 0 or f1_size == 0:
        return 0.0
    if f1_size > f2_size - rset_size:
        return 1.0
    i = np.arange(1, rset_size + 1, dtype=float)
    log_miss = float(np.sum(np.log1p(-f1_size / (f2_size - rset_size + i))))
    return -math.expm1(log_miss)


def sampled_subclass_probability_exact(f2_size: int, f1_size: int, rset_size: int) -> Fraction:
    """Same quantity as a rational: 1 - C(|F2|-|Rset|, |F1|) / C(|F2|, |F1|)."""
    return 1 - Fraction(math.comb(f2_size - rset_size, f1_size), math.comb(f2_size, f1_size))


def rset_size_from_ratio(f2_size: int, rset_ratio: float) -> int:
    """Smallest Rashomon-set size whose ratio reaches ``rset_ratio``."""
    return max(1, math.ceil(rset_ratio * f2_size - 1e-9))


def min_reference_class_size(f2_size: int, rset_ratio: float, overall_confidence: float = 0.99) -> int:
    """Smallest |F1| with (1 - eps) p >= overall_confidence, splitting the
    confidence evenly: eps = 1 - sqrt(overall_confidence), so p >= sqrt(target)."""
    if not 0 < rset_ratio <= 1:
        raise ValueError("rset_ratio must be in (0, 1]")
    if not 0 < overall_confidence < 1:
        raise ValueError("overall_confidence must be in (0, 1)")
    rset = rset_size_from_ratio(f2_size, rset_ratio)
    keep = math.sqrt(overall_confidence)

    def ok(f1):
        return keep * sampled_subclass_probability(f2_size, f1, rset) >= overall_confidence

    if not ok(f2_size):
        raise ValueError("confidence unattainable even with |F1| = |F2|")
    lo, hi = 1, f2_size
    while lo < hi:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid + 1
    return lo


def lemma_ratio_threshold(f1_size: int, epsilon: float) -> float:
    """Ratio 1 - eps^(1/|F1|) above which a random F1 meets the set w.p. >= 1 - eps."""
    if f1_size < 1:
        raise ValueError("f1_size must be >= 1")
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must be in (0, 1)")
    return -math.expm1(math.log(epsilon) / f1_size)


def membership_probability(n: int, epsilon: float, b: float) -> float:
    """1 - exp(-2 n (eps/b)^2)."""
    if b <= 0:
        raise ValueError("b must be positive")
    return -math.expm1(-2.0 * n * (epsilon / b) ** 2)


# ---------------------------------------------------------------- patterns

EXACT_N = 4096


def pattern_ratio_limit_exact(n: int, theta: float) -> Fraction:
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0 <= theta <= 1:
        raise ValueError("theta must be in [0, 1]")
    m = math.floor(theta * n + 1e-9)
    return Fraction(sum(math.comb(n, i) for i in range(m + 1)), 2**n)


def pattern_ratio_limit(n: int, theta: float) -> float:
    """sum_{i <= floor(theta n)} C(n, i) / 2^n; exact for n <= 4096, log-space beyond."""
    if n <= EXACT_N:
        return float(pattern_ratio_limit_exact(n, theta))
    if not 0 <= theta <= 1:
        raise ValueError("theta must be in [0, 1]")
    m = math.floor(theta * n + 1e-9)
    i = np.arange(m + 1)
    log_terms = gammaln(n + 1) - gammaln(i + 1) - gammaln(n - i + 1)
    return float(math.exp(min(0.0, logsumexp(log_terms) - n * math.log(2))))


def binary_entropy(theta: float) -> float:
    if theta in (0.0, 1.0):
        return 0.0
    return -theta * math.log2(theta) - (1 - theta) * math.log2(1 - theta)


def entropy_bounds(n: int, theta: float, form: str = "lattice") -> tuple[float, float]:
    """(lower, upper) around the limiting pattern ratio for theta in (0, 1/2].

    upper = 2^{n(H(theta)-1)}. The lower side rests on C(n, m) with m = floor(theta n):
    ``lattice`` evaluates 2^{n(H(t)-1)} / sqrt(8 n t (1-t)) at t = m/n (2^-n when
    m = 0), which holds for every n; ``literal`` plugs theta in directly and is
    only valid when theta n is an integer.
    """
    if not 0 < theta <= 0.5:
        raise ValueError("entropy bounds need theta in (0, 1/2]")
    if n < 1:
        raise ValueError("n must be >= 1")
    upper = 2.0 ** (n * (binary_entropy(theta) - 1))
    if form == "literal":
        return upper / math.sqrt(8 * n * theta * (1 - theta)), upper
    if form != "lattice":
        raise ValueError(f"unknown form {form!r}")
    m = math.floor(theta * n + 1e-9)
    if m == 0:
        return 2.0**-n, upper
    t = m / n
    return 2.0 ** (n * (binary_entropy(t) - 1)) / math.sqrt(8 * n * t * (1 - t)), upper


# ---------------------------------------------------------------- Lipschitz bounds

Variant = Literal["existence_I", "existence_II", "multiple", "reduced_complexity"]


class LipschitzBound(NamedTuple):
    rhs: float
    radius: float | None = None  # theta / K for existence_I


def lipschitz_generalization_rhs(inp: BoundInputs, variant: Variant = "existence_I") -> LipschitzBound:
    """2K R_n(F1) + b sqrt(log(2/eps)/(2n)); reduced_complexity adds 2K delta.

    R_n and K are inputs; nothing here estimates them.
    """
    if inp.rademacher is None or inp.lipschitz is None:
        raise ValueError("rademacher complexity and Lipschitz constant must be supplied")
    _check_n_eps(inp)
    K, R = inp.lipschitz, inp.rademacher
    tail = inp.b * math.sqrt(math.log(2 / inp.epsilon) / (2 * inp.n))
    if variant in ("existence_I", "existence_II", "multiple"):
        rhs = 2 * K * R + tail
    elif variant == "reduced_complexity":
        rhs = 2 * K * (inp.delta + R) + tail
    else:
        raise ValueError(f"unknown variant {variant!r}")
    radius = None
    if variant == "existence_I" and inp.theta is not None:
        radius = math.inf if K == 0 else inp.theta / K
    return LipschitzBound(rhs, radius)


def growth_lower_bound(C: float, T: int) -> int | float:
    """(C^T - 1)/(C - 1) models, the size implied by C-fold growth across T levels."""
    if C <= 1:
        raise ValueError("growth factor C must exceed 1")
    if T < 1:
        raise ValueError("T must be >= 1")
    if float(C).is_integer() and T <= 4096:
        c = int(C)
        return (c**T - 1) // (c - 1)
    return math.expm1(T * math.log(C)) / (C - 1)


# ---------------------------------------------------------------- packing


def _pairwise(points: np.ndarray, ref: np.ndarray, metric: str) -> np.ndarray:
    diff = points - ref
    if metric == "l1":
        return np.abs(diff).sum(axis=1)
    if metric == "l2":
        return np.sqrt((diff**2).sum(axis=1))
    if metric == "hamming":
        return (points != ref).sum(axis=1).astype(float)
    raise ValueError(f"unknown metric {metric!r}")


def packing_count_lower_bound(points: Sequence, radius: float, metric: str = "l2") -> list[int]:
    """Greedy farthest-point packing with pairwise distances > ``radius``.

    Returns the indices of the kept points; their count lower-bounds the packing
    number at that radius. Starts from point 0; ties go to the lowest index.
    """
    P = np.asarray(points, dtype=float)
    if P.size == 0:
        raise ValueError("empty point list")
    if P.ndim == 1:
        P = P[:, None]
    metric = metric.lower()
    kept = [0]
    nearest = _pairwise(P, P[0], metric)
    while True:
        j = int(np.argmax(nearest))
        if nearest[j] <= radius:
            return kept
        kept.append(j)
        nearest = np.minimum(nearest, _pairwise(P, P[j], metric))
