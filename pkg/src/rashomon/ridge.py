"""Closed-form Rashomon volume of ridge / least-squares regression.

For the objective ``L(w) = |Xw - y|^2 + C |w|^2`` with minimizer ``w_hat``,
``L(w_hat + d) - L(w_hat) = d^T (X^T X + C I) d`` exactly, so the set
``{w : L(w) <= L(w_hat) + theta}`` is an ellipsoid with volume

    pi^(p/2) theta^(p/2) / Gamma(p/2 + 1) * prod_i 1 / sqrt(sigma_i^2 + C)

where ``sigma_i`` are the singular values of ``X``. Nothing here depends on ``y``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .dataset import Dataset


class SingularGramError(ValueError):
    pass


def _frozen(a):
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


def singular_values(X: np.ndarray) -> np.ndarray:
    """All p singular values of X, zero-padded when n < p."""
    X = np.asarray(X, dtype=float)
    s = np.linalg.svd(X, compute_uv=False)
    out = np.zeros(X.shape[1])
    out[: s.size] = s
    return out


@dataclass(frozen=True)
class RidgeSpec:
    singular_values: np.ndarray
    reg: float
    theta: float

    def __post_init__(self):
        s = _frozen(np.ravel(self.singular_values))
        if s.size < 1 or np.any(s < 0):
            raise ValueError("singular values must be a non-empty nonnegative vector")
        if self.reg < 0:
            raise ValueError("reg must be >= 0")
        if self.theta < 0:
            raise ValueError("theta must be >= 0")
        object.__setattr__(self, "singular_values", s)

    @property
    def dim(self) -> int:
        return self.singular_values.size

    @classmethod
    def from_matrix(cls, X: np.ndarray, reg: float, theta: float) -> "RidgeSpec":
        return cls(singular_values(X), reg, theta)


@dataclass(frozen=True)
class RidgeFit:
    w_hat: np.ndarray
    gram: np.ndarray
    reg: float

    def __post_init__(self):
        object.__setattr__(self, "w_hat", _frozen(self.w_hat))
        object.__setattr__(self, "gram", _frozen(self.gram))


def design(d: Dataset, intercept: bool = False) -> np.ndarray:
    X = np.asarray(d.features, dtype=float)
    return np.column_stack([X, np.ones(d.n)]) if intercept else X


def ridge_fit_arrays(X: np.ndarray, y: np.ndarray, reg: float) -> RidgeFit:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if reg < 0:
        raise ValueError("reg must be >= 0")
    gram = X.T @ X + reg * np.eye(X.shape[1])
    try:
        chol = np.linalg.cholesky(gram)
    except np.linalg.LinAlgError as exc:
        raise SingularGramError("X^T X + C I is not positive definite; add regularization or reduce features") from exc
    # reject numerically singular systems that slip past Cholesky
    diag = np.diag(chol)
    if diag.min() <= 1e-12 * max(1.0, diag.max()):
        raise SingularGramError("X^T X + C I is numerically singular")
    z = np.linalg.solve(chol, X.T @ y)
    w = np.linalg.solve(chol.T, z)
    return RidgeFit(w, gram, float(reg))


def ridge_fit(d: Dataset, reg: float, intercept: bool = False) -> RidgeFit:
    if d.task != "regression":
        raise ValueError("ridge_fit needs a regression dataset")
    return ridge_fit_arrays(design(d, intercept), d.labels, reg)


def objective(w: np.ndarray, X: np.ndarray, y: np.ndarray, reg: float) -> float:
    """Penalized sum of squares |Xw - y|^2 + C |w|^2 (no 1/n)."""
    r = np.asarray(X) @ np.asarray(w) - np.asarray(y)
    return float(r @ r + reg * np.dot(w, w))


def log_ball_constant(theta: float, p: int) -> float:
    """log of pi^(p/2) theta^(p/2) / Gamma(p/2 + 1), the volume of a radius-sqrt(theta) p-ball."""
    if theta == 0:
        return -math.inf
    return 0.5 * p * (math.log(math.pi) + math.log(theta)) - float(gammaln(0.5 * p + 1.0))


def ball_constant(theta: float, p: int) -> float:
    return math.exp(log_ball_constant(theta, p))


def log_ridge_volume(spec: RidgeSpec) -> float:
    s2c = spec.singular_values**2 + spec.reg
    if np.any(s2c <= 0):
        raise SingularGramError("a zero singular value with C = 0 makes the Rashomon volume infinite")
    return log_ball_constant(spec.theta, spec.dim) - 0.5 * float(np.sum(np.log(s2c)))


def ridge_volume(spec: RidgeSpec) -> float:
    return math.exp(log_ridge_volume(spec))


def log10_ridge_volume(spec: RidgeSpec) -> float:
    return log_ridge_volume(spec) / math.log(10.0)


def quadratic_form(w: np.ndarray, fit: RidgeFit) -> float:
    delta = np.asarray(w, dtype=float) - fit.w_hat
    if delta.shape != fit.w_hat.shape:
        raise ValueError("dimension mismatch")
    return float(delta @ fit.gram @ delta)


def ellipsoid_contains(w: np.ndarray, fit: RidgeFit, theta: float, rtol: float = 1e-12) -> bool:
    """Inclusive test of (w - w_hat)^T G (w - w_hat) <= theta."""
    return quadratic_form(w, fit) <= theta * (1.0 + rtol)


def theta_from_direction(fit: RidgeFit, w_interest: np.ndarray) -> float:
    """Smallest theta whose Rashomon ellipsoid contains ``w_interest``."""
    return quadratic_form(w_interest, fit)


# ---------------------------------------------------------------- lower bounds

BOUND_KINDS = ("frobenius", "second_derivative", "unit_sphere")


def ridge_volume_lower_bounds(
    spec: RidgeSpec,
    kind: str = "frobenius",
    frobenius: float | None = None,
    n: int | None = None,
    second_derivative: float | None = None,
    form: str = "amgm",
) -> float:
    """Singular-value-free lower bounds on the ridge Rashomon volume.

    Each kind supplies an upper bound ``F2`` on ``|X|_F^2 = sum sigma_i^2``:

    * ``frobenius``: caller passes ``F >= |X|_F``, so ``F2 = F**2``;
    * ``second_derivative``: every diagonal Hessian entry ``2|x_j|^2 + 2C`` is at
      most ``delta >= 2C``, so ``F2 = p (delta/2 - C)``;
    * ``unit_sphere``: rows of unit norm, so ``F2 = n``.

    ``form="amgm"`` returns ``J(theta, p) * (p / (F2 + pC))**(p/2)``, valid by
    AM-GM on ``sigma_i^2 + C`` and tight when all singular values are equal.
    ``form="literal"`` returns ``2 J(theta, p) / (F + pC)`` with ``F = sqrt(F2)``;
    it is kept for comparison only and can exceed the exact volume (already for
    p = 1, sigma = F = 1, C = 0).
    """
    p, C = spec.dim, spec.reg
    if kind == "frobenius":
        if frobenius is None or frobenius <= 0:
            raise ValueError("frobenius kind needs F > 0")
        F2 = float(frobenius) ** 2
    elif kind == "second_derivative":
        if second_derivative is None:
            raise ValueError("second_derivative kind needs delta")
        if second_derivative < 2 * C:
            raise ValueError("second-derivative bound requires delta >= 2C")
        F2 = p * (second_derivative / 2.0 - C)
    elif kind == "unit_sphere":
        if n is None or n < 1:
            raise ValueError("unit_sphere kind needs n >= 1")
        F2 = float(n)
    else:
        raise ValueError(f"unknown bound kind {kind!r}; choose from {BOUND_KINDS}")

    logJ = log_ball_constant(spec.theta, p)
    if form == "amgm":
        denom = F2 + p * C
        if denom <= 0:
            return math.inf
        return math.exp(logJ + 0.5 * p * (math.log(p) - math.log(denom)))
    if form == "literal":
        return 2.0 * math.exp(logJ) / (math.sqrt(F2) + p * C)
    raise ValueError(f"unknown form {form!r}")
