"""Inscribed L1-ball (cross-polytope) under-approximation of the hinge-loss
Rashomon set of a 1-norm SVM.

The Rashomon set here is ``{w : H(w) <= H(w_c) + theta}`` with ``H`` the hinge sum
and ``w_c`` the 1-norm SVM optimum. ``H`` is convex, so its maximum over the
cross-polytope ``{w : |w - w_c|_1 <= delta}`` sits at one of the ``2p`` vertices
``w_c +/- delta e_j``; the largest admissible ``delta`` is found by bisection on
that vertex maximum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .dataset import Dataset


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, objective: float | None = None):
        super().__init__(message)
        self.objective = objective


def hinge_sum(w: np.ndarray, X: np.ndarray, y: np.ndarray) -> np.ndarray | float:
    """Hinge sum for one weight vector (shape p) or many (shape m x p)."""
    margins = np.asarray(w) @ np.asarray(X).T * np.asarray(y)
    return np.maximum(0.0, 1.0 - margins).sum(axis=-1)


def svm1_objective(w, X, y, reg_weight: float) -> float:
    return float(reg_weight * np.abs(w).sum() + hinge_sum(w, X, y))


def _as_arrays(d: Dataset | tuple):
    if isinstance(d, Dataset):
        if d.task != "classification":
            raise ValueError("SVM-1 needs a classification dataset")
        return np.asarray(d.features, float), np.asarray(d.labels, float)
    X, y = d
    X = np.atleast_2d(np.asarray(X, float))
    y = np.asarray(y, float).ravel()
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("labels must be -1 or +1")
    return X, y


def svm1_fit(d: Dataset | tuple, reg_weight: float = 1.0, tol: float = 1e-9) -> np.ndarray:
    """Minimize ``reg_weight * |w|_1 + hinge sum`` as a linear program.

    Among optimal solutions the one with the smallest hinge sum is returned
    (a second LP restricted to the optimal face), which makes the choice
    deterministic on flat stretches of the objective.
    """
    if reg_weight <= 0:
        raise ValueError("reg_weight must be positive")
    X, y = _as_arrays(d)
    n, p = X.shape
    # variables: u (p), v (p), xi (n); w = u - v
    c = np.concatenate([np.full(2 * p, reg_weight), np.ones(n)])
    yX = y[:, None] * X
    # 1 - y_i x_i.(u - v) <= xi_i   ->   -yX u + yX v - xi <= -1
    A = np.hstack([-yX, yX, -np.eye(n)])
    b = -np.ones(n)
    first = linprog(c, A_ub=A, b_ub=b, bounds=(0, None), method="highs")
    if first.status != 0:
        raise ConvergenceError(f"1-norm SVM LP failed: {first.message}", getattr(first, "fun", None))
    best = first.fun
    c2 = np.concatenate([np.zeros(2 * p), np.ones(n)])
    A2 = np.vstack([A, c[None, :]])
    b2 = np.concatenate([b, [best + tol * max(1.0, abs(best))]])
    second = linprog(c2, A_ub=A2, b_ub=b2, bounds=(0, None), method="highs")
    sol = second.x if second.status == 0 else first.x
    w = sol[:p] - sol[p : 2 * p]
    w[np.abs(w) < 1e-12] = 0.0
    return w


@dataclass(frozen=True)
class CrossPolytopeBound:
    center: np.ndarray
    half_diagonal: float
    volume_lower_bound: float
    clipped: bool = False
    unbounded: bool = False
    theta: float = 0.0
    center_loss: float = 0.0

    @property
    def dim(self) -> int:
        return self.center.size

    def vertices(self) -> np.ndarray:
        eye = np.eye(self.dim) * self.half_diagonal
        return np.vstack([self.center + eye, self.center - eye])

    def to_dict(self) -> dict:
        return {
            "center": [float(v) for v in self.center],
            "delta": "inf" if self.unbounded else float(self.half_diagonal),
            "volume_lower_bound": "inf" if self.unbounded else float(self.volume_lower_bound),
            "clipped": bool(self.clipped),
        }


def cross_polytope_volume(delta: float, p: int) -> float:
    """Volume 2^p delta^p / p! of an L1 ball of radius delta in R^p."""
    if delta == 0:
        return 0.0
    return math.exp(p * math.log(2.0 * delta) - math.lgamma(p + 1))


def vertex_max_loss(center, delta, X, y) -> float:
    p = center.size
    eye = np.eye(p) * delta
    return float(np.max(hinge_sum(np.vstack([center + eye, center - eye]), X, y)))


def inscribed_cross_polytope(
    d: Dataset | tuple,
    center: np.ndarray,
    theta: float,
    box_radius: float = 1e6,
    tol: float = 1e-9,
) -> CrossPolytopeBound:
    """Largest L1 ball around ``center`` inside the hinge-loss Rashomon set.

    When the loss never exceeds the budget up to ``box_radius`` the radius is
    clipped there and flagged; if the loss is constant along every axis the
    bound is also marked unbounded.
    """
    if theta < 0:
        raise ValueError("theta must be >= 0")
    X, y = _as_arrays(d)
    center = np.asarray(center, float).ravel()
    if center.size != X.shape[1]:
        raise ValueError("center dimension does not match features")
    base = float(hinge_sum(center, X, y))
    budget = base + theta

    def fits(delta):
        return vertex_max_loss(center, delta, X, y) <= budget + 1e-12 * max(1.0, budget)

    p = center.size
    if theta == 0 and not fits(tol):
        return CrossPolytopeBound(center, 0.0, 0.0, theta=theta, center_loss=base)

    hi = 1.0
    while fits(hi):
        if hi >= box_radius:
            flat = all(
                np.isclose(hinge_sum(center + s * box_radius * e, X, y), base)
                for e in np.eye(p)
                for s in (1.0, -1.0)
            )
            return CrossPolytopeBound(
                center, box_radius, cross_polytope_volume(box_radius, p),
                clipped=True, unbounded=flat, theta=theta, center_loss=base,
            )
        hi = min(2.0 * hi, box_radius)
    lo = 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if fits(mid):
            lo = mid
        else:
            hi = mid
    return CrossPolytopeBound(center, lo, cross_polytope_volume(lo, p), theta=theta, center_loss=base)
