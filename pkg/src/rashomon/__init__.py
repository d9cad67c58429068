"""Rashomon ratios, volumes, bounds and curves."""

from .dataset import Dataset, FoldPlan, load_csv, make_folds, pca_top_k, polynomial_features
from .estimator import (
    RashomonSpec,
    RatioEstimate,
    average_hamming,
    estimate_ratio_importance,
    estimate_ratio_rejection,
    hoeffding_sample_size,
    pattern_ratio_exact,
)
from .ridge import RidgeSpec, ridge_fit, ridge_volume
from .trees import DecisionTree, cart_fit, empirical_risk, predictions

__version__ = "0.1.0"

__all__ = [
    "Dataset", "FoldPlan", "load_csv", "make_folds", "pca_top_k", "polynomial_features",
    "RashomonSpec", "RatioEstimate", "average_hamming", "estimate_ratio_importance",
    "estimate_ratio_rejection", "hoeffding_sample_size", "pattern_ratio_exact",
    "RidgeSpec", "ridge_fit", "ridge_volume",
    "DecisionTree", "cart_fit", "empirical_risk", "predictions",
]
