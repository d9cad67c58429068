import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rashomon import curves, ridge
from rashomon.curves import (
    CurvePoint,
    RashomonCurve,
    build_ridge_curve,
    build_tree_curve,
    elbow_geometric,
    elbow_maximin,
    elbow_risk_jump,
)
from rashomon.dataset import Dataset, make_folds


def curve_of(risks, measures, labels=None):
    labels = labels or [str(i + 1) for i in range(len(risks))]
    pts = tuple(CurvePoint(l, r, m) for l, r, m in zip(labels, risks, measures))
    return RashomonCurve(pts, {"mode": "absolute", "theta": 0.0})


def log_curve(risks, logs):
    return curve_of(risks, [10.0**v for v in logs])


class TestTreeCurve:
    def test_separable_zero_risk(self):
        x = np.linspace(0, 1, 12)
        d = Dataset(x[:, None], np.where(x > 0.5, 1.0, -1.0))
        c = build_tree_curve(d, None, [1, 2, 3], theta=0.0, samples_per_depth=2000, seed=0)
        assert c.risks() == [0.0, 0.0, 0.0]
        assert c.labels() == ["1", "2", "3"]

    def test_pure_labels_ratio_is_weight(self):
        d = Dataset(np.random.default_rng(0).random((10, 2)), np.ones(10))
        c = build_tree_curve(d, None, [1], theta=0.0, samples_per_depth=1000)
        assert c.points[0].measure == 0.25

    def test_deterministic(self):
        rng = np.random.default_rng(1)
        d = Dataset(rng.random((40, 2)), np.where(rng.random(40) < 0.5, 1.0, -1.0))
        folds = make_folds(d, 4, seed=0)
        a = build_tree_curve(d, folds, [1, 2], samples_per_depth=3000, seed=5)
        b = build_tree_curve(d, folds, [1, 2], samples_per_depth=3000, seed=5)
        assert curves.curve_to_json(a) == curves.curve_to_json(b)
        assert a.points[0].test_risk is not None and a.points[0].extra["folds"] == 4

    def test_needs_classification(self):
        with pytest.raises(ValueError):
            build_tree_curve(Dataset(np.eye(3), np.ones(3), task="regression"), None, [1])


def linear_data(n=30, p=3, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.random((n, p))
    return Dataset(X, X @ np.array([1.0, -2.0, 0.5]), task="regression")


class TestRidgeCurve:
    def test_degree_one_closed_form(self):
        d = linear_data()
        c = build_ridge_curve(d, None, [1], reg=1e-6, theta_rel=0.1, pca_components=None)
        pt = c.points[0]
        # the penalized objective can never exceed its value at the true weights
        assert pt.empirical_risk <= 1e-6 * 5.25 * (1 + 1e-9)
        X = np.asarray(d.features)
        s = np.linalg.svd(X, compute_uv=False)
        theta = 0.1 * pt.empirical_risk
        J = math.pi ** 1.5 * theta ** 1.5 / math.gamma(2.5)
        assert pt.measure == pytest.approx(J * np.prod(1 / np.sqrt(s**2 + 1e-6)), rel=1e-8)

    def test_zero_theta_rel(self):
        rng = np.random.default_rng(2)
        d = Dataset(rng.random((40, 3)), rng.standard_normal(40), task="regression")
        c = build_ridge_curve(d, None, [1, 2, 3], reg=0.01, theta_rel=0.0)
        assert c.measures() == [0.0, 0.0, 0.0]

    def test_nested_risk_non_increasing(self):
        rng = np.random.default_rng(3)
        d = Dataset(rng.random((80, 2)), rng.standard_normal(80), task="regression")
        c = build_ridge_curve(d, None, [1, 2, 3, 4], reg=0.0, pca_components=None)
        risks = c.risks()
        assert all(b <= a * (1 + 1e-9) for a, b in zip(risks, risks[1:]))

    def test_singular_degree_reported(self):
        rng = np.random.default_rng(4)
        d = Dataset(rng.random((6, 2)), rng.standard_normal(6), task="regression")
        # degree 3 has 9 monomials on 6 rows
        c = build_ridge_curve(d, None, [1, 3], reg=0.0, pca_components=None)
        assert math.isfinite(c.points[0].measure)
        assert math.isnan(c.points[1].measure) and "error" in c.points[1].extra
        assert elbow_maximin(c) == "1"

    def test_folds_and_scope(self):
        d = linear_data(40)
        folds = make_folds(d, 4, seed=0)
        a = build_ridge_curve(d, folds, [1, 2], pca_components=2, pca_scope="train")
        assert a.points[0].extra["folds"] == 4 and a.points[0].test_risk is not None
        with pytest.raises(ValueError):
            build_ridge_curve(d, folds, [1], pca_scope="test")

    def test_volume_matches_ridge_module(self):
        d = linear_data(25)
        c = build_ridge_curve(d, None, [2], reg=0.05, theta_rel=0.2, pca_components=None)
        P = curves.polynomial_matrix(np.asarray(d.features), 2)
        fit = ridge.ridge_fit_arrays(P, np.asarray(d.labels), 0.05)
        theta = 0.2 * ridge.objective(fit.w_hat, P, np.asarray(d.labels), 0.05)
        assert c.points[0].measure == pytest.approx(ridge.ridge_volume(ridge.RidgeSpec.from_matrix(P, 0.05, theta)), rel=1e-12)


class TestMaximin:
    def test_equal_risks(self):
        c = curve_of([0.2, 0.2], [0.1, 0.2])
        for G in ("lexicographic", "weighted_sum", "product"):
            assert elbow_maximin(c, G) == "2"

    def test_tolerance_filter(self):
        assert elbow_maximin(curve_of([0.5, 0.1, 0.1], [0.3, 0.3, 0.01]), tolerance=0.02) == "2"

    def test_single_point(self):
        assert elbow_maximin(curve_of([0.3], [0.5])) == "1"

    def test_ties_to_simplest(self):
        assert elbow_maximin(curve_of([0.1, 0.1, 0.1], [0.2, 0.2, 0.2])) == "1"

    def test_weighted_and_product(self):
        c = curve_of([0.4, 0.1], [0.5, 0.05])
        assert elbow_maximin(c, "weighted_sum", weight=0.9) == "2"
        assert elbow_maximin(c, "weighted_sum", weight=0.1) == "1"
        assert elbow_maximin(c, "product") == "1"

    def test_unknown_combiner(self):
        with pytest.raises(ValueError):
            elbow_maximin(curve_of([0.1], [0.1]), "max")


class TestGeometric:
    def test_hand_example(self):
        c = log_curve([0.5, 0.1, 0.1], [-1, -1, -5])
        idx, dist = curves.geometric_distances(c)
        assert dist[1] == pytest.approx(1 / math.sqrt(2), rel=1e-12)
        assert elbow_geometric(c) == "2"

    def test_collinear(self):
        c = log_curve([0.4, 0.3, 0.2, 0.1], [-1, -2, -3, -4])
        _, dist = curves.geometric_distances(c)
        assert np.allclose(dist, 0)
        assert elbow_geometric(c) == "2"

    def test_coincident_endpoints_fall_back(self):
        c = log_curve([0.2, 0.1, 0.2], [-1, -1, -1])
        assert elbow_geometric(c) == elbow_maximin(c)

    def test_duplicate_elbow_stable(self):
        base = log_curve([0.5, 0.2, 0.1, 0.1], [-1, -1.5, -4, -5])
        label = elbow_geometric(base)
        i = base.labels().index(label)
        pts = list(base.points)
        pts.insert(i + 1, pts[i])
        assert elbow_geometric(RashomonCurve(tuple(pts), base.theta_policy)) == label

    def test_needs_three(self):
        with pytest.raises(ValueError):
            elbow_geometric(curve_of([0.2, 0.1], [0.2, 0.1]))

    def test_zero_measure_uses_floor(self):
        pts = (
            CurvePoint("1", 0.5, 0.1),
            CurvePoint("2", 0.1, 0.01),
            CurvePoint("3", 0.1, 0.0, measure_floor=1e-8),
        )
        assert elbow_geometric(RashomonCurve(pts, {})) == "2"


class TestRiskJump:
    def test_example(self):
        assert elbow_risk_jump([0.4, 0.1, 0.1, 0.1], 0.05) == 1

    def test_flat(self):
        assert elbow_risk_jump([0.2, 0.2, 0.2], 0.01) == 0

    def test_large_threshold(self):
        assert elbow_risk_jump([0.5, 0.3, 0.1], 0.4) == 0

    def test_curve_label(self):
        assert elbow_risk_jump(curve_of([0.4, 0.1, 0.1], [0.5, 0.1, 0.01], ["a", "b", "c"]), 0.05) == "b"

    def test_needs_two(self):
        with pytest.raises(ValueError):
            elbow_risk_jump([0.1])


@st.composite
def gamma_curves(draw):
    """Risks fall by more than the threshold to a flat plateau; ratios strictly decrease."""
    head = draw(st.integers(0, 4))
    plateau = draw(st.integers(2, 4))
    floor = draw(st.floats(0.0, 0.3))
    steps = draw(st.lists(st.floats(0.02, 0.2), min_size=head, max_size=head))
    risks = [floor + sum(steps[i:]) for i in range(head)] + [floor] * plateau
    logs = np.cumsum(draw(st.lists(st.floats(0.1, 5.0), min_size=head + plateau, max_size=head + plateau)))
    return curve_of(risks, list(10.0 ** -logs))


class TestProperties:
    @settings(max_examples=100)
    @given(gamma_curves())
    def test_jump_and_lexicographic_agree(self, c):
        assert elbow_risk_jump(c, 0.01) == elbow_maximin(c, "lexicographic", tolerance=0.01)

    @settings(max_examples=100)
    @given(st.lists(st.tuples(st.floats(0, 1), st.floats(1e-30, 1)), min_size=3, max_size=8))
    def test_labels_present(self, pairs):
        c = curve_of(*zip(*pairs))
        for label in curves.all_elbows(c).values():
            assert label in c.labels()


class TestSerialization:
    def sample(self):
        pts = (
            CurvePoint("1", 0.3, 0.2, test_risk=0.35),
            CurvePoint("2", 0.1, 0.0, measure_floor=1e-9),
            CurvePoint("3", 0.1, 1e-5),
        )
        return RashomonCurve(pts, {"mode": "absolute", "theta": 0.05}, seed=3)

    def test_json_round_trip(self):
        c = self.sample()
        text = curves.curve_to_json(c)
        obj = json.loads(text)
        assert obj["points"][1]["measure_log10"] == "-inf" and obj["points"][1]["floored"]
        back = curves.curve_from_dict(obj)
        assert back.risks() == c.risks() and back.measures() == c.measures()
        assert curves.curve_to_json(back) == text

    def test_csv_round_trip(self):
        c = self.sample()
        back = curves.curve_from_csv(curves.curve_to_csv(c))
        assert back.labels() == c.labels() and back.measures() == c.measures()
        assert back.points[0].test_risk == 0.35

    def test_nan_written_as_null(self):
        c = RashomonCurve((CurvePoint("1", math.nan, math.nan, extra={"error": "singular"}), CurvePoint("2", 0.1, 0.2)), {})
        obj = json.loads(curves.curve_to_json(c, {}))
        assert obj["points"][0]["measure_fraction"] is None

    def test_negative_measure_rejected(self):
        with pytest.raises(ValueError):
            CurvePoint("1", 0.1, -1.0)
