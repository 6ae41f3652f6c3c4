from types import SimpleNamespace

import numpy as np
import pytest

from src.components.certification import (
    FlipVerdict,
    certify_astute,
    flip_bounds,
    kernel_flip_bound,
    neighborhood_bayes_predict,
)
from src.components.distributions import Dataset, SupportSet, make_line_distribution
from src.components.histogram import HistogramClassifier
from src.components.kernels import BandwidthKind, KernelClassifier, KernelId, KernelSpec
from src.components.nearest_neighbours import NearestNeighbours
from src.components.regions import make_region
from src.exception.exception import EmptySupportSet, UnboundedRegion


def _kernel(X, y, h, kernel_id=KernelId.EXPONENTIAL):
    return KernelClassifier(Dataset.from_arrays(X, y), KernelSpec(kernel_id, BandwidthKind.FIXED, h))


def test_flip_bound_two_points(two_points):
    clf = KernelClassifier(two_points, KernelSpec(KernelId.EXPONENTIAL, BandwidthKind.FIXED, 1.0))
    margins, bounds = flip_bounds(clf, np.array([[0.2]]), 0.01)
    assert margins[0] == pytest.approx(0.2914, abs=1e-4)
    assert bounds[0] == pytest.approx(0.0131, abs=5e-4)
    assert kernel_flip_bound(clf, 0.2, 0.01) == FlipVerdict.CERTIFIED
    nearby = np.linspace(0.19, 0.21, 1000)
    assert np.max(np.abs(clf.margin_many(nearby) - margins[0])) <= bounds[0]


@pytest.mark.parametrize("kernel_id", list(KernelId))
def test_flip_bound_dominates_observed_change(kernel_id):
    rng = np.random.default_rng(21)
    X = rng.random((40, 2))
    clf = _kernel(X, np.where(X[:, 0] > 0.5, 1, -1), 0.15, kernel_id)
    centres = rng.random((20, 2))
    radius = 0.02
    margins, bounds = flip_bounds(clf, centres, radius)
    for c, m, b in zip(centres, margins, bounds):
        angles = np.linspace(0.0, 2 * np.pi, 64, endpoint=False)
        for r in (radius / 2, radius):
            ring = c + r * np.column_stack([np.cos(angles), np.sin(angles)])
            assert np.max(np.abs(clf.margin_many(ring) - m)) <= b + 1e-12


def test_flip_bound_zero_radius(two_points):
    clf = KernelClassifier(two_points, KernelSpec(KernelId.GAUSSIAN, BandwidthKind.FIXED, 0.5))
    assert kernel_flip_bound(clf, 0.3, 0.0) == FlipVerdict.CERTIFIED
    # x = 0.5 is an exact tie between the two samples
    assert kernel_flip_bound(clf, 0.5, 0.0) == FlipVerdict.INCONCLUSIVE


def test_flip_bound_single_sample():
    clf = _kernel([0.3], [-1], 0.01)
    margins, bounds = flip_bounds(clf, np.array([[0.0], [5.0]]), 10.0)
    assert margins.tolist() == [-1.0, -1.0]
    assert bounds.tolist() == [0.0, 0.0]
    assert kernel_flip_bound(clf, 2.0, 100.0) == FlipVerdict.CERTIFIED


def test_flip_bound_inconclusive_near_boundary(two_points):
    clf = KernelClassifier(two_points, KernelSpec(KernelId.EXPONENTIAL, BandwidthKind.FIXED, 1.0))
    assert kernel_flip_bound(clf, 0.499, 0.05) == FlipVerdict.INCONCLUSIVE


def test_degenerate_anchor(line):
    clf = NearestNeighbours(Dataset.from_arrays([0.2, 0.9], [-1, 1]), 1)
    result = certify_astute(clf, line, 0.5, -1, 0.9)
    assert result.robust and result.astute
    assert result.grid_points_checked == 1
    assert result.counterexample is None
    assert not certify_astute(clf, line, 0.5, 1, 0.9).astute


def test_single_sample_nearest_neighbour(line):
    clf = NearestNeighbours(Dataset.from_arrays([0.8], [1]), 1)
    result = certify_astute(clf, line, 0.8, 1, 0.5)
    assert result.astute and result.robust and result.accurate_at_anchor
    assert result.grid_only
    assert result.grid_points_checked > 1
    assert result.anchor == (0.8,) and result.label == 1


def test_grid_counterexample_lies_in_region(line):
    clf = NearestNeighbours(Dataset.from_arrays([0.2, 0.42], [-1, 1]), 1)
    result = certify_astute(clf, line, 0.3, -1, 0.5)
    assert result.accurate_at_anchor
    assert not result.robust and not result.astute
    region = make_region(line, 0.3, 0.5)
    assert region.contains_point(result.counterexample)
    assert clf.predict(result.counterexample) == 1
    assert 0.305 < result.counterexample[0] < 0.325


def test_kernel_counterexample(line):
    clf = _kernel([0.24, 0.6], [-1, 1], 1.0)
    result = certify_astute(clf, line, 0.4, -1, 0.9)
    assert result.accurate_at_anchor and not result.robust
    assert result.flip_bound_used
    cex = result.counterexample
    assert 0.415 < cex[0] < 0.45
    assert make_region(line, 0.4, 0.9).contains_point(cex)
    assert clf.predict(cex) == 1


def test_kernel_certified_without_refinement(line):
    clf = _kernel([0.0, 1.0], [-1, 1], 0.1)
    result = certify_astute(clf, line, 0.3, -1, 0.5, step=0.01)
    assert result.astute and result.robust
    assert result.flip_bound_used and not result.grid_only
    assert result.refined_steps == 0
    assert result.step_used == 0.01


def test_kernel_certified_after_refinement(line):
    clf = _kernel([0.0, 1.0], [-1, 1], 1.0)
    result = certify_astute(clf, line, 0.45, -1, 0.5, step=0.1)
    assert result.astute and result.robust
    assert result.refined_steps >= 1
    assert result.step_used < 0.1


def test_refinement_exhausted_is_not_robust(line, monkeypatch):
    monkeypatch.setattr("src.components.certification.CertificationConfig",
                        lambda: SimpleNamespace(GRID_STEP=0.01, MAX_REFINEMENTS=0, MAX_REFINED_POINTS=200000))
    clf = _kernel([0.0, 1.0], [-1, 1], 1.0)
    result = certify_astute(clf, line, 0.45, -1, 0.5, step=0.1)
    assert not result.robust and not result.astute
    assert result.flip_bound_used
    assert result.counterexample is None


def test_refinement_budget_is_not_robust(line, monkeypatch, caplog):
    monkeypatch.setattr("src.components.certification.CertificationConfig",
                        lambda: SimpleNamespace(GRID_STEP=0.01, MAX_REFINEMENTS=4, MAX_REFINED_POINTS=1))
    clf = _kernel([0.0, 1.0], [-1, 1], 1.0)
    result = certify_astute(clf, line, 0.45, -1, 0.5, step=0.1)
    assert not result.robust and result.counterexample is None
    assert "giving up" in caplog.text


def test_histogram_clearance_flag(line):
    clf = HistogramClassifier(Dataset.from_arrays([0.1, 0.2, 0.9], [1, 1, -1]), 2, root_lo=(0.0,), root_side=1.0)
    result = certify_astute(clf, line, 0.3, -1, 0.5, step=0.01)
    assert result.robust and not result.accurate_at_anchor
    assert not result.grid_only
    coarse = certify_astute(clf, line, 0.3, -1, 0.5, step=0.2)
    assert coarse.grid_only


def test_unbounded_region(line):
    clf = NearestNeighbours(Dataset.from_arrays([0.8], [1]), 1)
    with pytest.raises(UnboundedRegion):
        certify_astute(clf, line, 0.3, -1, 1.0)


def test_astute_implies_accurate(line):
    rng = np.random.default_rng(2)
    data = line.sample(60, 9)
    clf = NearestNeighbours(data, 5)
    for x in rng.random(10):
        result = certify_astute(clf, line, x, 1 if x > 0.5 else -1, 0.5)
        assert result.astute == (result.accurate_at_anchor and result.robust)
        assert (result.counterexample is None) == result.robust or result.flip_bound_used


def test_neighborhood_bayes_predict(circles):
    assert neighborhood_bayes_predict(circles, (1.0, 0.0)) == 1
    assert neighborhood_bayes_predict(circles, (0.75, 0.0)) == -1
    assert neighborhood_bayes_predict(circles, (0.85, 0.0)) == 1
    assert neighborhood_bayes_predict(circles, (0.5, 0.0)) == -1


def test_neighborhood_bayes_needs_both_sides():
    dist = make_line_distribution()
    hollow = type(dist)(pos_support=dist.pos_support, neg_support=SupportSet(), half_support=dist.half_support,
                        pos_weight=1.0, eta_kind=dist.eta_kind)
    with pytest.raises(EmptySupportSet):
        neighborhood_bayes_predict(hollow, 0.2)


def test_certified_kernel_regions_hold_on_finer_grid(line):
    rng = np.random.default_rng(0)
    checked = 0
    for trial in range(12):
        data = line.sample(40, 100 + trial)
        clf = KernelClassifier(data, KernelSpec(KernelId.GAUSSIAN, BandwidthKind.FIXED, 0.05))
        x = float(rng.random())
        kappa = float(rng.uniform(0.1, 0.9))
        y = clf.predict(x)
        result = certify_astute(clf, line, x, y, kappa, step=0.01)
        if not result.astute:
            continue
        checked += 1
        fine = make_region(line, x, kappa).grid(0.001)
        assert np.all(clf.predict_many(fine) == y)
    assert checked > 0


@pytest.mark.parametrize("name", ["line", "circles", "segments"])
def test_neighborhood_bayes_agrees_with_bayes_on_support(name, request):
    dist = request.getfixturevalue(name)
    points = dist.sample(10000, 21).X
    expected = np.array([dist.bayes_label(x) for x in points])
    assert np.array_equal(dist.neighbor_bayes_labels(points), expected)
    assert all(neighborhood_bayes_predict(dist, x) == y for x, y in zip(points[:1000], expected[:1000]))


def test_certificates_are_monotone_in_kappa(line):
    rng = np.random.default_rng(12)
    kappas = (0.1, 0.3, 0.5, 0.7, 0.9)
    for trial in range(12):
        data = line.sample(60, 300 + trial)
        x = float(rng.random())
        for clf in (KernelClassifier(data, KernelSpec(KernelId.GAUSSIAN, BandwidthKind.FIXED, 0.05)),
                    NearestNeighbours(data, 5)):
            y = clf.predict(x)
            verdicts = [certify_astute(clf, line, x, y, kappa, step=0.01).astute for kappa in kappas]
            assert verdicts == sorted(verdicts, reverse=True)
