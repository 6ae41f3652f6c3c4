"""Full-size experiment reproductions; run with ``pytest -m slow``."""
import os
from dataclasses import replace

import numpy as np
import pytest

from src.components.certification import certify_astute, flip_bounds
from src.components.classifiers import parse_family
from src.components.distributions import SupportKind
from src.components.kernels import BandwidthKind, KernelClassifier, KernelId, KernelSpec
from src.components.regions import make_region
from src.entity.artifact_entity import GAP_MEASURES
from src.pipeline.pipeline import ExperimentPipeline, measure_gap
from src.utils.config_parser import load_config, load_expectations

pytestmark = pytest.mark.slow

CONFIG_DIR = os.path.join(os.path.dirname(__file__), "..", "configs")
EXPECTED = load_expectations(os.path.join(CONFIG_DIR, "expected.cfg"))


def _run(name, tmp_path, **overrides):
    config = replace(load_config(os.path.join(CONFIG_DIR, f"{name}.cfg")), **overrides)
    return ExperimentPipeline(config, out_dir=str(tmp_path), n_jobs=-1).astuteness_rows()


def _rows(name, tmp_path, **overrides):
    return {(r.classifier, r.n, r.kappa): r.mean for r in _run(name, tmp_path, **overrides)}


def _clears_pinned_gap(rows, key):
    return measure_gap(rows, GAP_MEASURES[key]) >= EXPECTED[key].floor


def test_exponential_kernel_converges(tmp_path):
    table = _rows("convergence", tmp_path, classifiers=("kernel:exponential:sqrtlog",), n_schedule=(8000,))
    for kappa in ("accuracy", "0.1", "0.3", "0.5"):
        assert abs(table[("kernel:exponential:sqrtlog", 8000, kappa)] - 0.8) <= 0.08


def test_polynomial_kernel_degrades_with_kappa(tmp_path):
    label = "kernel:polynomial:cuberoot"
    rows = _run("convergence", tmp_path, classifiers=(label,), n_schedule=(8000,))
    table = {(r.classifier, r.n, r.kappa): r.mean for r in rows}
    assert abs(table[(label, 8000, "accuracy")] - 0.8) <= 0.08
    assert table[(label, 8000, "0.5")] <= table[(label, 8000, "0.1")] - 0.10
    assert _clears_pinned_gap(rows, "convergence.polynomial_kappa_drop")


def test_logarithmic_k_is_not_astute(tmp_path):
    rows = _run("lower_bound", tmp_path)
    table = {(r.classifier, r.n, r.kappa): r.mean for r in rows}
    n = 100000
    assert table[("knn:logceil=1", n, "0.5")] < table[("knn:power=0.4", n, "0.5")]
    assert _clears_pinned_gap(rows, "lower_bound.astuteness_gap")
    for label in ("knn:logceil=1", "knn:power=0.4"):
        assert abs(table[(label, n, "accuracy")] - 0.75) <= 0.03


def test_histogram_is_not_neighborhood_consistent(tmp_path):
    rows = _run("histogram_demo", tmp_path)
    table = {(r.classifier, r.n, r.kappa): r.mean for r in rows}
    n = 4000
    histogram, kernel = "histogram:power=0.5", "kernel:exponential:sqrtlog"
    assert table[(histogram, n, "0.9")] <= table[(kernel, n, "0.9")] - 0.10
    assert _clears_pinned_gap(rows, "histogram_demo.kernel_gap")
    assert abs(table[(histogram, n, "accuracy")] - 0.9) <= 0.05


def test_kernel_certifies_outer_circle(circles):
    family = parse_family("kernel:exponential:sqrtlog")
    clf = family.fit(circles.sample(2000, 0), circles)
    rng = np.random.default_rng(0)
    astute = 0
    for theta in rng.random(20) * 2 * np.pi:
        anchor = (np.cos(theta), np.sin(theta))
        astute += certify_astute(clf, circles, anchor, 1, 0.3, 0.01).astute
    assert astute >= 18


def test_region_oracle_on_ten_thousand_queries(circles):
    rng = np.random.default_rng(3)
    dense = circles.support(SupportKind.NEG).skeleton(20000)
    total = agree = 0
    for _ in range(100):
        theta = rng.random() * 2 * np.pi
        anchor = np.array([np.cos(theta), np.sin(theta)])
        kappa = rng.uniform(0.05, 0.95)
        region = make_region(circles, anchor, kappa)
        queries = anchor + rng.uniform(-1.5, 1.5, size=(100, 2))
        gap = np.min(np.linalg.norm(queries[:, None, :] - dense[None, :, :], axis=2), axis=1)
        oracle = np.linalg.norm(queries - anchor, axis=1) < kappa * gap
        total += len(queries)
        agree += int((region.contains(queries) == oracle).sum())
    assert agree / total >= 0.9999


def test_lower_bound_interval_on_many_anchors(line):
    rng = np.random.default_rng(4)
    for x in rng.random(1000) * 0.5:
        region = make_region(line, x, 0.5)
        right = 2 * x / 3 + 1 / 6
        inner = np.linspace(x, right, 102)[1:-1]
        assert np.all(region.contains(inner[right - inner > 1e-5]))


def test_certifier_soundness_fuzz(line):
    rng = np.random.default_rng(7)
    checked = trial = 0
    while checked < 200:
        trial += 1
        data = line.sample(60, 1000 + trial)
        clf = KernelClassifier(data, KernelSpec(KernelId.GAUSSIAN, BandwidthKind.FIXED, 0.05))
        x, kappa = float(rng.random()), float(rng.uniform(0.1, 0.9))
        y = clf.predict(x)
        if not certify_astute(clf, line, x, y, kappa, 0.01).astute:
            continue
        checked += 1
        assert np.all(clf.predict_many(make_region(line, x, kappa).grid(0.001)) == y)


def test_flip_bound_verdicts_survive_sampling(line):
    rng = np.random.default_rng(8)
    clf = KernelClassifier(line.sample(200, 5), KernelSpec(KernelId.EXPONENTIAL, BandwidthKind.SQRTLOG))
    certified = 0
    while certified < 100:
        x, radius = float(rng.random()), float(rng.uniform(0.001, 0.02))
        margins, bounds = flip_bounds(clf, np.array([[x]]), radius)
        if abs(margins[0]) <= bounds[0]:
            continue
        certified += 1
        nearby = x + np.linspace(-radius, radius, 1000)
        assert np.all(np.sign(clf.margin_many(nearby)) == np.sign(margins[0]))
