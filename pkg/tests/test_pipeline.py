import pytest

from src.entity.artifact_entity import GAP_MEASURES, Expectation, GapMeasure, ResultRow
from src.exception.exception import InvalidParameter
from src.pipeline.pipeline import measure_gap, run_pilot
from src.utils.config_parser import load_expectations, parse_config
from src.utils.storage_handler import ArtifactStore

SMALL = {
    "lower_bound": """\
experiment_id = lower_bound
distribution.kind = line
classifiers = knn:logceil=1, knn:power=0.4
n_schedule = 20, 40
kappas = 0.5
test_points = 4
trials = 1
seed = 0
""",
    "convergence": """\
experiment_id = convergence
distribution.kind = two_circles
classifiers = kernel:polynomial:cuberoot
n_schedule = 30
kappas = 0.1, 0.5
test_points = 3
trials = 1
grid_step = 0.05
seed = 0
""",
    "histogram_demo": """\
experiment_id = histogram_demo
distribution.kind = supports
distribution.pos = segment(0;0.3)
distribution.neg = segment(0.7;1)
distribution.noise = 0.1
classifiers = histogram:power=0.5, kernel:exponential:sqrtlog
n_schedule = 30
kappas = 0.9
test_points = 4
trials = 1
seed = 0
""",
}


def _row(classifier, n, kappa, mean):
    return ResultRow("lower_bound", classifier, n, kappa, mean, 0.0, 1, 0)


def test_measure_gap_uses_largest_shared_n():
    measure = GapMeasure("lower_bound", ("a:const=1", "0.5"), ("b:const=1", "0.5"))
    rows = [_row("a:const=1", 10, "0.5", 0.9), _row("b:const=1", 10, "0.5", 0.2),
            _row("a:const=1", 100, "0.5", 0.7), _row("b:const=1", 100, "0.5", 0.5),
            _row("a:const=1", 1000, "0.5", 1.0), _row("a:const=1", 1000, "accuracy", 1.0)]
    assert measure_gap(rows, measure) == pytest.approx(0.2)


def test_measure_gap_needs_both_series():
    measure = GapMeasure("lower_bound", ("a:const=1", "0.5"), ("b:const=1", "0.5"))
    with pytest.raises(InvalidParameter):
        measure_gap([_row("a:const=1", 10, "0.5", 0.9)], measure)


def test_pilot_pins_measured_gaps(tmp_path):
    configs = {name: parse_config(text) for name, text in SMALL.items()}
    current = {name: Expectation(0.5, 0.05) for name in GAP_MEASURES}
    measured = run_pilot(configs, current, out_dir=str(tmp_path))
    assert set(measured) == set(GAP_MEASURES)
    for name, expected in measured.items():
        assert expected.stand_in is False
        assert expected.tolerance == 0.05
        assert -1.0 <= expected.value <= 1.0
    store = ArtifactStore(str(tmp_path))
    path = store.write_expectations(measured, str(tmp_path / "expected.cfg"))
    assert load_expectations(path) == measured
    assert run_pilot(configs, current, out_dir=str(tmp_path)) == measured
