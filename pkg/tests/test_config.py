import os

import pytest

from src.entity.artifact_entity import GAP_MEASURES
from src.entity.config_entity import ExperimentConfig
from src.exception.exception import ConfigError
from src.utils.config_parser import (
    load_config,
    load_expectations,
    parse_config,
    parse_expectations,
    serialize_config,
    with_overrides,
)

CONFIG_DIR = os.path.join(os.path.dirname(__file__), "..", "configs")

MINIMAL = """\
# tiny line experiment
experiment_id = convergence
distribution.kind = line   # uniform on [0, 1]
classifiers = knn:const=3, kernel:gaussian:fixed=0.1
n_schedule = 20, 40
kappas = 0.1, 0.5
test_points = 4
trials = 2
seed = 18446744073709551615
record_timing = true
"""


@pytest.mark.parametrize("name", ["convergence", "lower_bound", "histogram_demo", "conditions"])
def test_shipped_configs_load(name):
    config = load_config(os.path.join(CONFIG_DIR, f"{name}.cfg"))
    assert config.experiment_id == name
    assert config.output_csv == f"{name}.csv"


def test_shipped_lower_bound_protocol():
    config = load_config(os.path.join(CONFIG_DIR, "lower_bound.cfg"))
    assert config.n_schedule == (1000, 10000, 100000)
    assert config.kappas == (0.5,)
    assert config.classifiers == ("knn:logceil=1", "knn:power=0.4")


def test_parse_minimal():
    config = parse_config(MINIMAL)
    assert config.distribution_kind == "line"
    assert config.classifiers == ("knn:const=3", "kernel:gaussian:fixed=0.1")
    assert config.n_schedule == (20, 40)
    assert config.kappas == (0.1, 0.5)
    assert config.seed == 2 ** 64 - 1
    assert config.record_timing is True
    assert config.grid_step == ExperimentConfig("convergence").grid_step


def test_serialize_round_trip():
    config = parse_config(MINIMAL)
    assert parse_config(serialize_config(config)) == config
    demo = load_config(os.path.join(CONFIG_DIR, "histogram_demo.cfg"))
    assert parse_config(serialize_config(demo)) == demo


def test_empty_list():
    config = parse_config("experiment_id = conditions\ndistribution.kind = line\n"
                          "classifiers = knn:const=1\nkappas =\n")
    assert config.kappas == ()


@pytest.mark.parametrize("text, line, field", [
    ("experiment_id = convergence\ncolour = blue\n", 2, "colour"),
    ("experiment_id = convergence\nseed = 1\nseed = 2\n", 3, "seed"),
    ("experiment_id = convergence\ntrials = three\n", 2, "trials"),
    ("experiment_id = convergence\nrecord_timing = yes\n", 2, "record_timing"),
    ("experiment_id = convergence\nkappas = 0.1,,0.2\n", 2, "kappas"),
    ("experiment_id = convergence\n\nkappas = 0.5, 0.1\n", 3, "kappas"),
    ("experiment_id = convergence\nkappas = 1.0\n", 2, "kappas"),
    ("experiment_id = convergence\nn_schedule = 100, 100\n", 2, "n_schedule"),
    ("experiment_id = convergence\nclassifiers = knn:sqrt=2\n", 2, "classifiers"),
    ("experiment_id = convergence\ncondition_p = 1.0\n", 2, "condition_p"),
    ("experiment_id = convergence\nseed = -1\n", 2, "seed"),
    ("experiment_id = convergence\ngrid_step = 0\n", 2, "grid_step"),
    ("experiment_id = histogram\n", 1, "experiment_id"),
    ("experiment_id = convergence\ndistribution.kind = sphere\n", 2, "distribution.kind"),
    ("experiment_id = convergence\ndistribution.kind = supports\ndistribution.pos = segment(0;1)\n", 2,
     "distribution.kind"),
    ("experiment_id = convergence\ndistribution.kind = supports\ndistribution.pos = segment(0;0.3)\n"
     "distribution.neg = triangle(0.7;1)\n", 4, "distribution.neg"),
    ("experiment_id = convergence\ndistribution.kind = supports\ndistribution.pos = circle(0,0)\n"
     "distribution.neg = segment(0.7;1)\n", 3, "distribution.pos"),
    ("experiment_id = convergence\ndistribution.kind = supports\ndistribution.half = point(x)\n"
     "distribution.pos = segment(0;0.3)\ndistribution.neg = segment(0.7;1)\n", 3, "distribution.half"),
])
def test_config_errors_carry_location(text, line, field):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.line == line
    assert info.value.field == field
    assert f"line {line}" in str(info.value)


def test_missing_experiment_id():
    with pytest.raises(ConfigError) as info:
        parse_config("seed = 1\n")
    assert info.value.field == "experiment_id"
    assert info.value.line is None


def test_syntax_error():
    with pytest.raises(ConfigError) as info:
        parse_config("experiment_id = convergence\njust some words\n")
    assert info.value.line == 2


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "absent.cfg"))


def test_overrides():
    config = parse_config(MINIMAL)
    assert with_overrides(config, seed=None) is config
    assert with_overrides(config, seed=7).seed == 7
    with pytest.raises(ConfigError):
        with_overrides(config, trials=0)


def _expectations_text(**lines):
    text = "".join(f"{name} = 0.1\n{name}.tolerance = 0.02\n" for name in GAP_MEASURES)
    return text + "".join(f"{key} = {value}\n" for key, value in lines.items())


def test_shipped_expectations_load():
    expected = load_expectations(os.path.join(CONFIG_DIR, "expected.cfg"))
    assert set(expected) == set(GAP_MEASURES)
    assert expected["lower_bound.astuteness_gap"].floor > 0
    assert expected["convergence.polynomial_kappa_drop"].floor == pytest.approx(0.10)
    assert expected["histogram_demo.kernel_gap"].floor == pytest.approx(0.10)


def test_expectations_default_to_stand_ins():
    expected = parse_expectations(_expectations_text(**{"histogram_demo.kernel_gap.stand_in": "false"}))
    assert expected["histogram_demo.kernel_gap"].stand_in is False
    assert expected["lower_bound.astuteness_gap"].stand_in is True
    assert expected["lower_bound.astuteness_gap"].floor == pytest.approx(0.08)


@pytest.mark.parametrize("text, line, field", [
    (_expectations_text(**{"lower_bound.spread": "1"}), 7, "lower_bound.spread"),
    (_expectations_text(**{"lower_bound.astuteness_gap": "0.2"}), 7, "lower_bound.astuteness_gap"),
    (_expectations_text(**{"histogram_demo.kernel_gap.stand_in": "maybe"}), 7,
     "histogram_demo.kernel_gap.stand_in"),
    ("lower_bound.astuteness_gap = 0.1\n", None, "lower_bound.astuteness_gap.tolerance"),
])
def test_expectation_errors_carry_location(text, line, field):
    with pytest.raises(ConfigError) as info:
        parse_expectations(text)
    assert info.value.line == line
    assert info.value.field == field


def test_negative_tolerance_rejected():
    text = _expectations_text().replace("lower_bound.astuteness_gap.tolerance = 0.02",
                                        "lower_bound.astuteness_gap.tolerance = -0.02")
    with pytest.raises(ConfigError) as info:
        parse_expectations(text)
    assert info.value.field == "lower_bound.astuteness_gap.tolerance"
    assert info.value.line == 2
