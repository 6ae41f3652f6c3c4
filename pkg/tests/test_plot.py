import pytest

from src.entity.artifact_entity import ResultRow
from src.exception.exception import EmptySeries
from src.utils.plot_handler import PlotLayout, emit_plot, group_series


def _row(classifier, n, kappa, mean):
    return ResultRow("convergence", classifier, n, kappa, mean, 0.0, 3, 0)


def _read(path):
    with open(path, encoding="utf-8") as handle:
        return handle.read()


def test_single_series_has_one_id(tmp_path):
    rows = [_row("knn:const=3", n, "0.5", m) for n, m in ((20, 0.4), (40, 0.6), (80, 0.7))]
    text = _read(emit_plot(rows, PlotLayout(title="one"), str(tmp_path / "one.svg")))
    assert text.count('id="series-') == 1
    assert 'id="series-0"' in text


def test_series_per_kappa_and_panel(tmp_path):
    rows = [_row(c, n, k, 0.5) for c in ("a:const=1", "b:const=2") for k in ("accuracy", "0.1", "0.5")
            for n in (10, 20)]
    text = _read(emit_plot(rows, PlotLayout(), str(tmp_path / "many.svg")))
    assert text.count('id="series-') == 6
    panels = group_series(rows)
    assert list(panels) == ["a:const=1", "b:const=2"]
    assert list(panels["a:const=1"]) == ["accuracy", "kappa = 0.1", "kappa = 0.5"]
    assert panels["a:const=1"]["accuracy"] == [(10, 0.5), (20, 0.5)]


def test_plot_bytes_are_deterministic(tmp_path):
    rows = [_row("knn:const=3", n, k, 0.3) for n in (20, 40) for k in ("accuracy", "0.5")]
    first = _read(emit_plot(rows, PlotLayout(title="t"), str(tmp_path / "a.svg")))
    second = _read(emit_plot(list(reversed(rows)), PlotLayout(title="t"), str(tmp_path / "b.svg")))
    assert first == second


def test_empty_rows():
    with pytest.raises(EmptySeries):
        emit_plot([], PlotLayout(), "unused.svg")
