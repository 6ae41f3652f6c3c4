"""
SVG line plots of result rows, one panel per classifier and one line per kappa.

Output bytes depend only on the rows: the SVG hash salt is pinned, the date
metadata is dropped and every data line carries a stable ``series-*`` id.
"""
from collections import OrderedDict
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple
import logging

import matplotlib
from matplotlib.backends.backend_svg import FigureCanvasSVG
from matplotlib.figure import Figure

from src.entity.artifact_entity import ACCURACY, ResultRow, kappa_rank
from src.exception.exception import EmptySeries

logger = logging.getLogger(__name__)

SVG_SALT = "robust-nonparametric"


@dataclass(frozen=True)
class PlotLayout:
    title: str = ""
    x_label: str = "training sample size n"
    y_label: str = "astuteness"
    log_x: bool = True


def _series_label(kappa: str) -> str:
    return ACCURACY if kappa == ACCURACY else f"kappa = {kappa}"


def group_series(rows: Sequence[ResultRow]) -> Dict[str, Dict[str, List[Tuple[int, float]]]]:
    """classifier -> series label -> sorted (n, mean) points."""
    panels: Dict[str, Dict[str, List[Tuple[int, float]]]] = OrderedDict()
    for row in sorted(rows, key=lambda r: (r.classifier, kappa_rank(r.kappa), r.n)):
        panel = panels.setdefault(row.classifier, OrderedDict())
        panel.setdefault(_series_label(row.kappa), []).append((row.n, row.mean))
    return panels


def emit_plot(rows: Sequence[ResultRow], layout: PlotLayout, path: str) -> str:
    """
    Render rows to an SVG file.

    Raises:
        EmptySeries: no rows to draw.
    """
    panels = group_series(rows)
    if not panels:
        raise EmptySeries("no series to plot")
    with matplotlib.rc_context({"svg.hashsalt": SVG_SALT, "svg.fonttype": "none"}):
        figure = Figure(figsize=(5.0 * len(panels), 4.0))
        FigureCanvasSVG(figure)
        axes = figure.subplots(1, len(panels), squeeze=False)[0]
        index = 0
        for ax, (classifier, series) in zip(axes, panels.items()):
            for label, points in series.items():
                xs, ys = zip(*points)
                (line,) = ax.plot(xs, ys, marker="o", label=label)
                line.set_gid(f"series-{index}")
                index += 1
            if layout.log_x:
                ax.set_xscale("log")
            ax.set_title(classifier)
            ax.set_xlabel(layout.x_label)
            ax.set_ylabel(layout.y_label)
            ax.set_ylim(0.0, 1.05)
            ax.legend(loc="lower right")
        if layout.title:
            figure.suptitle(layout.title)
        figure.tight_layout()
        figure.savefig(path, format="svg", metadata={"Date": None})
    logger.info(f"wrote plot with {index} series to {path}")
    return path
