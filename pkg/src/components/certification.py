"""
Astuteness certification: is a fitted classifier correct at an anchor and
constant over the anchor's robustness region?

The region is checked on an anchor-aligned lattice. For kernel classifiers a
bound on how far the weighted vote can move inside a small ball closes the
gaps between lattice points; points the bound cannot settle are refined on
finer sub-lattices.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple
import logging
import math

import numpy as np

from src.components.distributions import DataDistribution, as_point, as_points
from src.components.histogram import HistogramClassifier
from src.components.kernels import KernelClassifier
from src.components.regions import RobustnessRegion, anchored_lattice, make_region
from src.entity.config_entity import CertificationConfig
from src.exception.exception import InvalidParameter

logger = logging.getLogger(__name__)


class FlipVerdict(str, Enum):
    CERTIFIED = "certified"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class CertResult:
    astute: bool
    accurate_at_anchor: bool
    robust: bool
    counterexample: Optional[Tuple[float, ...]]
    grid_points_checked: int
    flip_bound_used: bool
    refined_steps: int
    grid_only: bool
    step_used: float
    anchor: Tuple[float, ...] = ()
    label: int = 0


def flip_bounds(clf: KernelClassifier, xs, radius: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Weighted vote m(x) and an upper bound on |m(x') - m(x)| over rho(x, x') <= radius.

    Every unnormalised weight u_i = K(rho_i / h) moves by at most
    delta_i = sup|K'| * radius / h over the reachable distances, and the
    normaliser stays above sum_i K((rho_i + radius) / h), which gives
    |m' - m| <= (1 + |m|) * sum_i delta_i / D_lo. All terms share the factor
    exp(-max_i log u_i) so nothing underflows.
    """
    if radius < 0:
        raise InvalidParameter(f"flip-bound radius must be non-negative, got {radius}")
    xs = as_points(xs, clf.dim)
    y = clf.dataset.y.astype(float)
    margins = clf.margin_many(xs)
    if radius == 0 or np.all(y == y[0]):
        return margins, np.zeros(len(xs))
    kernel, h = clf.kernel_id, clf.h
    bounds = np.empty(len(xs))
    for start in range(0, len(xs), clf.batch_size):
        rho = clf.distances(xs[start:start + clf.batch_size])
        shift = np.max(kernel.log_kernel(rho / h), axis=1, keepdims=True)
        near = np.maximum(rho - radius, 0.0) / h
        far = (rho + radius) / h
        steepest = np.clip(kernel.derivative_peak, near, far)
        delta = np.exp(kernel.log_abs_derivative(steepest) + math.log(radius / h) - shift).sum(axis=1)
        floor = np.exp(kernel.log_kernel(far) - shift).sum(axis=1)
        m = np.abs(margins[start:start + clf.batch_size])
        bounds[start:start + clf.batch_size] = (1.0 + m) * delta / floor
    return margins, bounds


def kernel_flip_bound(clf: KernelClassifier, x, radius: float) -> FlipVerdict:
    """Certified iff |m(x)| strictly exceeds the bound on its change within ``radius``."""
    margins, bounds = flip_bounds(clf, as_point(x, clf.dim).reshape(1, -1), radius)
    return FlipVerdict.CERTIFIED if abs(margins[0]) > bounds[0] else FlipVerdict.INCONCLUSIVE


def neighborhood_bayes_predict(dist: DataDistribution, x) -> int:
    """+1 iff x is at least as close to mu+ (and mu^{1/2}) as to mu-."""
    return int(dist.neighbor_bayes_labels(as_point(x, dist.dim).reshape(1, -1))[0])


def _settled(clf: KernelClassifier, pts: np.ndarray, radius: float, target: int) -> np.ndarray:
    margins, bounds = flip_bounds(clf, pts, radius)
    same_side = margins > 0 if target == 1 else margins <= 0
    return same_side & (np.abs(margins) > bounds)


def _first_flip(clf, region: RobustnessRegion, pts: np.ndarray, target: int) -> Optional[np.ndarray]:
    inside = pts[region.contains(pts)]
    if not len(inside):
        return None
    flips = np.flatnonzero(clf.predict_many(inside) != target)
    return inside[flips[0]] if len(flips) else None


def certify_astute(clf, dist: DataDistribution, x, y: int, kappa: float, step: Optional[float] = None) -> CertResult:
    """
    Certify f(x) = y and f constant over V_x^kappa.

    Raises:
        KappaOutOfRange, QueryOutsideSupport: invalid region.
        UnboundedRegion: the region has no certified bounding box.
    """
    config = CertificationConfig()
    step = config.GRID_STEP if step is None else float(step)
    if not step > 0:
        raise InvalidParameter(f"grid step must be positive, got {step}")
    region = make_region(dist, x, kappa)
    anchor = region.anchor
    target = int(clf.predict(anchor))
    accurate = target == int(y)

    def result(robust, counterexample, checked, flip_used, refined, grid_only, step_used):
        return CertResult(
            astute=accurate and robust,
            accurate_at_anchor=accurate,
            robust=robust,
            counterexample=None if counterexample is None else tuple(float(c) for c in counterexample),
            grid_points_checked=int(checked),
            flip_bound_used=flip_used,
            refined_steps=refined,
            grid_only=grid_only,
            step_used=step_used,
            anchor=tuple(float(c) for c in anchor),
            label=int(y),
        )

    if region.degenerate:
        return result(True, None, 1, False, 0, False, step)

    if not isinstance(clf, KernelClassifier):
        grid = region.grid(step)
        flip = _first_flip(clf, region, grid, target)
        grid_only = True
        if isinstance(clf, HistogramClassifier) and flip is None:
            grid_only = not step < 0.5 * float(np.min(clf.boundary_clearance(grid)))
        return result(flip is None, flip, len(grid), False, 0, grid_only, step)

    radius = step * math.sqrt(region.dim) / 2.0
    pts = region.lattice(step, pad=radius)
    pts = pts[~region.ball_disjoint(pts, radius)]
    checked = len(pts)
    flip = _first_flip(clf, region, pts, target)
    if flip is not None:
        return result(False, flip, checked, True, 0, False, step)
    pending = pts[~_settled(clf, pts, radius, target)]

    rounds = 0
    while len(pending) and rounds < config.MAX_REFINEMENTS:
        rounds += 1
        step /= 2.0
        reach = radius + step * math.sqrt(region.dim) / 2.0
        per_point = (2.0 * reach / step + 1.0) ** region.dim
        if len(pending) * per_point > config.MAX_REFINED_POINTS:
            logger.warning(f"refinement around {anchor.tolist()} would need about "
                           f"{int(len(pending) * per_point)} points; giving up")
            break
        blocks = []
        for p in pending:
            sub = anchored_lattice(anchor, p - reach, p + reach, step)
            blocks.append(sub[np.linalg.norm(sub - p, axis=1) <= reach])
        radius = step * math.sqrt(region.dim) / 2.0
        pts = np.unique(np.vstack(blocks), axis=0)
        pts = pts[~region.ball_disjoint(pts, radius)]
        checked += len(pts)
        flip = _first_flip(clf, region, pts, target)
        if flip is not None:
            return result(False, flip, checked, True, rounds, False, step)
        pending = pts[~_settled(clf, pts, radius, target)]

    if len(pending):
        logger.warning(f"flip bound inconclusive at {len(pending)} points around {anchor.tolist()} "
                       f"after {rounds} refinements; reporting not robust")
        return result(False, None, checked, True, rounds, False, step)
    return result(True, None, checked, True, rounds, False, step)
