"""
Neighborhood preserving robustness regions.

For an anchor x with opposite support O the region is
``{x' : rho(x, x') < kappa * rho(O, x')}``. Because rho(O, x') is a minimum over
o in O, the region is the intersection over o of the Apollonius sets
``{x' : |x' - x| < kappa |x' - o|}``: balls for kappa < 1, half-spaces for
kappa = 1. Both facts give sound bounding boxes from any finite subset of O.
"""
from dataclasses import dataclass
from typing import Tuple
import logging

import numpy as np
from scipy.optimize import linprog

from src.components.distributions import (
    DataDistribution,
    SupportKind,
    SupportSet,
    as_point,
    as_points,
)
from src.entity.config_entity import RegionConfig
from src.exception.exception import (
    InvalidParameter,
    KappaOutOfRange,
    QueryOutsideSupport,
    UnboundedRegion,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BoundingBox:
    lo: Tuple[float, ...]
    hi: Tuple[float, ...]

    def __post_init__(self):
        if np.any(np.asarray(self.lo) > np.asarray(self.hi)):
            raise InvalidParameter(f"box corners out of order: {self.lo} > {self.hi}")

    @property
    def volume(self) -> float:
        return float(np.prod(np.subtract(self.hi, self.lo)))

    def contains(self, xs) -> np.ndarray:
        xs = as_points(xs, len(self.lo))
        return np.all((xs >= np.asarray(self.lo)) & (xs <= np.asarray(self.hi)), axis=1)


@dataclass(frozen=True, eq=False)
class RobustnessRegion:
    """
    V_x^kappa around ``anchor``; kappa = 1 is the full region V_x.

    A degenerate region (eta(anchor) = 1/2) is exactly ``{anchor}``.
    """
    anchor: np.ndarray
    kappa: float
    opposite: SupportSet
    degenerate: bool
    anchor_gap: float

    @property
    def dim(self) -> int:
        return self.anchor.shape[0]

    def contains(self, xs) -> np.ndarray:
        """Vectorised membership; points within the boundary tolerance count as outside."""
        xs = as_points(xs, self.dim)
        at_anchor = np.all(xs == self.anchor, axis=1)
        if self.degenerate:
            return at_anchor
        tol = RegionConfig().BOUNDARY_TOL
        to_anchor = np.linalg.norm(xs - self.anchor, axis=1)
        inside = to_anchor < self.kappa * self.opposite.distance(xs) - tol
        return inside | (at_anchor & (self.anchor_gap > 0))

    def contains_point(self, xp) -> bool:
        return bool(self.contains(as_point(xp, self.dim).reshape(1, -1))[0])

    def margin(self, xs) -> np.ndarray:
        """kappa * rho(O, x') - rho(x, x'); positive inside the region."""
        xs = as_points(xs, self.dim)
        return self.kappa * self.opposite.distance(xs) - np.linalg.norm(xs - self.anchor, axis=1)

    def ball_disjoint(self, centers, radius: float) -> np.ndarray:
        """
        True where B(center, radius) provably misses the region.

        Uses rho(x, z) >= rho(x, p) - r and rho(O, z) <= rho(O, p) + r for z in B(p, r).
        """
        centers = as_points(centers, self.dim)
        to_anchor = np.linalg.norm(centers - self.anchor, axis=1)
        if self.degenerate:
            return to_anchor > radius
        return to_anchor - radius >= self.kappa * (self.opposite.distance(centers) + radius)

    def bounding_box(self) -> BoundingBox:
        """
        Axis-aligned box containing the region.

        Raises:
            UnboundedRegion: kappa = 1 and no finite box could be certified.
        """
        if self.degenerate:
            corner = tuple(self.anchor.tolist())
            return BoundingBox(corner, corner)
        config = RegionConfig()
        sites = np.vstack([self.opposite.skeleton(config.BOUND_SAMPLES),
                           self.opposite.nearest_point(self.anchor).reshape(1, -1)])
        if self.kappa < 1.0:
            lo, hi = _apollonius_box(self.anchor, sites, self.kappa)
        else:
            lo, hi = _halfspace_box(self.anchor, sites)
        lo = np.minimum(lo - config.BOX_SLACK, self.anchor)
        hi = np.maximum(hi + config.BOX_SLACK, self.anchor)
        return BoundingBox(tuple(lo.tolist()), tuple(hi.tolist()))

    def grid(self, step: float) -> np.ndarray:
        """
        Lattice points of spacing ``step`` inside the region.

        The lattice is anchored at the anchor itself, so the anchor is always
        the point with all-zero lattice index. Rows are in lexicographic order
        of lattice index.
        """
        if self.degenerate:
            if not step > 0:
                raise InvalidParameter(f"grid step must be positive, got {step}")
            return self.anchor.reshape(1, -1).copy()
        lattice = self.lattice(step)
        return lattice[self.contains(lattice)]

    def lattice(self, step: float, pad: float = 0.0) -> np.ndarray:
        """Unfiltered anchor-aligned lattice over the bounding box grown by ``pad``."""
        if not step > 0:
            raise InvalidParameter(f"grid step must be positive, got {step}")
        box = self.bounding_box()
        return anchored_lattice(self.anchor, np.asarray(box.lo) - pad, np.asarray(box.hi) + pad, step)


def anchored_lattice(origin: np.ndarray, lo: np.ndarray, hi: np.ndarray, step: float) -> np.ndarray:
    """Points ``origin + step * i`` inside [lo, hi], lexicographic in i."""
    axes = []
    for j in range(origin.shape[0]):
        first = int(np.ceil((lo[j] - origin[j]) / step - 1e-9))
        last = int(np.floor((hi[j] - origin[j]) / step + 1e-9))
        axes.append(origin[j] + step * np.arange(first, last + 1))
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([m.reshape(-1) for m in mesh])


def _apollonius_box(anchor: np.ndarray, sites: np.ndarray, kappa: float):
    k2 = kappa * kappa
    centers = (anchor - k2 * sites) / (1.0 - k2)
    radii = kappa * np.linalg.norm(anchor - sites, axis=1) / (1.0 - k2)
    lo = np.max(centers - radii[:, None], axis=0)
    hi = np.min(centers + radii[:, None], axis=0)
    return lo, hi


def _halfspace_box(anchor: np.ndarray, sites: np.ndarray):
    # |x' - a| < |x' - o|  <=>  2 x'.(o - a) < |o|^2 - |a|^2
    a_ub = 2.0 * (sites - anchor)
    b_ub = np.sum(sites * sites, axis=1) - anchor @ anchor
    dim = anchor.shape[0]
    lo, hi = np.empty(dim), np.empty(dim)
    for j in range(dim):
        for sign, out in ((1.0, lo), (-1.0, hi)):
            objective = np.zeros(dim)
            objective[j] = sign
            result = linprog(objective, A_ub=a_ub, b_ub=b_ub, bounds=[(None, None)] * dim, method="highs")
            if result.status != 0:
                raise UnboundedRegion(
                    f"kappa = 1 region around {anchor.tolist()} is not certifiably bounded along axis {j}"
                )
            out[j] = result.x[j]
    return lo, hi


def make_region(dist: DataDistribution, x, kappa: float) -> RobustnessRegion:
    """
    Build V_x^kappa for an anchor on the support.

    Raises:
        KappaOutOfRange: kappa outside (0, 1].
        QueryOutsideSupport: x is not on supp(mu).
    """
    if not 0.0 < kappa <= 1.0:
        raise KappaOutOfRange(f"kappa must lie in (0, 1], got {kappa}")
    anchor = as_point(x, dist.dim)
    if not dist.on_support(anchor):
        raise QueryOutsideSupport(f"region anchor {anchor.tolist()} is not on the support")
    eta = dist.eta(anchor)
    degenerate = eta == 0.5
    which = SupportKind.NEG_AND_HALF if eta >= 0.5 else SupportKind.POS_AND_HALF
    opposite = dist.support(which)
    gap = float(opposite.distance(anchor.reshape(1, -1))[0])
    if not degenerate and gap <= 0.0:
        raise InvalidParameter(f"anchor {anchor.tolist()} lies on its own opposite support")
    return RobustnessRegion(anchor, float(kappa), opposite, degenerate, gap)
