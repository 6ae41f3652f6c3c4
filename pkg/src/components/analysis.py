"""
Diagnostics for the quantities behind neighborhood consistency: probability
radii, brute-force splitting numbers and finite-grid estimators of the
weight-function conditions.
"""
from dataclasses import dataclass
from itertools import combinations
from typing import FrozenSet, List, Optional, Sequence, Tuple
import logging
import math

import numpy as np
from scipy.optimize import bisect
from scipy.spatial.distance import cdist

from src.components.classifiers import WeightFunction
from src.components.distributions import DataDistribution, EtaKind, as_point, as_points
from src.components.histogram import HistogramClassifier
from src.components.kernels import KernelSpec
from src.components.nearest_neighbours import NearestNeighbours
from src.entity.config_entity import AnalysisConfig
from src.exception.exception import InvalidParameter, TooLarge

logger = logging.getLogger(__name__)


def probability_radius(dist: DataDistribution, x, p: float) -> float:
    """
    r_p(x) = inf{r : mu(B(x, r)) >= p}.

    Closed form on the line distribution; elsewhere a bisection on the exact
    ball mass, which is monotone in r.
    """
    if not 0.0 < p <= 1.0:
        raise InvalidParameter(f"p must lie in (0, 1], got {p}")
    x = as_point(x, dist.dim)
    if dist.eta_kind == EtaKind.IDENTITY and 0.0 <= x[0] <= 1.0:
        near = min(x[0], 1.0 - x[0])
        return float(p / 2.0 if p <= 2.0 * near else p - near)
    if dist.ball_mass(x, 0.0) >= p:
        return 0.0
    hi = dist.farthest_support(x) * (1.0 + 1e-9) + 1e-12
    reached = lambda r: 1.0 if dist.ball_mass(x, r) >= p else -1.0
    root = bisect(reached, 0.0, hi, xtol=AnalysisConfig().RADIUS_TOL)
    # step to the side where the mass already reaches p
    while dist.ball_mass(x, root) < p and root < hi:
        root += AnalysisConfig().RADIUS_TOL
    return float(root)


@dataclass(frozen=True)
class SplittingEnumeration:
    subsets: FrozenSet[FrozenSet[int]]
    sample_size: int
    dimension: int
    candidates: int
    stable: bool

    @property
    def count(self) -> int:
        return len(self.subsets)


def _candidate_queries(clf: WeightFunction, grid: int) -> np.ndarray:
    X = clf.dataset.X
    n, d = X.shape
    points = [X]
    if n > 1:
        pairs = np.array(list(combinations(range(n), 2)))
        points.append((X[pairs[:, 0]] + X[pairs[:, 1]]) / 2.0)
    if d == 2 and n > 2:
        centres = []
        for i, j, k in combinations(range(n), 3):
            a, b, c = X[i], X[j], X[k]
            det = 2.0 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]))
            if abs(det) < 1e-12:
                continue
            sa, sb, sc = a @ a, b @ b, c @ c
            centres.append(((sa * (b[1] - c[1]) + sb * (c[1] - a[1]) + sc * (a[1] - b[1])) / det,
                            (sa * (c[0] - b[0]) + sb * (a[0] - c[0]) + sc * (b[0] - a[0])) / det))
        if centres:
            points.append(np.array(centres))
    if isinstance(clf, HistogramClassifier) and d == 1:
        points.append(clf.cells.faces()[0].reshape(-1, 1))
    base = np.vstack(points)
    lo, hi = base.min(axis=0), base.max(axis=0)
    span = np.maximum(hi - lo, 1.0)
    lo, hi = lo - span, hi + span
    if d == 1:
        # interval midpoints between consecutive critical coordinates, plus both far ends
        xs = np.unique(base[:, 0])
        between = (xs[:-1] + xs[1:]) / 2.0
        extra = np.concatenate([between, [lo[0], hi[0]]]).reshape(-1, 1)
        lattice = np.linspace(lo[0], hi[0], grid).reshape(-1, 1)
        return np.vstack([base, extra, lattice])
    axes = [np.linspace(lo[j], hi[j], grid) for j in range(d)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.vstack([base, np.column_stack([m.reshape(-1) for m in mesh])])


def _enumerate(clf: WeightFunction, queries: np.ndarray) -> FrozenSet[FrozenSet[int]]:
    found = {frozenset()}
    distances = cdist(queries, clf.dataset.X)
    weights = clf.weights_many(queries)
    for rho, w in zip(distances, weights):
        alphas = np.unique(np.concatenate([[0.0], rho]))
        betas = np.unique(np.concatenate([[0.0], w]))
        for alpha in alphas:
            close = rho <= alpha
            for beta in betas:
                found.add(frozenset(np.flatnonzero(close & (w >= beta)).tolist()))
    return frozenset(found)


def splitting_number_bruteforce(clf: WeightFunction, max_n: Optional[int] = None) -> SplittingEnumeration:
    """
    Enumerate every distinct W_{x,alpha,beta} = {i : rho(x, x_i) <= alpha, w_i(x) >= beta}.

    Query points come from the critical arrangement of the sample (samples,
    pair midpoints, circumcentres in the plane, histogram faces) plus a dense
    fallback grid. The count is recomputed on a grid twice as fine and flagged
    unstable if it changes.

    Raises:
        TooLarge: more samples than the enumeration guard allows.
    """
    config = AnalysisConfig()
    limit = config.MAX_ENUMERATION_N if max_n is None else max_n
    if limit > config.MAX_ENUMERATION_N:
        raise TooLarge(f"enumeration limit {limit} exceeds the hard guard {config.MAX_ENUMERATION_N}")
    if clf.n > limit:
        raise TooLarge(f"brute-force splitting numbers need n <= {limit}, got {clf.n}")
    if clf.dim > 2:
        raise TooLarge(f"brute-force splitting numbers support d <= 2, got {clf.dim}")
    coarse = _candidate_queries(clf, config.FALLBACK_GRID)
    fine = _candidate_queries(clf, 2 * config.FALLBACK_GRID)
    first = _enumerate(clf, coarse)
    second = first | _enumerate(clf, fine)
    stable = len(second) == len(first)
    if not stable:
        logger.warning(f"splitting number changed from {len(first)} to {len(second)} under grid densification")
    return SplittingEnumeration(second, clf.n, clf.dim, len(coarse) + len(fine), stable)


@dataclass(frozen=True)
class ConditionEstimate:
    """
    A finite-grid lower bound on a supremum over the domain.

    ``grid_resolution`` is the number of grid points per axis (0 when the value is exact).
    """
    condition_id: str
    n: int
    value: float
    grid_resolution: int
    seed: int
    p: Optional[float] = None
    t_n: Optional[float] = None


def _domain_queries(clf: WeightFunction, dist: Optional[DataDistribution], grid: int) -> np.ndarray:
    if dist is not None:
        lo, hi = dist.domain_box()
    else:
        lo, hi = clf.dataset.X.min(axis=0), clf.dataset.X.max(axis=0)
    axes = [np.linspace(lo[j], hi[j], grid) for j in range(clf.dim)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.vstack([np.column_stack([m.reshape(-1) for m in mesh]), clf.dataset.X])


def estimate_condition2(clf: WeightFunction, dist: DataDistribution, p: float,
                        grid: Optional[int] = None) -> ConditionEstimate:
    """max_x sum_i w_i(x) 1{rho(x, x_i) > r_p(x)} over a grid of the domain plus the samples."""
    if not 0.0 < p < 1.0:
        raise InvalidParameter(f"p must lie in (0, 1), got {p}")
    grid = AnalysisConfig().CONDITION_GRID if grid is None else grid
    queries = _domain_queries(clf, dist, grid)
    best = 0.0
    for start in range(0, len(queries), clf.batch_size):
        batch = queries[start:start + clf.batch_size]
        radii = np.array([probability_radius(dist, q, p) for q in batch])
        outside = cdist(batch, clf.dataset.X) > radii[:, None]
        best = max(best, float(np.max(np.sum(clf.weights_many(batch) * outside, axis=1))))
    return ConditionEstimate("cond2", clf.n, min(best, 1.0), grid, clf.dataset.seed, p=p)


def estimate_condition3(clf: WeightFunction, t_n: float, grid: Optional[int] = None,
                        dist: Optional[DataDistribution] = None) -> ConditionEstimate:
    """t_n * max_{x, i} w_i(x); exact for k-NN and histograms."""
    if isinstance(clf, NearestNeighbours):
        return ConditionEstimate("cond3", clf.n, t_n / clf.k, 0, clf.dataset.seed, t_n=t_n)
    if isinstance(clf, HistogramClassifier):
        smallest = min(c for c in clf.cells.leaf_counts.values() if c > 0)
        return ConditionEstimate("cond3", clf.n, t_n / smallest, 0, clf.dataset.seed, t_n=t_n)
    grid = AnalysisConfig().CONDITION_GRID if grid is None else grid
    queries = _domain_queries(clf, dist, grid)
    top = max(float(np.max(clf.weights_many(queries[s:s + clf.batch_size])))
              for s in range(0, len(queries), clf.batch_size))
    return ConditionEstimate("cond3", clf.n, t_n * top, grid, clf.dataset.seed, t_n=t_n)


def knn_t_n(n: int, k: int, d: int = 1) -> float:
    """t_n = sqrt(d k_n log n) used for k-NN."""
    return math.sqrt(d * k * math.log(n))


def condition4_ratio(n: int, d: int, t_n: float, enumerated: Optional[SplittingEnumeration] = None) -> float:
    """log T(W, S) / t_n with T brute-forced when available, else the bound 2 (n+1)^(d+2)."""
    if not t_n > 0:
        raise InvalidParameter(f"t_n must be positive, got {t_n}")
    if enumerated is not None:
        return math.log(enumerated.count) / t_n
    return (math.log(2.0) + (d + 2) * math.log(n + 1)) / t_n


@dataclass(frozen=True)
class KernelConditionRow:
    n: int
    h: float
    tail_ratio: float
    n_h_d: float
    mass_growth: float


def kernel_condition_report(spec: KernelSpec, n_values: Sequence[int], d: int = 1, c: float = 2.0,
                            far: float = 50.0, reference: float = 0.1) -> List[KernelConditionRow]:
    """
    Finite-n view of the kernel convergence conditions.

    ``tail_ratio`` is K(c u) / K(u) at u = ``far`` (tends to 0 for exponential
    and Gaussian kernels, to 1/c^2 for the polynomial one); ``n_h_d`` is
    n h_n^d; ``mass_growth`` is (n / log n) K(reference / h_n).
    """
    kernel = spec.kernel_id
    tail = float(np.exp(kernel.log_kernel(c * far) - kernel.log_kernel(far)))
    rows = []
    for n in n_values:
        h = spec.bandwidth(n)
        growth = float(np.exp(math.log(n) - math.log(math.log(n)) + kernel.log_kernel(reference / h)))
        rows.append(KernelConditionRow(int(n), h, tail, n * h ** d, growth))
    return rows


def distance_prefix_sets(clf: WeightFunction, queries) -> Tuple[FrozenSet[int], ...]:
    """Sets {i : rho(x, x_i) <= r} realised at the given queries, for comparison with enumerations."""
    found = {frozenset()}
    for rho in cdist(as_points(queries, clf.dim), clf.dataset.X):
        for r in np.unique(rho):
            found.add(frozenset(np.flatnonzero(rho <= r).tolist()))
    return tuple(sorted(found, key=lambda s: (len(s), sorted(s))))
