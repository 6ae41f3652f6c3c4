"""
Recursive histogram classifiers.

Cells are dyadic sub-cubes of a root hypercube addressed by ``(depth, index)``
where ``index`` holds one integer per axis. A point with scaled coordinate
``u = (x - lo) / side`` lies in cell ``floor(u * 2**depth)`` on every axis, so
cells are half-open except on the root's upper faces and children partition
their parent exactly.
"""
from typing import Dict, List, Optional, Set, Tuple
import logging
import math

import numpy as np

from src.components.classifiers import WeightFunction
from src.components.distributions import Dataset, as_points
from src.entity.config_entity import HistogramConfig
from src.exception.exception import InvalidParameter

logger = logging.getLogger(__name__)

CellKey = Tuple[int, Tuple[int, ...]]


def default_root(X: np.ndarray) -> Tuple[np.ndarray, float]:
    """Smallest padded hypercube centred on the bounding box of ``X``."""
    lo, hi = X.min(axis=0), X.max(axis=0)
    span = float(np.max(hi - lo))
    side = span * (1.0 + HistogramConfig().ROOT_PADDING) if span > 0 else 1.0
    centre = (lo + hi) / 2.0
    return centre - side / 2.0, side


class HistogramCells:
    def __init__(self, X: np.ndarray, k: int, root_lo: Optional[np.ndarray] = None,
                 root_side: Optional[float] = None):
        """
        Split cells into 2^d children until every leaf holds at most k samples.

        Parameters:
        - X (np.ndarray): (n, d) sample locations.
        - k (int): split threshold k_n.
        - root_lo, root_side: explicit root hypercube; by default the padded
          sample bounding cube.

        """
        if k < 1:
            raise InvalidParameter(f"histogram split threshold must be >= 1, got {k}")
        self.config = HistogramConfig()
        self.k = int(k)
        self.dim = X.shape[1]
        if root_lo is None or root_side is None:
            self.root_lo, self.root_side = default_root(X)
        else:
            self.root_lo = np.asarray(root_lo, dtype=float).reshape(self.dim)
            self.root_side = float(root_side)
        if not self.root_side > 0:
            raise InvalidParameter(f"root side must be positive, got {self.root_side}")
        scaled = self._scale(X)
        if not np.all(self._in_root(scaled)):
            raise InvalidParameter("every sample must lie inside the histogram root")
        self.leaves: Dict[CellKey, np.ndarray] = {}
        self.internal: Set[CellKey] = set()
        self.saturated: List[CellKey] = []
        self._build(scaled)

    def _scale(self, xs: np.ndarray) -> np.ndarray:
        return (xs - self.root_lo) / self.root_side

    @staticmethod
    def _in_root(scaled: np.ndarray) -> np.ndarray:
        return np.all((scaled >= 0.0) & (scaled <= 1.0), axis=1)

    @staticmethod
    def _index(scaled: np.ndarray, depth: int) -> np.ndarray:
        cells = 1 << depth
        if depth < 62:
            return np.minimum(np.floor(scaled * cells), cells - 1).astype(np.int64)
        # past int64 range: exact Python integers
        return np.array([[min(int(math.floor(v * cells)), cells - 1) for v in row] for row in scaled],
                        dtype=object)

    def _build(self, scaled: np.ndarray):
        stack = [((0, (0,) * self.dim), np.arange(len(scaled)))]
        while stack:
            key, members = stack.pop()
            depth, _ = key
            if len(members) <= self.k:
                self.leaves[key] = members
                continue
            if depth >= self.config.MAX_DEPTH:
                self.leaves[key] = members
                self.saturated.append(key)
                logger.warning(f"histogram cell at depth {depth} still holds {len(members)} > {self.k} samples; "
                               f"keeping it as a leaf")
                continue
            self.internal.add(key)
            child_index = self._index(scaled[members], depth + 1)
            groups: Dict[Tuple[int, ...], List[int]] = {}
            for row, idx in zip(members, map(tuple, child_index)):
                groups.setdefault(idx, []).append(row)
            for idx, rows in sorted(groups.items()):
                stack.append(((depth + 1, idx), np.asarray(rows, dtype=np.int64)))

    def locate(self, xs) -> List[Optional[CellKey]]:
        """Leaf key of every query; None outside the root."""
        scaled = self._scale(as_points(xs, self.dim))
        inside = self._in_root(scaled)
        out: List[Optional[CellKey]] = []
        for u, ok in zip(scaled, inside):
            if not ok:
                out.append(None)
                continue
            depth = 0
            key = (0, (0,) * self.dim)
            while key in self.internal:
                depth += 1
                key = (depth, tuple(int(i) for i in self._index(u.reshape(1, -1), depth)[0]))
            out.append(key)
        return out

    def members(self, key: Optional[CellKey]) -> np.ndarray:
        """Sample indices of a leaf; empty for unseen leaves and for None."""
        if key is None:
            return np.empty(0, dtype=np.int64)
        return self.leaves.get(key, np.empty(0, dtype=np.int64))

    def cell_box(self, key: CellKey) -> Tuple[np.ndarray, np.ndarray]:
        depth, idx = key
        width = self.root_side / (1 << depth)
        lo = self.root_lo + width * np.asarray(idx, dtype=float)
        return lo, lo + width

    @property
    def leaf_counts(self) -> Dict[CellKey, int]:
        return {key: len(rows) for key, rows in self.leaves.items()}

    def faces(self) -> List[np.ndarray]:
        """Per axis, the sorted cell-face coordinates of every leaf."""
        coords = [set() for _ in range(self.dim)]
        for key in self.leaves:
            lo, hi = self.cell_box(key)
            for j in range(self.dim):
                coords[j].update((float(lo[j]), float(hi[j])))
        return [np.array(sorted(c)) for c in coords]

    def clearance(self, xs) -> np.ndarray:
        """Distance from each query to the boundary of the cell (or the root) it lies in."""
        xs = as_points(xs, self.dim)
        out = np.empty(len(xs))
        root_hi = self.root_lo + self.root_side
        for row, (x, key) in enumerate(zip(xs, self.locate(xs))):
            if key is None:
                out[row] = float(np.linalg.norm(x - np.clip(x, self.root_lo, root_hi)))
                continue
            lo, hi = self.cell_box(key)
            out[row] = float(np.min(np.minimum(x - lo, hi - x)))
        return out


class HistogramClassifier(WeightFunction):
    """Weight 1/k_x on the k_x samples sharing the query's leaf; all-zero elsewhere."""
    family = "histogram"

    def __init__(self, dataset: Dataset, k: int, root_lo=None, root_side=None):
        super().__init__(dataset)
        self.k = int(k)
        self.cells = HistogramCells(dataset.X, self.k, root_lo=root_lo, root_side=root_side)

    def weights_many(self, xs) -> np.ndarray:
        keys = self.cells.locate(xs)
        out = np.zeros((len(keys), self.n))
        for row, key in enumerate(keys):
            rows = self.cells.members(key)
            if len(rows):
                out[row, rows] = 1.0 / len(rows)
        return out

    def margin_many(self, xs) -> np.ndarray:
        y = self.dataset.y.astype(float)
        return np.array([y[rows].mean() if len(rows) else 0.0
                         for rows in map(self.cells.members, self.cells.locate(xs))])

    def boundary_clearance(self, xs) -> np.ndarray:
        return self.cells.clearance(xs)
