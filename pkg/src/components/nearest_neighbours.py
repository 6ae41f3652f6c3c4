from src.components.classifiers import WeightFunction
from src.components.distributions import Dataset, as_points
from src.exception.exception import KTooLarge
from sklearn.neighbors import KDTree
import numpy as np


class TieBreakingIndex:
    def __init__(self, points: np.ndarray, keys: np.ndarray):
        """
        Exact Euclidean neighbour index with deterministic tie breaking.

        Parameters:
        - points (np.ndarray): (n, d) sample locations.
        - keys (np.ndarray): one uniform key per sample; among equidistant
          samples the smaller key counts as closer.

        """
        self.points = points
        self.keys = keys
        self.tree = KDTree(points)

    def get_nns_by_matrix(self, xs: np.ndarray, k: int) -> np.ndarray:
        """
        Get the k nearest samples of every query row.

        Parameters:
        - xs (np.ndarray): (m, d) queries.
        - k (int): number of neighbours.

        Returns:
        - np.ndarray: (m, k) sample indices ordered by (distance, key).

        """
        kth = self.tree.query(xs, k=k, return_distance=True)[0][:, -1]
        # widen the radius so every sample tied with the k-th one is a candidate
        radius = kth + 1e-12 * np.maximum(kth, 1.0)
        candidates = self.tree.query_radius(xs, r=radius)
        out = np.empty((len(xs), k), dtype=np.int64)
        for row, (x, cand) in enumerate(zip(xs, candidates)):
            gaps = np.linalg.norm(self.points[cand] - x, axis=1)
            order = np.lexsort((self.keys[cand], gaps))
            out[row] = cand[order[:k]]
        return out

    def get_nns_by_vector(self, vector: np.ndarray, k: int) -> np.ndarray:
        return self.get_nns_by_matrix(np.asarray(vector, dtype=float).reshape(1, -1), k)[0]


class NearestNeighbours(WeightFunction):
    """k_n-nearest neighbours: weight 1/k_n on each of the k_n closest samples."""
    family = "knn"

    def __init__(self, dataset: Dataset, k: int):
        super().__init__(dataset)
        if k > len(dataset):
            raise KTooLarge(f"k_n = {k} exceeds the number of samples n = {len(dataset)}")
        self.k = int(k)
        self.index = TieBreakingIndex(dataset.X, dataset.tiebreak_keys)

    def neighbours(self, xs) -> np.ndarray:
        return self.index.get_nns_by_matrix(as_points(xs, self.dim), self.k)

    def weights_many(self, xs) -> np.ndarray:
        idx = self.neighbours(xs)
        out = np.zeros((len(idx), self.n))
        np.put_along_axis(out, idx, 1.0 / self.k, axis=1)
        return out

    def margin_many(self, xs) -> np.ndarray:
        xs = as_points(xs, self.dim)
        out = np.empty(len(xs))
        y = self.dataset.y.astype(float)
        for start in range(0, len(xs), self.batch_size):
            out[start:start + self.batch_size] = y[self.neighbours(xs[start:start + self.batch_size])].mean(axis=1)
        return out
