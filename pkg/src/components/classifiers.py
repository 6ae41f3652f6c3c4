"""
Weight-function classifiers: sum_i w_i(x) y_i with label-independent,
non-negative weights, output +1 iff the weighted vote is strictly positive.
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional
import math

import numpy as np

from src.components.distributions import DataDistribution, Dataset, as_point, as_points
from src.entity.config_entity import CertificationConfig
from src.exception.exception import EmptyDataset, InvalidParameter


@dataclass(frozen=True)
class KSchedule:
    """k_n as a function of n: ``logceil`` (c log2 n), ``power`` (n^p) or ``const``."""
    kind: str
    value: float

    def __post_init__(self):
        if self.kind not in ("logceil", "power", "const"):
            raise InvalidParameter(f"unknown k schedule '{self.kind}'")
        if self.kind == "power" and not 0.0 < self.value < 1.0:
            raise InvalidParameter(f"power schedule needs 0 < p < 1, got {self.value}")
        if self.value <= 0:
            raise InvalidParameter(f"k schedule parameter must be positive, got {self.value}")

    def to_text(self) -> str:
        return f"{self.kind}={self.value:g}"


def k_schedule(schedule: KSchedule, n: int) -> int:
    """k_n: the logceil and power schedules are clamped to [1, n], a constant k is taken as given."""
    if n < 1:
        raise InvalidParameter(f"k schedule needs n >= 1, got {n}")
    if schedule.kind == "logceil":
        raw = schedule.value * math.log2(n)
    elif schedule.kind == "power":
        raw = float(n) ** schedule.value
    else:
        return max(math.ceil(schedule.value - 1e-9), 1)
    # absorb pow/log rounding so exact powers are not bumped up
    k = math.ceil(raw - 1e-9)
    return int(min(max(k, 1), n))


class WeightFunction(ABC):
    """
    A weight function fitted to a dataset.

    Subclasses provide the dense weight matrix and the weighted vote; both
    must depend on the sample locations only, never on the labels.
    """
    family = "weight_function"

    def __init__(self, dataset: Dataset):
        if len(dataset) == 0:
            raise EmptyDataset("cannot fit a classifier to an empty dataset")
        self.dataset = dataset
        self.batch_size = CertificationConfig().BATCH_SIZE

    @property
    def n(self) -> int:
        return len(self.dataset)

    @property
    def dim(self) -> int:
        return self.dataset.dim

    @abstractmethod
    def weights_many(self, xs: np.ndarray) -> np.ndarray:
        """(m, n) matrix of weights for m queries."""

    def margin_many(self, xs) -> np.ndarray:
        """Weighted vote sum_i w_i(x) y_i for every query row."""
        xs = as_points(xs, self.dim)
        out = np.empty(len(xs))
        y = self.dataset.y.astype(float)
        for start in range(0, len(xs), self.batch_size):
            out[start:start + self.batch_size] = self.weights_many(xs[start:start + self.batch_size]) @ y
        return out

    def weights(self, x) -> np.ndarray:
        return self.weights_many(as_point(x, self.dim).reshape(1, -1))[0]

    def margin(self, x) -> float:
        return float(self.margin_many(as_point(x, self.dim).reshape(1, -1))[0])

    def predict_many(self, xs) -> np.ndarray:
        # ties and all-zero weights fall to -1
        return np.where(self.margin_many(xs) > 0.0, 1, -1)

    def predict(self, x) -> int:
        return int(self.predict_many(as_point(x, self.dim).reshape(1, -1))[0])


class NeighborhoodBayesClassifier:
    """The neighborhood preserving Bayes optimal of a known distribution."""
    family = "bayes"

    def __init__(self, dist: DataDistribution):
        self.dist = dist

    @property
    def dim(self) -> int:
        return self.dist.dim

    def predict_many(self, xs) -> np.ndarray:
        return self.dist.neighbor_bayes_labels(as_points(xs, self.dim))

    def predict(self, x) -> int:
        return int(self.predict_many(as_point(x, self.dim).reshape(1, -1))[0])


@dataclass(frozen=True)
class ClassifierFamily:
    """
    Unfitted classifier description, parsed from strings such as
    ``knn:power=0.4``, ``kernel:exponential:sqrtlog`` or ``histogram:const=5``.
    """
    kind: str
    schedule: Optional[KSchedule] = None
    kernel: Optional["KernelSpec"] = None
    root_lo: Optional[tuple] = None
    root_side: Optional[float] = None

    @property
    def label(self) -> str:
        if self.kind == "bayes":
            return "bayes"
        if self.kind == "kernel":
            return f"kernel:{self.kernel.to_text()}"
        return f"{self.kind}:{self.schedule.to_text()}"

    def fit(self, dataset: Dataset, dist: Optional[DataDistribution] = None):
        """
        Fit this family to ``dataset``.

        Raises:
            EmptyDataset: the dataset has no samples.
            KTooLarge: a k-NN schedule asks for more neighbours than samples.
        """
        from src.components.histogram import HistogramClassifier
        from src.components.kernels import KernelClassifier
        from src.components.nearest_neighbours import NearestNeighbours

        if self.kind == "bayes":
            if dist is None:
                raise InvalidParameter("the bayes family needs the data distribution")
            return NeighborhoodBayesClassifier(dist)
        if len(dataset) == 0:
            raise EmptyDataset("cannot fit a classifier to an empty dataset")
        if self.kind == "knn":
            return NearestNeighbours(dataset, k_schedule(self.schedule, len(dataset)))
        if self.kind == "kernel":
            return KernelClassifier(dataset, self.kernel)
        return HistogramClassifier(dataset, k_schedule(self.schedule, len(dataset)),
                                   root_lo=self.root_lo, root_side=self.root_side)


def _parse_schedule(text: str) -> KSchedule:
    kind, _, value = text.partition("=")
    if not value:
        raise InvalidParameter(f"k schedule '{text}' needs a value, e.g. power=0.4")
    try:
        return KSchedule(kind.strip(), float(value))
    except ValueError as e:
        raise InvalidParameter(f"non-numeric k schedule value in '{text}'") from e


def parse_family(text: str) -> ClassifierFamily:
    """Parse a classifier spec string (see :class:`ClassifierFamily`)."""
    from src.components.kernels import parse_kernel_spec

    parts = [p.strip() for p in text.strip().split(":")]
    kind = parts[0]
    if kind == "bayes" and len(parts) == 1:
        return ClassifierFamily("bayes")
    if kind in ("knn", "histogram") and len(parts) == 2:
        return ClassifierFamily(kind, schedule=_parse_schedule(parts[1]))
    if kind == "kernel" and len(parts) == 3:
        return ClassifierFamily("kernel", kernel=parse_kernel_spec(parts[1], parts[2]))
    raise InvalidParameter(f"cannot parse classifier spec '{text}'")
