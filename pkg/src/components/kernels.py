"""
Kernel-similarity classifiers w_i(x) proportional to K(rho(x, x_i) / h_n).

All kernels are evaluated in the log domain so that tiny bandwidths at large
n never underflow the normalisation.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Optional
import logging
import math

import numpy as np
from scipy.spatial.distance import cdist
from scipy.special import softmax

from src.components.classifiers import WeightFunction
from src.components.distributions import Dataset, as_points
from src.exception.exception import InvalidParameter, NTooSmall

logger = logging.getLogger(__name__)


class KernelId(str, Enum):
    EXPONENTIAL = "exponential"
    GAUSSIAN = "gaussian"
    POLYNOMIAL = "polynomial"

    def log_kernel(self, u: np.ndarray) -> np.ndarray:
        """log K(u) for u >= 0."""
        u = np.asarray(u, dtype=float)
        if self is KernelId.EXPONENTIAL:
            return -u
        if self is KernelId.GAUSSIAN:
            return -u * u
        return -np.log1p(u * u)

    def kernel(self, u) -> np.ndarray:
        return np.exp(self.log_kernel(u))

    def log_abs_derivative(self, u: np.ndarray) -> np.ndarray:
        """log |K'(u)|; -inf where the derivative vanishes."""
        u = np.asarray(u, dtype=float)
        if self is KernelId.EXPONENTIAL:
            return -u
        with np.errstate(divide="ignore"):
            log_u = np.log(u)
        if self is KernelId.GAUSSIAN:
            return math.log(2.0) + log_u - u * u
        return math.log(2.0) + log_u - 2.0 * np.log1p(u * u)

    @property
    def derivative_peak(self) -> float:
        """Argmax of |K'| on [0, inf); |K'| is unimodal around it."""
        if self is KernelId.EXPONENTIAL:
            return 0.0
        if self is KernelId.GAUSSIAN:
            return 1.0 / math.sqrt(2.0)
        return 1.0 / math.sqrt(3.0)


class BandwidthKind(str, Enum):
    SQRTLOG = "sqrtlog"
    CUBEROOT = "cuberoot"
    FIXED = "fixed"


@dataclass(frozen=True)
class KernelSpec:
    kernel_id: KernelId
    bandwidth_kind: BandwidthKind
    fixed_h: Optional[float] = None

    def __post_init__(self):
        if self.bandwidth_kind == BandwidthKind.FIXED and not (self.fixed_h is not None and self.fixed_h > 0):
            raise InvalidParameter(f"fixed bandwidth must be positive, got {self.fixed_h}")

    def bandwidth(self, n: int) -> float:
        """
        h_n for a sample of size n (natural logarithm).

        Raises:
            NTooSmall: n < 2 for a data-dependent schedule.
        """
        if self.bandwidth_kind == BandwidthKind.FIXED:
            return float(self.fixed_h)
        if n < 2:
            raise NTooSmall(f"bandwidth schedule {self.bandwidth_kind.value} needs n >= 2, got {n}")
        if self.bandwidth_kind == BandwidthKind.SQRTLOG:
            return 1.0 / (10.0 * math.sqrt(math.log(n)))
        return 1.0 / (10.0 * n ** (1.0 / 3.0))

    def to_text(self) -> str:
        if self.bandwidth_kind == BandwidthKind.FIXED:
            return f"{self.kernel_id.value}:fixed={self.fixed_h:g}"
        return f"{self.kernel_id.value}:{self.bandwidth_kind.value}"


def parse_kernel_spec(kernel: str, bandwidth: str) -> KernelSpec:
    try:
        kernel_id = KernelId(kernel.strip())
    except ValueError as e:
        raise InvalidParameter(f"unknown kernel '{kernel}'") from e
    kind, _, value = bandwidth.strip().partition("=")
    try:
        bandwidth_kind = BandwidthKind(kind)
    except ValueError as e:
        raise InvalidParameter(f"unknown bandwidth schedule '{bandwidth}'") from e
    if bandwidth_kind == BandwidthKind.FIXED:
        try:
            return KernelSpec(kernel_id, bandwidth_kind, float(value))
        except ValueError as e:
            raise InvalidParameter(f"fixed bandwidth needs a number, got '{bandwidth}'") from e
    if value:
        raise InvalidParameter(f"bandwidth schedule '{kind}' takes no value")
    return KernelSpec(kernel_id, bandwidth_kind)


class KernelClassifier(WeightFunction):
    family = "kernel"

    def __init__(self, dataset: Dataset, spec: KernelSpec, bandwidth: Optional[float] = None):
        """
        Parameters:
        - dataset (Dataset): training samples.
        - spec (KernelSpec): kernel and bandwidth schedule.
        - bandwidth (float | None): explicit h overriding the schedule.

        """
        super().__init__(dataset)
        self.spec = spec
        self.kernel_id = spec.kernel_id
        self.h = float(bandwidth) if bandwidth is not None else spec.bandwidth(len(dataset))
        if not self.h > 0:
            raise InvalidParameter(f"bandwidth must be positive, got {self.h}")
        self.fallback_queries = 0

    def distances(self, xs) -> np.ndarray:
        return cdist(as_points(xs, self.dim), self.dataset.X)

    def log_unnormalised(self, xs) -> np.ndarray:
        return self.kernel_id.log_kernel(self.distances(xs) / self.h)

    def weights_many(self, xs) -> np.ndarray:
        logits = self.log_unnormalised(xs)
        lost = ~np.isfinite(np.max(logits, axis=1))
        if not lost.any():
            return softmax(logits, axis=1)
        self.fallback_queries += int(lost.sum())
        logger.warning(f"kernel weights underflowed for {int(lost.sum())} queries; using 1-NN weighting there")
        out = np.zeros_like(logits)
        out[~lost] = softmax(logits[~lost], axis=1)
        nearest = np.lexsort((np.broadcast_to(self.dataset.tiebreak_keys, logits[lost].shape),
                              self.distances(as_points(xs, self.dim)[lost])), axis=1)[:, 0]
        out[np.flatnonzero(lost), nearest] = 1.0
        return out
