from dataclasses import dataclass, fields
from typing import Tuple

from src.exception.exception import InvalidParameter

HEADER = ("experiment_id", "classifier", "n", "kappa", "mean", "std", "trials", "seed", "wall_time_ms")
ACCURACY = "accuracy"
CONDITION_IDS = ("cond2", "cond3", "cond4")


def format_kappa(kappa) -> str:
    """Text form of the kappa column: ``accuracy``, a condition id, or the number in %.6g."""
    if kappa is None:
        return ACCURACY
    if isinstance(kappa, str):
        return kappa
    return "%.6g" % kappa


def kappa_rank(kappa: str) -> Tuple[int, float, str]:
    """accuracy first, then numeric kappas ascending, then condition ids."""
    if kappa == ACCURACY:
        return 0, 0.0, ""
    if kappa in CONDITION_IDS:
        return 2, 0.0, kappa
    return 1, float(kappa), ""


@dataclass(frozen=True)
class ResultRow:
    """One CSV row of an experiment artifact."""
    experiment_id: str
    classifier: str
    n: int
    kappa: str
    mean: float
    std: float
    trials: int
    seed: int
    wall_time_ms: int = 0

    def __post_init__(self):
        if self.std < 0:
            raise InvalidParameter(f"std must be non-negative, got {self.std}")
        if self.kappa in CONDITION_IDS:
            if self.mean < 0:
                raise InvalidParameter(f"condition value must be non-negative, got {self.mean}")
        elif not 0.0 <= self.mean <= 1.0:
            raise InvalidParameter(f"fraction must lie in [0, 1], got {self.mean}")

    @property
    def sort_key(self):
        return self.experiment_id, self.classifier, self.n, kappa_rank(self.kappa)

    def to_record(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class Expectation:
    """A pinned seed-0 figure with the slack the slow checks allow below it."""
    value: float
    tolerance: float
    stand_in: bool = True

    def __post_init__(self):
        if self.tolerance < 0:
            raise InvalidParameter(f"tolerance must be non-negative, got {self.tolerance}")

    @property
    def floor(self) -> float:
        return self.value - self.tolerance


@dataclass(frozen=True)
class GapMeasure:
    """Astuteness of ``higher`` minus astuteness of ``lower`` at the largest n of one experiment."""
    experiment_id: str
    higher: Tuple[str, str]
    lower: Tuple[str, str]


GAP_MEASURES = {
    "lower_bound.astuteness_gap": GapMeasure("lower_bound", ("knn:power=0.4", "0.5"), ("knn:logceil=1", "0.5")),
    "convergence.polynomial_kappa_drop": GapMeasure("convergence", ("kernel:polynomial:cuberoot", "0.1"),
                                                    ("kernel:polynomial:cuberoot", "0.5")),
    "histogram_demo.kernel_gap": GapMeasure("histogram_demo", ("kernel:exponential:sqrtlog", "0.9"),
                                            ("histogram:power=0.5", "0.9")),
}
