"""
Empirical astuteness and accuracy over repeated trials.

One trial fits a classifier to a fresh training sample and certifies a fresh
batch of labelled test draws at every requested kappa. Sample seeds depend on
(seed, n, trial) only, so every classifier family sees the same data.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple
import logging

import numpy as np
from joblib import Parallel, delayed

from src.components.certification import CertResult, certify_astute
from src.components.classifiers import ClassifierFamily
from src.components.distributions import DataDistribution
from src.entity.config_entity import CertificationConfig
from src.exception.exception import InvalidParameter
from src.utils.common import derive_seed

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrialOutcome:
    trial: int
    accuracy: Tuple[CertResult, ...]
    by_kappa: Dict[float, Tuple[CertResult, ...]] = field(default_factory=dict)


@dataclass(frozen=True)
class AstutenessReport:
    """
    Per-point certificates and per-trial fractions for one (classifier, n, kappa) cell.

    ``kappa`` is None for a plain accuracy report, whose robustness fields are
    trivially true.
    """
    classifier: str
    n: int
    kappa: Optional[float]
    per_point: Tuple[CertResult, ...]
    per_trial_astuteness: Tuple[float, ...]
    per_trial_accuracy: Tuple[float, ...]
    seed: int

    @property
    def trials(self) -> int:
        return len(self.per_trial_astuteness)

    @property
    def astuteness(self) -> float:
        return float(np.mean(self.per_trial_astuteness))

    @property
    def accuracy(self) -> float:
        return float(np.mean(self.per_trial_accuracy))

    @property
    def astuteness_std(self) -> float:
        return _sample_std(self.per_trial_astuteness)

    @property
    def accuracy_std(self) -> float:
        return _sample_std(self.per_trial_accuracy)

    @property
    def mean(self) -> float:
        return self.accuracy if self.kappa is None else self.astuteness

    @property
    def std(self) -> float:
        return self.accuracy_std if self.kappa is None else self.astuteness_std


def _sample_std(values: Sequence[float]) -> float:
    if len(values) < 2:
        return 0.0
    return float(np.std(values, ddof=1))


def _accuracy_only(anchor, label: int, prediction: int) -> CertResult:
    accurate = prediction == label
    return CertResult(
        astute=accurate,
        accurate_at_anchor=accurate,
        robust=True,
        counterexample=None,
        grid_points_checked=0,
        flip_bound_used=False,
        refined_steps=0,
        grid_only=False,
        step_used=0.0,
        anchor=tuple(float(c) for c in anchor),
        label=int(label),
    )


def run_trial(family: ClassifierFamily, dist: DataDistribution, n: int, kappas: Sequence[float],
              test_points: int, step: float, seed: int, trial: int, bayes_labels: bool = False) -> TrialOutcome:
    """
    Fit once, draw one test batch, certify it at every kappa.

    Parameters:
    - family (ClassifierFamily): classifier to fit.
    - dist (DataDistribution): data source.
    - n (int): training sample size.
    - kappas (Sequence[float]): region scales; empty for accuracy only.
    - test_points (int): labelled test draws.
    - step (float): grid step for certification.
    - seed (int): experiment seed.
    - trial (int): trial index, mixed into the sample seeds.
    - bayes_labels (bool): label test draws with the Bayes label instead of a draw from eta.

    Returns:
    - TrialOutcome

    """
    if test_points < 1:
        raise InvalidParameter(f"test_points must be >= 1, got {test_points}")
    train = dist.sample(n, derive_seed(seed, n, trial, "train"))
    test = dist.sample(test_points, derive_seed(seed, n, trial, "test"))
    labels = test.y.astype(int)
    if bayes_labels:
        labels = np.array([dist.bayes_label(x) for x in test.X])
    clf = family.fit(train, dist)
    predictions = clf.predict_many(test.X)
    accuracy = tuple(_accuracy_only(x, y, p) for x, y, p in zip(test.X, labels, predictions))
    by_kappa = {}
    for kappa in kappas:
        by_kappa[float(kappa)] = tuple(certify_astute(clf, dist, x, int(y), kappa, step)
                                       for x, y in zip(test.X, labels))
    return TrialOutcome(trial, accuracy, by_kappa)


def summarise(label: str, n: int, seed: int, outcomes: Sequence[TrialOutcome]) -> List[AstutenessReport]:
    """Accuracy report first, then one report per kappa in ascending order."""
    outcomes = sorted(outcomes, key=lambda o: o.trial)
    accuracy = [float(np.mean([r.accurate_at_anchor for r in o.accuracy])) for o in outcomes]
    reports = [AstutenessReport(
        classifier=label, n=n, kappa=None,
        per_point=tuple(r for o in outcomes for r in o.accuracy),
        per_trial_astuteness=tuple(accuracy),
        per_trial_accuracy=tuple(accuracy),
        seed=seed,
    )]
    for kappa in sorted(outcomes[0].by_kappa) if outcomes else []:
        results = [o.by_kappa[kappa] for o in outcomes]
        reports.append(AstutenessReport(
            classifier=label, n=n, kappa=kappa,
            per_point=tuple(r for batch in results for r in batch),
            per_trial_astuteness=tuple(float(np.mean([r.astute for r in batch])) for batch in results),
            per_trial_accuracy=tuple(float(np.mean([r.accurate_at_anchor for r in batch])) for batch in results),
            seed=seed,
        ))
    return reports


def evaluate_cell(family: ClassifierFamily, dist: DataDistribution, n: int, kappas: Sequence[float],
                  test_points: int, trials: int, seed: int, step: Optional[float] = None,
                  bayes_labels: bool = False, n_jobs: int = 1) -> List[AstutenessReport]:
    if trials < 1:
        raise InvalidParameter(f"trials must be >= 1, got {trials}")
    step = CertificationConfig().GRID_STEP if step is None else step
    outcomes = Parallel(n_jobs=n_jobs)(
        delayed(run_trial)(family, dist, n, kappas, test_points, step, seed, trial, bayes_labels)
        for trial in range(trials)
    )
    return summarise(family.label, n, seed, outcomes)


def empirical_astuteness(family: ClassifierFamily, dist: DataDistribution, n: int, kappa: float,
                         test_points: int, trials: int, seed: int, step: Optional[float] = None,
                         bayes_labels: bool = False, n_jobs: int = 1) -> AstutenessReport:
    """Astuteness of ``family`` w.r.t. V^kappa, averaged over ``trials`` fresh samples."""
    return evaluate_cell(family, dist, n, (kappa,), test_points, trials, seed, step, bayes_labels, n_jobs)[1]


def empirical_accuracy(family: ClassifierFamily, dist: DataDistribution, n: int, test_points: int,
                       trials: int, seed: int, bayes_labels: bool = False, n_jobs: int = 1) -> AstutenessReport:
    return evaluate_cell(family, dist, n, (), test_points, trials, seed, None, bayes_labels, n_jobs)[0]
