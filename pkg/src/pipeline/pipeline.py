from src.components.analysis import (
    condition4_ratio,
    estimate_condition2,
    estimate_condition3,
    knn_t_n,
)
from src.components.certification import CertResult, certify_astute
from src.components.classifiers import ClassifierFamily, parse_family
from src.components.distributions import DataDistribution, make_distribution
from src.components.evaluator import run_trial, summarise
from src.components.histogram import HistogramClassifier
from src.components.kernels import KernelClassifier
from src.components.nearest_neighbours import NearestNeighbours
from src.entity.artifact_entity import GAP_MEASURES, Expectation, GapMeasure, ResultRow, format_kappa
from src.entity.config_entity import (
    AnalysisConfig,
    CertificationConfig,
    ExperimentConfig,
    HistogramConfig,
    RegionConfig,
)
from src.exception.exception import InvalidParameter
from src.utils.common import derive_seed
from src.utils.plot_handler import PlotLayout, emit_plot
from src.utils.storage_handler import ArtifactStore
from joblib import Parallel, delayed
from typing import Dict, List, Optional, Sequence, Tuple
from dataclasses import replace
from tqdm import tqdm
import numpy as np
import logging
import math
import time

logger = logging.getLogger(__name__)

PLOT_TITLES = {
    "convergence": "Astuteness and accuracy against sample size",
    "lower_bound": "k-NN astuteness with logarithmic and polynomial k",
    "histogram_demo": "Histogram against kernel astuteness",
}


def _timed_trial(family: ClassifierFamily, dist: DataDistribution, n: int, config: ExperimentConfig, trial: int):
    start = time.perf_counter()
    outcome = run_trial(family, dist, n, config.kappas, config.test_points, config.grid_step, config.seed, trial)
    return outcome, (time.perf_counter() - start) * 1000.0


class ExperimentPipeline:
    def __init__(self, config: ExperimentConfig, out_dir: Optional[str] = None, n_jobs: int = 1):
        """
        Initialize the experiment pipeline.

        Parameters:
        - config (ExperimentConfig): validated experiment description.
        - out_dir (str | None): artifact directory.
        - n_jobs (int): joblib workers for experiment cells.

        """
        self.config = config
        self.store = ArtifactStore(out_dir)
        self.n_jobs = n_jobs
        self.dist = make_distribution(config.distribution_kind, config.distribution_pos, config.distribution_neg,
                                      config.distribution_half, config.distribution_pos_weight,
                                      config.distribution_noise)
        self.families = [parse_family(spec) for spec in config.classifiers]

    def astuteness_rows(self) -> List[ResultRow]:
        """
        Accuracy and per-kappa astuteness for every (classifier, n) cell.

        Cells (classifier, n, trial) run in parallel; rows come back in
        canonical order whatever the scheduling.
        """
        config = self.config
        cells = [(family, n, trial) for family in self.families for n in config.n_schedule
                 for trial in range(config.trials)]
        results = Parallel(n_jobs=self.n_jobs)(
            delayed(_timed_trial)(family, self.dist, n, config, trial)
            for family, n, trial in tqdm(cells, desc=config.experiment_id)
        )
        grouped: Dict[Tuple[str, int], list] = {}
        for (family, n, _), outcome in zip(cells, results):
            grouped.setdefault((family.label, n), []).append(outcome)
        rows = []
        for (label, n), pairs in grouped.items():
            outcomes = [o for o, _ in pairs]
            wall = int(round(sum(ms for _, ms in pairs))) if config.record_timing else 0
            for report in summarise(label, n, config.seed, outcomes):
                rows.append(ResultRow(
                    experiment_id=config.experiment_id,
                    classifier=label,
                    n=n,
                    kappa=format_kappa(report.kappa),
                    mean=report.mean,
                    std=report.std,
                    trials=report.trials,
                    seed=config.seed,
                    wall_time_ms=wall,
                ))
                if report.kappa is not None and report.astuteness > report.accuracy:
                    raise InvalidParameter(f"astuteness above accuracy for {label} at n = {n}")
        return sorted(rows, key=lambda r: r.sort_key)

    def _emit(self, rows: List[ResultRow], plot: bool = True) -> Dict[str, str]:
        config = self.config
        artifacts = {"csv": self.store.write_rows(rows, config.output_csv),
                     "config": self.store.write_config(config, config.output_csv.rsplit(".", 1)[0] + ".cfg")}
        if plot:
            layout = PlotLayout(title=PLOT_TITLES.get(config.experiment_id, ""))
            artifacts["plot"] = emit_plot(rows, layout, self.store.path(config.output_plot))
        return artifacts

    def run_convergence(self) -> Dict[str, str]:
        """Astuteness at every kappa plus accuracy, against n, for each classifier."""
        return self._emit(self.astuteness_rows())

    def run_lower_bound(self) -> Dict[str, str]:
        """Same protocol as convergence; the config pins the line distribution and two k-NN schedules."""
        if self.config.distribution_kind != "line":
            logger.warning("lower-bound experiment is meant for the line distribution, "
                           f"got {self.config.distribution_kind}")
        return self._emit(self.astuteness_rows())

    def run_histogram_demo(self) -> Dict[str, str]:
        if self.dist.dim != 1:
            raise InvalidParameter("the histogram demo needs a one-dimensional distribution")
        return self._emit(self.astuteness_rows())

    def _t_n(self, clf) -> float:
        if isinstance(clf, (NearestNeighbours, HistogramClassifier)):
            return knn_t_n(clf.n, clf.k, clf.dim)
        if isinstance(clf, KernelClassifier):
            lo, hi = self.dist.domain_box()
            diameter = float(np.linalg.norm(hi - lo))
            log_k = float(clf.kernel_id.log_kernel(diameter / clf.h))
            return math.sqrt(clf.n * math.log(clf.n) * math.exp(log_k))
        raise InvalidParameter(f"no condition diagnostics for the {clf.family} family")

    def condition_rows(self) -> List[ResultRow]:
        """Condition 2 (probability p), 3 and 4 estimates on one training sample per n."""
        config = self.config
        rows = []
        for family in self.families:
            for n in tqdm(config.n_schedule, desc=family.label):
                train = self.dist.sample(n, derive_seed(config.seed, n, 0, "train"))
                clf = family.fit(train, self.dist)
                t_n = self._t_n(clf)
                start = time.perf_counter()
                estimates = [
                    estimate_condition2(clf, self.dist, config.condition_p, config.condition_grid).value,
                    estimate_condition3(clf, t_n, config.condition_grid, self.dist).value,
                    condition4_ratio(n, clf.dim, t_n),
                ]
                wall = int(round((time.perf_counter() - start) * 1000.0)) if config.record_timing else 0
                for condition, value in zip(("cond2", "cond3", "cond4"), estimates):
                    rows.append(ResultRow(config.experiment_id, family.label, n, condition,
                                          float(value), 0.0, 1, config.seed, wall))
        return sorted(rows, key=lambda r: r.sort_key)

    def run_conditions(self) -> Dict[str, str]:
        return self._emit(self.condition_rows(), plot=False)

    def certify(self, classifier: str, x, y: int, kappa: float, n: int, trial: int = 0) -> CertResult:
        """Fit ``classifier`` to the trial's training sample and certify one labelled point."""
        family = parse_family(classifier)
        train = self.dist.sample(n, derive_seed(self.config.seed, n, trial, "train"))
        clf = family.fit(train, self.dist)
        return certify_astute(clf, self.dist, x, y, kappa, self.config.grid_step)

    def run_pipeline(self) -> Dict[str, str]:
        """Run the experiment named by the config."""
        runners = {
            "convergence": self.run_convergence,
            "lower_bound": self.run_lower_bound,
            "histogram_demo": self.run_histogram_demo,
            "conditions": self.run_conditions,
        }
        logger.info(f"running {self.config.experiment_id} with seed {self.config.seed}")
        logger.debug(f"experiment: {self.config.get_experiment_config()}")
        for settings in (RegionConfig().get_region_config(), CertificationConfig().get_certification_config(),
                         HistogramConfig().get_histogram_config(), AnalysisConfig().get_analysis_config()):
            logger.debug(f"settings: {settings}")
        return runners[self.config.experiment_id]()


def measure_gap(rows: Sequence[ResultRow], measure: GapMeasure) -> float:
    """
    Astuteness gap named by ``measure`` at the largest n both of its series reach.

    Raises:
        InvalidParameter: the rows do not hold both series.
    """
    table = {(r.classifier, r.kappa): {} for r in rows}
    for r in rows:
        table[(r.classifier, r.kappa)][r.n] = r.mean
    higher, lower = table.get(measure.higher, {}), table.get(measure.lower, {})
    shared = set(higher) & set(lower)
    if not shared:
        raise InvalidParameter(f"no sample size carries both {measure.higher} and {measure.lower}")
    n = max(shared)
    return higher[n] - lower[n]


def run_pilot(configs: Dict[str, ExperimentConfig], current: Dict[str, Expectation],
              out_dir: Optional[str] = None, n_jobs: int = 1) -> Dict[str, Expectation]:
    """
    Measure every gap of :data:`GAP_MEASURES` and pin it, keeping the committed tolerances.

    Parameters:
    - configs (dict): experiment id -> config to run; the seed in each is the pinned seed.
    - current (dict): expectations being replaced.

    """
    rows: Dict[str, List[ResultRow]] = {}
    measured = {}
    for name, measure in GAP_MEASURES.items():
        if measure.experiment_id not in rows:
            pipeline = ExperimentPipeline(configs[measure.experiment_id], out_dir=out_dir, n_jobs=n_jobs)
            rows[measure.experiment_id] = pipeline.astuteness_rows()
        gap = round(measure_gap(rows[measure.experiment_id], measure), 6)
        logger.info(f"{name}: measured {gap:g} (was {current[name].value:g})")
        measured[name] = replace(current[name], value=gap, stand_in=False)
    return measured
