from dataclasses import dataclass
from typing import Tuple
from from_root import from_root
import os


class PathConfig:
    """
    Configuration class for project directories.
    """
    def __init__(self):
        """
        Initialize PathConfig with directories relative to the project root.
        """
        self.CONFIG_DIR = os.path.join(from_root(), "configs")
        self.ARTIFACT_DIR = os.path.join(from_root(), "artifacts")
        self.LOG_DIR = os.path.join(from_root(), "logs")
        self.EXPECTATIONS_FILE = os.path.join(self.CONFIG_DIR, "expected.cfg")


class RegionConfig:
    """
    Configuration class for robustness region geometry.
    """
    def __init__(self):
        """
        Initialize RegionConfig with default values.
        """
        # membership within this margin of the decision surface counts as outside
        self.BOUNDARY_TOL: float = 1e-6
        # points sampled per primitive when intersecting Apollonius balls for a box
        self.BOUND_SAMPLES: int = 256
        self.BOX_SLACK: float = 1e-9

    def get_region_config(self):
        """
        Get the region configuration as a dictionary.
        """
        return self.__dict__


class CertificationConfig:
    """
    Configuration class for astuteness certification.
    """
    def __init__(self):
        """
        Initialize CertificationConfig with default values.
        """
        self.GRID_STEP: float = 0.01
        self.MAX_REFINEMENTS: int = 4
        self.BATCH_SIZE: int = 1024
        self.TIE_TOL: float = 1e-12
        # refinement gives up once this many sub-lattice points are pending
        self.MAX_REFINED_POINTS: int = 200000

    def get_certification_config(self):
        """
        Get the certification configuration as a dictionary.
        """
        return self.__dict__


class HistogramConfig:
    """
    Configuration class for histogram cell trees.
    """
    def __init__(self):
        """
        Initialize HistogramConfig with default values.
        """
        self.MAX_DEPTH: int = 64
        self.ROOT_PADDING: float = 1e-9

    def get_histogram_config(self):
        """
        Get the histogram configuration as a dictionary.
        """
        return self.__dict__


class AnalysisConfig:
    """
    Configuration class for diagnostic analysis.
    """
    def __init__(self):
        """
        Initialize AnalysisConfig with default values.
        """
        self.MAX_ENUMERATION_N: int = 12
        self.FALLBACK_GRID: int = 24
        self.RADIUS_TOL: float = 1e-10
        self.CONDITION_GRID: int = 201

    def get_analysis_config(self):
        """
        Get the analysis configuration as a dictionary.
        """
        return self.__dict__


class ExperimentDefaults:
    """
    Configuration class for experiment protocol defaults.
    """
    def __init__(self):
        """
        Initialize ExperimentDefaults with default values.
        """
        self.N_SCHEDULE: Tuple[int, ...] = (250, 500, 1000, 2000, 4000, 8000)
        self.KAPPAS: Tuple[float, ...] = (0.1, 0.3, 0.5)
        self.TEST_POINTS: int = 20
        self.TRIALS: int = 3
        self.GRID_STEP: float = 0.01
        self.SEED: int = 0
        self.CONDITION_P: float = 0.2
        self.CLASSIFIERS: Tuple[str, ...] = ("kernel:exponential:sqrtlog", "kernel:polynomial:cuberoot")


EXPERIMENT_IDS = ("convergence", "lower_bound", "histogram_demo", "conditions")
DISTRIBUTION_KINDS = ("line", "two_circles", "supports")

_defaults = ExperimentDefaults()


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Declarative description of one experiment run.

    Field names map one-to-one onto the keys of the config text format
    (dots in keys become underscores here).
    """
    experiment_id: str
    distribution_kind: str = "two_circles"
    distribution_pos: str = ""
    distribution_neg: str = ""
    distribution_half: str = ""
    distribution_pos_weight: float = 0.5
    distribution_noise: float = 0.0
    classifiers: Tuple[str, ...] = _defaults.CLASSIFIERS
    n_schedule: Tuple[int, ...] = _defaults.N_SCHEDULE
    kappas: Tuple[float, ...] = _defaults.KAPPAS
    test_points: int = _defaults.TEST_POINTS
    trials: int = _defaults.TRIALS
    grid_step: float = _defaults.GRID_STEP
    seed: int = _defaults.SEED
    condition_p: float = _defaults.CONDITION_P
    condition_grid: int = 201
    record_timing: bool = False
    output_csv: str = "results.csv"
    output_plot: str = "results.svg"

    def get_experiment_config(self):
        """
        Get the experiment configuration as a dictionary.
        """
        return dict(self.__dict__)
