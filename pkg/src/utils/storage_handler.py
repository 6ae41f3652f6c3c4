from src.entity.artifact_entity import HEADER, Expectation, ResultRow
from src.entity.config_entity import ExperimentConfig, PathConfig
from src.utils.config_parser import serialize_config, serialize_expectations
from typing import Dict, List, Optional, Sequence
import pandas as pd
import logging
import os

logger = logging.getLogger(__name__)


class ArtifactStore:
    """
    Class for writing and reading experiment artifacts on the local disk.
    """
    def __init__(self, out_dir: Optional[str] = None):
        """
        Initialize ArtifactStore.

        Parameters:
        - out_dir (str | None): artifact directory; defaults to ``artifacts/`` under the project root.

        """
        self.out_dir = out_dir if out_dir is not None else PathConfig().ARTIFACT_DIR
        os.makedirs(self.out_dir, exist_ok=True)

    def path(self, filename: str) -> str:
        return filename if os.path.isabs(filename) else os.path.join(self.out_dir, filename)

    def write_rows(self, rows: Sequence[ResultRow], filename: str) -> str:
        """
        Write rows in canonical order: header fixed, floats with 6 significant digits, ``\\n`` endings.

        Returns:
        - str: path of the written CSV.

        """
        ordered = sorted(rows, key=lambda r: r.sort_key)
        frame = pd.DataFrame([r.to_record() for r in ordered], columns=list(HEADER))
        # seeds are unsigned 64-bit and do not fit int64
        frame["seed"] = frame["seed"].astype(str)
        path = self.path(filename)
        frame.to_csv(path, index=False, float_format="%.6g", lineterminator="\n")
        logger.info(f"wrote {len(ordered)} rows to {path}")
        return path

    def read_rows(self, filename: str) -> List[ResultRow]:
        frame = pd.read_csv(self.path(filename), dtype={"experiment_id": str, "classifier": str,
                                                        "kappa": str, "seed": str}, keep_default_na=False)
        if tuple(frame.columns) != HEADER:
            raise ValueError(f"unexpected CSV header {tuple(frame.columns)}")
        return [ResultRow(
            experiment_id=r.experiment_id,
            classifier=r.classifier,
            n=int(r.n),
            kappa=r.kappa,
            mean=float(r.mean),
            std=float(r.std),
            trials=int(r.trials),
            seed=int(r.seed),
            wall_time_ms=int(r.wall_time_ms),
        ) for r in frame.itertuples(index=False)]

    def write_config(self, config: ExperimentConfig, filename: str) -> str:
        """Store the effective config next to the results."""
        path = self.path(filename)
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(serialize_config(config))
        return path

    def write_expectations(self, expectations: Dict[str, Expectation], filename: str) -> str:
        path = self.path(filename)
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write("# Seed-0 pilot figures for the slow experiment checks; a check passes at value - tolerance.\n")
            handle.write(serialize_expectations(expectations))
        logger.info(f"wrote {len(expectations)} expectations to {path}")
        return path
