"""
Command-line entry point.

Exit codes: 0 success, 1 config error, 2 any other failure.
"""
from typing import List, Optional
import argparse
import logging
import os
import sys

from src.entity.artifact_entity import GAP_MEASURES
from src.entity.config_entity import ExperimentConfig, PathConfig
from src.exception.exception import ConfigError, CustomException
from src.logger import configure_logging
from src.pipeline.pipeline import ExperimentPipeline, run_pilot
from src.utils.config_parser import load_config, load_expectations, with_overrides
from src.utils.storage_handler import ArtifactStore

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2

COMMANDS = {
    "convergence": "convergence",
    "lower-bound": "lower_bound",
    "histogram-demo": "histogram_demo",
    "conditions": "conditions",
}


def _point(text: str):
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated coordinates, got '{text}'") from e


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="robust-nonparam",
                                     description="Astuteness experiments for nonparametric classifiers")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="config file (default: configs/<experiment>.cfg)")
    common.add_argument("--seed", type=_u64, help="override the config seed")
    common.add_argument("--out", help="artifact directory (default: artifacts/)")
    common.add_argument("--jobs", type=int, default=1, help="parallel workers")
    common.add_argument("--log-dir", help="also write a timestamped log file here")
    common.add_argument("--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=f"run the {name} experiment")
    certify = sub.add_parser("certify", parents=[common], help="certify a single labelled point")
    certify.add_argument("--classifier", required=True, help="classifier spec, e.g. kernel:exponential:sqrtlog")
    certify.add_argument("--point", type=_point, required=True, help="anchor coordinates, e.g. 1,0")
    certify.add_argument("--label", type=int, choices=(-1, 1), required=True)
    certify.add_argument("--kappa", type=float, required=True)
    certify.add_argument("--n", type=int, required=True, help="training sample size")
    certify.add_argument("--trial", type=int, default=0)
    pilot = sub.add_parser("pilot", parents=[common],
                           help="rerun the gap experiments at the pinned seed and rewrite the expectations file")
    pilot.add_argument("--expectations", help="expectations file (default: configs/expected.cfg)")
    return parser


def _default_config(experiment: str) -> str:
    return os.path.join(PathConfig().CONFIG_DIR, f"{experiment}.cfg")


def _load(args) -> ExperimentConfig:
    experiment = COMMANDS.get(args.command, "convergence")
    path = args.config or _default_config(experiment)
    config = with_overrides(load_config(path), seed=args.seed)
    if args.command in COMMANDS and config.experiment_id != experiment:
        raise ConfigError(f"config is for '{config.experiment_id}', not '{experiment}'", field="experiment_id")
    return config


def _pilot(args):
    path = os.path.abspath(args.expectations or PathConfig().EXPECTATIONS_FILE)
    experiments = sorted({m.experiment_id for m in GAP_MEASURES.values()})
    configs = {e: with_overrides(load_config(_default_config(e)), seed=args.seed) for e in experiments}
    measured = run_pilot(configs, load_expectations(path), out_dir=args.out, n_jobs=args.jobs)
    print(f"expectations: {ArtifactStore(args.out).write_expectations(measured, path)}")


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_dir, logging.DEBUG if args.verbose else logging.INFO)
    try:
        if args.command == "pilot":
            _pilot(args)
            return EXIT_OK
        config = _load(args)
        pipeline = ExperimentPipeline(config, out_dir=args.out, n_jobs=args.jobs)
        if args.command == "certify":
            result = pipeline.certify(args.classifier, args.point, args.label, args.kappa, args.n, args.trial)
            for key, value in result.__dict__.items():
                print(f"{key}: {value}")
        else:
            for kind, path in pipeline.run_pipeline().items():
                print(f"{kind}: {path}")
    except ConfigError as e:
        logger.error(f"config error: {e}")
        return EXIT_CONFIG
    except Exception as e:
        logger.error(str(CustomException(e, sys)))
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
