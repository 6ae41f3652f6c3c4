"""
Flat, typed key-value config files.

One ``key = value`` per line, ``#`` starts a comment, lists are comma
separated. Every key has a fixed type and unknown or repeated keys are
rejected with the offending line number.
"""
from dataclasses import replace
from typing import Dict, Iterator, Tuple
import logging

from src.components.classifiers import parse_family
from src.components.distributions import make_distribution, parse_support
from src.entity.artifact_entity import GAP_MEASURES, Expectation
from src.entity.config_entity import DISTRIBUTION_KINDS, EXPERIMENT_IDS, ExperimentConfig
from src.exception.exception import ConfigError, RobustnessError

logger = logging.getLogger(__name__)

# key -> (dataclass field, value type)
SCHEMA: Dict[str, Tuple[str, str]] = {
    "experiment_id": ("experiment_id", "str"),
    "distribution.kind": ("distribution_kind", "str"),
    "distribution.pos": ("distribution_pos", "str"),
    "distribution.neg": ("distribution_neg", "str"),
    "distribution.half": ("distribution_half", "str"),
    "distribution.pos_weight": ("distribution_pos_weight", "float"),
    "distribution.noise": ("distribution_noise", "float"),
    "classifiers": ("classifiers", "list[str]"),
    "n_schedule": ("n_schedule", "list[int]"),
    "kappas": ("kappas", "list[float]"),
    "test_points": ("test_points", "int"),
    "trials": ("trials", "int"),
    "grid_step": ("grid_step", "float"),
    "seed": ("seed", "int"),
    "condition_p": ("condition_p", "float"),
    "condition_grid": ("condition_grid", "int"),
    "record_timing": ("record_timing", "bool"),
    "output.csv": ("output_csv", "str"),
    "output.plot": ("output_plot", "str"),
}
FIELD_TO_KEY = {field: key for key, (field, _) in SCHEMA.items()}


def _convert(raw: str, kind: str):
    if kind == "str":
        return raw
    if kind == "int":
        return int(raw)
    if kind == "float":
        return float(raw)
    if kind == "bool":
        lowered = raw.lower()
        if lowered not in ("true", "false"):
            raise ValueError(f"expected true or false, got '{raw}'")
        return lowered == "true"
    items = [item.strip() for item in raw.split(",")] if raw else []
    if any(not item for item in items):
        raise ValueError("empty list item")
    inner = kind[len("list["):-1]
    return tuple(_convert(item, inner) for item in items)


def _render(value, kind: str) -> str:
    if kind == "bool":
        return "true" if value else "false"
    if kind == "float":
        return repr(float(value))
    if kind.startswith("list["):
        inner = kind[len("list["):-1]
        return ", ".join(_render(item, inner) for item in value)
    return str(value)


def _entries(text: str) -> Iterator[Tuple[int, str, str]]:
    for number, line in enumerate(text.splitlines(), start=1):
        content = line.split("#", 1)[0].strip()
        if not content:
            continue
        key, sep, raw = content.partition("=")
        key, raw = key.strip(), raw.strip()
        if not sep or not key:
            raise ConfigError("expected 'key = value'", line=number)
        yield number, key, raw


def parse_config(text: str) -> ExperimentConfig:
    """
    Parse config text into an :class:`ExperimentConfig`.

    Raises:
        ConfigError: syntax errors, unknown or duplicate keys, bad values or
            violated invariants, with line and field when known.
    """
    values, lines = {}, {}
    for number, key, raw in _entries(text):
        if key not in SCHEMA:
            raise ConfigError(f"unknown key '{key}'", line=number, field=key)
        if key in lines:
            raise ConfigError(f"duplicate key (first set on line {lines[key]})", line=number, field=key)
        field, kind = SCHEMA[key]
        try:
            values[field] = _convert(raw, kind)
        except ValueError as e:
            raise ConfigError(f"cannot read '{raw}' as {kind}: {e}", line=number, field=key) from e
        lines[key] = number
    if "experiment_id" not in values:
        raise ConfigError("missing required key", field="experiment_id")
    config = ExperimentConfig(**values)
    validate_config(config, lines)
    return config


def validate_config(config: ExperimentConfig, lines: Dict[str, int] = None):
    lines = lines or {}

    def fail(field: str, message: str):
        key = FIELD_TO_KEY[field]
        raise ConfigError(message, line=lines.get(key), field=key)

    if config.experiment_id not in EXPERIMENT_IDS:
        fail("experiment_id", f"must be one of {', '.join(EXPERIMENT_IDS)}")
    if config.distribution_kind not in DISTRIBUTION_KINDS:
        fail("distribution_kind", f"must be one of {', '.join(DISTRIBUTION_KINDS)}")
    if config.distribution_kind == "supports":
        for field in ("distribution_pos", "distribution_neg", "distribution_half"):
            try:
                parse_support(getattr(config, field))
            except RobustnessError as e:
                fail(field, f"invalid support: {e}")
    try:
        make_distribution(config.distribution_kind, config.distribution_pos, config.distribution_neg,
                          config.distribution_half, config.distribution_pos_weight, config.distribution_noise)
    except RobustnessError as e:
        fail("distribution_kind", f"invalid distribution: {e}")
    if not config.classifiers:
        fail("classifiers", "at least one classifier is required")
    for spec in config.classifiers:
        try:
            parse_family(spec)
        except RobustnessError as e:
            fail("classifiers", str(e))
    if not config.n_schedule or config.n_schedule[0] < 1:
        fail("n_schedule", "needs at least one positive sample size")
    if any(b <= a for a, b in zip(config.n_schedule, config.n_schedule[1:])):
        fail("n_schedule", "must be strictly increasing")
    if any(not 0.0 < k < 1.0 for k in config.kappas):
        fail("kappas", "every kappa must lie in (0, 1)")
    if any(b <= a for a, b in zip(config.kappas, config.kappas[1:])):
        fail("kappas", "must be strictly increasing")
    if config.test_points < 1:
        fail("test_points", "must be >= 1")
    if config.trials < 1:
        fail("trials", "must be >= 1")
    if not config.grid_step > 0:
        fail("grid_step", "must be positive")
    if not 0 <= config.seed < 2 ** 64:
        fail("seed", "must be an unsigned 64-bit integer")
    if not 0.0 < config.condition_p < 1.0:
        fail("condition_p", "must lie in (0, 1)")
    if config.condition_grid < 2:
        fail("condition_grid", "must be >= 2")


def serialize_config(config: ExperimentConfig) -> str:
    """Inverse of :func:`parse_config`: every key, in schema order."""
    out = []
    for key, (field, kind) in SCHEMA.items():
        out.append(f"{key} = {_render(getattr(config, field), kind)}".rstrip())
    return "\n".join(out) + "\n"


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as e:
        raise ConfigError(f"cannot read config file '{path}': {e}") from e
    logger.info(f"loaded config from {path}")
    return parse_config(text)


def with_overrides(config: ExperimentConfig, **overrides) -> ExperimentConfig:
    """Apply CLI overrides (None values are ignored) and re-validate."""
    changes = {k: v for k, v in overrides.items() if v is not None}
    if not changes:
        return config
    updated = replace(config, **changes)
    validate_config(updated)
    return updated


EXPECTATION_FIELDS = {"": "float", "tolerance": "float", "stand_in": "bool"}


def parse_expectations(text: str) -> Dict[str, Expectation]:
    """
    Parse ``<name> = value``, ``<name>.tolerance`` and ``<name>.stand_in`` lines.

    Every name of :data:`GAP_MEASURES` must carry a value and a tolerance;
    ``stand_in`` defaults to true.

    Raises:
        ConfigError: unknown, duplicate, malformed or missing entries.
    """
    values: Dict[str, dict] = {name: {} for name in GAP_MEASURES}
    seen: Dict[str, int] = {}
    for number, key, raw in _entries(text):
        name, attr = key, ""
        if key not in GAP_MEASURES:
            name, _, attr = key.rpartition(".")
        if name not in GAP_MEASURES or attr not in EXPECTATION_FIELDS:
            raise ConfigError(f"unknown key '{key}'", line=number, field=key)
        if key in seen:
            raise ConfigError(f"duplicate key (first set on line {seen[key]})", line=number, field=key)
        kind = EXPECTATION_FIELDS[attr]
        try:
            values[name][attr or "value"] = _convert(raw, kind)
        except ValueError as e:
            raise ConfigError(f"cannot read '{raw}' as {kind}: {e}", line=number, field=key) from e
        seen[key] = number
    out = {}
    for name, fields in values.items():
        for attr in ("value", "tolerance"):
            if attr not in fields:
                key = name if attr == "value" else f"{name}.{attr}"
                raise ConfigError("missing required key", field=key)
        try:
            out[name] = Expectation(**fields)
        except RobustnessError as e:
            raise ConfigError(str(e), line=seen.get(f"{name}.tolerance"), field=f"{name}.tolerance") from e
    return out


def serialize_expectations(expectations: Dict[str, Expectation]) -> str:
    out = []
    for name in GAP_MEASURES:
        expected = expectations[name]
        out.append(f"{name} = {_render(expected.value, 'float')}")
        out.append(f"{name}.tolerance = {_render(expected.tolerance, 'float')}")
        out.append(f"{name}.stand_in = {_render(expected.stand_in, 'bool')}")
    return "\n".join(out) + "\n"


def load_expectations(path: str) -> Dict[str, Expectation]:
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as e:
        raise ConfigError(f"cannot read expectations file '{path}': {e}") from e
    expectations = parse_expectations(text)
    stand_ins = [name for name, e in expectations.items() if e.stand_in]
    if stand_ins:
        logger.warning(f"expectations not yet measured by a pilot run: {', '.join(stand_ins)}")
    return expectations
