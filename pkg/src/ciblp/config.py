"""Strict experiment-config parsing (YAML key-value file)."""

from pathlib import Path

import yaml

from .exceptions import ConfigError
from .simulate import DEFAULT_BLOCK_SWEEP, ExperimentConfig

REQUIRED_KEYS = ("K", "N_T", "M", "N", "snr_db", "n_blocks", "seed", "schemes")
OPTIONAL_KEYS = {"p0": 1.0, "n_sweep": list(DEFAULT_BLOCK_SWEEP)}


def parse_config(path):
    """Parse and validate an experiment config file.

    Unknown keys are errors; ``p0`` defaults to 1 and ``n_sweep`` to
    ``(4, 8, 15, 32, 64)``.  Syntax errors surface with the YAML parser's
    line/column information.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must be a mapping of keys to values")
    return config_from_dict(raw)


def config_from_dict(raw):
    """Build an :class:`ExperimentConfig` from a parsed mapping (strict)."""
    allowed = set(REQUIRED_KEYS) | set(OPTIONAL_KEYS)
    unknown = sorted(set(raw) - allowed)
    if unknown:
        raise ConfigError(
            f"unknown config keys: {', '.join(unknown)} "
            f"(allowed: {', '.join(sorted(allowed))})"
        )
    missing = [k for k in REQUIRED_KEYS if k not in raw]
    if missing:
        raise ConfigError(f"missing config keys: {', '.join(missing)}")

    values = dict(OPTIONAL_KEYS)
    values.update(raw)
    try:
        snr_db = tuple(float(s) for s in _as_list(values["snr_db"], "snr_db"))
        schemes = tuple(str(s) for s in _as_list(values["schemes"], "schemes"))
        n_sweep = tuple(int(n) for n in _as_list(values["n_sweep"], "n_sweep"))
        return ExperimentConfig(
            K=_as_int(values["K"], "K"),
            N_T=_as_int(values["N_T"], "N_T"),
            M=_as_int(values["M"], "M"),
            N=_as_int(values["N"], "N"),
            snr_db=snr_db,
            n_blocks=_as_int(values["n_blocks"], "n_blocks"),
            seed=_as_int(values["seed"], "seed"),
            schemes=schemes,
            p0=float(values["p0"]),
            n_sweep=n_sweep,
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config value: {exc}") from exc


def config_to_dict(config: ExperimentConfig):
    """Round-trippable plain mapping of a config (for the run manifest)."""
    return {
        "K": config.K,
        "N_T": config.N_T,
        "M": config.M,
        "N": config.N,
        "snr_db": list(config.snr_db),
        "n_blocks": config.n_blocks,
        "seed": config.seed,
        "schemes": list(config.schemes),
        "p0": config.p0,
        "n_sweep": list(config.n_sweep),
    }


def _as_int(value, name):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    return value


def _as_list(value, name):
    if not isinstance(value, (list, tuple)) or not value:
        raise ConfigError(f"{name} must be a non-empty list, got {value!r}")
    return value
