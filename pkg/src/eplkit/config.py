from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Callable

from .paths import config_path
from .sequences import find_kind

CONFIG_VERSION = 1
BETA_SCHEDULES = ("constant", "log")


@dataclass(frozen=True)
class ExperimentConfig:
    version: int = CONFIG_VERSION
    dim: int = 2
    horizon: int = 100
    ridge: float = 1.0
    powers: tuple[float, ...] = (1.0,)
    seed: int = 0
    trials: int = 10000
    sequence: str = "random-unit"
    sequence_file: str | None = None
    out: str | None = None
    arms: int = 5
    noise: float = 0.1
    beta: float = 1.0
    beta_schedule: str = "constant"
    arm_vectors: tuple[tuple[float, ...], ...] | None = None
    theta: tuple[float, ...] | None = None
    verbose: bool = False


class _Invalid:
    pass


_INVALID = _Invalid()


def load_config(
    path: Path | None = None,
    *,
    base: ExperimentConfig | None = None,
) -> tuple[ExperimentConfig, str | None]:
    base = base or ExperimentConfig()
    path = path or config_path()
    if not path.exists():
        return base, None
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        return base, f"Failed to read config: {path} ({exc})"
    try:
        data = json.loads(raw)
    except json.JSONDecodeError:
        return base, f"Config file is not valid JSON: {path}"
    if not isinstance(data, dict):
        return base, f"Config file must be a JSON object: {path}"
    return parse_config_data(data, base=base, source=str(path))


def save_config(config: ExperimentConfig, path: Path | None = None) -> str | None:
    path = path or config_path()
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        return f"Failed to create config directory: {path.parent} ({exc})"
    payload = config_to_dict(config)
    try:
        path.write_text(
            json.dumps(payload, ensure_ascii=True, indent=2),
            encoding="utf-8",
        )
    except OSError as exc:
        return f"Failed to write config: {path} ({exc})"
    return None


def parse_config_data(
    data: dict[str, Any],
    *,
    base: ExperimentConfig | None = None,
    source: str = "config",
) -> tuple[ExperimentConfig, str | None]:
    base = base or ExperimentConfig()
    known = {field.name for field in fields(ExperimentConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        return base, f"Unknown config key(s) in {source}: {', '.join(unknown)}"
    updates: dict[str, Any] = {}
    for key, value in data.items():
        parsed = _PARSERS[key](value)
        if parsed is _INVALID:
            return base, f"Invalid value for '{key}' in {source}: {value!r}"
        updates[key] = parsed
    return replace(base, **updates), None


def config_to_dict(config: ExperimentConfig) -> dict[str, Any]:
    data: dict[str, Any] = {}
    for field in fields(ExperimentConfig):
        value = getattr(config, field.name)
        if value is None:
            continue
        if isinstance(value, tuple):
            value = [list(item) if isinstance(item, tuple) else item for item in value]
        data[field.name] = value
    return data


def merge_overrides(config: ExperimentConfig, overrides: dict[str, Any]) -> ExperimentConfig:
    present = {key: value for key, value in overrides.items() if value is not None}
    return replace(config, **present)


def validate_config(config: ExperimentConfig, command: str) -> list[str]:
    errors: list[str] = []
    if config.dim < 1:
        errors.append(f"dim must be at least 1, got {config.dim}")
    if config.horizon < 1:
        errors.append(f"horizon must be at least 1, got {config.horizon}")
    if not (math.isfinite(config.ridge) and config.ridge > 0):
        errors.append(f"ridge must be positive and finite, got {config.ridge}")
    if not config.powers:
        errors.append("at least one power is required")
    for power in config.powers:
        if not (math.isfinite(power) and power > 0):
            errors.append(f"power must be positive and finite, got {power}")
    if config.seed < 0:
        errors.append(f"seed must be non-negative, got {config.seed}")
    for name in ("noise", "beta"):
        value = getattr(config, name)
        if not math.isfinite(value):
            errors.append(f"{name} must be finite, got {value}")
    if command == "verify" and config.trials < 1:
        errors.append(f"trials must be at least 1, got {config.trials}")
    if command in {"simulate", "bandit"} and len(config.powers) != 1:
        errors.append(f"{command} takes exactly one power, got {len(config.powers)}")
    if command == "simulate":
        kind = find_kind(config.sequence)
        if kind is None:
            errors.append(f"Unknown sequence kind: {config.sequence}")
        elif kind.value == "from-file" and not config.sequence_file:
            errors.append("from-file sequences need a sequence_file")
    if command == "bandit":
        if config.ridge < 1:
            errors.append(f"bandit needs ridge >= 1 for the potential bound, got {config.ridge}")
        if config.noise < 0:
            errors.append(f"noise must be non-negative, got {config.noise}")
        if config.beta < 0:
            errors.append(f"beta must be non-negative, got {config.beta}")
        if config.beta_schedule not in BETA_SCHEDULES:
            errors.append(f"beta_schedule must be one of {', '.join(BETA_SCHEDULES)}")
        if config.arm_vectors is None and config.arms < 1:
            errors.append(f"arms must be at least 1, got {config.arms}")
        if (config.arm_vectors is None) != (config.theta is None):
            errors.append("arm_vectors and theta must be given together")
    return errors


def _as_int(value: Any) -> int | _Invalid:
    if isinstance(value, bool):
        return _INVALID
    if isinstance(value, int):
        return value
    if isinstance(value, float) and value.is_integer():
        return int(value)
    return _INVALID


def _as_float(value: Any) -> float | _Invalid:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        return _INVALID
    number = float(value)
    return number if math.isfinite(number) else _INVALID


def _as_str(value: Any) -> str | _Invalid:
    if isinstance(value, str) and value.strip():
        return value.strip()
    return _INVALID


def _as_optional_str(value: Any) -> str | None | _Invalid:
    if value is None:
        return None
    return _as_str(value)


def _as_bool(value: Any) -> bool | _Invalid:
    return value if isinstance(value, bool) else _INVALID


def _as_float_tuple(value: Any) -> tuple[float, ...] | _Invalid:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        value = [value]
    if not isinstance(value, list):
        return _INVALID
    items = [_as_float(item) for item in value]
    if any(isinstance(item, _Invalid) for item in items):
        return _INVALID
    return tuple(float(item) for item in items if not isinstance(item, _Invalid))


def _as_optional_float_tuple(value: Any) -> tuple[float, ...] | None | _Invalid:
    if value is None:
        return None
    return _as_float_tuple(value)


def _as_matrix(value: Any) -> tuple[tuple[float, ...], ...] | None | _Invalid:
    if value is None:
        return None
    if not isinstance(value, list) or not value:
        return _INVALID
    rows: list[tuple[float, ...]] = []
    for row in value:
        parsed = _as_float_tuple(row)
        if isinstance(parsed, _Invalid):
            return _INVALID
        rows.append(parsed)
    if len({len(row) for row in rows}) != 1:
        return _INVALID
    return tuple(rows)


_PARSERS: dict[str, Callable[[Any], Any]] = {
    "version": _as_int,
    "dim": _as_int,
    "horizon": _as_int,
    "ridge": _as_float,
    "powers": _as_float_tuple,
    "seed": _as_int,
    "trials": _as_int,
    "sequence": _as_str,
    "sequence_file": _as_optional_str,
    "out": _as_optional_str,
    "arms": _as_int,
    "noise": _as_float,
    "beta": _as_float,
    "beta_schedule": _as_str,
    "arm_vectors": _as_matrix,
    "theta": _as_optional_float_tuple,
    "verbose": _as_bool,
}
