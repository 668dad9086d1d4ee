"""Scenario ingestion, unit conversion and validation."""

import io
import logging
import math
from pathlib import Path

from dotenv.parser import parse_stream
from pydantic import ValidationError

from ipsac.errors import ConfigError, ErrorCode
from ipsac.schemas import ScenarioConfig

logger = logging.getLogger("ipsac.scenario")

# Fields that may also be given in dB as `<field>_db`
DB_FIELDS = ("P_max", "beta0", "sigma2", "gamma_thr")

# Absolute slack on the beam-gain feasibility inequality
FEASIBILITY_SLACK = 1e-12

_BOOL_TRUE = {"1", "true", "yes", "on"}
_BOOL_FALSE = {"0", "false", "no", "off"}


def to_linear(db: float) -> float:
    """Convert a dB value to linear scale."""
    return 10.0 ** (db / 10.0)


def to_db(linear: float) -> float:
    """Convert a linear value to dB."""
    return 10.0 * math.log10(linear)


def _parse_bindings(text: str) -> dict[str, str]:
    """Read `key = value` lines, rejecting malformed and duplicate entries."""
    raw: dict[str, str] = {}
    for binding in parse_stream(io.StringIO(text)):
        line = binding.original.line
        if binding.error:
            raise ConfigError(
                ErrorCode.CONFIG_PARSE,
                f"line {line}: cannot parse {binding.original.string.strip()!r}",
                line=line,
            )
        if binding.key is None:
            continue
        if binding.value is None or binding.value.strip() == "":
            raise ConfigError(
                ErrorCode.CONFIG_PARSE,
                f"line {line}: key {binding.key!r} has no value",
                line=line,
                key=binding.key,
            )
        if binding.key in raw:
            raise ConfigError(
                ErrorCode.CONFIG_PARSE,
                f"line {line}: duplicate key {binding.key!r}",
                line=line,
                key=binding.key,
            )
        raw[binding.key] = binding.value.strip()
    return raw


def _coerce(key: str, value: str) -> float | bool:
    if key == "unit_gain_rate":
        lowered = value.lower()
        if lowered in _BOOL_TRUE:
            return True
        if lowered in _BOOL_FALSE:
            return False
        raise ConfigError(
            ErrorCode.CONFIG_VALIDATION,
            f"{key}: expected true/false, got {value!r}",
            key=key,
        )
    try:
        return float(value)
    except ValueError:
        raise ConfigError(
            ErrorCode.CONFIG_VALIDATION,
            f"{key}: expected a number, got {value!r}",
            key=key,
        ) from None


def build_config(values: dict[str, float | bool]) -> ScenarioConfig:
    """Validate a mapping of linear-unit fields into a ScenarioConfig.

    Raises:
        ConfigError: If a value violates a scenario invariant; the offending
            key is named in the detail and in `context["key"]`.
    """
    data = dict(values)
    if "M" in data:
        m = data["M"]
        if isinstance(m, float) and m.is_integer():
            data["M"] = int(m)
    try:
        return ScenarioConfig(**data)
    except ValidationError as exc:
        first = exc.errors()[0]
        key = ".".join(str(part) for part in first["loc"]) or "config"
        raise ConfigError(
            ErrorCode.CONFIG_VALIDATION,
            f"{key}: {first['msg']}",
            key=key,
        ) from None


def load_config(text: str) -> ScenarioConfig:
    """Parse a flat `key = value` scenario document.

    Keys ending in `_db` are converted with linear = 10^(value/10). Keys
    that are absent take the baseline defaults. Key order is irrelevant.

    Raises:
        ConfigError: CONFIG_PARSE for malformed or duplicate lines,
            CONFIG_VALIDATION for unknown keys or violated invariants.
    """
    raw = _parse_bindings(text)
    known = set(ScenarioConfig.model_fields)
    values: dict[str, float | bool] = {}

    for key in sorted(raw):
        if key.endswith("_db") and key[: -len("_db")] in DB_FIELDS:
            field = key[: -len("_db")]
            if field in raw:
                raise ConfigError(
                    ErrorCode.CONFIG_VALIDATION,
                    f"{key}: both {field} and {key} given",
                    key=key,
                )
            values[field] = to_linear(float(_coerce(key, raw[key])))
        elif key in known:
            values[key] = _coerce(key, raw[key])
        else:
            raise ConfigError(
                ErrorCode.CONFIG_VALIDATION,
                f"{key}: unknown key",
                key=key,
            )

    cfg = build_config(values)
    logger.debug(
        "Scenario loaded",
        extra={"event_type": "config_loaded", "key": ",".join(sorted(values))},
    )
    return cfg


def load_config_file(path: str | Path) -> ScenarioConfig:
    """Read and parse a UTF-8 scenario file."""
    return load_config(Path(path).read_text(encoding="utf-8"))


def frame_count(cfg: ScenarioConfig) -> int:
    """Number of ISAC frames L = T / T_f."""
    return cfg.frames


def target_distance_sq(x: float, cfg: ScenarioConfig) -> float:
    """Squared UAV-target distance (D - x)^2 + H^2."""
    return (cfg.D - x) ** 2 + cfg.H**2


def is_sensing_feasible(x: float, cfg: ScenarioConfig) -> bool:
    """Whether full power toward the target meets the beam-gain threshold."""
    return cfg.M * cfg.P_max / target_distance_sq(x, cfg) >= (
        cfg.gamma_thr - FEASIBILITY_SLACK
    )


def feasible_interval(cfg: ScenarioConfig) -> tuple[float, float] | None:
    """Sensing-feasible positions within [0, D] as a closed interval.

    The feasible set is the disc (D - x)^2 + H^2 <= M * P_max / gamma_thr,
    so its intersection with [0, D] is [max(D - r, 0), D] or empty.
    """
    radius_sq = cfg.M * cfg.P_max / cfg.gamma_thr - cfg.H**2
    if radius_sq < 0:
        if is_sensing_feasible(cfg.D, cfg):
            return cfg.D, cfg.D
        return None
    return max(cfg.D - math.sqrt(radius_sq), 0.0), cfg.D
