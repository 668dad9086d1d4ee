"""Structured JSON logging for the ipsac package."""

import json
import logging
import sys
from datetime import datetime, timezone
from typing import TextIO

LOGGER_NAME = "ipsac"

# `extra=` keys copied into each JSON line when present
EXTRA_FIELDS = (
    "event_type",
    "scheme",
    "param",
    "value",
    "x_r_star",
    "frame",
    "avg_rate",
    "gap",
    "samples",
    "max_rel_error",
    "elapsed_ms",
    "path",
    "key",
    "local_maxima",
    "residual",
    "error",
)

_QUIET_LIBRARIES = {"matplotlib": logging.WARNING, "dotenv": logging.ERROR}


def _jsonable(value: object) -> object:
    """numpy scalars and other non-JSON values fall back to float or str."""
    try:
        return float(value)  # type: ignore[arg-type]
    except (TypeError, ValueError):
        return str(value)


class JSONFormatter(logging.Formatter):
    """One JSON object per record: time, level, logger, message, extras."""

    def format(self, record: logging.LogRecord) -> str:
        entry: dict[str, object] = {
            "timestamp": datetime.fromtimestamp(record.created, timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }
        entry.update(
            (name, getattr(record, name))
            for name in EXTRA_FIELDS
            if getattr(record, name, None) is not None
        )
        if record.exc_info:
            entry["exception"] = self.formatException(record.exc_info)
        return json.dumps(entry, default=_jsonable)


def setup_logging(level: str = "INFO", stream: TextIO | None = None) -> logging.Logger:
    """Attach the JSON handler to the package logger.

    Args:
        level: DEBUG, INFO, WARNING, ERROR or CRITICAL.
        stream: Destination, stderr by default so stdout stays free for
            result lines.

    Returns:
        The ``ipsac`` logger. Repeated calls only change the level.
    """
    package_logger = logging.getLogger(LOGGER_NAME)
    package_logger.setLevel(getattr(logging, level.upper(), logging.INFO))

    if not package_logger.handlers:
        handler = logging.StreamHandler(stream or sys.stderr)
        handler.setFormatter(JSONFormatter())
        package_logger.addHandler(handler)

    for name, floor in _QUIET_LIBRARIES.items():
        logging.getLogger(name).setLevel(floor)
    return package_logger
