"""Error codes and the exception hierarchy shared by every module."""

from enum import Enum


class ErrorCode(str, Enum):
    """Machine-readable failure categories."""

    CONFIG_PARSE = "CONFIG_PARSE"
    CONFIG_VALIDATION = "CONFIG_VALIDATION"
    INFEASIBLE_SENSING = "INFEASIBLE_SENSING"
    INFEASIBLE_SCENARIO = "INFEASIBLE_SCENARIO"
    INVALID_ENDPOINTS = "INVALID_ENDPOINTS"
    NON_DIFFERENTIABLE_POINT = "NON_DIFFERENTIABLE_POINT"
    INVARIANT_VIOLATION = "INVARIANT_VIOLATION"
    SENSING_CONSTRAINT_VIOLATION = "SENSING_CONSTRAINT_VIOLATION"
    ZERO_CHANNEL = "ZERO_CHANNEL"
    EMPTY_ORACLE_GRID = "EMPTY_ORACLE_GRID"


class IpsacError(Exception):
    """Base error carrying a code, a detail message and optional context.

    Attributes:
        code: The failure category.
        detail: Human-readable explanation.
        context: Extra structured fields (offending key, location, ...).
    """

    exit_code = 1

    def __init__(self, code: ErrorCode, detail: str, **context: object) -> None:
        super().__init__(f"{code.value}: {detail}")
        self.code = code
        self.detail = detail
        self.context = context


class ConfigError(IpsacError):
    """Scenario file could not be parsed or failed validation."""


class InfeasibleError(IpsacError):
    """No sensing-feasible solution exists for the requested scenario."""

    exit_code = 2


class PrecoderError(IpsacError):
    """Invalid precoder input or an empty oracle search grid."""


class DerivativeError(IpsacError):
    """Finite difference requested at a point where g is not differentiable."""


class TrajectoryError(IpsacError):
    """A trajectory breaks a structural or sensing invariant."""

    def __init__(
        self,
        code: ErrorCode,
        detail: str,
        segment_index: int | None = None,
        **context: object,
    ) -> None:
        super().__init__(code, detail, segment_index=segment_index, **context)
        self.segment_index = segment_index
