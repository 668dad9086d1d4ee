"""Achievable-rate functions of UAV position.

f(x) is the rate when only transmitting data (MRT toward the user), g(x)
the rate during sensing with the optimal constrained precoder.
"""

import math
from dataclasses import dataclass
from enum import Enum

from ipsac.errors import DerivativeError, ErrorCode, InfeasibleError
from ipsac.numerics import adaptive_simpson
from ipsac.precoder import mrt_target_snr, optimal_snr, sensing_branch
from ipsac.scenario import feasible_interval, is_sensing_feasible
from ipsac.schemas import ScenarioConfig

DERIVATIVE_STEP = 1e-3  # m
KINK_TOLERANCE = 1e-6
QUAD_TOL = 1e-9
QUAD_MAX_DEPTH = 40


class RateKind(str, Enum):
    COMM_ONLY = "COMM_ONLY"
    SENSING = "SENSING"


def rate_comm(x: float, cfg: ScenarioConfig) -> float:
    """f(x) = log2(1 + gamma0 * M * P_max / (x^2 + H^2)).

    With `cfg.unit_gain_rate` the array gain M * P_max is dropped.
    """
    gain = 1.0 if cfg.unit_gain_rate else cfg.M * cfg.P_max
    return math.log2(1.0 + cfg.gamma0 * gain / (x * x + cfg.H * cfg.H))


def rate_sense(x: float, cfg: ScenarioConfig) -> float:
    """g(x) = log2(1 + optimal sensing-window SNR).

    Raises:
        InfeasibleError: INFEASIBLE_SENSING outside the feasible set.
    """
    return math.log2(1.0 + optimal_snr(x, cfg))


def rate_mrt_target(x: float, cfg: ScenarioConfig) -> float:
    """User rate while MRT is steered at the target."""
    return math.log2(1.0 + mrt_target_snr(x, cfg))


@dataclass(frozen=True)
class RateFunction:
    """A rate function of position together with its domain."""

    kind: RateKind
    cfg: ScenarioConfig

    def defined_at(self, x: float) -> bool:
        return self.kind is RateKind.COMM_ONLY or is_sensing_feasible(x, self.cfg)

    def __call__(self, x: float) -> float:
        if self.kind is RateKind.COMM_ONLY:
            return rate_comm(x, self.cfg)
        return rate_sense(x, self.cfg)


def rate_sense_derivative(x: float, cfg: ScenarioConfig) -> float:
    """g'(x) by central difference with a 1e-3 m step.

    Raises:
        InfeasibleError: INFEASIBLE_SENSING unless x +/- step is feasible.
        DerivativeError: NON_DIFFERENTIABLE_POINT when x sits within two
            steps of a branch switch and the one-sided slopes disagree.
    """
    h = DERIVATIVE_STEP
    if not (is_sensing_feasible(x - h, cfg) and is_sensing_feasible(x + h, cfg)):
        raise InfeasibleError(
            ErrorCode.INFEASIBLE_SENSING,
            f"x = {x:.6g} m is not interior to the feasible set by {h} m",
            x=x,
        )

    g_left, g_mid, g_right = (rate_sense(p, cfg) for p in (x - h, x, x + h))
    spread = 2 * h
    if not (is_sensing_feasible(x - spread, cfg) and is_sensing_feasible(x + spread, cfg)):
        spread = h
    branches = {sensing_branch(p, cfg) for p in (x - spread, x, x + spread)}

    if len(branches) > 1:
        forward = (g_right - g_mid) / h
        backward = (g_mid - g_left) / h
        if abs(forward - backward) > KINK_TOLERANCE:
            raise DerivativeError(
                ErrorCode.NON_DIFFERENTIABLE_POINT,
                f"x = {x:.6g} m: one-sided slopes {backward:.9g} and {forward:.9g}",
                x=x,
                backward=backward,
                forward=forward,
            )
    return (g_right - g_left) / (2 * h)


def integral_rate_over_path(x_a: float, x_b: float, cfg: ScenarioConfig) -> float:
    """Integral of f over [min(x_a, x_b), max(x_a, x_b)] (bits/s/Hz * m)."""
    return adaptive_simpson(
        lambda x: rate_comm(x, cfg), x_a, x_b, tol=QUAD_TOL, max_depth=QUAD_MAX_DEPTH
    )


def frame_end_position(x_r: float, cfg: ScenarioConfig) -> float:
    """x'_r = max(x_r - (T_f - tau0) * V_max, 0)."""
    return max(x_r - cfg.frame_reach, 0.0)


def frame_rate_from_parts(
    x_r: float, g_value: float, path_integral: float, cfg: ScenarioConfig
) -> float:
    """Frame sum-rate from a precomputed g(x_r) and path integral of f."""
    x_end = frame_end_position(x_r, cfg)
    if cfg.V_max == 0:
        return cfg.tau0 * g_value + cfg.free_time * rate_comm(x_r, cfg)
    flight_time = (x_r - x_end) / cfg.V_max
    hover_time = max(0.0, cfg.free_time - flight_time)
    return (
        cfg.tau0 * g_value
        + path_integral / cfg.V_max
        + hover_time * rate_comm(0.0, cfg)
    )


def frame_sum_rate(x_r: float, cfg: ScenarioConfig) -> float:
    """Rate integral of one hover-fly-hover frame sensing at x_r.

    C = tau0 g(x_r) + (1/V_max) * int_{x'_r}^{x_r} f dx
        + (residual hover time over the user) * f(0).

    Raises:
        InfeasibleError: INFEASIBLE_SENSING if x_r is not feasible or lies
            outside [0, D].
    """
    if not 0.0 <= x_r <= cfg.D:
        raise InfeasibleError(
            ErrorCode.INFEASIBLE_SENSING,
            f"x_r = {x_r:.6g} m is outside [0, {cfg.D:.6g}]",
            x=x_r,
        )
    x_end = frame_end_position(x_r, cfg)
    return frame_rate_from_parts(
        x_r, rate_sense(x_r, cfg), integral_rate_over_path(x_end, x_r, cfg), cfg
    )


def sensing_domain(cfg: ScenarioConfig) -> tuple[float, float]:
    """Feasible sensing interval within [0, D].

    Raises:
        InfeasibleError: INFEASIBLE_SCENARIO if the interval is empty.
    """
    interval = feasible_interval(cfg)
    if interval is None:
        raise InfeasibleError(
            ErrorCode.INFEASIBLE_SCENARIO,
            "no position in [0, D] meets the beam-gain threshold at full power",
        )
    return interval
