"""Fixed-oscillation baseline trajectories.

Both baselines sense at the start of every frame wherever the UAV happens
to be, fly toward the user until mid-frame and back toward the target until
the frame ends. They differ only in the precoder of the sensing window.
The final-location constraint is not enforced; a missed x_F is recorded as
the ``ENDPOINT_IGNORED`` flag.
"""

import logging

from ipsac.errors import ErrorCode, InfeasibleError
from ipsac.scenario import is_sensing_feasible
from ipsac.schemas import (
    BenchmarkScheme,
    PrecoderPolicy,
    ScenarioConfig,
    Segment,
    SegmentMode,
    Trajectory,
)

logger = logging.getLogger("ipsac.benchmarks")

ENDPOINT_IGNORED = "ENDPOINT_IGNORED"

_SENSING_POLICY = {
    BenchmarkScheme.TIME_DIVISION: PrecoderPolicy.MRT_TARGET,
    BenchmarkScheme.PRECODER_ONLY: PrecoderPolicy.OPTIMAL,
}
_NEGLIGIBLE = 1e-12


def _move_toward(
    segments: list[Segment], x: float, goal: float, t_a: float, t_b: float, speed: float
) -> float:
    """Append motion toward `goal` over [t_a, t_b], hovering once it is reached."""
    if t_b - t_a <= _NEGLIGIBLE:
        return x
    distance = abs(goal - x)
    if speed == 0 or distance <= _NEGLIGIBLE:
        segments.append(
            Segment(t_start=t_a, t_end=t_b, x_start=x, x_end=x, mode=SegmentMode.HOVER)
        )
        return x

    direction = 1.0 if goal > x else -1.0
    arrival = t_a + distance / speed
    if t_b - arrival <= _NEGLIGIBLE:
        x_end = x + direction * speed * (t_b - t_a)
        segments.append(
            Segment(t_start=t_a, t_end=t_b, x_start=x, x_end=x_end, mode=SegmentMode.FLY)
        )
        return x_end

    segments.append(
        Segment(t_start=t_a, t_end=arrival, x_start=x, x_end=goal, mode=SegmentMode.FLY)
    )
    segments.append(
        Segment(t_start=arrival, t_end=t_b, x_start=goal, x_end=goal, mode=SegmentMode.HOVER)
    )
    return goal


def plan_benchmark(cfg: ScenarioConfig, scheme: BenchmarkScheme) -> Trajectory:
    """Baseline trajectory for `scheme`.

    Raises:
        InfeasibleError: INVALID_ENDPOINTS if x_I lies outside [0, D];
            INFEASIBLE_SENSING if the UAV is at an infeasible sensing
            location when a frame starts.
    """
    if not 0.0 <= cfg.x_I <= cfg.D:
        raise InfeasibleError(
            ErrorCode.INVALID_ENDPOINTS,
            f"x_I = {cfg.x_I:.6g} m is outside [0, D = {cfg.D:.6g}]",
            key="x_I",
        )

    policy = _SENSING_POLICY[scheme]
    segments: list[Segment] = []
    x = cfg.x_I
    for l in range(cfg.frames):
        t0 = l * cfg.T_f
        if not is_sensing_feasible(x, cfg):
            raise InfeasibleError(
                ErrorCode.INFEASIBLE_SENSING,
                f"{scheme.value}: frame {l + 1} starts at x = {x:.6g} m, "
                "where the beam-gain threshold cannot be met",
                frame=l + 1,
            )
        segments.append(
            Segment(
                t_start=t0,
                t_end=t0 + cfg.tau0,
                x_start=x,
                x_end=x,
                mode=SegmentMode.SENSE,
                precoder_policy=policy,
            )
        )
        midpoint = max(t0 + cfg.T_f / 2, t0 + cfg.tau0)
        x = _move_toward(segments, x, 0.0, t0 + cfg.tau0, midpoint, cfg.V_max)
        x = _move_toward(segments, x, cfg.D, midpoint, t0 + cfg.T_f, cfg.V_max)

    flags: tuple[str, ...] = ()
    if abs(x - cfg.x_F) > 1e-6:
        flags = (ENDPOINT_IGNORED,)
        logger.debug(
            "Benchmark ends away from x_F",
            extra={"event_type": "endpoint_ignored", "scheme": scheme.value, "value": x},
        )
    return Trajectory(segments=tuple(segments), cfg=cfg, flags=flags)
