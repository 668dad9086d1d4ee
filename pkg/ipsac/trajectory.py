"""Frame trajectories, multi-frame planning and trajectory evaluation.

A single frame without location constraints is hover-fly-hover: sense at
x_r for tau0, fly toward the user at full speed, hover over the user if
time remains. Mirroring that frame in time on every other frame gives an
optimal unconstrained mission. The location-constrained planner reuses the
same pattern between an approach from x_I and a return to x_F.
"""

import bisect
import csv
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import NamedTuple

import numpy as np

from ipsac.errors import (
    DerivativeError,
    ErrorCode,
    InfeasibleError,
    TrajectoryError,
)
from ipsac.numerics import CumulativeIntegral, golden_section_max
from ipsac.precoder import Branch, sensing_branch
from ipsac.rate import (
    RateFunction,
    RateKind,
    frame_end_position,
    frame_rate_from_parts,
    frame_sum_rate,
    integral_rate_over_path,
    rate_comm,
    rate_mrt_target,
    rate_sense,
    rate_sense_derivative,
    sensing_domain,
)
from ipsac.scenario import is_sensing_feasible
from ipsac.schemas import (
    PrecoderPolicy,
    RatePerformance,
    ScenarioConfig,
    Segment,
    SegmentMode,
    Trajectory,
    Violation,
    ViolationKind,
)

logger = logging.getLogger("ipsac.trajectory")

SEARCH_STEP = 0.05  # m, grid of every 1-D location search
REFINE_TOL = 1e-4  # m, golden-section refinement
TIME_TOL = 1e-9  # s
POSITION_TOL = 1e-6  # m
SPEED_SLACK = 1e-9  # m
_NEGLIGIBLE = 1e-12

CSV_COLUMNS = ("t_start", "t_end", "x_start", "x_end", "mode", "policy")


# ---------------------------------------------------------------------------
# Unconstrained frame
# ---------------------------------------------------------------------------
class UnconstrainedSolution(NamedTuple):
    """Best hover-fly-hover frame and its diagnostics."""

    x_r_star: float
    frame: Trajectory
    frame_rate: float
    stationarity_residual: float | None
    interior: bool


def hover_fly_frame(x_r: float, cfg: ScenarioConfig) -> Trajectory:
    """Frame over [0, T_f]: sense at x_r, fly toward the user, hover there."""
    segments = [
        Segment(
            t_start=0.0,
            t_end=cfg.tau0,
            x_start=x_r,
            x_end=x_r,
            mode=SegmentMode.SENSE,
            precoder_policy=PrecoderPolicy.OPTIMAL,
        )
    ]
    x_end = frame_end_position(x_r, cfg)
    t = cfg.tau0
    if x_r > x_end:
        t_fly = min(t + (x_r - x_end) / cfg.V_max, cfg.T_f)
        if cfg.T_f - t_fly <= _NEGLIGIBLE:
            t_fly = cfg.T_f
        segments.append(
            Segment(t_start=t, t_end=t_fly, x_start=x_r, x_end=x_end, mode=SegmentMode.FLY)
        )
        t = t_fly
    if cfg.T_f - t > _NEGLIGIBLE:
        segments.append(
            Segment(
                t_start=t, t_end=cfg.T_f, x_start=x_end, x_end=x_end, mode=SegmentMode.HOVER
            )
        )
    return Trajectory(segments=tuple(segments), cfg=cfg)


def _scan_grid(lo: float, hi: float) -> np.ndarray:
    count = int(math.floor((hi - lo) / SEARCH_STEP))
    grid = lo + SEARCH_STEP * np.arange(count + 1)
    if hi - grid[-1] > _NEGLIGIBLE:
        grid = np.append(grid, hi)
    return grid


def _local_maxima(values: np.ndarray, exclude: int) -> list[int]:
    peaks = []
    for i in range(len(values)):
        left = values[i - 1] if i > 0 else -math.inf
        right = values[i + 1] if i + 1 < len(values) else -math.inf
        if i != exclude and values[i] > left and values[i] > right:
            peaks.append(i)
    return peaks


@lru_cache(maxsize=256)
def solve_unconstrained(cfg: ScenarioConfig) -> UnconstrainedSolution:
    """Optimal sensing location x_r* of a single frame without endpoints.

    Scans the feasible part of [0, D] on a 0.05 m grid, refines the best
    point by golden-section search to 1e-4 m and reports the stationarity
    residual tau0 V g'(x*) - (f(x'*) - f(x*)).

    Raises:
        InfeasibleError: INFEASIBLE_SCENARIO if no location in [0, D] is
            sensing-feasible.
    """
    lo, hi = sensing_domain(cfg)
    grid = _scan_grid(lo, hi)
    f = RateFunction(RateKind.COMM_ONLY, cfg)
    table = CumulativeIntegral(f, max(lo - cfg.frame_reach, 0.0), hi, SEARCH_STEP)

    values = np.array(
        [
            frame_rate_from_parts(
                float(x),
                rate_sense(float(x), cfg),
                table.between(frame_end_position(float(x), cfg), float(x)),
                cfg,
            )
            for x in grid
        ]
    )
    best = int(np.argmax(values))

    secondary = _local_maxima(values, best)
    if secondary:
        logger.info(
            "Secondary local maxima in sensing-location scan",
            extra={
                "event_type": "secondary_local_maxima",
                "local_maxima": [round(float(grid[i]), 4) for i in secondary],
            },
        )

    x_best = float(grid[best])
    rate_best = frame_sum_rate(x_best, cfg)
    bracket_lo = float(grid[max(best - 1, 0)])
    bracket_hi = float(grid[min(best + 1, len(grid) - 1)])
    if bracket_hi > bracket_lo:
        x_refined, rate_refined = golden_section_max(
            lambda x: frame_sum_rate(x, cfg), bracket_lo, bracket_hi, tol=REFINE_TOL
        )
        if rate_refined > rate_best:
            x_best, rate_best = x_refined, rate_refined

    interior = lo + 2 * SEARCH_STEP < x_best < hi - 2 * SEARCH_STEP
    residual = _stationarity_residual(x_best, cfg)
    logger.debug(
        "Unconstrained frame solved",
        extra={
            "event_type": "unconstrained_solved",
            "x_r_star": x_best,
            "residual": residual,
        },
    )
    return UnconstrainedSolution(
        x_r_star=x_best,
        frame=hover_fly_frame(x_best, cfg),
        frame_rate=rate_best,
        stationarity_residual=residual,
        interior=interior,
    )


def _stationarity_residual(x_r: float, cfg: ScenarioConfig) -> float | None:
    try:
        slope = rate_sense_derivative(x_r, cfg)
    except (InfeasibleError, DerivativeError):
        return None
    x_end = frame_end_position(x_r, cfg)
    return cfg.tau0 * cfg.V_max * slope - (rate_comm(x_end, cfg) - rate_comm(x_r, cfg))


def expand_symmetric(frame: Trajectory, cfg: ScenarioConfig) -> Trajectory:
    """Repeat a [0, T_f] frame over the mission, time-reversing even frames.

    The result satisfies x(t1) = x(t2) whenever t1 + t2 is an even multiple
    of T_f, and sensing alternates between frame start and frame end.
    """
    origin = frame.t_start
    segments: list[Segment] = []
    for l in range(cfg.frames):
        base = l * cfg.T_f
        if l % 2 == 0:
            segments.extend(
                seg.model_copy(
                    update={
                        "t_start": base + (seg.t_start - origin),
                        "t_end": base + (seg.t_end - origin),
                    }
                )
                for seg in frame.segments
            )
        else:
            segments.extend(
                seg.model_copy(
                    update={
                        "t_start": base + (cfg.T_f - (seg.t_end - origin)),
                        "t_end": base + (cfg.T_f - (seg.t_start - origin)),
                        "x_start": seg.x_end,
                        "x_end": seg.x_start,
                    }
                )
                for seg in reversed(frame.segments)
            )
    return Trajectory(segments=tuple(segments), cfg=cfg, flags=frame.flags)


# ---------------------------------------------------------------------------
# Location-constrained planning
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class _Leg:
    """Straight motion (or hover) in movement time, which excludes sensing."""

    x_start: float
    x_end: float
    duration: float


def _route(a: float, b: float, anchor: float, duration: float, speed: float) -> list[_Leg]:
    """Path from a to b taking `duration` that stays as close to `anchor` as possible.

    Flies toward the anchor at full speed, hovers at the closest reachable
    point and flies on to b, arriving exactly at the end.
    """
    if duration <= _NEGLIGIBLE:
        return []
    if speed == 0:
        return [_Leg(a, a, duration)]
    if anchor <= min(a, b):
        turn = max((a + b - speed * duration) / 2, anchor)
    elif anchor >= max(a, b):
        turn = min((a + b + speed * duration) / 2, anchor)
    else:
        turn = anchor
    out_time = abs(a - turn) / speed
    back_time = abs(turn - b) / speed
    legs = [
        _Leg(a, turn, out_time),
        _Leg(turn, turn, max(duration - out_time - back_time, 0.0)),
        _Leg(turn, b, back_time),
    ]
    return [leg for leg in legs if leg.duration > _NEGLIGIBLE]


class _MotionTrace:
    """Piecewise-linear position as a function of movement time."""

    def __init__(self, x_start: float, legs: list[_Leg]) -> None:
        self.x_start = x_start
        self.legs = legs
        self.starts: list[float] = []
        elapsed = 0.0
        for leg in legs:
            self.starts.append(elapsed)
            elapsed += leg.duration
        self.total = elapsed

    def position(self, m: float) -> float:
        if not self.legs:
            return self.x_start
        i = max(bisect.bisect_right(self.starts, m) - 1, 0)
        leg = self.legs[i]
        fraction = min(max((m - self.starts[i]) / leg.duration, 0.0), 1.0)
        return leg.x_start + (leg.x_end - leg.x_start) * fraction

    def boundaries(self, m0: float, m1: float) -> list[float]:
        ends = [start + leg.duration for start, leg in zip(self.starts, self.legs)]
        return [m for m in (*self.starts, *ends) if m0 < m < m1]

    def pieces(self, m0: float, m1: float) -> list[tuple[float, float]]:
        """Sub-intervals of [m0, m1] on which position is linear."""
        cuts = sorted({m0, m1, *self.boundaries(m0, m1)})
        return [(p, q) for p, q in zip(cuts, cuts[1:]) if q - p > _NEGLIGIBLE] or [(m0, m1)]


def _best_pause(trace: _MotionTrace, w0: float, w1: float, cfg: ScenarioConfig) -> float | None:
    """Movement time in [w0, w1] whose position maximizes g, or None if none is feasible."""

    def score(m: float) -> float:
        x = trace.position(m)
        return rate_sense(x, cfg) if is_sensing_feasible(x, cfg) else -math.inf

    best_m, best_value, best_piece = None, -math.inf, None
    for p, q in trace.pieces(w0, w1):
        travel = abs(trace.position(q) - trace.position(p))
        count = max(int(math.ceil(travel / SEARCH_STEP)), 1) if travel > _NEGLIGIBLE else 0
        samples = [p] if count == 0 else [p + (q - p) * i / count for i in range(count + 1)]
        for m in samples:
            value = score(m)
            if value > best_value:
                best_m, best_value, best_piece = m, value, (p, q, count)

    if best_m is None:
        return None

    p, q, count = best_piece
    if count > 0:
        step = (q - p) / count
        lo, hi = max(best_m - step, p), min(best_m + step, q)
        m_tol = REFINE_TOL * (q - p) / abs(trace.position(q) - trace.position(p))
        m_refined, value_refined = golden_section_max(score, lo, hi, tol=m_tol)
        if value_refined > best_value:
            best_m = m_refined
    return best_m


def _motion_segments(
    trace: _MotionTrace, m0: float, m1: float, pauses_done: int, cfg: ScenarioConfig
) -> list[Segment]:
    """FLY/HOVER segments covering movement time [m0, m1], split at frame edges."""
    frame_edges = [
        k * cfg.free_time
        for k in range(cfg.frames + 1)
        if m0 < k * cfg.free_time < m1
    ]
    cuts = sorted({m0, m1, *trace.boundaries(m0, m1), *frame_edges})
    offset = pauses_done * cfg.tau0
    segments = []
    for p, q in zip(cuts, cuts[1:]):
        if q - p <= _NEGLIGIBLE:
            continue
        x_p, x_q = trace.position(p), trace.position(q)
        hovering = abs(x_q - x_p) <= 1e-9
        segments.append(
            Segment(
                t_start=p + offset,
                t_end=q + offset,
                x_start=x_p,
                x_end=x_p if hovering else x_q,
                mode=SegmentMode.HOVER if hovering else SegmentMode.FLY,
            )
        )
    return segments


def _assemble(
    cfg: ScenarioConfig, trace: _MotionTrace, pins: dict[int, float], flags: tuple[str, ...]
) -> Trajectory:
    """Insert one sensing pause per frame into a motion trace."""
    d_t = cfg.free_time
    segments: list[Segment] = []
    cursor = 0.0
    for l in range(cfg.frames):
        sigma = pins.get(l)
        if sigma is None:
            sigma = _best_pause(trace, l * d_t, (l + 1) * d_t, cfg)
        if sigma is None:
            raise InfeasibleError(
                ErrorCode.INFEASIBLE_SCENARIO,
                f"frame {l + 1} has no sensing-feasible reachable position",
                frame=l + 1,
            )
        sigma = min(max(sigma, cursor), (l + 1) * d_t)
        segments.extend(_motion_segments(trace, cursor, sigma, l, cfg))
        x = trace.position(sigma)
        segments.append(
            Segment(
                t_start=sigma + l * cfg.tau0,
                t_end=sigma + (l + 1) * cfg.tau0,
                x_start=x,
                x_end=x,
                mode=SegmentMode.SENSE,
                precoder_policy=PrecoderPolicy.OPTIMAL,
            )
        )
        cursor = sigma
    segments.extend(_motion_segments(trace, cursor, cfg.frames * d_t, cfg.frames, cfg))
    return Trajectory(segments=tuple(segments), cfg=cfg, flags=flags)


def _check_endpoints(cfg: ScenarioConfig) -> None:
    for name, x in (("x_I", cfg.x_I), ("x_F", cfg.x_F)):
        if not 0.0 <= x <= cfg.D:
            raise InfeasibleError(
                ErrorCode.INVALID_ENDPOINTS,
                f"{name} = {x:.6g} m is outside [0, D = {cfg.D:.6g}]",
                key=name,
            )
    budget = cfg.frames * cfg.frame_reach
    if abs(cfg.x_I - cfg.x_F) > budget + SPEED_SLACK:
        raise InfeasibleError(
            ErrorCode.INVALID_ENDPOINTS,
            f"|x_I - x_F| = {abs(cfg.x_I - cfg.x_F):.6g} m exceeds the flight "
            f"budget {budget:.6g} m",
        )


def _frames_needed(distance: float, reach: float) -> int:
    if distance <= POSITION_TOL:
        return 0
    return int(math.ceil(distance / reach - 1e-12))


def plan_constrained(cfg: ScenarioConfig) -> Trajectory:
    """Mission trajectory from x_I to x_F with one sensing window per frame.

    Approach: fly straight toward x_r* at V_max; the leftover time of the
    arrival frame is an excursion toward the user that returns to x_r* at
    the frame edge. Cruise: the hover-fly-hover frame and its time reversal,
    sensing at x_r*. Return: mirror of the approach. When the approach and
    return cannot both fit, the UAV flies toward x_r* and turns around so
    that it reaches x_F at T. In approach, return and turnaround frames the
    sensing position is the best reachable one in the frame.

    Raises:
        InfeasibleError: INVALID_ENDPOINTS for endpoints outside [0, D] or
            too far apart; INFEASIBLE_SCENARIO when some frame cannot sense.
    """
    _check_endpoints(cfg)
    x_star = solve_unconstrained(cfg).x_r_star
    speed, reach, d_t, frames = cfg.V_max, cfg.frame_reach, cfg.free_time, cfg.frames

    approach = abs(cfg.x_I - x_star)
    back = abs(cfg.x_F - x_star)
    n_a = _frames_needed(approach, reach) if reach > 0 else 0
    n_r = _frames_needed(back, reach) if reach > 0 else 0
    turnaround = reach <= 0 or approach + back >= frames * reach or n_a + n_r > frames

    pins: dict[int, float] = {}
    if turnaround:
        legs = _route(cfg.x_I, cfg.x_F, x_star, frames * d_t, speed)
        flags: tuple[str, ...] = ("TURNAROUND",)
    else:
        legs = []
        if n_a:
            legs.append(_Leg(cfg.x_I, x_star, approach / speed))
            legs.extend(_route(x_star, x_star, 0.0, n_a * d_t - approach / speed, speed))
        cruise = frames - n_a - n_r
        for j in range(cruise):
            if j % 2 == 0 and j + 1 < cruise:
                legs.extend(_route(x_star, x_star, 0.0, 2 * d_t, speed))
                pins[n_a + j] = (n_a + j) * d_t
                pins[n_a + j + 1] = (n_a + j + 2) * d_t
            elif j % 2 == 0:
                legs.extend(_route(x_star, x_star, 0.0, d_t, speed))
                pins[n_a + j] = (n_a + j) * d_t
        if n_r:
            legs.extend(_route(x_star, x_star, 0.0, n_r * d_t - back / speed, speed))
            legs.append(_Leg(x_star, cfg.x_F, back / speed))
        flags = ()

    trace = _MotionTrace(cfg.x_I, [leg for leg in legs if leg.duration > _NEGLIGIBLE])
    return _assemble(cfg, trace, pins, flags)


# ---------------------------------------------------------------------------
# Feasibility checks and evaluation
# ---------------------------------------------------------------------------
def _frame_of(t: float, origin: float, cfg: ScenarioConfig) -> int:
    return int(math.floor((t - origin) / cfg.T_f))


def _sense_allowed(seg: Segment, cfg: ScenarioConfig) -> bool:
    if not is_sensing_feasible(seg.x_start, cfg):
        return False
    if seg.precoder_policy is PrecoderPolicy.MRT_USER:
        return sensing_branch(seg.x_start, cfg) is Branch.MRT_USER
    return True


def _violations(traj: Trajectory, endpoints: bool) -> list[Violation]:
    cfg = traj.cfg
    segments = traj.segments
    if not segments:
        return [Violation(kind=ViolationKind.HORIZON, detail="trajectory has no segments")]

    found: list[Violation] = []
    origin = traj.t_start
    frames = max(int(round(traj.span / cfg.T_f)), 1)
    if abs(traj.span - frames * cfg.T_f) > TIME_TOL * max(1.0, frames):
        found.append(
            Violation(
                kind=ViolationKind.HORIZON,
                detail=f"span {traj.span:.9g} s is not a whole number of frames",
            )
        )

    senses: list[list[int]] = [[] for _ in range(frames)]
    previous: Segment | None = None
    for i, seg in enumerate(segments):
        if seg.t_end < seg.t_start - TIME_TOL:
            found.append(
                Violation(kind=ViolationKind.TILING, detail="negative duration", segment_index=i)
            )
        if previous is not None:
            if abs(seg.t_start - previous.t_end) > TIME_TOL:
                found.append(
                    Violation(
                        kind=ViolationKind.TILING,
                        detail=f"gap/overlap of {seg.t_start - previous.t_end:.3g} s",
                        segment_index=i,
                    )
                )
            if abs(seg.x_start - previous.x_end) > POSITION_TOL:
                found.append(
                    Violation(
                        kind=ViolationKind.DISCONTINUITY,
                        detail=f"jump of {seg.x_start - previous.x_end:.3g} m",
                        segment_index=i,
                    )
                )
        moved = abs(seg.x_end - seg.x_start)
        if moved > cfg.V_max * max(seg.duration, 0.0) + SPEED_SLACK + 1e-12 * moved:
            found.append(
                Violation(
                    kind=ViolationKind.SPEED,
                    detail=f"{moved:.6g} m in {seg.duration:.6g} s exceeds V_max",
                    segment_index=i,
                )
            )
        if seg.mode is not SegmentMode.FLY and moved > POSITION_TOL:
            found.append(
                Violation(
                    kind=ViolationKind.MOVING_WHILE_STATIONARY,
                    detail=f"{seg.mode.value} segment moves {moved:.3g} m",
                    segment_index=i,
                )
            )

        frame_index = _frame_of(0.5 * (seg.t_start + seg.t_end), origin, cfg)
        inside = (
            seg.t_start >= origin + frame_index * cfg.T_f - TIME_TOL
            and seg.t_end <= origin + (frame_index + 1) * cfg.T_f + TIME_TOL
        )
        if seg.mode is SegmentMode.SENSE:
            if abs(seg.duration - cfg.tau0) > TIME_TOL:
                found.append(
                    Violation(
                        kind=ViolationKind.SENSE_DURATION,
                        detail=f"sensing lasts {seg.duration:.9g} s, expected {cfg.tau0}",
                        segment_index=i,
                    )
                )
            if not inside or not 0 <= frame_index < frames:
                found.append(
                    Violation(
                        kind=ViolationKind.SENSE_OUTSIDE_FRAME,
                        detail="sensing window is not inside a single frame",
                        segment_index=i,
                    )
                )
            else:
                senses[frame_index].append(i)
            if not _sense_allowed(seg, cfg):
                found.append(
                    Violation(
                        kind=ViolationKind.SENSING_CONSTRAINT,
                        detail=(
                            f"{seg.precoder_policy.value} at x = {seg.x_start:.6g} m "
                            "cannot meet the beam-gain threshold"
                        ),
                        segment_index=i,
                        frame=frame_index + 1,
                    )
                )
        elif not inside:
            found.append(
                Violation(
                    kind=ViolationKind.FRAME_CROSSING,
                    detail="segment crosses a frame boundary",
                    segment_index=i,
                )
            )
        previous = seg

    for l, indices in enumerate(senses):
        if not indices:
            found.append(
                Violation(
                    kind=ViolationKind.MISSING_SENSE,
                    detail=f"frame {l + 1} has no sensing window",
                    frame=l + 1,
                )
            )
        elif len(indices) > 1:
            found.append(
                Violation(
                    kind=ViolationKind.EXTRA_SENSE,
                    detail=f"frame {l + 1} has {len(indices)} sensing windows",
                    segment_index=indices[1],
                    frame=l + 1,
                )
            )

    if endpoints:
        if abs(traj.t_start) > TIME_TOL or abs(traj.t_end - cfg.T) > TIME_TOL * max(1.0, cfg.T):
            found.append(
                Violation(
                    kind=ViolationKind.HORIZON,
                    detail=f"covers [{traj.t_start:.9g}, {traj.t_end:.9g}] instead of [0, T]",
                )
            )
        if abs(segments[0].x_start - cfg.x_I) > POSITION_TOL:
            found.append(
                Violation(
                    kind=ViolationKind.ENDPOINT,
                    detail=f"x(0) = {segments[0].x_start:.6g} m, expected x_I = {cfg.x_I:.6g} m",
                    segment_index=0,
                )
            )
        if abs(segments[-1].x_end - cfg.x_F) > POSITION_TOL:
            found.append(
                Violation(
                    kind=ViolationKind.ENDPOINT,
                    detail=f"x(T) = {segments[-1].x_end:.6g} m, expected x_F = {cfg.x_F:.6g} m",
                    segment_index=len(segments) - 1,
                )
            )
    return found


def check_feasible(traj: Trajectory) -> list[Violation]:
    """All violated trajectory constraints, including x(0) = x_I and x(T) = x_F."""
    return _violations(traj, endpoints=True)


def _segment_rate(seg: Segment, index: int, cfg: ScenarioConfig) -> float:
    """Rate integral (bits/s/Hz * s) accumulated over one segment."""
    if seg.mode is SegmentMode.SENSE:
        try:
            if seg.precoder_policy is PrecoderPolicy.MRT_TARGET:
                if not is_sensing_feasible(seg.x_start, cfg):
                    raise InfeasibleError(ErrorCode.INFEASIBLE_SENSING, "beam gain unmet")
                return seg.duration * rate_mrt_target(seg.x_start, cfg)
            if seg.precoder_policy is PrecoderPolicy.MRT_USER:
                if not _sense_allowed(seg, cfg):
                    raise InfeasibleError(ErrorCode.INFEASIBLE_SENSING, "beam gain unmet")
                return seg.duration * rate_comm(seg.x_start, cfg)
            return seg.duration * rate_sense(seg.x_start, cfg)
        except InfeasibleError:
            raise TrajectoryError(
                ErrorCode.SENSING_CONSTRAINT_VIOLATION,
                f"segment {index}: {seg.precoder_policy.value} at x = {seg.x_start:.6g} m "
                "cannot meet the beam-gain threshold",
                segment_index=index,
            ) from None

    moved = abs(seg.x_end - seg.x_start)
    if seg.mode is SegmentMode.HOVER or moved <= _NEGLIGIBLE:
        return seg.duration * rate_comm(seg.x_start, cfg)
    return integral_rate_over_path(seg.x_start, seg.x_end, cfg) * seg.duration / moved


def evaluate(traj: Trajectory, validate: bool = True) -> RatePerformance:
    """Average achievable rate of a trajectory.

    Args:
        traj: Trajectory to evaluate.
        validate: Check structural and sensing invariants first.

    Raises:
        TrajectoryError: INVARIANT_VIOLATION naming the first offending
            segment, or SENSING_CONSTRAINT_VIOLATION when a sensing segment's
            precoder cannot meet the beam-gain threshold.
    """
    cfg = traj.cfg
    if validate:
        violations = _violations(traj, endpoints=False)
        structural = [v for v in violations if v.kind is not ViolationKind.SENSING_CONSTRAINT]
        if structural:
            first = structural[0]
            raise TrajectoryError(
                ErrorCode.INVARIANT_VIOLATION,
                f"{first.kind.value}: {first.detail}",
                segment_index=first.segment_index,
            )
        if violations:
            first = violations[0]
            raise TrajectoryError(
                ErrorCode.SENSING_CONSTRAINT_VIOLATION,
                first.detail,
                segment_index=first.segment_index,
            )

    frames = max(int(round(traj.span / cfg.T_f)), 1)
    per_frame = [0.0] * frames
    sensing: list[float | None] = [None] * frames
    for i, seg in enumerate(traj.segments):
        midpoint = 0.5 * (seg.t_start + seg.t_end)
        l = min(max(_frame_of(midpoint, traj.t_start, cfg), 0), frames - 1)
        per_frame[l] += _segment_rate(seg, i, cfg)
        if seg.mode is SegmentMode.SENSE:
            sensing[l] = seg.x_start

    span = traj.span
    return RatePerformance(
        avg_rate=sum(per_frame) / span if span > 0 else 0.0,
        per_frame=tuple(per_frame),
        sensing_locations=tuple(sensing),
    )


def write_trajectory_csv(traj: Trajectory, path: str | Path) -> None:
    """Write segments as CSV (meters/seconds, 6 decimal places, LF endings)."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for seg in traj.segments:
            writer.writerow(
                (
                    f"{seg.t_start:.6f}",
                    f"{seg.t_end:.6f}",
                    f"{seg.x_start:.6f}",
                    f"{seg.x_end:.6f}",
                    seg.mode.value,
                    seg.precoder_policy.value,
                )
            )
