"""Pydantic schemas for scenario, trajectory and sweep data."""

from enum import Enum
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationInfo, field_validator

# Relative tolerance used when checking that T / T_f is an integer
_FRAME_RATIO_RTOL = 1e-9


class ScenarioConfig(BaseModel):
    """All physical and mission parameters, in linear units.

    Defaults reproduce the baseline numerical setup: a 10-antenna UAV at
    50 m altitude serving a user at x = 0 while sensing a target at
    x = D = 400 m, 0.1 W budget, one 0.1 s sensing window every 5 s.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    H: float = Field(50.0, gt=0, description="Altitude (m)")
    D: float = Field(400.0, gt=0, description="User-target distance (m)")
    M: int = Field(10, ge=1, description="Number of ULA antennas")
    P_max: float = Field(0.1, gt=0, description="Transmit power budget (W)")
    beta0: float = Field(1e-3, gt=0, description="Channel power at 1 m")
    sigma2: float = Field(1e-10, gt=0, description="Noise power (W)")
    gamma_thr: float = Field(6e-5, gt=0, description="Beam pattern gain threshold")
    T: float = Field(500.0, gt=0, description="Mission duration (s)")
    T_f: float = Field(5.0, gt=0, description="ISAC frame length (s)")
    tau0: float = Field(0.1, gt=0, description="Sensing window length (s)")
    V_max: float = Field(30.0, ge=0, description="Maximum speed (m/s)")
    x_I: float = Field(400.0, ge=0, description="Initial position (m)")
    x_F: float = Field(400.0, ge=0, description="Final position (m)")
    antenna_spacing_ratio: float = Field(0.5, gt=0, description="d / lambda")
    unit_gain_rate: bool = Field(
        False, description="Use f(x) without the M * P_max array gain"
    )

    @field_validator("T_f")
    @classmethod
    def frame_divides_mission(cls, v: float, info: ValidationInfo) -> float:
        """Require T / T_f to be an integer frame count L >= 1."""
        mission = info.data.get("T")
        if mission is None:
            return v
        ratio = mission / v
        frames = round(ratio)
        if frames < 1 or abs(ratio - frames) > _FRAME_RATIO_RTOL * max(1.0, ratio):
            raise ValueError(f"T / T_f = {ratio:.6g} is not an integer frame count")
        return v

    @field_validator("tau0")
    @classmethod
    def window_fits_frame(cls, v: float, info: ValidationInfo) -> float:
        """Require the sensing window to fit inside one frame."""
        frame = info.data.get("T_f")
        if frame is not None and v > frame:
            raise ValueError(f"tau0 = {v} exceeds T_f = {frame}")
        return v

    @property
    def frames(self) -> int:
        """Number of ISAC frames L."""
        return int(round(self.T / self.T_f))

    @property
    def gamma0(self) -> float:
        """Reference SNR beta0 / sigma2."""
        return self.beta0 / self.sigma2

    @property
    def free_time(self) -> float:
        """Non-sensing time per frame, T_f - tau0."""
        return self.T_f - self.tau0

    @property
    def frame_reach(self) -> float:
        """Distance covered at full speed during the free time of one frame."""
        return self.free_time * self.V_max


class SegmentMode(str, Enum):
    """What the UAV does during a segment."""

    FLY = "FLY"
    HOVER = "HOVER"
    SENSE = "SENSE"


class PrecoderPolicy(str, Enum):
    """Precoder applied during a segment."""

    OPTIMAL = "OPTIMAL"
    MRT_USER = "MRT_USER"
    MRT_TARGET = "MRT_TARGET"


class Segment(BaseModel):
    """One time slice of a trajectory with linear motion."""

    model_config = ConfigDict(frozen=True)

    t_start: float
    t_end: float
    x_start: float
    x_end: float
    mode: SegmentMode
    precoder_policy: PrecoderPolicy = PrecoderPolicy.MRT_USER

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start


class Trajectory(BaseModel):
    """Time-ordered segments plus the scenario they were planned for.

    `flags` records metadata such as ``ENDPOINT_IGNORED`` for planners that
    deliberately leave the final-location constraint open.
    """

    model_config = ConfigDict(frozen=True)

    segments: tuple[Segment, ...]
    cfg: ScenarioConfig
    flags: tuple[str, ...] = ()

    @property
    def t_start(self) -> float:
        return self.segments[0].t_start if self.segments else 0.0

    @property
    def t_end(self) -> float:
        return self.segments[-1].t_end if self.segments else 0.0

    @property
    def span(self) -> float:
        return self.t_end - self.t_start

    def knots(self) -> tuple[np.ndarray, np.ndarray]:
        """Return (times, positions) of the piecewise-linear position trace."""
        times = [seg.t_start for seg in self.segments]
        positions = [seg.x_start for seg in self.segments]
        if self.segments:
            times.append(self.segments[-1].t_end)
            positions.append(self.segments[-1].x_end)
        return np.asarray(times), np.asarray(positions)

    def positions_at(self, times: np.ndarray) -> np.ndarray:
        """Positions at the given instants (clamped to the trajectory span)."""
        knot_t, knot_x = self.knots()
        return np.interp(np.asarray(times, dtype=float), knot_t, knot_x)

    def position_at(self, t: float) -> float:
        """Position at a single instant."""
        return float(self.positions_at(np.array([t]))[0])


class RatePerformance(BaseModel):
    """Evaluated rate of a trajectory."""

    avg_rate: float = Field(..., description="Time-averaged rate (bits/s/Hz)")
    per_frame: tuple[float, ...] = Field(
        ..., description="Per-frame rate integrals (bits/s/Hz * s)"
    )
    sensing_locations: tuple[float | None, ...]


class ViolationKind(str, Enum):
    """Categories reported by the feasibility checker."""

    TILING = "TILING"
    HORIZON = "HORIZON"
    DISCONTINUITY = "DISCONTINUITY"
    SPEED = "SPEED"
    MOVING_WHILE_STATIONARY = "MOVING_WHILE_STATIONARY"
    SENSE_DURATION = "SENSE_DURATION"
    MISSING_SENSE = "MISSING_SENSE"
    EXTRA_SENSE = "EXTRA_SENSE"
    SENSE_OUTSIDE_FRAME = "SENSE_OUTSIDE_FRAME"
    FRAME_CROSSING = "FRAME_CROSSING"
    SENSING_CONSTRAINT = "SENSING_CONSTRAINT"
    ENDPOINT = "ENDPOINT"


class Violation(BaseModel):
    """A single broken trajectory constraint."""

    model_config = ConfigDict(frozen=True)

    kind: ViolationKind
    detail: str
    segment_index: int | None = None
    frame: int | None = None


class Scheme(str, Enum):
    """Trajectory/precoder schemes compared in sweeps."""

    UPPER_BOUND = "UPPER_BOUND"
    PROPOSED = "PROPOSED"
    PRECODER_ONLY = "PRECODER_ONLY"
    TIME_DIVISION = "TIME_DIVISION"


class BenchmarkScheme(str, Enum):
    """The two fixed-trajectory baselines."""

    TIME_DIVISION = "TIME_DIVISION"
    PRECODER_ONLY = "PRECODER_ONLY"


SweptParam = Literal["T_f", "gamma_thr", "D", "V_max"]


class SweepSpec(BaseModel):
    """One swept parameter over a value grid for a set of schemes."""

    model_config = ConfigDict(frozen=True)

    swept_param: SweptParam
    values: tuple[float, ...] = Field(..., min_length=1)
    schemes: tuple[Scheme, ...] = tuple(Scheme)
    base: ScenarioConfig = ScenarioConfig()
    tag: str = Field("", description="Label of the fixed base override, if any")

    @field_validator("values")
    @classmethod
    def strictly_increasing(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("sweep values must be strictly increasing")
        return v


class SweepRow(BaseModel):
    """One (scheme, value) result of a sweep."""

    model_config = ConfigDict(frozen=True)

    scheme: Scheme
    param: str
    value: float
    avg_rate: float | None = None
    gap_to_ub: float | None = None
    flags: tuple[str, ...] = ()
    tag: str = ""

    @property
    def label(self) -> str:
        """Series label, e.g. ``PROPOSED`` or ``PROPOSED[gamma_thr=1e-04]``."""
        return f"{self.scheme.value}[{self.tag}]" if self.tag else self.scheme.value


class SweepTable(BaseModel):
    """Rows of a sweep in request order."""

    model_config = ConfigDict(frozen=True)

    rows: tuple[SweepRow, ...] = ()

    def series(self) -> dict[str, list[SweepRow]]:
        """Group rows by series label, keeping first-appearance order."""
        grouped: dict[str, list[SweepRow]] = {}
        for row in self.rows:
            grouped.setdefault(row.label, []).append(row)
        return grouped
