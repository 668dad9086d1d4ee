"""Geometry-dependent channel quantities.

Vectors are stored in row form: the entries of a^H(x, p) and h_c^H(x) as
written in the array-response and channel models, so the received
amplitude of a precoder w is simply ``row @ w``.
"""

import math
from dataclasses import dataclass

import numpy as np

from ipsac.scenario import target_distance_sq
from ipsac.schemas import ScenarioConfig


@dataclass(frozen=True)
class SteeringVector:
    """ULA response toward a ground point; unit-modulus entries, entry 0 = 1."""

    entries: np.ndarray

    @property
    def size(self) -> int:
        return int(self.entries.shape[0])


@dataclass(frozen=True)
class UserChannel:
    """Baseband channel toward the user and its power gain beta_c(x)."""

    entries: np.ndarray
    gain: float


def path_gain(x: float, cfg: ScenarioConfig) -> float:
    """Free-space LoS power gain beta0 / (H^2 + x^2)."""
    return cfg.beta0 / (cfg.H**2 + x**2)


def elevation_sine(x: float, point_x: float, cfg: ScenarioConfig) -> float:
    """sin(theta) of the UAV-to-point path; depends only on |x - point_x|."""
    return cfg.H / math.hypot(x - point_x, cfg.H)


def steering_vector(x: float, point_x: float, cfg: ScenarioConfig) -> SteeringVector:
    """Array response: entry m is exp(-j 2 pi (d/lambda) m sin(theta))."""
    phase = 2.0 * np.pi * cfg.antenna_spacing_ratio * elevation_sine(x, point_x, cfg)
    return SteeringVector(np.exp(-1j * phase * np.arange(cfg.M)))


def user_channel(x: float, cfg: ScenarioConfig) -> UserChannel:
    """Channel toward the user at x = 0.

    The carrier phase exp(-j 2 pi d(x) / lambda) is a common unit-modulus
    factor and is fixed to 1; only |h_c^H w| is used downstream.
    """
    gain = path_gain(x, cfg)
    return UserChannel(math.sqrt(gain) * steering_vector(x, 0.0, cfg).entries, gain)


def target_response(x: float, cfg: ScenarioConfig) -> np.ndarray:
    """Normalized target response a^H(x, v) / d(x, v)."""
    return steering_vector(x, cfg.D, cfg).entries / math.sqrt(target_distance_sq(x, cfg))


def correlation_rho(x: float, cfg: ScenarioConfig) -> float:
    """Normalized correlation of the user and target steering vectors."""
    a_u = steering_vector(x, 0.0, cfg).entries
    a_v = steering_vector(x, cfg.D, cfg).entries
    return min(1.0, abs(np.vdot(a_u, a_v)) / cfg.M)


def correlation_rho_closed_form(x: float, cfg: ScenarioConfig) -> float:
    """Dirichlet-kernel form of `correlation_rho`.

    |sum_m exp(j m u)| / M = |sin(M u / 2)| / (M |sin(u / 2)|) with
    u = 2 pi (d/lambda) (sin(theta_u) - sin(theta_v)); the 0/0 limit is 1.
    """
    u = (
        2.0
        * math.pi
        * cfg.antenna_spacing_ratio
        * (elevation_sine(x, 0.0, cfg) - elevation_sine(x, cfg.D, cfg))
    )
    denominator = cfg.M * math.sin(u / 2.0)
    if abs(denominator) < 1e-12:
        return 1.0
    return min(1.0, abs(math.sin(cfg.M * u / 2.0) / denominator))
