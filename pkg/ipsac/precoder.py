"""Per-location transmit precoder design.

Outside sensing windows MRT toward the user is optimal. During sensing the
precoder maximizes the user SNR subject to the beam-gain requirement
|a^H(x, v) w|^2 >= d(x, v)^2 * gamma_thr and ||w||^2 <= P_max. The optimum
lies in span{h_c, a(x, v)}, which gives the closed form implemented in
`solve_sensing_precoder`; `oracle_snr` brute-forces the same subspace.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ipsac.channel import correlation_rho, path_gain, steering_vector, user_channel
from ipsac.errors import ErrorCode, InfeasibleError, PrecoderError
from ipsac.scenario import is_sensing_feasible, target_distance_sq
from ipsac.schemas import ScenarioConfig

# Rows of the (phi, psi) oracle grid evaluated per numpy batch
_ORACLE_BATCH = 256

ORACLE_MIN_GRID = 1000


class Branch(str, Enum):
    """Which branch of the optimal-SNR expression is active."""

    MRT_USER = "MRT_USER"
    CONSTRAINED = "CONSTRAINED"


@dataclass(frozen=True)
class PrecoderSolution:
    """Sensing-window precoder with its achieved SNR and beam gain."""

    weights: np.ndarray
    snr: float
    beam_gain: float
    branch: Branch


def _normalize_phase(w: np.ndarray) -> np.ndarray:
    """Rotate w so its first entry is real and non-negative."""
    if abs(w[0]) == 0:
        return w
    return w * np.exp(-1j * np.angle(w[0]))


def mrt_precoder(h: np.ndarray, cfg: ScenarioConfig) -> np.ndarray:
    """Maximum ratio transmission sqrt(P_max) * conj(h) / ||h||.

    Raises:
        PrecoderError: ZERO_CHANNEL if h is the zero vector.
    """
    h = np.asarray(h, dtype=complex)
    norm = np.linalg.norm(h)
    if norm == 0:
        raise PrecoderError(ErrorCode.ZERO_CHANNEL, "cannot apply MRT to a zero channel")
    return math.sqrt(cfg.P_max) * np.conj(h) / norm


def beam_gain(w: np.ndarray, x: float, cfg: ScenarioConfig) -> float:
    """Beam pattern gain |a^H(x, v) w|^2 toward the target."""
    return float(abs(steering_vector(x, cfg.D, cfg).entries @ np.asarray(w)) ** 2)


def user_snr(w: np.ndarray, x: float, cfg: ScenarioConfig) -> float:
    """User SNR |h_c^H w|^2 / sigma2 for an arbitrary precoder."""
    return float(abs(user_channel(x, cfg).entries @ np.asarray(w)) ** 2 / cfg.sigma2)


def _require_feasible(x: float, cfg: ScenarioConfig) -> None:
    if not is_sensing_feasible(x, cfg):
        raise InfeasibleError(
            ErrorCode.INFEASIBLE_SENSING,
            f"x = {x:.6g} m: M * P_max / d_r^2 = "
            f"{cfg.M * cfg.P_max / target_distance_sq(x, cfg):.6g} < gamma_thr = "
            f"{cfg.gamma_thr:.6g}",
            x=x,
        )


def _mrt_snr(x: float, cfg: ScenarioConfig) -> float:
    return path_gain(x, cfg) * cfg.P_max * cfg.M / cfg.sigma2


def _mrt_meets_threshold(rho: float, d_r_sq: float, cfg: ScenarioConfig) -> bool:
    return cfg.M * cfg.P_max * rho**2 / d_r_sq >= cfg.gamma_thr


def _constrained_snr(x: float, rho: float, d_r_sq: float, cfg: ScenarioConfig) -> float:
    slack = max(cfg.M * cfg.P_max / d_r_sq - cfg.gamma_thr, 0.0)
    amplitude = rho * math.sqrt(cfg.gamma_thr) + math.sqrt(
        max(1.0 - rho**2, 0.0)
    ) * math.sqrt(slack)
    return cfg.gamma0 * d_r_sq * amplitude**2 / (x**2 + cfg.H**2)


def optimal_snr(x: float, cfg: ScenarioConfig) -> float:
    """Optimal user SNR during sensing at location x.

    Raises:
        InfeasibleError: INFEASIBLE_SENSING outside the feasible set.
    """
    _require_feasible(x, cfg)
    rho = correlation_rho(x, cfg)
    d_r_sq = target_distance_sq(x, cfg)
    if _mrt_meets_threshold(rho, d_r_sq, cfg):
        return _mrt_snr(x, cfg)
    return _constrained_snr(x, rho, d_r_sq, cfg)


def sensing_branch(x: float, cfg: ScenarioConfig) -> Branch:
    """Active branch of the optimal-SNR expression at x (no feasibility check)."""
    if _mrt_meets_threshold(correlation_rho(x, cfg), target_distance_sq(x, cfg), cfg):
        return Branch.MRT_USER
    return Branch.CONSTRAINED


def _subspace_basis(x: float, cfg: ScenarioConfig) -> tuple[np.ndarray, np.ndarray, complex]:
    """Orthonormal (e_r, e_perp) spanning the user and target directions.

    Returns e_r (normalized target direction), e_perp (normalized residual of
    the user direction, zero when the two directions coincide) and the
    inner product e_r^H e_c.
    """
    e_r = np.conj(steering_vector(x, cfg.D, cfg).entries) / math.sqrt(cfg.M)
    h = np.conj(user_channel(x, cfg).entries)
    e_c = h / np.linalg.norm(h)
    projection = np.vdot(e_r, e_c)
    residual = e_c - projection * e_r
    residual_norm = np.linalg.norm(residual)
    if residual_norm <= 1e-12:
        return e_r, np.zeros_like(e_r), projection
    return e_r, residual / residual_norm, projection


def solve_sensing_precoder(x: float, cfg: ScenarioConfig) -> PrecoderSolution:
    """Beam-gain-constrained SNR-maximizing precoder at location x.

    If MRT toward the user already meets the beam-gain threshold it is
    optimal. Otherwise the target component is held at exactly the required
    amplitude c = sqrt(gamma_thr * d_r^2 / M) and the remaining power goes
    to the part of the user direction orthogonal to the target.

    Raises:
        InfeasibleError: INFEASIBLE_SENSING outside the feasible set.
    """
    _require_feasible(x, cfg)
    d_r_sq = target_distance_sq(x, cfg)
    rho = correlation_rho(x, cfg)

    if _mrt_meets_threshold(rho, d_r_sq, cfg):
        weights = mrt_precoder(user_channel(x, cfg).entries, cfg)
        branch = Branch.MRT_USER
        snr = _mrt_snr(x, cfg)
    else:
        e_r, e_perp, projection = _subspace_basis(x, cfg)
        c = min(math.sqrt(cfg.gamma_thr * d_r_sq / cfg.M), math.sqrt(cfg.P_max))
        s = math.sqrt(max(cfg.P_max - c**2, 0.0))
        weights = c * np.exp(1j * np.angle(projection)) * e_r + s * e_perp
        branch = Branch.CONSTRAINED
        snr = _constrained_snr(x, rho, d_r_sq, cfg)

    weights = _normalize_phase(weights)
    return PrecoderSolution(
        weights=weights,
        snr=snr,
        beam_gain=beam_gain(weights, x, cfg),
        branch=branch,
    )


def mrt_target_precoder(x: float, cfg: ScenarioConfig) -> np.ndarray:
    """MRT toward the target direction, maximizing the beam gain."""
    return mrt_precoder(steering_vector(x, cfg.D, cfg).entries, cfg)


def mrt_target_snr(x: float, cfg: ScenarioConfig) -> float:
    """User SNR when transmitting MRT toward the target: gamma0 M P rho^2 / d_u^2."""
    return _mrt_snr(x, cfg) * correlation_rho(x, cfg) ** 2


def oracle_snr(x: float, cfg: ScenarioConfig, grid_n: int = 2000) -> float:
    """Brute-force maximum user SNR over the span of e_r and e_perp.

    Precoders w = sqrt(P_max) (cos(phi) exp(j psi) e_r + sin(phi) e_perp)
    have ||w||^2 = P_max and beam gain M P_max cos(phi)^2, so the beam-gain
    constraint is cos(phi) >= c / sqrt(P_max). phi is gridded over that
    feasible arc (its active boundary included) and psi over [0, 2 pi).

    Raises:
        InfeasibleError: INFEASIBLE_SENSING outside the feasible set.
        PrecoderError: EMPTY_ORACLE_GRID if grid_n < ORACLE_MIN_GRID or no
            grid point meets the constraint.
    """
    if grid_n < ORACLE_MIN_GRID:
        raise PrecoderError(
            ErrorCode.EMPTY_ORACLE_GRID, f"grid_n = {grid_n} < {ORACLE_MIN_GRID}"
        )
    _require_feasible(x, cfg)

    e_r, e_perp, _ = _subspace_basis(x, cfg)
    h_row = user_channel(x, cfg).entries
    u = complex(h_row @ e_r)
    v = complex(h_row @ e_perp)
    required = cfg.gamma_thr * target_distance_sq(x, cfg)
    c_ratio = min(math.sqrt(required / (cfg.M * cfg.P_max)), 1.0)

    phi = np.linspace(0.0, math.acos(c_ratio), grid_n)
    psi = np.linspace(0.0, 2.0 * math.pi, grid_n, endpoint=False)
    feasible = cfg.M * cfg.P_max * np.cos(phi) ** 2 >= required * (1.0 - 1e-12)
    phi = phi[feasible]
    if phi.size == 0:
        raise PrecoderError(ErrorCode.EMPTY_ORACLE_GRID, f"no feasible grid point at x = {x}")

    rotation = np.exp(1j * psi)[np.newaxis, :]
    best = 0.0
    for start in range(0, phi.size, _ORACLE_BATCH):
        block = phi[start : start + _ORACLE_BATCH, np.newaxis]
        amplitude = u * np.cos(block) * rotation + v * np.sin(block)
        best = max(best, float(np.max(np.abs(amplitude) ** 2)))
    return cfg.P_max * best / cfg.sigma2
