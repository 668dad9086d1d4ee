"""Parameter sweeps comparing the planners, with CSV and SVG output."""

import csv
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from ipsac.benchmarks import plan_benchmark  # noqa: E402
from ipsac.errors import ConfigError, ErrorCode, InfeasibleError  # noqa: E402
from ipsac.precoder import optimal_snr, oracle_snr  # noqa: E402
from ipsac.rate import sensing_domain  # noqa: E402
from ipsac.scenario import build_config  # noqa: E402
from ipsac.schemas import (  # noqa: E402
    BenchmarkScheme,
    ScenarioConfig,
    Scheme,
    SweepRow,
    SweepSpec,
    SweepTable,
    SweptParam,
    Trajectory,
)
from ipsac.trajectory import (  # noqa: E402
    evaluate,
    expand_symmetric,
    plan_constrained,
    solve_unconstrained,
)

logger = logging.getLogger("ipsac.experiment")

CSV_HEADER = ("scheme", "param", "value", "avg_rate_bpshz", "gap_to_ub", "flags")
INFEASIBLE = "INFEASIBLE"
RATE_AXIS_LABEL = "Achievable rate (bits/s/Hz)"

_AXIS_LABELS = {
    "T_f": "Sensing frequency 1/T_f (Hz)",
    "gamma_thr": "Beam pattern gain threshold",
    "D": "User-target distance D (m)",
    "V_max": "Maximum speed V_max (m/s)",
}


@dataclass(frozen=True)
class Preset:
    """A named sweep, optionally repeated for several values of a second parameter."""

    swept_param: SweptParam
    values: tuple[float, ...]
    tag_param: str | None = None
    tag_values: tuple[float, ...] = ()


PRESETS: dict[str, Preset] = {
    "fig3a": Preset("T_f", (1.0, 2.0, 4.0, 5.0, 10.0, 20.0, 25.0), "gamma_thr", (6e-5, 1e-4)),
    "fig3b": Preset(
        "gamma_thr",
        (2e-5, 4e-5, 6e-5, 8e-5, 1e-4, 2e-4, 3e-4, 5e-4),
        "T_f",
        (5.0, 1.0),
    ),
    "fig3c": Preset("D", (50.0, 100.0, 200.0, 300.0, 400.0, 500.0), "gamma_thr", (6e-5, 1e-4)),
    "fig4": Preset("V_max", (5.0, 10.0, 20.0, 30.0, 40.0, 50.0)),
}


# ---------------------------------------------------------------------------
# Sweep execution
# ---------------------------------------------------------------------------
def plan(scheme: Scheme, cfg: ScenarioConfig) -> Trajectory:
    """Trajectory produced by `scheme` for `cfg`."""
    if scheme is Scheme.UPPER_BOUND:
        return expand_symmetric(solve_unconstrained(cfg).frame, cfg)
    if scheme is Scheme.PROPOSED:
        return plan_constrained(cfg)
    return plan_benchmark(cfg, BenchmarkScheme(scheme.value))


def _point_config(base: ScenarioConfig, param: str, value: float) -> ScenarioConfig:
    data = base.model_dump()
    data[param] = value
    if param == "D":
        # Endpoints placed at the target follow it when D moves
        for key in ("x_I", "x_F"):
            if getattr(base, key) == base.D:
                data[key] = value
    return build_config(data)


def _run_point(
    schemes: tuple[Scheme, ...], param: str, value: float, cfg: ScenarioConfig, tag: str
) -> list[SweepRow]:
    """Evaluate every scheme at one sweep value."""
    started = time.perf_counter()
    results: dict[Scheme, tuple[float | None, tuple[str, ...]]] = {}
    for scheme in schemes:
        try:
            traj = plan(scheme, cfg)
            results[scheme] = (evaluate(traj).avg_rate, traj.flags)
        except InfeasibleError as exc:
            logger.info(
                "Sweep point infeasible",
                extra={
                    "event_type": "sweep_point_infeasible",
                    "scheme": scheme.value,
                    "param": param,
                    "value": value,
                    "error": exc.code.value,
                },
            )
            results[scheme] = (None, (INFEASIBLE, exc.code.value))

    upper = results.get(Scheme.UPPER_BOUND, (None, ()))[0]
    rows = []
    for scheme in schemes:
        rate, flags = results[scheme]
        gap = upper - rate if upper is not None and rate is not None else None
        rows.append(
            SweepRow(
                scheme=scheme,
                param=param,
                value=value,
                avg_rate=rate,
                gap_to_ub=gap,
                flags=flags,
                tag=tag,
            )
        )
        logger.debug(
            "Sweep point evaluated",
            extra={
                "event_type": "sweep_point",
                "scheme": scheme.value,
                "param": param,
                "value": value,
                "avg_rate": rate,
                "gap": gap,
                "elapsed_ms": round((time.perf_counter() - started) * 1000, 2),
            },
        )
    return rows


def run_sweep(spec: SweepSpec, workers: int = 1) -> SweepTable:
    """Evaluate every scheme at every swept value.

    Values that do not form a valid scenario are skipped and logged;
    infeasible scheme/value pairs are kept with a blank rate and the
    ``INFEASIBLE`` flag. Rows come back in request order whatever the number
    of worker processes.

    Raises:
        ConfigError: If no swept value forms a valid scenario.
        InfeasibleError: INFEASIBLE_SCENARIO if every point is infeasible.
    """
    points: list[tuple[float, ScenarioConfig]] = []
    for value in spec.values:
        try:
            points.append((value, _point_config(spec.base, spec.swept_param, value)))
        except ConfigError as exc:
            logger.warning(
                "Sweep value skipped",
                extra={
                    "event_type": "sweep_point_skipped",
                    "param": spec.swept_param,
                    "value": value,
                    "error": exc.detail,
                },
            )
    if not points:
        raise ConfigError(
            ErrorCode.CONFIG_VALIDATION,
            f"no value of {spec.swept_param} yields a valid scenario",
            key=spec.swept_param,
        )

    args = [(spec.schemes, spec.swept_param, value, cfg, spec.tag) for value, cfg in points]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(_run_point, *zip(*args)))
    else:
        batches = [_run_point(*a) for a in args]

    rows = tuple(row for batch in batches for row in batch)
    if all(row.avg_rate is None for row in rows):
        raise InfeasibleError(
            ErrorCode.INFEASIBLE_SCENARIO,
            f"every point of the {spec.swept_param} sweep is infeasible",
        )
    return SweepTable(rows=rows)


def preset_specs(name: str, base: ScenarioConfig | None = None) -> list[SweepSpec]:
    """Sweep specs behind a named preset, one per tag value."""
    preset = PRESETS[name]
    base = base or ScenarioConfig()
    if preset.tag_param is None:
        return [SweepSpec(swept_param=preset.swept_param, values=preset.values, base=base)]
    return [
        SweepSpec(
            swept_param=preset.swept_param,
            values=preset.values,
            base=build_config(base.model_dump() | {preset.tag_param: tag_value}),
            tag=f"{preset.tag_param}={tag_value:g}",
        )
        for tag_value in preset.tag_values
    ]


def run_preset(name: str, base: ScenarioConfig | None = None, workers: int = 1) -> SweepTable:
    """Run every sweep of a preset and concatenate the tables."""
    rows: list[SweepRow] = []
    for spec in preset_specs(name, base):
        rows.extend(run_sweep(spec, workers=workers).rows)
    return SweepTable(rows=tuple(rows))


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------
def _fmt(value: float | None) -> str:
    return "" if value is None else f"{value:.9g}"


def write_csv(table: SweepTable, path: str | Path) -> None:
    """Write the table with 9 significant digits and LF line endings."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in table.rows:
            writer.writerow(
                (
                    row.label,
                    row.param,
                    _fmt(row.value),
                    _fmt(row.avg_rate),
                    _fmt(row.gap_to_ub),
                    ";".join(row.flags),
                )
            )


def emit_plot(table: SweepTable, path: str | Path) -> None:
    """Draw one line per series into a self-contained SVG.

    T_f sweeps are plotted against the sensing frequency 1/T_f. A series
    with a single feasible point is drawn as a lone marker.

    Raises:
        ValueError: If the table has no rows.
    """
    if not table.rows:
        raise ValueError("cannot plot an empty sweep table")
    param = table.rows[0].param

    with plt.rc_context({"svg.hashsalt": "ipsac", "svg.fonttype": "path"}):
        fig, ax = plt.subplots(figsize=(7, 4.5))
        for label, rows in table.series().items():
            points = sorted(
                (1.0 / row.value if param == "T_f" else row.value, row.avg_rate)
                for row in rows
                if row.avg_rate is not None
            )
            if not points:
                continue
            xs, ys = zip(*points)
            style = {"linestyle": "none"} if len(points) == 1 else {}
            (line,) = ax.plot(xs, ys, marker="o", label=label, **style)
            line.set_gid(f"series-{label}")

        ax.set_xlabel(_AXIS_LABELS.get(param, param))
        ax.set_ylabel(RATE_AXIS_LABEL)
        ax.grid(True, alpha=0.3)
        ax.legend(fontsize="small")
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)


# ---------------------------------------------------------------------------
# Closed-form check
# ---------------------------------------------------------------------------
def verify_closed_form(
    cfg: ScenarioConfig | None = None, samples: int = 50, grid_n: int = 2000
) -> float:
    """Largest relative gap between the closed-form and brute-force SNR.

    Samples `samples` evenly spaced interior points of the feasible part
    of [0, D].
    """
    cfg = cfg or ScenarioConfig()
    started = time.perf_counter()
    lo, hi = sensing_domain(cfg)
    worst = 0.0
    for x in np.linspace(lo, hi, samples + 2)[1:-1]:
        exact = optimal_snr(float(x), cfg)
        worst = max(worst, abs(exact - oracle_snr(float(x), cfg, grid_n)) / exact)
    logger.info(
        "Closed-form precoder check finished",
        extra={
            "event_type": "verify_done",
            "samples": samples,
            "max_rel_error": worst,
            "elapsed_ms": round((time.perf_counter() - started) * 1000, 2),
        },
    )
    return worst
