"""ipsac command-line interface."""

import argparse
import logging
import sys
from pathlib import Path

from ipsac import __version__
from ipsac.errors import IpsacError
from ipsac.experiment import PRESETS, emit_plot, plan, run_preset, verify_closed_form, write_csv
from ipsac.logging_config import setup_logging
from ipsac.scenario import load_config_file
from ipsac.schemas import ScenarioConfig, Scheme
from ipsac.trajectory import evaluate, write_trajectory_csv

logger = logging.getLogger("ipsac.main")

EXIT_OK = 0
EXIT_USAGE = 1
VERIFY_TOLERANCE = 1e-4


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors with exit code 1."""

    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _base_config(path: str | None) -> ScenarioConfig:
    return load_config_file(path) if path else ScenarioConfig()


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------
def cmd_solve(args: argparse.Namespace) -> int:
    """Plan one scheme, print its average rate and write the trajectory CSV."""
    cfg = _base_config(args.config)
    scheme = Scheme(args.scheme)
    traj = plan(scheme, cfg)
    perf = evaluate(traj)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"trajectory_{scheme.value.lower()}.csv"
    write_trajectory_csv(traj, csv_path)
    logger.info(
        "Trajectory written",
        extra={
            "event_type": "solve_done",
            "scheme": scheme.value,
            "avg_rate": perf.avg_rate,
            "path": str(csv_path),
        },
    )

    print(f"scheme={scheme.value}")
    print(f"avg_rate_bpshz={perf.avg_rate:.9g}")
    if traj.flags:
        print(f"flags={';'.join(traj.flags)}")
    print(f"trajectory={csv_path}")
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    """Run a figure preset and write its CSV table and SVG chart."""
    table = run_preset(args.preset, _base_config(args.config), workers=args.workers)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{args.preset}.csv"
    svg_path = out / f"{args.preset}.svg"
    write_csv(table, csv_path)
    emit_plot(table, svg_path)
    logger.info(
        "Sweep written",
        extra={"event_type": "sweep_done", "param": args.preset, "path": str(csv_path)},
    )

    print(f"table={csv_path}")
    print(f"plot={svg_path}")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    """Compare the closed-form precoder SNR against the brute-force oracle."""
    worst = verify_closed_form(_base_config(args.config), samples=args.samples)
    print(f"max_rel_error={worst:.3e}")
    return EXIT_OK if worst <= VERIFY_TOLERANCE else EXIT_USAGE


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="ipsac",
        description="UAV trajectory and precoder planning for periodic sensing and communication.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--log-level",
        default="INFO",
        choices=("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"),
        help="Log level of the JSON log on stderr (default: INFO)",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    solve = commands.add_parser("solve", help="Plan one scheme and write its trajectory")
    solve.add_argument("--config", help="Scenario file (key = value lines)")
    solve.add_argument(
        "--scheme", default=Scheme.PROPOSED.value, choices=[s.value for s in Scheme]
    )
    solve.add_argument("--out", default=".", help="Output directory (default: .)")
    solve.set_defaults(handler=cmd_solve)

    sweep = commands.add_parser("sweep", help="Run a figure preset")
    sweep.add_argument("--preset", required=True, choices=sorted(PRESETS))
    sweep.add_argument("--config", help="Base scenario file")
    sweep.add_argument("--out", default=".", help="Output directory (default: .)")
    sweep.add_argument("--workers", type=_positive_int, default=1, help="Worker processes")
    sweep.set_defaults(handler=cmd_sweep)

    verify = commands.add_parser("verify", help="Check the closed-form precoder")
    verify.add_argument("--config", help="Scenario file")
    verify.add_argument("--samples", type=_positive_int, default=50)
    verify.set_defaults(handler=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    """Run the CLI and return its exit code (0 ok, 1 usage/parse, 2 infeasible)."""
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level)
    try:
        return args.handler(args)
    except IpsacError as exc:
        logger.error(
            exc.detail,
            extra={"event_type": "command_failed", "error": exc.code.value},
        )
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        logger.error(str(exc), extra={"event_type": "command_failed", "error": "OS_ERROR"})
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
