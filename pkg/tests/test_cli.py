"""Tests for the ipsac command-line interface."""

import logging

import pytest

from ipsac import main as cli
from ipsac.logging_config import LOGGER_NAME
from ipsac.schemas import Scheme, SweepRow, SweepTable


@pytest.fixture(autouse=True)
def reset_logging():
    """Drop handlers bound to a captured stderr between tests."""
    yield
    logging.getLogger(LOGGER_NAME).handlers.clear()


def _write(tmp_path, text):
    path = tmp_path / "scenario.cfg"
    path.write_text(text, encoding="utf-8")
    return str(path)


# ---- solve ----


class TestSolve:
    def test_writes_trajectory(self, tmp_path, capsys):
        code = cli.main(
            ["solve", "--scheme", "TIME_DIVISION", "--out", str(tmp_path), "--log-level", "ERROR"]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "avg_rate_bpshz=" in out
        csv_path = tmp_path / "trajectory_time_division.csv"
        assert csv_path.read_text().startswith("t_start,t_end,x_start,x_end,mode,policy\n")

    def test_infeasible_scenario_exit_code(self, tmp_path, capsys):
        config = _write(tmp_path, "gamma_thr = 5e-4\n")
        assert cli.main(["solve", "--config", config, "--out", str(tmp_path)]) == 2
        assert "INFEASIBLE_SCENARIO" in capsys.readouterr().err

    def test_invalid_config_exit_code(self, tmp_path, capsys):
        config = _write(tmp_path, "T_f = 3\n")
        assert cli.main(["solve", "--config", config, "--out", str(tmp_path)]) == 1
        assert "CONFIG_VALIDATION" in capsys.readouterr().err

    def test_missing_config_file(self, tmp_path):
        assert cli.main(["solve", "--config", str(tmp_path / "nope.cfg")]) == 1


# ---- sweep ----


class TestSweep:
    def test_writes_table_and_plot(self, tmp_path, monkeypatch, capsys):
        table = SweepTable(
            rows=(
                SweepRow(scheme=Scheme.PROPOSED, param="V_max", value=10.0, avg_rate=9.0),
                SweepRow(scheme=Scheme.PROPOSED, param="V_max", value=20.0, avg_rate=9.5),
            )
        )
        calls = []

        def fake_run_preset(name, base, workers):
            calls.append((name, workers))
            return table

        monkeypatch.setattr(cli, "run_preset", fake_run_preset)
        code = cli.main(["sweep", "--preset", "fig4", "--out", str(tmp_path), "--workers", "3"])
        assert code == 0
        assert calls == [("fig4", 3)]
        assert (tmp_path / "fig4.csv").read_text().count("\n") == 3
        assert (tmp_path / "fig4.svg").read_text().lstrip().startswith("<?xml")
        assert "table=" in capsys.readouterr().out


# ---- verify ----


class TestVerify:
    def test_reports_error(self, capsys):
        assert cli.main(["verify", "--samples", "2"]) == 0
        assert "max_rel_error=" in capsys.readouterr().out


# ---- Usage ----


class TestUsage:
    @pytest.mark.parametrize(
        "argv",
        [
            [],
            ["launch"],
            ["sweep", "--preset", "fig9"],
            ["verify", "--samples", "0"],
            ["solve", "--scheme", "GREEDY"],
        ],
    )
    def test_usage_errors_exit_with_one(self, argv):
        with pytest.raises(SystemExit) as exc:
            cli.main(argv)
        assert exc.value.code == 1

    def test_help_exits_cleanly(self):
        with pytest.raises(SystemExit) as exc:
            cli.main(["--help"])
        assert exc.value.code == 0
