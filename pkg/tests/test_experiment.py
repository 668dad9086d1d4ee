"""Tests for sweeps, table output and the preset trends."""

import xml.etree.ElementTree as ET

import pytest

from ipsac.errors import ConfigError, ErrorCode, InfeasibleError
from ipsac.experiment import (
    PRESETS,
    emit_plot,
    plan,
    preset_specs,
    run_preset,
    run_sweep,
    verify_closed_form,
    write_csv,
)
from ipsac.schemas import ScenarioConfig, Scheme, SweepRow, SweepSpec, SweepTable
from ipsac.trajectory import evaluate

SVG = "{http://www.w3.org/2000/svg}"
HEADER = b"scheme,param,value,avg_rate_bpshz,gap_to_ub,flags\n"


def _rates(table, scheme, tag=""):
    return {
        row.value: row.avg_rate
        for row in table.rows
        if row.scheme is scheme and row.tag == tag and row.avg_rate is not None
    }


def _tags(table):
    return sorted({row.tag for row in table.rows})


def _assert_dominance(table):
    """UPPER_BOUND >= PROPOSED >= PRECODER_ONLY >= TIME_DIVISION at every shared value."""
    for tag in _tags(table):
        ub, proposed, po, td = (
            _rates(table, scheme, tag)
            for scheme in (
                Scheme.UPPER_BOUND,
                Scheme.PROPOSED,
                Scheme.PRECODER_ONLY,
                Scheme.TIME_DIVISION,
            )
        )
        common = ub.keys() & proposed.keys() & po.keys() & td.keys()
        assert common
        for value in common:
            assert ub[value] >= proposed[value] - 1e-9
            assert proposed[value] >= po[value] - 1e-9
            assert po[value] >= td[value] - 1e-9


@pytest.fixture(scope="module")
def fig3a():
    return run_preset("fig3a")


@pytest.fixture(scope="module")
def fig3b():
    return run_preset("fig3b")


@pytest.fixture(scope="module")
def fig3c():
    return run_preset("fig3c")


@pytest.fixture(scope="module")
def fig4():
    return run_preset("fig4")


# ---- CSV ----


class TestWriteCsv:
    def test_empty_table(self, tmp_path):
        path = tmp_path / "empty.csv"
        write_csv(SweepTable(), path)
        assert path.read_bytes() == HEADER

    def test_single_row(self, tmp_path):
        path = tmp_path / "single.csv"
        row = SweepRow(
            scheme=Scheme.PROPOSED,
            param="T_f",
            value=5.0,
            avg_rate=11.123456789123,
            gap_to_ub=0.25,
            tag="gamma_thr=6e-05",
        )
        write_csv(SweepTable(rows=(row,)), path)
        assert path.read_bytes() == HEADER + b"PROPOSED[gamma_thr=6e-05],T_f,5,11.1234568,0.25,\n"

    def test_infeasible_row(self, tmp_path):
        path = tmp_path / "infeasible.csv"
        row = SweepRow(
            scheme=Scheme.UPPER_BOUND,
            param="gamma_thr",
            value=5e-4,
            flags=("INFEASIBLE", "INFEASIBLE_SCENARIO"),
        )
        write_csv(SweepTable(rows=(row,)), path)
        assert path.read_bytes() == (
            HEADER + b"UPPER_BOUND,gamma_thr,0.0005,,,INFEASIBLE;INFEASIBLE_SCENARIO\n"
        )


# ---- Plot ----


class TestEmitPlot:
    def _table(self):
        rows = [
            SweepRow(scheme=scheme, param="V_max", value=v, avg_rate=r + offset)
            for scheme, offset in ((Scheme.UPPER_BOUND, 0.2), (Scheme.PROPOSED, 0.1))
            for v, r in ((10.0, 9.0), (20.0, 9.5), (30.0, 9.8))
        ]
        rows.append(SweepRow(scheme=Scheme.PRECODER_ONLY, param="V_max", value=10.0, avg_rate=8.0))
        return SweepTable(rows=tuple(rows))

    def _group(self, root, label):
        return next(g for g in root.iter(f"{SVG}g") if g.get("id") == f"series-{label}")

    def test_empty_table(self, tmp_path):
        with pytest.raises(ValueError):
            emit_plot(SweepTable(), tmp_path / "empty.svg")

    def test_well_formed_with_labels(self, tmp_path):
        path = tmp_path / "plot.svg"
        emit_plot(self._table(), path)
        root = ET.parse(path).getroot()
        assert root.tag == f"{SVG}svg"
        ids = {g.get("id") for g in root.iter(f"{SVG}g")}
        assert {"series-UPPER_BOUND", "series-PROPOSED", "series-PRECODER_ONLY"} <= ids

    def test_single_point_is_a_marker(self, tmp_path):
        path = tmp_path / "plot.svg"
        emit_plot(self._table(), path)
        root = ET.parse(path).getroot()

        lone = self._group(root, "PRECODER_ONLY")
        assert not [child for child in lone if child.tag == f"{SVG}path"]
        assert len(list(lone.iter(f"{SVG}use"))) == 1

        line = self._group(root, "PROPOSED")
        assert len([child for child in line if child.tag == f"{SVG}path"]) == 1
        assert len(list(line.iter(f"{SVG}use"))) == 3

    def test_deterministic(self, tmp_path):
        emit_plot(self._table(), tmp_path / "a.svg")
        emit_plot(self._table(), tmp_path / "b.svg")
        assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()


# ---- Sweeps ----


class TestRunSweep:
    def test_single_value_matches_direct_solve(self, default_cfg):
        spec = SweepSpec(swept_param="V_max", values=(30.0,), schemes=(Scheme.PROPOSED,))
        table = run_sweep(spec)
        assert len(table.rows) == 1
        assert table.rows[0].avg_rate == evaluate(plan(Scheme.PROPOSED, default_cfg)).avg_rate
        assert table.rows[0].gap_to_ub is None

    def test_invalid_values_are_skipped(self):
        spec = SweepSpec(
            swept_param="T_f", values=(3.0, 5.0), schemes=(Scheme.TIME_DIVISION,)
        )
        table = run_sweep(spec)
        assert [row.value for row in table.rows] == [5.0]

    def test_no_valid_value(self):
        spec = SweepSpec(swept_param="T_f", values=(3.0, 7.0))
        with pytest.raises(ConfigError):
            run_sweep(spec)

    def test_all_points_infeasible(self):
        spec = SweepSpec(swept_param="gamma_thr", values=(5e-4, 1e-3))
        with pytest.raises(InfeasibleError) as exc:
            run_sweep(spec)
        assert exc.value.code is ErrorCode.INFEASIBLE_SCENARIO

    def test_infeasible_points_are_flagged(self):
        spec = SweepSpec(
            swept_param="gamma_thr",
            values=(6e-5, 5e-4),
            schemes=(Scheme.UPPER_BOUND, Scheme.PRECODER_ONLY),
        )
        table = run_sweep(spec)
        assert [row.scheme for row in table.rows] == [
            Scheme.UPPER_BOUND,
            Scheme.PRECODER_ONLY,
            Scheme.UPPER_BOUND,
            Scheme.PRECODER_ONLY,
        ]
        feasible, infeasible = table.rows[:2], table.rows[2:]
        assert feasible[1].gap_to_ub == pytest.approx(
            feasible[0].avg_rate - feasible[1].avg_rate
        )
        assert all(row.avg_rate is None for row in infeasible)
        assert all("INFEASIBLE" in row.flags for row in infeasible)

    def test_distance_sweep_moves_endpoints(self):
        spec = SweepSpec(swept_param="D", values=(300.0,), schemes=(Scheme.PROPOSED,))
        table = run_sweep(spec)
        assert table.rows[0].avg_rate is not None
        assert table.rows[0].flags == ()


# ---- Presets ----


class TestPresets:
    def test_preset_names(self):
        assert sorted(PRESETS) == ["fig3a", "fig3b", "fig3c", "fig4"]

    def test_tagged_presets_expand(self):
        specs = preset_specs("fig3b")
        assert [spec.tag for spec in specs] == ["T_f=5", "T_f=1"]
        assert [spec.base.T_f for spec in specs] == [5.0, 1.0]
        assert len(preset_specs("fig4")) == 1

    def test_fig3a_dominance(self, fig3a):
        _assert_dominance(fig3a)
        for tag in _tags(fig3a):
            proposed = _rates(fig3a, Scheme.PROPOSED, tag)
            assert proposed[1.0] > _rates(fig3a, Scheme.TIME_DIVISION, tag)[1.0]

    def test_fig3a_rate_falls_with_sensing_frequency(self, fig3a):
        for tag in _tags(fig3a):
            rates = _rates(fig3a, Scheme.PROPOSED, tag)
            ordered = [rates[v] for v in sorted(rates)]
            assert all(b >= a - 1e-6 for a, b in zip(ordered, ordered[1:]))

    def test_fig3a_near_optimal_at_baseline(self, fig3a):
        ub = _rates(fig3a, Scheme.UPPER_BOUND, "gamma_thr=6e-05")[5.0]
        proposed = _rates(fig3a, Scheme.PROPOSED, "gamma_thr=6e-05")[5.0]
        assert (ub - proposed) / ub <= 0.05

    def test_fig3a_reproducible_across_workers(self, fig3a, tmp_path):
        write_csv(fig3a, tmp_path / "serial.csv")
        write_csv(run_preset("fig3a", workers=2), tmp_path / "parallel.csv")
        assert (tmp_path / "serial.csv").read_bytes() == (tmp_path / "parallel.csv").read_bytes()

    def test_fig3b_rate_falls_with_threshold(self, fig3b):
        for tag in _tags(fig3b):
            rates = _rates(fig3b, Scheme.PROPOSED, tag)
            ordered = [rates[v] for v in sorted(rates)]
            assert len(ordered) >= 2
            assert all(b <= a + 1e-6 for a, b in zip(ordered, ordered[1:]))

    def test_fig3b_largest_threshold_is_infeasible(self, fig3b):
        assert all(row.avg_rate is None for row in fig3b.rows if row.value == 5e-4)

    def test_fig3c_dominance(self, fig3c):
        _assert_dominance(fig3c)
        assert _tags(fig3c) == ["gamma_thr=0.0001", "gamma_thr=6e-05"]
        assert all(row.avg_rate is not None for row in fig3c.rows)

    def test_fig3c_threshold_matters_little_at_short_distance(self, fig3c):
        low = _rates(fig3c, Scheme.PROPOSED, "gamma_thr=6e-05")[50.0]
        high = _rates(fig3c, Scheme.PROPOSED, "gamma_thr=0.0001")[50.0]
        assert high <= low + 1e-9
        assert (low - high) / low <= 5e-3

    def test_fig4_gain_grows_with_speed(self, fig4):
        proposed = _rates(fig4, Scheme.PROPOSED)
        baseline = _rates(fig4, Scheme.PRECODER_ONLY)
        gaps = [proposed[v] - baseline[v] for v in sorted(proposed.keys() & baseline.keys())]
        assert all(b >= a - 1e-6 for a, b in zip(gaps, gaps[1:]))


# ---- Closed-form check ----


class TestVerify:
    def test_small_sample(self):
        assert verify_closed_form(ScenarioConfig(), samples=3, grid_n=2000) <= 1e-4
