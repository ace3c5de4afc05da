import io
import xml.etree.ElementTree as ET

import pytest

from tritter_qcrb import sweep
from tritter_qcrb.config import ScenarioConfig
from tritter_qcrb.errors import ConfigError
from tritter_qcrb.moments import vacuum_moments
from tritter_qcrb.output import csv_text, emit_csv, emit_plot, format_cell
from tritter_qcrb.scenario import Scenario

HEADER = "scenario,engine,probe,N,r_a,r_b,r_c,eta,sigma,qcrb,mean_n0,var_n0,var_n1,cov01,g2_intra_0,g2_inter_01,discrepancy"


def cfg(**kw):
    kw.setdefault("probe", "w_state")
    kw.setdefault("N_range", (1,))
    kw.setdefault("gains", (0.0, 0.0, 0.0))
    kw.setdefault("tag", "t")
    return ScenarioConfig(**kw)


def sentinel_row():
    return sweep._make_row(cfg(), "cfpoly", Scenario("w_state", 1), vacuum_moments(), None)


class TestRunScenario:
    def test_w1_qcrb(self):
        (row,) = sweep.run_scenario(cfg())
        assert row.qcrb == pytest.approx(3.0, abs=1e-12)
        assert row.var_n0 == pytest.approx(2 / 9) and row.cov01 == pytest.approx(-1 / 9)

    def test_both_engines(self):
        rows = sweep.run_scenario(cfg(N_range=(2,), gains=(0.5, 0.5, 0.5), engine="both"))
        assert [r.engine for r in rows] == ["cfpoly", "focksim"]
        assert all(r.discrepancy < 1e-6 for r in rows)
        assert rows[0].qcrb == pytest.approx(rows[1].qcrb, rel=1e-9)

    def test_one_row_per_n(self):
        rows = sweep.run_scenario(cfg(N_range=(3, 1, 2)))
        assert [r.N for r in rows] == [1, 2, 3]

    def test_fixed_sigma_reported(self):
        (row,) = sweep.run_scenario(cfg(N_range=(2,), eta=0.8, sigma_mode="fixed", sigma_value=0.25))
        assert row.sigma == 0.25

    def test_singular_sentinel(self):
        row = sentinel_row()
        assert row.qcrb is None and "identifiable" in row.diagnostic

    def test_parallel_matches_serial(self):
        configs = sweep.figure_preset("fig5a")
        configs = [c.with_overrides(N_range=(1, 2, 3)) for c in configs]
        assert csv_text(sweep.run_configs(configs, 1)) == csv_text(sweep.run_configs(configs, 3))


class TestPresets:
    def test_fig2a(self):
        configs = sweep.figure_preset("fig2a")
        assert len(configs) == 3
        assert {c.gains for c in configs} == {(0, 0, 0), (0.25,) * 3, (0.5,) * 3}
        assert all(c.N_range == tuple(range(1, 21)) and c.eta == 1 for c in configs)

    def test_fig5b(self):
        configs = sweep.figure_preset("fig5b")
        assert len(configs) == 2 and all(c.N_range == (10,) for c in configs)
        assert {c.eta for c in configs} == {1.0, 0.6}
        assert len(configs[0].gain_points) == 21

    def test_fig4b_fixed_n(self):
        configs = sweep.figure_preset("fig4b")
        assert {c.probe for c in configs} == {"w_state", "separable_fock"}
        assert all(c.N_range == (10,) for c in configs)

    def test_fig2b_mode_selective(self):
        assert {c.gains for c in sweep.figure_preset("fig2b")} == {(0, 0, 0), (0.5, 0, 0), (0, 0, 0.5)}

    def test_unknown(self):
        with pytest.raises(ConfigError, match="fig2a"):
            sweep.figure_preset("fig9")

    def test_ordinate_for_every_preset(self):
        assert set(sweep.PRESET_ORDINATE) == set(sweep.PRESETS)


class TestJobs:
    def test_env(self, monkeypatch):
        monkeypatch.setenv(sweep.JOBS_ENV, "3")
        assert sweep.default_jobs() == 3

    @pytest.mark.parametrize("value", ["0", "many"])
    def test_bad_env(self, monkeypatch, value):
        monkeypatch.setenv(sweep.JOBS_ENV, value)
        with pytest.raises(ConfigError):
            sweep.default_jobs()


class TestCSV:
    @pytest.mark.parametrize(
        "value,text",
        [(None, ""), (3, "3"), (3.0, "3.0"), (2 / 9, "0.222222222222"), (1e-13, "1e-13"), (float("nan"), ""), (-0.0, "0.0")],
    )
    def test_cells(self, value, text):
        assert format_cell(value) == text

    def test_header_only(self, tmp_path):
        path = tmp_path / "empty.csv"
        emit_csv([], path)
        assert path.read_bytes() == (HEADER + "\n").encode()

    def test_layout(self):
        rows = sweep.run_scenario(cfg(N_range=(1, 2)))
        lines = csv_text(rows).splitlines()
        assert lines[0] == HEADER
        assert all(len(l.split(",")) == 17 for l in lines)
        assert lines[1].startswith("t,cfpoly,w_state,1,0.0,0.0,0.0,1.0,0.0,3.0,")

    def test_stream(self):
        buf = io.StringIO()
        emit_csv([], buf)
        assert buf.getvalue() == HEADER + "\n"

    def test_byte_identical_reruns(self, tmp_path):
        c = cfg(N_range=(1, 2, 3), gains=(0.5, 0.0, 0.25), eta=0.7)
        for name in ("a.csv", "b.csv"):
            emit_csv(sweep.run_scenario(c), tmp_path / name)
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
        assert b"\r" not in (tmp_path / "a.csv").read_bytes()

    def test_sentinel_sidecar(self, tmp_path):
        path = tmp_path / "s.csv"
        emit_csv([sentinel_row()], path)
        cells = path.read_text().splitlines()[1].split(",")
        assert cells[9] == ""
        log = (tmp_path / "s.csv.log").read_text()
        assert "identifiable" in log and "N=1" in log

    def test_stale_sidecar_removed(self, tmp_path):
        path = tmp_path / "s.csv"
        emit_csv([sentinel_row()], path)
        emit_csv([], path)
        assert not (tmp_path / "s.csv.log").exists()


class TestPlot:
    def _curves(self, path):
        root = ET.parse(path).getroot()
        return [g for g in root.iter("{http://www.w3.org/2000/svg}g") if g.get("id", "").startswith("line2d")]

    def test_three_curves(self, tmp_path):
        configs = [c.with_overrides(N_range=(1, 2, 3)) for c in sweep.figure_preset("fig2a")]
        rows = sweep.run_configs(configs, 1)
        emit_plot(rows, tmp_path / "f.svg")
        assert len(sweep.curves(rows, "qcrb")) == 3
        assert (tmp_path / "f.svg").read_text().lstrip().startswith("<?xml")

    def test_single_row(self, tmp_path):
        emit_plot(sweep.run_scenario(cfg()), tmp_path / "one.svg")
        assert (tmp_path / "one.svg").stat().st_size > 0

    def test_empty(self, tmp_path):
        with pytest.raises(ValueError, match="nothing to plot"):
            emit_plot([], tmp_path / "x.svg")

    def test_deterministic(self, tmp_path):
        rows = sweep.run_scenario(cfg(N_range=(1, 2, 3)))
        emit_plot(rows, tmp_path / "a.svg")
        emit_plot(rows, tmp_path / "b.svg")
        assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()

    def test_r_abscissa(self):
        rows = sweep.run_scenario(cfg(N_range=(4,), r_sweep=(0.0, 0.1, 0.2)))
        ((x, y, label),) = sweep.curves(rows, "qcrb").values()
        assert label == "r" and list(x) == [0.0, 0.1, 0.2]
