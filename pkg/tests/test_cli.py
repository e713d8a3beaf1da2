import json

import numpy as np
import pytest

from cyclemodes.cli import EXIT_DEGENERATE, EXIT_INPUT, EXIT_OK, RunConfig, main
from cyclemodes.panel import save_panel
from cyclemodes.synthetic import planted_lag_panel, white_noise_panel


@pytest.fixture(scope="module")
def panel_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "panel.csv"
    panel = planted_lag_panel(np.random.default_rng(3), n_months=121, n_goods=5,
                              period=60.0)
    save_panel(panel, path)
    return str(path)


def base_args(panel_csv, outdir, *extra):
    return ["--panel", panel_csv, "--out", str(outdir),
            "--trials", "100", "--null-trials", "40",
            "--t-min", "24", "--t-max", "100", "--t-step", "0.05",
            "--boundary", "1997-12", *extra]


EXPECTED_ALL = [
    "summary.json", "config.json",
    "ingest/panel_echo.csv", "ingest/growth.csv", "ingest/autocorrelation.csv",
    "spectrum/spectrum.csv", "spectrum/continuous.csv", "spectrum/peaks.csv",
    "factors/eigen_report.csv", "factors/eigenvectors.csv",
    "factors/mp_density.csv", "factors/null_pdf.csv", "factors/null_stats.json",
    "modes/mode_coefficients.csv", "modes/mode_spectrum.csv",
    "modes/binned_contributions.csv", "modes/cycles.csv",
    "modes/cycle_comparison.csv",
    "leadlag/leadlag.json",
    "xspec/xspec_two_mode_sp.csv", "xspec/xspec_two_mode_pi.csv",
    "xspec/xspec_all_mode_sp.csv", "xspec/xspec_all_mode_pi.csv",
    "xspec/delays.json",
    "oos/volatility.csv",
]


@pytest.fixture(scope="module")
def run_dir(panel_csv, tmp_path_factory):
    out = tmp_path_factory.mktemp("run")
    assert main(["all", *base_args(panel_csv, out)]) == EXIT_OK
    return out


class TestAllCommand:
    def test_expected_files_exist(self, run_dir):
        for rel in EXPECTED_ALL:
            assert (run_dir / rel).is_file(), rel

    def test_metadata_headers(self, run_dir):
        for rel in EXPECTED_ALL:
            if not rel.endswith(".csv"):
                continue
            head = (run_dir / rel).read_text().splitlines()[:8]
            assert any(line.startswith("# tool: cyclemodes") for line in head), rel
            assert any(line.startswith("# config_hash:") for line in head), rel
            assert any(line.startswith("# seed:") for line in head), rel
            assert any(line.startswith("# input_digest_panel:") for line in head), rel

    def test_summary_content(self, run_dir):
        summary = json.loads((run_dir / "summary.json").read_text())
        assert summary["schema_version"] == 1
        stages = summary["stages"]
        assert set(stages) == {"ingest", "spectrum", "factors", "modes",
                               "leadlag", "xspec", "oos"}
        assert stages["factors"]["significant_modes"] == [1, 2]
        assert stages["spectrum"]["power_sum"] == pytest.approx(120.0, rel=1e-3)
        assert stages["oos"]["normalization"] == "frozen"
        assert "SP_k4" in stages["leadlag"]["observed"]

    def test_xspec_report_echoes_formulas(self, run_dir):
        text = (run_dir / "xspec/xspec_two_mode_sp.csv").read_text()
        assert "# significance_formula: c = 1 - alpha^(1/(m-1)), m = eq_dof/2" in text
        assert "# phase_ci_formula:" in text
        assert "# kernel_weights: 0.05 0.1" in text

    def test_determinism_byte_identical(self, panel_csv, run_dir, tmp_path_factory):
        other = tmp_path_factory.mktemp("run-again")
        assert main(["all", *base_args(panel_csv, other)]) == EXIT_OK
        assert ((run_dir / "summary.json").read_bytes()
                == (other / "summary.json").read_bytes())


class TestStandaloneStages:
    @pytest.mark.parametrize("command,expect", [
        ("ingest", "ingest/growth.csv"),
        ("spectrum", "spectrum/spectrum.csv"),
        ("factors", "factors/eigen_report.csv"),
        ("modes", "modes/cycles.csv"),
        ("leadlag", "leadlag/leadlag.json"),
        ("xspec", "xspec/delays.json"),
        ("oos", "oos/volatility.csv"),
    ])
    def test_stage_runs_alone(self, panel_csv, tmp_path, command, expect):
        assert main([command, *base_args(panel_csv, tmp_path)]) == EXIT_OK
        assert (tmp_path / expect).is_file()
        assert not (tmp_path / "summary.json").exists()


class TestConfigHandling:
    def test_config_file_with_flag_override(self, panel_csv, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "panel": panel_csv, "trials": 100, "null_trials": 0,
            "t_min": 24.0, "t_max": 100.0, "t_step": 0.1, "seed": 999,
        }))
        out = tmp_path / "out"
        assert main(["factors", "--config", str(cfg), "--out", str(out),
                     "--seed", "1000"]) == EXIT_OK
        head = (out / "factors/eigen_report.csv").read_text().splitlines()[:6]
        assert any(line == "# seed: 1000" for line in head)
        assert not (out / "factors/null_pdf.csv").exists()  # null_trials 0

    def test_unknown_config_key_rejected(self, panel_csv, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"panel": panel_csv, "bogus": 1}))
        assert main(["factors", "--config", str(cfg),
                     "--out", str(tmp_path)]) == EXIT_INPUT

    def test_missing_panel_is_input_error(self, tmp_path):
        assert main(["spectrum", "--out", str(tmp_path)]) == EXIT_INPUT

    def test_bad_panel_file_is_input_error(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("date,variable,good,value\n1988-01,production,1,-5\n")
        assert main(["ingest", "--panel", str(bad),
                     "--out", str(tmp_path)]) == EXIT_INPUT

    def test_outdir_env_default(self, panel_csv, tmp_path, monkeypatch):
        monkeypatch.setenv("CYCLEMODES_OUTDIR", str(tmp_path / "env-out"))
        assert main(["ingest", "--panel", panel_csv, "--trials", "100"]) == EXIT_OK
        assert (tmp_path / "env-out" / "ingest" / "growth.csv").is_file()

    def test_config_hash_ignores_outdir(self, panel_csv):
        a = RunConfig(panel=panel_csv, outdir="/a")
        b = RunConfig(panel=panel_csv, outdir="/b")
        assert a.config_hash() == b.config_hash()


class TestOptionalInputs:
    def test_goods_table_and_aux_overlay(self, panel_csv, tmp_path):
        goods = tmp_path / "goods.csv"
        goods.write_text("id,label,category\n" + "".join(
            f"{g},Good {g},Category\n" for g in range(1, 6)))
        aux = tmp_path / "aux.csv"
        aux.write_text("date,value\n" + "".join(
            f"1997-{m:02d},{100 + m}\n" for m in range(1, 13)))
        out = tmp_path / "out"
        assert main(["oos", *base_args(panel_csv, out),
                     "--goods", str(goods), "--aux", str(aux)]) == EXIT_OK
        overlay = (out / "oos/overlay.csv").read_text().splitlines()
        header_at = next(i for i, l in enumerate(overlay) if not l.startswith("#"))
        assert overlay[header_at].startswith("date,aux,P")
        assert len(overlay) - header_at - 1 == 12


class TestExitCodes:
    def test_degenerate_simulation_exit(self, tmp_path):
        # white noise panel + strict overlap acceptance: no trial survives
        path = tmp_path / "noise.csv"
        save_panel(white_noise_panel(np.random.default_rng(8), n_months=80,
                                     n_goods=4), path)
        rc = main(["leadlag", "--panel", str(path), "--out", str(tmp_path),
                   "--trials", "100", "--accept", "mp_overlap",
                   "--overlap-threshold", "0.9999"])
        assert rc == EXIT_DEGENERATE

    def test_dump_null_samples(self, panel_csv, tmp_path):
        assert main(["leadlag", *base_args(panel_csv, tmp_path),
                     "--dump-null-samples"]) == EXIT_OK
        lines = (tmp_path / "leadlag/null_samples.csv").read_text().splitlines()
        header_at = next(i for i, l in enumerate(lines) if not l.startswith("#"))
        assert lines[header_at] == "variant,pair,k,value"
        assert len(lines) > header_at + 100
