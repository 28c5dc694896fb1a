import csv
import json

import pytest

from src.core.config import (ConfigManager, DiffuserSection, FiberSection, GratingSection, GridSection, RunSection,
                             ScanSection, ScenarioConfig, ScenarioSection, SpdcSection)
from src.core.errors import ExperimentError
from src.core.types import Experiment, Medium
from src.fiber.cache import ModeCache
from src.io.formats import read_qtpf
from src.runner import run
from src.runner.cli import main


def fiber_config(out, experiment=Experiment.CORRELATION_SCAN, **spdc) -> ScenarioConfig:
    return ScenarioConfig(
        scenario=ScenarioSection("small-fiber", Medium.FIBER_STEP, experiment),
        grid=GridSection(96, 0.25),
        fiber=FiberSection(core_radius_um=4.0, numerical_aperture=0.2, length_cm=10.0),
        spdc=SpdcSection(**spdc),
        scan=ScanSection(center_wavelength_nm=810.0, detunings_nm=(0.0, 1.0, 2.0), realizations=3),
        run=RunSection(seed=1, output_dir=str(out)),
    )


def diffuser_config(out, experiment=Experiment.CORRELATION_SCAN) -> ScenarioConfig:
    return ScenarioConfig(
        scenario=ScenarioSection("small-diffuser", Medium.DIFFUSER, experiment),
        grid=GridSection(64, 2.0),
        scan=ScanSection(center_wavelength_nm=808.0, detunings_nm=(0.0, 10.0), realizations=2, sum_band_nm=10.0),
        diffuser=DiffuserSection(macro_pixel_samples=8, thickness_max_waves=10.0, illumination_waist_samples=8.0),
        run=RunSection(seed=2, output_dir=str(out)),
    )


def grating_config(out) -> ScenarioConfig:
    return ScenarioConfig(
        scenario=ScenarioSection("small-grating", Medium.GRATING, Experiment.GRATING_ORDERS),
        grid=GridSection(256, 1.25),
        scan=ScanSection(center_wavelength_nm=808.0, detunings_nm=(0.0,), realizations=1),
        grating=GratingSection(period_um=20.0, beam_waist_periods=4.0, band_nm=10.0, band_step_nm=10.0),
        run=RunSection(output_dir=str(out)),
    )


def output_names(manifest):
    return [record.path for record in manifest.outputs]


class TestFiberRun:
    @pytest.fixture(scope="class")
    def cache(self):
        return ModeCache()

    def test_writes_expected_artifacts(self, tmp_path, cache):
        manifest = run(fiber_config(tmp_path), cache)
        assert output_names(manifest) == ["classical_sum.pgm", "classical_sum.txt", "config.ini", "pcc_curve.csv",
                                          "spdc_sum.pgm", "spdc_sum.txt"]
        assert not manifest.partial
        recorded = json.loads((tmp_path / "manifest.json").read_text())
        assert recorded["config_hash"] == manifest.config_hash
        assert recorded["seed"] == 1

    def test_same_config_same_bytes(self, tmp_path, cache):
        first = {r.path: r.sha256 for r in run(fiber_config(tmp_path), cache).outputs}
        second = {r.path: r.sha256 for r in run(fiber_config(tmp_path), cache).outputs}
        assert first == second

    def test_saved_config_reloads(self, tmp_path, cache):
        config = fiber_config(tmp_path)
        run(config, cache)
        assert ConfigManager.load(tmp_path / "config.ini") == config

    def test_incoherent_sum(self, tmp_path, cache):
        manifest = run(fiber_config(tmp_path, Experiment.INCOHERENT_SUM), cache)
        names = output_names(manifest)
        assert "contrast.csv" in names
        assert "spdc_sum.qtpf" in names
        values, _ = read_qtpf(tmp_path / "spdc_sum.qtpf")
        assert values.shape == (96, 96)

    def test_pump_bandwidth_reaches_phase_residuals(self, tmp_path, cache):
        tables = {}
        for bandwidth in (0.0, 0.05):
            out = tmp_path / f"bw{bandwidth}"
            config = fiber_config(out, pump_bandwidth_nm=bandwidth)
            config.study.residuals = True
            run(config, cache)
            with open(out / "phase_residuals.csv", newline="") as f:
                tables[bandwidth] = list(csv.DictReader(f))
        plain, broad = tables[0.0], tables[0.05]
        assert all(row["two_photon_plus"] == row["two_photon_minus"] for row in plain)
        assert all(row["two_photon_plus"] != row["two_photon_minus"] for row in broad)
        assert [row["exact_two_photon_plus"] for row in plain] != [row["exact_two_photon_plus"] for row in broad]

    def test_failure_leaves_partial_manifest(self, tmp_path, cache):
        config = fiber_config(tmp_path, Experiment.PHASE_MATCHING_STUDY, pump_waist_um=0.2,
                              crystal_lengths_mm=(0.001,))
        with pytest.raises(ExperimentError) as info:
            run(config, cache)
        assert info.value.manifest.partial
        recorded = json.loads((tmp_path / "manifest.json").read_text())
        assert recorded["partial"] is True
        assert recorded["error"].startswith("UnderSamplingError")


class TestScreenRuns:
    def test_diffuser_scan(self, tmp_path):
        manifest = run(diffuser_config(tmp_path))
        names = output_names(manifest)
        assert {"pcc_curve.csv", "screen.qtpf", "screen.txt", "spdc_sum.pgm"} <= set(names)
        thickness, pitch = read_qtpf(tmp_path / "screen.qtpf")
        assert thickness.shape == (8, 8)
        assert pitch == pytest.approx(16e-6, rel=1e-6)

    def test_grating_orders(self, tmp_path):
        manifest = run(grating_config(tmp_path))
        assert "orders.csv" in output_names(manifest)
        lines = (tmp_path / "orders.csv").read_text().splitlines()
        assert lines[0] == "delta_lambda_nm,order,channel,center_m,weight_analytical,weight_numerical"
        # 3 detunings x (7 classical orders + 1 pair order)
        assert len(lines) == 1 + 3 * 8


class TestCli:
    def test_validate_preset(self, capsys):
        assert main(["validate", "fig2"]) == 0
        assert "Config OK" in capsys.readouterr().out

    def test_unknown_scenario_is_usage_error(self):
        assert main(["run", "no-such-preset"]) == 2

    def test_invalid_config_fails(self, tmp_path, capsys):
        path = tmp_path / "bad.ini"
        path.write_text("[fiber]\nnumerical_aperture = 0\n")
        assert main(["validate", str(path)]) == 1
        assert "fiber.numerical_aperture" in capsys.readouterr().err

    def test_presets_listing(self, tmp_path, capsys):
        assert main(["presets", "--write", str(tmp_path)]) == 0
        assert "fig3-4" in capsys.readouterr().out
        assert len(list(tmp_path.glob("*.ini"))) == 6

    def test_run_with_overrides(self, tmp_path):
        path = tmp_path / "grating.ini"
        ConfigManager.save(grating_config(tmp_path / "ignored"), path)
        assert main(["run", str(path), "--out", str(tmp_path / "out"), "--seed", "5"]) == 0
        assert (tmp_path / "out" / "manifest.json").exists()
        assert json.loads((tmp_path / "out" / "manifest.json").read_text())["seed"] == 5
