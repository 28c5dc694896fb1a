import numpy as np
import pytest

from src.core.errors import ConfigurationError, UnderSamplingError
from src.core.presets import preset
from src.core.rng import philox
from src.core.types import Channel, Medium
from src.fiber.cache import ModeCache
from src.optics.field import RegionOfInterest
from src.optics.metrics import speckle_contrast
from src.optics.spectral import pair_wavelengths
from src.runner import planner
from src.twophoton.residuals import phase_residuals, second_difference
from src.twophoton.scan import (CorrelationCurve, DetuningScan, FiberScenario, apply_defocus_study,
                                phase_matching_study, run_detuning_scan)
from src.twophoton.speckle import (advanced_wave_amplitude, coincidence_amplitude, coincidence_fiber_speckle,
                                   detector_mode_at, random_detector_position)
from src.twophoton.state import (SpdcSpec, TwoPhotonModeState, cnm_finite_phase_matching, cnm_thin_crystal,
                                 defocus_cnm)

from conftest import WAVELENGTH


@pytest.fixture(scope="module")
def pair_bases(step_fiber, small_grid, mode_cache):
    plus, minus = pair_wavelengths(WAVELENGTH, 2e-9)
    return mode_cache(step_fiber, plus, small_grid), mode_cache(step_fiber, minus, small_grid)


@pytest.fixture(scope="module")
def detector(small_grid):
    return detector_mode_at((1.2e-6, -0.7e-6), small_grid, WAVELENGTH)


class TestSpdcSpec:
    @pytest.mark.parametrize("kwargs", [
        dict(pump_wavelength=0.0),
        dict(pump_wavelength=405e-9, crystal_length=-1e-3),
        dict(pump_wavelength=405e-9, pump_waist=0.0),
        dict(pump_wavelength=405e-9, magnification=0.0),
        dict(pump_wavelength=405e-9, pump_bandwidth=-1.0),
        dict(pump_wavelength=405e-9, crystal_index=0.5),
    ])
    def test_rejects_bad_parameters(self, kwargs):
        with pytest.raises(ConfigurationError):
            SpdcSpec(**kwargs)

    def test_defaults_are_thin(self):
        spec = SpdcSpec(405e-9)
        assert spec.is_thin
        assert spec.central_wavelength == pytest.approx(810e-9)
        assert not SpdcSpec(405e-9, crystal_length=1e-3).is_thin


class TestThinCrystal:
    def test_degenerate_state_is_identity(self, step_basis):
        state = cnm_thin_crystal(step_basis, step_basis)
        np.testing.assert_array_equal(state.coefficients, np.eye(len(step_basis)))
        assert state.thin

    def test_nondegenerate_state_is_nearly_diagonal(self, pair_bases):
        state = cnm_thin_crystal(*pair_bases)
        assert state.diagonal_power_fraction() > 0.99

    def test_coefficients_are_read_only(self, step_basis):
        state = cnm_thin_crystal(step_basis, step_basis)
        with pytest.raises(ValueError):
            state.coefficients[0, 0] = 0.0

    def test_shape_checked(self, step_basis):
        with pytest.raises(ConfigurationError):
            TwoPhotonModeState(np.eye(3), 0.0, step_basis, step_basis)


class TestFinitePhaseMatching:
    def test_short_crystal_approaches_thin(self, step_basis):
        spec = SpdcSpec(405e-9, crystal_length=1e-6, pump_waist=500e-6, magnification=10.0)
        state = cnm_finite_phase_matching(step_basis, step_basis, spec)
        assert state.frobenius_norm == pytest.approx(1.0)
        np.testing.assert_allclose(state.coefficients, np.eye(len(step_basis)) / np.sqrt(len(step_basis)),
                                   atol=1e-3)

    def test_long_crystal_stays_normalised(self, step_basis):
        spec = SpdcSpec(405e-9, crystal_length=16e-3, pump_waist=500e-6, magnification=10.0)
        state = cnm_finite_phase_matching(step_basis, step_basis, spec)
        assert state.frobenius_norm == pytest.approx(1.0)

    def test_tight_pump_is_under_sampled(self, step_basis):
        spec = SpdcSpec(405e-9, crystal_length=1e-6, pump_waist=0.2e-6)
        with pytest.raises(UnderSamplingError):
            cnm_finite_phase_matching(step_basis, step_basis, spec)


class TestCoincidenceAmplitude:
    def test_double_pass_matches_direct_sum(self, pair_bases, detector):
        state = cnm_thin_crystal(*pair_bases)
        direct = coincidence_amplitude(state, detector).values
        double_pass = advanced_wave_amplitude(state, detector).values
        np.testing.assert_allclose(double_pass, direct, atol=1e-9 * np.abs(direct).max())

    def test_double_pass_with_general_state(self, pair_bases, detector):
        rng = philox(7)
        bp, bm = pair_bases
        C = rng.normal(size=(len(bp), len(bm))) + 1j * rng.normal(size=(len(bp), len(bm)))
        state = TwoPhotonModeState(C, 0.0, bp, bm)
        direct = coincidence_amplitude(state, detector).values
        double_pass = advanced_wave_amplitude(state, detector).values
        np.testing.assert_allclose(double_pass, direct, atol=1e-9 * np.abs(direct).max())

    def test_defocused_double_pass_matches_defocused_state(self, pair_bases, detector):
        dz = 20e-6
        direct = coincidence_amplitude(defocus_cnm(*pair_bases, dz), detector).values
        double_pass = advanced_wave_amplitude(cnm_thin_crystal(*pair_bases), detector, dz=dz).values
        np.testing.assert_allclose(double_pass, direct, atol=1e-9 * np.abs(direct).max())

    def test_zero_defocus_is_thin(self, pair_bases):
        assert defocus_cnm(*pair_bases, 0.0).thin

    def test_global_phase_leaves_pattern_unchanged(self, pair_bases, detector):
        state = cnm_thin_crystal(*pair_bases)
        a = coincidence_fiber_speckle(state, detector).values
        b = coincidence_fiber_speckle(state.with_phase(1.3), detector).values
        np.testing.assert_allclose(b, a, atol=1e-12 * a.max())

    def test_defocus_needs_thin_state(self, pair_bases, detector):
        bp, bm = pair_bases
        state = TwoPhotonModeState(np.ones((len(bp), len(bm))), 0.0, bp, bm)
        with pytest.raises(ConfigurationError):
            advanced_wave_amplitude(state, detector, dz=10e-6)


class TestDetectorPlacement:
    def test_positions_inside_margin(self):
        rng = philox(3)
        radii = [np.hypot(*random_detector_position(rng, 4e-6)) for _ in range(500)]
        assert max(radii) <= 0.8 * 4e-6


class TestPhaseResiduals:
    def test_classical_is_first_order(self, step_fiber, step_basis, small_grid, mode_cache):
        table = phase_residuals(step_fiber, WAVELENGTH, 2e12, 0.1, 0.0, small_grid, mode_cache, step_basis)
        np.testing.assert_allclose(table.exact_classical, table.classical,
                                   rtol=0.02, atol=0.02 * np.abs(table.classical).max())

    def test_pair_phase_is_second_order(self, step_fiber, step_basis, small_grid, mode_cache):
        table = phase_residuals(step_fiber, WAVELENGTH, 2e12, 0.1, 0.0, small_grid, mode_cache, step_basis)
        spread = np.ptp(table.exact_classical)
        assert np.ptp(table.exact_two_photon_plus) < 0.05 * spread
        np.testing.assert_array_equal(table.two_photon_plus, table.two_photon_minus)

    def test_cross_terms(self, step_fiber, step_basis, small_grid, mode_cache):
        table = phase_residuals(step_fiber, WAVELENGTH, 1e12, 0.1, 0.0, small_grid, mode_cache, step_basis)
        np.testing.assert_allclose(table.cross, table.classical[:, None] - table.classical[None, :], atol=1e-12)
        assert len(list(table.rows())) == len(step_basis)

    def test_pump_bandwidth_splits_pair_phase(self, step_fiber, step_basis, small_grid, mode_cache):
        table = phase_residuals(step_fiber, WAVELENGTH, 1e12, 0.1, 5e11, small_grid, mode_cache, step_basis)
        np.testing.assert_allclose(table.two_photon_plus - table.two_photon_minus,
                                   2 * table.classical / 1e12 * 5e11, rtol=1e-9)

    def test_second_difference_scales_quadratically(self, step_basis, mode_cache):
        small = second_difference(step_basis, 2e13, mode_cache)
        large = second_difference(step_basis, 4e13, mode_cache)
        assert np.linalg.norm(large) / np.linalg.norm(small) == pytest.approx(4.0, rel=0.1)

    def test_taylor_error_of_pair_phase_is_fourth_order(self, step_basis, mode_cache):
        h = 1e13
        d1, d2, d4 = (second_difference(step_basis, k * h, mode_cache) for k in (1, 2, 4))
        # beta'' from the h, 2h pair with its h^4 term eliminated
        beta2 = (16 * d1 - d2) / (12 * h ** 2)
        error_2h = d2 - beta2 * (2 * h) ** 2
        error_4h = d4 - beta2 * (4 * h) ** 2
        ratio = np.linalg.norm(error_4h) / np.linalg.norm(error_2h)
        assert 2 ** 3.5 < ratio < 2 ** 4.5

    def test_second_difference_has_no_odd_terms(self, step_basis, mode_cache):
        np.testing.assert_allclose(second_difference(step_basis, 3e13, mode_cache),
                                   second_difference(step_basis, -3e13, mode_cache), rtol=1e-12, atol=0)

    def test_rejects_negative_length(self, step_fiber, step_basis, small_grid, mode_cache):
        with pytest.raises(ConfigurationError):
            phase_residuals(step_fiber, WAVELENGTH, 1e12, -0.1, 0.0, small_grid, mode_cache, step_basis)


class TestDetuningScan:
    @pytest.mark.parametrize("kwargs", [
        dict(detunings=(1e-9, 2e-9)),
        dict(detunings=(0.0, 2e-9, 1e-9)),
        dict(detunings=()),
        dict(detunings=(0.0,), realizations=0),
        dict(detunings=(0.0,), seed=2 ** 64),
    ])
    def test_rejects_bad_scans(self, kwargs):
        with pytest.raises(ConfigurationError):
            DetuningScan(WAVELENGTH, **kwargs)

    def test_first_below(self):
        curve = CorrelationCurve(np.array([0.0, 1.0, 2.0]), np.array([1.0, 0.6, 0.2]), np.zeros(3),
                                 Channel.CLASSICAL)
        assert curve.first_below(0.5) == pytest.approx(1.25)
        assert curve.first_below(0.1) == float("inf")
        assert curve.at(0.5) == pytest.approx(0.8)


class TestCorrelationScan:
    @pytest.fixture(scope="class")
    def result(self, step_fiber, small_grid, mode_cache):
        scenario = FiberScenario(step_fiber, small_grid, solver=mode_cache,
                                 roi=RegionOfInterest((0.0, 0.0), 4e-6))
        scan = DetuningScan(WAVELENGTH, (0.0, 0.5e-9, 2e-9), realizations=6, seed=11)
        return run_detuning_scan(scan, scenario)

    def test_degenerate_point_is_one(self, result):
        for curve in result.curves.values():
            assert curve.pcc_mean[0] == 1.0
            assert curve.pcc_stderr[0] == 0.0

    def test_pairs_outlast_classical_light(self, result):
        classical = result.curves[Channel.CLASSICAL].at(2e-9)
        spdc = result.curves[Channel.SPDC].at(2e-9)
        assert spdc > 0.9
        assert classical < 0.6

    def test_sums_and_wavelengths(self, result, small_grid):
        assert set(result.sums) == {Channel.CLASSICAL, Channel.SPDC}
        assert result.sums[Channel.CLASSICAL].shape == small_grid.shape
        assert len(result.wavelengths) == 5

    def test_same_seed_same_curves(self, result, step_fiber, small_grid, mode_cache):
        scenario = FiberScenario(step_fiber, small_grid, solver=mode_cache, threads=3,
                                 roi=RegionOfInterest((0.0, 0.0), 4e-6))
        scan = DetuningScan(WAVELENGTH, (0.0, 0.5e-9, 2e-9), realizations=6, seed=11)
        again = run_detuning_scan(scan, scenario)
        for channel, curve in result.curves.items():
            np.testing.assert_allclose(again.curves[channel].pcc_mean, curve.pcc_mean, rtol=0, atol=1e-12)

    def test_sums_come_from_one_realization(self, result, step_fiber, small_grid, mode_cache):
        scenario = FiberScenario(step_fiber, small_grid, solver=mode_cache, roi=RegionOfInterest((0.0, 0.0), 4e-6))
        scan = DetuningScan(WAVELENGTH, (0.0, 0.5e-9, 2e-9), realizations=2, seed=11)
        first = run_detuning_scan(scan, scenario)
        second = run_detuning_scan(scan, scenario, sum_realization=1)
        for channel, image in result.sums.items():
            np.testing.assert_allclose(first.sums[channel].values, image.values, rtol=1e-12)
            assert not np.allclose(second.sums[channel].values, image.values)

    def test_sum_realization_in_range(self, step_fiber, small_grid, mode_cache):
        scenario = FiberScenario(step_fiber, small_grid, solver=mode_cache)
        scan = DetuningScan(WAVELENGTH, (0.0, 1e-9), realizations=2, seed=11)
        with pytest.raises(ConfigurationError):
            run_detuning_scan(scan, scenario, sum_realization=2)

    def test_pump_offset_follows_the_source(self, step_fiber, small_grid):
        spdc = SpdcSpec(405e-9, crystal_length=1e-3, pump_bandwidth=1e11)
        assert FiberScenario(step_fiber, small_grid, spdc).pump_offset == 1e11
        assert FiberScenario(step_fiber, small_grid, pump_offset=2e11).pump_offset == 2e11
        with pytest.raises(ConfigurationError):
            FiberScenario(step_fiber, small_grid, spdc, pump_offset=2e11)

    def test_unknown_method(self, step_fiber, small_grid):
        with pytest.raises(ConfigurationError):
            FiberScenario(step_fiber, small_grid, method="exact")


class TestStudies:
    @pytest.fixture(scope="class")
    def setup(self, step_fiber, small_grid, mode_cache):
        scenario = FiberScenario(step_fiber, small_grid, solver=mode_cache, roi=RegionOfInterest((0.0, 0.0), 4e-6))
        scan = DetuningScan(WAVELENGTH, (0.0, 1e-9), realizations=2, seed=3)
        return scan, scenario

    def test_zero_defocus_matches_direct_scan(self, setup):
        scan, scenario = setup
        direct = run_detuning_scan(scan, scenario, channels=(Channel.SPDC,)).curves[Channel.SPDC]
        defocused = apply_defocus_study(scan, scenario, 0.0)
        np.testing.assert_allclose(defocused.pcc_mean, direct.pcc_mean, atol=1e-8)

    def test_negative_defocus(self, setup):
        with pytest.raises(ConfigurationError):
            apply_defocus_study(*setup, -1e-6)

    def test_phase_matching_curves(self, setup):
        scan, scenario = setup
        spdc = SpdcSpec(405e-9, pump_waist=500e-6, magnification=10.0)
        curves = phase_matching_study(scan, scenario, spdc, [1e-6])
        assert list(curves) == ["classical", "thin", "Lc=0.001mm"]
        np.testing.assert_allclose(curves["Lc=0.001mm"].pcc_mean, curves["thin"].pcc_mean, atol=1e-2)

    @pytest.fixture(scope="class")
    def wide_scan(self):
        return DetuningScan(WAVELENGTH, (0.0, 5e-9), realizations=3, seed=3)

    def test_defocus_lowers_pair_correlation(self, setup, wide_scan):
        _, scenario = setup
        focused = apply_defocus_study(wide_scan, scenario, 0.0)
        defocused = apply_defocus_study(wide_scan, scenario, 40e-6)
        assert defocused.pcc_mean[0] == 1.0
        assert defocused.at(5e-9) < focused.at(5e-9)

    def test_defocus_spreads_the_state(self, pair_bases):
        fractions = [defocus_cnm(*pair_bases, dz).diagonal_power_fraction() for dz in (0.0, 40e-6)]
        assert fractions[0] > 0.99
        assert fractions[1] < fractions[0]

    def test_long_crystal_decorrelates_sooner(self, setup, wide_scan):
        _, scenario = setup
        spdc = SpdcSpec(405e-9, pump_waist=500e-6, magnification=10.0)
        curves = phase_matching_study(wide_scan, scenario, spdc, [1e-3, 16e-3])
        assert curves["Lc=16mm"].at(5e-9) < curves["Lc=1mm"].at(5e-9)


@pytest.mark.slow
class TestDefocusAtFigureScale:
    """Large-core fibers of the defocus preset; 5 nm detuning, 6 realizations"""

    def curves(self, medium, dz_values):
        config = preset("figS3-S4")
        config.scenario.medium = medium
        config.scan.detunings_nm = (0.0, 5.0)
        config.scan.realizations = 6
        scenario = planner.build_fiber_scenario(config, ModeCache())
        scan = planner.build_scan(config)
        return [apply_defocus_study(scan, scenario, dz) for dz in dz_values]

    def test_step_fiber_keeps_a_plateau(self):
        (far,) = self.curves(Medium.FIBER_STEP, [100e-6])
        assert far.at(5e-9) > 0.7

    def test_graded_fiber_drops_with_defocus(self):
        near, far = self.curves(Medium.FIBER_GRADED, [0.0, 40e-6])
        assert near.at(5e-9) - far.at(5e-9) > 0.2


@pytest.mark.slow
class TestBandSumAtFigureScale:
    def test_pairs_keep_their_contrast(self):
        config = preset("fig2")
        scenario = planner.build_fiber_scenario(config, ModeCache())
        scan = planner.build_scan(config, detunings_nm=tuple(d for d in config.scan.detunings_nm if d <= 5.0),
                                  realizations=1)
        sums = run_detuning_scan(scan, scenario, sum_band=5e-9).sums
        spdc, classical = (speckle_contrast(sums[c], scenario.roi) for c in (Channel.SPDC, Channel.CLASSICAL))
        assert spdc / classical > 2
