import numpy as np
import pytest

from src.core.errors import ConfigurationError, GridMismatchError
from src.core.types import Channel, Medium, WavenumberMode
from src.elements.farfield import apply_phase_element, classical_farfield, element_phase, two_photon_farfield
from src.elements.grating import (GratingSpec, grating_orders_analytical, grating_thickness, numerical_order_weights,
                                  peak_position)
from src.elements.material import MaterialModel, phase_factor
from src.elements.scan import DiffuserScenario, GratingScenario, diffuser_detuning_scan, grating_band_study
from src.elements.screens import PhaseScreen, generate_diffuser, generate_mcf_screen, samples_per_pixel
from src.optics.field import Grid, IntensityMap, gaussian_source
from src.twophoton.scan import DetuningScan

LAMBDA = 808e-9


class TestMaterial:
    def test_constant(self):
        assert MaterialModel.constant(1.5).index(LAMBDA) == 1.5

    def test_cauchy(self):
        model = MaterialModel.cauchy(1.5, 0.004)
        assert model.index(1e-6) == pytest.approx(1.504)
        assert model.index(0.8e-6) > model.index(1e-6)

    @pytest.mark.parametrize("factory", [lambda: MaterialModel.constant(1.0), lambda: MaterialModel.cauchy(0.0)])
    def test_rejects_bad_models(self, factory):
        with pytest.raises(ConfigurationError):
            factory()

    def test_band_check(self):
        with pytest.raises(ConfigurationError):
            MaterialModel.cauchy(1.0, -0.1).check_band([LAMBDA])

    def test_phase_factor(self):
        # one wave of optical thickness
        thickness = LAMBDA / 0.5
        assert phase_factor(MaterialModel.constant(1.5), LAMBDA) * thickness == pytest.approx(2 * np.pi)


class TestDiffuser:
    grid = Grid(100, 2e-6)

    def test_thickness_range_and_shape(self):
        screen = generate_diffuser(self.grid, 16e-6, 5e-6, MaterialModel.constant(), seed=3)
        assert screen.thickness.shape == (13, 13)
        assert screen.thickness.min() >= 0.0
        assert screen.thickness.max() <= 5e-6
        assert screen.sampled(self.grid).shape == self.grid.shape

    def test_macro_pixels_are_uniform_blocks(self):
        screen = generate_diffuser(Grid(64, 2e-6), 16e-6, 5e-6, MaterialModel.constant(), seed=3)
        block = screen.sampled(Grid(64, 2e-6))[:8, :8]
        assert np.all(block == block[0, 0])

    def test_same_seed_same_screen(self):
        a = generate_diffuser(self.grid, 16e-6, 5e-6, MaterialModel.constant(), seed=9)
        b = generate_diffuser(self.grid, 16e-6, 5e-6, MaterialModel.constant(), seed=9)
        c = generate_diffuser(self.grid, 16e-6, 5e-6, MaterialModel.constant(), seed=10)
        assert np.array_equal(a.thickness, b.thickness)
        assert not np.array_equal(a.thickness, c.thickness)

    def test_zero_thickness_is_flat(self):
        screen = generate_diffuser(self.grid, 16e-6, 0.0, MaterialModel.constant(), seed=1)
        assert not screen.thickness.any()

    def test_macro_pixel_must_be_whole_samples(self):
        with pytest.raises(ConfigurationError):
            samples_per_pixel(15e-6, 2e-6)

    def test_negative_thickness_rejected(self):
        with pytest.raises(ConfigurationError):
            PhaseScreen(-np.ones((2, 2)), 2e-6, 2e-6, MaterialModel.constant())

    def test_other_pitch_rejected(self):
        screen = generate_diffuser(self.grid, 16e-6, 5e-6, MaterialModel.constant(), seed=3)
        with pytest.raises(GridMismatchError):
            screen.sampled(Grid(100, 1e-6))

    def test_mcf_path_spread(self):
        material = MaterialModel.constant(1.46)
        screen = generate_mcf_screen(self.grid, 4e-6, 10e-6, material, seed=2, wavelength=LAMBDA)
        paths = screen.thickness * 0.46
        assert paths.max() <= 10e-6 * (1 + 1e-12)
        assert screen.kind == "mcf"


class TestPairPhase:
    def test_pair_phase_is_frequency_independent_without_dispersion(self):
        grid = Grid(64, 2e-6)
        screen = generate_diffuser(grid, 16e-6, 20e-6, MaterialModel.constant(), seed=4)
        degenerate = element_phase(screen, grid, WavenumberMode.PAIR, LAMBDA, (LAMBDA, LAMBDA))
        omega0 = 2 * np.pi / LAMBDA
        detuned = (2 * np.pi / (omega0 * 1.03), 2 * np.pi / (omega0 * 0.97))
        np.testing.assert_allclose(element_phase(screen, grid, WavenumberMode.PAIR, LAMBDA, detuned), degenerate,
                                   rtol=1e-12)

    def test_pair_mode_needs_both_wavelengths(self):
        grid = Grid(64, 2e-6)
        screen = generate_diffuser(grid, 16e-6, 20e-6, MaterialModel.constant(), seed=4)
        with pytest.raises(ConfigurationError):
            element_phase(screen, grid, WavenumberMode.PAIR, LAMBDA)

    def test_phase_element_keeps_power(self):
        grid = Grid(64, 2e-6)
        screen = generate_diffuser(grid, 16e-6, 20e-6, MaterialModel.constant(), seed=4)
        field = gaussian_source(20e-6, (0.0, 0.0), grid, LAMBDA)
        assert apply_phase_element(field, screen).power == pytest.approx(field.power)

    def test_carrier_bound(self):
        grid = Grid(64, 2e-6)
        screen = generate_diffuser(grid, 16e-6, 20e-6, MaterialModel.constant(), seed=4)
        envelope = gaussian_source(20e-6, (0.0, 0.0), grid, LAMBDA)
        with pytest.raises(ConfigurationError):
            two_photon_farfield(screen, envelope, 3 * np.pi * 3e8 / LAMBDA, 0.1)


class TestDiffuserScan:
    @pytest.fixture(scope="class")
    def result(self):
        scenario = DiffuserScenario(Grid(128, 2e-6), 16e-6, 40 * LAMBDA / 0.5, MaterialModel.constant(), 0.1,
                                    32e-6)
        scan = DetuningScan(LAMBDA, (0.0, 40e-9), realizations=4, seed=5)
        return diffuser_detuning_scan(scan, scenario, sum_band=40e-9)

    def test_reference_point_is_one(self, result):
        for curve in result.curves.values():
            assert curve.pcc_mean[0] == 1.0

    def test_pairs_stay_correlated_across_band(self, result):
        assert result.curves[Channel.SPDC].pcc_mean[1] > 0.8
        assert result.curves[Channel.CLASSICAL].pcc_mean[1] < 0.5

    def test_band_sums(self, result):
        assert set(result.sums) == {Channel.CLASSICAL, Channel.SPDC}
        assert result.sums[Channel.SPDC].shape == (128, 128)

    def test_band_sum_realization(self, result):
        scenario = DiffuserScenario(Grid(128, 2e-6), 16e-6, 40 * LAMBDA / 0.5, MaterialModel.constant(), 0.1,
                                    32e-6)
        scan = DetuningScan(LAMBDA, (0.0, 40e-9), realizations=2, seed=5)
        other = diffuser_detuning_scan(scan, scenario, sum_band=40e-9, sum_realization=1)
        assert not np.allclose(other.sums[Channel.CLASSICAL].values, result.sums[Channel.CLASSICAL].values)
        with pytest.raises(ConfigurationError):
            diffuser_detuning_scan(scan, scenario, sum_realization=-1)

    def test_non_screen_medium_rejected(self):
        with pytest.raises(ConfigurationError):
            DiffuserScenario(Grid(64, 2e-6), 16e-6, 1e-6, MaterialModel.constant(), 0.1, 20e-6,
                             medium=Medium.GRATING)


class TestGratingAnalytical:
    spec = GratingSpec(20e-6, LAMBDA)

    def test_design_wavelength_goes_to_first_order(self):
        weights = {w.order: w.weight for w in grating_orders_analytical(self.spec, 0.0, 300e-6, 0.1,
                                                                         Channel.CLASSICAL)}
        assert weights[1] == pytest.approx(1.0)
        assert all(abs(weights[m]) < 1e-12 for m in weights if m != 1)

    def test_detuned_weights_sum_to_one(self):
        delta_k = 2 * np.pi / (LAMBDA + 40e-9) - 2 * np.pi / LAMBDA
        weights = grating_orders_analytical(self.spec, delta_k, 300e-6, 0.1, Channel.CLASSICAL,
                                            orders=range(-200, 202))
        assert sum(w.weight for w in weights) == pytest.approx(1.0, abs=1e-3)
        first = next(w for w in weights if w.order == 1)
        assert 0.9 < first.weight < 1.0

    def test_pairs_use_second_order(self):
        (weight,) = grating_orders_analytical(self.spec, 1e5, 300e-6, 0.1, Channel.SPDC)
        assert weight.order == 2 and weight.weight == 1.0

    def test_period_must_exceed_wavelength(self):
        with pytest.raises(ConfigurationError):
            GratingSpec(0.5e-6, LAMBDA)

    def test_sawtooth_height(self):
        thickness = grating_thickness(self.spec, Grid(64, 1.25e-6))
        assert thickness.min() >= 0.0
        assert thickness.max() <= self.spec.height

    def test_numerical_weights_of_a_single_order(self):
        spacing = LAMBDA * 0.1 / self.spec.period
        values = np.zeros((8, 64))
        values[:, 32 + 4] = 1.0
        image = IntensityMap(values, spacing / 4)
        weights = {w.order: w.weight for w in numerical_order_weights(image, self.spec, LAMBDA, 0.1)}
        assert weights[1] == pytest.approx(1.0)
        assert all(weights[m] == 0.0 for m in weights if m != 1)

    def test_numerical_weights_need_resolved_orders(self):
        image = IntensityMap(np.ones((8, 8)), LAMBDA * 0.1 / self.spec.period)
        with pytest.raises(ConfigurationError):
            numerical_order_weights(image, self.spec, LAMBDA, 0.1)


class TestGratingBand:
    @pytest.fixture(scope="class")
    def rows(self):
        scenario = GratingScenario(GratingSpec(20e-6, LAMBDA), Grid(512, 1.25e-6), 100e-6, 0.1)
        return grating_band_study(scenario, [-40e-9, -20e-9, 0.0, 20e-9, 40e-9])

    def test_classical_first_order_at_design(self, rows):
        row = next(r for r in rows if r.channel is Channel.CLASSICAL and r.delta_lambda == 0.0
                   and r.analytical.order == 1)
        assert row.numerical.weight > 0.95

    def test_pairs_land_in_second_order_across_band(self, rows):
        spdc = [r for r in rows if r.channel is Channel.SPDC]
        assert len(spdc) == 5
        assert all(r.numerical.order == 2 and r.numerical.weight >= 0.99 for r in spdc)

    def test_classical_spreads_when_detuned(self, rows):
        detuned = [r for r in rows if r.channel is Channel.CLASSICAL and r.delta_lambda == 40e-9]
        first = next(r for r in detuned if r.analytical.order == 1)
        assert first.analytical.weight < 1.0
        assert first.numerical.weight == pytest.approx(first.analytical.weight, abs=0.05)

    def test_leakage_grows_with_detuning_on_both_sides(self, rows):
        def leakage(d_lambda):
            return sum(r.numerical.weight for r in rows if r.channel is Channel.CLASSICAL
                       and r.delta_lambda == d_lambda and r.numerical.order in (0, 2))
        for sign in (1, -1):
            values = [leakage(sign * d) for d in (0.0, 20e-9, 40e-9)]
            assert values[0] < values[1] < values[2]

    def test_pair_peak_at_second_order(self):
        spec = GratingSpec(20e-6, LAMBDA)
        envelope = gaussian_source(100e-6, (0.0, 0.0), Grid(512, 1.25e-6), LAMBDA)
        image = two_photon_farfield(spec, envelope, 0.0, 0.1, LAMBDA)
        assert abs(peak_position(image) - 2 * LAMBDA * 0.1 / spec.period) <= image.pitch / 2

    def test_peak_position(self):
        spec = GratingSpec(20e-6, LAMBDA)
        envelope = gaussian_source(100e-6, (0.0, 0.0), Grid(512, 1.25e-6), LAMBDA)
        image = classical_farfield(spec, envelope, LAMBDA, 0.1)
        assert peak_position(image) == pytest.approx(LAMBDA * 0.1 / 20e-6, rel=0.05)
