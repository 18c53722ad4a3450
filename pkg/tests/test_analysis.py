import math

import numpy as np
import pytest

from qei_lab.analysis import (
    GrowthProbe,
    admissible_alpha_window,
    classify_growth,
    classify_with_report,
    find_negativity_witness,
    negative_energy_state,
    scan_coupling,
    scan_cutoff,
    solve_spectrum,
)
from qei_lab.catalog import fmin_asymptotic_constant
from qei_lab.kernel import expectation, f_p, make_spec
from qei_lab.models import UNBOUNDED, DiscretizationGrid, PolynomialP, ScatteringModel, Verdict
from qei_lab.utils import is_cauchy, is_diverging


def spec_for(model, coefficients):
    return make_spec(model, PolynomialP(coefficients=coefficients))


class TestClassification:
    @pytest.mark.parametrize(
        "model,coefficients,verdict",
        [
            (ScatteringModel.free(), (1.0,), Verdict.QEI_HOLDS),
            (ScatteringModel.free(), (0.6, 0.4), Verdict.QEI_HOLDS),
            (ScatteringModel.free(), (1.4, -0.4), Verdict.QEI_HOLDS),
            (ScatteringModel.free(), (0.4, 0.6), Verdict.NO_GO),
            (ScatteringModel.free(), (1.6, -0.6), Verdict.NO_GO),
            (ScatteringModel.free(), (0.5, 0.5), Verdict.BORDERLINE),
            (ScatteringModel.ising(), (1.0,), Verdict.QEI_HOLDS),
            (ScatteringModel.ising(), (0.0, 1.0), Verdict.NO_GO),
            (ScatteringModel.ising(), (0.5, 0.5), Verdict.NO_GO),
            (ScatteringModel.sinh_gordon(1.0), (1.0,), Verdict.QEI_HOLDS),
            (ScatteringModel.sinh_gordon(1.0), (0.0, 0.0, 1.0), Verdict.NO_GO),
        ],
    )
    def test_verdicts(self, model, coefficients, verdict):
        assert classify_growth(spec_for(model, coefficients)).verdict == verdict

    def test_bounded_ratio_for_constant_polynomial(self, free_spec):
        result = classify_growth(free_spec)
        assert result.asymptotic_ratio == 0.0
        assert result.growth_order == 0.0

    def test_unbounded_ratio(self, ising_linear_spec):
        result = classify_growth(ising_linear_spec)
        assert result.asymptotic_ratio == UNBOUNDED
        assert result.growth_order == 1.5

    def test_linear_free_ratio(self):
        result = classify_growth(make_spec(ScatteringModel.free(), PolynomialP.from_alpha(0.4)))
        assert result.asymptotic_ratio == pytest.approx(0.4, abs=1e-9)
        assert result.probe_range == (10.0, 30.0)
        assert result.margin == 0.02

    def test_custom_margin_widens_borderline(self):
        spec = make_spec(ScatteringModel.free(), PolynomialP.from_alpha(0.45))
        assert classify_growth(spec).verdict == Verdict.QEI_HOLDS
        assert classify_growth(spec, GrowthProbe(margin=0.1)).verdict == Verdict.BORDERLINE

    def test_non_cauchy_samples_are_borderline(self):
        # probing too close to the origin leaves the 1/cosh correction visible
        spec = make_spec(ScatteringModel.free(), PolynomialP.from_alpha(0.4))
        result = classify_growth(spec, GrowthProbe(theta_min=0.5, theta_max=2.0, tolerance=1e-6))
        assert result.verdict == Verdict.BORDERLINE
        assert "not Cauchy" in result.diagnostic


class TestAlphaWindow:
    def test_free(self, free_model):
        window = admissible_alpha_window(free_model)
        assert (window.lower, window.upper) == (-0.5, 0.5)
        assert window.contains(0.4) and not window.contains(0.6)

    def test_ising_is_degenerate(self, ising_model):
        window = admissible_alpha_window(ising_model)
        assert window.degenerate
        assert window.contains(0.0) and not window.contains(0.1)
        assert window.to_document() == {"degenerate": True, "note": "P = 1 only"}

    def test_sinh_gordon_window_is_narrower(self, sinh_gordon_model):
        window = admissible_alpha_window(sinh_gordon_model)
        constant = fmin_asymptotic_constant(sinh_gordon_model)
        assert window.upper == pytest.approx(1.0 / (2.0 * constant), rel=1e-14)
        assert window.lower == -window.upper
        assert window.upper < 0.5

    @pytest.mark.parametrize("model", [ScatteringModel.free(), ScatteringModel.sinh_gordon(1.0)])
    def test_window_agrees_with_classification(self, model):
        edge = admissible_alpha_window(model).upper
        for sign in (1.0, -1.0):
            inside = classify_growth(make_spec(model, PolynomialP.from_alpha(sign * 0.9 * edge)))
            outside = classify_growth(make_spec(model, PolynomialP.from_alpha(sign * 1.1 * edge)))
            assert inside.verdict == Verdict.QEI_HOLDS
            assert outside.verdict == Verdict.NO_GO


class TestWitness:
    def test_free_constant_has_none(self, free_spec):
        witness = find_negativity_witness(free_spec)
        assert not witness.present
        assert witness.to_document() == {"present": False}

    def test_ising_witness_near_origin(self, ising_spec):
        witness = find_negativity_witness(ising_spec)
        assert witness.present
        assert 0.0 < witness.theta_p < 0.01
        assert abs(f_p(ising_spec, witness.theta_p)) > 1.0

    def test_negative_alpha_witness(self):
        spec = make_spec(ScatteringModel.free(), PolynomialP.from_alpha(-0.4))
        witness = find_negativity_witness(spec)
        # |1.4 - 0.4 cosh(theta)| first exceeds one at cosh(theta) = 6
        assert witness.theta_p == pytest.approx(math.acosh(6.0), abs=1e-8)
        assert witness.fp_value < -1.0

    def test_sinh_gordon_witness(self, sinh_gordon_spec):
        witness = find_negativity_witness(sinh_gordon_spec)
        assert witness.present
        assert witness.fp_value > 1.0

    def test_invalid_range(self, ising_spec):
        with pytest.raises(ValueError):
            find_negativity_witness(ising_spec, search_range=(2.0, 1.0))


class TestSpectrum:
    def test_ising_energy_density_goes_negative(self, ising_spec, reference_grid):
        spectrum = solve_spectrum(ising_spec, reference_grid)
        assert spectrum.lowest_eigenvalue < 0.0
        assert spectrum.negative_modes >= 1

        state = negative_energy_state(spectrum, reference_grid)
        assert state.norm() == pytest.approx(1.0, rel=1e-12)
        value = expectation(ising_spec, state)
        assert value < 0.0
        assert value == pytest.approx(spectrum.lowest_eigenvalue, rel=1e-8)

    def test_free_is_positive(self, free_spec, reference_grid):
        assert solve_spectrum(free_spec, reference_grid).lowest_eigenvalue >= -1e-6


class TestCutoffScan:
    def test_rows_in_input_order(self, ising_spec):
        rows = scan_cutoff(ising_spec, [1.0, 1.5, 2.0], width=0.1, quadrature_order=2, threads=3)
        assert [row.R for row in rows] == [1.0, 1.5, 2.0]
        assert [row.N for row in rows] == [20, 30, 40]

    def test_cutoffs_must_increase(self, ising_spec):
        with pytest.raises(ValueError):
            scan_cutoff(ising_spec, [2.0, 1.0], width=0.1)

    def test_bounded_case_converges(self, ising_spec):
        rows = scan_cutoff(ising_spec, [2.0, 3.0, 4.0, 5.0], width=0.05, quadrature_order=2)
        lows = [row.lambda_min for row in rows]
        assert all(value < 0.0 for value in lows)
        # the grids are nested at fixed width, so lambda_min cannot rise with R
        assert all(b <= a + 1e-6 * abs(a) for a, b in zip(lows, lows[1:]))
        assert abs(lows[-1] - lows[-2]) < 1e-2 * abs(lows[-1])

    def test_default_width_is_monotone(self, ising_spec):
        cutoffs = [4.0, 6.0, 8.0, 10.0]
        rows = scan_cutoff(ising_spec, cutoffs, width=2.0 * 7.0 / 500, quadrature_order=1)
        assert [row.N for row in rows] == [288, 432, 576, 720]
        lows = [row.lambda_min for row in rows]
        assert all(b <= a + 1e-10 * abs(a) for a, b in zip(lows, lows[1:]))

    def test_unbounded_case_diverges(self, ising_linear_spec):
        rows = scan_cutoff(ising_linear_spec, [2.0, 3.0, 4.0, 5.0], width=0.05, quadrature_order=2)
        assert is_diverging([row.lambda_min for row in rows])

    @pytest.mark.slow
    def test_full_resolution_cutoff_scans(self, ising_spec, ising_linear_spec):
        cutoffs = [4.0, 6.0, 8.0, 10.0]
        bounded = [row.lambda_min for row in scan_cutoff(ising_spec, cutoffs, width=0.028)]
        unbounded = [row.lambda_min for row in scan_cutoff(ising_linear_spec, cutoffs, width=0.028)]
        assert is_cauchy(bounded, 1e-4 * abs(bounded[-1]))
        assert is_diverging(unbounded)


class TestCouplingScan:
    couplings = [0.2, 0.6, 1.0, 1.4, 1.8]

    def test_reduced_scan(self):
        grid = DiscretizationGrid(cutoff=7.0, cells=200, quadrature_order=1)
        rows = scan_coupling(self.couplings, grid, threads=2)
        assert [row.B for row in rows] == self.couplings
        lows = [row.lambda_min for row in rows]
        assert all(value < 0.0 for value in lows)
        assert int(np.argmin(lows)) == 2
        assert lows[0] == pytest.approx(lows[4], rel=1e-9)
        assert lows[1] == pytest.approx(lows[3], rel=1e-9)

    def test_couplings_checked(self, small_grid):
        with pytest.raises(ValueError):
            scan_coupling([1.0, 2.0], small_grid)

    @pytest.mark.slow
    def test_full_resolution_scan(self, reference_grid):
        couplings = [round(0.1 * k, 1) for k in range(1, 20)]
        lows = [row.lambda_min for row in scan_coupling(couplings, reference_grid)]
        assert couplings[int(np.argmin(lows))] == 1.0
        # the weak and strong coupling ends approach the free value from below
        assert abs(lows[0]) < 0.25 * abs(lows[9])
        assert abs(lows[-1]) < 0.25 * abs(lows[9])


class TestReport:
    def test_report_document(self, ising_spec):
        report = classify_with_report(ising_spec)
        assert report["verdict"] == "QeiHolds"
        assert report["alpha_window"]["degenerate"] is True
        assert report["witness"]["present"] is True
        assert len(report["fmin_samples"]) == 6
        assert report["fmin_samples"][0]["theta"] == pytest.approx(10.0)
        assert report["spec"]["model"] == "ising"
