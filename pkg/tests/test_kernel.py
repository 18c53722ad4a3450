import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from pydantic import ValidationError
from scipy.integrate import quad

from qei_lab.discretize import assemble_matrix
from qei_lab.errors import NumericalError
from qei_lab.kernel import (
    Wavefunction,
    expectation,
    f_p,
    free_kernel,
    gtilde_sq,
    kernel_value,
    make_spec,
    matrix_element,
    smearing_profile,
)
from qei_lab.models import DiscretizationGrid, KernelSpec, PolynomialP, ScatteringModel, SmearingFunction

rapidity = st.floats(min_value=-10, max_value=10)


class TestPolynomial:
    def test_normalization_enforced(self):
        with pytest.raises(ValidationError):
            PolynomialP(coefficients=(0.5, 0.4))

    def test_alpha_family(self):
        poly = PolynomialP.from_alpha(0.4)
        assert poly.coefficients == (0.6, 0.4)
        assert poly.degree == 1
        assert poly(1.0) == pytest.approx(1.0, abs=1e-15)

    def test_degree_ignores_trailing_zeros(self):
        assert PolynomialP(coefficients=(1.0, 0.0, 0.0)).degree == 0


class TestFP:
    def test_free_constant(self, free_spec):
        assert f_p(free_spec, 5.0) == 1.0

    def test_ising_at_zero(self, ising_spec):
        assert f_p(ising_spec, 0.0) == 1.0

    def test_ising_linear(self, ising_linear_spec):
        assert f_p(ising_linear_spec, 2.0) == pytest.approx(math.cosh(2.0) * math.cosh(1.0), rel=1e-14)
        assert f_p(ising_linear_spec, 2.0) == pytest.approx(5.80534, rel=1e-5)

    def test_normalization_hook(self, free_spec, ising_spec, sinh_gordon_spec):
        for spec in (free_spec, ising_spec, sinh_gordon_spec):
            assert f_p(spec, 0.0) == 1.0


class TestSmearing:
    smearing = SmearingFunction(sigma=0.1, mass_ref=1.0)

    def test_unit_at_zero(self):
        assert abs(gtilde_sq(self.smearing, 0.0) - 1.0) <= 1e-12

    def test_closed_form(self):
        assert gtilde_sq(self.smearing, 10.0) == pytest.approx(math.exp(-1.0), rel=1e-14)

    @given(st.floats(min_value=-1e3, max_value=1e3))
    def test_even_and_positive(self, omega):
        value = gtilde_sq(self.smearing, omega)
        assert value == gtilde_sq(self.smearing, -omega)
        assert value >= 0.0

    def test_profile_is_normalized(self):
        total, _ = quad(lambda t: smearing_profile(self.smearing, t) ** 2, -5.0, 5.0, epsabs=1e-14, epsrel=1e-13)
        assert total == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("sigma,mu", [(0.1, 1.0), (0.5, 2.0)])
    def test_matches_numerical_fourier_transform(self, sigma, mu):
        smearing = SmearingFunction(sigma=sigma, mass_ref=mu)
        # g^2 is negligible beyond |t| = 40 sigma / mu
        edge = 40.0 * sigma / mu
        for omega in np.linspace(0.0, 5.0 * mu / sigma, 50):
            numeric, _ = quad(
                lambda t: smearing_profile(smearing, t) ** 2, -edge, edge,
                weight="cos", wvar=omega, epsabs=1e-14, epsrel=1e-13, limit=200,
            )
            assert abs(numeric - gtilde_sq(smearing, omega)) < 1e-10


class TestFreeKernel:
    def test_energy_component_at_origin(self):
        assert free_kernel(1.0, 0, 0, 0.0, 0.0) == pytest.approx(1.0 / (2.0 * math.pi), rel=1e-15)

    @given(rapidity)
    def test_pressure_vanishes_on_antidiagonal(self, t):
        assert free_kernel(1.0, 1, 1, t, -t) == 0.0

    def test_mixed_component(self):
        expected = 4.0 / (2.0 * math.pi) * 0.5 * math.sinh(1.0)
        assert free_kernel(2.0, 0, 1, 1.0, 0.0) == pytest.approx(expected, rel=1e-15)

    def test_invalid_index(self):
        with pytest.raises(ValueError):
            free_kernel(1.0, 2, 0, 0.0, 0.0)


class TestKernelValue:
    def test_free_coincidence(self, free_spec):
        assert kernel_value(free_spec, 0.0, 0.0) == pytest.approx(1.0 / (2.0 * math.pi), rel=1e-15)

    def test_ising_antidiagonal(self, ising_spec):
        assert kernel_value(ising_spec, 1.0, -1.0) == pytest.approx(math.cosh(1.0) / (2.0 * math.pi), rel=1e-14)

    @given(rapidity, rapidity)
    def test_hermitian(self, theta, eta):
        for model in (ScatteringModel.free(), ScatteringModel.ising()):
            for pair in ((0, 0), (0, 1), (1, 1)):
                spec = make_spec(model, component_pair=pair)
                forward = kernel_value(spec, theta, eta)
                backward = kernel_value(spec, eta, theta)
                assert abs(forward - backward) <= 1e-12 * max(abs(forward), 1e-300)

    def test_hermitian_sinh_gordon(self, sinh_gordon_spec):
        rng = np.random.default_rng(7)
        theta, eta = rng.uniform(-5, 5, size=(2, 20))
        forward = kernel_value(sinh_gordon_spec, theta, eta)
        backward = kernel_value(sinh_gordon_spec, eta, theta)
        assert np.all(np.abs(forward - backward) <= 1e-12 * np.abs(forward))

    def test_tensor_symmetry(self, ising_spec):
        theta, eta = np.meshgrid(np.linspace(-3, 3, 7), np.linspace(-2, 4, 7))
        upper = kernel_value(ising_spec.with_component(0, 1), theta, eta)
        lower = kernel_value(ising_spec.with_component(1, 0), theta, eta)
        assert np.array_equal(upper, lower)

    @pytest.mark.parametrize("model", [ScatteringModel.free(), ScatteringModel.ising()])
    @pytest.mark.parametrize("beta", [0, 1])
    def test_continuity_equation(self, model, beta):
        rng = np.random.default_rng(2024 + beta)
        theta, eta = rng.uniform(-10, 10, size=(2, 10_000))
        time_part = kernel_value(make_spec(model, component_pair=(0, beta)), theta, eta)
        space_part = kernel_value(make_spec(model, component_pair=(1, beta)), theta, eta)
        lhs = (np.cosh(theta) - np.cosh(eta)) * time_part
        rhs = (np.sinh(theta) - np.sinh(eta)) * space_part
        # measured against the size of the factors before cancellation
        scale = (np.cosh(theta) + np.cosh(eta)) * (np.abs(time_part) + np.abs(space_part))
        assert np.all(np.abs(lhs - rhs) <= 1e-12 * scale + np.finfo(float).tiny)

    @pytest.mark.parametrize("beta", [0, 1])
    def test_continuity_equation_sinh_gordon(self, sinh_gordon_model, beta):
        rng = np.random.default_rng(77 + beta)
        theta, eta = rng.uniform(-6, 6, size=(2, 200))
        time_part = kernel_value(make_spec(sinh_gordon_model, component_pair=(0, beta)), theta, eta)
        space_part = kernel_value(make_spec(sinh_gordon_model, component_pair=(1, beta)), theta, eta)
        lhs = (np.cosh(theta) - np.cosh(eta)) * time_part
        rhs = (np.sinh(theta) - np.sinh(eta)) * space_part
        scale = (np.cosh(theta) + np.cosh(eta)) * (np.abs(time_part) + np.abs(space_part))
        assert np.all(np.abs(lhs - rhs) <= 1e-12 * scale + np.finfo(float).tiny)

    def test_gaussian_damping_suppresses_far_entries(self, free_spec):
        # mu cosh(6) - mu cosh(0) is about 200 mu / sigma away from the diagonal
        assert kernel_value(free_spec, 6.0, 0.0) < 1e-12 * kernel_value(free_spec, 0.0, 0.0)

    def test_mass_must_match_smearing(self):
        with pytest.raises(ValidationError):
            KernelSpec(model=ScatteringModel.free(mass=2.0), smearing=SmearingFunction(mass_ref=1.0))


class TestExpectation:
    grid = DiscretizationGrid(cutoff=1.0, cells=20, quadrature_order=4)

    def indicator(self):
        # cells 9 and 10 cover [-0.1, 0.1]
        coefficients = np.zeros(self.grid.cells)
        coefficients[[9, 10]] = 1.0 / math.sqrt(2.0)
        return Wavefunction.from_coefficients(self.grid, coefficients)

    def test_indicator_is_normalized(self):
        assert self.indicator().norm() == pytest.approx(1.0, rel=1e-14)

    def test_free_indicator_positive(self, free_spec):
        value = expectation(free_spec, self.indicator())
        assert value > 0.0
        matrix = assemble_matrix(free_spec, self.grid).entries
        c = np.zeros(self.grid.cells)
        c[[9, 10]] = 1.0 / math.sqrt(2.0)
        assert value == pytest.approx(c @ matrix @ c, rel=1e-12)

    def test_imaginary_part_vanishes(self, ising_spec):
        rng = np.random.default_rng(11)
        values = rng.normal(size=(20, 4)) + 1j * rng.normal(size=(20, 4))
        state = Wavefunction(grid=self.grid, values=values)
        value = matrix_element(ising_spec, state, state)
        assert abs(value.imag) <= 1e-10 * max(1.0, abs(value.real))

    def test_smooth_state_from_function(self, free_spec):
        state = Wavefunction.from_function(self.grid, lambda t: np.exp(-(t**2)) * np.exp(1j * t))
        assert expectation(free_spec, state) > 0.0

    def test_zero_state_rejected(self, free_spec):
        with pytest.raises(NumericalError):
            expectation(free_spec, Wavefunction.from_coefficients(self.grid, np.zeros(self.grid.cells)))

    def test_basis_index_checked(self):
        with pytest.raises(IndexError):
            Wavefunction.basis(self.grid, self.grid.cells)
