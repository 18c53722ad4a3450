"""
One-particle kernel of the smeared stress-energy tensor.

    F^{ab}(theta, eta) = F^{ab}_free(theta, eta) F_P(theta - eta) g2~(mu cosh theta - mu cosh eta)

with F_P(x) = P(cosh x) F_min(x + i pi) and g2~ the Fourier transform of g^2,
g2~(omega) = int g(t)^2 exp(i omega t) dt.
"""
import math
from typing import Callable, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from qei_lab.catalog import fmin_shifted_array
from qei_lab.errors import NumericalError
from qei_lab.models import (
    DiscretizationGrid,
    KernelSpec,
    PolynomialP,
    ScatteringModel,
    SmearingFunction,
)

ArrayLike = Union[float, np.ndarray]


def make_spec(
    model: ScatteringModel,
    poly: Optional[PolynomialP] = None,
    sigma: float = 0.1,
    component_pair=(0, 0),
) -> KernelSpec:
    """KernelSpec with a Gaussian smearing that shares the model mass."""
    return KernelSpec(
        model=model,
        poly=poly or PolynomialP(),
        smearing=SmearingFunction(sigma=sigma, mass_ref=model.mass),
        component_pair=tuple(component_pair),
    )


def smearing_profile(smearing: SmearingFunction, t: ArrayLike) -> np.ndarray:
    """g(t) in time."""
    mu, sigma = smearing.mass_ref, smearing.sigma
    t = np.asarray(t, dtype=float)
    return math.pi ** -0.25 * math.sqrt(mu / (2.0 * sigma)) * np.exp(-((mu * t) ** 2) / (8.0 * sigma**2))


def gtilde_sq(smearing: SmearingFunction, omega: ArrayLike) -> np.ndarray:
    """Fourier transform of g^2 at energy difference omega: exp(-sigma^2 omega^2 / mu^2)."""
    scaled = smearing.sigma * np.asarray(omega, dtype=float) / smearing.mass_ref
    return np.exp(-(scaled**2))


def f_p(spec: KernelSpec, theta: ArrayLike) -> np.ndarray:
    """F_P(theta) = P(cosh theta) F_min(theta + i pi)."""
    theta = np.asarray(theta, dtype=float)
    return spec.poly(np.cosh(theta)) * fmin_shifted_array(spec.model, theta)


def free_kernel(mu: float, alpha: int, beta: int, theta: ArrayLike, eta: ArrayLike) -> np.ndarray:
    """(alpha, beta) entry of the canonical free Bose field kernel."""
    if alpha not in (0, 1) or beta not in (0, 1):
        raise ValueError(f"invalid tensor indices ({alpha}, {beta})")
    rapidity_sum = np.asarray(theta, dtype=float) + np.asarray(eta, dtype=float)
    prefactor = mu**2 / (2.0 * math.pi)
    if alpha == 0 and beta == 0:
        return prefactor * np.cosh(0.5 * rapidity_sum) ** 2
    if alpha == 1 and beta == 1:
        return prefactor * np.sinh(0.5 * rapidity_sum) ** 2
    return prefactor * 0.5 * np.sinh(rapidity_sum)


def kernel_value(spec: KernelSpec, theta: ArrayLike, eta: ArrayLike) -> np.ndarray:
    """F^{alpha beta}(theta, eta) for the spec's component pair (broadcasting)."""
    theta = np.asarray(theta, dtype=float)
    eta = np.asarray(eta, dtype=float)
    mu = spec.mass
    alpha, beta = spec.component_pair
    energy_gap = mu * np.cosh(theta) - mu * np.cosh(eta)
    return free_kernel(mu, alpha, beta, theta, eta) * f_p(spec, theta - eta) * gtilde_sq(spec.smearing, energy_gap)


def kernel_grid(spec: KernelSpec, thetas: np.ndarray, etas: np.ndarray) -> np.ndarray:
    """Kernel on the tensor grid thetas x etas, row-major in theta."""
    return kernel_value(spec, np.asarray(thetas)[:, None], np.asarray(etas)[None, :])


class Wavefunction(BaseModel):
    """One-particle wavefunction sampled at the grid's quadrature nodes, shape (N, q)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: DiscretizationGrid
    values: np.ndarray = Field(..., description="Complex samples at the quadrature nodes")

    @field_validator("values", mode="before")
    @classmethod
    def _finite(cls, value) -> np.ndarray:
        value = np.array(value)
        if not np.all(np.isfinite(value)):
            raise ValueError("wavefunction samples must be finite")
        value.setflags(write=False)
        return value

    @classmethod
    def from_function(cls, grid: DiscretizationGrid, func: Callable[[np.ndarray], np.ndarray]) -> "Wavefunction":
        from qei_lab.discretize import quadrature_nodes

        nodes, _ = quadrature_nodes(grid)
        return cls(grid=grid, values=np.asarray(func(nodes)))

    @classmethod
    def from_coefficients(cls, grid: DiscretizationGrid, coefficients) -> "Wavefunction":
        """Step function sum_j c_j phi_j."""
        coefficients = np.asarray(coefficients)
        if coefficients.shape != (grid.cells,):
            raise ValueError(f"expected {grid.cells} coefficients, got shape {coefficients.shape}")
        amplitude = 1.0 / math.sqrt(grid.width)
        column = (coefficients * amplitude)[:, None]
        return cls(grid=grid, values=np.repeat(column, grid.quadrature_order, axis=1))

    @classmethod
    def basis(cls, grid: DiscretizationGrid, j: int) -> "Wavefunction":
        if not 0 <= j < grid.cells:
            raise IndexError(f"basis index {j} outside [0, {grid.cells})")
        coefficients = np.zeros(grid.cells)
        coefficients[j] = 1.0
        return cls.from_coefficients(grid, coefficients)

    def norm(self) -> float:
        from qei_lab.discretize import quadrature_nodes

        _, weights = quadrature_nodes(self.grid)
        return float(np.sqrt(np.sum(weights * np.abs(self.values) ** 2)))


def matrix_element(spec: KernelSpec, left: Wavefunction, right: Wavefunction) -> complex:
    """<left, T(g^2) right> with the cell quadrature used for matrix assembly."""
    from qei_lab.discretize import cell_pair_integrals, node_kernel

    if left.grid != right.grid:
        raise ValueError("wavefunctions must share a grid")
    grid = left.grid
    kernel = node_kernel(spec, grid)
    pairs = cell_pair_integrals(kernel, grid, np.conj(left.values), right.values)
    return complex(pairs.sum())


def expectation(spec: KernelSpec, wavefunction: Wavefunction) -> float:
    """<phi, T^{00}(g^2) phi>; the imaginary part vanishes for the symmetric kernel."""
    if wavefunction.norm() == 0.0:
        raise NumericalError("cannot take an expectation value in a zero-norm state")
    value = matrix_element(spec.with_component(0, 0), wavefunction, wavefunction)
    return value.real
