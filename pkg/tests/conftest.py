import pytest

from qei_lab.kernel import make_spec
from qei_lab.models import DiscretizationGrid, PolynomialP, ScatteringModel


@pytest.fixture
def free_model():
    return ScatteringModel.free()


@pytest.fixture
def ising_model():
    return ScatteringModel.ising()


@pytest.fixture
def sinh_gordon_model():
    return ScatteringModel.sinh_gordon(1.0)


@pytest.fixture
def free_spec(free_model):
    return make_spec(free_model)


@pytest.fixture
def ising_spec(ising_model):
    return make_spec(ising_model)


@pytest.fixture
def ising_linear_spec(ising_model):
    return make_spec(ising_model, PolynomialP(coefficients=(0.0, 1.0)))


@pytest.fixture
def sinh_gordon_spec(sinh_gordon_model):
    return make_spec(sinh_gordon_model)


@pytest.fixture
def small_grid():
    return DiscretizationGrid(cutoff=3.0, cells=30, quadrature_order=4)


@pytest.fixture
def reference_grid():
    return DiscretizationGrid(cutoff=7.0, cells=500, quadrature_order=4)
