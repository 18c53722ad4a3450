"""
Catalog of factorizing scattering models.

Each model provides the minimal solution on the shifted line,
F_min(theta + i pi), and its large-rapidity behaviour.

sinh-Gordon (coupling B in (0, 2)):

    F_min(theta + i pi) = exp( 8 * int_0^inf dt/t f_B(t) sin^2(t theta / 2 pi) )

    f_B(t) = sinh(t B/4) sinh(t (2-B)/4) sinh(t/2) / sinh^2(t)

This is the standard integral representation of the sinh-Gordon minimal form
factor evaluated at zeta = theta + i pi, with the normalization constant chosen so that
F_min(i pi) = 1 ("hamiltonian"). Writing sin^2 = (1 - cos)/2 gives

    F_min(theta + i pi) = exp(4 (I(0) - I(theta))),   I(theta) = int_0^inf f_B(t)/t cos(t theta / pi) dt

and I(theta) -> 0 as theta -> infinity. The "asymptotic" normalization drops the
I(0) term, so that F_min(infinity + i pi) = 1 instead.
f_B is symmetric under B -> 2 - B and f_B(t)/t -> B (2 - B) / 32 as t -> 0.
"""
import math
import warnings
from abc import ABC, abstractmethod
from functools import lru_cache
from typing import Dict, List, NamedTuple, Type, Union

import numpy as np
from loguru import logger
from scipy.integrate import IntegrationWarning, quad

from qei_lab.config import settings
from qei_lab.errors import AsymptoticsError, QuadratureError
from qei_lab.models import UNBOUNDED, MinimalSolutionValue, ModelName, Normalization, ScatteringModel

ArrayLike = Union[float, np.ndarray]


class MinimalSolution(ABC):
    """Evaluator for F_min(theta + i pi) of one model instance."""

    #: F_min(theta + i pi) grows like exp(growth_order * |theta|)
    growth_order: float = 0.0

    def __init__(self, model: ScatteringModel):
        self.model = model

    @abstractmethod
    def evaluate(self, theta: np.ndarray) -> np.ndarray:
        """Vectorized F_min(theta + i pi) for real theta."""

    def asymptotic_constant(self) -> Union[float, str]:
        """lim F_min(theta + i pi), found by doubling theta until samples settle."""
        theta = settings.asymptotic_theta_start
        previous = float(self.evaluate(np.array([theta]))[0])
        samples = [(theta, previous)]
        for _ in range(settings.asymptotic_max_doublings):
            theta *= 2.0
            current = float(self.evaluate(np.array([theta]))[0])
            samples.append((theta, current))
            if abs(current - previous) < settings.asymptotic_tolerance:
                logger.debug(f"{self.model.name.value}: asymptotic constant {current!r} at theta={theta}")
                return current
            previous = current
        raise AsymptoticsError(
            f"F_min samples of {self.model.name.value} are not Cauchy within "
            f"{settings.asymptotic_tolerance:g}: {samples}"
        )


class FreeMinimalSolution(MinimalSolution):
    growth_order = 0.0

    def evaluate(self, theta: np.ndarray) -> np.ndarray:
        return np.ones_like(np.asarray(theta, dtype=float))

    def asymptotic_constant(self) -> float:
        return 1.0


class IsingMinimalSolution(MinimalSolution):
    # -i sinh((theta + i pi)/2) = cosh(theta/2)
    growth_order = 0.5

    def evaluate(self, theta: np.ndarray) -> np.ndarray:
        return np.cosh(0.5 * np.asarray(theta, dtype=float))

    def asymptotic_constant(self) -> str:
        return UNBOUNDED


def _sinh_gordon_weight(t: float, coupling: float) -> float:
    """f_B(t) / t with the removable singularity at t = 0 filled in."""
    if t < 1e-8:
        return coupling * (2.0 - coupling) / 32.0
    return (
        math.sinh(0.25 * t * coupling)
        * math.sinh(0.25 * t * (2.0 - coupling))
        * math.sinh(0.5 * t)
        / (math.sinh(t) ** 2 * t)
    )


class QuadratureTolerances(NamedTuple):
    epsabs: float
    epsrel: float
    limit: int
    tail_cutoff: float
    max_error: float

    @classmethod
    def current(cls) -> "QuadratureTolerances":
        return cls(
            settings.fmin_epsabs, settings.fmin_epsrel, settings.fmin_limit,
            settings.fmin_tail_cutoff, settings.fmin_max_error,
        )


@lru_cache(maxsize=64)
def _tail_end(coupling: float, tail_cutoff: float) -> float:
    """Point beyond which the weight envelope stays below the truncation level."""
    t = 1.0
    while _sinh_gordon_weight(t, coupling) > tail_cutoff:
        t *= 1.25
    return t


def _checked_quad(func, a: float, b: float, frequency: float, label: str,
                  tolerances: QuadratureTolerances) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        value, abserr = quad(
            func, a, b,
            weight="cos", wvar=frequency,
            epsabs=tolerances.epsabs, epsrel=tolerances.epsrel,
            limit=tolerances.limit,
        )
    if not np.isfinite(value) or abserr > tolerances.max_error:
        raise QuadratureError(f"sinh-Gordon quadrature did not converge for {label} on [{a}, {b}]", abserr)
    return value


@lru_cache(maxsize=200_000)
def _cached_moment(coupling: float, theta: float, tolerances: QuadratureTolerances) -> float:
    frequency = abs(theta) / math.pi
    label = f"B={coupling}, theta={theta}"

    def weight(t: float) -> float:
        return _sinh_gordon_weight(t, coupling)

    head = _checked_quad(weight, 0.0, 1.0, frequency, label, tolerances)
    tail = _checked_quad(weight, 1.0, _tail_end(coupling, tolerances.tail_cutoff), frequency, label, tolerances)
    return head + tail


def cosine_moment(coupling: float, theta: float) -> float:
    """
    I(theta) = int_0^inf f_B(t)/t cos(t theta / pi) dt, split at t = 1.

    Memoized per (B, theta) and the quadrature settings in force.
    """
    return _cached_moment(coupling, theta, QuadratureTolerances.current())


class SinhGordonMinimalSolution(MinimalSolution):
    growth_order = 0.0

    def __init__(self, model: ScatteringModel):
        super().__init__(model)
        self.coupling = float(model.coupling)
        self.normalization = model.normalization

    def _log_value(self, theta: float) -> float:
        moment = cosine_moment(self.coupling, abs(theta))
        if self.normalization == Normalization.HAMILTONIAN:
            return 4.0 * (cosine_moment(self.coupling, 0.0) - moment)
        return -4.0 * moment

    def evaluate(self, theta: np.ndarray) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        # even in theta, and differences on a uniform grid repeat heavily
        keys, inverse = np.unique(np.round(np.abs(theta), 12), return_inverse=True)
        values = np.array([math.exp(self._log_value(float(k))) for k in keys])
        return values[inverse].reshape(theta.shape)


_REGISTRY: Dict[ModelName, Type[MinimalSolution]] = {
    ModelName.FREE: FreeMinimalSolution,
    ModelName.ISING: IsingMinimalSolution,
    ModelName.SINH_GORDON: SinhGordonMinimalSolution,
}


def register_model(name: ModelName, solution: Type[MinimalSolution]):
    """Add or replace a catalog entry."""
    _REGISTRY[name] = solution


def minimal_solution(model: ScatteringModel) -> MinimalSolution:
    try:
        return _REGISTRY[model.name](model)
    except KeyError:
        raise ValueError(f"No minimal solution registered for {model.name!r}")


def fmin_shifted(model: ScatteringModel, theta: float) -> float:
    """F_min(theta + i pi) on the real rapidity line."""
    if not math.isfinite(theta):
        raise ValueError(f"theta must be finite, got {theta!r}")
    return float(minimal_solution(model).evaluate(np.array([theta]))[0])


def fmin_shifted_array(model: ScatteringModel, thetas: ArrayLike) -> np.ndarray:
    return minimal_solution(model).evaluate(np.asarray(thetas, dtype=float))


def fmin_samples(model: ScatteringModel, thetas: ArrayLike) -> List[MinimalSolutionValue]:
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    values = fmin_shifted_array(model, thetas)
    return [MinimalSolutionValue(theta=float(t), value=float(v)) for t, v in zip(thetas, values)]


def fmin_asymptotic_constant(model: ScatteringModel) -> Union[float, str]:
    """lim F_min(theta + i pi) as theta -> infinity, or UNBOUNDED."""
    return minimal_solution(model).asymptotic_constant()


def growth_order(model: ScatteringModel) -> float:
    return minimal_solution(model).growth_order
