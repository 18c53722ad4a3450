"""
Pydantic models for the domain types and report schemas.
"""
from enum import Enum
from typing import Dict, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class ModelName(str, Enum):
    FREE = "free"
    ISING = "ising"
    SINH_GORDON = "sinh-gordon"


class Normalization(str, Enum):
    # F_min(i pi) = 1, so T^00 integrates to the Hamiltonian
    HAMILTONIAN = "hamiltonian"
    # F_min(infinity + i pi) = 1
    ASYMPTOTIC = "asymptotic"


class Verdict(str, Enum):
    QEI_HOLDS = "QeiHolds"
    NO_GO = "NoGo"
    BORDERLINE = "Borderline"


UNBOUNDED = "Unbounded"


class ScatteringModel(BaseModel):
    """A named factorizing scattering model with one massive scalar particle."""

    model_config = ConfigDict(
        frozen=True,
        json_schema_extra={"example": {"name": "sinh-gordon", "mass": 1.0, "coupling": 1.0}},
    )

    name: ModelName = Field(..., description="Model family")
    mass: float = Field(default=1.0, gt=0, description="Particle mass mu")
    coupling: Optional[float] = Field(default=None, description="sinh-Gordon coupling B in (0, 2)")
    normalization: Normalization = Field(
        default=Normalization.HAMILTONIAN, description="Minimal solution normalization (sinh-Gordon only)"
    )

    @model_validator(mode="after")
    def _check_coupling(self) -> "ScatteringModel":
        if self.name == ModelName.SINH_GORDON:
            if self.coupling is None or not 0.0 < self.coupling < 2.0:
                raise ValueError("sinh-Gordon coupling must lie in the open interval (0, 2)")
        elif self.coupling is not None:
            raise ValueError(f"coupling is only defined for sinh-Gordon, not {self.name.value}")
        return self

    @classmethod
    def free(cls, mass: float = 1.0) -> "ScatteringModel":
        return cls(name=ModelName.FREE, mass=mass)

    @classmethod
    def ising(cls, mass: float = 1.0) -> "ScatteringModel":
        return cls(name=ModelName.ISING, mass=mass)

    @classmethod
    def sinh_gordon(cls, coupling: float, mass: float = 1.0,
                    normalization: Normalization = Normalization.HAMILTONIAN) -> "ScatteringModel":
        return cls(name=ModelName.SINH_GORDON, mass=mass, coupling=coupling, normalization=normalization)

    def describe(self) -> Dict[str, object]:
        return {
            "model": self.name.value,
            "mass": self.mass,
            "coupling": self.coupling,
            "fmin_normalization": self.normalization.value,
        }


class MinimalSolutionValue(BaseModel):
    model_config = ConfigDict(frozen=True)

    theta: float = Field(..., description="Real rapidity")
    value: float = Field(..., description="F_min(theta + i pi)")

    @field_validator("value")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not np.isfinite(value):
            raise ValueError("F_min must be finite at finite rapidity")
        return value


class PolynomialP(BaseModel):
    """Real polynomial P(x) = sum_k c_k x^k normalized by P(1) = 1."""

    model_config = ConfigDict(
        frozen=True,
        json_schema_extra={"example": {"coefficients": [0.6, 0.4]}},
    )

    coefficients: Tuple[float, ...] = Field(default=(1.0,), min_length=1, description="c_0 .. c_d")

    @field_validator("coefficients")
    @classmethod
    def _normalized(cls, value: Tuple[float, ...]) -> Tuple[float, ...]:
        if not all(np.isfinite(value)):
            raise ValueError("coefficients must be finite")
        if abs(sum(value) - 1.0) > 1e-12:
            raise ValueError(f"P(1) must equal 1, got {sum(value)!r}")
        return tuple(float(c) for c in value)

    @classmethod
    def from_alpha(cls, alpha: float) -> "PolynomialP":
        """The degree-one family P(x) = (1 - alpha) + alpha x."""
        return cls(coefficients=(1.0 - alpha, alpha))

    @property
    def degree(self) -> int:
        nonzero = [k for k, c in enumerate(self.coefficients) if c != 0.0]
        return nonzero[-1] if nonzero else 0

    @property
    def leading_coefficient(self) -> float:
        return self.coefficients[self.degree]

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(x, self.coefficients)


class SmearingShape(str, Enum):
    GAUSSIAN = "gaussian"


class SmearingFunction(BaseModel):
    """Time smearing g with g(t) = pi^(-1/4) sqrt(mu / 2 sigma) exp(-(mu t)^2 / 8 sigma^2)."""

    model_config = ConfigDict(frozen=True)

    shape: SmearingShape = Field(default=SmearingShape.GAUSSIAN)
    sigma: float = Field(default=0.1, gt=0, description="Dimensionless width parameter")
    mass_ref: float = Field(default=1.0, gt=0, description="Mass scale mu shared with the model")


class KernelSpec(BaseModel):
    """Everything needed to evaluate F^{alpha beta}(theta, eta)."""

    model_config = ConfigDict(frozen=True)

    model: ScatteringModel
    poly: PolynomialP = Field(default_factory=PolynomialP)
    smearing: SmearingFunction = Field(default_factory=SmearingFunction)
    component_pair: Tuple[int, int] = Field(default=(0, 0))

    @field_validator("component_pair")
    @classmethod
    def _valid_indices(cls, value: Tuple[int, int]) -> Tuple[int, int]:
        if any(i not in (0, 1) for i in value):
            raise ValueError("tensor indices must be 0 or 1")
        return value

    @model_validator(mode="after")
    def _shared_mass(self) -> "KernelSpec":
        if self.smearing.mass_ref != self.model.mass:
            raise ValueError("smearing mass_ref must equal the model mass")
        return self

    @property
    def mass(self) -> float:
        return self.model.mass

    def with_component(self, alpha: int, beta: int) -> "KernelSpec":
        return self.model_copy(update={"component_pair": (alpha, beta)})

    def describe(self) -> Dict[str, object]:
        return {
            **self.model.describe(),
            "polynomial": list(self.poly.coefficients),
            "sigma": self.smearing.sigma,
            "component": list(self.component_pair),
        }


class DiscretizationGrid(BaseModel):
    """Uniform cells on [-R, R] with q Gauss-Legendre points per cell and axis."""

    model_config = ConfigDict(frozen=True)

    cutoff: float = Field(..., gt=0, description="Rapidity cutoff R")
    cells: int = Field(..., ge=1, description="Number of cells N")
    quadrature_order: int = Field(default=4, ge=1, description="Points per cell q")

    @property
    def width(self) -> float:
        return 2.0 * self.cutoff / self.cells

    def describe(self) -> Dict[str, object]:
        return {"R": self.cutoff, "N": self.cells, "q": self.quadrature_order}


class BasisFunction(BaseModel):
    model_config = ConfigDict(frozen=True)

    index: int
    lower: float
    upper: float
    amplitude: float


class SpectrumResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    lowest_eigenvalue: float = Field(..., description="Lowest eigenvalue in units of mu")
    eigenvector: Tuple[float, ...] = Field(..., description="Coefficients in the step-function basis")
    residual: float = Field(..., ge=0, description="||M v - lambda v||_2")
    tolerance: float = Field(..., ge=0, description="Residual bound the pair was checked against")
    negative_modes: int = Field(default=0, ge=0)
    provenance: Dict[str, object] = Field(default_factory=dict)

    def to_document(self) -> Dict[str, object]:
        return {
            "lambda_min": self.lowest_eigenvalue,
            "residual": self.residual,
            "negative_modes": self.negative_modes,
            "vector": list(self.eigenvector),
            "provenance": self.provenance,
        }


class GrowthClassification(BaseModel):
    model_config = ConfigDict(frozen=True)

    verdict: Verdict
    asymptotic_ratio: Union[float, str] = Field(..., description="lim sup |F_P| / cosh, or 'Unbounded'")
    probe_range: Tuple[float, float]
    margin: float
    growth_order: float = Field(..., description="Exponent of the growth of F_P")
    diagnostic: Optional[str] = None

    def to_document(self) -> Dict[str, object]:
        return {
            "verdict": self.verdict.value,
            "ratio": self.asymptotic_ratio,
            "probe_range": list(self.probe_range),
            "margin": self.margin,
            "growth_order": self.growth_order,
            "diagnostic": self.diagnostic,
        }


class NegativityWitness(BaseModel):
    model_config = ConfigDict(frozen=True)

    theta_p: Optional[float] = Field(default=None, description="Rapidity with |F_P| > 1, None when absent")
    fp_value: Optional[float] = None

    @property
    def present(self) -> bool:
        return self.theta_p is not None

    @model_validator(mode="after")
    def _exceeds_one(self) -> "NegativityWitness":
        if self.theta_p is not None and (self.fp_value is None or abs(self.fp_value) <= 1.0):
            raise ValueError("a present witness needs |F_P(theta_P)| > 1")
        return self

    def to_document(self) -> Dict[str, object]:
        if not self.present:
            return {"present": False}
        return {"present": True, "theta_p": self.theta_p, "fp_value": self.fp_value}


class AlphaWindow(BaseModel):
    """Open interval of admissible alpha for P(x) = (1 - alpha) + alpha x."""

    model_config = ConfigDict(frozen=True)

    lower: Optional[float] = None
    upper: Optional[float] = None
    degenerate: bool = Field(default=False, description="Only P = 1 is admissible")
    note: str = ""

    def contains(self, alpha: float) -> bool:
        if self.degenerate:
            return alpha == 0.0
        return self.lower < alpha < self.upper

    def to_document(self) -> Dict[str, object]:
        if self.degenerate:
            return {"degenerate": True, "note": self.note}
        return {"degenerate": False, "lower": self.lower, "upper": self.upper, "note": self.note}


class CutoffPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    R: float
    N: int
    lambda_min: float
    residual: float


class CouplingPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    B: float
    lambda_min: float
    residual: float

