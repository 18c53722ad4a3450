"""
QEI classification and numerical experiments.

A state-independent one-particle QEI holds when |F_P(theta)| stays below
c cosh(theta) with c < 1/2 at large rapidity, and fails when F_P grows faster
than c cosh(theta) with c > 1/2. c = 1/2 itself is covered by neither statement.
Only the real rapidity line is probed; the strip condition is assumed to follow
for the catalog models.
"""
import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field

from qei_lab.catalog import fmin_asymptotic_constant, fmin_samples, growth_order
from qei_lab.config import settings
from qei_lab.discretize import assemble_matrix, cells_for_cutoff, nested_width
from qei_lab.kernel import Wavefunction, f_p, make_spec
from qei_lab.models import (
    UNBOUNDED,
    AlphaWindow,
    CouplingPoint,
    CutoffPoint,
    DiscretizationGrid,
    GrowthClassification,
    KernelSpec,
    NegativityWitness,
    PolynomialP,
    ScatteringModel,
    SpectrumResult,
    Verdict,
)
from qei_lab.spectral import lowest_eigenpair
from qei_lab.utils import is_cauchy, run_ordered


class GrowthProbe(BaseModel):
    model_config = ConfigDict(frozen=True)

    theta_min: float = Field(default_factory=lambda: settings.default_probe_min, gt=0)
    theta_max: float = Field(default_factory=lambda: settings.default_probe_max, gt=0)
    samples: int = Field(default=6, ge=2)
    margin: float = Field(default_factory=lambda: settings.default_margin, ge=0)
    tolerance: float = Field(default=1e-6, gt=0, description="Cauchy tolerance for ratio samples")


def _probe_points(probe: GrowthProbe) -> np.ndarray:
    return np.geomspace(probe.theta_min, probe.theta_max, probe.samples)


def _verdict(ratio: float, margin: float) -> Verdict:
    if ratio < 0.5 - margin:
        return Verdict.QEI_HOLDS
    if ratio > 0.5 + margin:
        return Verdict.NO_GO
    return Verdict.BORDERLINE


def classify_growth(spec: KernelSpec, probe: Optional[GrowthProbe] = None) -> GrowthClassification:
    """
    Compare the large-rapidity growth of F_P against cosh(theta) / 2.

    The growth order deg P + (F_min order) decides the unbounded and vanishing
    cases analytically; order exactly one is estimated from samples of
    |F_P(theta)| / cosh(theta).
    """
    probe = probe or GrowthProbe()
    order = spec.poly.degree + growth_order(spec.model)
    probe_range = (probe.theta_min, probe.theta_max)
    common = dict(probe_range=probe_range, margin=probe.margin, growth_order=order)

    if order > 1.0:
        logger.info(f"Growth order {order} > 1: ratio unbounded")
        return GrowthClassification(verdict=Verdict.NO_GO, asymptotic_ratio=UNBOUNDED, **common)
    if order < 1.0:
        return GrowthClassification(verdict=Verdict.QEI_HOLDS, asymptotic_ratio=0.0, **common)

    thetas = _probe_points(probe)
    ratios = np.abs(f_p(spec, thetas)) / np.cosh(thetas)
    ratio = float(ratios[-1])
    if not is_cauchy(ratios, probe.tolerance):
        diagnostic = f"ratio samples not Cauchy within {probe.tolerance:g}: {ratios.tolist()}"
        logger.warning(diagnostic)
        return GrowthClassification(
            verdict=Verdict.BORDERLINE, asymptotic_ratio=ratio, diagnostic=diagnostic, **common
        )
    return GrowthClassification(verdict=_verdict(ratio, probe.margin), asymptotic_ratio=ratio, **common)


def admissible_alpha_window(model: ScatteringModel) -> AlphaWindow:
    """|alpha| < 1 / (2 F_min(infinity + i pi)) for P(x) = (1 - alpha) + alpha x."""
    constant = fmin_asymptotic_constant(model)
    if constant == UNBOUNDED:
        return AlphaWindow(degenerate=True, note="P = 1 only")
    half_width = 1.0 / (2.0 * float(constant))
    return AlphaWindow(lower=-half_width, upper=half_width, note=f"F_min(inf + i pi) = {constant!r}")


def find_negativity_witness(
    spec: KernelSpec,
    search_range: Tuple[float, float] = (0.0, 20.0),
    samples: int = 2001,
    threshold: float = 1e-9,
) -> NegativityWitness:
    """
    First rapidity in the range where |F_P| exceeds 1.

    Scans a uniform grid, then bisects between the last sample at or below
    1 + threshold and the first one above it. The returned point always lies on
    the exceeding side.
    """
    lo, hi = search_range
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        raise ValueError(f"search range must be finite and increasing, got {search_range}")

    thetas = np.linspace(lo, hi, samples)
    exceeds = np.abs(f_p(spec, thetas)) > 1.0 + threshold
    if not np.any(exceeds):
        return NegativityWitness()

    first = int(np.argmax(exceeds))
    above = float(thetas[first])
    if first > 0:
        below = float(thetas[first - 1])
        for _ in range(60):
            middle = 0.5 * (below + above)
            if abs(float(f_p(spec, middle))) > 1.0 + threshold:
                above = middle
            else:
                below = middle
    value = float(f_p(spec, above))
    logger.debug(f"Negativity witness at theta_P = {above!r}, F_P = {value!r}")
    return NegativityWitness(theta_p=above, fp_value=value)


def solve_spectrum(spec: KernelSpec, grid: DiscretizationGrid, threads: Optional[int] = None) -> SpectrumResult:
    return lowest_eigenpair(assemble_matrix(spec, grid, threads))


def negative_energy_state(spectrum: SpectrumResult, grid: DiscretizationGrid) -> Wavefunction:
    """Lowest eigenvector as a normalized wavefunction; its energy density expectation is lambda_min."""
    return Wavefunction.from_coefficients(grid, np.array(spectrum.eigenvector))


def scan_cutoff(
    spec: KernelSpec,
    cutoffs: Sequence[float],
    width: float,
    quadrature_order: int = 4,
    threads: Optional[int] = None,
) -> List[CutoffPoint]:
    """lambda_min(R) at one nested cell width not above `width` (N grows with R)."""
    if any(b <= a for a, b in zip(cutoffs, cutoffs[1:])):
        raise ValueError("cutoffs must be strictly increasing")
    width = nested_width(cutoffs, width)

    def point(cutoff: float) -> CutoffPoint:
        grid = DiscretizationGrid(
            cutoff=cutoff, cells=cells_for_cutoff(cutoff, width), quadrature_order=quadrature_order
        )
        result = solve_spectrum(spec, grid, threads=1)
        logger.info(f"R={cutoff}: N={grid.cells}, lambda_min={result.lowest_eigenvalue:.10g}")
        return CutoffPoint(R=cutoff, N=grid.cells, lambda_min=result.lowest_eigenvalue, residual=result.residual)

    return run_ordered(point, cutoffs, threads)


def scan_coupling(
    couplings: Sequence[float],
    grid: DiscretizationGrid,
    sigma: float = 0.1,
    poly: Optional[PolynomialP] = None,
    mass: float = 1.0,
    threads: Optional[int] = None,
) -> List[CouplingPoint]:
    """lambda_min(B) for the sinh-Gordon family on a fixed grid."""
    if any(not 0.0 < b < 2.0 for b in couplings):
        raise ValueError("couplings must lie in the open interval (0, 2)")

    def point(coupling: float) -> CouplingPoint:
        spec = make_spec(ScatteringModel.sinh_gordon(coupling, mass=mass), poly, sigma)
        result = solve_spectrum(spec, grid, threads=1)
        logger.info(f"B={coupling}: lambda_min={result.lowest_eigenvalue:.10g}")
        return CouplingPoint(B=coupling, lambda_min=result.lowest_eigenvalue, residual=result.residual)

    return run_ordered(point, couplings, threads)


def classify_with_report(
    spec: KernelSpec,
    probe: Optional[GrowthProbe] = None,
    search_range: Tuple[float, float] = (0.0, 20.0),
) -> Dict[str, object]:
    """Growth verdict, admissible alpha window and negativity witness in one document."""
    classification = classify_growth(spec, probe)
    window = admissible_alpha_window(spec.model)
    witness = find_negativity_witness(spec, search_range)
    samples = fmin_samples(spec.model, _probe_points(probe or GrowthProbe()))
    logger.success(f"{spec.model.name.value} with P={list(spec.poly.coefficients)}: {classification.verdict.value}")
    return {
        **classification.to_document(),
        "alpha_window": window.to_document(),
        "witness": witness.to_document(),
        "fmin_samples": [sample.model_dump() for sample in samples],
        "spec": spec.describe(),
    }
