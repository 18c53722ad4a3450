"""
Step-function discretization of T^{00}(g^2) on [-R, R].

M_jk = <phi_j, T^{00}(g^2) phi_k> = (1/h) int_{cell_j x cell_k} F^{00}(theta, eta),
approximated by tensor-product Gauss-Legendre quadrature of order q per cell.
"""
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from qei_lab.config import settings
from qei_lab.errors import AssemblyError
from qei_lab.kernel import kernel_value
from qei_lab.models import BasisFunction, DiscretizationGrid, KernelSpec
from qei_lab.utils import row_blocks, run_ordered


@lru_cache(maxsize=16)
def _reference_rule(order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre rule mapped to [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(order)
    return 0.5 * (x + 1.0), 0.5 * w


def quadrature_nodes(grid: DiscretizationGrid) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of every cell, both of shape (N, q)."""
    h = grid.width
    unit_nodes, unit_weights = _reference_rule(grid.quadrature_order)
    lower = -grid.cutoff + h * np.arange(grid.cells)
    nodes = lower[:, None] + h * unit_nodes[None, :]
    weights = np.broadcast_to(h * unit_weights, nodes.shape).copy()
    return nodes, weights


def cell_midpoints(grid: DiscretizationGrid) -> np.ndarray:
    return -grid.cutoff + grid.width * (np.arange(grid.cells) + 0.5)


def cells_for_cutoff(cutoff: float, width: float) -> int:
    """Cell count keeping the cell width close to `width` (fixed-h policy)."""
    return max(1, int(round(2.0 * cutoff / width)))


def nested_width(cutoffs: Sequence[float], width: float) -> float:
    """
    Largest cell width not above `width` that divides every cutoff.

    With R / h an integer for every R, each scan matrix is a principal
    submatrix of the next one.

    Raises:
        ValueError: If a cutoff has no exact fraction with denominator below 10^6
    """
    if width <= 0.0:
        raise ValueError(f"cell width must be positive, got {width}")
    parts = []
    for cutoff in cutoffs:
        part = Fraction(cutoff).limit_denominator(10**6)
        if part <= 0 or float(part) != cutoff:
            raise ValueError(f"cutoff {cutoff} has no common cell width with the others")
        parts.append(part)
    denominator = reduce(lambda a, b: a * b // math.gcd(a, b), (p.denominator for p in parts))
    numerator = reduce(math.gcd, (p.numerator * (denominator // p.denominator) for p in parts))
    common = Fraction(numerator, denominator)
    divisions = max(1, math.ceil(float(common) / width - 1e-9))
    snapped = float(common / divisions)
    if not math.isclose(snapped, width, rel_tol=1e-12):
        logger.info(f"Cell width {width:.6g} snapped to {snapped:.6g} so the cutoff grids nest")
    return snapped


def basis_function(grid: DiscretizationGrid, j: int) -> BasisFunction:
    """phi_j = h^(-1/2) on [-R + j h, -R + (j + 1) h)."""
    if not 0 <= j < grid.cells:
        raise IndexError(f"basis index {j} outside [0, {grid.cells})")
    h = grid.width
    return BasisFunction(
        index=j,
        lower=-grid.cutoff + j * h,
        upper=-grid.cutoff + (j + 1) * h,
        amplitude=1.0 / math.sqrt(h),
    )


def node_kernel(spec: KernelSpec, grid: DiscretizationGrid, threads: Optional[int] = None) -> np.ndarray:
    """
    Kernel at all node pairs, shape (N, q, N, q).

    Row blocks are evaluated concurrently; every entry is computed on its own,
    so the result does not depend on scheduling.
    """
    nodes, _ = quadrature_nodes(grid)
    flat = nodes.ravel()

    def block(rows: slice) -> np.ndarray:
        return kernel_value(spec, flat[rows, None], flat[None, :])

    blocks = run_ordered(block, row_blocks(flat.size, threads or settings.threads), threads)
    n, q = grid.cells, grid.quadrature_order
    return np.vstack(blocks).reshape(n, q, n, q)


def cell_pair_integrals(kernel: np.ndarray, grid: DiscretizationGrid,
                        left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """
    sum_ab left_ja w_a K(ja, kb) w_b right_kb for every cell pair (j, k).

    Shared by matrix assembly and kernel.matrix_element so both use the
    same rule in the same summation order.
    """
    _, weights = quadrature_nodes(grid)
    return np.einsum("ja,jakb,kb->jk", left * weights, kernel, right * weights)


@dataclass(frozen=True)
class KernelMatrix:
    """Symmetric N x N matrix of T^{00}(g^2) in the step-function basis."""

    entries: np.ndarray
    grid: DiscretizationGrid
    spec: KernelSpec
    provenance: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        self.entries.setflags(write=False)

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.entries)))


def assemble_matrix(spec: KernelSpec, grid: DiscretizationGrid, threads: Optional[int] = None) -> KernelMatrix:
    """
    Build M_jk for the energy density and symmetrize it.

    Raises:
        AssemblyError: a non-finite entry, reported with its (j, k)
    """
    if spec.component_pair != (0, 0):
        logger.warning(f"Assembling component {spec.component_pair}; energy-density runs use (0, 0)")

    logger.info(
        f"Assembling {grid.cells}x{grid.cells} matrix for {spec.model.name.value} "
        f"(R={grid.cutoff}, q={grid.quadrature_order}, sigma={spec.smearing.sigma})"
    )
    kernel = node_kernel(spec, grid, threads)
    amplitude = np.full((grid.cells, grid.quadrature_order), 1.0 / math.sqrt(grid.width))
    entries = cell_pair_integrals(kernel, grid, amplitude, amplitude)

    bad = np.argwhere(~np.isfinite(entries))
    if bad.size:
        j, k = (int(i) for i in bad[0])
        raise AssemblyError("non-finite matrix entry", j, k)

    entries = 0.5 * (entries + entries.T)
    provenance = {**spec.describe(), **grid.describe()}
    logger.debug(f"Assembly done, max |M| = {np.max(np.abs(entries)):.6e}")
    return KernelMatrix(entries=entries, grid=grid, spec=spec, provenance=provenance)
