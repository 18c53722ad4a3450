"""
Dense symmetric eigensolver for KernelMatrix.

LAPACK ?syev (via scipy.linalg.eigh, driver "ev") reduces the matrix to
tridiagonal form with Householder reflections and then runs implicitly shifted
QL/QR iteration. No randomized steps: equal inputs give equal outputs.
"""
from typing import Optional, Tuple, Union

import numpy as np
import scipy.linalg
from loguru import logger

from qei_lab.config import settings
from qei_lab.discretize import KernelMatrix
from qei_lab.errors import SpectralError
from qei_lab.models import SpectrumResult

MatrixLike = Union[KernelMatrix, np.ndarray]


def _entries(matrix: MatrixLike) -> np.ndarray:
    entries = matrix.entries if isinstance(matrix, KernelMatrix) else np.asarray(matrix, dtype=float)
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise SpectralError(f"expected a square matrix, got shape {entries.shape}")
    if not np.all(np.isfinite(entries)):
        raise SpectralError("matrix has non-finite entries")
    scale = max(float(np.max(np.abs(entries))), 1e-300)
    if np.max(np.abs(entries - entries.T)) > 1e-12 * scale:
        raise SpectralError("matrix is not symmetric")
    return entries


def _decompose(entries: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    try:
        return scipy.linalg.eigh(entries, driver="ev", check_finite=False)
    except np.linalg.LinAlgError as e:
        # ?syev reports how many off-diagonal elements failed to converge
        raise SpectralError(f"QL iteration did not converge: {e}", iterations=30 * entries.shape[0])


def fix_sign(vector: np.ndarray) -> np.ndarray:
    """Make the component of largest magnitude positive."""
    pivot = int(np.argmax(np.abs(vector)))
    return -vector if vector[pivot] < 0 else vector


def residual_tolerance(entries: np.ndarray) -> float:
    return settings.residual_factor * max(float(np.linalg.norm(entries, np.inf)), np.finfo(float).tiny)


def lowest_eigenpair(matrix: MatrixLike) -> SpectrumResult:
    """
    Lowest eigenvalue and unit eigenvector with a certified residual.

    Raises:
        SpectralError: non-convergence or a residual above the configured bound
    """
    entries = _entries(matrix)
    values, vectors = _decompose(entries)
    lowest = float(values[0])
    vector = fix_sign(vectors[:, 0])
    vector = vector / np.linalg.norm(vector)

    residual = float(np.linalg.norm(entries @ vector - lowest * vector))
    tolerance = residual_tolerance(entries)
    if residual > tolerance:
        raise SpectralError(f"residual {residual:.3e} exceeds bound {tolerance:.3e}", residual=residual)

    negative = int(np.sum(values < -tolerance))
    provenance = dict(matrix.provenance) if isinstance(matrix, KernelMatrix) else {"N": entries.shape[0]}
    logger.debug(f"lambda_min = {lowest:.12g}, residual = {residual:.3e}, negative modes = {negative}")

    return SpectrumResult(
        lowest_eigenvalue=lowest,
        eigenvector=tuple(float(c) for c in vector),
        residual=residual,
        tolerance=tolerance,
        negative_modes=negative,
        provenance=provenance,
    )


def full_spectrum(matrix: MatrixLike, with_vectors: bool = False):
    """All eigenvalues in ascending order, optionally with orthonormal eigenvectors as columns."""
    entries = _entries(matrix)
    values, vectors = _decompose(entries)
    if with_vectors:
        signed = np.column_stack([fix_sign(vectors[:, i]) for i in range(vectors.shape[1])])
        return values, signed
    return values


def count_negative_modes(matrix: MatrixLike, tolerance: Optional[float] = None) -> int:
    entries = _entries(matrix)
    values = full_spectrum(entries)
    bound = residual_tolerance(entries) if tolerance is None else tolerance
    return int(np.sum(values < -bound))
