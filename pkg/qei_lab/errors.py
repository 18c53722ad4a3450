"""
Exception hierarchy with error codes and process exit codes.
"""
from typing import Optional


class QeiLabError(Exception):
    """Base error. Subclasses fix the error code family and the CLI exit code."""

    error_code: str = "QEI_000"
    exit_code: int = 1

    def __init__(self, detail: str, error_code: Optional[str] = None):
        super().__init__(detail)
        self.detail = detail
        if error_code:
            self.error_code = error_code

    def __str__(self) -> str:
        return f"[{self.error_code}] {self.detail}"


class ConfigError(QeiLabError):
    error_code = "CFG_001"
    exit_code = 2


class NumericalError(QeiLabError):
    error_code = "NUM_001"
    exit_code = 3


class QuadratureError(NumericalError):
    """Adaptive quadrature did not reach the requested tolerance."""

    error_code = "NUM_QUAD"

    def __init__(self, detail: str, abserr: float):
        super().__init__(f"{detail} (achieved error estimate {abserr:.3e})")
        self.abserr = abserr


class AsymptoticsError(NumericalError):
    """Large-rapidity samples did not settle to a constant."""

    error_code = "NUM_ASYM"


class AssemblyError(NumericalError):
    error_code = "NUM_ASSEMBLY"

    def __init__(self, detail: str, j: int, k: int):
        super().__init__(f"{detail} at entry ({j}, {k})")
        self.j = j
        self.k = k


class SpectralError(NumericalError):
    error_code = "NUM_EIG"

    def __init__(self, detail: str, iterations: Optional[int] = None, residual: Optional[float] = None):
        parts = [detail]
        if iterations is not None:
            parts.append(f"iterations={iterations}")
        if residual is not None:
            parts.append(f"best residual={residual:.3e}")
        super().__init__(", ".join(parts))
        self.iterations = iterations
        self.residual = residual


class OutputError(QeiLabError):
    error_code = "IO_001"
    exit_code = 4
