"""
Command-line front end for the energy density experiments.

Exit codes: 0 ok, 2 configuration, 3 numerical, 4 I/O.
"""
import argparse
import sys
from typing import Any, Callable, Dict, List, Optional

import numpy as np
import pandas as pd
from loguru import logger
from pydantic import ValidationError

from qei_lab import __version__
from qei_lab.analysis import GrowthProbe, classify_with_report, scan_coupling, scan_cutoff
from qei_lab.config import ExperimentConfig, load_config, settings
from qei_lab.discretize import assemble_matrix, cell_midpoints, nested_width
from qei_lab.errors import ConfigError, QeiLabError
from qei_lab.kernel import kernel_grid, make_spec
from qei_lab.models import DiscretizationGrid, KernelSpec, ModelName, Normalization, PolynomialP, ScatteringModel
from qei_lab.spectral import lowest_eigenpair
from qei_lab.storage import ResultStore
from qei_lab.utils import provenance_digest, setup_logging


def _float_list(text: str) -> List[float]:
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="Flat JSON experiment config")
    common.add_argument("--out", dest="output", default=None, help="Output directory")
    common.add_argument("--format", choices=("csv", "json"), default=None, help="Table output format")
    common.add_argument("--threads", type=_positive_int, default=None, help="Worker threads")
    common.add_argument("--model", default=None, help="free | ising | sinh-gordon")
    common.add_argument("--mass", type=float, default=None)
    common.add_argument("--coupling", type=float, default=None, help="sinh-Gordon coupling B")
    common.add_argument("--fmin-normalization", dest="fmin_normalization", default=None,
                        help="hamiltonian | asymptotic")
    common.add_argument("--poly", dest="polynomial", type=_float_list, default=None,
                        help="Polynomial coefficients c0,c1,... with P(1) = 1")
    common.add_argument("--sigma", type=float, default=None)
    common.add_argument("--R", type=float, default=None, help="Rapidity cutoff")
    common.add_argument("--N", type=int, default=None, help="Number of cells")
    common.add_argument("--q", type=int, default=None, help="Gauss points per cell")
    common.add_argument("--log-level", default=None)

    parser = argparse.ArgumentParser(
        prog="qei-lab",
        description="Energy density at one-particle level in factorizing scattering models",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    spectrum = sub.add_parser("spectrum", parents=[common], help="Lowest eigenpair of T00(g^2)")
    spectrum.add_argument("--dump-matrix", action="store_true", help="Also write the N x N matrix")

    coupling = sub.add_parser("scan-coupling", parents=[common], help="lambda_min over sinh-Gordon couplings")
    coupling.add_argument("--B-list", dest="B_list", type=_float_list, default=None)

    cutoff = sub.add_parser("scan-cutoff", parents=[common], help="lambda_min over rapidity cutoffs")
    cutoff.add_argument("--R-list", dest="R_list", type=_float_list, default=None)
    cutoff.add_argument("--h", type=float, default=None, help="Fixed cell width")

    classify = sub.add_parser("classify", parents=[common], help="QEI growth classification report")
    classify.add_argument("--probe-min", dest="probe_min", type=float, default=None)
    classify.add_argument("--probe-max", dest="probe_max", type=float, default=None)
    classify.add_argument("--margin", type=float, default=None)

    dump = sub.add_parser("kernel-dump", parents=[common], help="Kernel values on a rapidity grid")
    dump.add_argument("--points", dest="dump_points", type=int, default=None)
    dump.add_argument("--theta-min", dest="dump_theta_min", type=float, default=None)
    dump.add_argument("--theta-max", dest="dump_theta_max", type=float, default=None)

    return parser


_NON_CONFIG_FLAGS = {"command", "config", "threads", "log_level", "dump_matrix"}


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    return {k: v for k, v in vars(args).items() if k not in _NON_CONFIG_FLAGS and v is not None}


def spec_from_config(config: ExperimentConfig) -> KernelSpec:
    """Domain objects from a validated config; invariant violations become ConfigError."""
    try:
        model = ScatteringModel(
            name=ModelName(config.model),
            mass=config.mass,
            coupling=config.coupling,
            normalization=Normalization(config.fmin_normalization),
        )
        return make_spec(model, PolynomialP(coefficients=tuple(config.polynomial)), config.sigma,
                         tuple(config.dump_component))
    except ValidationError as e:
        details = "; ".join(f"{'.'.join(map(str, err['loc'])) or 'config'}: {err['msg']}" for err in e.errors())
        raise ConfigError(details)


def grid_from_config(config: ExperimentConfig) -> DiscretizationGrid:
    return DiscretizationGrid(cutoff=config.R, cells=config.N, quadrature_order=config.q)


def provenance(config: ExperimentConfig, command: str) -> Dict[str, Any]:
    data = config.model_dump(mode="json", exclude={"output", "format"})
    data["command"] = command
    data["version"] = __version__
    data["digest"] = provenance_digest(data)
    return data


def cmd_spectrum(config: ExperimentConfig, store: ResultStore, threads: Optional[int],
                 dump_matrix: bool = False) -> Dict[str, Any]:
    spec = spec_from_config(config).with_component(0, 0)
    grid = grid_from_config(config)
    matrix = assemble_matrix(spec, grid, threads)
    result = lowest_eigenpair(matrix)
    meta = provenance(config, "spectrum")

    document = result.to_document()
    document["provenance"] = meta
    store.write_json("spectrum.json", document)

    vector = pd.DataFrame({"theta_mid": cell_midpoints(grid), "component": np.array(result.eigenvector)})
    vector_file = store.write_table("eigenvector.csv", vector)
    store.write_sidecar(vector_file, meta)

    if dump_matrix:
        matrix_file = store.write_matrix("matrix.csv", matrix.entries)
        store.write_sidecar(matrix_file, {
            "model": config.model,
            "mass": config.mass,
            "coupling": config.coupling,
            "polynomial": list(config.polynomial),
            "sigma": config.sigma,
            "R": config.R,
            "N": config.N,
            "q": config.q,
        })

    logger.success(f"lambda_min = {result.lowest_eigenvalue:.12g} (residual {result.residual:.2e})")
    return document


def cmd_scan_coupling(config: ExperimentConfig, store: ResultStore, threads: Optional[int]) -> List[Dict[str, Any]]:
    if not config.B_list:
        raise ConfigError("B_list must not be empty")
    poly = PolynomialP(coefficients=tuple(config.polynomial))
    rows = scan_coupling(config.B_list, grid_from_config(config), config.sigma, poly, config.mass, threads)
    records = [row.model_dump() for row in rows]
    name = f"scan_coupling.{config.format}"
    path = store.write_records(name, records, ["B", "lambda_min", "residual"], config.format)
    store.write_sidecar(path, provenance(config, "scan-coupling"))
    best = min(rows, key=lambda row: row.lambda_min)
    logger.success(f"Scanned {len(rows)} couplings; minimum {best.lambda_min:.10g} at B={best.B}")
    return records


def cmd_scan_cutoff(config: ExperimentConfig, store: ResultStore, threads: Optional[int]) -> List[Dict[str, Any]]:
    if not config.R_list:
        raise ConfigError("R_list must not be empty")
    spec = spec_from_config(config).with_component(0, 0)
    try:
        width = nested_width(config.R_list, config.h or 2.0 * config.R / config.N)
    except ValueError as e:
        raise ConfigError(f"R_list: {e}")
    rows = scan_cutoff(spec, config.R_list, width, config.q, threads)
    records = [row.model_dump() for row in rows]
    name = f"scan_cutoff.{config.format}"
    path = store.write_records(name, records, ["R", "N", "lambda_min", "residual"], config.format)
    store.write_sidecar(path, provenance(config, "scan-cutoff"), {"cell_width": width})
    logger.success(f"Scanned {len(rows)} cutoffs at h={width:.6g}")
    return records


def cmd_classify(config: ExperimentConfig, store: ResultStore, threads: Optional[int]) -> Dict[str, Any]:
    spec = spec_from_config(config)
    probe = GrowthProbe(theta_min=config.probe_min, theta_max=config.probe_max, margin=config.margin)
    report = classify_with_report(spec, probe, tuple(config.witness_range))
    report["provenance"] = provenance(config, "classify")
    store.write_json("classify.json", report)
    return report


def cmd_kernel_dump(config: ExperimentConfig, store: ResultStore, threads: Optional[int]) -> pd.DataFrame:
    spec = spec_from_config(config)
    thetas = np.linspace(config.dump_theta_min, config.dump_theta_max, config.dump_points)
    values = kernel_grid(spec, thetas, thetas)
    theta_col, eta_col = np.meshgrid(thetas, thetas, indexing="ij")
    frame = pd.DataFrame({"theta": theta_col.ravel(), "eta": eta_col.ravel(), "value": values.ravel()})
    if config.format == "json":
        path = store.write_json("kernel_dump.json", frame.to_dict(orient="records"))
    else:
        path = store.write_table("kernel_dump.csv", frame)
    store.write_sidecar(path, provenance(config, "kernel-dump"))
    return frame


COMMANDS: Dict[str, Callable[..., Any]] = {
    "spectrum": cmd_spectrum,
    "scan-coupling": cmd_scan_coupling,
    "scan-cutoff": cmd_scan_cutoff,
    "classify": cmd_classify,
    "kernel-dump": cmd_kernel_dump,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(level=args.log_level)
    logger.info(f"{settings.app_name} v{__version__}: {args.command}")

    try:
        config = load_config(args.config, _overrides(args))
        store = ResultStore(config.output)
        handler = COMMANDS[args.command]
        if args.command == "spectrum":
            handler(config, store, args.threads, dump_matrix=args.dump_matrix)
        else:
            handler(config, store, args.threads)
    except QeiLabError as e:
        logger.error(str(e))
        return e.exit_code
    except Exception as e:
        logger.exception(f"Unhandled exception: {e}")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
