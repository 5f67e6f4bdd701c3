"""Command-line interface: ``meshdist compute|compare|curve REF PRED``.

Exit status is 0 on success, 2 on invalid input and 1 on internal errors.
Reports go to standard output; warnings are repeated on standard error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings

import numpy as np

from .baseline import compare, grid_metrics, nsd_curve
from .grid import BinaryMask, GeometryMismatchError, resample_nearest
from .io import FormatError, read_mask, read_mesh
from .meshing import BoundaryMesh
from .metrics import (
    ALL_METRICS,
    GRID_METRICS,
    UNITS,
    MetricConfig,
    MetricReport,
    edge_case_message,
    edge_case_values,
    evaluate,
    mesh_metric_values,
)


class InputError(Exception):
    """Bad command-line input; reported with exit status 2."""


def _number(value: float):
    if isinstance(value, float) and not math.isfinite(value):
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    return value


def _float_list(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if any(v <= 0 for v in values):
        raise argparse.ArgumentTypeError("values must be positive")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="meshdist", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("ref", help="reference mask (.nrrd, .pgm) or mesh (.obj)")
    common.add_argument("pred", help="predicted mask (.nrrd, .pgm) or mesh (.obj)")
    common.add_argument("--percentile", type=float, default=95.0, help="HD percentile p in (0, 100] (default 95)")
    common.add_argument("--tau", type=float, default=2.0, help="NSD/BIoU tolerance in mm (default 2.0)")
    common.add_argument("--metrics", default=None, help="comma list of " + ",".join(ALL_METRICS) + " (default all)")
    common.add_argument("--resample", type=_float_list, default=None, metavar="H1,H2[,H3]", help="resample masks to this spacing (mm)")
    common.add_argument("--spacing", type=_float_list, default=None, metavar="H1,H2", help="pixel spacing for PGM input (mm)")
    common.add_argument("--format", choices=("json", "csv"), default=None, help="output format")
    common.add_argument("--threads", type=int, default=None, help="worker threads for distance queries")

    p = sub.add_parser("compute", parents=[common], help="evaluate metrics")
    p.add_argument("--paradigm", choices=("mesh", "grid"), default="mesh")
    sub.add_parser("compare", parents=[common], help="mesh vs grid paradigm with deviations (grid - mesh)")
    p = sub.add_parser("curve", parents=[common], help="NSD as a function of tau (CSV)")
    p.add_argument("--paradigm", choices=("mesh", "grid"), default="mesh")
    p.add_argument("--tau-start", type=float, default=0.0)
    p.add_argument("--tau-stop", type=float, default=5.0)
    p.add_argument("--tau-step", type=float, default=0.01)
    return parser


def _is_mesh_path(path: str) -> bool:
    return os.path.splitext(path)[1].lower() == ".obj"


def _load(path: str, args) -> BinaryMask | BoundaryMesh:
    if not os.path.exists(path):
        raise InputError(f"no such file: {path}")
    if _is_mesh_path(path):
        return read_mesh(path)
    mask = read_mask(path, spacing=args.spacing)
    if args.resample is not None:
        if len(args.resample) not in (1, mask.ndim):
            raise InputError(f"--resample needs {mask.ndim} values for a {mask.ndim}D mask")
        mask = resample_nearest(mask, args.resample)
    return mask


def _selected_metrics(args, meshes: bool) -> tuple[str, ...]:
    if args.metrics is None:
        names = tuple(m for m in ALL_METRICS if not (meshes and m in GRID_METRICS))
    else:
        names = tuple(m.strip() for m in args.metrics.split(",") if m.strip())
        unknown = [m for m in names if m not in ALL_METRICS]
        if unknown or not names:
            raise InputError(f"unknown or empty metric selection {args.metrics!r}")
    if meshes and any(m in GRID_METRICS for m in names):
        raise InputError("BIoU, DSC and IoU need mask inputs, not meshes")
    return names


def _mesh_report(a: BoundaryMesh, b: BoundaryMesh, config, names) -> MetricReport:
    a_empty, b_empty = a.n_elements == 0, b.n_elements == 0
    if a_empty or b_empty:
        msg = edge_case_message(a_empty, b_empty)
        return MetricReport(edge_case_values(names, a_empty, b_empty), a_empty, b_empty, [msg])
    if a.ndim != b.ndim:
        raise InputError("reference and prediction meshes differ in dimension")
    return MetricReport(mesh_metric_values(a, b, config, names))


def _payload(metrics: dict, report: MetricReport, names, config, extra=None) -> dict:
    out = {
        "metrics": metrics,
        "flags": {"ref_empty": report.ref_empty, "pred_empty": report.pred_empty},
        "warnings": list(report.warnings),
        "units": {m: UNITS[m] for m in names},
        "config": {"percentile": config.percentile, "tau": config.tau},
    }
    out.update(extra or {})
    return out


def _run_compute(args, config, out) -> None:
    meshes = _is_mesh_path(args.ref) or _is_mesh_path(args.pred)
    if meshes and not (_is_mesh_path(args.ref) and _is_mesh_path(args.pred)):
        raise InputError("give either two masks or two meshes")
    names = _selected_metrics(args, meshes)
    ref, pred = _load(args.ref, args), _load(args.pred, args)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        if meshes:
            if args.paradigm == "grid":
                raise InputError("the grid paradigm needs mask inputs")
            report = _mesh_report(ref, pred, config, names)
        elif args.paradigm == "grid":
            report = grid_metrics(ref, pred, config, names)
        else:
            report = evaluate(ref, pred, config, names)
    _emit_warnings(report.warnings)
    metrics = {m: _number(report.values[m]) for m in names}
    if args.format == "csv":
        out.write("metric,value,unit\n")
        for m in names:
            out.write(f"{m},{_fmt(report.values[m])},{UNITS[m]}\n")
    else:
        _dump(_payload(metrics, report, names, config, {"paradigm": args.paradigm}), out)


def _run_compare(args, config, out) -> None:
    if _is_mesh_path(args.ref) or _is_mesh_path(args.pred):
        raise InputError("compare needs mask inputs")
    names = _selected_metrics(args, False)
    ref, pred = _load(args.ref, args), _load(args.pred, args)
    result = compare(ref, pred, config, names)
    mesh, grid, dev = result["mesh"], result["grid"], result["deviation"]
    _emit_warnings(mesh.warnings)
    if args.format == "csv":
        out.write("metric,mesh,grid,deviation\n")
        for m in names:
            out.write(f"{m},{_fmt(mesh.values[m])},{_fmt(grid.values[m])},{_fmt(dev[m])}\n")
        return
    metrics = {
        "mesh": {m: _number(mesh.values[m]) for m in names},
        "grid": {m: _number(grid.values[m]) for m in names},
        "deviation": {m: _number(dev[m]) for m in names},
    }
    _dump(_payload(metrics, mesh, names, config, {"deviation_sign": "grid - mesh"}), out)


def _run_curve(args, config, out) -> None:
    if _is_mesh_path(args.ref) or _is_mesh_path(args.pred):
        raise InputError("curve needs mask inputs")
    if args.tau_step <= 0 or args.tau_stop < args.tau_start or args.tau_start < 0:
        raise InputError("need 0 <= tau-start <= tau-stop and tau-step > 0")
    n = int(math.floor((args.tau_stop - args.tau_start) / args.tau_step + 1e-9)) + 1
    taus = np.round(args.tau_start + np.arange(n) * args.tau_step, 12)
    ref, pred = _load(args.ref, args), _load(args.pred, args)
    try:
        rows = nsd_curve(ref, pred, taus, paradigm=args.paradigm)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    if args.format == "json":
        _dump({"paradigm": args.paradigm, "curve": [[t, v] for t, v in rows]}, out)
        return
    out.write("tau,nsd\n")
    for t, v in rows:
        out.write(f"{t!r},{v!r}\n")


def _fmt(value: float) -> str:
    return str(_number(value)) if isinstance(value, float) and not math.isfinite(value) else repr(value)


def _dump(obj: dict, out) -> None:
    json.dump(obj, out, indent=2, allow_nan=False)
    out.write("\n")


def _emit_warnings(messages) -> None:
    for msg in messages:
        print(f"warning: {msg}", file=sys.stderr)


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = MetricConfig(args.percentile, args.tau)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.threads is not None:
        import numba

        if not 1 <= args.threads <= numba.config.NUMBA_NUM_THREADS:
            print(f"error: --threads must lie in [1, {numba.config.NUMBA_NUM_THREADS}]", file=sys.stderr)
            return 2
        numba.set_num_threads(args.threads)
    handlers = {"compute": _run_compute, "compare": _run_compare, "curve": _run_curve}
    try:
        handlers[args.command](args, config, out)
    except (InputError, FormatError, GeometryMismatchError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


__all__ = ["build_parser", "main", "run"]
