"""Grid-paradigm reference implementation.

Boundaries are point clouds of voxel centers, distances are point-to-point,
and every boundary point counts once regardless of how much boundary it
represents. This is the conventional way the metrics are computed on masks
and serves as the contrast to the mesh-based computation.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree

from .distance import build_index, directed_profile
from .grid import BinaryMask, EmptySegmentationWarning, GeometryMismatchError, is_empty, pad_background
from .grid import dsc as _dsc
from .grid import iou as _iou
from .metrics import (
    GRID_METRICS,
    MetricConfig,
    MetricReport,
    _check_metric_names,
    edge_case_message,
    edge_case_values,
    evaluate,
    rank_percentile,
)
from .meshing import surface_nets


@dataclass(frozen=True, eq=False)
class BoundaryPointCloud:
    """Voxel centers (mm) of foreground voxels with a background face-neighbour."""

    points: np.ndarray
    indices: np.ndarray
    shape: tuple[int, ...]
    spacing: tuple[float, ...]
    origin: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.points)


def boundary_points(mask: BinaryMask) -> BoundaryPointCloud:
    """Face-connectivity erosion residue of the mask, as physical points."""
    padded = pad_background(mask).array
    structure = ndimage.generate_binary_structure(mask.ndim, 1)
    eroded = ndimage.binary_erosion(padded, structure=structure, border_value=0)
    inner = (slice(1, -1),) * mask.ndim
    edge = (padded & ~eroded)[inner]
    idx = np.argwhere(edge)
    return BoundaryPointCloud(mask.voxel_centers(idx), idx, mask.shape, mask.spacing, mask.origin)


def directed_point_distances(source: BoundaryPointCloud, target: BoundaryPointCloud) -> np.ndarray:
    """Nearest point-to-point distance from every source point to the target cloud."""
    d, _ = cKDTree(target.points).query(source.points)
    return np.sort(d)


def grid_band(mask: BinaryMask, tau: float) -> np.ndarray:
    """Foreground voxels closer than ``tau`` to the nearest background voxel center."""
    padded = pad_background(mask).array
    edt = ndimage.distance_transform_edt(padded, sampling=mask.spacing)
    inner = (slice(1, -1),) * mask.ndim
    return mask.array & (edt[inner] < tau)


def _grid_profiles(a: BinaryMask, b: BinaryMask):
    pa, pb = boundary_points(a), boundary_points(b)
    return directed_point_distances(pa, pb), directed_point_distances(pb, pa)


def grid_metrics(
    a: BinaryMask,
    b: BinaryMask,
    config: MetricConfig | None = None,
    metrics: Iterable[str] | None = None,
) -> MetricReport:
    """Grid-paradigm counterpart of :func:`meshdist.metrics.evaluate`.

    HD percentiles use the rank rule over point-to-point distances; MASD,
    ASSD and NSD use unweighted means and counts; BIoU uses Euclidean
    distance transforms on the grid. Edge cases follow the same policy.
    """
    config = config or MetricConfig()
    metrics = _check_metric_names(metrics)
    if any(m in GRID_METRICS for m in metrics) and not a.same_geometry(b):
        raise GeometryMismatchError("BIoU, DSC and IoU need both masks on the same grid")
    a_empty, b_empty = is_empty(a), is_empty(b)
    if a_empty or b_empty:
        msg = edge_case_message(a_empty, b_empty)
        warnings.warn(msg, EmptySegmentationWarning, stacklevel=2)
        return MetricReport(edge_case_values(metrics, a_empty, b_empty), a_empty, b_empty, [msg])

    d_ab, d_ba = _grid_profiles(a, b)
    n_ab, n_ba = len(d_ab), len(d_ba)
    values = {}
    for name in metrics:
        if name == "hd":
            values[name] = float(max(d_ab[-1], d_ba[-1]))
        elif name == "hd_perc":
            values[name] = max(rank_percentile(d_ab, config.percentile), rank_percentile(d_ba, config.percentile))
        elif name == "masd":
            values[name] = 0.5 * (math.fsum(d_ab) / n_ab + math.fsum(d_ba) / n_ba)
        elif name == "assd":
            values[name] = (math.fsum(d_ab) + math.fsum(d_ba)) / (n_ab + n_ba)
        elif name == "nsd":
            within = np.count_nonzero(d_ab <= config.tau) + np.count_nonzero(d_ba <= config.tau)
            values[name] = within / (n_ab + n_ba)
        elif name == "biou":
            band_a, band_b = grid_band(a, config.tau), grid_band(b, config.tau)
            union = np.count_nonzero(band_a | band_b)
            values[name] = np.count_nonzero(band_a & band_b) / union if union else 0.0
        elif name == "dsc":
            values[name] = _dsc(a, b)
        elif name == "iou":
            values[name] = _iou(a, b)
    return MetricReport(values)


def _nsd_from_sorted(d_ab: np.ndarray, w_ab: np.ndarray, d_ba: np.ndarray, w_ba: np.ndarray, taus) -> list[float]:
    c_ab = np.concatenate([[0.0], np.cumsum(w_ab)])
    c_ba = np.concatenate([[0.0], np.cumsum(w_ba)])
    total = c_ab[-1] + c_ba[-1]
    k_ab = np.searchsorted(d_ab, taus, side="right")
    k_ba = np.searchsorted(d_ba, taus, side="right")
    return [float(v) for v in (c_ab[k_ab] + c_ba[k_ba]) / total]


def nsd_curve(
    a: BinaryMask,
    b: BinaryMask,
    tau_values: Sequence[float],
    paradigm: str = "mesh",
) -> list[tuple[float, float]]:
    """NSD as a function of the tolerance, under the mesh or grid paradigm.

    Both masks must be non-empty. Returns ``(tau, nsd)`` pairs in the order
    of ``tau_values`` (which must be ascending).
    """
    taus = np.asarray(tau_values, dtype=float)
    if np.any(np.diff(taus) < 0):
        raise ValueError("tau_values must be ascending")
    if np.any(taus < 0):
        raise ValueError("tau values must be non-negative")
    if is_empty(a) or is_empty(b):
        raise ValueError("nsd_curve needs two non-empty masks")
    if paradigm == "grid":
        d_ab, d_ba = _grid_profiles(a, b)
        vals = _nsd_from_sorted(d_ab, np.ones(len(d_ab)), d_ba, np.ones(len(d_ba)), taus)
    elif paradigm == "mesh":
        p_ab, p_ba = mesh_profiles(a, b)
        vals = _nsd_from_sorted(p_ab.distances, p_ab.weights, p_ba.distances, p_ba.weights, taus)
    else:
        raise ValueError(f"paradigm must be 'mesh' or 'grid', got {paradigm!r}")
    return list(zip(taus.tolist(), vals))


def grid_distance_values(a: BinaryMask, b: BinaryMask) -> np.ndarray:
    """Distinct point-to-point distances of the grid paradigm (the NSD jump locations)."""
    d_ab, d_ba = _grid_profiles(a, b)
    return np.unique(np.concatenate([d_ab, d_ba]))


def mesh_profiles(a: BinaryMask, b: BinaryMask):
    mesh_a, mesh_b = surface_nets(a), surface_nets(b)
    return directed_profile(mesh_a, build_index(mesh_b)), directed_profile(mesh_b, build_index(mesh_a))


def compare(a: BinaryMask, b: BinaryMask, config: MetricConfig | None = None, metrics=None) -> dict:
    """Mesh and grid paradigm values side by side, with deviation ``grid - mesh``."""
    with warnings.catch_warnings(record=True):
        warnings.simplefilter("always")
        mesh = evaluate(a, b, config, metrics)
        grid = grid_metrics(a, b, config, metrics)
    deviation = {}
    for name, mv in mesh.values.items():
        gv = grid.values[name]
        deviation[name] = 0.0 if gv == mv else gv - mv
    return {"mesh": mesh, "grid": grid, "deviation": deviation}

