"""Distance-based segmentation metrics on boundary-element-weighted profiles.

The directed quantities follow the mesh discretization: every source
boundary element contributes its centroid distance weighted by its size.
Symmetric metrics combine the two directions; empty inputs are routed
through a fixed edge-case policy with flags and warnings.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .distance import DistanceProfile, build_index, directed_profile, signed_band
from .grid import BinaryMask, EmptySegmentationWarning, GeometryMismatchError, VoxelBand, is_empty
from .grid import dsc as _dsc
from .grid import iou as _iou
from .meshing import BoundaryMesh, surface_nets

ABSOLUTE_METRICS = ("hd", "hd_perc", "masd", "assd")
RELATIVE_METRICS = ("nsd", "biou", "dsc", "iou")
ALL_METRICS = ABSOLUTE_METRICS + RELATIVE_METRICS
GRID_METRICS = ("biou", "dsc", "iou")

UNITS = {
    "hd": "mm",
    "hd_perc": "mm",
    "masd": "mm",
    "assd": "mm",
    "nsd": "fraction",
    "biou": "fraction",
    "dsc": "fraction",
    "iou": "fraction",
}


@dataclass(frozen=True)
class MetricConfig:
    """Percentile ``p`` (percent, in (0, 100]) and tolerance ``tau`` (mm)."""

    percentile: float = 95.0
    tau: float = 2.0

    def __post_init__(self):
        if not 0 < self.percentile <= 100:
            raise ValueError(f"percentile must lie in (0, 100], got {self.percentile}")
        if not self.tau >= 0:
            raise ValueError(f"tau must be non-negative, got {self.tau}")


@dataclass
class MetricReport:
    values: dict[str, float]
    ref_empty: bool = False
    pred_empty: bool = False
    warnings: list[str] = field(default_factory=list)

    def __getitem__(self, name: str) -> float:
        return self.values[name]


def _check_metric_names(metrics: Iterable[str] | None) -> tuple[str, ...]:
    if metrics is None:
        return ALL_METRICS
    metrics = tuple(metrics)
    unknown = [m for m in metrics if m not in ALL_METRICS]
    if unknown:
        raise ValueError(f"unknown metrics {unknown}; choose from {ALL_METRICS}")
    if not metrics:
        raise ValueError("no metrics selected")
    return metrics


def _require(profile: DistanceProfile) -> None:
    if len(profile) == 0:
        raise ValueError("empty distance profile")


def weighted_percentile(profile: DistanceProfile, p: float) -> float:
    """Smallest distance whose cumulative weight fraction reaches ``p`` percent.

    >>> prof = DistanceProfile.from_unsorted([1.0, 100.0], [99.0, 1.0])
    >>> weighted_percentile(prof, 95)
    1.0
    """
    _require(profile)
    if not 0 < p <= 100:
        raise ValueError(f"percentile must lie in (0, 100], got {p}")
    cum = np.cumsum(profile.weights)
    # compare 100 * c_k >= p * c_N; c_N from the same running sum keeps p = 100 exact
    k = int(np.searchsorted(100.0 * cum, p * cum[-1], side="left"))
    return float(profile.distances[min(k, len(cum) - 1)])


def rank_percentile(distances, p: float) -> float:
    """Unweighted percentile: smallest sorted value at rank ``ceil(p N / 100)``."""
    d = np.sort(np.asarray(distances, dtype=float))
    if not len(d):
        raise ValueError("empty distance set")
    n = len(d)
    k = math.ceil(p * n / 100.0)
    while k > 1 and 100 * (k - 1) >= p * n:
        k -= 1
    while 100 * k < p * n:
        k += 1
    return float(d[min(max(k, 1), n) - 1])


def _accumulated(profile: DistanceProfile) -> float:
    return math.fsum(profile.distances * profile.weights)


def hd_percentile(p_ab: DistanceProfile, p_ba: DistanceProfile, p: float) -> float:
    """Maximum of the two directed weighted percentiles; ``p = 100`` gives HD."""
    return max(weighted_percentile(p_ab, p), weighted_percentile(p_ba, p))


def masd(p_ab: DistanceProfile, p_ba: DistanceProfile) -> float:
    """Mean of the two directed boundary-weighted average distances."""
    _require(p_ab)
    _require(p_ba)
    return 0.5 * (_accumulated(p_ab) / p_ab.total_measure + _accumulated(p_ba) / p_ba.total_measure)


def assd(p_ab: DistanceProfile, p_ba: DistanceProfile) -> float:
    """Pooled boundary-weighted average distance over both boundaries."""
    _require(p_ab)
    _require(p_ba)
    return (_accumulated(p_ab) + _accumulated(p_ba)) / (p_ab.total_measure + p_ba.total_measure)


def _within(profile: DistanceProfile, tau: float) -> float:
    k = int(np.searchsorted(profile.distances, tau, side="right"))
    return math.fsum(profile.weights[:k])


def nsd(p_ab: DistanceProfile, p_ba: DistanceProfile, tau: float) -> float:
    """Fraction of the pooled boundary measure lying within ``tau`` (inclusive)."""
    _require(p_ab)
    _require(p_ba)
    if tau < 0:
        raise ValueError(f"tau must be non-negative, got {tau}")
    return (_within(p_ab, tau) + _within(p_ba, tau)) / (p_ab.total_measure + p_ba.total_measure)


def biou(band_a: VoxelBand, band_b: VoxelBand) -> float:
    """Voxel-count IoU of two interior boundary bands on the same grid."""
    if not band_a.same_geometry(band_b):
        raise GeometryMismatchError("bands must live on the same grid")
    union = np.union1d(band_a.member_indices, band_b.member_indices).size
    if union == 0:
        return 0.0
    inter = np.intersect1d(band_a.member_indices, band_b.member_indices, assume_unique=True).size
    return inter / union


def edge_case_values(metrics: Iterable[str], ref_empty: bool, pred_empty: bool) -> dict[str, float]:
    """Worst values when exactly one input is empty, best values when both are."""
    both = ref_empty and pred_empty
    out = {}
    for name in metrics:
        if name in ABSOLUTE_METRICS:
            out[name] = 0.0 if both else math.inf
        else:
            out[name] = 1.0 if both else 0.0
    return out


def edge_case_message(ref_empty: bool, pred_empty: bool) -> str:
    if ref_empty and pred_empty:
        return "both reference and prediction are empty: returning best values (0 mm, 1.0)"
    which = "reference" if ref_empty else "prediction"
    return f"{which} segmentation is empty: returning worst values (inf mm, 0.0)"


def mesh_metric_values(
    mesh_a: BoundaryMesh,
    mesh_b: BoundaryMesh,
    config: MetricConfig,
    metrics: Iterable[str] = ABSOLUTE_METRICS + ("nsd",),
) -> dict[str, float]:
    """Distance-based metrics of two non-empty boundary meshes."""
    p_ab = directed_profile(mesh_a, build_index(mesh_b))
    p_ba = directed_profile(mesh_b, build_index(mesh_a))
    return profile_metric_values(p_ab, p_ba, config, metrics)


def profile_metric_values(p_ab, p_ba, config: MetricConfig, metrics) -> dict[str, float]:
    out = {}
    for name in metrics:
        if name == "hd":
            out[name] = hd_percentile(p_ab, p_ba, 100.0)
        elif name == "hd_perc":
            out[name] = hd_percentile(p_ab, p_ba, config.percentile)
        elif name == "masd":
            out[name] = masd(p_ab, p_ba)
        elif name == "assd":
            out[name] = assd(p_ab, p_ba)
        elif name == "nsd":
            out[name] = nsd(p_ab, p_ba, config.tau)
    return out


def evaluate(
    reference: BinaryMask,
    prediction: BinaryMask,
    config: MetricConfig | None = None,
    metrics: Iterable[str] | None = None,
) -> MetricReport:
    """Compute the selected metrics for a reference/prediction mask pair.

    Distance-based metrics are evaluated on surface-nets boundary meshes in
    physical coordinates; BIoU, DSC and IoU additionally require both masks
    to share the same grid geometry.

    Returns
    -------
    MetricReport
        Metric values keyed by name (``hd``, ``hd_perc``, ``masd``, ``assd``,
        ``nsd``, ``biou``, ``dsc``, ``iou``), emptiness flags and warnings.
    """
    config = config or MetricConfig()
    metrics = _check_metric_names(metrics)
    if any(m in GRID_METRICS for m in metrics) and not reference.same_geometry(prediction):
        raise GeometryMismatchError(
            "BIoU, DSC and IoU need reference and prediction on the same grid "
            "(shape, spacing and origin)"
        )

    ref_empty, pred_empty = is_empty(reference), is_empty(prediction)
    if ref_empty or pred_empty:
        msg = edge_case_message(ref_empty, pred_empty)
        warnings.warn(msg, EmptySegmentationWarning, stacklevel=2)
        return MetricReport(edge_case_values(metrics, ref_empty, pred_empty), ref_empty, pred_empty, [msg])

    values: dict[str, float] = {}
    mesh_a, mesh_b = surface_nets(reference), surface_nets(prediction)
    index_a, index_b = build_index(mesh_a), build_index(mesh_b)
    distance_metrics = [m for m in metrics if m in ABSOLUTE_METRICS or m == "nsd"]
    if distance_metrics:
        p_ab = directed_profile(mesh_a, index_b)
        p_ba = directed_profile(mesh_b, index_a)
        values.update(profile_metric_values(p_ab, p_ba, config, distance_metrics))
    if "biou" in metrics:
        if config.tau == 0:
            values["biou"] = 0.0
        else:
            values["biou"] = biou(
                signed_band(reference, index_a, config.tau),
                signed_band(prediction, index_b, config.tau),
            )
    if "dsc" in metrics:
        values["dsc"] = _dsc(reference, prediction)
    if "iou" in metrics:
        values["iou"] = _iou(reference, prediction)
    return MetricReport({m: values[m] for m in metrics})
