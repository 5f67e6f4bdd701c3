"""Mesh-based distance metrics for binary segmentation masks.

Boundaries are extracted as surface-nets meshes in physical coordinates and
every boundary element contributes its centroid distance weighted by its
length or area. A conventional voxel-grid baseline and a dense-sampling
reference are included for comparison.
"""

from .baseline import compare, grid_metrics, nsd_curve
from .distance import DistanceProfile, build_index, directed_profile, point_to_boundary_distances, signed_band
from .grid import BinaryMask, EmptySegmentationWarning, GeometryMismatchError, dsc, iou, resample_nearest
from .meshing import BoundaryMesh, is_closed, surface_nets
from .metrics import MetricConfig, MetricReport, evaluate, rank_percentile, weighted_percentile

__version__ = "0.1.0"

__all__ = [
    "BinaryMask",
    "BoundaryMesh",
    "DistanceProfile",
    "EmptySegmentationWarning",
    "GeometryMismatchError",
    "MetricConfig",
    "MetricReport",
    "build_index",
    "compare",
    "directed_profile",
    "dsc",
    "evaluate",
    "grid_metrics",
    "iou",
    "is_closed",
    "nsd_curve",
    "point_to_boundary_distances",
    "rank_percentile",
    "resample_nearest",
    "signed_band",
    "surface_nets",
    "weighted_percentile",
]
