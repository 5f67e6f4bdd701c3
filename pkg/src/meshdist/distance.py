"""Point-to-boundary distances, directed distance profiles and voxel bands."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .grid import BinaryMask, VoxelBand
from .meshing import BoundaryMesh

LEAF_SIZE = 4


@dataclass(frozen=True, eq=False)
class SpatialIndex:
    """Axis-aligned bounding-volume tree over the elements of a mesh.

    Nodes are stored in flat arrays (node 0 is the root). Leaves reference a
    contiguous run of ``elems``, which holds the element coordinates permuted
    into leaf order, lifted to 3D.
    """

    mesh: BoundaryMesh
    elems: np.ndarray
    order: np.ndarray
    node_lo: np.ndarray
    node_hi: np.ndarray
    node_left: np.ndarray
    node_right: np.ndarray
    node_start: np.ndarray
    node_count: np.ndarray

    @property
    def n_nodes(self) -> int:
        return len(self.node_lo)

    def _arrays(self):
        return (
            self.elems, self.node_lo, self.node_hi, self.node_left,
            self.node_right, self.node_start, self.node_count,
        )


@dataclass(frozen=True, eq=False)
class DistanceProfile:
    """Ascending directed distances with aligned boundary-element sizes.

    Attributes
    ----------
    distances : ndarray
        Distances (mm) from each source element centroid to the target
        boundary, sorted ascending.
    weights : ndarray
        Size (length or area) of the corresponding source element.
    total_measure : float
        Total source boundary measure, ``sum(weights)``.
    """

    distances: np.ndarray
    weights: np.ndarray
    total_measure: float

    def __post_init__(self):
        if self.distances.shape != self.weights.shape:
            raise ValueError("distances and weights must be aligned")
        for arr in (self.distances, self.weights):
            arr.setflags(write=False)

    @classmethod
    def from_unsorted(cls, distances, weights) -> "DistanceProfile":
        d = np.asarray(distances, dtype=np.float64)
        w = np.asarray(weights, dtype=np.float64)
        if d.shape != w.shape or d.ndim != 1:
            raise ValueError("distances and weights must be aligned 1D arrays")
        if np.any(w <= 0):
            raise ValueError("weights must be strictly positive")
        if np.any(d < 0) or np.any(np.isnan(d)):
            raise ValueError("distances must be non-negative")
        order = np.argsort(d, kind="stable")
        w = w[order]
        return cls(d[order], w, math.fsum(w))

    def __len__(self) -> int:
        return len(self.distances)


def _lift(points: np.ndarray) -> np.ndarray:
    points = np.asarray(points, dtype=np.float64)
    if points.ndim == 1:
        points = points[None, :]
    if points.shape[1] == 2:
        points = np.column_stack([points, np.zeros(len(points))])
    return np.ascontiguousarray(points)


def element_coords(mesh: BoundaryMesh) -> np.ndarray:
    """Element vertex coordinates as ``(E, k, 3)``, 2D lifted to z = 0."""
    pts = mesh.element_points()
    if mesh.ndim == 2:
        pts = np.concatenate([pts, np.zeros(pts.shape[:2] + (1,))], axis=2)
    return np.ascontiguousarray(pts)


def build_index(mesh: BoundaryMesh) -> SpatialIndex:
    """Build a median-split bounding-volume tree over the mesh elements."""
    if mesh.n_elements == 0:
        raise ValueError("cannot index an empty mesh")
    coords = element_coords(mesh)
    lo_e = coords.min(axis=1)
    hi_e = coords.max(axis=1)
    centers = 0.5 * (lo_e + hi_e)

    node_lo, node_hi, left, right, start, count = [], [], [], [], [], []
    order_out = []

    def new_node():
        for lst in (node_lo, node_hi):
            lst.append(None)
        for lst in (left, right, start, count):
            lst.append(-1 if lst is not count else 0)
        return len(node_lo) - 1

    root = new_node()
    work = [(root, np.arange(mesh.n_elements))]
    while work:
        node, idx = work.pop()
        node_lo[node] = lo_e[idx].min(axis=0)
        node_hi[node] = hi_e[idx].max(axis=0)
        if len(idx) <= LEAF_SIZE:
            start[node] = len(order_out)
            count[node] = len(idx)
            order_out.extend(idx.tolist())
            continue
        c = centers[idx]
        axis = int(np.argmax(c.max(axis=0) - c.min(axis=0)))
        # stable order keeps the tree a deterministic function of the mesh
        srt = idx[np.argsort(c[:, axis], kind="stable")]
        half = len(srt) // 2
        ln, rn = new_node(), new_node()
        left[node], right[node] = ln, rn
        work.append((rn, srt[half:]))
        work.append((ln, srt[:half]))

    order = np.asarray(order_out, dtype=np.int64)
    return SpatialIndex(
        mesh=mesh,
        elems=np.ascontiguousarray(coords[order]),
        order=order,
        node_lo=np.array(node_lo),
        node_hi=np.array(node_hi),
        node_left=np.asarray(left, dtype=np.int64),
        node_right=np.asarray(right, dtype=np.int64),
        node_start=np.asarray(start, dtype=np.int64),
        node_count=np.asarray(count, dtype=np.int64),
    )


def point_to_boundary_distances(points, index: SpatialIndex) -> np.ndarray:
    """Exact Euclidean distance from each point to the nearest mesh element."""
    pts = _lift(points)
    return np.sqrt(_kernels.query_min_dist2(pts, *index._arrays()))


def point_to_boundary_distance(q, index: SpatialIndex) -> float:
    return float(point_to_boundary_distances(np.asarray(q, dtype=float)[None, :], index)[0])


def linear_scan_distances(points, mesh: BoundaryMesh) -> np.ndarray:
    """Reference distances by exhaustive scan over every element."""
    pts = _lift(points)
    return np.sqrt(_kernels.linear_min_dist2(pts, element_coords(mesh)))


def _same_mesh(a: BoundaryMesh, b: BoundaryMesh) -> bool:
    return a is b or (
        a.vertices.shape == b.vertices.shape
        and a.elements.shape == b.elements.shape
        and np.array_equal(a.vertices, b.vertices)
        and np.array_equal(a.elements, b.elements)
    )


def directed_profile(source: BoundaryMesh, target_index: SpatialIndex) -> DistanceProfile:
    """Distances from every source element centroid to the target boundary.

    Sorted ascending with element sizes co-permuted; ties keep the lower
    element index first. When source and target are the same mesh every
    centroid lies on the target, so the distances are exactly zero.
    """
    if source.n_elements == 0:
        raise ValueError("source mesh has no elements")
    if _same_mesh(source, target_index.mesh):
        d = np.zeros(source.n_elements)
    else:
        d = point_to_boundary_distances(source.centroids(), target_index)
    return DistanceProfile.from_unsorted(d, source.element_sizes)


def signed_band(mask: BinaryMask, mesh_index: SpatialIndex, tau: float) -> VoxelBand:
    """Foreground voxels whose center lies strictly closer than ``tau`` to the mesh.

    Voxels take their (negative) sign from mask membership, so the band is
    ``{x in A : -tau < phi(x) < 0}`` for a mesh consistent with the mask.
    """
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    fg = np.flatnonzero(mask.data)
    if math.isinf(tau):
        return VoxelBand.from_mask_geometry(mask, fg)
    centers = _lift(mask.voxel_centers(np.stack(np.unravel_index(fg, mask.shape), axis=1)))
    inside = _kernels.query_within(centers, float(tau), *mesh_index._arrays())
    return VoxelBand.from_mask_geometry(mask, fg[inside])
