"""Analytic test shapes and a dense-sampling reference for the metrics.

The reference refines every boundary element into small pieces and integrates
distances over them, approximating the continuous definitions. Aggregation is
implemented here independently of :mod:`meshdist.metrics`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .distance import build_index, point_to_boundary_distances
from .grid import BinaryMask
from .meshing import BoundaryMesh
from .metrics import MetricConfig, MetricReport

SHAPE_KINDS = ("circle", "sphere", "rectangle", "box")


@dataclass(frozen=True)
class ShapeSpec:
    """Analytic shape: ``circle``/``sphere`` (radius) or ``rectangle``/``box`` (half extents)."""

    kind: str
    center: tuple[float, ...]
    size: tuple[float, ...]

    def __post_init__(self):
        if self.kind not in SHAPE_KINDS:
            raise ValueError(f"unknown shape kind {self.kind!r}")
        ndim = 2 if self.kind in ("circle", "rectangle") else 3
        if len(self.center) != ndim:
            raise ValueError(f"{self.kind} needs a {ndim}D center")
        if min(self.size) <= 0:
            raise ValueError("radius / half extents must be positive")

    @classmethod
    def circle(cls, radius, center=(0.0, 0.0)):
        return cls("circle", tuple(map(float, center)), (float(radius),))

    @classmethod
    def sphere(cls, radius, center=(0.0, 0.0, 0.0)):
        return cls("sphere", tuple(map(float, center)), (float(radius),))

    @classmethod
    def rectangle(cls, half_extents, center=(0.0, 0.0)):
        return cls("rectangle", tuple(map(float, center)), tuple(map(float, half_extents)))

    @classmethod
    def box(cls, half_extents, center=(0.0, 0.0, 0.0)):
        return cls("box", tuple(map(float, center)), tuple(map(float, half_extents)))

    @property
    def ndim(self) -> int:
        return len(self.center)

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        c = np.asarray(self.center)
        half = np.broadcast_to(np.asarray(self.size), c.shape)
        return c - half, c + half

    def contains(self, points: np.ndarray) -> np.ndarray:
        rel = np.asarray(points, dtype=float) - np.asarray(self.center)
        if self.kind in ("circle", "sphere"):
            return np.sum(rel**2, axis=-1) < self.size[0] ** 2
        return np.all(np.abs(rel) < np.asarray(self.size), axis=-1)


def rasterize(shape: ShapeSpec, spacing, extent: Sequence[Sequence[float]]) -> BinaryMask:
    """Point-sample ``shape`` on a grid filling ``extent = (lower, upper)`` corners.

    Cells tile the extent from its lower corner, so voxel ``k`` is centered at
    ``lower + (k + 1/2) * spacing``. A voxel is foreground iff its center lies
    inside the shape.
    """
    lower, upper = (np.asarray(e, dtype=float) for e in extent)
    spacing = np.broadcast_to(np.asarray(spacing, dtype=float), lower.shape)
    if lower.shape != (shape.ndim,) or upper.shape != (shape.ndim,):
        raise ValueError("extent dimensionality does not match the shape")
    if np.any(spacing <= 0):
        raise ValueError("spacing must be positive")
    lo, hi = shape.bounds()
    if np.any(lo <= lower) or np.any(hi >= upper):
        raise ValueError("shape must lie strictly inside the extent")
    counts = np.round((upper - lower) / spacing).astype(int)
    origin = lower + 0.5 * spacing
    axes = [o + np.arange(n) * h for o, n, h in zip(origin, counts, spacing)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    return BinaryMask(shape.contains(grid), spacing, origin)


@dataclass(frozen=True, eq=False)
class SurfaceSamples:
    """Sub-element centroids with their sub-element measures, plus the source mesh."""

    points: np.ndarray
    weights: np.ndarray
    mesh: BoundaryMesh

    @property
    def total(self) -> float:
        return float(np.sum(self.weights))


def _subdivision_pattern(n: int) -> np.ndarray:
    """Barycentric (u, v) centroids of the n*n congruent sub-triangles."""
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    up = i + j <= n - 1
    down = i + j <= n - 2
    uv_up = np.stack([(i[up] + 1 / 3) / n, (j[up] + 1 / 3) / n], axis=1)
    uv_down = np.stack([(i[down] + 2 / 3) / n, (j[down] + 2 / 3) / n], axis=1)
    return np.concatenate([uv_up, uv_down])


def dense_samples(mesh: BoundaryMesh, max_step: float) -> SurfaceSamples:
    """Subdivide every element so that no piece is longer than ``max_step``.

    Segments are cut into equal pieces; triangles into ``n**2`` congruent
    pieces with ``n = ceil(longest edge / max_step)``. Each piece contributes
    its centroid weighted by its length or area.
    """
    if not max_step > 0:
        raise ValueError("max_step must be positive")
    pts = mesh.element_points()
    sizes = mesh.element_sizes
    if mesh.n_elements == 0:
        return SurfaceSamples(np.zeros((0, mesh.ndim)), np.zeros(0), mesh)
    out_p, out_w = [], []
    if mesh.ndim == 2:
        n = np.maximum(1, np.ceil(sizes / max_step)).astype(int)
        for k in np.unique(n):
            sel = n == k
            t = (np.arange(k) + 0.5) / k
            a, b = pts[sel, 0], pts[sel, 1]
            p = a[:, None, :] + t[None, :, None] * (b - a)[:, None, :]
            out_p.append(p.reshape(-1, 2))
            out_w.append(np.repeat(sizes[sel] / k, k))
    else:
        edges = np.stack(
            [np.linalg.norm(pts[:, (i + 1) % 3] - pts[:, i], axis=1) for i in range(3)], axis=1
        )
        n = np.maximum(1, np.ceil(edges.max(axis=1) / max_step)).astype(int)
        for k in np.unique(n):
            sel = n == k
            uv = _subdivision_pattern(k)
            a, b, c = pts[sel, 0], pts[sel, 1], pts[sel, 2]
            p = (
                a[:, None, :]
                + uv[None, :, 0:1] * (b - a)[:, None, :]
                + uv[None, :, 1:2] * (c - a)[:, None, :]
            )
            out_p.append(p.reshape(-1, 3))
            out_w.append(np.repeat(sizes[sel] / (k * k), k * k))
    return SurfaceSamples(np.concatenate(out_p), np.concatenate(out_w), mesh)


def _directed(samples: SurfaceSamples, target: BoundaryMesh):
    d = point_to_boundary_distances(samples.points, build_index(target))
    return d, samples.weights


def _weighted_quantile(d: np.ndarray, w: np.ndarray, q: float) -> float:
    order = np.lexsort((np.arange(len(d)), d))
    d, w = d[order], w[order]
    frac = np.cumsum(w) / w.sum()
    idx = np.flatnonzero(frac >= q - 1e-12)
    return float(d[idx[0]] if len(idx) else d[-1])


def oracle_metrics(
    samples_a: SurfaceSamples,
    samples_b: SurfaceSamples,
    config: MetricConfig | None = None,
) -> MetricReport:
    """Distance metrics integrated over densely sampled boundaries.

    Distances are measured from each sample of one boundary to the full mesh
    of the other.
    """
    config = config or MetricConfig()
    if len(samples_a.weights) == 0 or len(samples_b.weights) == 0:
        raise ValueError("oracle needs non-empty sample sets")
    d_ab, w_ab = _directed(samples_a, samples_b.mesh)
    d_ba, w_ba = _directed(samples_b, samples_a.mesh)
    sum_ab, sum_ba = np.dot(d_ab, w_ab), np.dot(d_ba, w_ba)
    tot_ab, tot_ba = w_ab.sum(), w_ba.sum()
    q = config.percentile / 100.0
    values = {
        "hd": float(max(d_ab.max(), d_ba.max())),
        "hd_perc": max(_weighted_quantile(d_ab, w_ab, q), _weighted_quantile(d_ba, w_ba, q)),
        "masd": float(0.5 * (sum_ab / tot_ab + sum_ba / tot_ba)),
        "assd": float((sum_ab + sum_ba) / (tot_ab + tot_ba)),
        "nsd": float((w_ab[d_ab <= config.tau].sum() + w_ba[d_ba <= config.tau].sum()) / (tot_ab + tot_ba)),
    }
    return MetricReport(values)
