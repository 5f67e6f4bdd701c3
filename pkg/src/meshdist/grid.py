"""Binary masks on regular grids and the pure-grid overlap metrics."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np


class GeometryMismatchError(ValueError):
    """Two masks (or bands) do not share the same grid geometry."""


class EmptySegmentationWarning(UserWarning):
    """One or both input segmentations contain no foreground."""


def _as_tuple(values, ndim: int, name: str) -> tuple[float, ...]:
    out = tuple(float(v) for v in np.broadcast_to(np.asarray(values, dtype=float), (ndim,)))
    if not all(np.isfinite(out)):
        raise ValueError(f"{name} must be finite, got {out}")
    return out


@dataclass(frozen=True, eq=False)
class BinaryMask:
    """A 2D or 3D binary segmentation with physical geometry.

    Voxel ``idx`` is a point sample located at ``origin + idx * spacing`` (mm);
    the foreground region is the union of axis-aligned cells of size
    ``spacing`` centered on the foreground samples.

    Parameters
    ----------
    array : array_like
        Boolean (or 0/1) array in row-major axis order.
    spacing : sequence of float or float
        Per-axis voxel size in mm; strictly positive.
    origin : sequence of float or float, optional
        Physical coordinate of the center of voxel ``(0, ..., 0)``.
    """

    array: np.ndarray
    spacing: tuple[float, ...]
    origin: tuple[float, ...]

    def __init__(self, array, spacing=1.0, origin=0.0):
        arr = np.array(array, copy=True)
        if arr.ndim not in (2, 3):
            raise ValueError(f"only 2D and 3D masks are supported, got ndim={arr.ndim}")
        if arr.dtype != bool:
            if not np.all((arr == 0) | (arr == 1)):
                raise ValueError("mask data must be binary (0/1 or bool)")
            arr = arr.astype(bool)
        arr.setflags(write=False)
        spacing = _as_tuple(spacing, arr.ndim, "spacing")
        if min(spacing) <= 0:
            raise ValueError(f"spacing must be strictly positive, got {spacing}")
        object.__setattr__(self, "array", arr)
        object.__setattr__(self, "spacing", spacing)
        object.__setattr__(self, "origin", _as_tuple(origin, arr.ndim, "origin"))

    @property
    def ndim(self) -> int:
        return self.array.ndim

    @property
    def shape(self) -> tuple[int, ...]:
        return self.array.shape

    @property
    def data(self) -> np.ndarray:
        """Flat row-major view of the voxel values."""
        return self.array.reshape(-1)

    @property
    def count(self) -> int:
        return int(np.count_nonzero(self.array))

    def same_geometry(self, other: "BinaryMask") -> bool:
        return (
            self.shape == other.shape
            and self.spacing == other.spacing
            and self.origin == other.origin
        )

    def voxel_centers(self, indices: np.ndarray | None = None) -> np.ndarray:
        """Physical centers of the voxels at the given ``(N, ndim)`` indices.

        With no indices, returns the centers of all foreground voxels.
        """
        if indices is None:
            indices = np.argwhere(self.array)
        return np.asarray(self.origin) + np.asarray(indices, dtype=float) * np.asarray(self.spacing)

    def __repr__(self) -> str:
        return (
            f"BinaryMask(shape={self.shape}, spacing={self.spacing}, "
            f"origin={self.origin}, foreground={self.count})"
        )


@dataclass(frozen=True, eq=False)
class VoxelBand:
    """A subset of voxels of a grid, stored as sorted linear indices."""

    shape: tuple[int, ...]
    spacing: tuple[float, ...]
    origin: tuple[float, ...]
    member_indices: np.ndarray

    @classmethod
    def from_mask_geometry(cls, mask: BinaryMask, indices) -> "VoxelBand":
        idx = np.unique(np.asarray(indices, dtype=np.int64))
        if idx.size and (idx[0] < 0 or idx[-1] >= int(np.prod(mask.shape))):
            raise IndexError("band index outside the grid")
        idx.setflags(write=False)
        return cls(mask.shape, mask.spacing, mask.origin, idx)

    @property
    def count(self) -> int:
        return int(self.member_indices.size)

    def same_geometry(self, other: "VoxelBand") -> bool:
        return (
            self.shape == other.shape
            and self.spacing == other.spacing
            and self.origin == other.origin
        )

    def to_array(self) -> np.ndarray:
        out = np.zeros(int(np.prod(self.shape)), dtype=bool)
        out[self.member_indices] = True
        return out.reshape(self.shape)


def is_empty(mask: BinaryMask) -> bool:
    return not mask.array.any()


def pad_background(mask: BinaryMask, width: int = 1) -> BinaryMask:
    """Add ``width`` background layers on every face, keeping physical positions."""
    arr = np.pad(mask.array, width, mode="constant", constant_values=False)
    origin = tuple(o - width * h for o, h in zip(mask.origin, mask.spacing))
    return BinaryMask(arr, mask.spacing, origin)


def resample_nearest(mask: BinaryMask, new_spacing: Sequence[float] | float) -> BinaryMask:
    """Nearest-neighbour resampling onto a grid of spacing ``new_spacing``.

    The output grid covers the input cell extent, anchored at the lower cell
    face of voxel 0; the output count per axis is ``round(n * h / h_new)``.
    Each output voxel copies the input voxel whose center is nearest; exact
    ties go to the lower index.
    """
    new_spacing = _as_tuple(new_spacing, mask.ndim, "new_spacing")
    if min(new_spacing) <= 0:
        raise ValueError(f"new_spacing must be strictly positive, got {new_spacing}")
    if new_spacing == mask.spacing:
        return mask

    index_maps = []
    new_origin = []
    for n, h, o, h_new in zip(mask.shape, mask.spacing, mask.origin, new_spacing):
        n_new = max(1, int(round(n * h / h_new)))
        o_new = o - 0.5 * h + 0.5 * h_new
        centers = o_new + np.arange(n_new) * h_new
        t = (centers - o) / h
        src = np.clip(np.ceil(t - 0.5), 0, n - 1).astype(np.intp)
        index_maps.append(src)
        new_origin.append(o_new)
    arr = mask.array[np.ix_(*index_maps)]
    return BinaryMask(arr, new_spacing, new_origin)


def _check_geometry(a: BinaryMask, b: BinaryMask) -> None:
    if not a.same_geometry(b):
        raise GeometryMismatchError(
            "masks must share shape, spacing and origin: "
            f"{a.shape}/{a.spacing}/{a.origin} vs {b.shape}/{b.spacing}/{b.origin}"
        )


def _overlap_edge_case(a: BinaryMask, b: BinaryMask, name: str) -> float | None:
    a_empty, b_empty = is_empty(a), is_empty(b)
    if a_empty and b_empty:
        warnings.warn(f"{name}: both segmentations are empty, returning 1.0", EmptySegmentationWarning, stacklevel=3)
        return 1.0
    if a_empty or b_empty:
        warnings.warn(f"{name}: one segmentation is empty, returning 0.0", EmptySegmentationWarning, stacklevel=3)
        return 0.0
    return None


def dsc(a: BinaryMask, b: BinaryMask) -> float:
    """Dice similarity coefficient ``2|A∩B| / (|A| + |B|)``.

    Empty inputs issue an :class:`EmptySegmentationWarning` and return 0.0
    (exactly one empty) or 1.0 (both empty).
    """
    _check_geometry(a, b)
    edge = _overlap_edge_case(a, b, "DSC")
    if edge is not None:
        return edge
    inter = np.count_nonzero(a.array & b.array)
    return 2.0 * inter / (a.count + b.count)


def iou(a: BinaryMask, b: BinaryMask) -> float:
    """Intersection over union ``|A∩B| / |A∪B|``; edge cases as :func:`dsc`."""
    _check_geometry(a, b)
    edge = _overlap_edge_case(a, b, "IoU")
    if edge is not None:
        return edge
    inter = np.count_nonzero(a.array & b.array)
    union = np.count_nonzero(a.array | b.array)
    return inter / union
