"""Shared mask generators for the test suite."""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from meshdist import BinaryMask


def random_mask(rng: np.random.Generator, shape, density: float = 0.5, spacing=1.0) -> BinaryMask:
    """Independent Bernoulli voxels; the hardest case for topology."""
    return BinaryMask(rng.random(shape) < density, spacing)


def _balls(rng, shape, n_balls):
    return [
        ([rng.uniform(0.3 * n, 0.7 * n) for n in shape], rng.uniform(0.12, 0.22) * min(shape))
        for _ in range(n_balls)
    ]


def _render(shape, balls, sigma):
    grid = np.indices(shape).astype(float)
    field = np.zeros(shape)
    for c, r in balls:
        d2 = sum((g - ci) ** 2 for g, ci in zip(grid, c))
        field = np.maximum(field, (d2 < r * r).astype(float))
    return ndimage.gaussian_filter(field, sigma) > 0.5


def blob_mask(rng: np.random.Generator, shape, spacing=1.0, n_balls: int = 3, sigma: float = 1.5) -> BinaryMask:
    """Smooth random blob: union of balls, blurred and re-thresholded."""
    shape = tuple(shape)
    return BinaryMask(_render(shape, _balls(rng, shape, n_balls), sigma), spacing)


def blob_pair(rng: np.random.Generator, shape, spacing=1.0, jitter: float = 0.06, n_balls: int = 3):
    """Reference blob and a prediction whose balls are moved and resized by ``jitter`` of the shape."""
    shape = tuple(shape)
    balls = _balls(rng, shape, n_balls)
    scale = jitter * min(shape)
    moved = [
        ([ci + rng.normal(0, scale) for ci in c], max(1.0, r + rng.normal(0, scale))) for c, r in balls
    ]
    return BinaryMask(_render(shape, balls, 1.5), spacing), BinaryMask(_render(shape, moved, 1.5), spacing)


def single_voxel(shape=(3, 3, 3), spacing=1.0) -> BinaryMask:
    arr = np.zeros(shape, dtype=bool)
    arr[tuple(n // 2 for n in shape)] = True
    return BinaryMask(arr, spacing)


def two_component_pair() -> tuple[BinaryMask, BinaryMask]:
    """Reference square and a prediction with a shifted square plus a far diamond.

    The diamond's staircase boundary has one boundary voxel per sqrt(2) mm, the
    squares one per mm, so the diamond holds more than 5 % of the prediction's
    boundary length but less than 5 % of its boundary voxels.
    """
    ref = np.zeros((130, 190), dtype=bool)
    ref[15:115, 15:115] = True
    pred = np.zeros_like(ref)
    pred[15:115, 16:116] = True
    i, j = np.indices(ref.shape)
    pred |= np.abs(i - 65) + np.abs(j - 160) <= 4
    return BinaryMask(ref), BinaryMask(pred)
