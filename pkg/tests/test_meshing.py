import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from helpers import single_voxel
from meshdist import BinaryMask, BoundaryMesh, build_index, is_closed, surface_nets
from meshdist.distance import point_to_boundary_distances, signed_band
from meshdist.meshing import boundary_measure, edge_use_counts, element_centroid
from meshdist.oracle import ShapeSpec, dense_samples, rasterize


def _euler(mesh: BoundaryMesh) -> int:
    edges = {tuple(sorted((int(t[i]), int(t[(i + 1) % 3])))) for t in mesh.elements for i in range(3)}
    return len(mesh.vertices) - len(edges) + mesh.n_elements


def test_empty_mask_gives_empty_mesh():
    mesh = surface_nets(BinaryMask(np.zeros((4, 4, 4))))
    assert mesh.n_elements == 0 and len(mesh.vertices) == 0
    assert boundary_measure(mesh) == 0


def test_single_voxel_is_a_sphere():
    mesh = surface_nets(single_voxel())
    assert is_closed(mesh)
    assert _euler(mesh) == 2


def test_solid_square_is_one_loop():
    arr = np.zeros((14, 14), bool)
    arr[2:12, 2:12] = True
    mesh = surface_nets(BinaryMask(arr))
    assert is_closed(mesh)
    assert len(mesh.vertices) == mesh.n_elements
    # walk the loop from element 0 and make sure it covers every segment
    nxt = {int(a): int(b) for a, b in mesh.elements}
    start, v, steps = int(mesh.elements[0, 0]), nxt[int(mesh.elements[0, 0])], 1
    while v != start:
        v, steps = nxt[v], steps + 1
    assert steps == mesh.n_elements


def test_measure_and_centroids():
    mesh = BoundaryMesh(np.array([[0.0, 0], [1, 0], [1, 1]]), [[0, 1], [1, 2]])
    assert boundary_measure(mesh) == 2.0
    seg = BoundaryMesh(np.array([[0.0, 0], [2, 0]]), [[0, 1]])
    np.testing.assert_array_equal(element_centroid(seg, 0), [1.0, 0.0])
    tri = BoundaryMesh(np.array([[0.0, 0, 0], [3, 0, 0], [0, 3, 0]]), [[0, 1, 2]])
    np.testing.assert_allclose(element_centroid(tri, 0), [1.0, 1.0, 0.0])
    with pytest.raises(IndexError):
        element_centroid(tri, 1)


def test_degenerate_elements_are_pruned():
    mesh = BoundaryMesh(np.array([[0.0, 0, 0], [1, 0, 0], [2, 0, 0], [0, 1, 0]]), [[0, 1, 2], [0, 1, 3]])
    assert mesh.n_elements == 1
    assert np.all(mesh.element_sizes > 0)


def test_circle_perimeter():
    shape = ShapeSpec.circle(10.0)
    mask = rasterize(shape, 0.25, ([-12.0, -12.0], [12.0, 12.0]))
    mesh = surface_nets(mask)
    length = boundary_measure(mesh)
    assert abs(length - 2 * math.pi * 10) <= 0.03 * 2 * math.pi * 10
    assert dense_samples(mesh, 0.05).total == pytest.approx(length, rel=1e-12)


def test_physical_coordinates_follow_spacing_and_origin():
    arr = np.zeros((5, 5), bool)
    arr[2, 2] = True
    mesh = surface_nets(BinaryMask(arr, spacing=(2.0, 0.5), origin=(10.0, -3.0)))
    center = np.array([10.0 + 4.0, -3.0 + 1.0])
    lo, hi = mesh.vertices.min(axis=0), mesh.vertices.max(axis=0)
    assert np.all(lo >= center - [1.0, 0.25] - 1e-12) and np.all(hi <= center + [1.0, 0.25] + 1e-12)


def test_orientation_2d_keeps_foreground_on_the_left():
    arr = np.zeros((8, 8), bool)
    arr[2:6, 2:6] = True
    mesh = surface_nets(BinaryMask(arr))
    p = mesh.element_points()
    d = p[:, 1] - p[:, 0]
    left = mesh.centroids() + 0.1 * np.stack([-d[:, 1], d[:, 0]], axis=1) / np.linalg.norm(d, axis=1)[:, None]
    assert np.all((left > 1.5) & (left < 5.5))


def test_orientation_3d_normals_point_outward():
    mask = rasterize(ShapeSpec.sphere(3.0), 1.0, ([-5.0] * 3, [5.0] * 3))
    mesh = surface_nets(mask)
    p = mesh.element_points()
    normals = np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0])
    assert np.all(np.einsum("ij,ij->i", normals, mesh.centroids()) > 0)


def test_separation_of_voxel_centers():
    rng = np.random.default_rng(2)
    mask = BinaryMask(rng.random((6, 6, 6)) < 0.5, spacing=(0.7, 1.0, 1.3))
    mesh = surface_nets(mask)
    assert np.array_equal(signed_band(mask, build_index(mesh), math.inf).to_array(), mask.array)
    # no voxel center lies on the mesh
    centers = mask.voxel_centers(np.argwhere(np.ones(mask.shape)))
    assert point_to_boundary_distances(centers, build_index(mesh)).min() > 0


@pytest.mark.parametrize(
    "arr",
    [
        np.array([[1, 0], [0, 1]]),
        np.array([[[1, 0], [0, 1]], [[0, 1], [1, 0]]]),
        np.array([[[1, 0], [0, 0]], [[0, 0], [0, 1]]]),
        np.array([[[1, 1], [1, 0]], [[1, 0], [0, 1]]]),
    ],
)
def test_ambiguous_configurations_stay_manifold(arr):
    mesh = surface_nets(BinaryMask(arr))
    assert is_closed(mesh)
    if mesh.ndim == 3:
        assert set(edge_use_counts(mesh).values()) == {2}


@settings(max_examples=60, deadline=None)
@given(arrays(bool, st.sampled_from([(5, 5), (9, 4), (4, 4, 4), (3, 5, 4)])))
def test_random_masks_are_closed(arr):
    mesh = surface_nets(BinaryMask(arr))
    assert is_closed(mesh)
    assert (mesh.n_elements == 0) == (not arr.any())


def test_mesh_stays_within_half_voxel_of_transitions():
    mask = rasterize(ShapeSpec.sphere(4.0), 0.5, ([-5.0] * 3, [5.0] * 3))
    mesh = surface_nets(mask)
    r = np.linalg.norm(mesh.vertices, axis=1)
    assert np.all(np.abs(r - 4.0) <= 0.5 * math.sqrt(3) * 0.5 + 1e-9)
