import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from meshdist import BinaryMask, BoundaryMesh, DistanceProfile, build_index, directed_profile, signed_band, surface_nets
from meshdist.distance import linear_scan_distances, point_to_boundary_distance, point_to_boundary_distances
from meshdist.oracle import ShapeSpec, rasterize

TRIANGLE = BoundaryMesh(np.array([[0.0, 0, 0], [1, 0, 0], [0, 1, 0]]), [[0, 1, 2]])


def _random_mesh(rng, ndim, n):
    verts = rng.uniform(-3, 3, size=(n * ndim, ndim))
    return BoundaryMesh(verts, np.arange(n * ndim).reshape(n, ndim))


def test_single_element_tree_is_one_leaf():
    index = build_index(TRIANGLE)
    assert index.n_nodes == 1 and index.node_count[0] == 1


def test_root_box_is_union_of_element_boxes():
    rng = np.random.default_rng(0)
    mesh = _random_mesh(rng, 3, 50)
    index = build_index(mesh)
    pts = mesh.element_points().reshape(-1, 3)
    np.testing.assert_array_equal(index.node_lo[0], pts.min(axis=0))
    np.testing.assert_array_equal(index.node_hi[0], pts.max(axis=0))
    assert sorted(index.order.tolist()) == list(range(50))


def test_empty_mesh_cannot_be_indexed():
    with pytest.raises(ValueError):
        build_index(BoundaryMesh(np.zeros((0, 2)), np.zeros((0, 2), int)))


@pytest.mark.parametrize(
    "q, expected",
    [((0.0, 1.0, 0.0), 0.0), ((0.0, 0.0, 5.0), 5.0), ((2.0, 2.0, 0.0), 1.5 * math.sqrt(2)), ((0.2, 0.2, -1.0), 1.0)],
)
def test_point_to_triangle(q, expected):
    assert point_to_boundary_distance(q, build_index(TRIANGLE)) == pytest.approx(expected, abs=1e-9)


def test_hand_case_against_barycentric_sampling():
    u, v = np.meshgrid(np.linspace(0, 1, 801), np.linspace(0, 1, 801))
    keep = u + v <= 1
    pts = np.stack([u[keep], v[keep], np.zeros(keep.sum())], axis=1)
    brute = np.linalg.norm(pts - [2.0, 2.0, 0.0], axis=1).min()
    exact = point_to_boundary_distance([2.0, 2.0, 0.0], build_index(TRIANGLE))
    assert exact <= brute + 1e-12 and brute - exact < 1e-3


def test_point_to_segment_2d():
    seg = BoundaryMesh(np.array([[0.0, 0.0], [2.0, 0.0]]), [[0, 1]])
    d = point_to_boundary_distances(np.array([[1.0, 3.0], [-3.0, 4.0], [3.0, 0.0]]), build_index(seg))
    np.testing.assert_allclose(d, [3.0, 5.0, 1.0])


@pytest.mark.parametrize("ndim", [2, 3])
def test_tree_matches_linear_scan_on_random_meshes(ndim):
    rng = np.random.default_rng(ndim)
    for _ in range(50):
        mesh = _random_mesh(rng, ndim, int(rng.integers(1, 150)))
        q = rng.uniform(-5, 5, size=(200, ndim))
        assert np.array_equal(point_to_boundary_distances(q, build_index(mesh)), linear_scan_distances(q, mesh))


def test_profile_parallel_segments():
    source = BoundaryMesh(np.array([[0.0, 3.0], [1.0, 3.0]]), [[0, 1]])
    target = BoundaryMesh(np.array([[-1.0, 0.0], [2.0, 0.0]]), [[0, 1]])
    prof = directed_profile(source, build_index(target))
    assert prof.distances.tolist() == [3.0] and prof.weights.tolist() == [1.0]
    assert prof.total_measure == 1.0


def test_self_profile_is_exactly_zero():
    mask = rasterize(ShapeSpec.sphere(3.0), 0.4, ([-4.0] * 3, [4.0] * 3))
    mesh = surface_nets(mask)
    prof = directed_profile(mesh, build_index(mesh))
    assert np.all(prof.distances == 0.0)
    # an equal but distinct copy is recognized too
    copy = BoundaryMesh(mesh.vertices.copy(), mesh.elements.copy())
    assert np.all(directed_profile(copy, build_index(mesh)).distances == 0.0)


def test_concentric_circle_profile():
    extent = ([-13.0, -13.0], [13.0, 13.0])
    a = surface_nets(rasterize(ShapeSpec.circle(10.0), 0.25, extent))
    b = surface_nets(rasterize(ShapeSpec.circle(12.0), 0.25, extent))
    for src, dst in ((a, b), (b, a)):
        d = directed_profile(src, build_index(dst)).distances
        assert d.min() >= 1.7 and d.max() <= 2.3


def test_profile_sorting_is_stable():
    prof = DistanceProfile.from_unsorted([2.0, 1.0, 2.0, 1.0], [1.0, 2.0, 3.0, 4.0])
    assert prof.distances.tolist() == [1.0, 1.0, 2.0, 2.0]
    assert prof.weights.tolist() == [2.0, 4.0, 1.0, 3.0]
    with pytest.raises(ValueError):
        DistanceProfile.from_unsorted([1.0], [0.0])
    with pytest.raises(ValueError):
        DistanceProfile.from_unsorted([-1.0], [1.0])


def _square():
    arr = np.zeros((14, 14), bool)
    arr[2:12, 2:12] = True
    return BinaryMask(arr)


def test_band_limits():
    mask = _square()
    index = build_index(surface_nets(mask))
    assert np.array_equal(signed_band(mask, index, math.inf).to_array(), mask.array)
    assert signed_band(mask, index, 1e-12).count == 0
    with pytest.raises(ValueError):
        signed_band(mask, index, 0.0)


def test_band_matches_exhaustive_check():
    mask = _square()
    mesh = surface_nets(mask)
    band = signed_band(mask, build_index(mesh), 1.5).to_array()
    centers = mask.voxel_centers()
    d = linear_scan_distances(centers, mesh)
    expected = np.zeros_like(mask.array)
    expected[tuple(np.argwhere(mask.array).T)] = d < 1.5
    assert np.array_equal(band, expected)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.1, 4.0), st.floats(0.1, 4.0))
def test_band_is_monotone_in_tau(t1, t2):
    mask = rasterize(ShapeSpec.circle(5.0), 0.5, ([-6.0, -6.0], [6.0, 6.0]))
    index = build_index(surface_nets(mask))
    lo, hi = sorted((t1, t2))
    small, big = signed_band(mask, index, lo).to_array(), signed_band(mask, index, hi).to_array()
    assert not np.any(small & ~big)
