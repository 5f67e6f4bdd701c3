"""Boundary meshes of binary masks via surface nets.

2D masks become closed polylines (line segments), 3D masks closed triangle
meshes. One vertex is placed per sign-changing dual cell (a 2x2 pixel or
2x2x2 voxel block), at the centroid of the midpoints of its sign-changing
edges. Ambiguous configurations are resolved so that diagonal foreground
samples stay separate (face connectivity), which keeps the output
edge-manifold:

* 2D saddle cells get one vertex per foreground corner.
* 3D checkerboard dual faces get one extra vertex per foreground corner,
  inserted on the dual edge that crosses the face; the affected polygons are
  fan-triangulated around their centroid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import BinaryMask, pad_background


@dataclass(frozen=True, eq=False)
class BoundaryMesh:
    """Explicit boundary: segments (2D) or triangles (3D) in mm coordinates.

    ``elements`` holds vertex index pairs (2D) or triples (3D); elements with
    zero size are dropped on construction.
    """

    vertices: np.ndarray
    elements: np.ndarray
    element_sizes: np.ndarray

    def __init__(self, vertices, elements, prune: bool = True):
        verts = np.array(vertices, dtype=np.float64, copy=True)
        ndim = verts.shape[1] if verts.ndim == 2 else 0
        if ndim not in (2, 3):
            raise ValueError(f"vertices must have shape (V, 2) or (V, 3), got {verts.shape}")
        elems = np.array(elements, dtype=np.int64, copy=True).reshape(-1, ndim)
        if elems.size and (elems.min() < 0 or elems.max() >= len(verts)):
            raise ValueError("element references a vertex index out of range")
        sizes = _element_sizes(verts, elems)
        if prune:
            keep = sizes > 0
            elems, sizes = elems[keep], sizes[keep]
        for arr in (verts, elems, sizes):
            arr.setflags(write=False)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "elements", elems)
        object.__setattr__(self, "element_sizes", sizes)

    @property
    def ndim(self) -> int:
        return self.vertices.shape[1]

    @property
    def n_elements(self) -> int:
        return len(self.elements)

    def element_points(self) -> np.ndarray:
        """Coordinates of every element's vertices, shape ``(E, ndim, ndim)``."""
        return self.vertices[self.elements]

    def centroids(self) -> np.ndarray:
        return self.element_points().mean(axis=1)

    def max_element_diameter(self) -> float:
        """Longest element edge (segment length in 2D)."""
        if not self.n_elements:
            return 0.0
        pts = self.element_points()
        k = pts.shape[1]
        longest = max(
            np.linalg.norm(pts[:, i] - pts[:, (i + 1) % k], axis=1).max() for i in range(k)
        )
        return float(longest)

    def translated(self, offset) -> "BoundaryMesh":
        return BoundaryMesh(self.vertices + np.asarray(offset, dtype=float), self.elements)

    def __repr__(self) -> str:
        kind = "segments" if self.ndim == 2 else "triangles"
        return f"BoundaryMesh(ndim={self.ndim}, vertices={len(self.vertices)}, {kind}={self.n_elements})"


def _element_sizes(verts: np.ndarray, elems: np.ndarray) -> np.ndarray:
    if not len(elems):
        return np.zeros(0)
    pts = verts[elems]
    if verts.shape[1] == 2:
        return np.linalg.norm(pts[:, 1] - pts[:, 0], axis=1)
    cross = np.cross(pts[:, 1] - pts[:, 0], pts[:, 2] - pts[:, 0])
    return 0.5 * np.linalg.norm(cross, axis=1)


def boundary_measure(mesh: BoundaryMesh) -> float:
    """Total boundary length (2D, mm) or area (3D, mm^2)."""
    return float(np.sum(mesh.element_sizes))


def element_centroid(mesh: BoundaryMesh, element_index: int) -> np.ndarray:
    """Arithmetic mean of the vertices of one element."""
    if not -mesh.n_elements <= element_index < mesh.n_elements:
        raise IndexError(f"element index {element_index} out of range for {mesh.n_elements} elements")
    return mesh.vertices[mesh.elements[element_index]].mean(axis=0)


def surface_nets(mask: BinaryMask) -> BoundaryMesh:
    """Extract the closed boundary mesh of a binary mask.

    The mask is padded with one background layer first, so foreground
    touching the array border still yields a closed boundary.
    """
    padded = pad_background(mask)
    if mask.ndim == 2:
        verts, elems = _surface_nets_2d(padded.array)
    else:
        verts, elems = _surface_nets_3d(padded.array)
    coords = np.asarray(padded.origin) + verts * np.asarray(padded.spacing)
    return BoundaryMesh(coords, elems)


# -- 2D ---------------------------------------------------------------------

# cell edges as (corner_a, corner_b) with corners given as (d0, d1) offsets
_EDGES_2D = (((0, 0), (1, 0)), ((0, 1), (1, 1)), ((0, 0), (0, 1)), ((1, 0), (1, 1)))


def _surface_nets_2d(m: np.ndarray):
    n0, n1 = m.shape
    corner = {
        (d0, d1): m[d0 : n0 - 1 + d0, d1 : n1 - 1 + d1] for d0 in (0, 1) for d1 in (0, 1)
    }
    crossing = [corner[a] != corner[b] for a, b in _EDGES_2D]
    n_cross = sum(c.astype(np.int64) for c in crossing)
    active = n_cross > 0
    saddle = n_cross == 4

    pos_sum = np.zeros(active.shape + (2,))
    for (a, b), cr in zip(_EDGES_2D, crossing):
        mid = 0.5 * (np.asarray(a) + np.asarray(b))
        pos_sum += cr[..., None] * mid
    regular = active & ~saddle

    # vertex ids in row-major cell order; saddle cells take two consecutive ids,
    # keyed by the d0 offset of their foreground corner
    slots = np.where(active, np.where(saddle, 2, 1), 0)
    first = np.cumsum(slots.reshape(-1)).reshape(active.shape) - slots
    vid = np.where(regular, first, -1)
    vid_sad = np.where(saddle[..., None], first[..., None] + np.array([0, 1]), -1)

    cell_idx = np.stack(np.indices(active.shape), axis=-1).astype(float)
    verts = np.zeros((int(slots.sum()), 2))
    verts[vid[regular]] = cell_idx[regular] + pos_sum[regular] / n_cross[regular][:, None]
    # saddle: foreground on the (0,0)-(1,1) diagonal or on the (0,1)-(1,0) one
    diag_main = corner[(0, 0)][saddle]
    low = np.where(diag_main[:, None], [0.25, 0.25], [0.25, 0.75])
    high = np.where(diag_main[:, None], [0.75, 0.75], [0.75, 0.25])
    verts[vid_sad[saddle][:, 0]] = cell_idx[saddle] + low
    verts[vid_sad[saddle][:, 1]] = cell_idx[saddle] + high

    def lookup(ci, cj, fg_d0):
        out = vid[ci, cj].copy()
        sad = saddle[ci, cj]
        out[sad] = vid_sad[ci[sad], cj[sad], fg_d0[sad]]
        return out

    # lattice edges along axis 0: pixel (i, j) -> (i + 1, j)
    diff = m[:-1, :] != m[1:, :]
    ii, jj = np.nonzero(diff)
    lower_fg = m[ii, jj]
    fg_d0 = np.where(lower_fg, 0, 1)
    va = lookup(ii, jj - 1, fg_d0)
    vb = lookup(ii, jj, fg_d0)
    seg0 = np.where(lower_fg[:, None], np.stack([va, vb], 1), np.stack([vb, va], 1))
    # lattice edges along axis 1: pixel (i, j) -> (i, j + 1)
    diff = m[:, :-1] != m[:, 1:]
    ii1, jj1 = np.nonzero(diff)
    upper_fg = m[ii1, jj1 + 1]
    va = lookup(ii1 - 1, jj1, np.ones_like(ii1))
    vb = lookup(ii1, jj1, np.zeros_like(ii1))
    seg1 = np.where(upper_fg[:, None], np.stack([va, vb], 1), np.stack([vb, va], 1))

    elems = np.concatenate([seg0, seg1]).reshape(-1, 2)
    return verts, elems


# -- 3D ---------------------------------------------------------------------


def _cell_edges_3d():
    edges = []
    for a in range(3):
        b, c = (a + 1) % 3, (a + 2) % 3
        for db in (0, 1):
            for dc in (0, 1):
                lo = [0, 0, 0]
                lo[b], lo[c] = db, dc
                hi = list(lo)
                hi[a] = 1
                edges.append((tuple(lo), tuple(hi)))
    return edges


_EDGES_3D = _cell_edges_3d()


def _surface_nets_3d(m: np.ndarray):
    n = m.shape
    cshape = tuple(s - 1 for s in n)

    def corner(d):
        return m[d[0] : d[0] + cshape[0], d[1] : d[1] + cshape[1], d[2] : d[2] + cshape[2]]

    pos_sum = np.zeros(cshape + (3,))
    n_cross = np.zeros(cshape, dtype=np.int64)
    for lo, hi in _EDGES_3D:
        cr = corner(lo) != corner(hi)
        n_cross += cr
        pos_sum += cr[..., None] * (0.5 * (np.asarray(lo) + np.asarray(hi)))
    active = n_cross > 0
    vid = np.full(cshape, -1, dtype=np.int64)
    act_idx = np.argwhere(active)
    vid[active] = np.arange(len(act_idx))
    verts = [act_idx + pos_sum[active] / n_cross[active][:, None]]
    n_verts = len(act_idx)

    # quads, one per sign-changing lattice edge, outward oriented
    quads = []
    edge_quad = []  # per axis: array mapping lattice-edge start voxel -> quad id
    q_offset = 0
    for a in range(3):
        b, c = (a + 1) % 3, (a + 2) % 3
        sl_lo = [slice(None)] * 3
        sl_hi = [slice(None)] * 3
        sl_lo[a] = slice(0, n[a] - 1)
        sl_hi[a] = slice(1, n[a])
        lo_vals = m[tuple(sl_lo)]
        diff = lo_vals != m[tuple(sl_hi)]
        v = np.argwhere(diff)
        eb = np.zeros(3, dtype=np.int64)
        ec = np.zeros(3, dtype=np.int64)
        eb[b] = 1
        ec[c] = 1
        cyc = [v, v - eb, v - eb - ec, v - ec]
        q = np.stack([vid[tuple(cc.T)] for cc in cyc], axis=1)
        inside_low = lo_vals[tuple(v.T)]
        q = np.where(inside_low[:, None], q, q[:, ::-1])
        lookup = np.full(n, -1, dtype=np.int64)
        lookup[tuple(v.T)] = q_offset + np.arange(len(v))
        edge_quad.append(lookup)
        quads.append(q)
        q_offset += len(v)
    quads = np.concatenate(quads).reshape(-1, 4)

    # checkerboard dual faces: insert one vertex per foreground corner
    polygons: dict[int, list[int]] = {}
    extra = []
    for a in range(3):
        b, c = (a + 1) % 3, (a + 2) % 3
        # face between cells x and x + e_a lies in voxel layer x_a + 1
        layer = [slice(None)] * 3
        layer[a] = slice(1, n[a] - 1)
        plane = np.moveaxis(m[tuple(layer)], (a, b, c), (0, 1, 2))
        p00 = plane[:, :-1, :-1]
        p11 = plane[:, 1:, 1:]
        p10 = plane[:, 1:, :-1]
        p01 = plane[:, :-1, 1:]
        amb = (p00 == p11) & (p10 == p01) & (p00 != p10)
        for L, sb, sc in np.argwhere(amb):
            base = np.zeros(3, dtype=np.int64)
            base[a], base[b], base[c] = L + 1, sb, sc
            eb = np.zeros(3, dtype=np.int64)
            ec = np.zeros(3, dtype=np.int64)
            eb[b] = 1
            ec[c] = 1
            cell_lo = base.copy()
            cell_lo[a] -= 1
            v_lo = vid[tuple(cell_lo)]
            v_hi = vid[tuple(base)] if base[a] < cshape[a] else -1
            # lattice edges of the face: (start voxel, axis)
            face_edges = [(base, b), (base + ec, b), (base, c), (base + eb, c)]
            fg_corners = [base + d for d in (np.zeros(3, np.int64), eb, ec, eb + ec) if m[tuple(base + d)]]
            for f in fg_corners:
                incident = [
                    (s, ax) for s, ax in face_edges if (s == f).all() or ((s + _unit(ax)) == f).all()
                ]
                mid = np.mean([s + 0.5 * _unit(ax) for s, ax in incident], axis=0)
                new_id = n_verts + len(extra)
                extra.append(mid)
                for s, ax in incident:
                    qid = edge_quad[ax][tuple(s)]
                    poly = polygons.setdefault(int(qid), [int(x) for x in quads[qid]])
                    _insert_between(poly, int(v_lo), int(v_hi), new_id)
    if extra:
        verts.append(np.array(extra, dtype=float))
        n_verts += len(extra)
    verts = np.concatenate(verts).reshape(-1, 3)

    plain = np.ones(len(quads), dtype=bool)
    plain[list(polygons)] = False
    tris = [_split_quads(quads[plain], verts)]
    centers = []
    for qid in sorted(polygons):
        poly = polygons[qid]
        cid = n_verts + len(centers)
        centers.append(verts[poly].mean(axis=0))
        k = len(poly)
        tris.append(np.array([[cid, poly[i], poly[(i + 1) % k]] for i in range(k)], dtype=np.int64))
    if centers:
        verts = np.concatenate([verts, np.array(centers)])
    return verts, np.concatenate(tris).reshape(-1, 3)


def _unit(axis: int) -> np.ndarray:
    e = np.zeros(3, dtype=np.int64)
    e[axis] = 1
    return e


def _insert_between(poly: list[int], u: int, v: int, new: int) -> None:
    k = len(poly)
    for i in range(k):
        j = (i + 1) % k
        if {poly[i], poly[j]} == {u, v}:
            poly.insert(i + 1, new)
            return
    raise RuntimeError("dual edge not found in polygon")  # pragma: no cover


def _split_quads(quads: np.ndarray, verts: np.ndarray) -> np.ndarray:
    """Split quads along the diagonal through their lowest-index vertex.

    Falls back to the other diagonal when the preferred split would create a
    zero-area triangle.
    """
    if not len(quads):
        return np.zeros((0, 3), dtype=np.int64)
    q = quads
    diag02 = [np.stack([q[:, 0], q[:, 1], q[:, 2]], 1), np.stack([q[:, 0], q[:, 2], q[:, 3]], 1)]
    diag13 = [np.stack([q[:, 1], q[:, 2], q[:, 3]], 1), np.stack([q[:, 1], q[:, 3], q[:, 0]], 1)]
    use02 = np.argmin(q, axis=1) % 2 == 0

    def min_area(pair):
        return np.minimum(_element_sizes(verts, pair[0]), _element_sizes(verts, pair[1]))

    a02, a13 = min_area(diag02), min_area(diag13)
    use02 = np.where(use02, (a02 > 0) | (a13 <= 0), ~((a13 > 0) | (a02 <= 0)))
    t1 = np.where(use02[:, None], diag02[0], diag13[0])
    t2 = np.where(use02[:, None], diag02[1], diag13[1])
    return np.stack([t1, t2], axis=1).reshape(-1, 3)


def edge_use_counts(mesh: BoundaryMesh) -> dict[tuple[int, ...], int]:
    """How many elements use each vertex (2D) or undirected edge (3D)."""
    counts: dict[tuple[int, ...], int] = {}
    if mesh.ndim == 2:
        keys = [(int(v),) for v in mesh.elements.reshape(-1)]
    else:
        e = mesh.elements
        pairs = np.concatenate([e[:, [0, 1]], e[:, [1, 2]], e[:, [2, 0]]])
        pairs.sort(axis=1)
        keys = [tuple(map(int, p)) for p in pairs]
    for k in keys:
        counts[k] = counts.get(k, 0) + 1
    return counts


def is_closed(mesh: BoundaryMesh) -> bool:
    """Degree-2 vertices (2D) or every edge shared by exactly two triangles (3D)."""
    return all(c == 2 for c in edge_use_counts(mesh).values())
