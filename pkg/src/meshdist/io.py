"""File formats: NRRD and PGM masks, OBJ boundary meshes.

Only a small NRRD subset is understood: 2D/3D ``uint8`` volumes, ``raw`` or
``gzip`` encoding, axis-aligned positive ``space directions`` (or
``spacings``) and an optional ``space origin``. Anything else is rejected
with an error naming the offending field.
"""

from __future__ import annotations

import gzip
import os
import re

import numpy as np

from .grid import BinaryMask
from .meshing import BoundaryMesh


class FormatError(ValueError):
    """Unsupported or malformed input file."""


_UINT8_TYPES = {"uint8", "uchar", "unsigned char", "uint8_t"}
_IGNORED_FIELDS = {"content", "kinds", "space", "endian", "labels", "space units", "units", "centerings", "centers"}


def _parse_vector(text: str, field: str) -> list[float]:
    text = text.strip()
    if text == "none":
        raise FormatError(f"unsupported: {field} 'none' on a spatial axis")
    m = re.fullmatch(r"\((.*)\)", text)
    if not m:
        raise FormatError(f"malformed vector in {field}: {text!r}")
    try:
        return [float(v) for v in m.group(1).split(",")]
    except ValueError as exc:
        raise FormatError(f"malformed vector in {field}: {text!r}") from exc


def _binary_from_values(values: np.ndarray, source: str) -> np.ndarray:
    distinct = np.unique(values)
    if len(distinct) > 2 or (len(distinct) == 2 and distinct[0] != 0):
        raise FormatError(f"{source}: non-binary data (values {distinct[:5].tolist()}...)")
    return values != 0


def read_nrrd(path: str | os.PathLike) -> BinaryMask:
    with open(path, "rb") as fh:
        raw = fh.read()
    if not raw.startswith(b"NRRD"):
        raise FormatError(f"{path}: not a NRRD file (missing magic)")
    sep = re.search(rb"\r?\n\r?\n", raw)
    if sep is None:
        raise FormatError(f"{path}: header not terminated by a blank line")
    header_lines = raw[: sep.start()].decode("ascii", errors="replace").splitlines()[1:]
    payload = raw[sep.end() :]

    fields: dict[str, str] = {}
    for line in header_lines:
        if not line or line.startswith("#"):
            continue
        if ":=" in line:
            continue  # key/value pairs carry no geometry
        if ": " not in line:
            raise FormatError(f"{path}: malformed header line {line!r}")
        key, value = line.split(": ", 1)
        fields[key.strip().lower()] = value.strip()

    known = {"dimension", "type", "encoding", "sizes", "space directions", "space origin", "spacings", "space dimension"}
    for key in fields:
        if key not in known and key not in _IGNORED_FIELDS:
            raise FormatError(f"{path}: unsupported header field '{key}'")
    for key in ("dimension", "type", "encoding", "sizes"):
        if key not in fields:
            raise FormatError(f"{path}: missing required field '{key}'")

    ndim = int(fields["dimension"])
    if ndim not in (2, 3):
        raise FormatError(f"{path}: unsupported dimension {ndim}")
    if fields["type"].lower() not in _UINT8_TYPES:
        raise FormatError(f"{path}: unsupported type '{fields['type']}' (only uint8)")
    sizes = [int(s) for s in fields["sizes"].split()]
    if len(sizes) != ndim:
        raise FormatError(f"{path}: 'sizes' has {len(sizes)} entries for dimension {ndim}")

    spacing = [1.0] * ndim
    if "space directions" in fields:
        vectors = re.findall(r"\([^)]*\)|none", fields["space directions"])
        if len(vectors) != ndim:
            raise FormatError(f"{path}: 'space directions' needs {ndim} vectors")
        for i, vec in enumerate(vectors):
            v = _parse_vector(vec, "space directions")
            if len(v) != ndim:
                raise FormatError(f"{path}: 'space directions' vectors must have {ndim} components")
            off = [abs(x) for j, x in enumerate(v) if j != i]
            if any(x != 0 for x in off):
                raise FormatError(f"{path}: unsupported: oblique grid in 'space directions'")
            if v[i] <= 0:
                raise FormatError(f"{path}: unsupported: non-positive 'space directions' entry")
            spacing[i] = v[i]
    elif "spacings" in fields:
        spacing = [float(s) for s in fields["spacings"].split()]
        if len(spacing) != ndim or min(spacing) <= 0:
            raise FormatError(f"{path}: invalid 'spacings'")

    origin = [0.0] * ndim
    if "space origin" in fields:
        origin = _parse_vector(fields["space origin"], "space origin")
        if len(origin) != ndim:
            raise FormatError(f"{path}: 'space origin' must have {ndim} components")

    encoding = fields["encoding"].lower()
    if encoding in ("gzip", "gz"):
        try:
            payload = gzip.decompress(payload)
        except OSError as exc:
            raise FormatError(f"{path}: corrupt gzip payload") from exc
    elif encoding != "raw":
        raise FormatError(f"{path}: unsupported encoding '{encoding}'")
    count = int(np.prod(sizes))
    if len(payload) < count:
        raise FormatError(f"{path}: payload has {len(payload)} bytes, expected {count}")
    # NRRD stores the first axis fastest
    values = np.frombuffer(payload[:count], dtype=np.uint8).reshape(sizes, order="F")
    return BinaryMask(_binary_from_values(values, str(path)), spacing, origin)


def write_nrrd(path: str | os.PathLike, mask: BinaryMask, encoding: str = "raw") -> None:
    if encoding not in ("raw", "gzip"):
        raise ValueError("encoding must be 'raw' or 'gzip'")
    n = mask.ndim
    dirs = " ".join(
        "(" + ",".join(repr(mask.spacing[i]) if j == i else "0" for j in range(n)) + ")" for i in range(n)
    )
    header = [
        "NRRD0004",
        "type: uint8",
        f"dimension: {n}",
        f"space dimension: {n}",
        "sizes: " + " ".join(str(s) for s in mask.shape),
        f"space directions: {dirs}",
        "space origin: (" + ",".join(repr(o) for o in mask.origin) + ")",
        f"encoding: {encoding}",
    ]
    data = mask.array.astype(np.uint8).ravel(order="F").tobytes()
    if encoding == "gzip":
        data = gzip.compress(data, mtime=0)
    with open(path, "wb") as fh:
        fh.write(("\n".join(header) + "\n\n").encode("ascii"))
        fh.write(data)


def read_pgm(path: str | os.PathLike, spacing=(1.0, 1.0)) -> BinaryMask:
    """Read a P2/P5 greymap; rows map to axis 0, columns to axis 1."""
    with open(path, "rb") as fh:
        raw = fh.read()
    magic = raw[:2]
    if magic not in (b"P2", b"P5"):
        raise FormatError(f"{path}: not a PGM file")
    tokens = []
    pos = 2
    while len(tokens) < 3:
        m = re.compile(rb"\s*(#[^\n]*\n\s*)*(\d+)").match(raw, pos)
        if m is None:
            raise FormatError(f"{path}: malformed PGM header")
        tokens.append(int(m.group(2)))
        pos = m.end()
    width, height, maxval = tokens
    if magic == b"P5":
        dtype = np.uint8 if maxval < 256 else np.dtype(">u2")
        body = raw[pos + 1 :]
        if len(body) < width * height * np.dtype(dtype).itemsize:
            raise FormatError(f"{path}: truncated PGM data")
        values = np.frombuffer(body, dtype=dtype, count=width * height)
    else:
        values = np.array(raw[pos:].split(), dtype=np.int64)[: width * height]
    if values.size != width * height:
        raise FormatError(f"{path}: truncated PGM data")
    return BinaryMask(_binary_from_values(values.reshape(height, width), str(path)), spacing)


def read_mask(path: str | os.PathLike, spacing=None) -> BinaryMask:
    """Read a mask from NRRD, or from PGM with ``spacing`` (default 1 mm)."""
    suffix = os.path.splitext(str(path))[1].lower()
    if suffix in (".nrrd", ".nhdr"):
        mask = read_nrrd(path)
        if spacing is not None:
            raise FormatError("--spacing only applies to PGM input; NRRD carries its own geometry")
        return mask
    if suffix in (".pgm", ".pnm"):
        return read_pgm(path, spacing if spacing is not None else (1.0, 1.0))
    raise FormatError(f"{path}: unsupported mask format '{suffix}' (use .nrrd or .pgm)")


def read_mesh(path: str | os.PathLike) -> BoundaryMesh:
    """Read an OBJ with ``f`` triangles (3D) or ``l`` segments (2D)."""
    verts, faces, lines = [], [], []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            tag = parts[0]
            if tag == "v":
                verts.append([float(x) for x in parts[1:4]])
            elif tag in ("f", "l"):
                idx = []
                for tok in parts[1:]:
                    i = int(tok.split("/")[0])
                    idx.append(i - 1 if i > 0 else len(verts) + i)
                if tag == "f":
                    if len(idx) != 3:
                        raise FormatError(
                            f"{path}:{lineno}: face with {len(idx)} vertices; triangulate upstream"
                        )
                    faces.append(idx)
                else:
                    if len(idx) < 2:
                        raise FormatError(f"{path}:{lineno}: line element needs two vertices")
                    lines.extend([idx[k], idx[k + 1]] for k in range(len(idx) - 1))
    if faces and lines:
        raise FormatError(f"{path}: mixed 'f' and 'l' elements")
    if lines:
        v = np.array(verts, dtype=float)
        if v.shape[1] == 3 and np.any(v[:, 2] != 0):
            raise FormatError(f"{path}: 2D line mesh must have z = 0")
        return BoundaryMesh(v[:, :2], lines)
    if not faces:
        raise FormatError(f"{path}: no 'f' or 'l' elements")
    return BoundaryMesh(np.array(verts, dtype=float).reshape(-1, 3), faces)


def write_mesh(path: str | os.PathLike, mesh: BoundaryMesh) -> None:
    tag = "l" if mesh.ndim == 2 else "f"
    with open(path, "w") as fh:
        for v in mesh.vertices:
            coords = list(v) + ([0.0] if mesh.ndim == 2 else [])
            fh.write("v " + " ".join(repr(float(c)) for c in coords) + "\n")
        for e in mesh.elements:
            fh.write(tag + " " + " ".join(str(int(i) + 1) for i in e) + "\n")
