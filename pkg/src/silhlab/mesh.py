"""Indexed triangle meshes, edge adjacency, statistics and OFF/OBJ I/O."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import (DegenerateFace, InconsistentOrientation, MeshError,
                     NonManifoldEdge, NonTriangularFace, ParseError)

BOUNDARY = -1
# area below this times the squared longest edge counts as degenerate
DEGENERATE_AREA_REL = 1e-12


def _frozen(a):
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class TriangleMesh:
    """Triangle soup with shared vertices; faces are CCW seen from outside."""

    vertices: np.ndarray
    faces: np.ndarray

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float).reshape(-1, 3)
        f = np.array(self.faces, dtype=np.int64).reshape(-1, 3)
        if not np.all(np.isfinite(v)):
            raise MeshError("non-finite vertex coordinates")
        if f.size and (f.min() < 0 or f.max() >= len(v)):
            raise MeshError("face index out of range")
        same = (f[:, 0] == f[:, 1]) | (f[:, 1] == f[:, 2]) | (f[:, 0] == f[:, 2])
        if np.any(same):
            raise DegenerateFace(f"face {int(np.argmax(same))} repeats a vertex")
        object.__setattr__(self, "vertices", _frozen(v))
        object.__setattr__(self, "faces", _frozen(f))

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @cached_property
    def corners(self) -> np.ndarray:
        """(F, 3, 3) vertex coordinates per face."""
        return _frozen(self.vertices[self.faces])

    @cached_property
    def _cross(self) -> np.ndarray:
        c = self.corners
        return np.cross(c[:, 1] - c[:, 0], c[:, 2] - c[:, 0])

    @cached_property
    def areas(self) -> np.ndarray:
        return _frozen(0.5 * np.linalg.norm(self._cross, axis=1))

    @cached_property
    def side_lengths(self) -> np.ndarray:
        """(F, 3) lengths of the sides opposite corners 0, 1, 2."""
        c = self.corners
        return _frozen(np.stack([
            np.linalg.norm(c[:, 2] - c[:, 1], axis=1),
            np.linalg.norm(c[:, 0] - c[:, 2], axis=1),
            np.linalg.norm(c[:, 1] - c[:, 0], axis=1),
        ], axis=1))

    @cached_property
    def degenerate_faces(self) -> np.ndarray:
        longest = self.side_lengths.max(axis=1)
        return _frozen(np.flatnonzero(self.areas <= DEGENERATE_AREA_REL * longest ** 2))

    @cached_property
    def normals(self) -> np.ndarray:
        """Unit normals by the right-hand rule. Degenerate faces get NaN rows."""
        cr = self._cross
        norm = np.linalg.norm(cr, axis=1)
        with np.errstate(invalid="ignore", divide="ignore"):
            out = cr / norm[:, None]
        out[self.degenerate_faces] = np.nan
        return _frozen(out)

    @cached_property
    def centroids(self) -> np.ndarray:
        return _frozen(self.corners.mean(axis=1))

    @cached_property
    def heights(self) -> np.ndarray:
        """Smallest height of each face: twice the area over the longest side."""
        return _frozen(2.0 * self.areas / self.side_lengths.max(axis=1))

    @cached_property
    def adjacency(self) -> "EdgeAdjacency":
        return build_adjacency(self)

    def scaled(self, s: float) -> "TriangleMesh":
        return TriangleMesh(self.vertices * s, self.faces)


@dataclass(frozen=True, eq=False)
class EdgeAdjacency:
    """Undirected edges with their incident faces.

    ``edges[i]`` is sorted ascending and rows are in lexicographic order.
    ``face_left`` is the face traversing the edge from low to high index (or the
    only face of a boundary edge); ``face_right`` traverses it the other way and
    is ``BOUNDARY`` (-1) on boundary edges.
    """

    edges: np.ndarray
    face_left: np.ndarray
    face_right: np.ndarray
    lengths: np.ndarray

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def is_boundary(self) -> np.ndarray:
        return _frozen(self.face_right == BOUNDARY)

    @cached_property
    def interior(self) -> np.ndarray:
        return _frozen(np.flatnonzero(~self.is_boundary))

    @cached_property
    def boundary(self) -> np.ndarray:
        return _frozen(np.flatnonzero(self.is_boundary))

    @property
    def n_boundary(self) -> int:
        return len(self.boundary)


def build_adjacency(mesh: TriangleMesh) -> EdgeAdjacency:
    f = mesh.faces
    n = len(f)
    a = f.reshape(-1)
    b = f[:, [1, 2, 0]].reshape(-1)
    face_of = np.repeat(np.arange(n), 3)
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    forward = a < b
    order = np.lexsort((~forward, hi, lo))
    lo, hi, forward, face_of = lo[order], hi[order], forward[order], face_of[order]

    new = np.ones(len(lo), dtype=bool)
    new[1:] = (lo[1:] != lo[:-1]) | (hi[1:] != hi[:-1])
    starts = np.flatnonzero(new)
    counts = np.diff(np.append(starts, len(lo)))
    if np.any(counts > 2):
        i = starts[np.argmax(counts > 2)]
        raise NonManifoldEdge(f"edge ({lo[i]}, {hi[i]}) has more than two faces")
    pairs = starts[counts == 2]
    # sort key puts the forward half-edge first, so a pair needs forward then backward
    bad = ~forward[pairs] | forward[pairs + 1]
    if np.any(bad):
        i = pairs[np.argmax(bad)]
        raise InconsistentOrientation(
            f"edge ({lo[i]}, {hi[i]}) is traversed twice in the same direction")

    edges = np.column_stack((lo[starts], hi[starts]))
    left = face_of[starts]
    right = np.full(len(starts), BOUNDARY, dtype=np.int64)
    right[counts == 2] = face_of[pairs + 1]
    v = mesh.vertices
    lengths = np.linalg.norm(v[edges[:, 1]] - v[edges[:, 0]], axis=1)
    return EdgeAdjacency(_frozen(edges), _frozen(left), _frozen(right), _frozen(lengths))


@dataclass(frozen=True)
class MeshStats:
    n_faces: int
    n_vertices: int
    n_edges: int
    n_boundary_edges: int
    min_edge_length: float
    max_edge_length: float
    min_height: float
    min_fatness: float
    euler_characteristic: int


def validate(mesh: TriangleMesh) -> MeshStats:
    """Check structure and orientation; return summary statistics."""
    if mesh.n_faces == 0:
        raise MeshError("mesh has no faces")
    if len(mesh.degenerate_faces):
        raise DegenerateFace(f"face {int(mesh.degenerate_faces[0])} has (near) zero area")
    adj = mesh.adjacency
    fat = mesh.heights / mesh.side_lengths.max(axis=1)
    return MeshStats(
        n_faces=mesh.n_faces,
        n_vertices=mesh.n_vertices,
        n_edges=adj.n_edges,
        n_boundary_edges=adj.n_boundary,
        min_edge_length=float(adj.lengths.min()),
        max_edge_length=float(adj.lengths.max()),
        min_height=float(mesh.heights.min()),
        min_fatness=float(fat.min()),
        euler_characteristic=mesh.n_vertices - adj.n_edges + mesh.n_faces,
    )


def _check_face(mesh: TriangleMesh, i: int):
    if not 0 <= i < mesh.n_faces:
        raise IndexError(f"face {i} out of range")
    if i in mesh.degenerate_faces:
        raise DegenerateFace(f"face {i} has (near) zero area")


def face_normal(mesh: TriangleMesh, i: int) -> np.ndarray:
    _check_face(mesh, i)
    return mesh.normals[i].copy()


def smallest_height(mesh: TriangleMesh, i: int) -> float:
    _check_face(mesh, i)
    return float(mesh.heights[i])


# --- file formats -----------------------------------------------------------

def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def save_off(mesh: TriangleMesh) -> bytes:
    lines = ["OFF", f"{mesh.n_vertices} {mesh.n_faces} 0"]
    lines += [" ".join(_fmt(c) for c in p) for p in mesh.vertices]
    lines += [f"3 {a} {b} {c}" for a, b, c in mesh.faces]
    return ("\n".join(lines) + "\n").encode("ascii")


def save_obj(mesh: TriangleMesh) -> bytes:
    lines = ["v " + " ".join(_fmt(c) for c in p) for p in mesh.vertices]
    lines += [f"f {a + 1} {b + 1} {c + 1}" for a, b, c in mesh.faces]
    return ("\n".join(lines) + "\n").encode("ascii")


def _content_lines(data: bytes):
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"not a text file: {exc}") from None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def load_off(data: bytes) -> TriangleMesh:
    lines = _content_lines(data)
    try:
        lineno, tokens = next(lines)
    except StopIteration:
        raise ParseError("empty document", 1) from None
    if tokens[0] != "OFF":
        raise ParseError("missing OFF header", lineno)
    counts = tokens[1:]
    if not counts:
        try:
            lineno, counts = next(lines)
        except StopIteration:
            raise ParseError("missing counts line", lineno) from None
    try:
        nv, nf = int(counts[0]), int(counts[1])
    except (ValueError, IndexError):
        raise ParseError("bad counts line", lineno) from None
    if nv < 0 or nf < 0:
        raise ParseError("negative counts", lineno)

    verts = []
    faces = []
    for lineno, tokens in lines:
        if len(verts) < nv:
            if len(tokens) < 3:
                raise ParseError("vertex needs three coordinates", lineno)
            try:
                verts.append([float(t) for t in tokens[:3]])
            except ValueError:
                raise ParseError("bad vertex coordinate", lineno) from None
        elif len(faces) < nf:
            try:
                k = int(tokens[0])
                idx = [int(t) for t in tokens[1:1 + k]]
            except ValueError:
                raise ParseError("bad face record", lineno) from None
            if k != 3:
                raise NonTriangularFace(f"line {lineno}: face with {k} vertices")
            if len(idx) != 3:
                raise ParseError("truncated face record", lineno)
            if any(i < 0 or i >= nv for i in idx):
                raise ParseError("face index out of range", lineno)
            faces.append(idx)
        else:
            raise ParseError("trailing data after faces", lineno)
    if len(verts) < nv or len(faces) < nf:
        raise ParseError(f"expected {nv} vertices and {nf} faces, "
                         f"got {len(verts)} and {len(faces)}")
    return TriangleMesh(np.array(verts, dtype=float).reshape(-1, 3),
                        np.array(faces, dtype=np.int64).reshape(-1, 3))


def load_obj(data: bytes) -> TriangleMesh:
    """Read ``v`` and ``f`` records; everything else is skipped."""
    verts = []
    faces = []
    for lineno, tokens in _content_lines(data):
        tag = tokens[0]
        if tag == "v":
            try:
                verts.append([float(t) for t in tokens[1:4]])
            except ValueError:
                raise ParseError("bad vertex coordinate", lineno) from None
            if len(verts[-1]) != 3:
                raise ParseError("vertex needs three coordinates", lineno)
        elif tag == "f":
            refs = tokens[1:]
            if len(refs) != 3:
                raise NonTriangularFace(f"line {lineno}: face with {len(refs)} vertices")
            idx = []
            for r in refs:
                try:
                    i = int(r.split("/")[0])
                except ValueError:
                    raise ParseError(f"bad face reference {r!r}", lineno) from None
                if i > 0:
                    i -= 1
                elif i < 0:
                    i += len(verts)
                else:
                    raise ParseError("OBJ indices are 1-based", lineno)
                if not 0 <= i < len(verts):
                    raise ParseError(f"face reference {r!r} out of range", lineno)
                idx.append(i)
            faces.append(idx)
    return TriangleMesh(np.array(verts, dtype=float).reshape(-1, 3),
                        np.array(faces, dtype=np.int64).reshape(-1, 3))


def load_mesh(path) -> TriangleMesh:
    path = Path(path)
    data = path.read_bytes()
    if path.suffix.lower() == ".obj":
        return load_obj(data)
    return load_off(data)
