"""Front/back classification, transparent silhouette extraction, projected length, SVG."""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass

import numpy as np

from .errors import ViewpointMismatch
from .geom import AtInfinity, orthonormal_frame
from .mesh import EdgeAdjacency, TriangleMesh

log = logging.getLogger(__name__)

SIDE_TOL = 1e-12


class FaceSide(enum.Enum):
    FRONT = "front"
    BACK = "back"
    DEGENERATE = "degenerate"


def face_values(mesh: TriangleMesh, viewpoint) -> np.ndarray:
    """Signed visibility test per face, normalized so that |value| <= 1.

    At infinity this is ``normal . d``. For a finite point ``p`` it is
    ``normal . (p - c) / |p - c|`` with ``c`` the face centroid, i.e. the cosine
    of the angle the acute/obtuse definition refers to.
    """
    if isinstance(viewpoint, AtInfinity):
        return mesh.normals @ viewpoint.direction
    w = viewpoint.point - mesh.centroids
    dist = np.linalg.norm(w, axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        val = np.einsum("ij,ij->i", mesh.normals, w) / dist
    return np.where(dist > 0, val, 0.0)


def classify_face(mesh: TriangleMesh, i: int, viewpoint, tol: float = SIDE_TOL) -> FaceSide:
    val = float(face_values(mesh, viewpoint)[i])
    if abs(val) <= tol:
        return FaceSide.DEGENERATE
    return FaceSide.FRONT if val > 0 else FaceSide.BACK


def silhouette_mask(values: np.ndarray, adj: EdgeAdjacency, tol: float = SIDE_TOL) -> np.ndarray:
    """Boolean edge mask from face values; works on (F,) or (S, F) arrays.

    Degenerate faces are resolved as front faces. Boundary edges are always in.
    """
    front = values >= -tol
    left = front[..., adj.face_left]
    right = front[..., adj.face_right]
    return (left != right) | adj.is_boundary


@dataclass(frozen=True, eq=False)
class SilhouetteResult:
    viewpoint: object
    edge_ids: np.ndarray
    n_interior: int
    n_boundary: int
    n_degenerate_faces: int
    projected_length: float | None

    @property
    def size(self) -> int:
        return len(self.edge_ids)

    def to_dict(self) -> dict:
        return {
            "viewpoint": str(self.viewpoint),
            "n_edges": self.size,
            "n_interior": self.n_interior,
            "n_boundary": self.n_boundary,
            "n_degenerate_faces": self.n_degenerate_faces,
            "projected_length": self.projected_length,
            "edge_ids": [int(e) for e in self.edge_ids],
        }


def extract_silhouette(mesh: TriangleMesh, adj: EdgeAdjacency, viewpoint,
                       tol: float = SIDE_TOL) -> SilhouetteResult:
    values = face_values(mesh, viewpoint)
    n_deg = int(np.count_nonzero(np.abs(values) <= tol))
    if n_deg:
        log.debug("%d faces coplanar with viewpoint %s", n_deg, viewpoint)
    ids = np.flatnonzero(silhouette_mask(values, adj, tol))
    n_boundary = int(np.count_nonzero(adj.is_boundary[ids]))
    length = None
    if isinstance(viewpoint, AtInfinity):
        length = _projected_length(mesh, adj, ids, viewpoint.direction)
    return SilhouetteResult(viewpoint, ids, len(ids) - n_boundary, n_boundary, n_deg, length)


def edge_vectors(mesh: TriangleMesh, adj: EdgeAdjacency) -> np.ndarray:
    v = mesh.vertices
    return v[adj.edges[:, 1]] - v[adj.edges[:, 0]]


def _projected_length(mesh, adj, ids, d) -> float:
    e = edge_vectors(mesh, adj)[ids]
    return float(np.linalg.norm(np.cross(e, d), axis=1).sum())


def projected_length(mesh: TriangleMesh, adj: EdgeAdjacency, result: SilhouetteResult, d) -> float:
    """Sum over silhouette edges of their length after projection along ``d``.

    Overlapping projections are counted once per edge, so the total carries
    multiplicity.
    """
    vp = result.viewpoint
    d = np.asarray(d, dtype=float)
    same = isinstance(vp, AtInfinity) and np.allclose(vp.direction, d / np.linalg.norm(d),
                                                      rtol=0, atol=1e-12)
    if not same:
        raise ViewpointMismatch(f"result computed for {vp}, not direction {d}")
    return _projected_length(mesh, adj, result.edge_ids, vp.direction)


def emit_svg(mesh: TriangleMesh, adj: EdgeAdjacency, result: SilhouetteResult, d=None,
             size: float = 512.0) -> bytes:
    """Line drawing of all edges (light) with silhouette edges on top (heavy)."""
    vp = result.viewpoint
    if d is None:
        if not isinstance(vp, AtInfinity):
            raise ViewpointMismatch("SVG output needs a viewpoint at infinity")
        d = vp.direction
    elif not isinstance(vp, AtInfinity) or not np.allclose(
            vp.direction, np.asarray(d, float) / np.linalg.norm(d), rtol=0, atol=1e-12):
        raise ViewpointMismatch(f"result computed for {vp}, not direction {d}")
    u, v = orthonormal_frame(vp.direction)
    # screen y grows downward
    xy = np.column_stack((mesh.vertices @ u, -(mesh.vertices @ v)))
    lo = xy.min(axis=0)
    hi = xy.max(axis=0)
    extent = max(float((hi - lo).max()), 1e-12)
    margin = 0.05 * extent
    x0, y0 = lo - margin
    w, h = (hi - lo) + 2 * margin
    w, h = max(w, 2 * margin), max(h, 2 * margin)
    light = 0.002 * extent
    heavy = 0.008 * extent

    def seg(e):
        (ax, ay), (bx, by) = xy[adj.edges[e, 0]], xy[adj.edges[e, 1]]
        return f'<line x1="{ax:.6f}" y1="{ay:.6f}" x2="{bx:.6f}" y2="{by:.6f}"/>'

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{size:.0f}" height="{size * h / w:.0f}" '
        f'viewBox="{x0:.6f} {y0:.6f} {w:.6f} {h:.6f}">',
        f'<g id="edges" stroke="#b0b0b0" stroke-width="{light:.6f}" stroke-linecap="round">',
    ]
    out += [seg(e) for e in range(adj.n_edges)]
    out.append("</g>")
    out.append(f'<g id="silhouette" stroke="#000000" stroke-width="{heavy:.6f}" '
               f'stroke-linecap="round">')
    out += [seg(e) for e in result.edge_ids]
    out.append("</g>")
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode("utf-8")
