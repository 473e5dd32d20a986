"""Exterior dihedral angles, the exact expected silhouette size, and Monte-Carlo estimators.

For a direction drawn uniformly on the sphere an interior edge with exterior
dihedral angle theta lies on the silhouette with probability theta/pi; boundary
edges always do. Summing gives the exact expectation

    E = n_boundary + (1/pi) * sum(theta_e).

The Monte-Carlo side draws viewpoints in fixed-size blocks (see
``geom.block_rng``), so the estimate is the same for any thread count.
"""

from __future__ import annotations

import json
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import BoundaryEdge, InvalidSampleCount
from .geom import (BLOCK_SIZE, angle_between, as_vector, block_layout, block_rng,
                   sample_ball_uniform, sample_direction_uniform)
from .mesh import EdgeAdjacency, TriangleMesh
from .silhouette import SIDE_TOL, silhouette_mask

log = logging.getLogger(__name__)

# cap on (viewpoints x edges) booleans held at once
_CHUNK_CELLS = 1 << 22


def default_threads() -> int:
    env = os.environ.get("SILHLAB_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass(frozen=True)
class AtInfinityUniform:
    def __str__(self):
        return "inf"


@dataclass(frozen=True)
class BallUniform:
    center: tuple[float, float, float] = (0.0, 0.0, 0.0)
    radius: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in as_vector(self.center)))
        if not self.radius > 0:
            raise ValueError("ball radius must be positive")

    def __str__(self):
        return "ball:" + ",".join(repr(c) for c in (*self.center, float(self.radius)))


class Estimate(NamedTuple):
    value: float
    std_error: float


@dataclass(frozen=True)
class EdgeAngleTable:
    """theta per edge; NaN marks boundary edges."""

    theta: np.ndarray
    is_boundary: np.ndarray


@dataclass(frozen=True)
class ExpectationReport:
    exact_expected: float | None
    mc_mean: float
    mc_std_error: float
    samples: int
    seed: int
    viewpoint_model: AtInfinityUniform | BallUniform
    n_degenerate_samples: int = 0

    def to_dict(self) -> dict:
        return {
            "model": str(self.viewpoint_model),
            "samples": self.samples,
            "seed": self.seed,
            "exact": self.exact_expected,
            "mc_mean": self.mc_mean,
            "mc_std_error": self.mc_std_error,
        }

    def to_json(self) -> bytes:
        return (json.dumps(self.to_dict(), indent=2) + "\n").encode()


# --- exact side ------------------------------------------------------------------

def dihedral_angles(mesh: TriangleMesh, adj: EdgeAdjacency) -> EdgeAngleTable:
    n = mesh.normals
    theta = np.full(adj.n_edges, np.nan)
    i = adj.interior
    a, b = n[adj.face_left[i]], n[adj.face_right[i]]
    theta[i] = np.arctan2(np.linalg.norm(np.cross(a, b), axis=1), np.einsum("ij,ij->i", a, b))
    return EdgeAngleTable(theta, adj.is_boundary.copy())


def exterior_dihedral(mesh: TriangleMesh, adj: EdgeAdjacency, edge: int) -> float:
    """Angle between the two consistently oriented normals of an interior edge.

    Convex and reflex edges are not distinguished: the set of separating
    directions has measure 4*theta either way.
    """
    if adj.is_boundary[edge]:
        raise BoundaryEdge(f"edge {edge} has a single face")
    return angle_between(mesh.normals[adj.face_left[edge]], mesh.normals[adj.face_right[edge]])


def exact_expected_silhouette(mesh: TriangleMesh, adj: EdgeAdjacency) -> float:
    theta = dihedral_angles(mesh, adj).theta
    return adj.n_boundary + float(np.nansum(theta)) / math.pi


# --- Monte Carlo ----------------------------------------------------------------

@dataclass
class _Outcome:
    counts: np.ndarray
    lengths: np.ndarray | None
    edge_hits: np.ndarray | None
    n_degenerate: int


def _point_on_face(mesh, p, f, tol):
    a, b, c = mesh.corners[f]
    n = mesh.normals[f]
    if abs(float(n @ (p - a))) > tol:
        return False
    # barycentric sign test in the face plane
    for u, w in ((a, b), (b, c), (c, a)):
        if float(np.cross(w - u, p - u) @ n) < -tol:
            return False
    return True


def _draw(model, rng, k):
    if isinstance(model, AtInfinityUniform):
        return sample_direction_uniform(rng, k)
    return sample_ball_uniform(model.center, model.radius, rng, k)


def _face_values(mesh, model, pts, tol):
    if isinstance(model, AtInfinityUniform):
        return pts @ mesh.normals.T
    nc = np.einsum("ij,ij->i", mesh.normals, mesh.centroids)
    raw = pts @ mesh.normals.T - nc
    sq = ((pts * pts).sum(1)[:, None] + (mesh.centroids ** 2).sum(1)[None, :]
          - 2.0 * pts @ mesh.centroids.T)
    dist = np.sqrt(np.maximum(sq, 0.0))
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(dist > 0, raw / dist, 0.0)


def _block(mesh, adj, model, seed, block, k, want_len, want_edges, tol, block_size):
    rng = block_rng(seed, block)
    pts = _draw(model, rng, block_size)[:k]
    if isinstance(model, BallUniform):
        # a viewpoint lying on the surface is redrawn (probability zero in practice)
        scale = max(1.0, model.radius)
        for _ in range(100):
            vals = _face_values(mesh, model, pts, tol)
            bad = np.zeros(k, dtype=bool)
            for s, f in zip(*np.nonzero(np.abs(vals) <= tol)):
                if not bad[s] and _point_on_face(mesh, pts[s], f, tol * scale):
                    bad[s] = True
            if not bad.any():
                break
            log.info("redrawing %d viewpoints on the mesh surface", int(bad.sum()))
            pts[bad] = _draw(model, rng, int(bad.sum()))
    counts = np.empty(k, dtype=np.int64)
    lengths = np.empty(k) if want_len else None
    hits = np.zeros(adj.n_edges, dtype=np.int64) if want_edges else None
    if want_len:
        v = mesh.vertices
        evec = v[adj.edges[:, 1]] - v[adj.edges[:, 0]]
        l2 = adj.lengths ** 2
    step = max(1, _CHUNK_CELLS // max(1, adj.n_edges, mesh.n_faces))
    n_deg = 0
    for s in range(0, k, step):
        p = pts[s:s + step]
        vals = _face_values(mesh, model, p, tol)
        n_deg += int(np.count_nonzero((np.abs(vals) <= tol).any(axis=1)))
        mask = silhouette_mask(vals, adj, tol)
        counts[s:s + step] = mask.sum(axis=1)
        if want_edges:
            hits += mask.sum(axis=0)
        if want_len:
            along = p @ evec.T
            proj = np.sqrt(np.maximum(l2[None, :] - along * along, 0.0))
            lengths[s:s + step] = np.where(mask, proj, 0.0).sum(axis=1)
    return counts, lengths, hits, n_deg


def _simulate(mesh, adj, model, samples, seed, threads=None, want_len=False,
              want_edges=False, tol=SIDE_TOL, block_size=BLOCK_SIZE) -> _Outcome:
    if samples < 2:
        raise InvalidSampleCount(f"need at least 2 samples, got {samples}")
    if want_len and not isinstance(model, AtInfinityUniform):
        raise ValueError("projected length is defined for viewpoints at infinity only")
    layout = block_layout(samples, block_size)
    threads = threads or default_threads()

    def job(bk):
        return _block(mesh, adj, model, seed, bk[0], bk[1], want_len, want_edges, tol,
                      block_size)

    if threads > 1 and len(layout) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(job, layout))
    else:
        parts = [job(bk) for bk in layout]
    counts = np.concatenate([p[0] for p in parts])
    lengths = np.concatenate([p[1] for p in parts]) if want_len else None
    hits = None
    if want_edges:
        hits = np.zeros(adj.n_edges, dtype=np.int64)
        for p in parts:
            hits += p[2]
    n_deg = sum(p[3] for p in parts)
    if n_deg:
        log.info("%d of %d viewpoints had a face coplanar within tolerance", n_deg, samples)
    return _Outcome(counts, lengths, hits, n_deg)


def _mean_se(x) -> Estimate:
    x = np.asarray(x, dtype=float)
    return Estimate(float(x.mean()), float(x.std(ddof=1) / math.sqrt(len(x))))


def mc_expected_silhouette(mesh: TriangleMesh, adj: EdgeAdjacency, model=AtInfinityUniform(),
                           samples: int = 10000, seed: int = 0,
                           threads: int | None = None) -> ExpectationReport:
    out = _simulate(mesh, adj, model, samples, seed, threads)
    mean, se = _mean_se(out.counts)
    exact = exact_expected_silhouette(mesh, adj) if isinstance(model, AtInfinityUniform) else None
    return ExpectationReport(exact, mean, se, samples, seed, model, out.n_degenerate)


def mc_expected_silhouette_length(mesh: TriangleMesh, adj: EdgeAdjacency, samples: int = 10000,
                                  seed: int = 0, threads: int | None = None) -> Estimate:
    out = _simulate(mesh, adj, AtInfinityUniform(), samples, seed, threads, want_len=True)
    return _mean_se(out.lengths)


def mc_count_and_length(mesh: TriangleMesh, adj: EdgeAdjacency, samples: int = 10000,
                        seed: int = 0, threads: int | None = None) -> tuple[Estimate, Estimate]:
    """Silhouette size and projected length estimated from one shared direction sample."""
    out = _simulate(mesh, adj, AtInfinityUniform(), samples, seed, threads, want_len=True)
    return _mean_se(out.counts), _mean_se(out.lengths)


def edge_frequencies(mesh: TriangleMesh, adj: EdgeAdjacency, model=AtInfinityUniform(),
                     samples: int = 10000, seed: int = 0,
                     threads: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Empirical per-edge silhouette frequency and its binomial standard error."""
    out = _simulate(mesh, adj, model, samples, seed, threads, want_edges=True)
    freq = out.edge_hits / samples
    se = np.sqrt(freq * (1.0 - freq) / samples)
    return freq, se


def edge_silhouette_probability(mesh: TriangleMesh, adj: EdgeAdjacency, edge: int,
                                model=AtInfinityUniform(), samples: int = 10000,
                                seed: int = 0) -> Estimate:
    """Probability that ``edge`` is on the silhouette.

    Exact (theta/pi, zero error) at infinity; for a ball of viewpoints an
    empirical frequency with its standard error. Boundary edges give exactly 1.
    """
    if adj.is_boundary[edge]:
        return Estimate(1.0, 0.0)
    if isinstance(model, AtInfinityUniform):
        return Estimate(exterior_dihedral(mesh, adj, edge) / math.pi, 0.0)
    freq, se = edge_frequencies(mesh, adj, model, samples, seed)
    return Estimate(float(freq[edge]), float(se[edge]))


def parse_model(text: str | None):
    """``inf`` (default) or ``ball:cx,cy,cz,r``."""
    if not text or text == "inf":
        return AtInfinityUniform()
    kind, _, rest = text.partition(":")
    vals = [float(v) for v in rest.split(",")] if rest else []
    if kind != "ball" or len(vals) != 4:
        raise ValueError(f"bad viewpoint model {text!r}; expected inf or ball:cx,cy,cz,r")
    return BallUniform(tuple(vals[:3]), vals[3])
