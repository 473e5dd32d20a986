"""Witness constants for the four approximation hypotheses, and family certificates.

For a mesh with n faces approximating a surface S:

    H1  every edge has length >= alpha / sqrt(n)      alpha_n  = min l_e * sqrt(n)
    H2  d(x, S) < beta * h(x) / sqrt(n)               beta_n   = max d * sqrt(n) / h
    H3  faces are fat                                 fatness  = min height / longest edge
    H4  d(x, S) < gamma / n                           gamma_n  = max d * n

``d(x, S)`` is the distance to the closest surface point, standing in for the
abstract homeomorphism onto S. ``h(x)`` is the smallest height of the
triangles containing x. Suprema are taken over a barycentric grid per face.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DegenerateFace, InsufficientReports
from .mesh import TriangleMesh
from .surfaces import Surface


@dataclass(frozen=True)
class HypothesisReport:
    n: int
    alpha_n: float
    beta_n: float
    gamma_n: float
    fatness_n: float
    grid_depth: int
    max_distance: float
    min_h_sqrt_n: float
    # set when the closest-point map may fold (distance beyond half the surface reach)
    caveat: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class CertifyConfig:
    alpha_floor: float = 0.1
    fatness_floor: float = 0.2
    slack: float = 1.25


@dataclass(frozen=True)
class FamilyCertificate:
    reports: list[HypothesisReport]
    alpha_inf: float
    beta_sup: float
    gamma_sup: float
    fatness_inf: float
    verdict: str
    failed_hypothesis: int | None = None
    witness_n: int | None = None
    reasons: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict == "PASS"

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "failed_hypothesis": self.failed_hypothesis,
            "witness_n": self.witness_n,
            "reasons": list(self.reasons),
            "alpha_inf": self.alpha_inf,
            "beta_sup": self.beta_sup,
            "gamma_sup": self.gamma_sup,
            "fatness_inf": self.fatness_inf,
            "reports": [r.to_dict() for r in self.reports],
        }


def barycentric_grid(depth: int) -> np.ndarray:
    """All (i, j, k)/depth with i + j + k = depth; (depth+1)(depth+2)/2 rows."""
    rows = [(i, j, depth - i - j) for i in range(depth + 1) for j in range(depth + 1 - i)]
    return np.array(rows, dtype=float) / depth


def sample_heights(mesh: TriangleMesh, grid: np.ndarray) -> np.ndarray:
    """h(x) for every (face, grid point): min smallest height over incident faces."""
    h_face = mesh.heights
    nf = mesh.n_faces
    h_vert = np.full(mesh.n_vertices, np.inf)
    np.minimum.at(h_vert, mesh.faces.reshape(-1), np.repeat(h_face, 3))

    adj = mesh.adjacency
    h_edge = h_face[adj.face_left].copy()
    inner = adj.interior
    h_edge[inner] = np.minimum(h_edge[inner], h_face[adj.face_right[inner]])
    # look up edge ids for each face side (side s joins corners s and s+1)
    a = mesh.faces
    b = mesh.faces[:, [1, 2, 0]]
    key_e = adj.edges[:, 0] * mesh.n_vertices + adj.edges[:, 1]
    key_f = np.minimum(a, b) * mesh.n_vertices + np.maximum(a, b)
    side_edge = np.searchsorted(key_e, key_f)

    out = np.repeat(h_face[:, None], len(grid), axis=1)
    zero = grid == 0.0
    nz = (~zero).sum(axis=1)
    for g in range(len(grid)):
        if nz[g] == 1:
            corner = int(np.argmax(grid[g]))
            out[:, g] = h_vert[a[:, corner]]
        elif nz[g] == 2:
            missing = int(np.argmax(zero[g]))
            # the side opposite corner c joins corners c+1 and c+2, i.e. side (c+1) % 3
            out[:, g] = h_edge[side_edge[np.arange(nf), (missing + 1) % 3]]
    return out


def measure_hypotheses(mesh: TriangleMesh, surface: Surface, grid_depth: int = 4) -> HypothesisReport:
    if grid_depth < 1:
        raise ValueError("grid_depth must be >= 1")
    if len(mesh.degenerate_faces):
        raise DegenerateFace(f"face {int(mesh.degenerate_faces[0])} has (near) zero area")
    n = mesh.n_faces
    sqrt_n = math.sqrt(n)
    grid = barycentric_grid(grid_depth)
    pts = np.einsum("gk,fkd->fgd", grid, mesh.corners)
    _, dist, _ = surface.closest_points(pts.reshape(-1, 3))
    dist = dist.reshape(n, len(grid))
    h = sample_heights(mesh, grid)
    reach = surface.reach()
    max_d = float(dist.max())
    return HypothesisReport(
        n=n,
        alpha_n=float(mesh.adjacency.lengths.min() * sqrt_n),
        beta_n=float((dist * sqrt_n / h).max()),
        gamma_n=max_d * n,
        fatness_n=float((mesh.heights / mesh.side_lengths.max(axis=1)).min()),
        grid_depth=grid_depth,
        max_distance=max_d,
        min_h_sqrt_n=float(h.min() * sqrt_n),
        caveat=reach is None or max_d > 0.5 * reach,
    )


def _grows(xs, slack):
    a, b, c = xs[-3:]
    return a < b < c and c > slack * a


def _shrinks(xs, slack):
    a, b, c = xs[-3:]
    return a > b > c and c * slack < a


def certify_family(reports, config: CertifyConfig = CertifyConfig()) -> FamilyCertificate:
    """Decide whether uniform constants plausibly exist across a refinement family.

    A finite family cannot prove a limit, so "bounded" means: floors respected
    and no strictly monotone drift beyond ``config.slack`` over the last three
    members. Hypotheses are checked in the order 1, 3, 4, 2 (H2 is implied by
    the other three, so the primitive causes are named first).
    """
    reports = list(reports)
    if len(reports) < 3:
        raise InsufficientReports(f"need at least 3 reports, got {len(reports)}")
    ns = [r.n for r in reports]
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise InsufficientReports("reports must have strictly increasing n")
    alpha = [r.alpha_n for r in reports]
    beta = [r.beta_n for r in reports]
    gamma = [r.gamma_n for r in reports]
    fat = [r.fatness_n for r in reports]
    s = config.slack

    failures = []
    if min(alpha) < config.alpha_floor:
        failures.append((1, ns[int(np.argmin(alpha))], f"alpha_n {min(alpha):.4g} below floor"))
    elif _shrinks(alpha, s):
        failures.append((1, ns[-1], "alpha_n decreasing towards 0"))
    if min(fat) < config.fatness_floor:
        failures.append((3, ns[int(np.argmin(fat))], f"fatness {min(fat):.4g} below floor"))
    elif _shrinks(fat, s):
        failures.append((3, ns[-1], "fatness decreasing towards 0"))
    if not all(map(math.isfinite, gamma)) or _grows(gamma, s):
        failures.append((4, ns[-1], "gamma_n growing without bound"))
    if not all(map(math.isfinite, beta)) or _grows(beta, s):
        failures.append((2, ns[-1], "beta_n growing without bound"))

    verdict, hyp, wn = "PASS", None, None
    if failures:
        hyp, wn, _ = failures[0]
        verdict = f"FAIL(H{hyp}, n={wn})"
    return FamilyCertificate(
        reports=reports,
        alpha_inf=min(alpha),
        beta_sup=max(beta),
        gamma_sup=max(gamma),
        fatness_inf=min(fat),
        verdict=verdict,
        failed_hypothesis=hyp,
        witness_n=wn,
        reasons=[f"H{h} at n={w}: {why}" for h, w, why in failures],
    )


REPORT_COLUMNS = ("n", "alpha_n", "beta_n", "gamma_n", "fatness_n")


def reports_to_csv(reports) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    for r in reports:
        w.writerow([r.n] + [format(getattr(r, c), ".17g") for c in REPORT_COLUMNS[1:]])
    return buf.getvalue().encode()


def certificate_to_json(cert: FamilyCertificate) -> bytes:
    return (json.dumps(cert.to_dict(), indent=2) + "\n").encode()
