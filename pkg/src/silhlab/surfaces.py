"""Analytic reference surfaces, all axis-aligned with the z axis through the origin.

Each surface answers vectorized closest-point queries. The returned flag marks
queries on the medial axis (sphere centre, cylinder/torus axis, torus core
circle) where the nearest point is not unique; an arbitrary nearest point is
returned for those.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidSpec

AXIS_TOL = 1e-14


@dataclass(frozen=True)
class ClosestPointResult:
    point: np.ndarray
    distance: float
    ambiguous: bool = False


def _radial(q):
    rho = np.hypot(q[:, 0], q[:, 1])
    on_axis = rho <= AXIS_TOL
    with np.errstate(invalid="ignore", divide="ignore"):
        ux = np.where(on_axis, 1.0, q[:, 0] / rho)
        uy = np.where(on_axis, 0.0, q[:, 1] / rho)
    return rho, ux, uy, on_axis


def _positive(**params):
    for name, value in params.items():
        if not (value > 0 and math.isfinite(value)):
            raise InvalidSpec(f"{name} must be positive, got {value}")


class Surface:
    has_boundary = False

    def closest_points(self, q) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(points, distances, ambiguous) for an (N, 3) query array."""
        raise NotImplementedError

    def silh_avg(self) -> float | None:
        return None

    def reach(self) -> float | None:
        """Smallest curvature radius, or None where it is zero/unbounded below."""
        return None


@dataclass(frozen=True)
class Sphere(Surface):
    radius: float = 1.0

    def __post_init__(self):
        _positive(radius=self.radius)

    def closest_points(self, q):
        q = np.asarray(q, dtype=float).reshape(-1, 3)
        norm = np.linalg.norm(q, axis=1)
        amb = norm <= AXIS_TOL
        dirs = np.where(amb[:, None], [1.0, 0.0, 0.0], q / np.where(amb, 1.0, norm)[:, None])
        p = self.radius * dirs
        return p, np.abs(norm - self.radius), amb

    def silh_avg(self):
        return 2.0 * math.pi * self.radius

    def reach(self):
        return self.radius


@dataclass(frozen=True)
class Cylinder(Surface):
    """Lateral surface rho = radius, |z| <= half_height, optionally closed by disks."""

    radius: float = 1.0
    half_height: float = 1.0
    capped: bool = True

    def __post_init__(self):
        _positive(radius=self.radius, half_height=self.half_height)

    @property
    def has_boundary(self):
        return not self.capped

    def closest_points(self, q):
        q = np.asarray(q, dtype=float).reshape(-1, 3)
        rho, ux, uy, on_axis = _radial(q)
        r, h = self.radius, self.half_height
        zl = np.clip(q[:, 2], -h, h)
        lateral = np.column_stack((r * ux, r * uy, zl))
        best = lateral
        dist = np.linalg.norm(q - lateral, axis=1)
        amb = on_axis.copy()
        if self.capped:
            rc = np.minimum(rho, r)
            for zc in (h, -h):
                cap = np.column_stack((rc * ux, rc * uy, np.full(len(q), zc)))
                dc = np.linalg.norm(q - cap, axis=1)
                closer = dc < dist
                tie = np.isclose(dc, dist, rtol=0, atol=1e-15)
                best = np.where(closer[:, None], cap, best)
                dist = np.where(closer, dc, dist)
                # on the axis the cap point is unique unless the lateral side ties
                amb = np.where(closer, False, amb) | (tie & ~on_axis & (rho < r))
        return best, dist, amb

    def reach(self):
        return self.radius


@dataclass(frozen=True)
class OpenCylinderSection(Cylinder):
    """Uncapped lateral surface; its two rim circles form the boundary."""

    capped: bool = False

    def __post_init__(self):
        super().__post_init__()
        if self.capped:
            raise InvalidSpec("an open cylinder section has no caps")


@dataclass(frozen=True)
class Torus(Surface):
    major_radius: float = 2.0
    minor_radius: float = 0.5

    def __post_init__(self):
        _positive(major_radius=self.major_radius, minor_radius=self.minor_radius)
        if not self.major_radius > self.minor_radius:
            raise InvalidSpec("torus needs major_radius > minor_radius")

    def closest_points(self, q):
        q = np.asarray(q, dtype=float).reshape(-1, 3)
        rho, ux, uy, on_axis = _radial(q)
        core = np.column_stack((self.major_radius * ux, self.major_radius * uy,
                                np.zeros(len(q))))
        w = q - core
        wn = np.linalg.norm(w, axis=1)
        on_core = wn <= AXIS_TOL
        wdir = np.where(on_core[:, None], np.column_stack((ux, uy, np.zeros(len(q)))),
                        w / np.where(on_core, 1.0, wn)[:, None])
        p = core + self.minor_radius * wdir
        return p, np.abs(wn - self.minor_radius), on_axis | on_core

    def reach(self):
        return min(self.minor_radius, self.major_radius - self.minor_radius)


@dataclass(frozen=True)
class SaucerDisk(Surface):
    """Graph of z = rho**(2*exponent) over the disk rho <= radial_extent.

    With the default exponent 1/8 this is z = (x^2 + y^2)^(1/8), whose apex has
    unbounded curvature. It is bounded by the rim circle at rho = radial_extent.
    """

    radial_extent: float = 1.0
    exponent: float = 0.125
    scan_points: int = 257
    newton_iters: int = 60
    tol: float = 1e-10

    has_boundary = True

    def __post_init__(self):
        _positive(radial_extent=self.radial_extent, exponent=self.exponent)

    def _power(self):
        # profile z = t**k with t = rho; parametrize t = s**m, z = s, m = 1/k
        return 1.0 / (2.0 * self.exponent)

    def profile(self, rho):
        return np.asarray(rho, dtype=float) ** (2.0 * self.exponent)

    def closest_points(self, q):
        q = np.asarray(q, dtype=float).reshape(-1, 3)
        rho, ux, uy, on_axis = _radial(q)
        with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
            s = self._solve(rho, q[:, 2])
        t = s ** self._power()
        p = np.column_stack((t * ux, t * uy, s))
        # above the apex the nearest set is a whole circle unless it is the apex itself
        return p, np.linalg.norm(q - p, axis=1), on_axis & (t > 0)

    def _solve(self, rho, zq):
        """Minimize the squared meridian distance over the profile parameter s = z."""
        m = self._power()
        smax = self.radial_extent ** (1.0 / m)

        def g(s):
            return (s ** m - rho[:, None]) ** 2 + (s - zq[:, None]) ** 2

        def dg(s):
            return 2.0 * m * s ** (m - 1) * (s ** m - rho) + 2.0 * (s - zq)

        def ddg(s):
            return (2.0 * m * (m - 1) * s ** (m - 2) * (s ** m - rho)
                    + 2.0 * m * m * s ** (2 * m - 2) + 2.0)

        grid = np.linspace(0.0, smax, self.scan_points)
        k = np.argmin(g(grid[None, :]), axis=1)
        lo = grid[np.maximum(k - 1, 0)]
        hi = grid[np.minimum(k + 1, len(grid) - 1)]
        s = grid[k]
        # guarded Newton on g' = 0 inside [lo, hi]; bisect when a step leaves the bracket
        dlo = dg(lo)
        for _ in range(self.newton_iters):
            d1 = dg(s)
            d2 = ddg(s)
            left_side = np.sign(d1) == np.sign(dlo)
            lo = np.where(left_side, s, lo)
            dlo = np.where(left_side, d1, dlo)
            hi = np.where(left_side, hi, s)
            step = np.where(d2 > 0, s - d1 / d2, np.nan)
            ok = (step > lo) & (step < hi)
            s_new = np.where(ok, step, 0.5 * (lo + hi))
            done = np.all(np.abs(s_new - s) <= self.tol)
            s = s_new
            if done:
                break
        cands = np.column_stack((s, np.zeros_like(s), np.full_like(s, smax)))
        return cands[np.arange(len(s)), np.argmin(g(cands), axis=1)]


SURFACE_KINDS = {
    "sphere": Sphere,
    "cylinder": Cylinder,
    "cylsec": OpenCylinderSection,
    "torus": Torus,
    "saucer": SaucerDisk,
}


def closest_point(surface: Surface, q) -> ClosestPointResult:
    p, d, amb = surface.closest_points(np.asarray(q, dtype=float).reshape(1, 3))
    return ClosestPointResult(p[0], float(d[0]), bool(amb[0]))


def silhouette_avg_length(surface: Surface) -> float | None:
    """Average projected silhouette length over directions at infinity, if known."""
    return surface.silh_avg()


def _flag(text):
    if text.lower() in ("1", "true", "yes", "on"):
        return True
    if text.lower() in ("0", "false", "no", "off"):
        return False
    raise InvalidSpec(f"bad boolean {text!r}")


def parse_surface(text: str) -> Surface:
    """Parse strings such as ``sphere:r=1`` or ``torus:R=2,r=0.5``.

    For cylinders ``h`` is the full height, so ``cylinder:r=1,h=2`` spans
    ``-1 <= z <= 1``.
    """
    kind, _, rest = text.strip().partition(":")
    if kind not in SURFACE_KINDS:
        raise InvalidSpec(f"unknown surface kind {kind!r}")
    params = {}
    for item in filter(None, rest.split(",")):
        key, eq, value = item.partition("=")
        if not eq:
            raise InvalidSpec(f"expected key=value in {text!r}")
        params[key.strip()] = value.strip()
    allowed = {"sphere": {"r"}, "cylinder": {"r", "h", "caps"}, "cylsec": {"r", "h"},
               "torus": {"R", "r"}, "saucer": {"rext"}}[kind]
    if set(params) - allowed:
        raise InvalidSpec(f"unknown parameters {sorted(set(params) - allowed)} in {text!r}")
    try:
        if kind == "sphere":
            return Sphere(float(params.get("r", 1.0)))
        if kind == "torus":
            return Torus(float(params.get("R", 2.0)), float(params.get("r", 0.5)))
        if kind == "saucer":
            return SaucerDisk(float(params.get("rext", 1.0)))
        r = float(params.get("r", 1.0))
        half = float(params.get("h", 2.0)) / 2.0
        if kind == "cylsec":
            return OpenCylinderSection(r, half)
        return Cylinder(r, half, _flag(params.get("caps", "true")))
    except ValueError as exc:
        if isinstance(exc, InvalidSpec):
            raise
        raise InvalidSpec(f"bad surface spec {text!r}: {exc}") from None
