"""Mesh families paired with the analytic surface they approximate."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidSpec
from .mesh import TriangleMesh
from .surfaces import Cylinder, OpenCylinderSection, SaucerDisk, Sphere, Surface


@dataclass(frozen=True)
class Icosphere:
    level: int

    def validate(self):
        if self.level < 0:
            raise InvalidSpec("icosphere level must be >= 0")

    @property
    def face_count(self):
        return 20 * 4 ** self.level

    def __str__(self):
        return f"icosphere:{self.level}"


@dataclass(frozen=True)
class UVSphere:
    n_lat: int
    n_lon: int

    def validate(self):
        if self.n_lat < 2 or self.n_lon < 3:
            raise InvalidSpec("uvsphere needs n_lat >= 2 and n_lon >= 3")

    @property
    def face_count(self):
        return 2 * self.n_lon * (self.n_lat - 1)

    def __str__(self):
        return f"uvsphere:{self.n_lat},{self.n_lon}"


@dataclass(frozen=True)
class CylinderUniform:
    slices: int
    rings: int
    capped: bool = False

    def validate(self):
        if self.slices < 3 or self.rings < 1:
            raise InvalidSpec("cylinder needs slices >= 3 and rings >= 1")

    @property
    def face_count(self):
        return 2 * self.slices * self.rings + (2 * self.slices if self.capped else 0)

    def __str__(self):
        return f"cyl:{self.slices},{self.rings}" + (",caps" if self.capped else "")


@dataclass(frozen=True)
class OpenCylinder:
    slices: int
    rings: int

    def validate(self):
        if self.slices < 3 or self.rings < 1:
            raise InvalidSpec("cylinder section needs slices >= 3 and rings >= 1")

    @property
    def face_count(self):
        return 2 * self.slices * self.rings

    def __str__(self):
        return f"cylsec:{self.slices},{self.rings}"


@dataclass(frozen=True)
class SchwarzLantern:
    k: int
    m: int

    def validate(self):
        if self.k < 3 or self.m < 1:
            raise InvalidSpec("lantern needs k >= 3 and m >= 1")

    @property
    def face_count(self):
        return 2 * self.k * self.m

    def __str__(self):
        return f"lantern:{self.k},{self.m}"


@dataclass(frozen=True)
class CylinderStrips:
    strips: int

    def validate(self):
        if self.strips < 2:
            raise InvalidSpec("strips needs at least 2 strips")

    @property
    def face_count(self):
        return 4 * self.strips

    def __str__(self):
        return f"strips:{self.strips}"


@dataclass(frozen=True)
class SaucerGrid:
    rings: int
    sectors: int

    def validate(self):
        if self.rings < 1 or self.sectors < 3:
            raise InvalidSpec("saucer needs rings >= 1 and sectors >= 3")

    @property
    def face_count(self):
        return self.sectors * (2 * self.rings - 1)

    def __str__(self):
        return f"saucer:{self.rings},{self.sectors}"


FamilySpec = (Icosphere | UVSphere | CylinderUniform | OpenCylinder | SchwarzLantern
              | CylinderStrips | SaucerGrid)


# --- constructions ------------------------------------------------------------

def _icosahedron():
    t = (1.0 + math.sqrt(5.0)) / 2.0
    v = np.array([
        [-1, t, 0], [1, t, 0], [-1, -t, 0], [1, -t, 0],
        [0, -1, t], [0, 1, t], [0, -1, -t], [0, 1, -t],
        [t, 0, -1], [t, 0, 1], [-t, 0, -1], [-t, 0, 1],
    ], dtype=float)
    f = np.array([
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ], dtype=np.int64)
    return v / np.linalg.norm(v, axis=1, keepdims=True), f


def _subdivide(v, f):
    """Split every triangle into four through edge midpoints, projected to the sphere."""
    edges = np.sort(np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]]), axis=1)
    uniq, inv = np.unique(edges, axis=0, return_inverse=True)
    inv = inv.reshape(-1)
    mid = v[uniq[:, 0]] + v[uniq[:, 1]]
    mid /= np.linalg.norm(mid, axis=1, keepdims=True)
    n = len(f)
    base = len(v)
    m01 = base + inv[:n]
    m12 = base + inv[n:2 * n]
    m20 = base + inv[2 * n:]
    a, b, c = f[:, 0], f[:, 1], f[:, 2]
    nf = np.concatenate([
        np.column_stack((a, m01, m20)),
        np.column_stack((b, m12, m01)),
        np.column_stack((c, m20, m12)),
        np.column_stack((m01, m12, m20)),
    ])
    return np.vstack((v, mid)), nf


def _icosphere(level):
    v, f = _icosahedron()
    for _ in range(level):
        v, f = _subdivide(v, f)
    return v, f


def _uvsphere(n_lat, n_lon):
    lat = np.pi * np.arange(1, n_lat) / n_lat
    lon = 2 * np.pi * np.arange(n_lon) / n_lon
    st, ct = np.sin(lat), np.cos(lat)
    ring = np.stack([np.outer(st, np.cos(lon)), np.outer(st, np.sin(lon)),
                     np.outer(ct, np.ones(n_lon))], axis=-1).reshape(-1, 3)
    v = np.vstack(([0, 0, 1], ring, [0, 0, -1]))
    south = len(v) - 1

    def idx(i, j):
        return 1 + i * n_lon + (j % n_lon)

    faces = []
    for j in range(n_lon):
        faces.append((0, idx(0, j), idx(0, j + 1)))
    for i in range(n_lat - 2):
        for j in range(n_lon):
            a, b = idx(i, j), idx(i, j + 1)
            c, d = idx(i + 1, j), idx(i + 1, j + 1)
            faces.append((a, c, d))
            faces.append((a, d, b))
    for j in range(n_lon):
        faces.append((south, idx(n_lat - 2, j + 1), idx(n_lat - 2, j)))
    return v, np.array(faces, dtype=np.int64)


def _tube(slices, rings, capped, radius=1.0, half_height=1.0):
    phi = 2 * np.pi * np.arange(slices) / slices
    z = np.linspace(-half_height, half_height, rings + 1)
    v = np.stack([np.tile(radius * np.cos(phi), rings + 1),
                  np.tile(radius * np.sin(phi), rings + 1),
                  np.repeat(z, slices)], axis=1)
    faces = []
    for i in range(rings):
        for j in range(slices):
            a = i * slices + j
            b = i * slices + (j + 1) % slices
            c, d = a + slices, b + slices
            # (a, b, c): +phi then +z, right-hand rule gives the outward radial normal
            faces.append((a, b, d))
            faces.append((a, d, c))
    if capped:
        bottom = len(v)
        top = bottom + 1
        v = np.vstack((v, [0, 0, -half_height], [0, 0, half_height]))
        for j in range(slices):
            j1 = (j + 1) % slices
            faces.append((bottom, j1, j))
            faces.append((top, rings * slices + j, rings * slices + j1))
    return v, np.array(faces, dtype=np.int64)


def _lantern(k, m, radius=1.0, half_height=1.0):
    """m+1 rings of k vertices; ring i is rotated by i*pi/k (antiprism bands)."""
    i = np.arange(m + 1)[:, None]
    j = np.arange(k)[None, :]
    ang = 2 * np.pi * j / k + np.pi * i / k
    z = np.broadcast_to(np.linspace(-half_height, half_height, m + 1)[:, None], ang.shape)
    v = np.stack([radius * np.cos(ang), radius * np.sin(ang), z], axis=-1).reshape(-1, 3)
    faces = []
    for a in range(m):
        for b in range(k):
            p0 = a * k + b
            p1 = a * k + (b + 1) % k
            q0 = (a + 1) * k + b
            q1 = (a + 1) * k + (b + 1) % k
            # ring a+1 vertex b sits angularly between ring a vertices b and b+1
            faces.append((p0, p1, q0))
            faces.append((q0, p1, q1))
    return v, np.array(faces, dtype=np.int64)


def _strips(s):
    """Zig-zag folded tube: 2s axial fold lines alternating between radius 1 +- 0.5/s.

    Each strip between neighbouring fold lines is one planar quad spanning the
    full height, split by a diagonal. Every axial edge keeps a fold angle bounded
    below independently of s.
    """
    n = 2 * s
    phi = 2 * np.pi * np.arange(n) / n
    r = 1.0 + 0.5 / s * np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    bottom = np.column_stack((r * np.cos(phi), r * np.sin(phi), -np.ones(n)))
    top = bottom.copy()
    top[:, 2] = 1.0
    v = np.vstack((bottom, top))
    faces = []
    for j in range(n):
        a, b = j, (j + 1) % n
        faces.append((a, b, b + n))
        faces.append((a, b + n, a + n))
    return v, np.array(faces, dtype=np.int64)


def _saucer(rings, sectors, rext=1.0, exponent=0.125):
    """Polar grid on z = rho**(2*exponent): apex fan plus quad bands, equal radial steps."""
    rho = rext * np.arange(1, rings + 1) / rings
    phi = 2 * np.pi * np.arange(sectors) / sectors
    ring = np.stack([np.outer(rho, np.cos(phi)), np.outer(rho, np.sin(phi)),
                     np.outer(rho ** (2 * exponent), np.ones(sectors))], axis=-1).reshape(-1, 3)
    v = np.vstack(([0, 0, 0], ring))
    faces = []
    for j in range(sectors):
        faces.append((0, 1 + j, 1 + (j + 1) % sectors))
    for i in range(rings - 1):
        for j in range(sectors):
            a = 1 + i * sectors + j
            b = 1 + i * sectors + (j + 1) % sectors
            c, d = a + sectors, b + sectors
            faces.append((a, c, d))
            faces.append((a, d, b))
    return v, np.array(faces, dtype=np.int64)


def generate(spec: FamilySpec) -> tuple[TriangleMesh, Surface]:
    spec.validate()
    if isinstance(spec, Icosphere):
        v, f = _icosphere(spec.level)
        surface = Sphere(1.0)
    elif isinstance(spec, UVSphere):
        v, f = _uvsphere(spec.n_lat, spec.n_lon)
        surface = Sphere(1.0)
    elif isinstance(spec, CylinderUniform):
        v, f = _tube(spec.slices, spec.rings, spec.capped)
        surface = Cylinder(1.0, 1.0, capped=spec.capped)
    elif isinstance(spec, OpenCylinder):
        v, f = _tube(spec.slices, spec.rings, False)
        surface = OpenCylinderSection(1.0, 1.0)
    elif isinstance(spec, SchwarzLantern):
        v, f = _lantern(spec.k, spec.m)
        surface = OpenCylinderSection(1.0, 1.0)
    elif isinstance(spec, CylinderStrips):
        v, f = _strips(spec.strips)
        surface = OpenCylinderSection(1.0, 1.0)
    elif isinstance(spec, SaucerGrid):
        v, f = _saucer(spec.rings, spec.sectors)
        surface = SaucerDisk(1.0)
    else:
        raise InvalidSpec(f"unknown family spec {spec!r}")
    return TriangleMesh(v, f), surface


def _ints(text, lo, hi, spec):
    parts = [p for p in text.split(",") if p]
    if not lo <= len(parts) <= hi:
        raise InvalidSpec(f"wrong number of parameters in {spec!r}")
    try:
        return [int(p) for p in parts]
    except ValueError:
        raise InvalidSpec(f"bad integer in {spec!r}") from None


def parse_family(text: str) -> FamilySpec:
    """Parse ``icosphere:L``, ``uvsphere:LAT,LON``, ``cyl:S,R[,caps]``, ``cylsec:S,R``,
    ``lantern:K,M``, ``strips:S`` or ``saucer:RINGS,SECTORS``."""
    kind, _, rest = text.strip().partition(":")
    if kind == "cyl":
        parts = rest.split(",")
        capped = parts[-1] == "caps"
        if capped:
            parts = parts[:-1]
        s, r = _ints(",".join(parts), 2, 2, text)
        spec = CylinderUniform(s, r, capped)
    elif kind == "icosphere":
        spec = Icosphere(*_ints(rest, 1, 1, text))
    elif kind == "uvsphere":
        spec = UVSphere(*_ints(rest, 2, 2, text))
    elif kind == "cylsec":
        spec = OpenCylinder(*_ints(rest, 2, 2, text))
    elif kind == "lantern":
        spec = SchwarzLantern(*_ints(rest, 2, 2, text))
    elif kind == "strips":
        spec = CylinderStrips(*_ints(rest, 1, 1, text))
    elif kind == "saucer":
        spec = SaucerGrid(*_ints(rest, 2, 2, text))
    else:
        raise InvalidSpec(f"unknown family {kind!r}")
    spec.validate()
    return spec


def family_member(family: str, size: int) -> FamilySpec:
    """One member of a sweep family, indexed by a single size parameter.

    ``icosphere`` (level), ``uvsphere`` (n_lat, n_lon = 2 n_lat), ``cyl`` /
    ``cylsec`` (slices, rings chosen for near-square quads), ``lantern:K``
    (rings m), ``strips`` (strip count), ``saucer`` (rings, 4 x rings sectors).
    """
    kind, _, rest = family.partition(":")
    if kind == "icosphere":
        return Icosphere(size)
    if kind == "uvsphere":
        return UVSphere(size, 2 * size)
    if kind in ("cyl", "cylsec"):
        rings = max(1, round(size / math.pi))
        return OpenCylinder(size, rings) if kind == "cylsec" else \
            CylinderUniform(size, rings, rest == "caps")
    if kind == "lantern":
        k = int(rest) if rest else 8
        return SchwarzLantern(k, size)
    if kind == "strips":
        return CylinderStrips(size)
    if kind == "saucer":
        return SaucerGrid(size, 4 * size)
    raise InvalidSpec(f"unknown family {family!r}")
