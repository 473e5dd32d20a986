"""Vector helpers, viewpoints and reproducible sampling on the sphere and ball.

Points and directions are plain float64 numpy arrays of shape (3,) or (N, 3).
Sampling never touches global RNG state: callers pass a ``numpy.random.Generator``
or use the block streams below, where block ``b`` of seed ``s`` is drawn from
``SeedSequence([s, b])`` so that sample ``i`` depends only on ``(s, i)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SilhlabError

GEOM_TOL = 1e-9
UNIT_TOL = 1e-12
BLOCK_SIZE = 4096


def as_vector(v) -> np.ndarray:
    a = np.asarray(v, dtype=float).reshape(3)
    if not np.all(np.isfinite(a)):
        raise SilhlabError(f"non-finite vector {a!r}")
    return a


def as_direction(v) -> np.ndarray:
    """Normalize ``v`` to unit length. Zero vectors are rejected."""
    a = as_vector(v)
    norm = math.sqrt(float(a @ a))
    if norm == 0.0:
        raise SilhlabError("zero vector has no direction")
    return a / norm


def angle_between(u, v) -> float:
    """Angle in [0, pi] between two vectors.

    atan2 of the cross and dot products stays accurate near 0 and pi, where a
    clamped arccos loses half the significant digits.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return math.atan2(float(np.linalg.norm(np.cross(u, v))), float(np.dot(u, v)))


def orthonormal_frame(d) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(u, v)`` such that ``(u, v, d)`` is right-handed and orthonormal.

    The helper axis is the coordinate axis least aligned with ``d`` (first one
    on ties), so the frame is a deterministic function of ``d``.
    """
    d = np.asarray(d, dtype=float)
    helper = np.zeros(3)
    helper[int(np.argmin(np.abs(d)))] = 1.0
    u = np.cross(helper, d)
    u /= np.linalg.norm(u)
    v = np.cross(d, u)
    v /= np.linalg.norm(v)
    return u, v


@dataclass(frozen=True, eq=False)
class AtInfinity:
    direction: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "direction", as_direction(self.direction))

    def __eq__(self, other):
        return isinstance(other, AtInfinity) and np.array_equal(self.direction, other.direction)

    def __hash__(self):
        return hash(("inf", self.direction.tobytes()))

    def __str__(self):
        return "inf:" + ",".join(repr(float(c)) for c in self.direction)


@dataclass(frozen=True, eq=False)
class Finite:
    point: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "point", as_vector(self.point))

    def __eq__(self, other):
        return isinstance(other, Finite) and np.array_equal(self.point, other.point)

    def __hash__(self):
        return hash(("pt", self.point.tobytes()))

    def __str__(self):
        return "pt:" + ",".join(repr(float(c)) for c in self.point)


Viewpoint = AtInfinity | Finite


def parse_viewpoint(text: str, rng: np.random.Generator | None = None) -> Viewpoint:
    """Parse ``inf:x,y,z``, ``pt:x,y,z`` or ``random`` (a uniform direction)."""
    text = text.strip()
    if text == "random":
        if rng is None:
            rng = np.random.default_rng(0)
        return AtInfinity(sample_direction_uniform(rng))
    kind, _, rest = text.partition(":")
    try:
        coords = [float(c) for c in rest.split(",")]
    except ValueError:
        raise SilhlabError(f"bad viewpoint {text!r}") from None
    if len(coords) != 3:
        raise SilhlabError(f"viewpoint needs three coordinates: {text!r}")
    if kind == "inf":
        return AtInfinity(coords)
    if kind == "pt":
        return Finite(coords)
    raise SilhlabError(f"unknown viewpoint kind {kind!r}")


def sample_direction_uniform(rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Uniform directions on the unit sphere.

    Uses Archimedes' theorem: z uniform on [-1, 1] and an independent uniform
    azimuth give exactly the area measure.
    """
    n = 1 if size is None else size
    z = rng.uniform(-1.0, 1.0, n)
    phi = rng.uniform(0.0, 2.0 * math.pi, n)
    s = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    out = np.column_stack((s * np.cos(phi), s * np.sin(phi), z))
    return out[0] if size is None else out


def sample_ball_uniform(center, radius: float, rng: np.random.Generator,
                        size: int | None = None) -> np.ndarray:
    """Points uniform by volume in the closed ball."""
    if not radius > 0:
        raise SilhlabError("radius must be positive")
    center = as_vector(center)
    n = 1 if size is None else size
    d = sample_direction_uniform(rng, n)
    r = radius * np.cbrt(rng.uniform(0.0, 1.0, n))
    out = center + d * r[:, None]
    return out[0] if size is None else out


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(block)]))


def block_layout(samples: int, block_size: int = BLOCK_SIZE) -> list[tuple[int, int]]:
    """(block index, count) pairs covering ``samples`` draws."""
    out = []
    for b, start in enumerate(range(0, samples, block_size)):
        out.append((b, min(block_size, samples - start)))
    return out


def direction_stream(seed: int, samples: int, block_size: int = BLOCK_SIZE) -> np.ndarray:
    """The first ``samples`` directions of the reproducible stream for ``seed``."""
    # full blocks are always drawn, so a short final block is a prefix of the long one
    parts = [sample_direction_uniform(block_rng(seed, b), block_size)[:k]
             for b, k in block_layout(samples, block_size)]
    return np.concatenate(parts) if parts else np.empty((0, 3))


def ball_stream(seed: int, samples: int, center, radius: float,
                block_size: int = BLOCK_SIZE) -> np.ndarray:
    parts = [sample_ball_uniform(center, radius, block_rng(seed, b), block_size)[:k]
             for b, k in block_layout(samples, block_size)]
    return np.concatenate(parts) if parts else np.empty((0, 3))
