import numpy as np
import pytest

from silhlab.mesh import TriangleMesh

CUBE_V = np.array([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0],
                   [0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 1]], dtype=float)
CUBE_QUADS = [(0, 3, 2, 1), (4, 5, 6, 7), (0, 1, 5, 4), (1, 2, 6, 5), (2, 3, 7, 6), (3, 0, 4, 7)]


def cube_mesh() -> TriangleMesh:
    faces = [(a, b, c) for a, b, c, d in CUBE_QUADS] + [(a, c, d) for a, b, c, d in CUBE_QUADS]
    return TriangleMesh(CUBE_V, faces)


def outward(vertices, faces):
    """Flip faces of a convex, origin-containing mesh so normals point outward."""
    v = np.asarray(vertices, float)
    out = []
    for f in faces:
        a, b, c = v[list(f)]
        n = np.cross(b - a, c - a)
        out.append(tuple(f) if n @ (a + b + c) > 0 else (f[0], f[2], f[1]))
    return out


def tetrahedron_mesh() -> TriangleMesh:
    v = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float)
    return TriangleMesh(v, outward(v, [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]))


def triangle_mesh() -> TriangleMesh:
    return TriangleMesh([[0, 0, 0], [1, 0, 0], [0, 1, 0]], [[0, 1, 2]])


def flat_square_mesh() -> TriangleMesh:
    return TriangleMesh([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]], [[0, 1, 2], [0, 2, 3]])


@pytest.fixture
def cube():
    return cube_mesh()


@pytest.fixture
def tetra():
    return tetrahedron_mesh()


@pytest.fixture
def triangle():
    return triangle_mesh()


@pytest.fixture
def flat_square():
    return flat_square_mesh()
