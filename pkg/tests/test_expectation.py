import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from silhlab.errors import BoundaryEdge, InvalidSampleCount
from silhlab.expectation import (AtInfinityUniform, BallUniform, dihedral_angles,
                                 edge_frequencies, edge_silhouette_probability,
                                 exact_expected_silhouette, exterior_dihedral,
                                 mc_count_and_length, mc_expected_silhouette,
                                 mc_expected_silhouette_length, parse_model)
from silhlab.generators import (CylinderStrips, CylinderUniform, Icosphere, OpenCylinder,
                                SaucerGrid, SchwarzLantern, UVSphere, generate)
from silhlab.geom import AtInfinity, direction_stream
from silhlab.mesh import TriangleMesh
from silhlab.silhouette import extract_silhouette

TETRA_THETA = math.pi - math.acos(1 / 3)


def test_cube_dihedrals(cube):
    adj = cube.adjacency
    for e in range(adj.n_edges):
        want = 0.0 if adj.lengths[e] > 1.1 else math.pi / 2
        assert exterior_dihedral(cube, adj, e) == pytest.approx(want, abs=1e-12)


def test_tetrahedron_dihedral(tetra):
    adj = tetra.adjacency
    assert TETRA_THETA == pytest.approx(1.910633, abs=1e-6)
    for e in range(6):
        assert exterior_dihedral(tetra, adj, e) == pytest.approx(TETRA_THETA, abs=1e-12)


def test_coplanar_dihedral_zero(flat_square):
    adj = flat_square.adjacency
    (e,) = adj.interior
    assert exterior_dihedral(flat_square, adj, e) == 0.0
    with pytest.raises(BoundaryEdge):
        exterior_dihedral(flat_square, adj, int(adj.boundary[0]))


def test_dihedral_table_marks_boundary(flat_square):
    t = dihedral_angles(flat_square, flat_square.adjacency)
    assert np.isnan(t.theta[t.is_boundary]).all()
    assert t.is_boundary.sum() == 4


def test_exact_examples(cube, tetra, triangle):
    assert exact_expected_silhouette(cube, cube.adjacency) == pytest.approx(6.0, abs=1e-12)
    want = 6 * TETRA_THETA / math.pi
    assert want == pytest.approx(3.6490407, abs=1e-7)
    assert exact_expected_silhouette(tetra, tetra.adjacency) == pytest.approx(want, abs=1e-12)
    assert exact_expected_silhouette(triangle, triangle.adjacency) == 3.0


def test_edge_probability_examples(cube, flat_square):
    adj = cube.adjacency
    for e in range(adj.n_edges):
        p = edge_silhouette_probability(cube, adj, e)
        want = 0.0 if adj.lengths[e] > 1.1 else 0.5
        assert p.value == pytest.approx(want, abs=1e-12) and p.std_error == 0.0
    sq = flat_square.adjacency
    assert edge_silhouette_probability(flat_square, sq, int(sq.interior[0])).value == 0.0
    for model in (AtInfinityUniform(), BallUniform((0, 0, 0), 5.0)):
        assert edge_silhouette_probability(flat_square, sq, int(sq.boundary[0]), model).value == 1.0


def test_edge_probability_ball_is_empirical(cube):
    p = edge_silhouette_probability(cube, cube.adjacency, 0, BallUniform((0.5, 0.5, 0.5), 3.0),
                                    samples=4000, seed=1)
    assert 0 < p.std_error < 0.02


def test_cube_edge_frequencies(cube):
    adj = cube.adjacency
    freq, se = edge_frequencies(cube, adj, samples=100_000, seed=3)
    diag = adj.lengths > 1.1
    assert np.all(freq[diag] == 0)
    assert np.all(np.abs(freq[~diag] - 0.5) <= 4 * se[~diag])


def test_mc_cube_is_exact(cube):
    rep = mc_expected_silhouette(cube, cube.adjacency, samples=100_000, seed=0)
    assert rep.exact_expected == pytest.approx(6.0)
    assert abs(rep.mc_mean - 6.0) <= 4 * rep.mc_std_error + 1e-9


def test_mc_tetrahedron(tetra):
    rep = mc_expected_silhouette(tetra, tetra.adjacency, samples=100_000, seed=4)
    assert abs(rep.mc_mean - 6 * TETRA_THETA / math.pi) <= 4 * rep.mc_std_error


MEMBERS = [Icosphere(0), Icosphere(1), Icosphere(2), Icosphere(3), UVSphere(8, 16),
           CylinderUniform(16, 3, capped=True), OpenCylinder(12, 4), SchwarzLantern(8, 8),
           SchwarzLantern(8, 32), CylinderStrips(8), CylinderStrips(64), SaucerGrid(4, 16)]


@pytest.mark.slow
@pytest.mark.parametrize("spec", MEMBERS, ids=str)
def test_exact_vs_mc_family_members(spec):
    mesh, _ = generate(spec)
    assert mesh.n_faces <= 5120
    rep = mc_expected_silhouette(mesh, mesh.adjacency, samples=100_000, seed=11)
    # prisms have a constant silhouette, so se can be exactly 0
    assert abs(rep.mc_mean - rep.exact_expected) <= 4 * rep.mc_std_error + 1e-9


def test_far_ball_matches_directional():
    mesh, _ = generate(Icosphere(2))
    exact = exact_expected_silhouette(mesh, mesh.adjacency)
    rep = mc_expected_silhouette(mesh, mesh.adjacency, BallUniform((0, 0, 0), 100.0),
                                 samples=20_000, seed=2)
    assert rep.exact_expected is None
    assert abs(rep.mc_mean - exact) <= 0.05 * exact


def test_flat_square_mean_length():
    sq = TriangleMesh([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]], [[0, 1, 2], [0, 2, 3]])
    # angle between a fixed axis and a uniform direction has density sin(t)/2
    e_sin, _ = integrate.quad(lambda t: math.sin(t) * math.sin(t) / 2, 0, math.pi)
    assert e_sin == pytest.approx(math.pi / 4)
    est = mc_expected_silhouette_length(sq, sq.adjacency, samples=100_000, seed=5)
    assert abs(est.value - 4 * e_sin) <= 0.02 * math.pi


def test_length_matches_single_extractions():
    mesh, _ = generate(Icosphere(1))
    n = 300
    est = mc_expected_silhouette_length(mesh, mesh.adjacency, samples=n, seed=9)
    lens = [extract_silhouette(mesh, mesh.adjacency, AtInfinity(d)).projected_length
            for d in direction_stream(9, n)]
    assert est.value == pytest.approx(np.mean(lens), rel=1e-12)
    assert est.std_error == pytest.approx(np.std(lens, ddof=1) / math.sqrt(n), rel=1e-9)


def test_counts_follow_the_direction_stream():
    mesh, _ = generate(SchwarzLantern(6, 6))
    n = 5000
    rep = mc_expected_silhouette(mesh, mesh.adjacency, samples=n, seed=21)
    sizes = [extract_silhouette(mesh, mesh.adjacency, AtInfinity(d)).size
             for d in direction_stream(21, n)]
    assert rep.mc_mean == pytest.approx(np.mean(sizes), rel=1e-12)


def test_thread_count_does_not_change_results():
    mesh, _ = generate(Icosphere(2))
    a = mc_count_and_length(mesh, mesh.adjacency, samples=20_000, seed=8, threads=1)
    b = mc_count_and_length(mesh, mesh.adjacency, samples=20_000, seed=8, threads=4)
    assert a == b
    m = BallUniform((0, 0, 0), 3.0)
    fa = edge_frequencies(mesh, mesh.adjacency, m, samples=9000, seed=1, threads=1)
    fb = edge_frequencies(mesh, mesh.adjacency, m, samples=9000, seed=1, threads=3)
    assert np.array_equal(fa[0], fb[0])


@settings(max_examples=10, deadline=None)
@given(st.floats(0.1, 20), st.integers(0, 1000))
def test_scale_invariance(s, seed):
    mesh, _ = generate(SchwarzLantern(6, 4))
    big = mesh.scaled(s)
    assert exact_expected_silhouette(big, big.adjacency) == pytest.approx(
        exact_expected_silhouette(mesh, mesh.adjacency), rel=1e-9)
    a = mc_expected_silhouette_length(mesh, mesh.adjacency, samples=500, seed=seed)
    b = mc_expected_silhouette_length(big, big.adjacency, samples=500, seed=seed)
    assert b.value == pytest.approx(s * a.value, rel=1e-6)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_exact_expectation_nonnegative_and_bounded(seed):
    mesh, _ = generate(Icosphere(1))
    rng = np.random.default_rng(seed)
    v = mesh.vertices * (1 + 0.3 * rng.uniform(-1, 1, mesh.n_vertices))[:, None]
    m = TriangleMesh(v, mesh.faces)
    e = exact_expected_silhouette(m, m.adjacency)
    assert 0 <= e <= m.adjacency.n_edges


def test_coplanar_interior_contributes_nothing(flat_square):
    assert exact_expected_silhouette(flat_square, flat_square.adjacency) == 4.0


def test_lantern_length_grows():
    lens = []
    for m in (8, 32, 128):
        mesh, _ = generate(SchwarzLantern(8, m))
        lens.append(mc_expected_silhouette_length(mesh, mesh.adjacency, samples=2000).value)
    assert lens[0] < lens[1] < lens[2]
    assert lens[2] > 3 * lens[0]


def test_sample_count_validated(cube):
    with pytest.raises(InvalidSampleCount):
        mc_expected_silhouette(cube, cube.adjacency, samples=1)


def test_report_serialization(cube):
    rep = mc_expected_silhouette(cube, cube.adjacency, samples=100, seed=3)
    d = rep.to_dict()
    assert set(d) == {"model", "samples", "seed", "exact", "mc_mean", "mc_std_error"}
    assert rep.to_json() == rep.to_json()


def test_parse_model():
    assert parse_model("inf") == AtInfinityUniform()
    assert parse_model("ball:0,0,0,100") == BallUniform((0, 0, 0), 100.0)
    assert str(parse_model("ball:1,2,3,4")) == "ball:1.0,2.0,3.0,4.0"
    with pytest.raises(ValueError):
        parse_model("ball:1,2")
    with pytest.raises(ValueError):
        parse_model("ball:0,0,0,-1")
