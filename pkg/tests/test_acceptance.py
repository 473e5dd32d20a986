"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``[criterion N] PASS|FAIL ...`` line (visible even
under output capture) and then asserts, so a failing criterion fails the run.
"""

import math
import time

import numpy as np

from silhlab.expectation import (BallUniform, dihedral_angles, edge_frequencies,
                                 exact_expected_silhouette, mc_expected_silhouette,
                                 mc_expected_silhouette_length)
from silhlab.experiments import (SweepConfig, check_theorem_bound, emit_csv, emit_json,
                                 fit_exponent, run_sweep)
from silhlab.generators import (CylinderStrips, Icosphere, OpenCylinder, SchwarzLantern,
                                generate)
from silhlab.geom import AtInfinity, Finite, ball_stream, direction_stream
from silhlab.hypotheses import certify_family, measure_hypotheses
from silhlab.mesh import load_off, save_off
from silhlab.silhouette import emit_svg, extract_silhouette

from conftest import cube_mesh, tetrahedron_mesh

TWO_PI = 2 * math.pi


def verdict(capsys, number, ok, elapsed, limit, detail):
    timing = f"{elapsed:.2f}s" + (f" (limit {limit:g}s)" if limit else "")
    within = limit is None or elapsed < limit
    status = "PASS" if ok and within else "FAIL"
    with capsys.disabled():
        print(f"\n[criterion {number}] {status} {timing} {detail}")
    assert ok, detail
    assert within, f"took {elapsed:.2f}s, limit {limit}s"


class Clock:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def test_criterion_1_per_edge_probability(capsys):
    with Clock() as c:
        cube = cube_mesh()
        adj = cube.adjacency
        freq, se = edge_frequencies(cube, adj, samples=100_000, seed=1)
        diag = adj.lengths > 1.1
        z = np.abs(freq[~diag] - 0.5) / se[~diag]
        ok = diag.sum() == 6 and (~diag).sum() == 12 and np.all(z <= 4) and np.all(freq[diag] == 0)
    verdict(capsys, 1, ok, c.elapsed, 5,
            f"cube edges max |f-0.5|/se = {z.max():.2f}, diagonal max f = {freq[diag].max()}")


def test_criterion_2_exact_vs_mc(capsys):
    meshes = [("cube", cube_mesh()), ("tetra", tetrahedron_mesh())]
    meshes += [(f"icosphere:{k}", generate(Icosphere(k))[0]) for k in (1, 2, 3)]
    rows = []
    with Clock() as c:
        for name, mesh in meshes:
            rep = mc_expected_silhouette(mesh, mesh.adjacency, samples=100_000, seed=2)
            gap = abs(rep.mc_mean - rep.exact_expected)
            # +1e-9 absorbs summation rounding when every sample is identical (se = 0)
            rows.append((name, rep.exact_expected, rep.mc_mean, rep.mc_std_error,
                         gap <= 4 * rep.mc_std_error + 1e-9))
    ok = all(r[-1] for r in rows)
    ok &= abs(rows[0][1] - 6.0) < 1e-12
    ok &= abs(rows[1][1] - 6 * (math.pi - math.acos(1 / 3)) / math.pi) < 1e-12
    detail = "; ".join(f"{n}: exact {e:.5f} mc {m:.5f}±{s:.5f}" for n, e, m, s, _ in rows)
    verdict(capsys, 2, ok, c.elapsed, 30, detail)


def test_criterion_3_sqrt_scaling(capsys):
    with Clock() as c:
        recs = run_sweep([Icosphere(k) for k in range(1, 6)],
                         config=SweepConfig(mc_samples=0, grid_depth=0))
        fit = fit_exponent(recs)
    ok = 0.42 <= fit.exponent <= 0.58 and fit.r_squared >= 0.98
    verdict(capsys, 3, ok, c.elapsed, 120,
            f"icosphere n={recs[0].n}..{recs[-1].n}: p = {fit.exponent:.4f}, r^2 = {fit.r_squared:.5f}")


def test_criterion_4_linear_pathology(capsys):
    cfg = SweepConfig(mc_samples=0, grid_depth=0)
    families = {
        "lantern(8,m)": [SchwarzLantern(8, m) for m in (8, 64, 512, 4096)],
        "strips(s)": [CylinderStrips(s) for s in (8, 32, 128, 512)],
    }
    parts, ok = [], True
    with Clock() as c:
        for name, specs in families.items():
            recs = run_sweep(specs, config=cfg)
            fit = fit_exponent(recs)
            ratio = [r.exact_expected / r.n for r in recs]
            # bounded below: a fixed positive floor, and no decay at the large end
            ok &= fit.exponent >= 0.85 and min(ratio) >= 0.4 and ratio[-1] >= 0.9 * ratio[-2]
            parts.append(f"{name}: p = {fit.exponent:.3f}, E/n = "
                         + ",".join(f"{x:.3f}" for x in ratio))
    verdict(capsys, 4, ok, c.elapsed, 120, "; ".join(parts))


def test_criterion_5_theorem_bound(capsys):
    with Clock() as c:
        recs = run_sweep([Icosphere(k) for k in range(1, 6)], config=SweepConfig(mc_samples=0))
        checks = [check_theorem_bound(r, TWO_PI) for r in recs]
    ok = all(ch.holds for ch in checks)
    verdict(capsys, 5, ok, c.elapsed, 60,
            "lhs/rhs = " + ", ".join(f"{ch.lhs:.1f}/{ch.rhs:.1f}" for ch in checks))


def test_criterion_6_certification(capsys):
    with Clock() as c:
        ico = certify_family([measure_hypotheses(*generate(Icosphere(k))) for k in range(1, 6)])
        lan = certify_family([measure_hypotheses(*generate(SchwarzLantern(8, m)))
                              for m in (64, 512, 4096)])
    ok = ico.passed and not lan.passed and lan.failed_hypothesis in (1, 3)
    ok &= lan.verdict.startswith(f"FAIL(H{lan.failed_hypothesis}, n=")
    verdict(capsys, 6, ok, c.elapsed, 60,
            f"icosphere vs sphere: {ico.verdict}; lantern vs cylinder: {lan.verdict} "
            f"(fatness_inf {lan.fatness_inf:.4f})")


def test_criterion_7_length_convergence(capsys):
    with Clock() as c:
        mesh, _ = generate(Icosphere(5))
        est = mc_expected_silhouette_length(mesh, mesh.adjacency, samples=10_000, seed=7)
    rel = abs(est.value - TWO_PI) / TWO_PI
    verdict(capsys, 7, rel <= 0.01, c.elapsed, 60,
            f"mean length {est.value:.5f} vs 2pi, rel err {rel:.2e}")


def test_criterion_8_boundary_convention(capsys):
    specs = [OpenCylinder(12, 4), OpenCylinder(24, 8), SchwarzLantern(8, 16), CylinderStrips(16)]
    parts, ok = [], True
    with Clock() as c:
        for spec in specs:
            mesh, _ = generate(spec)
            adj = mesh.adjacency
            boundary = set(adj.boundary.tolist())
            views = [AtInfinity(d) for d in direction_stream(8, 500)]
            views += [Finite(p) for p in ball_stream(8, 500, (0, 0, 0), 3.0)]
            ok &= all(boundary <= set(extract_silhouette(mesh, adj, v).edge_ids.tolist())
                      for v in views)
            theta = dihedral_angles(mesh, adj).theta
            independent = len(boundary) + float(theta[adj.interior].sum()) / math.pi
            exact = exact_expected_silhouette(mesh, adj)
            rep = mc_expected_silhouette(mesh, adj, samples=100_000, seed=8)
            ok &= abs(exact - independent) <= 1e-9
            ok &= abs(rep.mc_mean - exact) <= 4 * rep.mc_std_error + 1e-9
            parts.append(f"{spec}: b={len(boundary)} exact {exact:.4f} mc {rep.mc_mean:.4f}")
    verdict(capsys, 8, ok, c.elapsed, None, "; ".join(parts))


def test_criterion_9_finite_viewpoints(capsys):
    with Clock() as c:
        mesh, _ = generate(Icosphere(3))
        adj = mesh.adjacency
        exact = exact_expected_silhouette(mesh, adj)
        far = mc_expected_silhouette(mesh, adj, BallUniform((0, 0, 0), 100.0),
                                     samples=100_000, seed=9)
        rel = abs(far.mc_mean - exact) / exact
        freq, se = edge_frequencies(mesh, adj, BallUniform((0, 0, 0), 3.0),
                                    samples=100_000, seed=9)
        p_inf = dihedral_angles(mesh, adj).theta / math.pi
        slack = 2 * p_inf + 4 * se - freq
    ok = rel <= 0.05 and np.all(slack >= 0)
    verdict(capsys, 9, ok, c.elapsed, None,
            f"radius 100: mc {far.mc_mean:.3f} vs exact {exact:.3f} (rel {rel:.3%}); "
            f"radius 3: max f/(theta/pi) = {np.max(freq / p_inf):.3f}, min slack {slack.min():.4f}")


def test_criterion_10_determinism(capsys, tmp_path):
    with Clock() as c:
        cfg = SweepConfig(mc_samples=5000, seed=10)
        runs = []
        for threads in (1, 3):
            recs = run_sweep([SchwarzLantern(8, m) for m in (8, 16, 32)],
                             config=SweepConfig(cfg.mc_samples, cfg.seed, cfg.grid_depth, threads))
            cube = cube_mesh()
            res = extract_silhouette(cube, cube.adjacency, AtInfinity((1, 2, 3)))
            runs.append((emit_csv(recs), emit_json(recs), emit_svg(cube, cube.adjacency, res)))
        same = runs[0] == runs[1]
        mesh, _ = generate(Icosphere(3))
        once = save_off(mesh)
        idem = save_off(load_off(once)) == once
    verdict(capsys, 10, same and idem, c.elapsed, None,
            f"CSV/JSON/SVG identical across runs: {same}; OFF round-trip idempotent: {idem}")
