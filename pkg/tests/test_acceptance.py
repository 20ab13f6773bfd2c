"""Acceptance suite.

One test per acceptance criterion, each enforcing its stated tolerance
and printing one pass/fail line (run with -s to see them).  Expensive
refinement ladders are shared through module-scoped fixtures; each
criterion with a runtime budget times its own workload.

Known red: criterion 3 requires the interpolant-to-solution energy
error (e_tnorm) to converge with observed order inside [0.9, 1.1], but
on translation-invariant square grids that quantity is superclose to
the interpolant and converges at second order (measured 2.00); the
first-order bound it is meant to witness holds a fortiori.  The
criterion is asserted as stated and fails honestly.
"""

import math
import time

import numpy as np
import pytest

from vemcut import ineq
from vemcut.analysis import SOLUTIONS, convergence_study, error_equation_check
from vemcut.geometry import check_assumptions
from vemcut.halfnorm import half_sq_affine, half_sq_poly
from vemcut.meshgen import CutLine, cut_grid, short_edge_grid, square_grid
from vemcut.system import solve_poisson
from vemcut.vem import StabKind

LEVELS = [8, 16, 32, 64, 128]
CUT_LINE = CutLine((0.0, 0.314), (1.0, 0.587))
PATCH_CUT = CutLine((0.0, 0.2), (1.0, 0.6))


def _verdict(name, ok, detail=""):
    print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    return ok


def _timed_study(family, kind=StabKind.BROKEN_HALF, **kwargs):
    t0 = time.perf_counter()
    table = convergence_study(family, LEVELS, SOLUTIONS["sinsin"], kind, **kwargs)
    return table, time.perf_counter() - t0


@pytest.fixture(scope="module")
def uniform_tables():
    return {kind: _timed_study("uniform", kind) for kind in StabKind}


@pytest.fixture(scope="module")
def cut_table():
    return _timed_study("cut", cut_line=CUT_LINE)


@pytest.fixture(scope="module")
def short_edge_table():
    return _timed_study("short_edge", fraction=0.01)


def test_criterion_1_patch_test():
    """Affine exact solution on all families and stabilizations."""
    sol = SOLUTIONS["affine"]
    t0 = time.perf_counter()
    worst = 0.0
    meshes = [
        square_grid(4),
        cut_grid(4, PATCH_CUT),
        short_edge_grid(4, 0.01),
    ]
    for mesh in meshes:
        for kind in StabKind:
            u, _, _ = solve_poisson(mesh, sol.f, sol.u, kind=kind)
            worst = max(worst, float(np.abs(u - sol.u(mesh.vertices)).max()))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-9 and elapsed < 1.0
    assert _verdict(
        "criterion 1 (patch test)", ok,
        f"max nodal error {worst:.2e} <= 1e-9, runtime {elapsed:.2f}s < 1s",
    )


def test_criterion_2_error_equation():
    """Discrete error identity on quadratic solutions, 20 probes."""
    t0 = time.perf_counter()
    worst = 0.0
    for name in ("saddle", "parab"):
        for mesh in (square_grid(4), cut_grid(4, PATCH_CUT)):
            res = error_equation_check(
                mesh, SOLUTIONS[name], StabKind.BROKEN_HALF, n_probes=20, seed=42
            )
            worst = max(worst, res)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-8 and elapsed < 5.0
    assert _verdict(
        "criterion 2 (error identity)", ok,
        f"max relative residual {worst:.2e} <= 1e-8, runtime {elapsed:.2f}s < 5s",
    )


def test_criterion_3_uniform_rates(uniform_tables):
    """First-order rates on uniform grids for both reported errors."""
    table, elapsed = uniform_tables[StabKind.BROKEN_HALF]
    h1 = table.rates()["e_h1_proj"][-2:]
    en = table.rates()["e_energy"][-2:]
    ok_h1 = all(0.9 <= r <= 1.1 for r in h1)
    ok_en = all(0.9 <= r <= 1.1 for r in en)
    ok = ok_h1 and ok_en and elapsed < 60.0
    _verdict(
        "criterion 3 (uniform first-order rates)", ok,
        f"e_H1_pi rates {[f'{r:.3f}' for r in h1]} in [0.9,1.1]: {ok_h1}; "
        f"e_tnorm rates {[f'{r:.3f}' for r in en]} in [0.9,1.1]: {ok_en} "
        f"(supercloseness: e_tnorm is second order on uniform grids, so the "
        f"first-order window cannot hold); runtime {elapsed:.1f}s < 60s",
    )
    assert ok_h1, f"e_H1_pi rates {h1} outside [0.9, 1.1]"
    assert elapsed < 60.0
    assert ok_en, (
        f"e_tnorm rates {en} outside [0.9, 1.1]: the interpolant-solution "
        "energy gap superconverges on uniform grids (expected failure, see ledger)"
    )


def test_criterion_4_cut_rates(uniform_tables, cut_table):
    """Robustness under one straight cut with unbounded aspect ratios."""
    table, _ = cut_table
    uniform, _ = uniform_tables[StabKind.BROKEN_HALF]
    h1 = table.rates()["e_h1_proj"][-2:]
    en = table.rates()["e_energy"][-2:]
    rates_ok = all(r >= 0.85 for r in h1 + en)
    ratio_h1 = [c.e_h1_proj / u.e_h1_proj for c, u in zip(table.rows, uniform.rows)]
    ratio_en = [c.e_energy / u.e_energy for c, u in zip(table.rows, uniform.rows)]
    errors_ok = all(r <= 2.0 for r in ratio_h1 + ratio_en)
    ok = rates_ok and errors_ok
    assert _verdict(
        "criterion 4 (cut-family robustness)", ok,
        f"last rates H1 {[f'{r:.3f}' for r in h1]}, tnorm {[f'{r:.3f}' for r in en]} "
        f">= 0.85; error ratios vs uniform: H1 max {max(ratio_h1):.3f}, "
        f"tnorm max {max(ratio_en):.3f} <= 2",
    )


def test_criterion_5_short_edge_rates(short_edge_table):
    """Short edges (1% of the cell size) must not spoil the rates."""
    table, _ = short_edge_table
    h1 = table.rates()["e_h1_proj"][-2:]
    en = table.rates()["e_energy"][-2:]
    ok = all(r >= 0.9 for r in h1 + en)
    assert _verdict(
        "criterion 5 (short-edge robustness)", ok,
        f"last rates H1 {[f'{r:.3f}' for r in h1]}, tnorm {[f'{r:.3f}' for r in en]} >= 0.9",
    )


def test_criterion_6_stabilization_variants(uniform_tables):
    """All four stabilizations give the same last-level primary rate."""
    last = {k: t.rates()["e_h1_proj"][-1] for k, (t, _) in uniform_tables.items()}
    spread = max(last.values()) - min(last.values())
    ok = spread <= 0.1
    tnorm_last = {k.value: round(t.rates()["e_energy"][-1], 3) for k, (t, _) in uniform_tables.items()}
    assert _verdict(
        "criterion 6 (stabilization variants)", ok,
        f"last-level e_H1_pi rates {[f'{v:.4f}' for v in last.values()]}, "
        f"spread {spread:.4f} <= 0.1 (e_tnorm rates {tnorm_last} differ through "
        f"supercloseness and are reported, not asserted)",
    )


def test_criterion_7_appendix_suite():
    """Trace and Poincare inequality lab, explicit constants."""
    t0 = time.perf_counter()
    results = {r.name: r for r in ineq.run_suite(n_samples=1000, seed=42)}
    elapsed = time.perf_counter() - t0

    tr = results["trace_reference"]
    cm = results["poincare_convex_mean"]
    bm = results["poincare_boundary_mean"]
    bh = results["poincare_broken_half_p1"]
    ac = results["poincare_aniso_cut"]
    checks = {
        "A1 ratio<=2": tr.max_ratio <= 2.0,
        "B1 bound": cm.max_ratio <= math.sqrt(2) / math.pi * (1 + 1e-8),
        "B1 oracle 2%": abs(cm.max_ratio - 1 / math.pi) * math.pi <= 0.02,
        "B3 constant 1": bm.max_ratio <= 1.0 + 1e-8,
        "B4 p=1 exact": bh.max_ratio <= 1.0 + 1e-8,
        "5.3 spread<2": ac.params["spread"] < 2.0,
        "all satisfied": all(r.satisfied for r in results.values()),
        "runtime<30s": elapsed < 30.0,
    }
    ok = all(checks.values())
    assert _verdict(
        "criterion 7 (appendix suite)", ok,
        f"{checks}; trace ratio {tr.max_ratio:.4f} (ordered-pair form "
        f"{tr.params['ratio_ordered_pairs']:.4f}), convex-mean {cm.max_ratio:.6f} "
        f"vs 1/pi {1 / math.pi:.6f}, aniso spread {ac.params['spread']:.4f}, "
        f"runtime {elapsed:.1f}s",
    )


def test_criterion_8_half_seminorm_identity():
    """Quadrature 1/2-seminorm of affine traces vs endpoint difference."""
    rng = np.random.default_rng(42)
    worst = 0.0
    for _ in range(1000):
        va, vb = rng.uniform(-10, 10, 2)
        quad = half_sq_poly([va, vb - va], n_quad=24)
        worst = max(worst, abs(quad - half_sq_affine(va, vb)))
    ok = worst <= 1e-10
    assert _verdict(
        "criterion 8 (endpoint-difference identity)", ok,
        f"max |quadrature - closed form| {worst:.2e} <= 1e-10 over 1000 traces",
    )


def test_criterion_9_geometry_lemmas():
    """Area pinch for isotropic elements; one side of any cut is isotropic."""
    # area bounds on every isotropic element of the generated families
    area_checked = 0
    area_ok = True
    for mesh in (
        square_grid(4),
        short_edge_grid(4, 0.01),
        cut_grid(4, CUT_LINE),
        cut_grid(3, PATCH_CUT),
    ):
        for ci in range(mesh.n_cells):
            rep = check_assumptions(mesh.cell_polygon(ci), 0.5)
            if rep.isotropic:
                area_checked += 1
                area_ok = area_ok and rep.area_bounds_ok

    # single-line cuts of the unit square: one side always isotropic
    rng = np.random.default_rng(42)
    cuts_done = 0
    cut_ok = True
    shapes = set()
    while cuts_done < 500:
        a = rng.uniform(0, 1, 2)
        b = rng.uniform(0, 1, 2)
        if np.hypot(*(a - b)) < 1e-3:
            continue
        mesh = cut_grid(1, CutLine(tuple(a), tuple(b)))
        if mesh.n_cells != 2:
            continue
        cuts_done += 1
        polys = [mesh.cell_polygon(i) for i in range(2)]
        shapes.add(tuple(sorted(p.n for p in polys)))
        reports = [check_assumptions(p, 0.5, max_edges=5) for p in polys]
        cut_ok = cut_ok and any(r.isotropic for r in reports)
    shapes_ok = shapes <= {(3, 5), (4, 4), (3, 4), (3, 3)}
    ok = area_ok and cut_ok and shapes_ok and area_checked > 20
    assert _verdict(
        "criterion 9 (geometry lemmas)", ok,
        f"area bounds on {area_checked} isotropic elements: {area_ok}; "
        f"one-side-isotropic over {cuts_done} cuts: {cut_ok}; shapes {sorted(shapes)}",
    )
