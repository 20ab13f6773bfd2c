"""The compiled kernel extension and the pure numpy fallback must be
interchangeable: identical results to roundoff on the same inputs."""

import numpy as np
import pytest

from vemcut import _pycore
from vemcut.core import backend_name

speedups = pytest.importorskip("vemcut._speedups")

from conftest import star_polygon


@pytest.fixture
def polygons(rng):
    out = []
    for k in range(60):
        out.append(star_polygon(rng, int(rng.integers(3, 9)), nonconvex=bool(k % 2)))
    return [p.vertices for p in out]


def test_element_arrays_agree(polygons):
    for verts in polygons:
        pure = _pycore.element_arrays(verts)
        fast = speedups.element_arrays(verts)
        assert fast[0] == pytest.approx(pure[0], rel=1e-14)  # area
        assert fast[1] == pytest.approx(pure[1], rel=1e-14)  # diameter
        for a, b in zip(pure[2:], fast[2:]):
            assert np.asarray(b) == pytest.approx(np.asarray(a), abs=1e-12)


def test_stab_matrices_agree(polygons):
    for verts in polygons:
        values = _pycore.element_arrays(verts)[4]
        for kind in range(4):
            pure = _pycore.stab_matrix(verts, values, kind)
            fast = speedups.stab_matrix(verts, values, kind)
            assert np.asarray(fast) == pytest.approx(pure, abs=1e-12)


def test_consistency_agrees(polygons):
    for verts in polygons:
        area, _, grads, _, _ = _pycore.element_arrays(verts)
        pure = _pycore.consistency_matrix(area, grads)
        fast = speedups.consistency_matrix(area, np.asarray(grads))
        assert np.asarray(fast) == pytest.approx(np.asarray(pure), abs=1e-12)


def test_apex_feasible_agrees(rng, polygons):
    mismatches = 0
    for verts in polygons:
        h_e = float(np.hypot(*(verts[1] - verts[0])))
        t = (verts[1] - verts[0]) / h_e
        n_in = np.array([-t[1], t[0]])
        local = (verts - verts[0]) @ np.column_stack([t, n_in])
        xs = np.linspace(0.0, h_e, 12)
        for ell in rng.uniform(0.01, 1.2, 4):
            a = _pycore.apex_feasible(local, h_e, float(ell), xs, 1e-12)
            b = speedups.apex_feasible(local, h_e, float(ell), xs, 1e-12)
            mismatches += a != b
    assert mismatches == 0


def test_backend_is_named():
    assert backend_name() in ("pure", "compiled")
