import numpy as np
import pytest

from vemcut.geometry import Polygon
from vemcut.vem import (
    StabKind,
    build_projector,
    consistency_matrix,
    local_system,
    stabilization_matrix,
)

from conftest import star_polygon


class TestProjector:
    def test_linear_boundary_data(self, unit_square):
        proj = build_projector(unit_square)
        v = np.array([0.0, 0.0, 1.0, 1.0])  # samples of y
        assert proj.grad(v) == pytest.approx([0.0, 1.0], abs=1e-14)
        assert proj.vertex_values @ v == pytest.approx(v, abs=1e-14)

    def test_single_hat_example(self, unit_square):
        proj = build_projector(unit_square)
        v = np.array([1.0, 0.0, 0.0, 0.0])
        assert proj.grad(v) == pytest.approx([-0.5, -0.5], abs=1e-14)
        assert proj.vertex_values @ v == pytest.approx([0.75, 0.25, -0.25, 0.25])

    def test_affine_reproduction_random(self, rng):
        for _ in range(100):
            poly = star_polygon(rng, int(rng.integers(3, 9)), nonconvex=True)
            proj = build_projector(poly)
            a, b, c = rng.standard_normal(3)
            data = a * poly.vertices[:, 0] + b * poly.vertices[:, 1] + c
            assert proj.vertex_values @ data == pytest.approx(data, abs=1e-11)
            assert proj.grad(data) == pytest.approx([a, b], abs=1e-11)

    def test_partition_of_unity(self, polygon_family):
        for poly in polygon_family:
            proj = build_projector(poly)
            assert proj.gradients.sum(axis=0) == pytest.approx(
                [0.0, 0.0], abs=1e-12 / poly.diameter
            )
            assert proj.constants.sum() == pytest.approx(1.0, abs=1e-12)

    def test_idempotence(self, rng):
        # projecting vertex samples of a projected function changes nothing
        for _ in range(100):
            poly = star_polygon(rng, int(rng.integers(3, 9)), nonconvex=True)
            proj = build_projector(poly)
            data = rng.standard_normal(poly.n)
            once = proj.vertex_values @ data
            twice = proj.vertex_values @ once
            assert twice == pytest.approx(once, abs=1e-10)

    def test_orthogonality_boundary_integrals(self, polygon_family):
        # the defining property: the projection error has a vanishing
        # normal boundary integral (gradient orthogonality) and a
        # vanishing plain boundary integral (constant pin)
        for poly in polygon_family:
            proj = build_projector(poly)
            h = poly.diameter
            hn = poly.edge_normals * poly.edge_lengths[:, None]
            lengths = poly.edge_lengths
            for i in range(poly.n):
                phi = np.zeros(poly.n)
                phi[i] = 1.0
                slice_vals = phi - proj.vertex_values @ phi
                ends = np.roll(slice_vals, -1)
                flux = ((slice_vals + ends) / 2.0)[:, None] * hn
                assert np.abs(flux.sum(axis=0)).max() <= 1e-12 * h
                line = ((slice_vals + ends) / 2.0) @ lengths
                assert abs(line) <= 1e-12 * h * h


class TestStabilization:
    def test_endpoint_difference_example(self, unit_square):
        proj = build_projector(unit_square)
        s = stabilization_matrix(unit_square, proj, StabKind.BROKEN_HALF)
        v = np.array([1.0, 0.0, 0.0, 0.0])
        assert v @ s @ v == pytest.approx(1.0, abs=1e-13)

    def test_affine_data_in_kernel_all_kinds(self, polygon_family, rng):
        for poly in polygon_family:
            proj = build_projector(poly)
            a, b, c = rng.standard_normal(3)
            data = a * poly.vertices[:, 0] + b * poly.vertices[:, 1] + c
            for kind in StabKind:
                s = stabilization_matrix(poly, proj, kind)
                assert np.abs(s @ data).max() <= 1e-10 * (1 + np.abs(data).max())

    def test_tangential_matches_endpoint_on_unit_edges(self, unit_square):
        proj = build_projector(unit_square)
        s_half = stabilization_matrix(unit_square, proj, StabKind.BROKEN_HALF)
        s_tan = stabilization_matrix(unit_square, proj, StabKind.TANGENTIAL)
        assert s_tan == pytest.approx(s_half, abs=1e-13)

    def test_symmetric_psd(self, polygon_family):
        for poly in polygon_family:
            proj = build_projector(poly)
            for kind in StabKind:
                s = stabilization_matrix(poly, proj, kind)
                assert s == pytest.approx(s.T, abs=1e-12)
                evals = np.linalg.eigvalsh(s)
                assert evals.min() >= -1e-10


class TestLocalSystem:
    def test_zero_load(self, unit_square):
        ls = local_system(unit_square, f=None)
        assert np.all(ls.load == 0.0)

    def test_constant_load_partition(self, unit_square):
        ls = local_system(unit_square, f=lambda p: np.ones(len(p)))
        assert ls.load == pytest.approx([0.25] * 4, abs=1e-13)

    def test_consistency_energy(self, unit_square):
        ls = local_system(unit_square)
        v = np.array([1.0, 0.0, 0.0, 0.0])
        assert v @ ls.consistency @ v == pytest.approx(0.5, abs=1e-13)

    def test_quad_degree_validation(self, unit_square):
        with pytest.raises(ValueError):
            local_system(unit_square, quad_degree=1)

    def test_affine_energy_splitting(self, polygon_family, rng):
        # for affine data the local energy is area * |grad|^2 exactly
        # and the stabilization contributes nothing
        for poly in polygon_family:
            a, b = rng.standard_normal(2)
            data = a * poly.vertices[:, 0] + b * poly.vertices[:, 1]
            for kind in StabKind:
                ls = local_system(poly, kind=kind)
                energy = data @ (ls.consistency + ls.stability) @ data
                assert energy == pytest.approx(
                    poly.area * (a * a + b * b), rel=1e-10, abs=1e-12
                )

    def test_spd_with_constant_kernel(self, rng):
        # combined local matrix: symmetric PSD, kernel exactly constants,
        # including a thin cut trapezoid with area ratio 1e-3
        thin = Polygon([(0, 0), (1, 0), (1, 0.0015), (0, 0.0005)])
        polys = [thin] + [star_polygon(rng, 6, nonconvex=True) for _ in range(3)]
        for poly in polys:
            for kind in StabKind:
                ls = local_system(poly, kind=kind)
                mat = ls.consistency + ls.stability
                ones = np.ones(poly.n)
                assert np.abs(mat @ ones).max() <= 1e-9 * np.abs(mat).max()
                evals = np.linalg.eigvalsh(mat)
                assert evals[0] >= -1e-10 * evals[-1]
                assert evals[1] > 1e-8 * evals[-1]  # one-dimensional kernel


def test_consistency_matches_projector(unit_square):
    proj = build_projector(unit_square)
    c = consistency_matrix(unit_square, proj)
    assert c == pytest.approx(unit_square.area * proj.gradients @ proj.gradients.T)
