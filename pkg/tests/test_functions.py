import numpy as np
import pytest

from bdlab.functions import (
    AffinePiece,
    FunctionError,
    PiecewiseAffine,
    PiecewiseRigid,
    compact_deviation,
    constant_piece,
    make_elementary,
    rigid_piece,
    skew2,
    total_jump_length,
)
from bdlab.geometry import OrientedSquare, Polygon, PolygonalPartition, make_oriented_square

E2 = np.array([0.0, 1.0])


def _single_piece(piece, side=2.0):
    dom = make_oriented_square(E2, side)
    return PiecewiseRigid(PolygonalPartition([dom], dom), [piece])


class TestEval:
    def test_constant_piece(self):
        u = _single_piece(rigid_piece(0.0, (1.0, 2.0)), side=2.0)
        assert np.allclose(u.eval((0.3, 0.7)), (1.0, 2.0))

    def test_rotational_piece_bottom_edge(self):
        # piece omega=1, b=(1,1): value at (t,-1) is (0, 1-t)
        u = _single_piece(rigid_piece(1.0, (1.0, 1.0)), side=2.0)
        assert np.allclose(u.eval((0.0, -1.0)), (0.0, 1.0), atol=1e-14)
        assert np.allclose(u.eval((0.5, -1.0)), (0.0, 0.5), atol=1e-14)

    def test_rotational_piece_top_edge(self):
        # value at (t,1) is (2, 1-t)
        u = _single_piece(rigid_piece(1.0, (1.0, 1.0)), side=2.0)
        assert np.allclose(u.eval((0.0, 1.0)), (2.0, 1.0), atol=1e-14)

    def test_outside_domain_raises(self):
        u = _single_piece(rigid_piece(0.0, (1.0, 2.0)))
        with pytest.raises(Exception):
            u.eval((10.0, 10.0))

    def test_affine_on_cells(self):
        rng = np.random.default_rng(5)
        dom = make_oriented_square(E2, 2.0)
        part = PolygonalPartition([dom], dom)
        u = PiecewiseAffine(part, [AffinePiece(rng.normal(size=(2, 2)), rng.normal(size=2))])
        for _ in range(50):
            x, y = rng.uniform(-0.9, 0.9, size=2), rng.uniform(-0.9, 0.9, size=2)
            mid = 0.5 * (x + y)
            assert np.allclose(u.eval(mid), 0.5 * (u.eval(x) + u.eval(y)), atol=1e-12)


class TestSymmetrizedGradient:
    def test_rigid_piece_is_exactly_zero(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            u = _single_piece(rigid_piece(rng.normal(), rng.normal(size=2)))
            assert np.array_equal(u.symmetrized_gradient(0), np.zeros((2, 2)))

    def test_identity(self):
        u = PiecewiseAffine(
            _single_piece(constant_piece((0, 0))).partition, [AffinePiece(np.eye(2), (0, 0))]
        )
        assert np.array_equal(u.symmetrized_gradient(0), np.eye(2))

    def test_shear(self):
        u = PiecewiseAffine(
            _single_piece(constant_piece((0, 0))).partition,
            [AffinePiece([[0, 2], [0, 0]], (0, 0))],
        )
        assert np.array_equal(u.symmetrized_gradient(0), [[0, 1], [1, 0]])

    def test_rigid_class_rejects_non_skew(self):
        part = _single_piece(constant_piece((0, 0))).partition
        with pytest.raises(FunctionError):
            PiecewiseRigid(part, [AffinePiece(np.eye(2), (0, 0))])


class TestElementary:
    def test_basic_jump(self):
        u = make_elementary((1, 0), (0, 0), E2, OrientedSquare(E2, 1.0, (0, 0)))
        segs = u.jump_segments()
        assert len(segs) == 1
        s = segs[0]
        assert s.length == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(s.plus(np.array(0.3)), (1, 0))
        assert np.allclose(s.minus(np.array(0.3)), (0, 0))
        assert np.allclose(s.normal, E2)

    def test_equal_values_rejected(self):
        with pytest.raises(FunctionError):
            make_elementary((1, 1), (1, 1), E2, OrientedSquare(E2, 1.0, (0, 0)))

    def test_q6_interface_length(self):
        u = make_elementary((0, 0), (2, 2), E2, OrientedSquare(E2, 6.0, (0, 0)))
        assert total_jump_length(u) == pytest.approx(6.0, abs=1e-12)

    def test_minus_side_swaps_traces(self):
        u = make_elementary((1, 0), (0, 0), E2, OrientedSquare(E2, 1.0, (0, 0)), i_side="minus")
        s = u.jump_segments()[0]
        assert np.allclose(s.plus(np.array(0.0)), (0, 0))
        assert np.allclose(s.minus(np.array(0.0)), (1, 0))

    def test_unit_length_for_random_normals(self):
        rng = np.random.default_rng(11)
        for _ in range(40):
            phi = rng.uniform(0, 2 * np.pi)
            nu = np.array([np.cos(phi), np.sin(phi)])
            u = make_elementary((1, 2), (0, 0), nu, OrientedSquare(nu, 1.0, (0, 0)))
            assert total_jump_length(u) == pytest.approx(1.0, abs=1e-12)


class TestJumpSegments:
    def test_identical_pieces_dropped(self):
        dom = make_oriented_square(E2, 2.0)
        bottom = Polygon([(-1, -1), (1, -1), (1, 0), (-1, 0)])
        top = Polygon([(-1, 0), (1, 0), (1, 1), (-1, 1)])
        part = PolygonalPartition([bottom, top], dom)
        u = PiecewiseRigid(part, [rigid_piece(0.5, (1, 2))] * 2)
        assert u.jump_segments() == []

    def test_coincidence_line_dropped(self):
        # distinct maps that agree exactly along the shared edge y=0: both
        # have first column (0, -w) and b=0, so (t, 0) maps to (0, -w t)
        dom = make_oriented_square(E2, 2.0)
        bottom = Polygon([(-1, -1), (1, -1), (1, 0), (-1, 0)])
        top = Polygon([(-1, 0), (1, 0), (1, 1), (-1, 1)])
        part = PolygonalPartition([bottom, top], dom)
        w = 0.7
        p1 = AffinePiece(skew2(w), (0.0, 0.0))
        p2 = AffinePiece(np.array([[0.0, 0.0], [-w, 0.0]]), (0.0, 0.0))
        u = PiecewiseAffine(part, [p1, p2])
        assert u.jump_segments() == []

    def test_flip_preserves_geometry(self):
        u = make_elementary((1, 0), (0, 0), E2, OrientedSquare(E2, 1.0, (0, 0)))
        s = u.jump_segments()[0]
        f = s.flipped()
        assert np.allclose(f.normal, -s.normal)
        t = np.array(0.25)
        assert np.allclose(f.plus(t), s.minus(np.array(s.length) - t))
        assert np.allclose(f.jump(t), -s.jump(np.array(s.length) - t))


class TestCompactDeviation:
    def test_equal_functions(self):
        u = make_elementary((1, 0), (0, 0), E2, OrientedSquare(E2, 6.0, (0, 0)))
        assert compact_deviation(u, u, margin=100.0)

    def test_boundary_touching_cell(self):
        dom = make_oriented_square(E2, 2.0)
        bottom = Polygon([(-1, -1), (1, -1), (1, 0), (-1, 0)])
        top = Polygon([(-1, 0), (1, 0), (1, 1), (-1, 1)])
        part = PolygonalPartition([bottom, top], dom)
        u = PiecewiseRigid(part, [constant_piece((0, 0)), constant_piece((1, 1))])
        ref = make_elementary((9, 9), (8, 8), E2, OrientedSquare(E2, 2.0, (0, 0)))
        assert not compact_deviation(u, ref, margin=0.1)


class TestScaling:
    def test_values_preserved_lengths_scaled(self):
        u = make_elementary((1, 0), (0, 0), E2, OrientedSquare(E2, 6.0, (0, 0)))
        v = u.scaled(1.0 / 6.0)
        assert v.partition.domain.area == pytest.approx(1.0, rel=1e-12)
        assert total_jump_length(v) == pytest.approx(1.0, abs=1e-12)
        s = v.jump_segments()[0]
        assert np.allclose(s.plus(np.array(0.1)), (1, 0))

    def test_rigid_scaling_stays_rigid(self):
        u = _single_piece(rigid_piece(1.0, (1.0, 1.0)))
        v = u.scaled(0.5)
        assert isinstance(v, PiecewiseRigid)
        assert v.pieces[0].rigid
        # same values at corresponding points: v(s x) == u(x)
        x = np.array((0.3, -0.4))
        assert np.allclose(v.eval(0.5 * x), u.eval(x))


class TestJson:
    def test_round_trip(self):
        u = make_elementary((1, 0), (0, 0), E2, OrientedSquare(E2, 1.0, (0, 0)))
        data = u.to_json()
        back = PiecewiseRigid.from_json(data)
        assert all(p1.same_map(p2) for p1, p2 in zip(u.pieces, back.pieces))
        for c1, c2 in zip(u.partition.cells, back.partition.cells):
            assert np.array_equal(c1.vertices, c2.vertices)

    def test_rigid_piece_serializes_omega(self):
        p = rigid_piece(0.25, (1, 2))
        assert p.to_json() == {"omega": 0.25, "b": [1.0, 2.0]}
