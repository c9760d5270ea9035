"""Domains, point generation and complement decomposition."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gimqfrac.geometry import (
    Interval,
    LShape,
    PointSet,
    QuadPiece,
    Rectangle,
    RectangleWithHole,
    complement_decomposition,
    evaluation_points,
    midpoint_grid,
    points_near_count,
    uniform_points,
)

DOMAINS = {
    "interval": Interval(-1.0, 1.0),
    "square": Rectangle(-1.0, 1.0, -1.0, 1.0),
    "lshape": LShape(),
    "hole": RectangleWithHole(Rectangle(-2.0, 2.0, -2.0, 2.0),
                              Rectangle(0.5, 1.5, 0.5, 1.5)),
}


def _piece_counts(domain, pts):
    return sum(p.contains(pts).astype(int) for p in complement_decomposition(domain))


class TestUniformPoints:
    def test_interval_resolution_5(self):
        ps = uniform_points(Interval(-1.0, 1.0), 5)
        np.testing.assert_array_equal(np.sort(ps.points[:, 0]), [-1.0, -0.5, 0.0, 0.5, 1.0])
        assert ps.m == 3
        np.testing.assert_array_equal(np.sort(ps.boundary[:, 0]), [-1.0, 1.0])
        assert ps.shape is None

    def test_interval_resolution_17(self):
        ps = uniform_points(Interval(-1.0, 1.0), 17)
        assert ps.n_bar == 17
        np.testing.assert_allclose(np.diff(np.sort(ps.points[:, 0])), 0.125, rtol=1e-14)

    def test_square_resolution_5(self):
        ps = uniform_points(DOMAINS["square"], 5)
        assert (ps.n_bar, ps.m) == (25, 9)

    def test_lshape_ladder(self):
        counts = [uniform_points(LShape(), r).n_bar for r in (5, 9, 13, 17, 21)]
        assert counts == [21, 65, 133, 225, 341]

    def test_hole_counts(self):
        dom = DOMAINS["hole"]
        assert points_near_count(dom, 300).n_bar == 280
        assert points_near_count(dom, 600).n_bar == 600

    def test_hole_boundary_carries_points(self):
        ps = points_near_count(DOMAINS["hole"], 300)
        on_hole = DOMAINS["hole"].hole.in_closure(ps.boundary)
        assert np.count_nonzero(on_hole) == 16

    @pytest.mark.parametrize("name", list(DOMAINS))
    def test_classification_round_trip(self, name):
        dom = DOMAINS[name]
        ps = uniform_points(dom, 9)
        assert np.all(dom.on_boundary(ps.boundary))
        assert np.all(dom.contains(ps.interior))
        assert not np.any(dom.on_boundary(ps.interior))
        # interior points keep a positive distance from every complement piece
        for piece in complement_decomposition(dom):
            lo = np.where(np.isfinite(piece.lo), piece.lo, -1e300)
            hi = np.where(np.isfinite(piece.hi), piece.hi, 1e300)
            gap = np.maximum(lo - ps.interior, ps.interior - hi).max(axis=1)
            assert np.all(gap > 0)

    def test_rejects_tiny_resolution(self):
        with pytest.raises(ValueError):
            uniform_points(Interval(-1.0, 1.0), 1)
        with pytest.raises(ValueError):
            uniform_points(Interval(-1.0, 1.0), 2)


class TestDecomposition:
    def test_interval(self):
        pieces = complement_decomposition(Interval(-1.0, 1.0))
        assert pieces == [QuadPiece((-np.inf,), (-1.0,)), QuadPiece((1.0,), (np.inf,))]

    def test_rectangle_has_eight_unbounded(self):
        pieces = complement_decomposition(DOMAINS["square"])
        assert len(pieces) == 8 and not any(p.bounded for p in pieces)

    def test_hole(self):
        pieces = complement_decomposition(DOMAINS["hole"])
        assert len(pieces) == 9
        assert QuadPiece((0.5, 0.5), (1.5, 1.5)) in pieces

    def test_lshape(self):
        pieces = complement_decomposition(LShape())
        assert len(pieces) == 9
        bounded = [p for p in pieces if p.bounded]
        assert bounded == [QuadPiece((0.0, 0.0), (1.0, 1.0))]

    @pytest.mark.parametrize("name", list(DOMAINS))
    def test_indicator_consistency(self, name):
        dom = DOMAINS[name]
        rng = np.random.default_rng(11)
        pts = rng.uniform(-4.0, 4.0, size=(10_000, dom.dim))
        # half the points snapped to a 1/8 grid so boundaries are hit exactly
        pts[::2] = np.round(pts[::2] * 8) / 8
        bnd = dom.on_boundary(pts)
        inside = dom.contains(pts)
        counts = _piece_counts(dom, pts)
        assert not np.any(bnd & inside)
        assert np.all(counts[bnd] >= 1)
        off = ~bnd
        # away from the boundary: exactly one of the domain or the pieces
        assert np.all(inside[off] == (counts[off] == 0))
        # generic points lie in exactly one piece (overlaps have measure zero)
        generic = off & ~inside
        generic[::2] = False
        assert np.all(counts[generic] == 1)
        assert np.count_nonzero(bnd) > 50


class TestDomainValidation:
    def test_hole_must_be_strictly_inside(self):
        with pytest.raises(ValueError):
            RectangleWithHole(Rectangle(-1, 1, -1, 1), Rectangle(0, 1, 0, 0.5))

    def test_notch_must_be_a_corner(self):
        with pytest.raises(ValueError):
            LShape(Rectangle(-1, 1, -1, 1), Rectangle(-0.5, 0.5, -0.5, 0.5))

    def test_empty_interval(self):
        with pytest.raises(ValueError):
            Interval(1.0, 1.0)

    def test_shifted_domain_moves_pieces(self):
        dom = DOMAINS["hole"].shifted((0.3, -0.2))
        assert QuadPiece((0.8, 0.3), (1.8, 1.3)) in complement_decomposition(dom)


class TestPointSet:
    def test_rejects_duplicates(self):
        with pytest.raises(ValueError):
            PointSet([[0.0], [0.0]], [[1.0]])

    def test_rejects_nonpositive_shape(self):
        with pytest.raises(ValueError):
            PointSet([[0.0]], [[1.0]], shape=[1.0, 0.0])

    def test_rejects_wrong_shape_length(self):
        with pytest.raises(ValueError):
            PointSet([[0.0]], [[1.0]], shape=[1.0])

    def test_counts_and_order(self):
        ps = PointSet([[0.0, 0.0], [0.5, 0.0]], [[1.0, 0.0]])
        assert (ps.dim, ps.m, ps.n_bar) == (2, 2, 3)
        np.testing.assert_array_equal(ps.points[-1], [1.0, 0.0])

    def test_csv_round_trip(self, tmp_path):
        ps = uniform_points(LShape(), 5)
        ps = ps.with_shape(np.linspace(0.5, 3.0, ps.n_bar))
        path = tmp_path / "points.csv"
        ps.to_csv(path)
        back = PointSet.from_csv(path)
        np.testing.assert_array_equal(back.interior, ps.interior)
        np.testing.assert_array_equal(back.boundary, ps.boundary)
        np.testing.assert_array_equal(back.shape, ps.shape)
        assert path.read_text().splitlines()[0] == "x,y,role,epsilon"

    def test_csv_without_shape(self, tmp_path):
        ps = uniform_points(Interval(-1.0, 1.0), 5)
        ps.to_csv(tmp_path / "p.csv")
        back = PointSet.from_csv(tmp_path / "p.csv")
        assert back.shape is None and back.n_bar == 5

    @given(st.integers(3, 40))
    @settings(max_examples=20, deadline=None)
    def test_interval_counts(self, res):
        ps = uniform_points(Interval(-1.0, 1.0), res)
        assert ps.n_bar == res and ps.m == res - 2


class TestEvaluationGrids:
    def test_default_1d(self):
        x = evaluation_points(Interval(-1.0, 1.0))
        assert x.shape == (1000, 1) and x[0, 0] == -1.0 and x[-1, 0] == 1.0

    def test_2d_clipped(self):
        x = evaluation_points(LShape())
        assert np.all(LShape().in_closure(x))
        assert len(x) < 101 * 101

    @pytest.mark.parametrize("name", ["square", "lshape", "hole"])
    def test_midpoint_area(self, name):
        dom = DOMAINS[name]
        area = {"square": 4.0, "lshape": 3.0, "hole": 15.0}[name]
        # 80 cells align with every edge; 100 cells cut the hole edges
        centers, vol = midpoint_grid(dom, 80)
        assert len(centers) * vol == pytest.approx(area, rel=1e-12)
        centers, vol = midpoint_grid(dom, 100)
        assert len(centers) * vol == pytest.approx(area, rel=1e-2)
