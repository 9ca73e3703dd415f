"""
Tests for hyperbolic core module.

Tests Mobius maps, boundary points, cyclic order, crossing and the
Liouville measure of boxes.

Author: Harsh
"""

import math
import numpy as np
import pytest
from currentkit.errors import (
    DegeneratePoints,
    EllipticElement,
    NonPositiveDeterminant,
    NotHyperbolic,
    OverlappingIntervals,
    SharedEndpoint,
)
from currentkit.hyp_core import (
    BoundaryPoint,
    Classification,
    Geodesic,
    Interval,
    MobiusMap,
    apply,
    axis,
    classify,
    cross,
    cross_ratio,
    liouville_box,
    orient,
    translation_length,
)


@pytest.mark.unit
class TestMobiusMap:
    """Test construction and algebra of Mobius maps."""

    def test_renormalized_to_determinant_one(self):
        """Test that entries are scaled to determinant one."""
        m = MobiusMap((2.0, 0.0, 0.0, 2.0))

        assert m.entries == pytest.approx((1.0, 0.0, 0.0, 1.0))
        assert m.is_identity()

    def test_non_positive_determinant_rejected(self):
        """Test that orientation-reversing matrices are rejected."""
        with pytest.raises(NonPositiveDeterminant):
            MobiusMap((0.0, 1.0, 1.0, 0.0))

    def test_inverse_composes_to_identity(self):
        """Test that m times its inverse is the identity."""
        m = MobiusMap((2.0, 1.0, 1.0, 1.0))

        assert (m @ m.inverse()).is_identity()

    def test_sign_ambiguity(self):
        """Test that M and -M are treated as the same map."""
        m = MobiusMap((2.0, 1.0, 1.0, 1.0))
        negated = MobiusMap((-2.0, -1.0, -1.0, -1.0))

        assert m.close_to(negated)


@pytest.mark.unit
class TestClassification:
    """Test trace classification and translation length."""

    @pytest.mark.parametrize("entries,expected", [
        ((1.0, 0.0, 0.0, 1.0), Classification.IDENTITY),
        ((1.0, 1.0, 0.0, 1.0), Classification.PARABOLIC),
        ((0.0, -1.0, 1.0, 0.0), Classification.ELLIPTIC),
        ((2.0, 0.0, 0.0, 0.5), Classification.HYPERBOLIC),
    ])
    def test_classify(self, entries, expected):
        """Test each conjugacy type."""
        assert classify(MobiusMap(entries)) == expected

    def test_translation_length(self):
        """Test 2*arccosh(|trace|/2) on a trace-3 element."""
        m = MobiusMap((2.0, 1.0, 1.0, 1.0))

        assert translation_length(m) == pytest.approx(1.9248473002, abs=1e-9)

    def test_diagonal_length(self):
        """Test that diag(2, 1/2) translates by 2 log 2."""
        assert translation_length(MobiusMap.diagonal(2.0)) == pytest.approx(2.0 * math.log(2.0))

    def test_parabolic_has_zero_length(self):
        """Test that parabolic elements translate by zero."""
        assert translation_length(MobiusMap((1.0, 1.0, 0.0, 1.0))) == 0.0

    def test_elliptic_raises(self):
        """Test that elliptic elements have no translation length."""
        with pytest.raises(EllipticElement):
            translation_length(MobiusMap((0.0, -1.0, 1.0, 0.0)))


@pytest.mark.unit
class TestBoundaryPoints:
    """Test boundary points, the action and the axis."""

    def test_infinity_is_angle_zero(self):
        """Test the chart position of the point at infinity."""
        assert BoundaryPoint.from_chart(math.inf).phi == 0.0
        assert BoundaryPoint(0.0).chart == math.inf

    def test_chart_round_trip(self):
        """Test that chart coordinates are recovered."""
        assert BoundaryPoint.from_chart(-2.5).chart == pytest.approx(-2.5)

    def test_equality_is_tolerant(self):
        """Test that nearby angles compare equal and points are unhashable."""
        p = BoundaryPoint(1.0)

        assert p == BoundaryPoint(1.0 + 1e-12)
        assert p != BoundaryPoint(1.1)
        with pytest.raises(TypeError):
            hash(p)

    def test_apply_translation(self):
        """Test that t -> t + 1 moves 2 to 3."""
        image = apply(MobiusMap((1.0, 1.0, 0.0, 1.0)), BoundaryPoint.from_chart(2.0))

        assert image.chart == pytest.approx(3.0)

    def test_axis_of_diagonal(self):
        """Test that t -> 4t attracts to infinity and repels from zero."""
        attracting, repelling = axis(MobiusMap.diagonal(2.0))

        assert attracting == BoundaryPoint.from_chart(math.inf)
        assert repelling == BoundaryPoint.from_chart(0.0)

    def test_axis_points_are_fixed(self):
        """Test that both axis endpoints are fixed by the map."""
        m = MobiusMap((2.0, 1.0, 1.0, 1.0))
        for point in axis(m):
            assert apply(m, point) == point

    def test_axis_of_parabolic_raises(self):
        """Test that only hyperbolic maps have an axis."""
        with pytest.raises(NotHyperbolic):
            axis(MobiusMap((1.0, 1.0, 0.0, 1.0)))


@pytest.mark.unit
class TestCyclicOrder:
    """Test orientation, intervals and crossing."""

    def test_orient(self):
        """Test the counterclockwise order predicate."""
        a, b, c = BoundaryPoint(0.0), BoundaryPoint(1.0), BoundaryPoint(2.0)

        assert orient(a, b, c) is True
        assert orient(a, c, b) is False
        assert orient(b, c, a) is True

    def test_orient_degenerate(self):
        """Test that coincident points are rejected."""
        with pytest.raises(DegeneratePoints):
            orient(BoundaryPoint(0.5), BoundaryPoint(0.5), BoundaryPoint(2.0))

    def test_interval_closure_flags(self):
        """Test open and closed interval ends."""
        a, b = BoundaryPoint(0.0), BoundaryPoint(2.0)
        half_open = Interval(a, b, closed_start=True)

        assert half_open.contains(a) is True
        assert half_open.contains(b) is False
        assert half_open.contains(BoundaryPoint(1.0)) is True
        assert half_open.contains(BoundaryPoint(3.0)) is False

    def test_linked_geodesics_cross(self):
        """Test that the geodesics (-1, 1) and (0, inf) cross."""
        assert cross(Geodesic.from_chart(-1.0, 1.0), Geodesic.from_chart(0.0, math.inf)) is True

    def test_unlinked_geodesics_do_not_cross(self):
        """Test that nested endpoint pairs do not cross."""
        assert cross(Geodesic.from_chart(1.0, 2.0), Geodesic.from_chart(3.0, 4.0)) is False
        assert cross(Geodesic.from_chart(-5.0, 5.0), Geodesic.from_chart(-1.0, 1.0)) is False

    def test_shared_endpoint_raises(self):
        """Test that asymptotic geodesics are not transverse."""
        with pytest.raises(SharedEndpoint):
            cross(Geodesic.from_chart(0.0, 1.0), Geodesic.from_chart(1.0, 2.0))

    def test_degenerate_geodesic(self):
        """Test that a geodesic needs two distinct endpoints."""
        with pytest.raises(DegeneratePoints):
            Geodesic.from_chart(1.0, 1.0)


@pytest.mark.unit
class TestLiouvilleMeasure:
    """Test cross ratios and Liouville boxes."""

    def test_cross_ratio_matches_chart_formula(self):
        """Test (a-c)(b-d)/((a-d)(b-c)) at 0, 1, 2, 3."""
        a, b, c, d = (BoundaryPoint.from_chart(t) for t in (0.0, 1.0, 2.0, 3.0))

        assert cross_ratio(a, b, c, d) == pytest.approx(4.0 / 3.0)

    def test_box_normalization(self):
        """Test that the fundamental box of g has measure equal to its length."""
        g = MobiusMap.diagonal(2.0)
        attracting, repelling = axis(g)
        z = BoundaryPoint.from_chart(1.0)

        assert liouville_box(attracting, repelling, z, apply(g, z)) == pytest.approx(translation_length(g))

    def test_linked_box_rejected(self):
        """Test that linked intervals do not form a box."""
        a, b, c, d = (BoundaryPoint.from_chart(t) for t in (0.0, 2.0, 1.0, 3.0))

        with pytest.raises(OverlappingIntervals):
            liouville_box(a, b, c, d)

    def test_shared_corner_rejected(self):
        """Test that box corners must be distinct."""
        a, b, d = (BoundaryPoint.from_chart(t) for t in (0.0, 1.0, 3.0))

        with pytest.raises(OverlappingIntervals):
            liouville_box(a, b, b, d)


def _random_map(rng):
    """Determinant-one map with moderate entries."""
    a = rng.uniform(0.5, 2.0)
    b, c = rng.uniform(-2.0, 2.0, size=2)
    return MobiusMap((a, b, c, (1.0 + b * c) / a))


def _random_hyperbolic(rng):
    """Map with trace at least three."""
    a, d = rng.uniform(1.5, 3.0, size=2)
    b = rng.uniform(0.5, 2.0)
    return MobiusMap((a, b, (a * d - 1.0) / b, d))


def _spread_angles(rng, n, gap=0.05):
    """n distinct angles at pairwise circular distance at least gap."""
    while True:
        phis = rng.uniform(0.0, 2.0 * math.pi, size=n)
        points = [BoundaryPoint(phi) for phi in phis]
        if all(p.distance(q) >= gap for i, p in enumerate(points) for q in points[i + 1:]):
            return points


@pytest.mark.unit
class TestInvariance:
    """Test that the primitives respect the Mobius action."""

    def test_apply_composition(self):
        """Test that (m1 m2)(p) = m1(m2(p))."""
        rng = np.random.default_rng(3)
        for _ in range(50):
            m1, m2 = _random_map(rng), _random_map(rng)
            p = BoundaryPoint(rng.uniform(0.0, 2.0 * math.pi))

            assert apply(m1 @ m2, p).distance(apply(m1, apply(m2, p))) < 1e-10

    def test_box_additive(self):
        """Test that splitting ]c, d[ at e splits the measure."""
        rng = np.random.default_rng(5)
        for _ in range(50):
            a, b = sorted(rng.uniform(0.2, 1.5, size=2))
            c, e, d = sorted(rng.uniform(2.0, 6.0, size=3))
            a, b, c, e, d = (BoundaryPoint(phi) for phi in (a, b, c, e, d))

            whole = liouville_box(a, b, c, d)
            parts = liouville_box(a, b, c, e) + liouville_box(a, b, e, d)

            assert whole == pytest.approx(parts, abs=1e-10)

    def test_box_invariant(self):
        """Test that the measure of a box is unchanged by a Mobius map."""
        rng = np.random.default_rng(8)
        for _ in range(50):
            a, b = sorted(rng.uniform(0.2, 1.5, size=2))
            c, d = sorted(rng.uniform(2.0, 6.0, size=2))
            corners = [BoundaryPoint(phi) for phi in (a, b, c, d)]
            m = _random_map(rng)

            assert liouville_box(*(apply(m, p) for p in corners)) == pytest.approx(liouville_box(*corners), rel=1e-9)

    def test_translation_length_conjugation(self):
        """Test that length is a conjugacy invariant."""
        rng = np.random.default_rng(13)
        for _ in range(50):
            g, h = _random_hyperbolic(rng), _random_map(rng)

            assert translation_length(h @ g @ h.inverse()) == pytest.approx(translation_length(g), rel=1e-9)

    def test_cross_symmetric_and_invariant(self):
        """Test that crossing ignores argument order and survives translation."""
        rng = np.random.default_rng(21)
        for _ in range(50):
            p1, q1, p2, q2 = _spread_angles(rng, 4)
            g1, g2 = Geodesic(p1, q1), Geodesic(p2, q2)
            m = _random_map(rng)
            expected = cross(g1, g2)

            assert cross(g2, g1) == expected
            assert cross(Geodesic(q1, p1), g2) == expected
            assert cross(g1.translate(m), g2.translate(m)) == expected
