"""
Hyperbolic Core for CurrentKit

Mobius maps in SL(2,R), points of the boundary circle of the hyperbolic plane,
cyclic order, geodesic crossing and the Liouville measure of boxes.

A boundary point is stored by its doubled projective angle: the line (x:y)
sits at phi = 2*atan2(y, x) mod 2*pi. In the upper-half-plane chart the real
point t is the line (t:1) and infinity is (1:0). Moving counterclockwise
(increasing phi) walks the real line in decreasing t.

Author: Harsh
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Tuple, Union

import numpy as np

from .errors import (
    DegeneratePoints,
    EllipticElement,
    NonPositiveDeterminant,
    NotHyperbolic,
    OverlappingIntervals,
    SharedEndpoint,
)

logger = logging.getLogger(__name__)

TOL_PT = 1e-9
TOL_CLASS = 1e-9
TOL_IDENTITY = 1e-8
TWO_PI = 2.0 * math.pi

# angles this close to 2*pi are the point at infinity
_WRAP_SNAP = 1e-10


def _canonical_angle(phi: float) -> float:
    phi = math.fmod(phi, TWO_PI)
    if phi < 0.0:
        phi += TWO_PI
    if phi > TWO_PI - _WRAP_SNAP:
        phi = 0.0
    return phi


def boundary_angles(vectors: np.ndarray) -> np.ndarray:
    """
    Vectorized doubled projective angle.

    Args:
        vectors: array of shape (..., 2) holding (x, y) representatives

    Returns:
        Array of shape (...) with angles in [0, 2*pi)
    """
    phi = np.mod(2.0 * np.arctan2(vectors[..., 1], vectors[..., 0]), TWO_PI)
    return np.where(phi > TWO_PI - _WRAP_SNAP, 0.0, phi)


class Classification(str, Enum):
    """Conjugacy type of an element of PSL(2,R)."""

    IDENTITY = "identity"
    ELLIPTIC = "elliptic"
    PARABOLIC = "parabolic"
    HYPERBOLIC = "hyperbolic"


@dataclass(frozen=True, eq=False)
class BoundaryPoint:
    """
    A point of the boundary circle.

    Two points are equal when their angular distance is below TOL_PT, so
    points are deliberately unhashable.

    Example:
        >>> BoundaryPoint.from_chart(math.inf).phi
        0.0
    """

    phi: float

    def __post_init__(self):
        object.__setattr__(self, "phi", _canonical_angle(float(self.phi)))

    __hash__ = None  # type: ignore[assignment]

    @classmethod
    def from_vector(cls, x: float, y: float) -> "BoundaryPoint":
        if x == 0.0 and y == 0.0:
            raise DegeneratePoints("The zero vector is not a projective point")
        return cls(2.0 * math.atan2(y, x))

    @classmethod
    def from_chart(cls, t: float) -> "BoundaryPoint":
        """Point of the upper-half-plane chart; math.inf is the point at infinity."""
        if math.isinf(t):
            return cls(0.0)
        return cls.from_vector(t, 1.0)

    @property
    def vector(self) -> np.ndarray:
        half = self.phi / 2.0
        return np.array([math.cos(half), math.sin(half)])

    @property
    def chart(self) -> float:
        if self.phi == 0.0:
            return math.inf
        return 1.0 / math.tan(self.phi / 2.0)

    def distance(self, other: "BoundaryPoint") -> float:
        d = abs(self.phi - other.phi) % TWO_PI
        return min(d, TWO_PI - d)

    def coincides(self, other: "BoundaryPoint", tol: float = TOL_PT) -> bool:
        return self.distance(other) < tol

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BoundaryPoint):
            return NotImplemented
        return self.coincides(other)

    def __repr__(self) -> str:
        return f"BoundaryPoint(phi={self.phi:.12g})"


@dataclass(frozen=True)
class MobiusMap:
    """
    Determinant-one 2x2 real matrix acting on the boundary circle.

    Entries are row-major and renormalized by 1/sqrt(det) on construction;
    non-positive determinants are rejected. M and -M act identically.

    Example:
        >>> m = MobiusMap((2.0, 1.0, 1.0, 1.0))
        >>> round(translation_length(m), 10)
        1.9248473002
    """

    entries: Tuple[float, float, float, float]

    def __post_init__(self):
        a, b, c, d = (float(v) for v in self.entries)
        det = a * d - b * c
        if not det > 0.0:
            raise NonPositiveDeterminant(f"Matrix {self.entries} has determinant {det}")
        scale = 1.0 / math.sqrt(det)
        object.__setattr__(self, "entries", (a * scale, b * scale, c * scale, d * scale))

    @classmethod
    def from_matrix(cls, matrix: Union[np.ndarray, Iterable[Iterable[float]]]) -> "MobiusMap":
        arr = np.asarray(matrix, dtype=float).reshape(2, 2)
        return cls((arr[0, 0], arr[0, 1], arr[1, 0], arr[1, 1]))

    @classmethod
    def identity(cls) -> "MobiusMap":
        return cls((1.0, 0.0, 0.0, 1.0))

    @classmethod
    def diagonal(cls, eigenvalue: float) -> "MobiusMap":
        return cls((eigenvalue, 0.0, 0.0, 1.0 / eigenvalue))

    @property
    def matrix(self) -> np.ndarray:
        a, b, c, d = self.entries
        return np.array([[a, b], [c, d]])

    @property
    def trace(self) -> float:
        return self.entries[0] + self.entries[3]

    def inverse(self) -> "MobiusMap":
        a, b, c, d = self.entries
        return MobiusMap((d, -b, -c, a))

    def compose(self, other: "MobiusMap") -> "MobiusMap":
        """Matrix product self * other (apply other first)."""
        a, b, c, d = self.entries
        e, f, g, h = other.entries
        return MobiusMap((a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h))

    def __matmul__(self, other: "MobiusMap") -> "MobiusMap":
        return self.compose(other)

    def __call__(self, point: BoundaryPoint) -> BoundaryPoint:
        return apply(self, point)

    def act_on_upper_half_plane(self, z: complex) -> complex:
        a, b, c, d = self.entries
        return (a * z + b) / (c * z + d)

    def close_to(self, other: "MobiusMap", tol: float = TOL_IDENTITY) -> bool:
        """Entrywise equality up to sign."""
        mine = np.array(self.entries)
        theirs = np.array(other.entries)
        return bool(np.max(np.abs(mine - theirs)) < tol or np.max(np.abs(mine + theirs)) < tol)

    def is_identity(self, tol: float = TOL_IDENTITY) -> bool:
        return self.close_to(MobiusMap.identity(), tol)


def classify(m: MobiusMap, tol_class: float = TOL_CLASS) -> Classification:
    """Classify by |trace|: >2 hyperbolic, =2 parabolic, <2 elliptic."""
    if m.is_identity():
        return Classification.IDENTITY
    t = abs(m.trace)
    if t > 2.0 + tol_class:
        return Classification.HYPERBOLIC
    if t >= 2.0 - tol_class:
        return Classification.PARABOLIC
    return Classification.ELLIPTIC


def orient(a: BoundaryPoint, b: BoundaryPoint, c: BoundaryPoint, tol: float = TOL_PT) -> bool:
    """
    Cyclic order predicate.

    Returns:
        True iff walking counterclockwise from a meets b before c

    Raises:
        DegeneratePoints: if two of the points coincide within tol
    """
    if a.coincides(b, tol) or a.coincides(c, tol) or b.coincides(c, tol):
        raise DegeneratePoints(f"Points {a}, {b}, {c} are not pairwise distinct")
    return (b.phi - a.phi) % TWO_PI < (c.phi - a.phi) % TWO_PI


def apply(m: MobiusMap, p: BoundaryPoint) -> BoundaryPoint:
    """Projective action of m on the boundary point p."""
    x, y = m.matrix @ p.vector
    return BoundaryPoint.from_vector(float(x), float(y))


def _eigenvector(entries: Tuple[float, float, float, float], lam: float) -> Tuple[float, float]:
    a, b, c, d = entries
    first = (b, lam - a)
    second = (lam - d, c)
    if math.hypot(*first) >= math.hypot(*second):
        return first
    return second


def axis(m: MobiusMap, tol_class: float = TOL_CLASS) -> Tuple[BoundaryPoint, BoundaryPoint]:
    """
    Fixed points of a hyperbolic map.

    Returns:
        (attracting, repelling) boundary points

    Raises:
        NotHyperbolic: if |trace| <= 2 + tol_class
    """
    if classify(m, tol_class) != Classification.HYPERBOLIC:
        raise NotHyperbolic(f"Element with trace {m.trace:.12g} is not hyperbolic")
    tr = m.trace
    big = (tr + math.copysign(math.sqrt(tr * tr - 4.0), tr)) / 2.0
    attracting = BoundaryPoint.from_vector(*_eigenvector(m.entries, big))
    repelling = BoundaryPoint.from_vector(*_eigenvector(m.entries, 1.0 / big))
    return attracting, repelling


def translation_length(m: MobiusMap, tol_class: float = TOL_CLASS) -> float:
    """
    Hyperbolic translation length 2*arccosh(|trace|/2).

    Raises:
        EllipticElement: for elliptic input
    """
    kind = classify(m, tol_class)
    if kind == Classification.ELLIPTIC:
        raise EllipticElement(f"Elliptic element (trace {m.trace:.12g}) has no translation length")
    if kind != Classification.HYPERBOLIC:
        return 0.0
    return 2.0 * math.acosh(abs(m.trace) / 2.0)


@dataclass(frozen=True, eq=False)
class Geodesic:
    """Unordered pair of distinct boundary points."""

    p: BoundaryPoint
    q: BoundaryPoint

    def __post_init__(self):
        if self.p.coincides(self.q):
            raise DegeneratePoints(f"Geodesic endpoints {self.p} and {self.q} coincide")

    __hash__ = None  # type: ignore[assignment]

    @classmethod
    def from_angles(cls, phi1: float, phi2: float) -> "Geodesic":
        return cls(BoundaryPoint(phi1), BoundaryPoint(phi2))

    @classmethod
    def from_chart(cls, t1: float, t2: float) -> "Geodesic":
        return cls(BoundaryPoint.from_chart(t1), BoundaryPoint.from_chart(t2))

    @property
    def endpoints(self) -> Tuple[BoundaryPoint, BoundaryPoint]:
        return self.p, self.q

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Geodesic):
            return NotImplemented
        return (self.p == other.p and self.q == other.q) or (self.p == other.q and self.q == other.p)

    def translate(self, m: MobiusMap) -> "Geodesic":
        return Geodesic(apply(m, self.p), apply(m, self.q))


def axis_geodesic(m: MobiusMap) -> Geodesic:
    attracting, repelling = axis(m)
    return Geodesic(attracting, repelling)


@dataclass(frozen=True, eq=False)
class Interval:
    """
    Arc of the circle running counterclockwise from a to b.

    The closure flags say whether a and b themselves belong to the arc.
    """

    a: BoundaryPoint
    b: BoundaryPoint
    closed_start: bool = False
    closed_end: bool = False

    def __post_init__(self):
        if self.a.coincides(self.b):
            raise DegeneratePoints("Interval endpoints coincide")

    def contains(self, x: BoundaryPoint, tol: float = TOL_PT) -> bool:
        if x.coincides(self.a, tol):
            return self.closed_start
        if x.coincides(self.b, tol):
            return self.closed_end
        return orient(self.a, x, self.b, tol)


def _strictly_between(a: BoundaryPoint, b: BoundaryPoint, x: BoundaryPoint) -> bool:
    return (x.phi - a.phi) % TWO_PI < (b.phi - a.phi) % TWO_PI


def cross(g1: Geodesic, g2: Geodesic, tol: float = TOL_PT) -> bool:
    """
    Transverse crossing of two geodesics (linking of endpoint pairs).

    Raises:
        SharedEndpoint: when the geodesics have a common endpoint
    """
    for u in g1.endpoints:
        for v in g2.endpoints:
            if u.coincides(v, tol):
                raise SharedEndpoint(f"Geodesics share the endpoint {u}")
    return _strictly_between(g1.p, g1.q, g2.p) != _strictly_between(g1.p, g1.q, g2.q)


def _det(u: BoundaryPoint, v: BoundaryPoint) -> float:
    return math.sin((v.phi - u.phi) / 2.0)


def cross_ratio(a: BoundaryPoint, b: BoundaryPoint, c: BoundaryPoint, d: BoundaryPoint) -> float:
    """(a-c)(b-d)/((a-d)(b-c)) computed without a chart."""
    return (_det(a, c) * _det(b, d)) / (_det(a, d) * _det(b, c))


def liouville_box(
    a: BoundaryPoint, b: BoundaryPoint, c: BoundaryPoint, d: BoundaryPoint, tol: float = TOL_PT
) -> float:
    """
    Liouville measure of the box ]a,b[ x ]c,d[.

    Normalized so that the box (g+, g-, z, gz) of a hyperbolic g has measure
    equal to the translation length of g.

    Raises:
        OverlappingIntervals: when {a,b} and {c,d} are linked or share a point
    """
    points = (a, b, c, d)
    for i in range(4):
        for j in range(i + 1, 4):
            if points[i].coincides(points[j], tol):
                raise OverlappingIntervals("Box corners must be four distinct points")
    if _strictly_between(a, b, c) != _strictly_between(a, b, d):
        raise OverlappingIntervals("The intervals of a Liouville box must have disjoint closures")
    return abs(math.log(abs(cross_ratio(a, b, c, d))))


@dataclass(frozen=True, eq=False)
class AxisFrame:
    """
    Chart adapted to a hyperbolic element g.

    `transform` sends the repelling point to 0 and the attracting point to
    infinity, so g acts as t -> exp(length) * t. Positions along the axis are
    log-heights: the axis point i*y has position log(y), and a boundary point
    t has position log|t|.
    """

    transform: np.ndarray
    length: float
    center: float

    def positions(self, vectors: np.ndarray, tol: float = TOL_PT) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Chart data of boundary points given as (..., 2) vectors.

        Returns:
            (position, sign, on_axis): log|t|, sign of t, and a mask of points
            that coincide with an endpoint of the axis
        """
        image = vectors @ self.transform.T
        x = image[..., 0]
        y = image[..., 1]
        norm2 = x * x + y * y
        on_axis = np.abs(x * y) <= tol * norm2
        with np.errstate(divide="ignore"):
            position = np.log(np.abs(x)) - np.log(np.abs(y))
        return position, np.sign(x * y), on_axis

    def boundary_point(self, position: float, sign: float = -1.0) -> BoundaryPoint:
        """Boundary point at chart coordinate sign * exp(position)."""
        inverse = np.linalg.inv(self.transform)
        x, y = inverse @ np.array([sign * math.exp(position), 1.0])
        return BoundaryPoint.from_vector(float(x), float(y))


def axis_frame(m: MobiusMap, tol_class: float = TOL_CLASS) -> AxisFrame:
    """Build the chart adapted to the axis of a hyperbolic map."""
    attracting, repelling = axis(m, tol_class)
    xp, yp = attracting.vector
    xm, ym = repelling.vector
    transform = np.array([[ym, -xm], [yp, -xp]])
    det = float(np.linalg.det(transform))
    if det < 0.0:
        transform[0] = -transform[0]
        det = -det
    transform = transform / math.sqrt(det)
    image_of_i = (transform[0, 0] * 1j + transform[0, 1]) / (transform[1, 0] * 1j + transform[1, 1])
    return AxisFrame(
        transform=transform,
        length=translation_length(m, tol_class),
        center=math.log(abs(image_of_i)),
    )
