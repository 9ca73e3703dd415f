"""
Geodesic Currents for CurrentKit

Discrete currents (weighted sums of closed geodesics, optionally plus a
multiple of the Liouville current) and the intersection engine.

Intersection numbers are counted with the box formula: for a hyperbolic g
with axis frame t -> exp(l) t, every <g>-orbit of lifts crossing the axis
has exactly one member whose crossing point lies on the fundamental segment
[z, gz[. Each crossing lift eta*A found in the ball is moved by g^-k so its
crossing point lands on that segment, its endpoints are recomputed from the
short word g^-k * eta, and the distinct lifts obtained are the orbits.
Recomputing from the short word keeps far-away lifts, whose ball matrices
are large, from being counted twice.

Author: Harsh
"""

from __future__ import annotations

import json
import logging
import math
import re
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import DegenerateBasePoint, InputError, InvalidCurrent, SharedEndpoint
from .hyp_core import (
    TOL_CLASS,
    TOL_PT,
    TWO_PI,
    AxisFrame,
    Classification,
    Geodesic,
    apply,
    axis,
    axis_frame,
    classify,
    cross,
    liouville_box,
    translation_length,
)
from .retry_utils import call_with_jitter
from .surface_group import (
    ConjClass,
    SurfacePresentation,
    Word,
    axis_orbit,
    canonical_conj,
    cyclic_words,
    evaluate,
    is_peripheral,
    is_proper_power,
    primitive_root,
    reduce,
    torus_curve,
    word_key,
    word_power,
)
from .workers import parallel_map

logger = logging.getLogger(__name__)

# positions along an axis are log-heights; two crossings closer than this are one
POSITION_TOL = 1e-7


@dataclass(frozen=True)
class CountingSettings:
    """
    Knobs of the counting engine.

    Attributes:
        margin: hyperbolic distance around the fundamental segment within
            which every witness must lie for a count to be stabilized
        max_attempts: base-point retries
        jitter: base-point offset added per retry
        cap: Cayley-ball element cap (None means the library default)
        tol_pt: boundary points closer than this coincide
        tol_class: |trace| - 2 threshold separating parabolic from hyperbolic
    """

    margin: float = 2.0
    max_attempts: int = 20
    jitter: float = 1e-3
    cap: Optional[int] = None
    tol_pt: float = TOL_PT
    tol_class: float = TOL_CLASS

    @classmethod
    def from_config(cls, config: Any) -> "CountingSettings":
        counting = config.get_counting_config()
        base_point = config.get_base_point_config()
        tolerances = config.get_tolerances()
        return cls(
            margin=counting["stabilization_margin"],
            max_attempts=base_point["max_attempts"],
            jitter=base_point["jitter"],
            cap=config.get_element_cap(),
            tol_pt=tolerances["tol_pt"],
            tol_class=tolerances["tol_class"],
        )


DEFAULT_SETTINGS = CountingSettings()


@dataclass(frozen=True)
class DiscreteCurrent:
    """
    mu = sum of weight * delta_c over atoms, plus liouville_weight * L.

    Atoms are canonical classes, pairwise distinct, with positive weights.
    Use from_pairs to build a current validated against a surface.
    """

    atoms: Tuple[Tuple[ConjClass, float], ...] = ()
    liouville_weight: float = 0.0

    def __post_init__(self):
        if self.liouville_weight < 0.0:
            raise InvalidCurrent(f"Liouville weight must be non-negative, got {self.liouville_weight}")
        if not self.atoms and self.liouville_weight == 0.0:
            raise InvalidCurrent("A current needs at least one atom or a Liouville part")
        classes = [c for c, _ in self.atoms]
        if len(set(classes)) != len(classes):
            raise InvalidCurrent("Atoms must be pairwise distinct classes")
        for c, weight in self.atoms:
            if c.is_trivial:
                raise InvalidCurrent("The trivial class cannot carry a current")
            if not weight > 0.0:
                raise InvalidCurrent(f"Weight of {c.word} must be positive, got {weight}")

    @classmethod
    def from_pairs(
        cls,
        pairs: Iterable[Tuple[Union[str, Sequence[int], ConjClass], float]],
        surface: SurfacePresentation,
        liouville_weight: float = 0.0,
        tol_class: float = TOL_CLASS,
    ) -> "DiscreteCurrent":
        """
        Build a current from (word, weight) pairs, merging repeated classes.

        Args:
            tol_class: classification tolerance for the hyperbolicity check

        Raises:
            InvalidCurrent: for trivial, non-hyperbolic or peripheral atoms,
                or non-positive weights
        """
        merged: Dict[ConjClass, float] = {}
        for item, weight in pairs:
            if isinstance(item, ConjClass):
                c = canonical_conj(item.word, surface)
                label = surface.format(item.word)
            elif isinstance(item, str):
                c = canonical_conj(surface.parse(item), surface)
                label = item
            else:
                c = canonical_conj(tuple(item), surface)
                label = surface.format(tuple(item))
            if not float(weight) > 0.0:
                raise InvalidCurrent(f"Atom {label}: weight must be positive, got {weight}")
            if c.is_trivial:
                raise InvalidCurrent(f"Atom {label}: trivial class")
            kind = classify(evaluate(c.word, surface), tol_class)
            if kind != Classification.HYPERBOLIC:
                raise InvalidCurrent(f"Atom {label}: element is {kind.value}, not hyperbolic")
            if is_peripheral(c, surface):
                raise InvalidCurrent(f"Atom {label}: peripheral classes carry no closed geodesic")
            merged[c] = merged.get(c, 0.0) + float(weight)
        atoms = tuple(sorted(merged.items(), key=lambda item: item[0].sort_key()))
        return cls(atoms=atoms, liouville_weight=float(liouville_weight))

    @classmethod
    def delta(cls, c: Union[str, ConjClass], surface: SurfacePresentation, weight: float = 1.0) -> "DiscreteCurrent":
        return cls.from_pairs([(c, weight)], surface)

    @classmethod
    def liouville(cls, weight: float = 1.0) -> "DiscreteCurrent":
        return cls(atoms=(), liouville_weight=weight)

    @classmethod
    def from_json(
        cls, data: Union[str, Any], surface: SurfacePresentation, tol_class: float = TOL_CLASS
    ) -> "DiscreteCurrent":
        """
        Parse '[["a", 1], ["b", 2]]'; the word "liouville" adds a Liouville part.

        A mapping {"atoms": [...], "liouville": t} is accepted as well.

        Raises:
            InvalidCurrent: on malformed input
        """
        if isinstance(data, str):
            try:
                data = json.loads(data)
            except json.JSONDecodeError as e:
                raise InvalidCurrent(f"Current is not valid JSON: {e}") from e
        liouville_weight = 0.0
        if isinstance(data, Mapping):
            liouville_weight = float(data.get("liouville", 0.0))
            data = data.get("atoms", [])
        pairs = []
        try:
            for word, weight in data:
                if str(word).lower() == "liouville":
                    liouville_weight += float(weight)
                else:
                    pairs.append((str(word), float(weight)))
        except (TypeError, ValueError) as e:
            raise InvalidCurrent(f"Current must be a list of [word, weight] pairs: {e}") from e
        return cls.from_pairs(pairs, surface, liouville_weight, tol_class)

    @property
    def support(self) -> Tuple[ConjClass, ...]:
        return tuple(c for c, _ in self.atoms)

    @property
    def total_weight(self) -> float:
        return sum(w for _, w in self.atoms)

    def weight(self, c: ConjClass) -> float:
        for atom, w in self.atoms:
            if atom == c:
                return w
        return 0.0

    def scaled(self, factor: float) -> "DiscreteCurrent":
        return DiscreteCurrent(
            atoms=tuple((c, w * factor) for c, w in self.atoms),
            liouville_weight=self.liouville_weight * factor,
        )

    def __add__(self, other: "DiscreteCurrent") -> "DiscreteCurrent":
        merged = dict(self.atoms)
        for c, w in other.atoms:
            merged[c] = merged.get(c, 0.0) + w
        atoms = tuple(sorted(merged.items(), key=lambda item: item[0].sort_key()))
        return DiscreteCurrent(atoms=atoms, liouville_weight=self.liouville_weight + other.liouville_weight)

    def to_dict(self, surface: SurfacePresentation) -> Dict[str, Any]:
        return {
            "atoms": [[surface.format(c.word), w] for c, w in self.atoms],
            "liouville": self.liouville_weight,
        }


@dataclass(frozen=True)
class CrossingWitness:
    """
    One crossing orbit.

    Attributes:
        atom: the support class whose lift crosses
        word: translating word of the orbit member crossing the fundamental
            segment, shortlex-least in its coset modulo the atom's root
        shift: k such that g^-k moved the nearest ball lift onto the segment
        position: log-height of the crossing point on the axis
    """

    atom: ConjClass
    word: Word
    shift: int
    position: float


@dataclass(frozen=True)
class OrbitCount:
    orbits: int
    orbits_below: int
    inside_margin: bool
    witnesses: Tuple[CrossingWitness, ...]

    @property
    def stabilized(self) -> bool:
        return self.orbits == self.orbits_below and self.inside_margin


@dataclass(frozen=True)
class IntersectionResult:
    """
    Attributes:
        value: sum of weight * count, plus the Liouville term
        radius: ball radius used for the lifts
        stabilized: counts at radius - 1 and radius agree and witnesses lie
            near the fundamental segment
        per_atom: (atom, lift-crossing count) in atom order
        witnesses: crossing lifts found, in atom then ball order
        liouville_term: liouville_weight * length of the class
    """

    value: float
    radius: int
    stabilized: bool
    per_atom: Tuple[Tuple[ConjClass, int], ...]
    witnesses: Tuple[CrossingWitness, ...] = ()
    liouville_term: float = 0.0

    def to_dict(self, surface: SurfacePresentation) -> Dict[str, Any]:
        return {
            "value": self.value,
            "radius": self.radius,
            "stabilized": self.stabilized,
            "per_atom": [[surface.format(c.word), n] for c, n in self.per_atom],
            "liouville_term": self.liouville_term,
            "witnesses": [_witness_dict(w, surface) for w in self.witnesses],
        }


def _witness_dict(w: CrossingWitness, surface: SurfacePresentation) -> Dict[str, Any]:
    return {
        "atom": surface.format(w.atom.word),
        "word": surface.format(w.word),
        "shift": w.shift,
        "position": round(w.position, 9),
    }


@lru_cache(maxsize=1024)
def _frame(surface: SurfacePresentation, root: Word, tol_class: float = TOL_CLASS) -> AxisFrame:
    return axis_frame(evaluate(root, surface), tol_class)


@lru_cache(maxsize=1024)
def _axis_vectors(surface: SurfacePresentation, root: Word, tol_class: float = TOL_CLASS) -> np.ndarray:
    """(2, 2) array whose columns are the attracting and repelling vectors of root."""
    attracting, repelling = axis(evaluate(root, surface), tol_class)
    return np.stack([attracting.vector, repelling.vector], axis=1)


def _coset_min(word: Word, root: Word, surface: SurfacePresentation) -> Word:
    """Shortlex-least reduced word of word * <root>."""
    reach = 2 * len(word) // len(root) + 1
    return min(
        (reduce(word + word_power(root, j), surface) for j in range(-reach, reach + 1)),
        key=word_key,
    )


@dataclass(frozen=True)
class _Settled:
    word: Word
    shift: int
    height: float
    start: float
    end: float


# a far lift's estimated shift is off by a few periods at most
_SETTLE_STEPS = 4


def _settle(
    eta: Word,
    guess: int,
    root: Word,
    atom_ends: np.ndarray,
    frame: AxisFrame,
    base: float,
    surface: SurfacePresentation,
    tol_pt: float,
) -> Optional[_Settled]:
    """
    Move the lift eta*A by g^-k until its crossing point lies on [base, base + length[.

    Returns None when the recomputed lift does not cross the axis, or when
    the shift does not settle.
    """
    k = guess
    for _ in range(_SETTLE_STEPS):
        word = reduce(word_power(root, -k) + eta, surface)
        lifted = evaluate(word, surface).matrix @ atom_ends
        position, sign, on_axis = frame.positions(lifted.T, tol_pt)
        if on_axis.any() or sign[0] * sign[1] >= 0 or not np.all(np.isfinite(position)):
            return None
        height = 0.5 * float(position[0] + position[1])
        step = math.floor((height - base) / frame.length)
        if step == 0:
            start, end = (position[0], position[1]) if sign[0] < 0 else (position[1], position[0])
            return _Settled(word, k, height, float(start), float(end))
        k += step
    return None


def _group_orbits(start: np.ndarray, end: np.ndarray, tol: float) -> List[List[int]]:
    """Group indices whose (start, end) pairs agree within tol."""
    groups: List[List[int]] = []
    last = (math.inf, math.inf)
    for i in np.lexsort((end, start)):
        if groups and abs(start[i] - last[0]) <= tol and abs(end[i] - last[1]) <= tol:
            groups[-1].append(int(i))
        else:
            groups.append([int(i)])
            last = (start[i], end[i])
    return groups


def _scan_crossings(
    surface: SurfacePresentation,
    root: Word,
    atom: ConjClass,
    radius: int,
    settings: CountingSettings,
    offset: float,
) -> OrbitCount:
    frame = _frame(surface, root, settings.tol_class)
    orbit = axis_orbit(surface, radius, atom, settings.cap)
    position, sign, on_axis = frame.positions(orbit.vectors, settings.tol_pt)
    crossing = ~on_axis.any(axis=1) & (sign[:, 0] * sign[:, 1] < 0)
    lifts = np.flatnonzero(crossing)
    if lifts.size == 0:
        return OrbitCount(0, 0, True, ())

    length = frame.length
    base = frame.center - length / 2.0 + offset
    with np.errstate(invalid="ignore"):
        raw_height = 0.5 * (position[lifts, 0] + position[lifts, 1])
        guess = np.floor((raw_height - base) / length)
    atom_ends = _axis_vectors(surface, orbit.root, settings.tol_class)

    kept: List[int] = []
    settled: List[_Settled] = []
    for j, index in enumerate(lifts):
        if not math.isfinite(guess[j]):
            continue
        result = _settle(
            orbit.word(int(index)), int(guess[j]), root, atom_ends, frame, base, surface, settings.tol_pt
        )
        if result is None:
            continue
        if min(result.height - base, base + length - result.height) < POSITION_TOL:
            raise DegenerateBasePoint(
                f"Base point at height {base:.6g} meets a lift of {atom.word} on the axis of {root}"
            )
        kept.append(j)
        settled.append(result)
    if len(kept) < lifts.size:
        logger.debug(f"Dropped {lifts.size - len(kept)} unsettled lifts of {atom.word} on the axis of {root}")
    if not settled:
        return OrbitCount(0, 0, True, ())

    start = np.array([s.start for s in settled])
    end = np.array([s.end for s in settled])
    witnesses = []
    below = 0
    inside = True
    for group in _group_orbits(start, end, 10 * POSITION_TOL):
        # ball order is shortlex, so the first member is the nearest lift
        rep = min(group, key=lambda m: kept[m])
        j = kept[rep]
        index = int(lifts[j])
        if any(orbit.lengths[int(lifts[kept[m]])] <= radius - 1 for m in group):
            below += 1
        # the ball lift's own crossing point, moved by the settled shift
        shifted = raw_height[j] - settled[rep].shift * length
        if not (base - settings.margin <= shifted <= base + length + settings.margin):
            inside = False
        word = _coset_min(settled[rep].word, orbit.root, surface)
        witnesses.append((index, CrossingWitness(atom, word, settled[rep].shift, settled[rep].height)))
    witnesses.sort(key=lambda item: item[0])
    return OrbitCount(len(witnesses), below, inside, tuple(w for _, w in witnesses))


@lru_cache(maxsize=8192)
def crossing_orbits(
    surface: SurfacePresentation,
    atom: ConjClass,
    c: ConjClass,
    radius: int,
    settings: CountingSettings = DEFAULT_SETTINGS,
) -> OrbitCount:
    """
    <c>-orbits of lifts of `atom` crossing the axis of the primitive root of c.

    Raises:
        NotHyperbolic: if c is not hyperbolic
        DegenerateBasePoint: if every base-point retry was degenerate
    """
    root, _ = primitive_root(c.word)
    _frame(surface, root, settings.tol_class)
    return call_with_jitter(
        lambda offset: _scan_crossings(surface, root, atom, radius, settings, offset),
        max_attempts=settings.max_attempts,
        jitter=settings.jitter,
    )


def class_intersection(
    a: ConjClass,
    c: ConjClass,
    surface: SurfacePresentation,
    radius: int,
    settings: CountingSettings = DEFAULT_SETTINGS,
) -> int:
    """Geometric intersection i(delta_a, delta_c), powers counted with multiplicity."""
    orbits = crossing_orbits(surface, a, c, radius, settings).orbits
    return primitive_root(a.word)[1] * primitive_root(c.word)[1] * orbits


def class_length(c: ConjClass, surface: SurfacePresentation) -> float:
    return translation_length(evaluate(c.word, surface))


def intersection_number(
    mu: DiscreteCurrent,
    c: ConjClass,
    surface: SurfacePresentation,
    radius: int,
    settings: CountingSettings = DEFAULT_SETTINGS,
) -> IntersectionResult:
    """
    i(mu, delta_c) by the box formula.

    Args:
        mu: the current
        c: a hyperbolic class
        surface: the surface
        radius: ball radius for the lifts (at least 1)

    Returns:
        IntersectionResult with per-atom counts, witnesses and stabilization

    Raises:
        InputError: for radius < 1
        NotHyperbolic: if c is not hyperbolic
        ResourceLimit: if the ball exceeds the element cap

    Example:
        >>> pt = builtin("punctured_torus")
        >>> intersection_number(DiscreteCurrent.delta("a", pt), class_of("b", pt), pt, 6).value
        1.0
    """
    if radius < 1:
        raise InputError(f"Counting radius must be at least 1, got {radius}")
    root, power = primitive_root(c.word)
    _frame(surface, root, settings.tol_class)
    per_atom = []
    witnesses: List[CrossingWitness] = []
    value = 0.0
    stabilized = True
    for atom, weight in mu.atoms:
        scan = crossing_orbits(surface, atom, c, radius, settings)
        count = primitive_root(atom.word)[1] * power * scan.orbits
        per_atom.append((atom, count))
        witnesses.extend(scan.witnesses)
        value += weight * count
        stabilized = stabilized and scan.stabilized
    liouville_term = mu.liouville_weight * class_length(c, surface) if mu.liouville_weight else 0.0
    if not stabilized:
        logger.warning(f"Intersection with {surface.format(c.word)} not stabilized at radius {radius}")
    return IntersectionResult(
        value=value + liouville_term,
        radius=radius,
        stabilized=stabilized,
        per_atom=tuple(per_atom),
        witnesses=tuple(witnesses),
        liouville_term=liouville_term,
    )


def pairing(
    mu: DiscreteCurrent,
    nu: DiscreteCurrent,
    surface: SurfacePresentation,
    radius: int,
    check_symmetry: bool = False,
    settings: CountingSettings = DEFAULT_SETTINGS,
) -> float:
    """
    Bilinear intersection pairing i(mu, nu).

    Raises:
        InvalidCurrent: when both currents carry a Liouville part
    """
    if mu.liouville_weight and nu.liouville_weight:
        raise InvalidCurrent("Pairing two currents with Liouville parts is not supported")
    value = 0.0
    for c, weight in nu.atoms:
        value += weight * intersection_number(mu, c, surface, radius, settings).value
    if nu.liouville_weight:
        value += nu.liouville_weight * sum(w * class_length(c, surface) for c, w in mu.atoms)
    if check_symmetry:
        reverse = pairing(nu, mu, surface, radius, settings=settings)
        if abs(reverse - value) > 1e-9 * max(1.0, abs(value)):
            logger.warning(f"Pairing not symmetric at radius {radius}: {value} vs {reverse}")
    return value


def self_intersection_result(
    c: ConjClass, surface: SurfacePresentation, radius: int, settings: CountingSettings = DEFAULT_SETTINGS
) -> IntersectionResult:
    """Crossing lifts of c with its own axis; value is twice the double-point count."""
    scan = crossing_orbits(surface, c, c, radius, settings)
    power = primitive_root(c.word)[1]
    count = power * power * scan.orbits
    return IntersectionResult(
        value=float(count),
        radius=radius,
        stabilized=scan.stabilized,
        per_atom=((c, count),),
        witnesses=scan.witnesses,
    )


def self_intersection(
    c: ConjClass, surface: SurfacePresentation, radius: int, settings: CountingSettings = DEFAULT_SETTINGS
) -> int:
    """
    Number of double points of the closed geodesic of c.

    Each double point is seen from both strands, so the lift-orbit count is
    halved.

    Raises:
        NotHyperbolic: if c is not hyperbolic
    """
    count = int(self_intersection_result(c, surface, radius, settings).value)
    if count % 2:
        logger.warning(f"Odd self-crossing count {count} for {surface.format(c.word)} at radius {radius}")
    return count // 2


def is_simple(
    c: ConjClass, surface: SurfacePresentation, radius: int, settings: CountingSettings = DEFAULT_SETTINGS
) -> bool:
    return self_intersection(c, surface, radius, settings) == 0


class SSVerdict(str, Enum):
    CROSSING_FOUND = "crossing_found"
    CLEAR = "clear_up_to_radius"


@dataclass(frozen=True)
class SSCertificate:
    """
    Somewhat-short certificate for a geodesic.

    A Liouville part crosses every geodesic, so it yields crossing_found
    without a witness.
    """

    verdict: SSVerdict
    radius: int
    witness: Optional[Tuple[ConjClass, Word]] = None

    @property
    def clear(self) -> bool:
        return self.verdict == SSVerdict.CLEAR

    def to_dict(self, surface: SurfacePresentation) -> Dict[str, Any]:
        witness = None
        if self.witness is not None:
            witness = {"atom": surface.format(self.witness[0].word), "word": surface.format(self.witness[1])}
        return {"verdict": self.verdict.value, "radius": self.radius, "witness": witness}


def _angular_gap(angles: np.ndarray, phi: float) -> np.ndarray:
    rel = np.mod(angles - phi, TWO_PI)
    return np.minimum(rel, TWO_PI - rel)


def somewhat_short(
    mu: DiscreteCurrent,
    g: Geodesic,
    surface: SurfacePresentation,
    radius: int,
    settings: CountingSettings = DEFAULT_SETTINGS,
    tol: Optional[float] = None,
) -> SSCertificate:
    """
    Look for a lift of a support atom crossing g.

    Lifts sharing an endpoint with g do not cross it. The endpoint
    tolerance defaults to settings.tol_pt.

    Returns:
        crossing_found with the first witness (atom order, then ball order),
        or clear_up_to_radius
    """
    if mu.liouville_weight:
        return SSCertificate(SSVerdict.CROSSING_FOUND, radius)
    tol = settings.tol_pt if tol is None else tol
    p, q = g.p.phi, g.q.phi
    span = (q - p) % TWO_PI
    for atom, _ in mu.atoms:
        orbit = axis_orbit(surface, radius, atom, settings.cap)
        touching = (_angular_gap(orbit.angles, p) < tol) | (_angular_gap(orbit.angles, q) < tol)
        inside = np.mod(orbit.angles - p, TWO_PI) < span
        hits = np.flatnonzero((inside[:, 0] != inside[:, 1]) & ~touching.any(axis=1))
        for i in hits:
            try:
                confirmed = cross(g, orbit.geodesic(int(i)), tol)
            except SharedEndpoint:
                continue
            if confirmed:
                return SSCertificate(SSVerdict.CROSSING_FOUND, radius, (atom, orbit.word(int(i))))
    return SSCertificate(SSVerdict.CLEAR, radius)


def liouville_length(c: ConjClass, surface: SurfacePresentation, offset: float = 0.0) -> float:
    """
    i(L, delta_c) as the Liouville measure of the box (g+, g-) x [z, gz[.

    Args:
        offset: moves the base point z along the axis

    Raises:
        NotHyperbolic: if c is not hyperbolic
    """
    g = evaluate(c.word, surface)
    frame = axis_frame(g)
    z = frame.boundary_point(frame.center - frame.length / 2.0 + offset)
    attracting, repelling = axis(g)
    return liouville_box(attracting, repelling, z, apply(g, z))


def enumerate_classes(
    surface: SurfacePresentation,
    max_length: int,
    non_peripheral: bool = True,
    primitive: bool = False,
    simple: bool = False,
    count_radius: int = 6,
    threads: int = 1,
    settings: CountingSettings = DEFAULT_SETTINGS,
) -> List[ConjClass]:
    """
    Canonical hyperbolic classes of word length <= max_length.

    Args:
        non_peripheral: drop cusp classes
        primitive: drop proper powers
        simple: keep only classes with no self-intersection at count_radius

    Returns:
        Classes in shortlex order of their canonical words
    """
    return list(
        _enumerate(surface, max_length, non_peripheral, primitive, simple, count_radius, threads, settings)
    )


@lru_cache(maxsize=64)
def _enumerate(
    surface: SurfacePresentation,
    max_length: int,
    non_peripheral: bool,
    primitive: bool,
    simple: bool,
    count_radius: int,
    threads: int,
    settings: CountingSettings,
) -> Tuple[ConjClass, ...]:
    found = set()
    for w in cyclic_words(surface, max_length):
        c = canonical_conj(w, surface)
        if not c.is_trivial:
            found.add(c)
    keep = []
    for c in sorted(found, key=ConjClass.sort_key):
        if classify(evaluate(c.word, surface), settings.tol_class) != Classification.HYPERBOLIC:
            continue
        if non_peripheral and is_peripheral(c, surface):
            continue
        if primitive and is_proper_power(c.word):
            continue
        keep.append(c)
    if simple:
        flags = parallel_map(lambda c: is_simple(c, surface, count_radius, settings), keep, threads)
        keep = [c for c, flag in zip(keep, flags) if flag]
    logger.debug(f"Enumerated {len(keep)} classes of length <= {max_length} on {surface.name}")
    return tuple(keep)


@dataclass(frozen=True)
class SystoleRow:
    c: ConjClass
    intersection: float
    length: float
    ratio: float
    stabilized: bool


@dataclass(frozen=True)
class SystoleScan:
    """
    Attributes:
        rows: one row per scanned class
        systole: minimal intersection over the scan (None for an empty scan)
        argmin: first class attaining it
        c1, c2: minimal and maximal ratio i(mu, c) / length(c)
    """

    rows: Tuple[SystoleRow, ...]
    systole: Optional[float]
    argmin: Optional[ConjClass]
    c1: Optional[float]
    c2: Optional[float]
    radius: int
    count_radius: int

    @property
    def stabilized(self) -> bool:
        return all(row.stabilized for row in self.rows)

    def to_dict(self, surface: SurfacePresentation) -> Dict[str, Any]:
        return {
            "rows": [
                {
                    "class": surface.format(row.c.word),
                    "intersection": row.intersection,
                    "length": row.length,
                    "ratio": row.ratio,
                    "stabilized": row.stabilized,
                }
                for row in self.rows
            ],
            "systole": self.systole,
            "argmin": None if self.argmin is None else surface.format(self.argmin.word),
            "c1": self.c1,
            "c2": self.c2,
            "radius": self.radius,
            "count_radius": self.count_radius,
            "stabilized": self.stabilized,
        }


def systole_scan(
    mu: DiscreteCurrent,
    surface: SurfacePresentation,
    radius: int,
    count_radius: int,
    simple_only: bool = False,
    threads: int = 1,
    settings: CountingSettings = DEFAULT_SETTINGS,
) -> SystoleScan:
    """
    Systole estimate and bilipschitz constants over primitive non-peripheral classes.

    Args:
        radius: maximal word length of scanned classes
        count_radius: ball radius of the intersection counts
        simple_only: restrict to simple classes

    Raises:
        InputError: for radius < 1
    """
    if radius < 1:
        raise InputError(f"Scan radius must be at least 1, got {radius}")
    classes = enumerate_classes(
        surface, radius, primitive=True, simple=simple_only, count_radius=count_radius,
        threads=threads, settings=settings,
    )

    def row(c: ConjClass) -> SystoleRow:
        result = intersection_number(mu, c, surface, count_radius, settings)
        length = class_length(c, surface)
        return SystoleRow(c, result.value, length, result.value / length, result.stabilized)

    rows = tuple(parallel_map(row, classes, threads))
    if not rows:
        return SystoleScan(rows, None, None, None, None, radius, count_radius)
    best = min(rows, key=lambda r: r.intersection)
    ratios = [r.ratio for r in rows]
    logger.info(f"Systole scan on {surface.name}: {len(rows)} classes, minimum {best.intersection}")
    return SystoleScan(rows, best.intersection, best.c, min(ratios), max(ratios), radius, count_radius)


def parse_class(text: str, surface: SurfacePresentation) -> ConjClass:
    """
    Parse a class argument: a word, or "slope:p/q" on the punctured torus.

    Raises:
        InputError: for a malformed slope
    """
    match = re.fullmatch(r"slope:(-?\d+)/(-?\d+)", text.strip())
    if match:
        if surface.name != "punctured_torus":
            raise InputError("Slopes are only defined on the punctured torus")
        return torus_curve(int(match.group(1)), int(match.group(2)))
    return canonical_conj(surface.parse(text), surface)
