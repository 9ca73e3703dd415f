"""
Surface Groups for CurrentKit

Surface-group presentations with Fuchsian matrix images, word reduction
(free reduction plus Dehn's algorithm for one-relator surface groups),
conjugacy canonical forms, Cayley balls and axis orbits.

Words are tuples of signed generator indices: generator i (1-based) is the
letter i, its inverse is -i. Letters are ordered a < A < b < B < ..., and
words in shortlex order.

Author: Harsh
"""

from __future__ import annotations

import logging
import math
import os
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .errors import InputError, InvalidPresentation, ResourceLimit, UnknownGenerator, UnknownSurface
from .hyp_core import (
    Classification,
    Geodesic,
    BoundaryPoint,
    MobiusMap,
    axis,
    boundary_angles,
    classify,
)

logger = logging.getLogger(__name__)

Word = Tuple[int, ...]

DEFAULT_ELEMENT_CAP = 5_000_000
ELEMENT_CAP_ENV = "CURRENTKIT_ELEMENT_CAP"

_TOKEN = re.compile(r"([A-Za-z])(\d*)")
_NAME = re.compile(r"^[a-z]\d*$")
# endpoint keys of distinct lifts are compared on this grid
_LIFT_GRID = 1e-8
# beyond this many equal-length forms the canonical word may not be the least one
_HALF_FLIP_LIMIT = 4096


def default_element_cap() -> int:
    """Ball size cap, overridable through CURRENTKIT_ELEMENT_CAP."""
    raw = os.environ.get(ELEMENT_CAP_ENV)
    if raw:
        try:
            return int(raw)
        except ValueError:
            logger.warning(f"Ignoring non-integer {ELEMENT_CAP_ENV}={raw!r}")
    return DEFAULT_ELEMENT_CAP


def inverse(w: Sequence[int]) -> Word:
    return tuple(-g for g in reversed(w))


def word_power(w: Sequence[int], k: int) -> Word:
    """w^k as a concatenation; negative k repeats the inverse."""
    return tuple(w) * k if k >= 0 else inverse(w) * (-k)


def letter_key(g: int) -> Tuple[int, bool]:
    return abs(g), g < 0


def word_key(w: Sequence[int]) -> Tuple[int, Tuple[Tuple[int, bool], ...]]:
    """Shortlex sort key."""
    return len(w), tuple(letter_key(g) for g in w)


def free_reduce(w: Sequence[int]) -> Word:
    out: List[int] = []
    for g in w:
        if out and out[-1] == -g:
            out.pop()
        else:
            out.append(g)
    return tuple(out)


def _cyclic_free(w: Word) -> Word:
    start, end = 0, len(w)
    while end - start >= 2 and w[start] == -w[end - 1]:
        start += 1
        end -= 1
    return w[start:end]


def _rotations(w: Word) -> Iterator[Word]:
    for i in range(len(w)):
        yield w[i:] + w[:i]


def _min_rotation(w: Word) -> Word:
    if not w:
        return w
    return min(_rotations(w), key=word_key)


def primitive_root(w: Word) -> Tuple[Word, int]:
    """Split a cyclic word as root^m with root not a proper power."""
    n = len(w)
    for d in range(1, n + 1):
        if n % d == 0 and w[:d] * (n // d) == w:
            return w[:d], n // d
    return w, 1


def is_proper_power(w: Word) -> bool:
    return primitive_root(w)[1] > 1


@dataclass(frozen=True)
class ConjClass:
    """Canonical cyclic word of a conjugacy class (rotation and inversion minimal)."""

    word: Word

    def __len__(self) -> int:
        return len(self.word)

    @property
    def is_trivial(self) -> bool:
        return not self.word

    def sort_key(self):
        return word_key(self.word)


@dataclass(frozen=True)
class SurfacePresentation:
    """
    A surface group with its Fuchsian representation.

    Attributes:
        name: surface name
        generators: generator names (lowercase letter plus optional digits)
        matrices: generator images, aligned with `generators`
        relators: relator words (empty for free groups)
        peripherals: words whose conjugates are the cusp classes
        genus: genus of the surface
        punctures: number of cusps
    """

    name: str
    generators: Tuple[str, ...]
    matrices: Tuple[MobiusMap, ...]
    relators: Tuple[Word, ...] = ()
    peripherals: Tuple[Word, ...] = ()
    genus: int = 0
    punctures: int = 0

    @property
    def rank(self) -> int:
        return len(self.generators)

    @property
    def is_free(self) -> bool:
        return not self.relators

    @property
    def is_closed(self) -> bool:
        return self.punctures == 0

    @property
    def is_thrice_punctured_sphere(self) -> bool:
        return self.genus == 0 and self.punctures == 3

    def letters(self) -> Tuple[int, ...]:
        """All letters in shortlex letter order."""
        return tuple(g for i in range(1, self.rank + 1) for g in (i, -i))

    def generator_matrix(self, g: int) -> MobiusMap:
        if g == 0 or abs(g) > self.rank:
            raise UnknownGenerator(f"Surface {self.name} has no generator index {g}")
        m = self.matrices[abs(g) - 1]
        return m if g > 0 else m.inverse()

    def parse(self, text: str) -> Word:
        """
        Parse a word such as "a1B1" or "abAB"; uppercase letters are inverses.

        Raises:
            UnknownGenerator: on unknown names or stray characters
        """
        compact = "".join(text.split())
        if compact in ("", "1"):
            return ()
        lookup = {name: i + 1 for i, name in enumerate(self.generators)}
        word: List[int] = []
        pos = 0
        for match in _TOKEN.finditer(compact):
            if match.start() != pos:
                raise UnknownGenerator(f"Cannot parse {text!r} at position {pos}")
            letter, digits = match.groups()
            name = letter.lower() + digits
            if name not in lookup:
                raise UnknownGenerator(f"Unknown generator {letter + digits!r} for surface {self.name}")
            index = lookup[name]
            word.append(index if letter.islower() else -index)
            pos = match.end()
        if pos != len(compact):
            raise UnknownGenerator(f"Cannot parse {text!r} at position {pos}")
        return tuple(word)

    def format(self, w: Sequence[int]) -> str:
        if not w:
            return "1"
        parts = []
        for g in w:
            name = self.generators[abs(g) - 1]
            parts.append(name if g > 0 else name[0].upper() + name[1:])
        return "".join(parts)

    def validate(self) -> None:
        """
        Sanity checks on the presentation.

        Raises:
            InvalidPresentation: on any failed check
        """
        if len(self.generators) != len(self.matrices) or not self.generators:
            raise InvalidPresentation(f"{self.name}: generators and matrices must align and be non-empty")
        for name in self.generators:
            if not _NAME.match(name):
                raise InvalidPresentation(f"{self.name}: invalid generator name {name!r}")
        if 2 * self.genus - 2 + self.punctures <= 0:
            raise InvalidPresentation(f"{self.name}: 2g - 2 + p must be positive")
        for r in self.relators:
            if not evaluate(r, self).is_identity(1e-8):
                raise InvalidPresentation(f"{self.name}: relator {self.format(r)} is not the identity")
        for p in self.peripherals:
            kind = classify(evaluate(p, self))
            if kind == Classification.HYPERBOLIC:
                logger.warning(f"{self.name}: peripheral {self.format(p)} is hyperbolic (boundary component)")
            elif kind != Classification.PARABOLIC:
                raise InvalidPresentation(f"{self.name}: peripheral {self.format(p)} is {kind.value}")

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "SurfacePresentation":
        """
        Build a presentation from its JSON form.

        Example:
            >>> SurfacePresentation.from_dict({
            ...     "name": "pt", "generators": ["a", "b"],
            ...     "matrices": {"a": [[1, 1], [1, 2]], "b": [[1, -1], [-1, 2]]},
            ...     "peripherals": ["abAB"], "genus": 1, "punctures": 1})
        """
        try:
            generators = tuple(str(g) for g in data["generators"])
            raw = data["matrices"]
            if isinstance(raw, Mapping):
                matrices = tuple(MobiusMap.from_matrix(raw[g]) for g in generators)
            else:
                matrices = tuple(MobiusMap.from_matrix(m) for m in raw)
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidPresentation(f"Malformed presentation: {e}") from e
        shell = cls(name=str(data.get("name", "custom")), generators=generators, matrices=matrices)
        surface = cls(
            name=shell.name,
            generators=generators,
            matrices=matrices,
            relators=tuple(shell.parse(r) for r in data.get("relators", [])),
            peripherals=tuple(shell.parse(p) for p in data.get("peripherals", [])),
            genus=int(data.get("genus", 0)),
            punctures=int(data.get("punctures", 0)),
        )
        if surface.relators:
            logger.warning(f"{surface.name}: Dehn reduction assumes a small-cancellation relator")
        surface.validate()
        return surface


@lru_cache(maxsize=None)
def _relator_rules(surface: SurfacePresentation) -> Tuple[Dict[Word, Word], Tuple[int, ...], Dict[Word, Tuple[Word, ...]]]:
    """Dehn replacement rules: long subwords and half-relator flips."""
    rules: Dict[Word, Word] = {}
    halves: Dict[Word, List[Word]] = {}
    lengths = set()
    for r in surface.relators:
        size = len(r)
        for base in (r, inverse(r)):
            for rot in _rotations(base):
                for k in range(size // 2 + 1, size + 1):
                    rules[rot[:k]] = inverse(rot[k:])
                    lengths.add(k)
                if size % 2 == 0:
                    halves.setdefault(rot[: size // 2], []).append(inverse(rot[size // 2:]))
    frozen_halves = {k: tuple(v) for k, v in halves.items()}
    return rules, tuple(sorted(lengths, reverse=True)), frozen_halves


def _check_letters(w: Sequence[int], surface: Optional[SurfacePresentation]) -> None:
    if surface is None:
        return
    for g in w:
        if g == 0 or abs(g) > surface.rank:
            raise UnknownGenerator(f"Surface {surface.name} has no generator index {g}")


def _dehn(w: Word, surface: SurfacePresentation) -> Word:
    rules, lengths, _ = _relator_rules(surface)
    w = free_reduce(w)
    changed = True
    while changed:
        changed = False
        for k in lengths:
            if k > len(w):
                continue
            for i in range(len(w) - k + 1):
                replacement = rules.get(w[i:i + k])
                if replacement is not None:
                    w = free_reduce(w[:i] + replacement + w[i + k:])
                    changed = True
                    break
            if changed:
                break
    return w


def reduce(w: Sequence[int], surface: Optional[SurfacePresentation] = None) -> Word:
    """
    Free reduction, followed by Dehn's algorithm when the group has relators.

    Raises:
        UnknownGenerator: if a letter is not a generator of `surface`
    """
    _check_letters(w, surface)
    word = free_reduce(w)
    if surface is not None and surface.relators:
        word = _dehn(word, surface)
    return word


def cyclic_reduce(w: Sequence[int], surface: Optional[SurfacePresentation] = None) -> Word:
    """Cyclically reduced representative (cyclic Dehn reduction when relators exist)."""
    word = _cyclic_free(reduce(w, surface))
    if surface is None or not surface.relators:
        return word
    rules, lengths, _ = _relator_rules(surface)
    while True:
        word = _cyclic_free(_dehn(word, surface))
        shorter = None
        for rot in _rotations(word):
            for k in lengths:
                if k <= len(rot) and rot[:k] in rules:
                    shorter = _cyclic_free(free_reduce(rules[rot[:k]] + rot[k:]))
                    break
            if shorter is not None:
                break
        if shorter is None:
            return word
        word = shorter


def _half_flip_closure(word: Word, surface: SurfacePresentation) -> List[Word]:
    """Cyclic words reachable by exchanging half-relators, at minimal length."""
    _, _, halves = _relator_rules(surface)
    if not halves or not word:
        return [word]
    half = len(next(iter(halves)))
    start = _min_rotation(word)
    seen = {start}
    queue = [start]
    while queue:
        current = queue.pop()
        if len(current) < half:
            continue
        for rot in _rotations(current):
            for replacement in halves.get(rot[:half], ()):
                flipped = _min_rotation(cyclic_reduce(replacement + rot[half:], surface))
                if len(flipped) < len(start):
                    return _half_flip_closure(flipped, surface)
                if flipped not in seen:
                    seen.add(flipped)
                    queue.append(flipped)
        if len(seen) > _HALF_FLIP_LIMIT:
            logger.warning(
                f"Half-relator closure of {word} stopped at {len(seen)} words; "
                f"the canonical form may not be shortlex-least"
            )
            break
    return sorted(seen, key=word_key)


def canonical_conj(w: Sequence[int], surface: Optional[SurfacePresentation] = None) -> ConjClass:
    """
    Canonical representative of the conjugacy class of w, up to inversion.

    Example:
        >>> canonical_conj((1, 2)) == canonical_conj((-2, -1))
        True
    """
    word = cyclic_reduce(w, surface)
    candidates = [word]
    if surface is not None and surface.relators:
        candidates = _half_flip_closure(word, surface)
    best = min(
        (_min_rotation(c) for cand in candidates for c in (cand, inverse(cand))),
        key=word_key,
    )
    return ConjClass(best)


def class_of(text: str, surface: SurfacePresentation) -> ConjClass:
    """Parse a word and canonicalize its conjugacy class."""
    return canonical_conj(surface.parse(text), surface)


def evaluate(w: Sequence[int], surface: SurfacePresentation) -> MobiusMap:
    """Product of the generator matrices of w."""
    result = MobiusMap.identity()
    for g in w:
        result = result.compose(surface.generator_matrix(g))
    return result


def class_element(c: ConjClass, surface: SurfacePresentation) -> MobiusMap:
    return evaluate(c.word, surface)


def is_peripheral(c: ConjClass, surface: SurfacePresentation) -> bool:
    """True iff c is conjugate to a non-zero power of a peripheral word."""
    if surface.is_closed or c.is_trivial:
        return False
    for p in surface.peripherals:
        base = canonical_conj(p, surface).word
        if base and len(c.word) % len(base) == 0:
            power = canonical_conj(p * (len(c.word) // len(base)), surface)
            if power == c:
                return True
    return False


def cyclic_words(surface: SurfacePresentation, max_length: int) -> Iterator[Word]:
    """All freely and cyclically reduced words of length 1..max_length."""
    letters = surface.letters()

    def extend(prefix: Word) -> Iterator[Word]:
        if prefix and prefix[0] != -prefix[-1]:
            yield prefix
        if len(prefix) == max_length:
            return
        for g in letters:
            if prefix and prefix[-1] == -g:
                continue
            yield from extend(prefix + (g,))

    for g in letters:
        yield from extend((g,))


@dataclass(frozen=True, eq=False)
class GroupBall:
    """
    Distinct group elements of word length <= radius, in shortlex order.

    Each element is stored once, with its shortlex-minimal word; matrices
    are kept as an (n, 2, 2) array for vectorized work.
    """

    radius: int
    words: Tuple[Word, ...]
    matrices: np.ndarray
    lengths: np.ndarray

    def __len__(self) -> int:
        return len(self.words)

    def entries(self) -> Iterator[Tuple[Word, MobiusMap]]:
        for w, m in zip(self.words, self.matrices):
            yield w, MobiusMap.from_matrix(m)


def _matrix_key(m: np.ndarray) -> Tuple[float, ...]:
    flat = np.round(m.ravel(), 6) + 0.0
    for v in flat:
        if v != 0.0:
            if v < 0.0:
                flat = -flat + 0.0
            break
    return tuple(flat.tolist())


def _shortens(word: Word, rules: Mapping[Word, Word], lengths: Sequence[int]) -> bool:
    """True when a Dehn rule applies to a suffix, so a shorter word names the same element."""
    return any(k <= len(word) and word[-k:] in rules for k in lengths)


def ball(surface: SurfacePresentation, radius: int, cap: Optional[int] = None) -> GroupBall:
    """
    Cayley ball of the given radius.

    Raises:
        InputError: for a negative radius
        ResourceLimit: when the ball exceeds the element cap
    """
    if radius < 0:
        raise InputError(f"Ball radius must be non-negative, got {radius}")
    return _ball(surface, radius, cap or default_element_cap())


@lru_cache(maxsize=16)
def _ball(surface: SurfacePresentation, radius: int, cap: int) -> GroupBall:
    letters = surface.letters()
    generator = {g: surface.generator_matrix(g).matrix for g in letters}
    words: List[Word] = [()]
    matrices: List[np.ndarray] = [np.eye(2)]
    lengths: List[int] = [0]
    seen = {_matrix_key(np.eye(2))} if surface.relators else None
    rules, rule_lengths, _ = _relator_rules(surface) if surface.relators else ({}, (), {})
    layer = [0]
    for k in range(1, radius + 1):
        next_layer: List[int] = []
        for index in layer:
            word = words[index]
            base = matrices[index]
            for g in letters:
                if word and word[-1] == -g:
                    continue
                if rules and _shortens(word + (g,), rules, rule_lengths):
                    continue
                product = base @ generator[g]
                if seen is not None:
                    key = _matrix_key(product)
                    if key in seen:
                        continue
                    seen.add(key)
                words.append(word + (g,))
                matrices.append(product)
                lengths.append(k)
                next_layer.append(len(words) - 1)
                if len(words) > cap:
                    raise ResourceLimit(
                        f"Ball of radius {radius} on {surface.name} exceeds the element cap {cap}"
                    )
        layer = next_layer
        logger.debug(f"Ball on {surface.name}: {len(words)} elements through length {k}")
    return GroupBall(
        radius=radius,
        words=tuple(words),
        matrices=np.array(matrices),
        lengths=np.array(lengths, dtype=int),
    )


@dataclass(frozen=True, eq=False)
class AxisOrbit:
    """
    Distinct translates eta * axis(root) for eta in a ball.

    Attributes:
        root: primitive root word of the class
        multiplicity: m with class = root^m
        vectors: (k, 2, 2) unit vectors of (attracting, repelling) endpoints
        angles: (k, 2) boundary angles of the same endpoints
        word_index: (k,) index in ball.words of the minimal translating word
        lengths: (k,) word length of that translating word
        ball: the ball the orbit was computed in
    """

    root: Word
    multiplicity: int
    vectors: np.ndarray
    angles: np.ndarray
    word_index: np.ndarray
    lengths: np.ndarray
    ball: GroupBall

    def __len__(self) -> int:
        return len(self.word_index)

    def word(self, i: int) -> Word:
        return self.ball.words[int(self.word_index[i])]

    def geodesic(self, i: int) -> Geodesic:
        return Geodesic(BoundaryPoint(float(self.angles[i, 0])), BoundaryPoint(float(self.angles[i, 1])))


def axis_orbit(surface: SurfacePresentation, radius: int, c: ConjClass, cap: Optional[int] = None) -> AxisOrbit:
    """
    Lifts of the closed geodesic of c reachable by translating words of the ball.

    Raises:
        NotHyperbolic: when c is not hyperbolic
        ResourceLimit: when the ball exceeds the element cap
    """
    return _axis_orbit(surface, radius, c, cap or default_element_cap())


@lru_cache(maxsize=2048)
def _axis_orbit(surface: SurfacePresentation, radius: int, c: ConjClass, cap: int) -> AxisOrbit:
    root, multiplicity = primitive_root(c.word)
    attracting, repelling = axis(evaluate(root, surface))
    group = _ball(surface, radius, cap)
    ends = np.stack([attracting.vector, repelling.vector], axis=1)
    vectors = np.einsum("nij,jk->nki", group.matrices, ends)
    vectors = vectors / np.linalg.norm(vectors, axis=2, keepdims=True)
    angles = boundary_angles(vectors)
    low = np.minimum(angles[:, 0], angles[:, 1])
    high = np.maximum(angles[:, 0], angles[:, 1])
    keys = np.stack([np.round(low / _LIFT_GRID), np.round(high / _LIFT_GRID)], axis=1).astype(np.int64)
    _, first = np.unique(keys, axis=0, return_index=True)
    first = np.sort(first)
    return AxisOrbit(
        root=root,
        multiplicity=multiplicity,
        vectors=vectors[first],
        angles=angles[first],
        word_index=first,
        lengths=group.lengths[first],
        ball=group,
    )


def coset_reps(surface: SurfacePresentation, radius: int, c: ConjClass, cap: Optional[int] = None) -> List[Word]:
    """
    One representative per coset eta<w> meeting the ball, minimal in shortlex.

    Raises:
        InputError: for the trivial class
    """
    if c.is_trivial:
        raise InputError("Coset representatives need a non-trivial class")
    orbit = axis_orbit(surface, radius, c, cap)
    reps = [orbit.word(i) for i in range(len(orbit))]
    if orbit.multiplicity > 1:
        extra = [
            reduce(rep + orbit.root * j, surface)
            for rep in reps
            for j in range(1, orbit.multiplicity)
        ]
        reps = reps + extra
    return sorted(set(reps), key=word_key)


def torus_curve(p: int, q: int) -> ConjClass:
    """
    Simple closed curve of slope (p, q) on the punctured torus.

    The class is the Christoffel word with |p| letters a and |q| letters b,
    signs carried by the letters.

    Raises:
        InputError: unless gcd(p, q) = 1
    """
    if math.gcd(p, q) != 1:
        raise InputError(f"Slope ({p}, {q}) is not primitive")
    a = 1 if p > 0 else -1
    b = 2 if q > 0 else -2
    n = abs(p) + abs(q)
    word = []
    for i in range(1, n + 1):
        step = (i * abs(q)) // n > ((i - 1) * abs(q)) // n
        word.append(b if step else a)
    return canonical_conj(tuple(word))


def _octagon_side_pairing(source: int, target: int) -> MobiusMap:
    cosh = 1.0 + math.sqrt(2.0)
    sinh = math.sqrt(cosh * cosh - 1.0)

    def rotation(theta: float) -> np.ndarray:
        return np.diag([np.exp(0.5j * theta), np.exp(-0.5j * theta)])

    translation = np.array([[cosh, sinh], [sinh, cosh]], dtype=complex)
    disk = rotation(target * math.pi / 4) @ translation @ rotation(math.pi - source * math.pi / 4)
    cayley = np.array([[1j, 1j], [-1.0, 1.0]])
    upper = cayley @ disk @ np.linalg.inv(cayley)
    return MobiusMap.from_matrix(upper.real)


@lru_cache(maxsize=None)
def builtin(name: str) -> SurfacePresentation:
    """
    Built-in surfaces: punctured_torus, sphere3, genus2_octagon.

    Raises:
        UnknownSurface: for any other name
    """
    if name == "punctured_torus":
        surface = SurfacePresentation(
            name=name,
            generators=("a", "b"),
            matrices=(MobiusMap((1, 1, 1, 2)), MobiusMap((1, -1, -1, 2))),
            peripherals=((1, 2, -1, -2),),
            genus=1,
            punctures=1,
        )
    elif name == "sphere3":
        surface = SurfacePresentation(
            name=name,
            generators=("a", "b"),
            matrices=(MobiusMap((1, 2, 0, 1)), MobiusMap((1, 0, -2, 1))),
            peripherals=((1,), (2,), (1, 2)),
            genus=0,
            punctures=3,
        )
    elif name == "genus2_octagon":
        # regular octagon with angles pi/4; side j faces direction j*pi/4
        surface = SurfacePresentation(
            name=name,
            generators=("a1", "b1", "a2", "b2"),
            matrices=(
                _octagon_side_pairing(1, 3),
                _octagon_side_pairing(2, 0),
                _octagon_side_pairing(5, 7),
                _octagon_side_pairing(6, 4),
            ),
            relators=((1, 2, -1, -2, 3, 4, -3, -4),),
            genus=2,
            punctures=0,
        )
    else:
        raise UnknownSurface(f"Unknown surface {name!r}; expected punctured_torus, sphere3 or genus2_octagon")
    surface.validate()
    logger.debug(f"Loaded built-in surface {name}")
    return surface
