"""
Thrice-Punctured Sphere Checks for CurrentKit

Word-level verification on the free group <a, b> with the third cusp
c = (ab)^-1: peripheral tags, the product lemma for peripheral pairs, the
classification of curves with one double point, and the positivity of
intersection systoles.

Author: Harsh
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from .currents import (
    DEFAULT_SETTINGS,
    CountingSettings,
    DiscreteCurrent,
    enumerate_classes,
    intersection_number,
    self_intersection,
)
from .errors import InputError
from .surface_group import (
    ConjClass,
    SurfacePresentation,
    Word,
    builtin,
    canonical_conj,
    cyclic_reduce,
    free_reduce,
    inverse,
    word_key,
)
from .workers import parallel_map

logger = logging.getLogger(__name__)

A, B = 1, 2

# (a b^-1), (b c^-1) = bab and (c a^-1) = b^-1 a^-2, each up to inversion
SINGLE_CROSSING_WORDS: Tuple[Word, ...] = ((A, -B), (B, A, B), (-B, -A, -A))


class CuspTag(str, Enum):
    A_CUSP = "a_cusp"
    B_CUSP = "b_cusp"
    C_CUSP = "c_cusp"
    NONE = "none"


@dataclass(frozen=True)
class PeripheralTag:
    """Cusp a word is conjugate into, with the exponent (0 when not peripheral)."""

    tag: CuspTag
    exponent: int = 0

    @property
    def peripheral(self) -> bool:
        return self.tag != CuspTag.NONE

    @property
    def primitive(self) -> bool:
        return abs(self.exponent) == 1

    def to_dict(self) -> Dict[str, Any]:
        return {"tag": self.tag.value, "exponent": self.exponent}


def sphere3() -> SurfacePresentation:
    return builtin("sphere3")


def _block_exponent(word: Word, block: Word) -> Optional[int]:
    """m with word a rotation of block^m (m may be negative), else None."""
    for sign, base in ((1, block), (-1, inverse(block))):
        n = len(base)
        if len(word) % n:
            continue
        m = len(word) // n
        for shift in range(n):
            rotated = word[shift:] + word[:shift]
            if rotated == base * m:
                return sign * m
    return None


def peripheral_class(w: Union[Sequence[int], ConjClass]) -> PeripheralTag:
    """
    Cusp tag of a word or class on the thrice-punctured sphere.

    A class reports the exponent of its canonical word.

    Example:
        >>> peripheral_class((2, 1, 1, 1, -2))
        PeripheralTag(tag=<CuspTag.A_CUSP: 'a_cusp'>, exponent=3)
    """
    word = w.word if isinstance(w, ConjClass) else cyclic_reduce(w)
    if not word:
        return PeripheralTag(CuspTag.NONE)
    for tag, block, sign in ((CuspTag.A_CUSP, (A,), 1), (CuspTag.B_CUSP, (B,), 1), (CuspTag.C_CUSP, (A, B), -1)):
        m = _block_exponent(word, block)
        if m is not None:
            return PeripheralTag(tag, sign * m)
    return PeripheralTag(CuspTag.NONE)


class LemmaVerdict(str, Enum):
    HYPOTHESIS_NOT_MET = "hypothesis_not_met"
    CONCLUSION_HOLDS = "conclusion_holds"
    COUNTEREXAMPLE = "COUNTEREXAMPLE"


def single_crossing_classes() -> Tuple[ConjClass, ...]:
    return tuple(canonical_conj(w) for w in SINGLE_CROSSING_WORDS)


def lemma_a_check(gamma1: Sequence[int], gamma2: Sequence[int]) -> LemmaVerdict:
    """
    Check the product lemma for one pair.

    Hypothesis: gamma1*gamma2 is neither trivial nor peripheral while gamma1,
    gamma2 and gamma1*gamma2^-1 are peripheral. Conclusion: the three
    peripherals sit in pairwise distinct cusps with exponent +-1, and
    gamma1*gamma2 is conjugate to (ab^-1), (bc^-1) or (ca^-1) up to inversion.
    """
    g1 = free_reduce(gamma1)
    g2 = free_reduce(gamma2)
    product = free_reduce(g1 + g2)
    quotient = free_reduce(g1 + inverse(g2))
    product_tag = peripheral_class(product)
    if not cyclic_reduce(product) or product_tag.peripheral:
        return LemmaVerdict.HYPOTHESIS_NOT_MET
    tags = [peripheral_class(w) for w in (g1, g2, quotient)]
    if not all(t.peripheral for t in tags):
        return LemmaVerdict.HYPOTHESIS_NOT_MET

    cusps_ok = len({t.tag for t in tags}) == 3 and all(t.primitive for t in tags)
    listed = canonical_conj(product) in single_crossing_classes()
    if cusps_ok and listed:
        return LemmaVerdict.CONCLUSION_HOLDS
    logger.error(f"Product lemma fails for {g1} and {g2}: tags {[t.to_dict() for t in tags]}")
    return LemmaVerdict.COUNTEREXAMPLE


def _reduced_words(max_length: int) -> List[Word]:
    words: List[Word] = [()]
    frontier: List[Word] = [()]
    for _ in range(max_length):
        grown = []
        for w in frontier:
            for g in (A, -A, B, -B):
                if w and w[-1] == -g:
                    continue
                grown.append(w + (g,))
        words.extend(grown)
        frontier = grown
    return words


def _cusp_powers(max_exponent: int) -> List[Word]:
    powers = []
    for block in ((A,), (B,), (-B, -A)):
        for k in range(1, max_exponent + 1):
            powers.append(block * k)
            powers.append(inverse(block) * k)
    return powers


@dataclass(frozen=True)
class LemmaGridReport:
    pairs_checked: int
    hypothesis_met: int
    counterexamples: Tuple[Tuple[Word, Word], ...]

    @property
    def holds(self) -> bool:
        return not self.counterexamples

    def to_dict(self, surface: SurfacePresentation) -> Dict[str, Any]:
        return {
            "pairs_checked": self.pairs_checked,
            "hypothesis_met": self.hypothesis_met,
            "counterexamples": [[surface.format(g1), surface.format(g2)] for g1, g2 in self.counterexamples],
            "holds": self.holds,
        }


def lemma_a_grid(max_exponent: int = 3, max_conjugator: int = 3, threads: int = 1) -> LemmaGridReport:
    """
    Run lemma_a_check over every peripheral pair up to the given sizes.

    gamma1 ranges over the cusp powers c^k and gamma2 over x c'^l x^-1 with
    |k|, |l| <= max_exponent and |x| <= max_conjugator. Conjugating both
    elements together preserves every condition of the lemma, so leaving
    gamma1 unconjugated loses no case.
    """
    powers = _cusp_powers(max_exponent)
    conjugators = _reduced_words(max_conjugator)
    seconds = sorted(
        {free_reduce(x + p + inverse(x)) for x in conjugators for p in powers},
        key=word_key,
    )

    def check(first: Word) -> List[Tuple[LemmaVerdict, Word, Word]]:
        return [(lemma_a_check(first, second), first, second) for second in seconds]

    verdicts = [item for batch in parallel_map(check, powers, threads) for item in batch]
    met = sum(1 for v, _, _ in verdicts if v != LemmaVerdict.HYPOTHESIS_NOT_MET)
    bad = tuple((g1, g2) for v, g1, g2 in verdicts if v == LemmaVerdict.COUNTEREXAMPLE)
    logger.info(f"Product lemma grid: {len(verdicts)} pairs, {met} meet the hypothesis, {len(bad)} counterexamples")
    return LemmaGridReport(len(verdicts), met, bad)


@dataclass(frozen=True)
class SingleCrossingReport:
    """
    Attributes:
        table: (class, self-intersection) for every scanned class
        outside_list: classes with one double point missing from the listed six
        listed_self_intersections: self-intersection of each listed class
    """

    table: Tuple[Tuple[ConjClass, int], ...]
    outside_list: Tuple[ConjClass, ...]
    listed_self_intersections: Tuple[Tuple[ConjClass, int], ...]
    radius: int
    count_radius: int

    @property
    def holds(self) -> bool:
        return not self.outside_list

    def to_dict(self, surface: SurfacePresentation) -> Dict[str, Any]:
        return {
            "radius": self.radius,
            "count_radius": self.count_radius,
            "holds": self.holds,
            "outside_list": [surface.format(c.word) for c in self.outside_list],
            "listed": [[surface.format(c.word), si] for c, si in self.listed_self_intersections],
            "table": [[surface.format(c.word), si] for c, si in self.table],
        }


def classify_single_selfint(
    radius: int,
    count_radius: int = 6,
    threads: int = 1,
    settings: CountingSettings = DEFAULT_SETTINGS,
) -> SingleCrossingReport:
    """Check that every primitive class with one double point, up to word length radius, is listed."""
    surface = sphere3()
    classes = enumerate_classes(
        surface, radius, primitive=True, count_radius=count_radius, threads=threads, settings=settings
    )
    counts = parallel_map(lambda c: self_intersection(c, surface, count_radius, settings), classes, threads)
    listed = single_crossing_classes()
    outside = tuple(c for c, si in zip(classes, counts) if si == 1 and c not in listed)
    for c in outside:
        logger.error(f"{surface.format(c.word)} has one double point but is not listed")
    listed_counts = tuple((c, self_intersection(c, surface, count_radius, settings)) for c in listed)
    return SingleCrossingReport(tuple(zip(classes, counts)), outside, listed_counts, radius, count_radius)


@dataclass(frozen=True)
class PositivityReport:
    """
    Attributes:
        minimum: min of i(mu, c) over the scanned non-peripheral classes
        argmin: shortlex-first class attaining it
        running_min: (r, min over classes of length <= r) for r = 2..radius
        stabilized: every count stabilized
    """

    minimum: float
    argmin: ConjClass
    running_min: Tuple[Tuple[int, float], ...]
    stabilized: bool
    radius: int
    count_radius: int

    @property
    def positive(self) -> bool:
        return self.minimum > 0.0

    def constant_from(self) -> int:
        """Smallest r after which the running minimum no longer changes."""
        start = self.running_min[-1][0]
        for r, value in reversed(self.running_min):
            if value != self.minimum:
                break
            start = r
        return start

    def to_dict(self, surface: SurfacePresentation) -> Dict[str, Any]:
        return {
            "minimum": self.minimum,
            "argmin": surface.format(self.argmin.word),
            "positive": self.positive,
            "running_min": [[r, v] for r, v in self.running_min],
            "constant_from": self.constant_from(),
            "stabilized": self.stabilized,
            "radius": self.radius,
            "count_radius": self.count_radius,
        }


def positivity_harness(
    mu: DiscreteCurrent,
    radius: int,
    count_radius: int = 6,
    threads: int = 1,
    settings: CountingSettings = DEFAULT_SETTINGS,
) -> PositivityReport:
    """
    Minimum of i(mu, c) over primitive non-peripheral classes of length <= radius,
    with the running minimum as the length bound grows from 2.

    Raises:
        InputError: for radius < 2, or when no class qualifies
    """
    if radius < 2:
        raise InputError(f"Positivity scan needs length bound at least 2, got {radius}")
    surface = sphere3()
    classes = enumerate_classes(
        surface, radius, primitive=True, count_radius=count_radius, threads=threads, settings=settings
    )
    results = parallel_map(lambda c: intersection_number(mu, c, surface, count_radius, settings), classes, threads)
    running = []
    best: Optional[Tuple[float, ConjClass]] = None
    by_length = sorted(zip(classes, results), key=lambda item: item[0].sort_key())
    index = 0
    for r in range(2, radius + 1):
        while index < len(by_length) and len(by_length[index][0]) <= r:
            c, result = by_length[index]
            if best is None or result.value < best[0]:
                best = (result.value, c)
            index += 1
        if best is not None:
            running.append((r, best[0]))
    if best is None:
        raise InputError(f"No non-peripheral classes of length <= {radius}")
    stabilized = all(result.stabilized for result in results)
    logger.info(f"Positivity scan to length {radius}: minimum {best[0]} at {surface.format(best[1].word)}")
    return PositivityReport(best[0], best[1], tuple(running), stabilized, radius, count_radius)


def verify(
    radius: int,
    count_radius: int = 6,
    currents: Sequence[DiscreteCurrent] = (),
    threads: int = 1,
    settings: CountingSettings = DEFAULT_SETTINGS,
) -> Dict[str, Any]:
    """Run the lemma grid, the single-crossing classification and the positivity scans."""
    surface = sphere3()
    if not currents:
        currents = (
            DiscreteCurrent.from_pairs([("aB", 1.0)], surface),
            DiscreteCurrent.from_pairs([("aB", 1.0), ("bab", 1.0)], surface),
        )
    grid = lemma_a_grid(threads=threads)
    single = classify_single_selfint(min(radius, 6), count_radius, threads, settings)
    positivity = [positivity_harness(mu, radius, count_radius, threads, settings) for mu in currents]
    return {
        "lemma_grid": grid.to_dict(surface),
        "single_selfint": single.to_dict(surface),
        "positivity": [
            {"current": mu.to_dict(surface), **report.to_dict(surface)}
            for mu, report in zip(currents, positivity)
        ],
        "all_hold": grid.holds and single.holds and all(p.positive for p in positivity),
    }
