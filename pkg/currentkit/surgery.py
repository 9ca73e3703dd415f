"""
Self-Intersection Surgery for CurrentKit

Resolves a double point of a closed geodesic into three curves and iterates
the resolution until a simple curve is reached.

A crossing lift h*A of the axis A of c meets A at x1; x2 = h^-1 x1 is the
other passage through the same double point. After replacing h by h*c^k so
that x2 lies one period ahead of x1, the two loops cut out of c are
gamma2 = h^-1 and gamma3 = h*c, and the third curve is gamma2^-1 * gamma3.
Every triple is checked before it is returned.

Author: Harsh
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .currents import (
    DEFAULT_SETTINGS,
    CountingSettings,
    DiscreteCurrent,
    _frame,
    crossing_orbits,
    intersection_number,
    self_intersection,
)
from .errors import NoCrossing, NoHyperbolicBranch, StepLimit, ValidationFailed
from .hyp_core import Classification, MobiusMap, axis, classify
from .surface_group import (
    ConjClass,
    SurfacePresentation,
    Word,
    canonical_conj,
    evaluate,
    inverse,
    is_peripheral,
    primitive_root,
    reduce,
    word_key,
    word_power,
)

logger = logging.getLogger(__name__)


def find_self_crossing(
    c: ConjClass, surface: SurfacePresentation, radius: int, settings: CountingSettings = DEFAULT_SETTINGS
) -> Word:
    """
    Translating word h of a lift h*A crossing the axis A of c.

    The witness of minimal word (shortlex) is returned.

    Raises:
        NoCrossing: when c is simple at this radius
    """
    scan = crossing_orbits(surface, c, c, radius, settings)
    if not scan.witnesses:
        raise NoCrossing(f"{surface.format(c.word)} has no self-crossing within radius {radius}")
    return min((w.word for w in scan.witnesses), key=word_key)


def _period_shift(c: ConjClass, h: Word, surface: SurfacePresentation, settings: CountingSettings) -> int:
    """k such that the second passage h^-1 x1, moved by c^-k, lies within one period after x1."""
    root, _ = primitive_root(c.word)
    frame = _frame(surface, root, settings.tol_class)
    chart = MobiusMap.from_matrix(frame.transform)
    element = evaluate(h, surface)
    attracting, repelling = axis(evaluate(root, surface), settings.tol_class)
    lifted = element.matrix @ np.stack([attracting.vector, repelling.vector], axis=1)
    ends = frame.positions(lifted.T, settings.tol_pt)[0]
    first = 0.5 * (ends[0] + ends[1])
    x1 = chart.inverse().act_on_upper_half_plane(1j * math.exp(first))
    x2 = chart.act_on_upper_half_plane(element.inverse().act_on_upper_half_plane(x1))
    second = math.log(abs(x2))
    return math.floor((second - first) / frame.length)


@dataclass(frozen=True)
class Resolution:
    """
    Three curves obtained by resolving one double point of c.

    Attributes:
        source: the resolved class
        crossing: translating word used (after the period shift)
        words: (gamma1, gamma2, gamma3) as reduced words
        classes: their canonical classes
        kinds: their classifications
        self_intersections: double points of each hyperbolic output (None otherwise)
    """

    source: ConjClass
    crossing: Word
    words: Tuple[Word, Word, Word]
    classes: Tuple[ConjClass, ConjClass, ConjClass]
    kinds: Tuple[Classification, Classification, Classification]
    self_intersections: Tuple[Optional[int], Optional[int], Optional[int]]

    def hyperbolic(self, surface: SurfacePresentation) -> List[ConjClass]:
        return [
            c for c, kind in zip(self.classes, self.kinds)
            if kind == Classification.HYPERBOLIC and not is_peripheral(c, surface)
        ]

    def to_dict(self, surface: SurfacePresentation) -> Dict[str, Any]:
        return {
            "source": surface.format(self.source.word),
            "crossing": surface.format(self.crossing),
            "curves": [
                {
                    "name": f"gamma{i + 1}",
                    "class": surface.format(c.word),
                    "kind": kind.value,
                    "peripheral": is_peripheral(c, surface),
                    "self_intersection": si,
                }
                for i, (c, kind, si) in enumerate(zip(self.classes, self.kinds, self.self_intersections))
            ],
        }


def _candidate(
    c: ConjClass, h: Word, surface: SurfacePresentation, radius: int, settings: CountingSettings
) -> Tuple[Optional[Resolution], Dict[str, Any]]:
    root, _ = primitive_root(c.word)
    k = _period_shift(c, h, surface, settings)
    shifted = reduce(h + word_power(root, k), surface)
    gamma2 = inverse(shifted)
    gamma3 = reduce(shifted + c.word, surface)
    gamma1 = reduce(inverse(gamma2) + gamma3, surface)
    words = (gamma1, gamma2, gamma3)
    classes = tuple(canonical_conj(w, surface) for w in words)
    kinds = tuple(classify(evaluate(w, surface), settings.tol_class) for w in words)
    diagnostics: Dict[str, Any] = {
        "crossing": surface.format(shifted),
        "curves": [surface.format(cl.word) for cl in classes],
        "kinds": [kind.value for kind in kinds],
    }
    if any(cl.is_trivial for cl in classes):
        diagnostics["reason"] = "trivial output"
        return None, diagnostics
    if canonical_conj(gamma2 + gamma3, surface) != c:
        diagnostics["reason"] = "product is not conjugate to the source"
        return None, diagnostics

    source_si = self_intersection(c, surface, radius, settings)
    self_ints: List[Optional[int]] = []
    for cl, kind in zip(classes, kinds):
        if kind == Classification.HYPERBOLIC and not is_peripheral(cl, surface):
            self_ints.append(self_intersection(cl, surface, radius, settings))
        else:
            self_ints.append(None)
    diagnostics["self_intersections"] = self_ints
    diagnostics["source_self_intersection"] = source_si
    if any(si is not None and si >= source_si for si in self_ints):
        diagnostics["reason"] = "self-intersection did not decrease"
        return None, diagnostics
    if all(si is None for si in self_ints) and not surface.is_thrice_punctured_sphere:
        diagnostics["reason"] = "no hyperbolic output"
        return None, diagnostics
    resolution = Resolution(
        source=c,
        crossing=shifted,
        words=words,  # type: ignore[arg-type]
        classes=classes,  # type: ignore[arg-type]
        kinds=kinds,  # type: ignore[arg-type]
        self_intersections=tuple(self_ints),  # type: ignore[arg-type]
    )
    return resolution, diagnostics


def resolve(
    c: ConjClass,
    h: Word,
    surface: SurfacePresentation,
    radius: int,
    settings: CountingSettings = DEFAULT_SETTINGS,
) -> Resolution:
    """
    Resolve the double point of c witnessed by h.

    Both h and h^-1 are tried; the first triple passing every check wins.

    Raises:
        ValidationFailed: when neither orientation validates (diagnostics attached)
    """
    attempts = []
    for word in (h, inverse(h)):
        resolution, diagnostics = _candidate(c, word, surface, radius, settings)
        if resolution is not None:
            logger.debug(f"Resolved {surface.format(c.word)} into {diagnostics['curves']}")
            return resolution
        attempts.append(diagnostics)
    raise ValidationFailed(
        f"No validated resolution of {surface.format(c.word)} at {surface.format(h)}",
        diagnostics={"source": surface.format(c.word), "attempts": attempts},
    )


def surgery_report(
    mu: DiscreteCurrent,
    c: ConjClass,
    surface: SurfacePresentation,
    radius: int,
    settings: CountingSettings = DEFAULT_SETTINGS,
) -> Dict[str, Any]:
    """
    Resolve c and compare i(mu, gamma_i) with i(mu, c) for hyperbolic outputs.

    Raises:
        NoCrossing: when c is simple
        ValidationFailed: when the resolution does not validate
    """
    h = find_self_crossing(c, surface, radius, settings)
    resolution = resolve(c, h, surface, radius, settings)
    source_value = intersection_number(mu, c, surface, radius, settings).value
    rows = []
    for cl, kind in zip(resolution.classes, resolution.kinds):
        row: Dict[str, Any] = {
            "class": surface.format(cl.word),
            "kind": kind.value,
            "peripheral": is_peripheral(cl, surface),
            "intersection": None,
            "inequality_holds": None,
        }
        if kind == Classification.HYPERBOLIC and not row["peripheral"]:
            value = intersection_number(mu, cl, surface, radius, settings).value
            row["intersection"] = value
            row["inequality_holds"] = value <= source_value + 1e-9
        rows.append(row)
    hyperbolic = [row for row in rows if row["intersection"] is not None]
    report = {
        "resolution": resolution.to_dict(surface),
        "source_intersection": source_value,
        "outputs": rows,
        "some_hyperbolic": bool(hyperbolic),
        "all_inequalities_hold": all(row["inequality_holds"] for row in hyperbolic),
        "thrice_punctured_sphere_exception": surface.is_thrice_punctured_sphere and not hyperbolic,
    }
    if hyperbolic and not report["all_inequalities_hold"]:
        logger.warning(f"Intersection inequality failed for a resolution of {surface.format(c.word)}")
    return report


@dataclass(frozen=True)
class SimplifyStep:
    source: ConjClass
    chosen: ConjClass
    intersection: float
    self_intersection: int


@dataclass(frozen=True)
class Simplification:
    result: ConjClass
    steps: Tuple[SimplifyStep, ...]
    initial_self_intersection: int

    def to_dict(self, surface: SurfacePresentation) -> Dict[str, Any]:
        return {
            "result": surface.format(self.result.word),
            "initial_self_intersection": self.initial_self_intersection,
            "steps": [
                {
                    "source": surface.format(s.source.word),
                    "chosen": surface.format(s.chosen.word),
                    "intersection": s.intersection,
                    "self_intersection": s.self_intersection,
                }
                for s in self.steps
            ],
        }


def simplify_to_simple(
    mu: DiscreteCurrent,
    c: ConjClass,
    surface: SurfacePresentation,
    radius: int,
    max_steps: int = 32,
    settings: CountingSettings = DEFAULT_SETTINGS,
) -> Simplification:
    """
    Iterate resolutions down to a simple class.

    Each step keeps the hyperbolic output with the least i(mu, .), then the
    least self-intersection, then the shortlex-first word.

    Raises:
        NoHyperbolicBranch: when a resolution has no hyperbolic output
        StepLimit: after max_steps resolutions
    """
    initial = self_intersection(c, surface, radius, settings)
    current = c
    current_si = initial
    steps: List[SimplifyStep] = []
    while current_si > 0:
        if len(steps) >= max_steps:
            raise StepLimit(f"Simplification of {surface.format(c.word)} exceeded {max_steps} steps")
        h = find_self_crossing(current, surface, radius, settings)
        resolution = resolve(current, h, surface, radius, settings)
        branches = resolution.hyperbolic(surface)
        if not branches:
            raise NoHyperbolicBranch(
                f"Resolution of {surface.format(current.word)} has no hyperbolic output",
                diagnostics=resolution.to_dict(surface),
            )
        scored = []
        for branch in branches:
            value = intersection_number(mu, branch, surface, radius, settings).value
            si = self_intersection(branch, surface, radius, settings)
            scored.append((value, si, word_key(branch.word), branch))
        value, si, _, chosen = min(scored, key=lambda item: item[:3])
        steps.append(SimplifyStep(current, chosen, value, si))
        logger.debug(f"Simplify step {len(steps)}: {surface.format(chosen.word)} (i={value}, si={si})")
        current, current_si = chosen, si
    return Simplification(current, tuple(steps), initial)
