"""
Current Decomposition for CurrentKit

Special curves, support graph, subsurface pieces and their trichotomy
labels, computed over an enumerated set of candidate classes.

Every answer is relative to the candidate set: a special curve is a simple
candidate c with f(c) = 0 such that every candidate crossing c has f > 0,
where f is i(mu, .) or a length table. Pieces are the connected components
of the crossing graph of the simple candidates that avoid every special
curve, together with the support atoms placed by their crossings.

Author: Harsh
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Set, Tuple

import networkx as nx

from .currents import (
    DEFAULT_SETTINGS,
    CountingSettings,
    DiscreteCurrent,
    class_intersection,
    crossing_orbits,
    enumerate_classes,
    intersection_number,
    is_simple,
    pairing,
)
from .errors import InputError, InvalidCurrent, NoHyperbolicBranch, StepLimit, ValidationFailed
from .surface_group import ConjClass, SurfacePresentation
from .surgery import simplify_to_simple
from .workers import parallel_map

logger = logging.getLogger(__name__)

ZERO_TOL = 1e-9

CAVEAT_CANDIDATE_RELATIVE = "candidate_relative"
CAVEAT_UNSTABILIZED = "unstabilized_counts"
CAVEAT_PANTS = "pants_regions_not_enumerated"
CAVEAT_SYSTOLE = "systole_not_certified"
CAVEAT_CUSP = "cusp_region_undecided"
CAVEAT_AMBIGUOUS = "ambiguous_assignment"


class PieceLabel(str, Enum):
    ZERO = "zero"
    LAMINATION = "lamination"
    POSITIVE_SYSTOLE = "positive_systole"


class CrossingOracle:
    """
    Cached crossing and simplicity tests between classes at a fixed radius.

    Records whether every count it used was stabilized.
    """

    def __init__(self, surface: SurfacePresentation, radius: int, settings: CountingSettings = DEFAULT_SETTINGS):
        self.surface = surface
        self.radius = radius
        self.settings = settings
        self.stabilized = True
        self._counts: Dict[Tuple[ConjClass, ConjClass], int] = {}
        self._simple: Dict[ConjClass, bool] = {}

    def count(self, c1: ConjClass, c2: ConjClass) -> int:
        key = (c1, c2) if c1.sort_key() <= c2.sort_key() else (c2, c1)
        if key not in self._counts:
            scan = crossing_orbits(self.surface, key[0], key[1], self.radius, self.settings)
            self.stabilized = self.stabilized and scan.stabilized
            self._counts[key] = class_intersection(key[0], key[1], self.surface, self.radius, self.settings)
        return self._counts[key]

    def crosses(self, c1: ConjClass, c2: ConjClass) -> bool:
        return self.count(c1, c2) > 0

    def simple(self, c: ConjClass) -> bool:
        if c not in self._simple:
            self._simple[c] = is_simple(c, self.surface, self.radius, self.settings)
        return self._simple[c]


@dataclass(frozen=True)
class Partition:
    """
    Candidate-set partition shared by the decomposition and the length trichotomy.

    Attributes:
        specials: special curves, in candidate order
        components: node lists of the crossing graph (interior candidates and atoms)
        boundaries: special curves bounding each component
        ambiguous: atoms that cross a special curve
    """

    specials: Tuple[ConjClass, ...]
    components: Tuple[Tuple[ConjClass, ...], ...]
    boundaries: Tuple[Tuple[ConjClass, ...], ...]
    ambiguous: Tuple[ConjClass, ...]


def partition(
    candidates: Sequence[ConjClass],
    values: Mapping[ConjClass, float],
    oracle: CrossingOracle,
    atoms: Sequence[ConjClass] = (),
    zero_tol: float = ZERO_TOL,
) -> Partition:
    """
    Split candidates along the special curves of f = values.

    Args:
        candidates: classes f is known on
        values: f on every candidate
        oracle: crossing tests
        atoms: support classes to place (may lie outside the candidates)
        zero_tol: values at or below this count as zero
    """
    def zero(c: ConjClass) -> bool:
        return values[c] <= zero_tol

    simple = [c for c in candidates if oracle.simple(c)]
    specials = []
    for e in simple:
        if zero(e) and all(not zero(other) for other in candidates if other != e and oracle.crosses(e, other)):
            specials.append(e)
    special_set = set(specials)

    graph = nx.Graph()
    for c in simple:
        if c not in special_set and not any(oracle.crosses(c, e) for e in specials):
            graph.add_node(c)
    ambiguous = []
    for atom in atoms:
        if atom in special_set:
            continue
        if any(oracle.crosses(atom, e) for e in specials):
            ambiguous.append(atom)
        graph.add_node(atom)
    nodes = list(graph.nodes)
    for i, first in enumerate(nodes):
        for second in nodes[i + 1:]:
            if oracle.crosses(first, second):
                graph.add_edge(first, second)

    order = {c: i for i, c in enumerate(nodes)}
    components = sorted(
        (tuple(sorted(comp, key=order.__getitem__)) for comp in nx.connected_components(graph)),
        key=lambda comp: order[comp[0]],
    )
    boundaries = []
    for comp in components:
        bounding = []
        for e in specials:
            crossing_e = [other for other in candidates if other != e and oracle.crosses(e, other)]
            if any(oracle.crosses(x, member) for x in crossing_e for member in comp):
                bounding.append(e)
        boundaries.append(tuple(bounding))
    return Partition(tuple(specials), tuple(components), tuple(boundaries), tuple(ambiguous))


@dataclass(frozen=True)
class Piece:
    """
    One piece of a decomposition.

    Attributes:
        atoms: support atoms with weights
        generators: assigned atom classes (stand-in for the piece subgroup)
        label: zero, lamination or positive_systole
        systole_lower_bound: min f over candidates crossing the piece atoms
            and no special curve (positive_systole only)
        boundary: special curves bounding the piece
        interior: candidate classes inside the piece
    """

    atoms: Tuple[Tuple[ConjClass, float], ...]
    generators: Tuple[ConjClass, ...]
    label: PieceLabel
    systole_lower_bound: Optional[float]
    boundary: Tuple[ConjClass, ...]
    interior: Tuple[ConjClass, ...]

    @property
    def weight(self) -> float:
        return sum(w for _, w in self.atoms)

    def to_dict(self, surface: SurfacePresentation) -> Dict[str, Any]:
        return {
            "atoms": [[surface.format(c.word), w] for c, w in self.atoms],
            "generators": [surface.format(c.word) for c in self.generators],
            "label": self.label.value,
            "systole_lower_bound": self.systole_lower_bound,
            "boundary": [surface.format(c.word) for c in self.boundary],
            "interior_count": len(self.interior),
        }


@dataclass(frozen=True)
class DecompositionReport:
    special_curves: Tuple[ConjClass, ...]
    atoms_on_special: Tuple[Tuple[ConjClass, float], ...]
    pieces: Tuple[Piece, ...]
    candidate_radius: int
    count_radius: int
    caveats: Tuple[str, ...]
    values: Tuple[Tuple[ConjClass, float], ...] = field(default=(), repr=False)

    @property
    def nonzero_pieces(self) -> List[Piece]:
        return [p for p in self.pieces if p.label != PieceLabel.ZERO]

    def to_dict(self, surface: SurfacePresentation) -> Dict[str, Any]:
        return {
            "special_curves": [surface.format(c.word) for c in self.special_curves],
            "atoms_on_special": [[surface.format(c.word), w] for c, w in self.atoms_on_special],
            "pieces": [p.to_dict(surface) for p in self.pieces],
            "candidate_radius": self.candidate_radius,
            "count_radius": self.count_radius,
            "caveats": list(self.caveats),
        }


def _require_discrete(mu: DiscreteCurrent) -> None:
    if mu.liouville_weight:
        raise InvalidCurrent("Decompositions need a purely atomic current")


def candidate_values(
    mu: DiscreteCurrent,
    candidates: Sequence[ConjClass],
    surface: SurfacePresentation,
    count_radius: int,
    threads: int = 1,
    settings: CountingSettings = DEFAULT_SETTINGS,
) -> Tuple[Dict[ConjClass, float], bool]:
    """i(mu, c) for every candidate, and whether all counts stabilized."""
    results = parallel_map(
        lambda c: intersection_number(mu, c, surface, count_radius, settings), candidates, threads
    )
    values = {c: r.value for c, r in zip(candidates, results)}
    return values, all(r.stabilized for r in results)


def _candidates(
    mu_atoms: Sequence[ConjClass],
    surface: SurfacePresentation,
    radius: int,
    count_radius: int,
    threads: int,
    settings: CountingSettings,
) -> List[ConjClass]:
    candidates = enumerate_classes(
        surface, radius, primitive=True, count_radius=count_radius, threads=threads, settings=settings
    )
    extra = [atom for atom in mu_atoms if atom not in set(candidates)]
    return candidates + extra


def support_graph(
    mu: DiscreteCurrent,
    surface: SurfacePresentation,
    radius: int,
    settings: CountingSettings = DEFAULT_SETTINGS,
) -> nx.Graph:
    """
    Graph on the support atoms: an edge when two atoms intersect, a loop on
    every non-simple atom. Edge attribute "intersection" holds the count.
    """
    oracle = CrossingOracle(surface, radius, settings)
    graph = nx.Graph()
    atoms = list(mu.support)
    graph.add_nodes_from(atoms)
    for i, first in enumerate(atoms):
        for second in atoms[i:]:
            count = oracle.count(first, second)
            if count > 0:
                graph.add_edge(first, second, intersection=count)
    graph.graph["stabilized"] = oracle.stabilized
    return graph


def support_components(graph: nx.Graph) -> List[Tuple[ConjClass, ...]]:
    order = {c: i for i, c in enumerate(graph.nodes)}
    comps = [tuple(sorted(comp, key=order.__getitem__)) for comp in nx.connected_components(graph)]
    return sorted(comps, key=lambda comp: order[comp[0]])


def special_curves(
    mu: DiscreteCurrent,
    surface: SurfacePresentation,
    radius: int,
    count_radius: int,
    threads: int = 1,
    settings: CountingSettings = DEFAULT_SETTINGS,
    report: Optional[DecompositionReport] = None,
) -> List[ConjClass]:
    """
    Special curves of mu among the candidates of word length <= radius.

    Args:
        report: a decomposition of mu already computed at these radii; it is
            reused instead of decomposing again

    Raises:
        InputError: when report was computed at other radii
    """
    return list(_report_for(mu, surface, radius, count_radius, threads, settings, report).special_curves)


def _report_for(
    mu: DiscreteCurrent,
    surface: SurfacePresentation,
    radius: int,
    count_radius: int,
    threads: int,
    settings: CountingSettings,
    report: Optional[DecompositionReport],
) -> DecompositionReport:
    if report is None:
        return decompose(mu, surface, radius, count_radius, threads, settings)
    if (report.candidate_radius, report.count_radius) != (radius, count_radius):
        raise InputError(
            f"Decomposition was computed at radii ({report.candidate_radius}, {report.count_radius}), "
            f"not ({radius}, {count_radius})"
        )
    return report


def _label_piece(
    atoms: Sequence[Tuple[ConjClass, float]],
    candidates: Sequence[ConjClass],
    values: Mapping[ConjClass, float],
    specials: Sequence[ConjClass],
    oracle: CrossingOracle,
) -> Tuple[PieceLabel, Optional[float]]:
    if not atoms:
        return PieceLabel.ZERO, None
    classes = [c for c, _ in atoms]
    if all(oracle.simple(c) for c in classes) and not any(
        oracle.crosses(a, b) for i, a in enumerate(classes) for b in classes[i + 1:]
    ):
        return PieceLabel.LAMINATION, None
    crossing = [
        c for c in candidates
        if any(oracle.crosses(c, a) for a in classes) and not any(oracle.crosses(c, e) for e in specials)
    ]
    bound = min((values[c] for c in crossing), default=None)
    return PieceLabel.POSITIVE_SYSTOLE, bound


def decompose(
    mu: DiscreteCurrent,
    surface: SurfacePresentation,
    radius: int,
    count_radius: int,
    threads: int = 1,
    settings: CountingSettings = DEFAULT_SETTINGS,
) -> DecompositionReport:
    """
    Decompose mu into special-curve atoms and labelled pieces.

    Args:
        radius: word length of candidate classes
        count_radius: ball radius of every count

    Raises:
        InvalidCurrent: for a current with a Liouville part
    """
    _require_discrete(mu)
    oracle = CrossingOracle(surface, count_radius, settings)
    candidates = _candidates(mu.support, surface, radius, count_radius, threads, settings)
    values, stabilized = candidate_values(mu, candidates, surface, count_radius, threads, settings)
    split = partition(candidates, values, oracle, mu.support)
    special_set = set(split.specials)

    pieces = []
    for comp, boundary in zip(split.components, split.boundaries):
        members = set(comp)
        atoms = tuple((c, w) for c, w in mu.atoms if c in members)
        label, bound = _label_piece(atoms, candidates, values, split.specials, oracle)
        pieces.append(Piece(
            atoms=atoms,
            generators=tuple(c for c, _ in atoms),
            label=label,
            systole_lower_bound=bound,
            boundary=boundary,
            interior=tuple(c for c in comp if c in values),
        ))

    caveats = [CAVEAT_CANDIDATE_RELATIVE]
    if not (stabilized and oracle.stabilized):
        caveats.append(CAVEAT_UNSTABILIZED)
    caveats.extend(f"{CAVEAT_AMBIGUOUS}:{surface.format(c.word)}" for c in split.ambiguous)
    if split.specials:
        caveats.append(CAVEAT_PANTS)
        if not surface.is_closed:
            caveats.append(CAVEAT_CUSP)
    if any(p.label == PieceLabel.POSITIVE_SYSTOLE for p in pieces):
        caveats.append(CAVEAT_SYSTOLE)
    for caveat in caveats[1:]:
        logger.warning(f"Decomposition caveat: {caveat}")

    return DecompositionReport(
        special_curves=split.specials,
        atoms_on_special=tuple((c, w) for c, w in mu.atoms if c in special_set),
        pieces=tuple(pieces),
        candidate_radius=radius,
        count_radius=count_radius,
        caveats=tuple(caveats),
        values=tuple(values.items()),
    )


def is_basic(
    mu: DiscreteCurrent,
    surface: SurfacePresentation,
    radius: int,
    count_radius: int,
    threads: int = 1,
    settings: CountingSettings = DEFAULT_SETTINGS,
    report: Optional[DecompositionReport] = None,
) -> bool:
    """One non-zero piece, no atoms on special curves, f > 0 on every interior candidate."""
    report = _report_for(mu, surface, radius, count_radius, threads, settings, report)
    nonzero = report.nonzero_pieces
    if len(nonzero) != 1 or report.atoms_on_special:
        return False
    values = dict(report.values)
    return all(values[c] > ZERO_TOL for c in nonzero[0].interior)


class ZeroVerdict(str, Enum):
    ZERO_FOUND = "zero_found"
    NONE = "none_up_to_radius"


@dataclass(frozen=True)
class ZeroDetection:
    verdict: ZeroVerdict
    witness: Optional[DiscreteCurrent]
    radius: int
    caveats: Tuple[str, ...] = ()

    def to_dict(self, surface: SurfacePresentation) -> Dict[str, Any]:
        return {
            "verdict": self.verdict.value,
            "witness": None if self.witness is None else self.witness.to_dict(surface)["atoms"],
            "radius": self.radius,
            "caveats": list(self.caveats),
        }


def zero_detector(
    mu: DiscreteCurrent,
    surface: SurfacePresentation,
    radius: int,
    count_radius: int,
    threads: int = 1,
    settings: CountingSettings = DEFAULT_SETTINGS,
) -> ZeroDetection:
    """
    Look for a multicurve nu != 0 with i(mu, nu) = 0.

    Simple zero candidates are collected greedily into a disjoint multicurve.
    Failing that, a non-simple zero candidate is simplified by surgery.
    """
    _require_discrete(mu)
    candidates = enumerate_classes(
        surface, radius, primitive=True, count_radius=count_radius, threads=threads, settings=settings
    )
    values, _ = candidate_values(mu, candidates, surface, count_radius, threads, settings)
    oracle = CrossingOracle(surface, count_radius, settings)
    zeros = [c for c in candidates if values[c] <= ZERO_TOL]

    chosen: List[ConjClass] = []
    for c in zeros:
        if oracle.simple(c) and not any(oracle.crosses(c, other) for other in chosen):
            chosen.append(c)
    if chosen:
        witness = DiscreteCurrent.from_pairs([(c, 1.0) for c in chosen], surface)
        logger.info(f"Zero found on {surface.name}: {[surface.format(c.word) for c in chosen]}")
        return ZeroDetection(ZeroVerdict.ZERO_FOUND, witness, radius)

    for c in zeros:
        if surface.is_thrice_punctured_sphere:
            break
        try:
            reduced = simplify_to_simple(mu, c, surface, count_radius, settings=settings)
        except (NoHyperbolicBranch, StepLimit, ValidationFailed) as e:
            logger.debug(f"Could not simplify {surface.format(c.word)}: {e}")
            continue
        if values.get(reduced.result, None) is None:
            value = intersection_number(mu, reduced.result, surface, count_radius, settings).value
        else:
            value = values[reduced.result]
        if value <= ZERO_TOL:
            witness = DiscreteCurrent.delta(reduced.result, surface)
            return ZeroDetection(ZeroVerdict.ZERO_FOUND, witness, radius)

    if zeros:
        witness = DiscreteCurrent.delta(zeros[0], surface)
        return ZeroDetection(ZeroVerdict.ZERO_FOUND, witness, radius, ("witness_not_simple",))
    return ZeroDetection(ZeroVerdict.NONE, None, radius)


@dataclass(frozen=True)
class ZeroRegion:
    classes: Tuple[ConjClass, ...]
    somewhat_short_region: bool


def zero_intersection_graph(
    mu: DiscreteCurrent,
    surface: SurfacePresentation,
    radius: int,
    count_radius: int,
    threads: int = 1,
    settings: CountingSettings = DEFAULT_SETTINGS,
) -> Tuple[nx.Graph, List[ZeroRegion]]:
    """
    Crossing graph of the candidates with i(mu, c) = 0.

    A component other than a single simple curve spans a region of
    mu-somewhat short geodesics.
    """
    _require_discrete(mu)
    candidates = enumerate_classes(
        surface, radius, primitive=True, count_radius=count_radius, threads=threads, settings=settings
    )
    values, _ = candidate_values(mu, candidates, surface, count_radius, threads, settings)
    oracle = CrossingOracle(surface, count_radius, settings)
    zeros = [c for c in candidates if values[c] <= ZERO_TOL]
    graph = nx.Graph()
    graph.add_nodes_from(zeros)
    for i, first in enumerate(zeros):
        for second in zeros[i:]:
            if oracle.crosses(first, second):
                graph.add_edge(first, second)
    regions = [
        ZeroRegion(comp, not (len(comp) == 1 and oracle.simple(comp[0])))
        for comp in support_components(graph)
    ]
    return graph, regions


def reconstruction_gap(
    report: DecompositionReport,
    surface: SurfacePresentation,
    count_radius: int,
    settings: CountingSettings = DEFAULT_SETTINGS,
) -> float:
    """
    Largest |i(mu, c) - sum over pieces and special atoms| over the candidates.

    Zero when the pieces and special atoms reassemble mu.
    """
    gap = 0.0
    parts = [DiscreteCurrent(atoms=p.atoms) for p in report.pieces if p.atoms]
    parts.extend(DiscreteCurrent(atoms=((c, w),)) for c, w in report.atoms_on_special)
    for c, value in report.values:
        total = sum(intersection_number(part, c, surface, count_radius, settings).value for part in parts)
        gap = max(gap, abs(total - value))
    return gap
