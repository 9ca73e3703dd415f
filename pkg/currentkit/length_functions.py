"""
Length Functions for CurrentKit

Weyl-chamber lengths of SL(n, R) and Sp(2n, R) representations of a surface
group, length tables normalized over a filling family, and the trichotomy
of a length function along its special curves.

Lengths come from the log-moduli of eigenvalues (Jordan projection):
SL uses the spread x1 - xn, Sp uses the sum of the n non-negative entries.

Author: Harsh
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import polynomial as P

from .currents import DEFAULT_SETTINGS, CountingSettings
from .decomposition import (
    CAVEAT_CANDIDATE_RELATIVE,
    CAVEAT_PANTS,
    CAVEAT_UNSTABILIZED,
    CrossingOracle,
    DecompositionReport,
    Piece,
    PieceLabel,
    partition,
)
from .errors import (
    DegenerateFamily,
    InputError,
    InvalidLengthTable,
    InvalidRepresentation,
    NonInvertible,
    SpectrumPairingFailed,
)
from .hyp_core import Classification, classify
from .surface_group import (
    ConjClass,
    SurfacePresentation,
    canonical_conj,
    class_of,
    evaluate,
    is_peripheral,
    is_proper_power,
)
from .workers import parallel_map

logger = logging.getLogger(__name__)

DET_TOL = 1e-8
FORM_TOL = 1e-8
RELATOR_TOL = 1e-6
PAIRING_TOL = 1e-6
FAMILY_TOL = 1e-12
ZERO_TOL = 1e-9

CAVEAT_LAMINATION_PATTERN = "lamination_pattern_unverified"


class GroupType(str, Enum):
    SL = "SL"
    SP = "Sp"

    @classmethod
    def parse(cls, text: str) -> "GroupType":
        key = text.strip().lower()
        if key.startswith("sl"):
            return cls.SL
        if key.startswith("sp"):
            return cls.SP
        raise InvalidRepresentation(f"Unknown group type {text!r}; expected SL or Sp")


def symplectic_form(dimension: int) -> np.ndarray:
    """J = [[0, I], [-I, 0]] in dimension 2n."""
    if dimension % 2:
        raise InvalidRepresentation(f"Symplectic dimension must be even, got {dimension}")
    n = dimension // 2
    return np.kron(np.array([[0.0, 1.0], [-1.0, 0.0]]), np.eye(n))


@dataclass(frozen=True, eq=False)
class MatrixRep:
    """
    A representation of a surface group into SL(n, R) or Sp(2n, R).

    Attributes:
        surface: the surface whose generators are represented
        group_type: SL or Sp
        dimension: matrix size
        matrices: generator images, aligned with surface.generators
    """

    surface: SurfacePresentation
    group_type: GroupType
    dimension: int
    matrices: Tuple[np.ndarray, ...]

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        """
        Raises:
            InvalidRepresentation: on a shape, determinant, form or relator failure
        """
        if len(self.matrices) != self.surface.rank:
            raise InvalidRepresentation(
                f"Expected {self.surface.rank} generator matrices, got {len(self.matrices)}"
            )
        form = symplectic_form(self.dimension) if self.group_type == GroupType.SP else None
        for name, m in zip(self.surface.generators, self.matrices):
            if m.shape != (self.dimension, self.dimension):
                raise InvalidRepresentation(f"Matrix of {name} has shape {m.shape}, expected {self.dimension}")
            det = float(np.linalg.det(m))
            if abs(det - 1.0) > DET_TOL:
                raise InvalidRepresentation(f"Matrix of {name} has determinant {det}")
            if form is not None and not np.allclose(m.T @ form @ m, form, atol=FORM_TOL, rtol=0.0):
                raise InvalidRepresentation(f"Matrix of {name} does not preserve the symplectic form")
        identity = np.eye(self.dimension)
        for r in self.surface.relators:
            image = self.evaluate(r)
            if not (np.allclose(image, identity, atol=RELATOR_TOL) or np.allclose(image, -identity, atol=RELATOR_TOL)):
                raise InvalidRepresentation(f"Relator {self.surface.format(r)} does not map to +-identity")

    def generator(self, g: int) -> np.ndarray:
        m = self.matrices[abs(g) - 1]
        return m if g > 0 else np.linalg.inv(m)

    def evaluate(self, w: Sequence[int]) -> np.ndarray:
        result = np.eye(self.dimension)
        for g in w:
            result = result @ self.generator(g)
        return result

    def length(self, c: Union[ConjClass, Sequence[int]]) -> float:
        word = c.word if isinstance(c, ConjClass) else tuple(c)
        return length_L(self.evaluate(word), self.group_type)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], surface: SurfacePresentation) -> "MatrixRep":
        """
        Build a representation from its JSON form.

        Example:
            >>> MatrixRep.from_dict({"group_type": "SL", "dimension": 2,
            ...     "generators": {"a": [[1, 1], [1, 2]], "b": [[1, -1], [-1, 2]]}}, surface)
        """
        try:
            group_type = GroupType.parse(str(data["group_type"]))
            dimension = int(data["dimension"])
            raw = data["generators"]
            if isinstance(raw, Mapping):
                matrices = tuple(np.asarray(raw[g], dtype=float) for g in surface.generators)
            else:
                matrices = tuple(np.asarray(m, dtype=float) for m in raw)
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidRepresentation(f"Malformed representation: {e}") from e
        return cls(surface, group_type, dimension, matrices)

    @classmethod
    def from_json(cls, text: str, surface: SurfacePresentation) -> "MatrixRep":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise InvalidRepresentation(f"Representation is not valid JSON: {e}") from e
        return cls.from_dict(data, surface)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "group_type": self.group_type.value,
            "dimension": self.dimension,
            "generators": {g: m.tolist() for g, m in zip(self.surface.generators, self.matrices)},
        }


@dataclass(frozen=True)
class ChamberVector:
    x: Tuple[float, ...]
    group_type: GroupType

    @property
    def norm(self) -> float:
        if self.group_type == GroupType.SP:
            return float(sum(self.x))
        return float(self.x[0] - self.x[-1])


def chamber_vector(m: np.ndarray, group_type: Union[GroupType, str]) -> ChamberVector:
    """
    Weyl-chamber translation vector of a matrix.

    Raises:
        NonInvertible: for a singular matrix
        SpectrumPairingFailed: when Sp eigenvalues do not pair as lambda <-> 1/lambda
    """
    group_type = GroupType.parse(group_type) if isinstance(group_type, str) else group_type
    m = np.asarray(m, dtype=float)
    if abs(np.linalg.det(m)) < 1e-12:
        raise NonInvertible("Matrix is singular")
    logs = np.sort(np.log(np.abs(np.linalg.eigvals(m))))[::-1]
    if group_type == GroupType.SL:
        logs = logs - logs.mean()
        return ChamberVector(tuple(float(v) for v in logs), group_type)

    size = logs.size
    if size % 2:
        raise SpectrumPairingFailed(f"Symplectic matrices have even size, got {size}")
    n = size // 2
    pairs = logs[:n] + logs[::-1][:n]
    if np.any(np.abs(pairs) > PAIRING_TOL):
        raise SpectrumPairingFailed(f"Log-spectrum {logs.tolist()} is not symmetric")
    half = np.maximum(0.5 * (logs[:n] - logs[::-1][:n]), 0.0)
    return ChamberVector(tuple(float(v) for v in half), group_type)


def length_L(m: np.ndarray, group_type: Union[GroupType, str]) -> float:
    """
    ||nu(m)||: x1 - xn for SL, x1 + ... + xn for Sp.

    Example:
        >>> round(length_L(np.diag([2.0, 1.0, 0.5]), "SL"), 10)
        1.3862943611
    """
    return chamber_vector(m, group_type).norm


def symmetric_power(m: np.ndarray, n: int) -> np.ndarray:
    """
    Action of a 2x2 matrix on binary forms of degree n - 1.

    Column j holds (a x + c y)^(n-1-j) (b x + d y)^j in the monomial basis,
    conjugated by sqrt of the binomial coefficients so that rotations stay
    orthogonal. The spectrum is unchanged by the conjugation.
    """
    if n < 2:
        raise InputError(f"Symmetric power dimension must be at least 2, got {n}")
    (a, b), (c, d) = np.asarray(m, dtype=float)
    degree = n - 1
    out = np.zeros((n, n))
    for j in range(n):
        column = P.polymul(P.polypow([a, c], degree - j), P.polypow([b, d], j))
        out[: len(column), j] = column
    scale = np.sqrt([math.comb(degree, k) for k in range(n)])
    return (out / scale[:, None]) * scale[None, :]


def sym_power_rep(surface: SurfacePresentation, n: int) -> MatrixRep:
    """The Fuchsian representation followed by the n-dimensional irreducible one."""
    matrices = tuple(symmetric_power(m.matrix, n) for m in surface.matrices)
    return MatrixRep(surface, GroupType.SL, n, matrices)


def diagonal_rep(surface: SurfacePresentation, n: int) -> MatrixRep:
    """The Fuchsian representation followed by SL(2) -> Sp(2n), M -> M (x) I_n."""
    if n < 1:
        raise InputError(f"Diagonal embedding needs n >= 1, got {n}")
    matrices = tuple(np.kron(m.matrix, np.eye(n)) for m in surface.matrices)
    return MatrixRep(surface, GroupType.SP, 2 * n, matrices)


@dataclass(frozen=True)
class LengthTable:
    """
    Lengths of classes, optionally normalized over a filling family.

    Attributes:
        entries: (class, length) pairs in class order
        family: the filling family
        normalization: raw family sum the entries were divided by (1.0 if raw)
    """

    entries: Tuple[Tuple[ConjClass, float], ...]
    family: Tuple[ConjClass, ...] = ()
    normalization: float = 1.0

    def __post_init__(self):
        for c, value in self.entries:
            if value < 0.0 or not math.isfinite(value):
                raise InvalidLengthTable(f"Length of {c.word} must be finite and non-negative, got {value}")

    def as_dict(self) -> Dict[ConjClass, float]:
        return dict(self.entries)

    def value(self, c: ConjClass) -> float:
        table = self.as_dict()
        if c not in table:
            raise InvalidLengthTable(f"Class {c.word} is not in the table")
        return table[c]

    def family_sum(self) -> float:
        table = self.as_dict()
        missing = [c for c in self.family if c not in table]
        if missing:
            raise InvalidLengthTable(f"Filling family classes missing from the table: {[c.word for c in missing]}")
        return sum(table[c] for c in self.family)

    def normalized(self) -> "LengthTable":
        """
        Divide by the family sum.

        Raises:
            DegenerateFamily: when the family sum is numerically zero
        """
        total = self.family_sum()
        if total <= FAMILY_TOL:
            raise DegenerateFamily(f"Filling family has total length {total}")
        return LengthTable(
            entries=tuple((c, v / total) for c, v in self.entries),
            family=self.family,
            normalization=self.normalization * total,
        )

    def to_dict(self, surface: SurfacePresentation) -> Dict[str, Any]:
        return {
            "family": [surface.format(c.word) for c in self.family],
            "normalization": self.normalization,
            "entries": [[surface.format(c.word), v] for c, v in self.entries],
        }

    @classmethod
    def from_pairs(
        cls,
        pairs: Iterable[Tuple[str, float]],
        surface: SurfacePresentation,
        family: Sequence[str] = (),
    ) -> "LengthTable":
        entries: Dict[ConjClass, float] = {}
        for word, value in pairs:
            entries[class_of(word, surface)] = float(value)
        ordered = tuple(sorted(entries.items(), key=lambda item: item[0].sort_key()))
        return cls(ordered, tuple(class_of(w, surface) for w in family))


def length_table(
    rep: MatrixRep,
    classes: Sequence[ConjClass],
    filling_family: Sequence[Union[str, ConjClass]],
    normalize: bool = True,
    threads: int = 1,
) -> LengthTable:
    """
    L_rho on the given classes and the filling family.

    Raises:
        DegenerateFamily: for an empty family or a numerically zero family sum
    """
    if not filling_family:
        raise DegenerateFamily("Filling family is empty")
    surface = rep.surface
    family = tuple(
        c if isinstance(c, ConjClass) else class_of(c, surface) for c in filling_family
    )
    ordered = list(dict.fromkeys(list(classes) + list(family)))
    ordered.sort(key=ConjClass.sort_key)
    values = parallel_map(rep.length, ordered, threads)
    table = LengthTable(tuple(zip(ordered, values)), family)
    logger.debug(f"Length table on {surface.name}: {len(ordered)} classes, family sum {table.family_sum():.6g}")
    if table.family_sum() <= FAMILY_TOL:
        raise DegenerateFamily(f"Filling family has total length {table.family_sum()}")
    return table.normalized() if normalize else table


def _piece_interior(
    members: Sequence[ConjClass],
    candidates: Sequence[ConjClass],
    specials: Sequence[ConjClass],
    oracle: CrossingOracle,
) -> Tuple[ConjClass, ...]:
    member_set = set(members)
    inside = [
        c for c in candidates
        if c in member_set
        or (any(oracle.crosses(c, m) for m in members) and not any(oracle.crosses(c, e) for e in specials))
    ]
    return tuple(inside)


def trichotomy_classify(
    table: LengthTable,
    surface: SurfacePresentation,
    count_radius: int,
    settings: CountingSettings = DEFAULT_SETTINGS,
    zero_tol: float = ZERO_TOL,
) -> DecompositionReport:
    """
    Special curves and labelled pieces of a length function.

    Candidates are the primitive non-peripheral hyperbolic classes of the
    table. A piece is zero when L vanishes on its interior, positive_systole
    when L is positive there (with the minimum reported), and lamination
    when both happen.

    Raises:
        InvalidLengthTable: when L vanishes on every candidate
    """
    values = table.as_dict()
    candidates = [
        c for c in sorted(values, key=ConjClass.sort_key)
        if not is_proper_power(c.word)
        and not is_peripheral(c, surface)
        and classify(evaluate(c.word, surface), settings.tol_class) == Classification.HYPERBOLIC
    ]
    if not candidates:
        raise InvalidLengthTable("Length table has no hyperbolic non-peripheral classes")
    if all(values[c] <= zero_tol for c in candidates):
        raise InvalidLengthTable("Length function vanishes on every candidate")

    oracle = CrossingOracle(surface, count_radius, settings)
    split = partition(candidates, values, oracle, zero_tol=zero_tol)
    pieces = []
    caveats = [CAVEAT_CANDIDATE_RELATIVE]
    for comp, boundary in zip(split.components, split.boundaries):
        interior = _piece_interior(comp, candidates, split.specials, oracle)
        zeros = [c for c in interior if values[c] <= zero_tol]
        bound: Optional[float] = None
        if len(zeros) == len(interior):
            label = PieceLabel.ZERO
        elif not zeros:
            label = PieceLabel.POSITIVE_SYSTOLE
            bound = min(values[c] for c in interior)
        else:
            label = PieceLabel.LAMINATION
            if not _lamination_pattern(interior, zeros, values, oracle, zero_tol):
                caveats.append(f"{CAVEAT_LAMINATION_PATTERN}:{surface.format(comp[0].word)}")
        pieces.append(Piece(
            atoms=(),
            generators=tuple(comp),
            label=label,
            systole_lower_bound=bound,
            boundary=boundary,
            interior=interior,
        ))
    if split.specials:
        caveats.append(CAVEAT_PANTS)
    if not oracle.stabilized:
        caveats.append(CAVEAT_UNSTABILIZED)
    return DecompositionReport(
        special_curves=split.specials,
        atoms_on_special=(),
        pieces=tuple(pieces),
        candidate_radius=max(len(c) for c in candidates),
        count_radius=count_radius,
        caveats=tuple(caveats),
        values=tuple((c, values[c]) for c in candidates),
    )


def _lamination_pattern(
    interior: Sequence[ConjClass],
    zeros: Sequence[ConjClass],
    values: Mapping[ConjClass, float],
    oracle: CrossingOracle,
    zero_tol: float,
) -> bool:
    """Zero classes carry a multicurve: simple zeros pairwise disjoint, positive classes crossing one of them."""
    leaves = [c for c in zeros if oracle.simple(c)]
    if not leaves or any(oracle.crosses(x, y) for i, x in enumerate(leaves) for y in leaves[i + 1:]):
        return False
    for c in interior:
        crosses_leaf = any(oracle.crosses(c, leaf) for leaf in leaves)
        if crosses_leaf != (values[c] > zero_tol) and c not in leaves:
            return False
    return True


def hitchin_defect(surface: SurfacePresentation, n: int, classes: Sequence[ConjClass]) -> float:
    """max |L(Sym^(n-1) rho(c)) - (n-1) l(c)| over the classes."""
    rep = sym_power_rep(surface, n)
    worst = 0.0
    for c in classes:
        expected = (n - 1) * length_L(evaluate(c.word, surface).matrix, GroupType.SL)
        worst = max(worst, abs(rep.length(c) - expected))
    return worst


def representation_for(kind: str, surface: SurfacePresentation, n: int, text: Optional[str] = None) -> MatrixRep:
    """
    Representation named on the command line: sym_power, diagonal or file.

    Raises:
        InputError: for an unknown kind or a missing file body
    """
    if kind == "sym_power":
        return sym_power_rep(surface, n)
    if kind == "diagonal":
        return diagonal_rep(surface, n)
    if kind == "file":
        if text is None:
            raise InputError("A representation file is required for --rep file")
        return MatrixRep.from_json(text, surface)
    raise InputError(f"Unknown representation kind {kind!r}")


def classes_from_words(words: Iterable[str], surface: SurfacePresentation) -> List[ConjClass]:
    return [canonical_conj(surface.parse(w), surface) for w in words]
