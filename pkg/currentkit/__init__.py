"""
CurrentKit - Geodesic Currents on Hyperbolic Surfaces

This package provides:
- Boundary geometry of the hyperbolic plane (hyp_core)
- Surface groups, words and conjugacy classes (surface_group)
- Discrete currents and the intersection engine (currents)
- Special curves and subsurface decomposition (decomposition)
- Self-intersection surgery (surgery)
- Thrice-punctured sphere verification (sphere3)
- Weyl-chamber length functions (length_functions)
- Configuration, logging, retries and report export utilities

Author: Harsh
"""

from .config_loader import ConfigLoader, load_config
from .currents import (
    CountingSettings,
    DiscreteCurrent,
    IntersectionResult,
    SSCertificate,
    SSVerdict,
    SystoleScan,
    class_intersection,
    enumerate_classes,
    intersection_number,
    is_simple,
    liouville_length,
    pairing,
    parse_class,
    self_intersection,
    somewhat_short,
    systole_scan,
)
from .decomposition import (
    DecompositionReport,
    Piece,
    PieceLabel,
    decompose,
    is_basic,
    special_curves,
    support_graph,
    zero_detector,
    zero_intersection_graph,
)
from .errors import (
    CurrentKitError,
    InputError,
    PostconditionError,
    ResourceLimit,
)
from .export_utils import build_report, export_to_json, export_to_markdown, save_export_file
from .hyp_core import (
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
from .length_functions import (
    ChamberVector,
    GroupType,
    LengthTable,
    MatrixRep,
    chamber_vector,
    diagonal_rep,
    length_L,
    length_table,
    sym_power_rep,
    trichotomy_classify,
)
from .logging_config import setup_logging
from .sphere3 import (
    PeripheralTag,
    classify_single_selfint,
    lemma_a_check,
    peripheral_class,
    positivity_harness,
)
from .surface_group import (
    ConjClass,
    SurfacePresentation,
    ball,
    builtin,
    canonical_conj,
    class_of,
    coset_reps,
    evaluate,
    reduce,
    torus_curve,
)
from .surgery import find_self_crossing, resolve, simplify_to_simple, surgery_report

__all__ = [
    'ConfigLoader',
    'load_config',
    'setup_logging',
    'build_report',
    'export_to_json',
    'export_to_markdown',
    'save_export_file',
    'CurrentKitError',
    'InputError',
    'ResourceLimit',
    'PostconditionError',
    'BoundaryPoint',
    'Classification',
    'Geodesic',
    'Interval',
    'MobiusMap',
    'apply',
    'axis',
    'classify',
    'cross',
    'cross_ratio',
    'liouville_box',
    'orient',
    'translation_length',
    'ConjClass',
    'SurfacePresentation',
    'ball',
    'builtin',
    'canonical_conj',
    'class_of',
    'coset_reps',
    'evaluate',
    'reduce',
    'torus_curve',
    'CountingSettings',
    'DiscreteCurrent',
    'IntersectionResult',
    'SSCertificate',
    'SSVerdict',
    'SystoleScan',
    'class_intersection',
    'enumerate_classes',
    'intersection_number',
    'is_simple',
    'liouville_length',
    'pairing',
    'parse_class',
    'self_intersection',
    'somewhat_short',
    'systole_scan',
    'DecompositionReport',
    'Piece',
    'PieceLabel',
    'decompose',
    'is_basic',
    'special_curves',
    'support_graph',
    'zero_detector',
    'zero_intersection_graph',
    'find_self_crossing',
    'resolve',
    'simplify_to_simple',
    'surgery_report',
    'PeripheralTag',
    'classify_single_selfint',
    'lemma_a_check',
    'peripheral_class',
    'positivity_harness',
    'ChamberVector',
    'GroupType',
    'LengthTable',
    'MatrixRep',
    'chamber_vector',
    'diagonal_rep',
    'length_L',
    'length_table',
    'sym_power_rep',
    'trichotomy_classify',
]

__version__ = "1.0.0"
