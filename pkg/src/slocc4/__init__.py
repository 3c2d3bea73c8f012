"""SLOCC classification of three- and four-qubit pure states.

>>> from slocc4 import StateVector, classify4
>>> classify4(StateVector.from_basis(["0000", "1111"])).family.display
'GHZ (W_{000,000})'
"""

from .errors import (
    BadParams,
    DegenerateParams,
    NotGenuine,
    SloccError,
    StateFileError,
    UnresolvedPencil,
    ZeroState,
)
from .orbits import LocalOperation, apply, canonical_state, haar_random_state, random_local_op
from .qtypes import (
    ALL_CLASSES,
    DEFAULT_TOL,
    DEGENERATE_CLASSES,
    GENUINE_CLASSES,
    Family,
    QuadClassLabel,
    StateVector,
    StructuralClass,
    Tolerances,
    TripartiteClass,
    normalize,
    parse_label,
    permute_qubits,
    state_from_json,
    state_to_json,
)
from .quad_classify import Confidence, QuadReport, classify4, enumerate_classes, extract_canonical
from .tri_classify import classify3

__version__ = "0.1.0"

__all__ = [
    "ALL_CLASSES",
    "BadParams",
    "Confidence",
    "DEFAULT_TOL",
    "DEGENERATE_CLASSES",
    "DegenerateParams",
    "Family",
    "GENUINE_CLASSES",
    "LocalOperation",
    "NotGenuine",
    "QuadClassLabel",
    "QuadReport",
    "SloccError",
    "StateFileError",
    "StateVector",
    "StructuralClass",
    "Tolerances",
    "TripartiteClass",
    "UnresolvedPencil",
    "ZeroState",
    "apply",
    "canonical_state",
    "classify3",
    "classify4",
    "enumerate_classes",
    "extract_canonical",
    "haar_random_state",
    "normalize",
    "parse_label",
    "permute_qubits",
    "random_local_op",
    "state_from_json",
    "state_to_json",
]
