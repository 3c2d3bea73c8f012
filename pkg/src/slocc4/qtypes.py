"""Domain types shared by the whole package.

Basis convention: the computational basis label ``|q1 q2 ... qn>`` of an
n-qubit state sits at index ``sum(q_k * 2**(n - k))``, so qubit 1 is the most
significant bit.  Equivalently ``amps.reshape((2,) * n)`` puts qubit ``k`` on
axis ``k - 1``.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .errors import BadPartition, BadPermutation, StateFileError, ZeroState

__all__ = [
    "Tolerances",
    "StateVector",
    "CoefficientMatrix",
    "TripartiteClass",
    "Family",
    "StructuralClass",
    "QuadClassLabel",
    "normalize",
    "reshape",
    "inverse_reshape",
    "permute_qubits",
    "compose_permutations",
    "state_from_json",
    "state_to_json",
    "DEGENERATE_CLASSES",
    "GENUINE_CLASSES",
    "ALL_CLASSES",
    "parse_label",
]


@dataclass(frozen=True)
class Tolerances:
    """Thresholds for every numerical decision.

    Attributes
    ----------
    rank_rel : float
        Relative singular-value (or determinant) floor below which a matrix
        counts as rank deficient.
    disc_rel : float
        Relative floor for the 2x2 pencil discriminant (GHZ vs W).
    root_cluster : float
        Chordal distance under which projective roots are merged; also the
        residual floor used when testing candidate common roots.
    cond_max : float
        Condition-number bound for sampled local operations.
    """

    rank_rel: float = 1e-9
    disc_rel: float = 1e-8
    root_cluster: float = 1e-7
    cond_max: float = 1e2

    def __post_init__(self):
        for name in ("rank_rel", "disc_rel", "root_cluster", "cond_max"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be finite and > 0, got {value!r}")
        if self.rank_rel >= 1:
            raise ValueError("rank_rel must be < 1")


DEFAULT_TOL = Tolerances()


def _as_amplitudes(amps: Any, n_qubits: int | None = None) -> np.ndarray:
    arr = np.array(amps, dtype=np.complex128).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise ValueError("amplitudes must be finite")
    if n_qubits is None:
        n_qubits = int(round(math.log2(arr.size))) if arr.size else 0
    if arr.size != 2**n_qubits:
        raise ValueError(f"expected {2**n_qubits} amplitudes for {n_qubits} qubits, got {arr.size}")
    return arr


@dataclass(frozen=True, eq=False)
class StateVector:
    """Immutable pure state of ``n_qubits`` qubits (not necessarily normalized)."""

    amps: np.ndarray
    n_qubits: int = field(default=0)

    def __init__(self, amps: Any, n_qubits: int | None = None):
        arr = _as_amplitudes(amps, n_qubits)
        n = int(round(math.log2(arr.size)))
        if n not in (3, 4):
            raise ValueError(f"only 3 or 4 qubits are supported, got {n}")
        arr.setflags(write=False)
        object.__setattr__(self, "amps", arr)
        object.__setattr__(self, "n_qubits", n)

    @classmethod
    def from_basis(cls, terms: Mapping[str, complex] | Iterable[str], n_qubits: int | None = None) -> "StateVector":
        """Build a state from basis labels, e.g. ``{"0000": 1, "1111": 1}``.

        A plain iterable of labels gives every label coefficient 1.  The
        result is *not* normalized.
        """
        if not isinstance(terms, Mapping):
            terms = {t: 1.0 for t in terms}
        labels = list(terms)
        n = n_qubits or len(labels[0])
        arr = np.zeros(2**n, dtype=np.complex128)
        for label, coeff in terms.items():
            if len(label) != n or set(label) - {"0", "1"}:
                raise ValueError(f"bad basis label {label!r}")
            arr[int(label, 2)] += coeff
        return cls(arr, n)

    @property
    def tensor(self) -> np.ndarray:
        return self.amps.reshape((2,) * self.n_qubits)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def __len__(self) -> int:
        return self.amps.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, StateVector):
            return NotImplemented
        return self.n_qubits == other.n_qubits and np.array_equal(self.amps, other.amps)

    def __hash__(self) -> int:
        return hash((self.n_qubits, self.amps.tobytes()))

    def __repr__(self) -> str:
        nz = [
            f"({a.real:.4g}{a.imag:+.4g}j)|{i:0{self.n_qubits}b}>"
            for i, a in enumerate(self.amps)
            if abs(a) > 1e-12
        ]
        return f"StateVector({' + '.join(nz) or '0'})"


def normalize(s: StateVector) -> StateVector:
    """Return ``s`` scaled to unit Euclidean norm."""
    nrm = np.linalg.norm(s.amps)
    if nrm <= np.finfo(float).tiny:
        raise ZeroState("cannot normalize the zero state")
    return StateVector(s.amps / nrm, s.n_qubits)


@dataclass(frozen=True, eq=False)
class CoefficientMatrix:
    """The 2 x 2**(n-1) reshape of a state separating one qubit from the rest.

    Row ``r`` holds the amplitudes whose ``partition_qubit`` bit equals ``r``;
    the column index spells the remaining qubits in ascending order.
    """

    entries: np.ndarray
    partition_qubit: int
    n_qubits: int

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape


def _check_partition(n: int, partition_qubit: int) -> None:
    if not (isinstance(partition_qubit, (int, np.integer)) and 1 <= partition_qubit <= n):
        raise BadPartition(f"partition qubit must be in 1..{n}, got {partition_qubit!r}")


def reshape(s: StateVector, partition_qubit: int) -> CoefficientMatrix:
    _check_partition(s.n_qubits, partition_qubit)
    n = s.n_qubits
    mat = np.moveaxis(s.tensor, partition_qubit - 1, 0).reshape(2, 2 ** (n - 1))
    mat = mat.copy()
    mat.setflags(write=False)
    return CoefficientMatrix(mat, int(partition_qubit), n)


def inverse_reshape(c: CoefficientMatrix) -> StateVector:
    n = c.n_qubits
    t = np.asarray(c.entries).reshape((2,) * n)
    return StateVector(np.moveaxis(t, 0, c.partition_qubit - 1).reshape(-1), n)


def _check_perm(perm: Sequence[int], n: int) -> tuple[int, ...]:
    p = tuple(int(x) for x in perm)
    if sorted(p) != list(range(1, n + 1)):
        raise BadPermutation(f"{perm!r} is not a permutation of 1..{n}")
    return p


def permute_qubits(s: StateVector, perm: Sequence[int]) -> StateVector:
    """Relabel qubits: qubit ``i`` of ``s`` becomes qubit ``perm[i-1]``.

    With this convention ``permute_qubits(permute_qubits(s, p1), p2)`` equals
    ``permute_qubits(s, compose_permutations(p2, p1))``.
    """
    p = _check_perm(perm, s.n_qubits)
    # output axis p[i]-1 takes input axis i
    src_for_out = [0] * s.n_qubits
    for i, target in enumerate(p):
        src_for_out[target - 1] = i
    return StateVector(np.transpose(s.tensor, src_for_out).reshape(-1), s.n_qubits)


def compose_permutations(p2: Sequence[int], p1: Sequence[int]) -> tuple[int, ...]:
    """``p2 o p1``: apply ``p1`` first."""
    return tuple(p2[p1[i] - 1] for i in range(len(p1)))


# ----------------------------------------------------------------------------
# JSON state files


def state_from_json(data: str | Mapping[str, Any]) -> StateVector:
    """Parse ``{"n_qubits": 3|4, "amplitudes": [[re, im], ...]}``."""
    if isinstance(data, (str, bytes)):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise StateFileError(f"invalid JSON: {exc}") from None
    if not isinstance(data, Mapping):
        raise StateFileError("state file must hold a JSON object")
    n = data.get("n_qubits")
    if n not in (3, 4) or isinstance(n, bool):
        raise StateFileError(f"n_qubits must be 3 or 4, got {n!r}")
    raw = data.get("amplitudes")
    if not isinstance(raw, list):
        raise StateFileError("amplitudes must be a list of [re, im] pairs")
    expected = 2**n
    if len(raw) != expected:
        raise StateFileError(f"expected {expected} amplitudes for n_qubits={n}, got {len(raw)}")
    amps = []
    for k, pair in enumerate(raw):
        if (
            not isinstance(pair, (list, tuple))
            or len(pair) != 2
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in pair)
        ):
            raise StateFileError(f"amplitude {k} must be a [re, im] pair of numbers")
        if not all(math.isfinite(x) for x in pair):
            raise StateFileError(f"amplitude {k} is not finite")
        amps.append(complex(pair[0], pair[1]))
    return StateVector(amps, n)


def state_to_json(s: StateVector) -> dict[str, Any]:
    return {
        "n_qubits": s.n_qubits,
        "amplitudes": [[float(a.real), float(a.imag)] for a in s.amps],
    }


# ----------------------------------------------------------------------------
# Class labels


class TripartiteClass(enum.Enum):
    """The six SLOCC classes of three qubits."""

    P000 = "000"
    Zero1Psi23 = "0_1Psi_23"
    Zero2Psi13 = "0_2Psi_13"
    Zero3Psi12 = "0_3Psi_12"
    GHZ = "GHZ"
    W = "W"

    @property
    def level(self) -> int:
        """Position on the degeneracy scale 000 < 0_kPsi < {GHZ, W}."""
        if self is TripartiteClass.P000:
            return 0
        if self.factored_qubit is not None:
            return 1
        return 2

    @property
    def factored_qubit(self) -> int | None:
        """For the 0_kPsi classes, the qubit ``k`` that factors out."""
        return _ZERO_K.get(self)

    @classmethod
    def zero_psi(cls, k: int) -> "TripartiteClass":
        return _K_ZERO[k]

    def permuted(self, perm: Sequence[int]) -> "TripartiteClass":
        k = self.factored_qubit
        if k is None:
            return self
        return TripartiteClass.zero_psi(_check_perm(perm, 3)[k - 1])


_ZERO_K = {
    TripartiteClass.Zero1Psi23: 1,
    TripartiteClass.Zero2Psi13: 2,
    TripartiteClass.Zero3Psi12: 3,
}
_K_ZERO = {k: c for c, k in _ZERO_K.items()}


class Family(enum.Enum):
    """Permutation-orbit families: 8 genuine plus 5 degenerate."""

    W000_000 = "W000_000"
    W000_0kPsi = "W000_0kPsi"
    W000_GHZ = "W000_GHZ"
    W000_W = "W000_W"
    W0kPsi_0kPsi = "W0kPsi_0kPsi"
    W0iPsi_0jPsi = "W0iPsi_0jPsi"
    W0kPsi_GHZ = "W0kPsi_GHZ"
    WGHZ_W = "WGHZ_W"
    D0000 = "0000"
    D00Psi = "00Psi"
    D0GHZ = "0GHZ"
    D0W = "0W"
    DPsiPsi = "PsiPsi"

    @property
    def genuine(self) -> bool:
        return not self.name.startswith("D")

    @property
    def display(self) -> str:
        return _FAMILY_DISPLAY[self]


_FAMILY_DISPLAY = {
    Family.W000_000: "GHZ (W_{000,000})",
    Family.W000_0kPsi: "W_{000,0kPsi}",
    Family.W000_GHZ: "W_{000,GHZ}",
    Family.W000_W: "W (W_{000,W})",
    Family.W0kPsi_0kPsi: "Phi4 (W_{0kPsi,0kPsi})",
    Family.W0iPsi_0jPsi: "W_{0iPsi,0jPsi}",
    Family.W0kPsi_GHZ: "W_{0kPsi,GHZ}",
    Family.WGHZ_W: "W_{GHZ,W}",
    Family.D0000: "degenerate 0000",
    Family.D00Psi: "degenerate 00Psi",
    Family.D0GHZ: "degenerate 0GHZ",
    Family.D0W: "degenerate 0W",
    Family.DPsiPsi: "degenerate PsiPsi",
}

# number of decorations each structural kind carries
_DECO_LEN = {
    Family.D0000: 0,
    Family.D00Psi: 2,
    Family.D0GHZ: 1,
    Family.D0W: 1,
    Family.DPsiPsi: 2,
    Family.W000_000: 0,
    Family.W000_0kPsi: 1,
    Family.W000_GHZ: 0,
    Family.W000_W: 0,
    Family.W0kPsi_0kPsi: 1,
    Family.W0iPsi_0jPsi: 2,
    Family.W0kPsi_GHZ: 1,
    Family.WGHZ_W: 0,
}

_GENUINE_TEMPLATE = {
    Family.W000_000: "W[000,000]",
    Family.W000_0kPsi: "W[000,0_{0}Psi]",
    Family.W000_GHZ: "W[000,GHZ]",
    Family.W000_W: "W[000,W]",
    Family.W0kPsi_0kPsi: "W[0_{0}Psi,0_{0}Psi]",
    Family.W0iPsi_0jPsi: "W[0_{0}Psi,0_{1}Psi]",
    Family.W0kPsi_GHZ: "W[0_{0}Psi,GHZ]",
    Family.WGHZ_W: "W[GHZ,W]",
}


@dataclass(frozen=True)
class StructuralClass:
    """One of the 34 structural classes, stored as a kind plus decorations.

    Decorations are qubit indices (1..4) for degenerate kinds:

    * ``D00Psi``: the two factored qubits, sorted;
    * ``D0GHZ`` / ``D0W``: the factored qubit;
    * ``DPsiPsi``: the pair containing qubit 1, i.e. ``(1, j)``.

    For genuine kinds they are partition indices (1..3) of the three-qubit
    subsystem formed by qubits 2, 3, 4, naming the ``0_k Psi`` special points
    of the right singular subspace.
    """

    kind: Family
    deco: tuple[int, ...] = ()

    def __post_init__(self):
        deco = tuple(int(d) for d in self.deco)
        if len(deco) != _DECO_LEN[self.kind]:
            raise ValueError(f"{self.kind.value} takes {_DECO_LEN[self.kind]} decorations, got {deco}")
        top = 4 if not self.kind.genuine else 3
        if any(not 1 <= d <= top for d in deco):
            raise ValueError(f"decorations out of range: {deco}")
        if self.kind in (Family.D00Psi, Family.W0iPsi_0jPsi):
            if deco[0] == deco[1]:
                raise ValueError("decorations must be distinct")
            deco = tuple(sorted(deco))
        if self.kind is Family.DPsiPsi and (deco[0] != 1 or deco[1] == 1):
            raise ValueError("PsiPsi decoration must be (1, j) with j != 1")
        object.__setattr__(self, "deco", deco)

    @property
    def family(self) -> Family:
        return self.kind

    @property
    def genuine(self) -> bool:
        return self.kind.genuine

    @property
    def name(self) -> str:
        k, d = self.kind, self.deco
        if k is Family.D0000:
            return "0000"
        if k is Family.D00Psi:
            rest = [q for q in range(1, 5) if q not in d]
            return f"0{d[0]}0{d[1]}Psi{rest[0]}{rest[1]}"
        if k is Family.D0GHZ:
            return f"0{d[0]}GHZ"
        if k is Family.D0W:
            return f"0{d[0]}W"
        if k is Family.DPsiPsi:
            rest = [q for q in range(1, 5) if q not in d]
            return f"Psi{d[0]}{d[1]}Psi{rest[0]}{rest[1]}"
        return _GENUINE_TEMPLATE[k].format(*d)

    def __str__(self) -> str:
        return self.name

    def permuted(self, perm: Sequence[int]) -> "StructuralClass":
        """Image of the label under a relabeling of the four qubits.

        Degenerate labels transform for every permutation.  Genuine labels
        only carry a well-defined image under permutations fixing qubit 1,
        since qubit 1 is the pencil axis; other permutations raise
        ``ValueError`` (the family is still preserved, see ``family``).
        """
        p = _check_perm(perm, 4)
        k, d = self.kind, self.deco
        if not k.genuine:
            if k is Family.DPsiPsi:
                a, b = p[d[0] - 1], p[d[1] - 1]
                pair = (a, b) if 1 in (a, b) else tuple(q for q in range(1, 5) if q not in (a, b))
                return StructuralClass(k, (1, max(pair)))
            return StructuralClass(k, tuple(p[q - 1] for q in d))
        if p[0] != 1:
            raise ValueError("genuine structural labels only transform under permutations fixing qubit 1")
        return StructuralClass(k, tuple(p[q] - 1 for q in d))


@dataclass(frozen=True)
class QuadClassLabel:
    """Classification result: structural class, its family, optional data."""

    structural: StructuralClass
    subcase: str | None = None
    params: Mapping[str, Any] | None = field(default=None, compare=False)

    @property
    def family(self) -> Family:
        return self.structural.family

    @property
    def genuine(self) -> bool:
        return self.structural.genuine


def _degenerate_catalog() -> list[StructuralClass]:
    # degenerate classes: qubit 1 factored first, then qubits 2..4, then the Psi pairs
    out = [StructuralClass(Family.D0000)]
    out += [StructuralClass(Family.D00Psi, (1, j)) for j in (2, 3, 4)]
    out += [StructuralClass(Family.D0GHZ, (1,)), StructuralClass(Family.D0W, (1,))]
    out += [StructuralClass(Family.D00Psi, d) for d in ((2, 3), (2, 4), (3, 4))]
    out += [StructuralClass(Family.D0GHZ, (q,)) for q in (2, 3, 4)]
    out += [StructuralClass(Family.D0W, (q,)) for q in (2, 3, 4)]
    out += [StructuralClass(Family.DPsiPsi, (1, j)) for j in (2, 3, 4)]
    return out


def _genuine_catalog() -> list[StructuralClass]:
    out = [StructuralClass(Family.W000_000)]
    out += [StructuralClass(Family.W000_0kPsi, (k,)) for k in (1, 2, 3)]
    out += [StructuralClass(Family.W000_GHZ), StructuralClass(Family.W000_W)]
    out += [StructuralClass(Family.W0kPsi_0kPsi, (k,)) for k in (1, 2, 3)]
    out += [StructuralClass(Family.W0iPsi_0jPsi, d) for d in combinations((1, 2, 3), 2)]
    out += [StructuralClass(Family.W0kPsi_GHZ, (k,)) for k in (1, 2, 3)]
    out += [StructuralClass(Family.WGHZ_W)]
    return out


DEGENERATE_CLASSES: tuple[StructuralClass, ...] = tuple(_degenerate_catalog())
GENUINE_CLASSES: tuple[StructuralClass, ...] = tuple(_genuine_catalog())
ALL_CLASSES: tuple[StructuralClass, ...] = DEGENERATE_CLASSES + GENUINE_CLASSES

_ALIASES = {
    "GHZ": StructuralClass(Family.W000_000),
    "W": StructuralClass(Family.W000_W),
    "PHI4": StructuralClass(Family.W0kPsi_0kPsi, (1,)),
}
_BY_NAME = {c.name.upper(): c for c in ALL_CLASSES}


def parse_label(name: str) -> StructuralClass:
    """Look up a structural class by name (``"01GHZ"``, ``"W[GHZ,W]"``, ``"GHZ"``...)."""
    key = name.strip().upper().replace(" ", "")
    if key in _ALIASES:
        return _ALIASES[key]
    try:
        return _BY_NAME[key]
    except KeyError:
        raise KeyError(f"unknown class label {name!r}") from None
