"""Canonical states, random SLOCC group elements and random states.

Canonical states of genuine classes are written for the first decoration
(``k = 1``, or the pair ``(1, 2)``) and carried to the other decorations by
relabeling qubits 2, 3, 4:

* swapping qubits 2 and 3 exchanges ``k = 1`` and ``k = 2``;
* swapping qubits 2 and 4 exchanges ``k = 1`` and ``k = 3``;
* for ``W[0_iPsi,0_jPsi]`` the pair ``(1, 3)`` comes from swapping qubits 3
  and 4 and ``(2, 3)`` from swapping qubits 2 and 4.

Free vectors and parameters are drawn from a seeded generator.  A sampled
state that lands in a more special class is discarded and redrawn; the
classifier is the judge of what "more special" means.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping, Optional, Sequence, Union

import numpy as np

from .errors import BadParams, UnresolvedPencil
from .qtypes import (
    Family,
    StateVector,
    StructuralClass,
    normalize,
    parse_label,
    permute_qubits,
)

__all__ = [
    "LocalOperation",
    "canonical_state",
    "random_local_op",
    "apply",
    "haar_random_state",
    "VARIANTS",
    "expected_subcase",
]

_E = (np.array([1.0 + 0j, 0.0]), np.array([0.0 + 0j, 1.0]))

# printed canonical variants per family
VARIANTS: dict[Family, int] = {f: 1 for f in Family}
VARIANTS.update({Family.W000_0kPsi: 2, Family.W000_GHZ: 4, Family.W0kPsi_0kPsi: 2, Family.W0iPsi_0jPsi: 2})

_SUBCASES = {Family.W000_0kPsi: ("i", "ii"), Family.W0kPsi_0kPsi: ("iii", "iv")}

_DEGENERATE_KETS: dict[StructuralClass, tuple[str, ...]] = {}


def _register_degenerate() -> None:
    D = StructuralClass
    table = {
        D(Family.D0000): ("0000",),
        D(Family.D00Psi, (1, 2)): ("0000", "0011"),
        D(Family.D00Psi, (1, 3)): ("0000", "0101"),
        D(Family.D00Psi, (1, 4)): ("0000", "0110"),
        D(Family.D0GHZ, (1,)): ("0000", "0111"),
        D(Family.D0W, (1,)): ("0001", "0010", "0100"),
        D(Family.D00Psi, (2, 3)): ("0000", "1001"),
        D(Family.D00Psi, (2, 4)): ("0000", "1010"),
        D(Family.D00Psi, (3, 4)): ("0000", "1100"),
        D(Family.D0GHZ, (2,)): ("0000", "1011"),
        D(Family.D0GHZ, (3,)): ("0000", "1101"),
        D(Family.D0GHZ, (4,)): ("0000", "1110"),
        D(Family.D0W, (2,)): ("0001", "0010", "1000"),
        D(Family.D0W, (3,)): ("0001", "0100", "1000"),
        D(Family.D0W, (4,)): ("0010", "0100", "1000"),
        D(Family.DPsiPsi, (1, 2)): ("0000", "0011", "1100", "1111"),
        D(Family.DPsiPsi, (1, 3)): ("0000", "0101", "1010", "1111"),
        D(Family.DPsiPsi, (1, 4)): ("0000", "0110", "1001", "1111"),
    }
    _DEGENERATE_KETS.update(table)


_register_degenerate()


def expected_subcase(label: StructuralClass, variant: int = 0) -> Optional[str]:
    """Sub-case reported by the classifier for a canonical variant, if any."""
    sub = _SUBCASES.get(label.kind)
    return sub[variant] if sub else None


# ----------------------------------------------------------------------------
# building blocks


def _kron(*vs) -> np.ndarray:
    out = np.array([1.0 + 0j])
    for v in vs:
        out = np.kron(out, np.asarray(v, dtype=np.complex128))
    return out


def _kets(*labels: str) -> np.ndarray:
    out = np.zeros(16, dtype=np.complex128)
    for lab in labels:
        out[int(lab, 2)] += 1
    return out


def _vec(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    return v / np.linalg.norm(v)


def _get_vec(params: Mapping[str, Any], key: str, rng) -> np.ndarray:
    if key in params:
        v = np.asarray(params[key], dtype=np.complex128).reshape(-1)
        if v.shape != (2,) or not np.all(np.isfinite(v)) or np.linalg.norm(v) == 0:
            raise BadParams(f"parameter {key!r} must be a nonzero 2-vector")
        return v
    return _vec(rng)


_GHZ3_TAIL = _kets("1000", "1111")


def _base_genuine(kind: Family, variant: int, params: Mapping[str, Any], rng) -> tuple[np.ndarray, dict]:
    """Canonical state for the first decoration, plus the parameters actually used."""
    e0, e1 = _E
    if kind is Family.W000_000:
        return _kets("0000", "1111"), {}
    if kind is Family.W000_W:
        return _kets("0001", "0010", "0100", "1000"), {}
    if kind is Family.W000_0kPsi:
        return (_kets("0000", "1100", "1111") if variant == 0 else _kets("0000", "1101", "1110")), {}
    if kind is Family.W000_GHZ:
        if variant == 0:
            phi, varphi, psi = (_get_vec(params, k, rng) for k in ("phi", "varphi", "psi"))
            return _kron(e0, phi, varphi, psi) + _GHZ3_TAIL, {"phi": phi, "varphi": varphi, "psi": psi}
        key = ("psi", "varphi", "phi")[variant - 1]
        v = _get_vec(params, key, rng)
        factors = [[e0, e1, v], [e0, v, e1], [v, e0, e1]][variant - 1]
        return _kron(e0, *factors) + _GHZ3_TAIL, {key: v}
    if kind is Family.W0kPsi_0kPsi:
        if "lambda" in params:
            lam = tuple(complex(x) for x in params["lambda"])
            if len(lam) != 2 or not all(np.isfinite(lam)):
                raise BadParams("lambda must be two finite complex numbers")
        else:
            z = rng.normal(size=2) + 1j * rng.normal(size=2)
            lam = (complex(z[0]), complex(z[1]))
        l1, l2 = lam
        if variant == 0:
            amps = _kets("0000", "1100") + l1 * _kets("0011") + l2 * _kets("1111")
        else:
            amps = _kets("0000", "1100") + l1 * _kets("0001", "0010") + l2 * _kets("1101", "1110")
        return amps, {"lambda": lam}
    if kind is Family.W0iPsi_0jPsi:
        phi, psi = _get_vec(params, "phi", rng), _get_vec(params, "psi", rng)
        if variant == 0:
            amps = _kron(e0, phi, e0, e0) + _kron(e0, phi, e1, psi) + _kets("1000", "1101")
        else:
            amps = _kron(e0, phi, e0, psi) + _kron(e0, phi, e1, e0) + _kets("1000", "1101")
        return amps, {"phi": phi, "psi": psi}
    if kind is Family.W0kPsi_GHZ:
        phi = _get_vec(params, "phi", rng)
        if "Psi" in params:
            Psi = np.asarray(params["Psi"], dtype=np.complex128).reshape(2, 2)
        else:
            Psi = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        return _kron(e0, phi, Psi.reshape(-1)) + _GHZ3_TAIL, {"phi": phi, "Psi": Psi}
    if kind is Family.WGHZ_W:
        keys = ("phi", "varphi", "psi", "phibar", "varphibar", "psibar")
        v = {k: _get_vec(params, k, rng) for k in keys}
        amps = (
            _kets("0001", "0010", "0100")
            + _kron(e1, v["phi"], v["varphi"], v["psi"])
            + _kron(e1, v["phibar"], v["varphibar"], v["psibar"])
        )
        return amps, v
    raise ValueError(f"{kind} is not a genuine family")


# permutation carrying the first decoration to the requested one
_PERM_K = {1: (1, 2, 3, 4), 2: (1, 3, 2, 4), 3: (1, 4, 3, 2)}
_PERM_PAIR = {(1, 2): (1, 2, 3, 4), (1, 3): (1, 2, 4, 3), (2, 3): (1, 4, 3, 2)}


def _genuine_state(label: StructuralClass, variant: int, params, rng) -> tuple[StateVector, dict]:
    amps, used = _base_genuine(label.kind, variant, params, rng)
    if not np.any(amps):
        raise BadParams("parameters give the zero state")
    s = normalize(StateVector(amps, 4))
    if label.kind is Family.W0iPsi_0jPsi:
        perm = _PERM_PAIR[label.deco]
    elif label.deco:
        perm = _PERM_K[label.deco[0]]
    else:
        perm = (1, 2, 3, 4)
    return permute_qubits(s, perm), used


def _matches(s: StateVector, label: StructuralClass, variant: int) -> bool:
    from .quad_classify import Confidence, classify4

    try:
        rep = classify4(s)
    except UnresolvedPencil:
        return False
    return (
        rep.label.structural == label
        and rep.label.subcase == expected_subcase(label, variant)
        and rep.confidence is Confidence.FIRM
    )


def canonical_state(
    label: Union[StructuralClass, str],
    params: Optional[Mapping[str, Any]] = None,
    seed: int = 0,
    variant: int = 0,
    max_tries: int = 200,
) -> StateVector:
    """Normalized canonical state of a structural class.

    Parameters
    ----------
    label : StructuralClass or str
    params : mapping, optional
        Free data of the canonical form (``lambda`` for Phi4; ``phi``,
        ``varphi``, ``psi``, ``Psi``... for the others).  Missing entries are
        sampled from ``seed``.
    seed : int
    variant : int
        Index of the printed canonical form when a family lists several
        (see ``VARIANTS``).

    Raises
    ------
    BadParams
        If explicit parameters produce a state outside the requested class.
    """
    if isinstance(label, str):
        label = parse_label(label)
    if not 0 <= variant < VARIANTS[label.kind]:
        raise BadParams(f"{label.name} has {VARIANTS[label.kind]} canonical variant(s), got {variant}")
    if not label.genuine:
        return normalize(StateVector(_kets(*_DEGENERATE_KETS[label]), 4))
    params = dict(params or {})
    rng = np.random.default_rng(seed)
    fixed_only = label.kind in (Family.W000_000, Family.W000_W, Family.W000_0kPsi)
    for _ in range(1 if fixed_only else max_tries):
        s, _used = _genuine_state(label, variant, params, rng)
        if fixed_only or _matches(s, label, variant):
            return s
        if params and _all_given(label.kind, variant, params):
            raise BadParams(f"parameters do not produce a state of class {label.name}")
    raise BadParams(f"no valid parameters for {label.name} found in {max_tries} draws")


_PARAM_KEYS = {
    Family.W000_GHZ: {0: ("phi", "varphi", "psi"), 1: ("psi",), 2: ("varphi",), 3: ("phi",)},
    Family.W0kPsi_0kPsi: {0: ("lambda",), 1: ("lambda",)},
    Family.W0iPsi_0jPsi: {0: ("phi", "psi"), 1: ("phi", "psi")},
    Family.W0kPsi_GHZ: {0: ("phi", "Psi")},
    Family.WGHZ_W: {0: ("phi", "varphi", "psi", "phibar", "varphibar", "psibar")},
}


def _all_given(kind: Family, variant: int, params: Mapping[str, Any]) -> bool:
    return all(k in params for k in _PARAM_KEYS[kind][variant])


# ----------------------------------------------------------------------------
# local operations


@dataclass(frozen=True, eq=False)
class LocalOperation:
    """A product ``F^[1] (x) ... (x) F^[n]`` of invertible 2x2 matrices."""

    factors: tuple[np.ndarray, ...]

    def __post_init__(self):
        fs = tuple(np.array(f, dtype=np.complex128).reshape(2, 2) for f in self.factors)
        for f in fs:
            if abs(np.linalg.det(f)) == 0:
                raise ValueError("local factors must be invertible")
            f.setflags(write=False)
        object.__setattr__(self, "factors", fs)

    @property
    def n(self) -> int:
        return len(self.factors)

    @property
    def cond(self) -> float:
        return float(max(np.linalg.cond(f) for f in self.factors))

    def inverse(self) -> "LocalOperation":
        return LocalOperation(tuple(np.linalg.inv(f) for f in self.factors))

    @classmethod
    def identity(cls, n: int) -> "LocalOperation":
        return cls(tuple(np.eye(2) for _ in range(n)))


def _haar_unitary(rng: np.random.Generator) -> np.ndarray:
    z = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_local_op(n: int, cond_max: float = 1e2, seed: int = 0, max_tries: int = 1000) -> LocalOperation:
    """Random invertible local operation with every factor's condition number at most ``cond_max``.

    Factors are complex Gaussian matrices redrawn until they meet the bound.
    For ``cond_max == 1`` they are scalar multiples of Haar unitaries; if
    ``max_tries`` draws fail (``cond_max`` barely above 1) a factor
    ``U diag(1, c) V`` with ``1/cond_max <= c <= 1`` is used instead.
    """
    if not cond_max >= 1:
        raise ValueError("cond_max must be at least 1")
    rng = np.random.default_rng(seed)
    factors = []
    for _ in range(n):
        if cond_max == 1:
            scale = rng.normal() + 1j * rng.normal()
            factors.append(scale * _haar_unitary(rng))
            continue
        for _ in range(max_tries):
            f = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            if np.linalg.cond(f) <= cond_max:
                break
        else:
            c = rng.uniform(1 / cond_max, 1)
            f = _haar_unitary(rng) @ np.diag([1.0, c]) @ _haar_unitary(rng)
        factors.append(f)
    return LocalOperation(tuple(factors))


def apply(op: LocalOperation, s: StateVector) -> StateVector:
    """``(F^[1] (x) ... (x) F^[n]) s``, normalized."""
    if op.n != s.n_qubits:
        raise ValueError(f"operation acts on {op.n} qubits, state has {s.n_qubits}")
    t = s.tensor
    for k, f in enumerate(op.factors):
        t = np.moveaxis(np.tensordot(f, t, axes=([1], [k])), 0, k)
    return normalize(StateVector(t.reshape(-1), s.n_qubits))


def haar_random_state(n: int, seed: int = 0) -> StateVector:
    """Unit state with i.i.d. complex Gaussian amplitudes (Haar distributed)."""
    if n not in (3, 4):
        raise ValueError("n must be 3 or 4")
    rng = np.random.default_rng(seed)
    z = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return normalize(StateVector(z, n))
