"""Four-qubit SLOCC classification.

Degenerate classes (some qubit or pair of qubits factors out) are recognized
from bipartition ranks alone.  Every other state is genuinely entangled and
its class is read off the pencil spanned by the qubit-1 coefficient matrix:

=============  ===========  ================  ==================
product pts    0_k Psi pts  generic member    family
=============  ===========  ================  ==================
2              0                              W[000,000]  (GHZ)
1              1                              W[000,0_kPsi]
1              0            GHZ               W[000,GHZ]
1              0            W                 W[000,W]    (W)
0              2 (same k)                     W[0_kPsi,0_kPsi] (Phi4)
0              2 (i != j)                     W[0_iPsi,0_jPsi]
0              1                              W[0_kPsi,GHZ]
0              0            GHZ               W[GHZ,W]
=============  ===========  ================  ==================

Any other combination cannot occur for exact input and raises
:class:`~slocc4.errors.UnresolvedPencil`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import partial
from typing import Any, Callable, Mapping, Optional, Union

import numpy as np

from .errors import DegenerateParams, NotGenuine, UnresolvedPencil
from .qtypes import (
    ALL_CLASSES,
    DEFAULT_TOL,
    Family,
    QuadClassLabel,
    StateVector,
    StructuralClass,
    Tolerances,
    TripartiteClass,
    normalize,
)
from .pencil import OneDim, Pencil, PencilStructure, analyze, build_pencil
from .smallalg import HomogeneousPoly, quad_roots, singular_values_2xN
from .tri_classify import BAND, _rank_one_factors, classify_tensor, factor_product, factor_zero_psi, ghz_decomposition

__all__ = [
    "Confidence",
    "BipartitionRanks",
    "QuadReport",
    "NotDegenerate",
    "CanonicalData",
    "CatalogEntry",
    "bipartition_ranks",
    "prefilter_degenerate",
    "classify4",
    "extract_canonical",
    "family_of",
    "enumerate_classes",
]


class Confidence(enum.Enum):
    FIRM = "firm"
    BOUNDARY = "boundary"


@dataclass(frozen=True)
class BipartitionRanks:
    """Ranks of the four ``k|rest`` matrices and of the ``12|34``, ``13|24``, ``14|23`` reshapes."""

    single: tuple[int, int, int, int]
    pairs: tuple[int, int, int]
    boundary: bool = field(default=False, compare=False)

    def as_dict(self) -> dict[str, int]:
        out = {f"{k}|rest": r for k, r in zip(range(1, 5), self.single)}
        out.update({p: r for p, r in zip(("12|34", "13|24", "14|23"), self.pairs)})
        return out


@dataclass(frozen=True, eq=False)
class QuadReport:
    """Result of :func:`classify4`.

    ``witnesses`` holds the 3-qubit pencil members at the special points
    (products first, then ``0_k Psi`` points), empty for degenerate classes.
    """

    label: QuadClassLabel
    bipartition_ranks: BipartitionRanks
    pencil_structure: Optional[PencilStructure] = None
    witnesses: tuple[StateVector, ...] = ()
    confidence: Confidence = Confidence.FIRM
    pencil: Optional[Pencil] = None

    @property
    def family(self) -> Family:
        return self.label.family

    @property
    def structural(self) -> StructuralClass:
        return self.label.structural


@dataclass(frozen=True)
class NotDegenerate:
    """Pre-filter outcome for genuinely entangled states."""

    bipartition_ranks: BipartitionRanks


@dataclass(frozen=True, eq=False)
class CanonicalData:
    """Continuous data of a genuine class, in the slots of its canonical state."""

    family: Family
    params: Mapping[str, Any]
    subcase: Optional[str] = None


# ----------------------------------------------------------------------------
# pre-filter

_PAIR_ORDER = ((0, 1, 2, 3), (0, 2, 1, 3), (0, 3, 1, 2))


def _near(value: float, threshold: float) -> bool:
    return bool(threshold / BAND < value <= threshold * BAND)


def bipartition_ranks(s: StateVector, tol: Tolerances = DEFAULT_TOL) -> BipartitionRanks:
    """Ranks of all single-qubit and pair bipartitions, relative to the largest singular value."""
    t = s.tensor
    mats = np.stack([np.moveaxis(t, k, 0).reshape(2, 8) for k in range(4)])
    s1, s2 = singular_values_2xN(mats)
    ratio = s2 / np.max(s1)
    single = tuple(int(2 if r > tol.rank_rel else 1) for r in ratio)
    boundary = any(_near(float(r), tol.rank_rel) for r in ratio)
    pairs = []
    for order in _PAIR_ORDER:
        sv = np.linalg.svd(t.transpose(order).reshape(4, 4), compute_uv=False)
        rel = sv / sv[0]
        pairs.append(int(1 + np.count_nonzero(rel[1:] > tol.rank_rel)))
        boundary = boundary or _near(float(rel[1]), tol.rank_rel)
    return BipartitionRanks(single, tuple(pairs), boundary)


def _degenerate_report(kind: Family, deco, ranks: BipartitionRanks, boundary: bool) -> QuadReport:
    conf = Confidence.BOUNDARY if boundary or ranks.boundary else Confidence.FIRM
    return QuadReport(QuadClassLabel(StructuralClass(kind, tuple(deco))), ranks, confidence=conf)


def prefilter_degenerate(s: StateVector, tol: Tolerances = DEFAULT_TOL) -> Union[QuadReport, NotDegenerate]:
    """Recognize the 18 degenerate classes from bipartition ranks.

    * all single-qubit ranks 1: ``0000``;
    * qubits ``i, j`` of rank 1: ``0_i 0_j Psi``;
    * one qubit ``q`` of rank 1: ``0_q GHZ`` or ``0_q W`` from the remaining three qubits;
    * no single rank 1 but a pair reshape ``1j|kl`` of rank 1: ``Psi_1j Psi_kl``.
    """
    s = normalize(s)
    ranks = bipartition_ranks(s, tol)
    ones = [q + 1 for q, r in enumerate(ranks.single) if r == 1]
    if len(ones) >= 3:
        return _degenerate_report(Family.D0000, (), ranks, len(ones) == 3)
    if len(ones) == 2:
        return _degenerate_report(Family.D00Psi, ones, ranks, False)
    if len(ones) == 1:
        q = ones[0]
        rest = [p for p in range(1, 5) if p != q]
        rep = classify_tensor(_rest_after(s, q), tol)
        if rep.cls is TripartiteClass.GHZ:
            return _degenerate_report(Family.D0GHZ, (q,), ranks, rep.boundary)
        if rep.cls is TripartiteClass.W:
            return _degenerate_report(Family.D0W, (q,), ranks, rep.boundary)
        # the remaining qubits factor further: only rounding can get here
        if rep.cls is TripartiteClass.P000:
            return _degenerate_report(Family.D0000, (), ranks, True)
        return _degenerate_report(Family.D00Psi, (q, rest[rep.cls.factored_qubit - 1]), ranks, True)
    pair_ones = [j + 2 for j, r in enumerate(ranks.pairs) if r == 1]
    if pair_ones:
        return _degenerate_report(Family.DPsiPsi, (1, pair_ones[0]), ranks, len(pair_ones) > 1)
    return NotDegenerate(ranks)


def _rest_after(s: StateVector, q: int) -> np.ndarray:
    """3-qubit tensor left after factoring out the unentangled qubit ``q``."""
    m = np.moveaxis(s.tensor, q - 1, 0).reshape(2, 8)
    i = int(np.argmax(np.linalg.norm(m, axis=1)))
    return m[i].reshape(2, 2, 2)


# ----------------------------------------------------------------------------
# genuine classes


def _map_structure(ps: PencilStructure) -> tuple[StructuralClass, Optional[str]]:
    n_prod = len(ps.product_points)
    ks = ps.zero_psi_partitions
    g = ps.generic_class
    ghz = g is TripartiteClass.GHZ
    if n_prod == 2 and not ks:
        return StructuralClass(Family.W000_000), None
    if n_prod == 1 and len(ks) == 1:
        return StructuralClass(Family.W000_0kPsi, ks), ("i" if ghz else "ii")
    if n_prod == 1 and not ks:
        return StructuralClass(Family.W000_GHZ if ghz else Family.W000_W), None
    if n_prod == 0 and len(ks) == 2:
        if ks[0] == ks[1]:
            return StructuralClass(Family.W0kPsi_0kPsi, ks[:1]), ("iii" if ghz else "iv")
        return StructuralClass(Family.W0iPsi_0jPsi, ks), None
    if n_prod == 0 and len(ks) == 1:
        return StructuralClass(Family.W0kPsi_GHZ, ks), None
    if n_prod == 0 and not ks and ghz:
        return StructuralClass(Family.WGHZ_W), None
    raise UnresolvedPencil(
        f"no class has {n_prod} product points, 0_k Psi points {ks} and generic {g.value if g else None}"
    )


def classify4(s: StateVector, tol: Tolerances = DEFAULT_TOL) -> QuadReport:
    """Classify a four-qubit state into one of the 34 structural classes.

    Raises
    ------
    ZeroState
        If all amplitudes vanish.
    UnresolvedPencil
        If the pencil analysis is inconsistent; this only happens when some
        decision sits at the edge of its tolerance.

    Examples
    --------
    >>> from slocc4.qtypes import StateVector
    >>> classify4(StateVector.from_basis(["0000", "1111"])).label.structural.name
    'W[000,000]'
    """
    s = normalize(s)
    pre = prefilter_degenerate(s, tol)
    if isinstance(pre, QuadReport):
        return pre
    ranks = pre.bipartition_ranks
    P = build_pencil(s, tol)
    if isinstance(P, OneDim):
        raise UnresolvedPencil("qubit 1 has rank 2 but its row space is one-dimensional")
    ps = analyze(P, tol)
    if ps.infinite_products:
        raise UnresolvedPencil("pencil has a rank-1 partition everywhere but the state passed the pre-filter")
    structural, subcase = _map_structure(ps)
    witnesses = tuple(P.state(p) for p in ps.special_points)
    conf = Confidence.BOUNDARY if ps.boundary or ranks.boundary else Confidence.FIRM
    return QuadReport(QuadClassLabel(structural, subcase), ranks, ps, witnesses, conf, P)


def family_of(structural: StructuralClass) -> Family:
    """Permutation-orbit family of a structural class (drops the qubit decorations)."""
    return structural.kind


# ----------------------------------------------------------------------------
# canonical data


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=np.complex128)
    return v / np.linalg.norm(v)


def _ghz_frame(P: Pencil, ps: PencilStructure, tol: Tolerances):
    """Local maps on qubits 2, 3, 4 sending a generic pencil member to ``|000> + |111>``."""
    g = P.vector(ps.samples[0]).reshape(2, 2, 2)
    (a1, b1, c1), (a2, b2, c2) = ghz_decomposition(g, tol)
    return [np.linalg.inv(np.column_stack(pair)) for pair in ((a1, a2), (b1, b2), (c1, c2))]


def _lambda_gauge(lams: tuple[complex, complex]) -> tuple[complex, complex]:
    return tuple(sorted(lams, key=lambda z: (round(abs(z), 12), np.angle(z) % (2 * np.pi))))


def _phi4_params(P: Pencil, ps: PencilStructure, subcase: str, tol: Tolerances) -> dict:
    (p1, k), (p2, _) = ps.zero_psi_points
    x1, M1 = factor_zero_psi(P.vector(p1), k)
    x2, M2 = factor_zero_psi(P.vector(p2), k)
    if subcase == "iii":
        # the two rank-1 members of span{M1, M2} give the product basis
        poly = HomogeneousPoly([np.linalg.det(M1), _mixed(M1, M2), np.linalg.det(M2)])
        roots = quad_roots(poly, tol, ref_scale=0.0)
        if len(roots) != 2:
            raise DegenerateParams("span of the two witnesses has no product basis")
        T = np.array([roots.roots[0], roots.roots[1]])  # rows: R_i = T[i,0] M1 + T[i,1] M2
        a = np.linalg.inv(T)  # rows: M_j = a[j,0] R_1 + a[j,1] R_2
        lam = a[:, 1] / a[:, 0]
        r = lam[1] / lam[0]
        if abs(abs(r) - 1) <= 1e-12:
            r = r if r.imag >= 0 else 1 / r
        elif abs(r) > 1:
            r = 1 / r
        if abs(r - 1) <= tol.root_cluster:
            raise DegenerateParams("lambda_1 and lambda_2 coincide")
        return {"lambda": _lambda_gauge((complex(r), 1.0 + 0j)), "invariant": complex(r)}
    # sub-case iv: span{M1, M2} contains a single product phi psi^T
    poly = HomogeneousPoly([np.linalg.det(M1), _mixed(M1, M2), np.linalg.det(M2)])
    roots = quad_roots(poly, tol, ref_scale=0.0)
    R = roots.roots[0][0] * M1 + roots.roots[0][1] * M2
    phi, psi = (_unit(v) for v in _rank_one_factors(R))
    phib = np.array([-np.conj(phi[1]), np.conj(phi[0])])
    psib = np.array([-np.conj(psi[1]), np.conj(psi[0])])
    mu = []
    for M in (M1, M2):
        a = phi.conj() @ M @ psi.conj()
        c = phib.conj() @ M @ psi.conj()
        mu.append(a / c)
    if abs(mu[0] - mu[1]) <= tol.root_cluster * max(1.0, abs(mu[0]), abs(mu[1])):
        raise DegenerateParams("lambda_1 and lambda_2 coincide")
    raw = tuple(complex(1 / m) if m != 0 else complex("inf") for m in mu)
    # an affine change of the second basis vectors moves 1/lambda freely, so any
    # two distinct values are equivalent; report the fixed representative (1, 2)
    return {"lambda": (1.0 + 0j, 2.0 + 0j), "lambda_raw": raw, "invariant": None}


def _mixed(X, Y) -> complex:
    return complex(X[0, 0] * Y[1, 1] + X[1, 1] * Y[0, 0] - X[0, 1] * Y[1, 0] - X[1, 0] * Y[0, 1])


def _apply_frame(F, vecs):
    return [_unit(f @ v) for f, v in zip(F, vecs)]


def extract_canonical(s: StateVector, report: QuadReport, tol: Tolerances = DEFAULT_TOL) -> CanonicalData:
    """Parameters of a genuine class in the slots of its canonical state.

    ``W[0_kPsi,0_kPsi]`` (Phi4) sub-case iii reports ``lambda = (r, 1)``
    where ``r = lambda_1 / lambda_2`` is the orbit invariant, taken with
    ``|r| <= 1`` because relabeling the two special points inverts it.
    Sub-case iv has no continuous invariant.  Families with free vectors
    report them after mapping a generic GHZ member of the pencil to
    ``|000> + |111>``; the choice of that member is a gauge.

    Raises
    ------
    NotGenuine
        For degenerate labels.
    DegenerateParams
        If the extracted ``lambda_1`` and ``lambda_2`` coincide.
    """
    label = report.label
    if not label.genuine:
        raise NotGenuine(f"{label.structural.name} is a degenerate class")
    fam = label.family
    if fam in (Family.W000_000, Family.W000_W):
        return CanonicalData(fam, {}, label.subcase)
    P = report.pencil if report.pencil is not None else build_pencil(normalize(s), tol)
    ps = report.pencil_structure
    if fam is Family.W0kPsi_0kPsi:
        return CanonicalData(fam, _phi4_params(P, ps, label.subcase, tol), label.subcase)
    if fam in (Family.W000_0kPsi, Family.W0iPsi_0jPsi):
        params: dict[str, Any] = {}
        if ps.product_points.roots:
            a, b, c = factor_product(P.vector(ps.product_points.roots[0]))
            params["product"] = (_unit(a), b, c)
        params["zero_psi"] = tuple(
            (k,) + tuple(_unit(x) for x in factor_zero_psi(P.vector(p), k)) for p, k in ps.zero_psi_points
        )
        return CanonicalData(fam, params, label.subcase)
    F = _ghz_frame(P, ps, tol)
    if fam is Family.W000_GHZ:
        phi, varphi, psi = _apply_frame(F, factor_product(P.vector(ps.product_points.roots[0])))
        return CanonicalData(fam, {"phi": phi, "varphi": varphi, "psi": psi})
    if fam is Family.W0kPsi_GHZ:
        (p, k), = ps.zero_psi_points
        x, M = factor_zero_psi(P.vector(p), k)
        rest = [q for q in range(3) if q != k - 1]
        Psi = F[rest[0]] @ M @ F[rest[1]].T
        return CanonicalData(fam, {"phi": _unit(F[k - 1] @ x), "Psi": Psi / np.linalg.norm(Psi), "k": k})
    # WGHZ_W: W members of the pencil, seen in the GHZ frame
    w_vecs = []
    for r in ps.w_only(10 * tol.root_cluster):
        v = P.vector(r).reshape(2, 2, 2)
        v = np.einsum("ai,bj,ck,ijk->abc", F[0], F[1], F[2], v).reshape(-1)
        w_vecs.append(_unit(v))
    return CanonicalData(fam, {"w_members": tuple(w_vecs)})


# ----------------------------------------------------------------------------
# catalog


@dataclass(frozen=True)
class CatalogEntry:
    structural: StructuralClass
    family: Family
    constructor: Callable[..., StateVector] = field(compare=False, repr=False)

    @property
    def name(self) -> str:
        return self.structural.name


def enumerate_classes() -> tuple[CatalogEntry, ...]:
    """All 34 structural classes (18 degenerate, then 16 genuine) with canonical-state constructors."""
    from .orbits import canonical_state

    return tuple(CatalogEntry(c, family_of(c), partial(canonical_state, c)) for c in ALL_CLASSES)
