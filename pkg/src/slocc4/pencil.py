"""Special points of the two-dimensional subspace attached to a 4-qubit state.

The qubit-1 coefficient matrix ``C`` of a 4-qubit state is 2x8; its row space
is a subspace of the 3-qubit space of qubits 2, 3, 4.  When it is
two-dimensional it is swept by the pencil

    v(alpha, beta) = alpha * p1 + beta * p2,

and the SLOCC class of the 4-qubit state is decided by where along the pencil
``v`` drops to a product (``000``) or to a ``0_k Psi`` vector, and by whether
the generic member is GHZ or W.

``p1`` and ``p2`` are the complex conjugates of the right singular vectors of
``C`` (equivalently an orthonormal basis of its row space), so that every row
of ``C`` is literally a member of the pencil.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .errors import UnresolvedPencil, ZeroMatrix, ZeroState
from .qtypes import DEFAULT_TOL, StateVector, Tolerances, TripartiteClass, reshape
from .smallalg import (
    HomogeneousPoly,
    ProjectiveRootSet,
    _midpoint,
    _pairs,
    _unit,
    chordal,
    common_roots,
    proj_normalize,
    quartic_roots,
    svd_2xN,
)
from .tri_classify import TriReport, classify_tensor, partition_matrices

__all__ = [
    "Pencil",
    "OneDim",
    "PencilStructure",
    "build_pencil",
    "minor_polys",
    "discriminant_poly",
    "analyze",
    "GENERIC_CANDIDATES",
]


@dataclass(frozen=True, eq=False)
class Pencil:
    """Orthonormal basis ``(w1, w2)`` of the qubit-1 row space with cached partition matrices.

    Attributes
    ----------
    w1, w2 : StateVector
        3-qubit states spanning the subspace.
    A, B : ndarray, shape (3, 2, 4)
        ``A[i]`` is the partition-``i+1`` coefficient matrix of ``w1``, ``B[i]`` that of ``w2``.
    sigma : tuple of float
        Singular values of the 2x8 coefficient matrix.
    left : ndarray, shape (2, 2)
        Columns are the left singular vectors; ``C = sum_k sigma_k left[:, k] (x) w_k``.
    """

    w1: StateVector
    w2: StateVector
    A: np.ndarray
    B: np.ndarray
    sigma: tuple[float, float] = (1.0, 1.0)
    left: np.ndarray = field(default_factory=lambda: np.eye(2, dtype=np.complex128))

    @classmethod
    def from_vectors(cls, w1, w2, sigma=(1.0, 1.0), left=None) -> "Pencil":
        a = np.asarray(w1.amps if isinstance(w1, StateVector) else w1, dtype=np.complex128)
        b = np.asarray(w2.amps if isinstance(w2, StateVector) else w2, dtype=np.complex128)
        A = partition_matrices(a.reshape(2, 2, 2))
        B = partition_matrices(b.reshape(2, 2, 2))
        left = np.eye(2, dtype=np.complex128) if left is None else np.asarray(left)
        return cls(StateVector(a, 3), StateVector(b, 3), A, B, tuple(sigma), left)

    def vector(self, point) -> np.ndarray:
        """Unit 3-qubit amplitude vector of the pencil member at ``[alpha:beta]``."""
        u = _unit(point)
        v = u[0] * self.w1.amps + u[1] * self.w2.amps
        return v / np.linalg.norm(v)

    def state(self, point) -> StateVector:
        return StateVector(self.vector(point), 3)


@dataclass(frozen=True, eq=False)
class OneDim:
    """The coefficient matrix has rank 1: the state is ``x (x) w``."""

    w: StateVector


@dataclass(frozen=True, eq=False)
class PencilStructure:
    """Special points along a pencil.

    Attributes
    ----------
    product_points : ProjectiveRootSet
        Parameters where the member is a product state (confirmed).
    zero_psi_points : tuple of (point, k)
        Parameters where the member is ``0_k Psi`` (confirmed).
    generic_class : TripartiteClass or None
        GHZ or W; None only when ``infinite_products`` is set.
    infinite_products : bool
        Some partition has rank 1 along the whole pencil.
    w_points : ProjectiveRootSet
        Roots of the pencil discriminant.  Product and ``0_k Psi`` points are
        roots too; ``w_only`` drops them.
    boundary : bool
        Some decision fell within a factor 10 of its tolerance.
    samples : tuple
        The generic sample parameters used.
    """

    product_points: ProjectiveRootSet
    zero_psi_points: tuple
    generic_class: Optional[TripartiteClass]
    infinite_products: bool
    w_points: ProjectiveRootSet
    boundary: bool = False
    samples: tuple = ()
    infinite_partitions: tuple = ()

    @property
    def special_points(self) -> list[np.ndarray]:
        return list(self.product_points.roots) + [p for p, _ in self.zero_psi_points]

    @property
    def zero_psi_partitions(self) -> tuple[int, ...]:
        return tuple(k for _, k in self.zero_psi_points)

    def w_only(self, radius: float) -> list[np.ndarray]:
        """Discriminant roots that are not special points."""
        sp = self.special_points
        return [r for r in self.w_points.roots if all(chordal(r, q) > radius for q in sp)]


def build_pencil(s: StateVector, tol: Tolerances = DEFAULT_TOL) -> Union[Pencil, OneDim]:
    """Pencil of the qubit-1 row space of a 4-qubit state, or ``OneDim`` if it has rank 1."""
    if s.n_qubits != 4:
        raise ValueError("build_pencil needs a 4-qubit state")
    try:
        d = svd_2xN(reshape(s, 1), tol)
    except ZeroMatrix:
        raise ZeroState("zero four-qubit state") from None
    if d.rank == 1:
        w = d.right[0].conj()
        return OneDim(StateVector(w / np.linalg.norm(w), 3))
    return Pencil.from_vectors(
        d.right[0].conj(), d.right[1].conj(), d.sigma, np.column_stack(d.left)
    )


# ----------------------------------------------------------------------------
# polynomial data


def _minor_coeffs(P: Pencil) -> np.ndarray:
    """Coefficients ``(alpha^2, alpha beta, beta^2)`` of all minors: shape (3, 6, 3)."""
    A, B = P.A, P.B
    i, j = _pairs(4)
    a2 = A[:, 0, i] * A[:, 1, j] - A[:, 0, j] * A[:, 1, i]
    b2 = B[:, 0, i] * B[:, 1, j] - B[:, 0, j] * B[:, 1, i]
    ab = A[:, 0, i] * B[:, 1, j] + B[:, 0, i] * A[:, 1, j] - A[:, 0, j] * B[:, 1, i] - B[:, 0, j] * A[:, 1, i]
    return np.stack([a2, ab, b2], axis=-1)


def minor_polys(P: Pencil, partition: int) -> list[HomogeneousPoly]:
    """The six 2x2 minors of ``alpha A_i + beta B_i`` as binary quadratics.

    Minors are ordered by column pair ``(0,1), (0,2), ..., (2,3)``.  A minor
    that vanishes identically comes back as a polynomial with ``scale == 0``
    (up to rounding; callers compare ``scale`` with their tolerance).
    """
    if partition not in (1, 2, 3):
        raise ValueError(f"partition must be 1, 2 or 3, got {partition!r}")
    return [HomogeneousPoly(c) for c in _minor_coeffs(P)[partition - 1]]


def _lin_det(X, Y) -> np.ndarray:
    """``det(alpha X + beta Y)`` as coefficients of ``alpha^2, alpha beta, beta^2``."""
    return np.array([
        X[0, 0] * X[1, 1] - X[0, 1] * X[1, 0],
        X[0, 0] * Y[1, 1] + Y[0, 0] * X[1, 1] - X[0, 1] * Y[1, 0] - Y[0, 1] * X[1, 0],
        Y[0, 0] * Y[1, 1] - Y[0, 1] * Y[1, 0],
    ])


def _mixed(X, Y) -> complex:
    return X[0, 0] * Y[1, 1] + X[1, 1] * Y[0, 0] - X[0, 1] * Y[1, 0] - X[1, 0] * Y[0, 1]


def discriminant_poly(P: Pencil) -> HomogeneousPoly:
    """Quartic ``tr(adj W1 W2)^2 - 4 det W1 det W2`` with ``W1, W2`` the qubit-2 slices of ``v(alpha, beta)``."""
    t1 = P.w1.amps.reshape(2, 2, 2)
    t2 = P.w2.amps.reshape(2, 2, 2)
    X1, X2 = t1[0], t1[1]
    Y1, Y2 = t2[0], t2[1]
    tr = np.array([_mixed(X1, X2), _mixed(X1, Y2) + _mixed(Y1, X2), _mixed(Y1, Y2)])
    q = np.convolve(tr, tr) - 4 * np.convolve(_lin_det(X1, Y1), _lin_det(X2, Y2))
    return HomogeneousPoly(q)


# ----------------------------------------------------------------------------
# analysis

# fixed pseudo-random parameters for the generic samples
_g = np.random.default_rng(20240611).normal(size=(24, 2, 2))
GENERIC_CANDIDATES = tuple(_unit(c[:, 0] + 1j * c[:, 1]) for c in _g)
del _g


def _vanishes(coeffs: np.ndarray, live: np.ndarray, u: np.ndarray, thr: float) -> bool:
    """Whether every live minor of one partition is below ``thr`` at unit point ``u``."""
    mono = np.array([u[0] * u[0], u[0] * u[1], u[1] * u[1]])
    vals = coeffs[live] @ mono
    return bool(np.all(np.abs(vals) <= thr))


def analyze(P: Pencil, tol: Tolerances = DEFAULT_TOL) -> PencilStructure:
    """Locate the product and ``0_k Psi`` points of a pencil and its generic class.

    Raises
    ------
    UnresolvedPencil
        If the generic samples disagree, or more than two product or more
        than two ``0_k Psi`` points are found.
    """
    thr = tol.root_cluster  # the pencil basis is orthonormal: scale 1
    coeffs = _minor_coeffs(P)
    scales = np.max(np.abs(coeffs), axis=-1)  # (3, 6)
    live = scales > thr
    disc = discriminant_poly(P)
    infinite = tuple(k + 1 for k in range(3) if not live[k].any())
    if infinite:
        return PencilStructure(
            ProjectiveRootSet(), (), None, True, quartic_roots(disc, tol, ref_scale=1.0),
            boundary=False, infinite_partitions=infinite,
        )

    boundary = False
    # per-partition common roots, then tag every candidate with all partitions vanishing there
    cands: list[list] = []  # [unit point, frozenset of partitions]
    for k in range(3):
        polys = [HomogeneousPoly(c) for c, ok in zip(coeffs[k], live[k]) if ok]
        for r in common_roots(polys, tol, ref_scale=1.0).roots:
            u = _unit(r)
            tags = frozenset(q + 1 for q in range(3) if _vanishes(coeffs[q], live[q], u, thr))
            for c in cands:
                union = c[1] | tags
                if chordal(c[0], u) <= thr or all(
                    _vanishes(coeffs[q - 1], live[q - 1], _unit(_midpoint(c[0], u)), thr) for q in union
                ):
                    c[1] = union
                    break
            else:
                cands.append([u, tags])

    products: list[np.ndarray] = []
    zero_psi: list[tuple[np.ndarray, int]] = []
    for u, tags in cands:
        rep = classify_tensor(P.vector(u).reshape(2, 2, 2), tol)
        boundary = boundary or rep.boundary
        if len(tags) >= 2:
            if len(tags) == 2:
                boundary = True
            if rep.cls is TripartiteClass.P000:
                products.append(u)
            else:
                boundary = True
        else:
            (k,) = tags
            if rep.cls is TripartiteClass.zero_psi(k):
                zero_psi.append((u, k))
            else:
                boundary = True

    special = products + [p for p, _ in zero_psi]
    if len(products) > 2 or len(zero_psi) > 2:
        raise UnresolvedPencil(
            f"found {len(products)} product and {len(zero_psi)} 0_k Psi points; at most 2 each expected"
        )

    # generic class from three unanimous samples far from special points
    far = [c for c in GENERIC_CANDIDATES if all(chordal(c, q) > 10 * thr for q in special)]
    ranked = sorted(far, key=lambda c: -abs(disc.eval_unit(c)))[:3]
    reports: list[TriReport] = [classify_tensor(P.vector(c).reshape(2, 2, 2), tol) for c in ranked]
    classes = {r.cls for r in reports}
    if len(classes) != 1 or not classes <= {TripartiteClass.GHZ, TripartiteClass.W}:
        raise UnresolvedPencil(f"generic samples disagree: {sorted(c.value for c in classes)}")
    generic = classes.pop()
    boundary = boundary or any(r.boundary for r in reports)

    disc_zero = disc.scale <= tol.disc_rel
    if disc_zero != (generic is TripartiteClass.W):
        boundary = True
    if tol.disc_rel / 10 < disc.scale <= tol.disc_rel * 10:
        boundary = True
    if disc_zero:
        w_points = ProjectiveRootSet(is_identically_zero=True)
    else:
        w_points = quartic_roots(disc, tol, ref_scale=0.0)

    return PencilStructure(
        ProjectiveRootSet(tuple(proj_normalize(p) for p in products), (1,) * len(products)),
        tuple((proj_normalize(p), k) for p, k in zero_psi),
        generic,
        False,
        w_points,
        boundary=boundary,
        samples=tuple(proj_normalize(c) for c in ranked),
    )
