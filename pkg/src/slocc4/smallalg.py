"""Small dense complex linear algebra and binary-form root finding.

Everything here works on 2x2, 2x4 and 2x8 complex matrices and on homogeneous
polynomials of degree <= 4 in a projective pair ``[alpha : beta]``.  Every
rank or degeneracy decision is made relative to a scale supplied by the
caller.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import SingularPivot, ZeroMatrix
from .qtypes import DEFAULT_TOL, CoefficientMatrix, Tolerances

__all__ = [
    "SVD2xN",
    "svd_2xN",
    "singular_values_2xN",
    "minors_2xN",
    "rank2x2",
    "det2",
    "mixed_det2",
    "pencil_discriminant",
    "spectrum_degenerate",
    "HomogeneousPoly",
    "ProjectiveRootSet",
    "quad_roots",
    "quartic_roots",
    "common_roots",
    "chordal",
    "proj_normalize",
]

_PAIR_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _pairs(n: int) -> tuple[np.ndarray, np.ndarray]:
    if n not in _PAIR_CACHE:
        ij = np.array(list(combinations(range(n), 2)))
        _PAIR_CACHE[n] = (ij[:, 0], ij[:, 1])
    return _PAIR_CACHE[n]


def minors_2xN(C: np.ndarray) -> np.ndarray:
    """All 2x2 minors of a ``(..., 2, N)`` array, columns ``i < j`` in lexicographic order."""
    i, j = _pairs(C.shape[-1])
    return C[..., 0, i] * C[..., 1, j] - C[..., 0, j] * C[..., 1, i]


def singular_values_2xN(C: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Singular values ``(s1, s2)`` of a batch of 2xN matrices.

    ``s1*s2`` comes from the minors (Cauchy-Binet), which keeps the small
    singular value accurate to roughly ``eps * s1``.
    """
    C = np.asarray(C)
    fro2 = np.sum(np.abs(C) ** 2, axis=(-2, -1))
    prod = np.sqrt(np.sum(np.abs(minors_2xN(C)) ** 2, axis=-1))
    gap = np.sqrt(np.maximum(fro2 * fro2 - 4 * prod * prod, 0.0))
    s1 = np.sqrt((fro2 + gap) / 2)
    with np.errstate(invalid="ignore", divide="ignore"):
        s2 = np.where(s1 > 0, prod / np.where(s1 > 0, s1, 1), 0.0)
    return s1, s2


@dataclass(frozen=True, eq=False)
class SVD2xN:
    """Thin SVD ``C = s1 v1 w1^H + s2 v2 w2^H`` of a 2xN complex matrix."""

    sigma: tuple[float, float]
    left: tuple[np.ndarray, np.ndarray]
    right: tuple[np.ndarray, ...]
    rank: int

    def reconstruct(self) -> np.ndarray:
        out = self.sigma[0] * np.outer(self.left[0], self.right[0].conj())
        if len(self.right) > 1:
            out = out + self.sigma[1] * np.outer(self.left[1], self.right[1].conj())
        return out


def svd_2xN(C: CoefficientMatrix | np.ndarray, tol: Tolerances = DEFAULT_TOL) -> SVD2xN:
    """Closed-form SVD of a 2xN matrix via the Hermitian Gram matrix ``C C^H``."""
    M = np.asarray(C.entries if isinstance(C, CoefficientMatrix) else C, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] != 2:
        raise ValueError(f"expected a 2xN matrix, got shape {M.shape}")
    s1, s2 = (float(x) for x in singular_values_2xN(M))
    if s1 == 0.0:
        raise ZeroMatrix("zero coefficient matrix")
    g00 = float(np.vdot(M[0], M[0]).real)
    g11 = float(np.vdot(M[1], M[1]).real)
    g01 = complex(np.vdot(M[1], M[0]))  # (C C^H)[0, 1]
    lam = s1 * s1
    # eigenvector of [[g00, g01], [conj(g01), g11]] for lam; pick the better-conditioned form
    a = np.array([g01, lam - g00])
    b = np.array([lam - g11, g01.conjugate()])
    v1 = a if np.linalg.norm(a) >= np.linalg.norm(b) else b
    nv = np.linalg.norm(v1)
    v1 = np.array([1.0 + 0j, 0.0]) if nv == 0.0 else v1 / nv
    v2 = np.array([-v1[1].conjugate(), v1[0].conjugate()])
    w1 = M.conj().T @ v1 / s1
    rank = 2 if s2 > tol.rank_rel * s1 else 1
    right: tuple[np.ndarray, ...] = (w1,)
    if s2 > 0.0:
        w2 = M.conj().T @ v2 / s2
        # re-orthogonalize against w1; w2 carries relative error ~ eps*s1/s2
        w2 = w2 - np.vdot(w1, w2) * w1
        w2 = w2 / np.linalg.norm(w2)
        right = (w1, w2)
    return SVD2xN((s1, s2), (v1, v2), right, rank)


# ----------------------------------------------------------------------------
# 2x2 decisions


def det2(M) -> complex:
    return M[0][0] * M[1][1] - M[0][1] * M[1][0]


def mixed_det2(A, B) -> complex:
    """``tr(adj(A) B)``: the cross term of ``det(x A + y B)``."""
    return A[0][0] * B[1][1] + A[1][1] * B[0][0] - A[0][1] * B[1][0] - A[1][0] * B[0][1]


def _fro(M) -> float:
    return math.sqrt(sum(abs(M[i][j]) ** 2 for i in range(2) for j in range(2)))


def rank2x2(M, scale: float, tol: Tolerances = DEFAULT_TOL) -> int:
    """Numerical rank of a 2x2 matrix relative to ``scale``."""
    if abs(det2(M)) > tol.rank_rel * scale * scale:
        return 2
    if max(abs(M[i][j]) for i in range(2) for j in range(2)) > tol.rank_rel * scale:
        return 1
    return 0


def pencil_discriminant(Wa, Wb) -> tuple[complex, float]:
    """Discriminant of ``det(x Wa + y Wb)`` and its natural scale.

    ``tr(adj Wa Wb)^2 - 4 det Wa det Wb`` equals ``det(Wa)^2`` times the
    discriminant of the characteristic polynomial of ``Wa^-1 Wb``.  It is
    homogeneous of degree 2 in each argument, so the returned scale is
    ``s = sqrt(|Wa| |Wb|)`` and ``|disc| / s^4`` does not change when either
    block is rescaled.
    """
    t = mixed_det2(Wa, Wb)
    return t * t - 4 * det2(Wa) * det2(Wb), math.sqrt(_fro(Wa) * _fro(Wb))


def spectrum_degenerate(Wa, Wb, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Whether ``Wa^-1 Wb`` has a repeated eigenvalue (no inverse is formed).

    The test is ``|disc| <= disc_rel * |Wa|^2 |Wb|^2``; a zero ``Wb`` has the
    degenerate spectrum ``{0, 0}``.
    """
    disc, s = pencil_discriminant(Wa, Wb)
    if rank2x2(Wa, _fro(Wa), tol) != 2:
        raise SingularPivot("pivot block is not invertible")
    return abs(disc) <= tol.disc_rel * s**4


# ----------------------------------------------------------------------------
# Binary forms


def proj_normalize(p) -> np.ndarray:
    """Scale a projective point so its larger-modulus component is exactly 1."""
    a, b = complex(p[0]), complex(p[1])
    # near-ties go to the first component so equal-modulus points print stably
    if abs(a) >= abs(b) * (1 - 1e-12):
        if a == 0:
            raise ValueError("[0:0] is not a projective point")
        return np.array([1.0 + 0j, b / a])
    return np.array([a / b, 1.0 + 0j])


def _unit(p) -> np.ndarray:
    v = np.asarray(p, dtype=np.complex128)
    return v / math.hypot(abs(v[0]), abs(v[1]))


def chordal(p, q) -> float:
    """Chordal distance ``sqrt(1 - |<p,q>|^2)`` between projective points.

    Evaluated as ``|p0 q1 - p1 q0| / (|p| |q|)``, which is the same quantity
    without the cancellation near 0.
    """
    p0, p1 = complex(p[0]), complex(p[1])
    q0, q1 = complex(q[0]), complex(q[1])
    return abs(p0 * q1 - p1 * q0) / (math.hypot(abs(p0), abs(p1)) * math.hypot(abs(q0), abs(q1)))


def _midpoint(p, q) -> np.ndarray:
    u, v = _unit(p), _unit(q)
    ov = np.vdot(u, v)
    if abs(ov) > 0:
        v = v * (abs(ov) / ov)
    return u + v


@dataclass(frozen=True, eq=False)
class HomogeneousPoly:
    """Binary form ``sum_j c_j alpha^(d-j) beta^j``.

    ``coeffs`` are stored scaled to max modulus 1; ``scale`` keeps the factor
    that was divided out (0 for the zero polynomial).
    """

    coeffs: np.ndarray
    scale: float

    def __init__(self, coeffs: Sequence[complex]):
        c = np.array(coeffs, dtype=np.complex128).reshape(-1)
        if c.size - 1 not in (1, 2, 3, 4):
            raise ValueError(f"unsupported degree {c.size - 1}")
        s = float(np.max(np.abs(c)))
        if s > 0:
            c = c / s
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "scale", s)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    @property
    def is_zero(self) -> bool:
        return self.scale == 0.0

    def __call__(self, alpha, beta) -> complex:
        """Evaluate the *normalized* form."""
        alpha, beta = complex(alpha), complex(beta)
        d = self.degree
        return sum(c * alpha ** (d - j) * beta**j for j, c in enumerate(self.coeffs.tolist()))

    def eval_unit(self, p) -> complex:
        a, b = complex(p[0]), complex(p[1])
        n = math.hypot(abs(a), abs(b))
        return self(a / n, b / n)

    def raw(self) -> np.ndarray:
        return self.coeffs * self.scale


@dataclass(frozen=True, eq=False)
class ProjectiveRootSet:
    """Projective roots (``[alpha : beta]`` with max component 1) and multiplicities."""

    roots: tuple[np.ndarray, ...] = ()
    multiplicities: tuple[int, ...] = ()
    is_identically_zero: bool = False

    def __len__(self) -> int:
        return len(self.roots)

    def __iter__(self):
        return iter(self.roots)

    def contains(self, p, radius: float) -> bool:
        return any(chordal(p, r) <= radius for r in self.roots)


def _cluster(points, mults, radius, still_root) -> tuple[tuple[np.ndarray, ...], tuple[int, ...]]:
    """Greedy merge of projective points.

    Two points merge when they are within ``radius`` (chordal) or when their
    midpoint still passes ``still_root``: a multiple root split by rounding
    leaves a tiny residual at the midpoint, two distinct roots do not.
    """
    clusters: list[list] = []  # [unit vector sum, members, multiplicity]
    for p, m in zip(points, mults):
        u = _unit(p)
        for cl in clusters:
            rep = cl[0]
            if chordal(rep, u) <= radius or (still_root is not None and still_root(_midpoint(rep, u))):
                # phase-aligned running average of member directions
                ov = np.vdot(_unit(rep), u)
                if abs(ov) > 0:
                    u = u * (abs(ov) / ov)
                cl[0] = _unit(cl[0] * cl[1] + u)
                cl[1] += 1
                cl[2] += m
                break
        else:
            clusters.append([u, 1, m])
    roots = tuple(proj_normalize(c[0]) for c in clusters)
    return roots, tuple(c[2] for c in clusters)


def _raw_quadratic_roots(a: complex, b: complex, c: complex) -> list[np.ndarray]:
    """Both homogeneous roots of ``a x^2 + b x y + c y^2`` (not all zero)."""
    disc = cmath.sqrt(b * b - 4 * a * c)
    # choose the sign that avoids cancellation
    q1, q2 = b + disc, b - disc
    q = -(q1 if abs(q1) >= abs(q2) else q2) / 2
    if q == 0:
        # b == 0 and a*c == 0
        if a == 0:
            return [np.array([1.0 + 0j, 0]), np.array([1.0 + 0j, 0])]
        return [np.array([0j, 1.0]), np.array([0j, 1.0])]
    return [np.array([q, a]), np.array([c, q])]


def quad_roots(p: HomogeneousPoly, tol: Tolerances = DEFAULT_TOL, ref_scale: float | None = None) -> ProjectiveRootSet:
    """Roots of a binary quadratic, clustered to multiplicity.

    The polynomial counts as identically zero when its original scale is at
    most ``root_cluster * ref_scale`` (``ref_scale`` defaults to 1).
    """
    if p.degree != 2:
        raise ValueError("quad_roots needs a degree-2 form")
    ref = 1.0 if ref_scale is None else ref_scale
    if p.scale <= tol.root_cluster * ref:
        return ProjectiveRootSet(is_identically_zero=True)
    a, b, c = (complex(x) for x in p.coeffs)
    pts = _raw_quadratic_roots(a, b, c)
    roots, mults = _cluster(pts, [1, 1], tol.root_cluster, lambda u: abs(p.eval_unit(u)) <= tol.root_cluster)
    return ProjectiveRootSet(roots, mults)


def _newton(poly: np.poly1d, t: complex, steps: int) -> complex:
    """Guarded Newton: a step is kept only if it is short and lowers ``|poly|``.

    Near a multiple root the derivative is tiny and plain Newton can jump to
    another root; the guard keeps the unpolished value instead.
    """
    dpoly = poly.deriv()
    f = abs(poly(t))
    for _ in range(steps):
        dv = dpoly(t)
        if dv == 0:
            break
        t_new = t - poly(t) / dv
        f_new = abs(poly(t_new))
        if f_new >= f or abs(t_new - t) > 1e-3 * max(1.0, abs(t)):
            break
        t, f = t_new, f_new
    return t


def _polish(p: HomogeneousPoly, u: np.ndarray, steps: int = 3) -> np.ndarray:
    """Refine a root on the dehomogenized form in the better-conditioned chart."""
    a, b = complex(u[0]), complex(u[1])
    if abs(a) >= abs(b):  # chart alpha = 1, variable beta
        return np.array([1.0 + 0j, _newton(np.poly1d(p.coeffs[::-1]), b / a, steps)])
    return np.array([_newton(np.poly1d(p.coeffs), a / b, steps), 1.0 + 0j])


def quartic_roots(p: HomogeneousPoly, tol: Tolerances = DEFAULT_TOL, ref_scale: float | None = None) -> ProjectiveRootSet:
    """Roots of a binary quartic via companion-matrix eigenvalues.

    The form is dehomogenized in ``t = alpha / beta``.  Exactly vanishing
    leading coefficients correspond to roots at ``[1:0]`` and vanishing
    trailing ones to roots at ``[0:1]``; both are added explicitly.
    """
    if p.degree != 4:
        raise ValueError("quartic_roots needs a degree-4 form")
    ref = 1.0 if ref_scale is None else ref_scale
    if p.scale <= tol.root_cluster * ref:
        return ProjectiveRootSet(is_identically_zero=True)
    c = p.coeffs
    # dehomogenize in t = alpha/beta: c0 t^4 + c1 t^3 + ... + c4
    nz = np.flatnonzero(np.abs(c) > 0)
    lead = nz[0]  # leading zeros => roots at beta = 0
    pts: list[np.ndarray] = [np.array([1.0 + 0j, 0.0])] * int(lead)
    core = c[lead:]
    if core.size > 1:
        # strip exact trailing zeros: roots at alpha = 0
        trail = core.size - 1 - np.flatnonzero(np.abs(core) > 0)[-1]
        body = core[: core.size - trail]
        pts += [np.array([0j, 1.0])] * int(trail)
        if body.size > 1:
            for t in np.roots(body):
                pts.append(_polish(p, np.array([t, 1.0 + 0j])))
    roots, mults = _cluster(pts, [1] * len(pts), tol.root_cluster, lambda u: abs(p.eval_unit(u)) <= tol.root_cluster)
    return ProjectiveRootSet(roots, mults)


def common_roots(
    ps: Iterable[HomogeneousPoly],
    tol: Tolerances = DEFAULT_TOL,
    ref_scale: float | None = None,
) -> ProjectiveRootSet:
    """Common projective zeros of a set of binary forms of degree <= 2.

    Members whose scale is at most ``root_cluster * ref_scale`` are treated as
    identically zero (``ref_scale`` defaults to the largest member scale).
    Candidates are the roots of each non-zero member; a candidate survives if
    every non-zero member, evaluated with its original scale at the unit
    representative of the point, is at most ``root_cluster * ref_scale``.  A
    member that is small everywhere therefore cannot veto a root.  The
    multiplicity reported is the largest multiplicity any member has at the
    merged point.
    """
    ps = list(ps)
    if not ps:
        raise ValueError("common_roots needs at least one polynomial")
    ref = max(p.scale for p in ps) if ref_scale is None else ref_scale
    live = [p for p in ps if p.scale > tol.root_cluster * ref]
    if not live:
        return ProjectiveRootSet(is_identically_zero=True)
    thr = tol.root_cluster

    def is_common(u) -> bool:
        return all(abs(q.eval_unit(u)) * q.scale <= thr * ref for q in live)

    cands, mults = [], []
    for p in live:
        if p.degree == 2:
            rs = quad_roots(p, tol, ref_scale=0.0)
        else:  # linear
            a, b = (complex(x) for x in p.coeffs)
            rs = ProjectiveRootSet((proj_normalize((-b, a)),), (1,))
        for r, m in zip(rs.roots, rs.multiplicities):
            if is_common(r):
                cands.append(r)
                mults.append(m)
    if not cands:
        return ProjectiveRootSet()
    # merge, keeping the max multiplicity instead of summing
    roots: list[np.ndarray] = []
    mult: list[int] = []
    for r, m in zip(cands, mults):
        for k, q in enumerate(roots):
            if chordal(q, r) <= thr or is_common(_midpoint(q, r)):
                mult[k] = max(mult[k], m)
                break
        else:
            roots.append(r)
            mult.append(m)
    return ProjectiveRootSet(tuple(roots), tuple(mult))
