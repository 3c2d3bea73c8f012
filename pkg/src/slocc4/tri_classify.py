"""Three-qubit SLOCC classification.

The decision uses only the ranks of the three single-qubit coefficient
matrices, the ranks of the two qubit-1 slices ``W1`` and ``W2`` and whether
``W_a^-1 W_b`` has a degenerate spectrum:

* all three partitions rank 1: product ``000``;
* exactly one partition ``k`` of rank 1: ``0_k Psi``;
* all ranks 2, both slices rank 1: GHZ;
* all ranks 2, otherwise: W if the spectrum is degenerate, GHZ if not.

Examples
--------
>>> from slocc4.qtypes import StateVector
>>> classify3(StateVector.from_basis(["000", "111"])).cls
<TripartiteClass.GHZ: 'GHZ'>
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NotGenuine, ZeroState
from .qtypes import DEFAULT_TOL, StateVector, Tolerances, TripartiteClass
from .smallalg import (
    HomogeneousPoly,
    det2,
    mixed_det2,
    pencil_discriminant,
    quad_roots,
    rank2x2,
    singular_values_2xN,
    spectrum_degenerate,
    svd_2xN,
)

__all__ = [
    "TriReport",
    "w_blocks",
    "classify3",
    "classify_tensor",
    "partition_matrices",
    "hyperdet_oracle",
    "ghz_decomposition",
    "factor_product",
    "factor_zero_psi",
]

# boundary band: a decision is "close" when its statistic lies within this
# factor of the threshold on either side
BAND = 10.0


@dataclass(frozen=True)
class TriReport:
    """Outcome of :func:`classify3`.

    Attributes
    ----------
    cls : TripartiteClass
    ranks : tuple of int
        Ranks of ``C^(1)``, ``C^(2)``, ``C^(3)``.
    w_ranks : tuple of int or None
        Ranks of the qubit-1 slices; only computed when all partition ranks are 2.
    disc_degenerate : bool or None
        Result of the spectrum test, when it was needed.
    boundary : bool
        True when some decision statistic fell within a factor 10 of its threshold.
    """

    cls: TripartiteClass
    ranks: tuple[int, int, int]
    w_ranks: Optional[tuple[int, int]] = None
    disc_degenerate: Optional[bool] = None
    boundary: bool = False


def _tensor(s: StateVector | np.ndarray) -> np.ndarray:
    if isinstance(s, StateVector):
        if s.n_qubits != 3:
            raise ValueError("expected a 3-qubit state")
        return s.tensor
    t = np.asarray(s, dtype=np.complex128)
    return t.reshape(2, 2, 2)


def w_blocks(s: StateVector | np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Qubit-1 slices: ``W1[j, k] = c_{0jk}`` and ``W2[j, k] = c_{1jk}``."""
    t = _tensor(s)
    return t[0].copy(), t[1].copy()


def partition_matrices(t: np.ndarray) -> np.ndarray:
    """The three 2x4 coefficient matrices of a ``(..., 2, 2, 2)`` tensor, stacked on axis -3."""
    lead = t.shape[:-3]
    c1 = t.reshape(lead + (2, 4))
    c2 = np.swapaxes(t, -3, -2).reshape(lead + (2, 4))
    c3 = np.moveaxis(t, -1, -3).reshape(lead + (2, 4))
    return np.stack([c1, c2, c3], axis=-3)


def _near(value: float, threshold: float) -> bool:
    return bool(threshold / BAND < value <= threshold * BAND)


def classify_tensor(t: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> TriReport:
    """:func:`classify3` on a raw ``(2, 2, 2)`` amplitude tensor (no normalization needed)."""
    s1, s2 = singular_values_2xN(partition_matrices(t))
    scale = float(np.max(s1))
    if scale == 0.0:
        raise ZeroState("zero three-qubit state")
    ratio = s2 / scale
    ranks = tuple(2 if r > tol.rank_rel else 1 for r in ratio)
    boundary = any(_near(float(r), tol.rank_rel) for r in ratio)
    ones = [k + 1 for k, r in enumerate(ranks) if r == 1]
    if len(ones) >= 2:
        # two rank-1 partitions force the third; only rounding can disagree
        return TriReport(TripartiteClass.P000, ranks, boundary=boundary or len(ones) == 2)
    if len(ones) == 1:
        return TriReport(TripartiteClass.zero_psi(ones[0]), ranks, boundary=boundary)

    W1, W2 = t[0], t[1]
    wr = (rank2x2(W1, scale, tol), rank2x2(W2, scale, tol))
    if wr == (1, 1):
        return TriReport(TripartiteClass.GHZ, ranks, wr, None, boundary)
    disc, s = pencil_discriminant(W1, W2)
    stat = float(abs(disc) / s**4) if s > 0 else 0.0
    boundary = boundary or _near(stat, tol.disc_rel)
    if 2 in wr:
        pivot, other = (W1, W2) if wr[0] == 2 else (W2, W1)
        degenerate = bool(spectrum_degenerate(pivot, other, tol))
    else:
        # a slice of rank 0 with all partitions rank 2 is a rounding artefact
        degenerate = stat <= tol.disc_rel
        boundary = True
    cls = TripartiteClass.W if degenerate else TripartiteClass.GHZ
    return TriReport(cls, ranks, wr, degenerate, bool(boundary))


def classify3(s: StateVector, tol: Tolerances = DEFAULT_TOL) -> TriReport:
    """Classify a three-qubit state into one of the six SLOCC classes.

    Parameters
    ----------
    s : StateVector
        Any nonzero 3-qubit state; normalization is not required.
    tol : Tolerances

    Returns
    -------
    TriReport

    Raises
    ------
    ZeroState
        If all amplitudes vanish.
    """
    return classify_tensor(_tensor(s), tol)


def hyperdet_oracle(s: StateVector | np.ndarray) -> float:
    """Modulus of Cayley's hyperdeterminant of the amplitude tensor.

    Used only as an independent cross-check: it is nonzero exactly on the
    GHZ class.  The state is taken as given (no normalization).
    """
    a = _tensor(s)
    a000, a001, a010, a011 = a[0, 0, 0], a[0, 0, 1], a[0, 1, 0], a[0, 1, 1]
    a100, a101, a110, a111 = a[1, 0, 0], a[1, 0, 1], a[1, 1, 0], a[1, 1, 1]
    det = (
        a000**2 * a111**2
        + a001**2 * a110**2
        + a010**2 * a101**2
        + a100**2 * a011**2
        - 2
        * (
            a000 * a001 * a110 * a111
            + a000 * a010 * a101 * a111
            + a000 * a100 * a011 * a111
            + a001 * a010 * a101 * a110
            + a001 * a100 * a011 * a110
            + a010 * a100 * a011 * a101
        )
        + 4 * (a000 * a011 * a101 * a110 + a001 * a010 * a100 * a111)
    )
    return float(abs(det))


# ----------------------------------------------------------------------------
# factorizations used by canonical-data extraction


def _rank_one_factors(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``M ~ outer(x, y)`` for a (numerically) rank-1 2xN matrix, with ``|y| = 1``."""
    d = svd_2xN(M)
    return d.sigma[0] * d.left[0], d.right[0].conj()


def factor_product(s: StateVector | np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Factor a product state as ``a (x) b (x) c`` with ``|b| = |c| = 1``."""
    t = _tensor(s)
    a, bc = _rank_one_factors(t.reshape(2, 4))
    b, c = _rank_one_factors(bc.reshape(2, 2))
    return a * np.linalg.norm(b), b / np.linalg.norm(b), c


def factor_zero_psi(s: StateVector | np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Split a ``0_k Psi`` state into the qubit-``k`` vector and a 2x2 two-qubit matrix.

    The matrix rows/columns follow the remaining qubits in ascending order and
    carry unit Frobenius norm; the qubit-``k`` vector carries the scale.
    """
    t = _tensor(s)
    x, rest = _rank_one_factors(np.moveaxis(t, k - 1, 0).reshape(2, 4))
    return x, rest.reshape(2, 2)


def ghz_decomposition(s: StateVector | np.ndarray, tol: Tolerances = DEFAULT_TOL):
    """Write a GHZ-class state as a sum of two product states.

    Returns
    -------
    list of two ``(a, b, c)`` triples with ``s = sum a (x) b (x) c``.

    Raises
    ------
    NotGenuine
        If the qubit-1 slice pencil has a repeated root (the state is not GHZ).
    """
    t = _tensor(s)
    W1, W2 = t[0], t[1]
    # det(mu W1 + nu W2) vanishes at the two slice combinations of rank 1
    roots = quad_roots(HomogeneousPoly([det2(W1), mixed_det2(W1, W2), det2(W2)]), tol, ref_scale=0.0)
    if roots.is_identically_zero or len(roots) != 2:
        raise NotGenuine("state is not in the GHZ class")
    y1, y2 = roots.roots
    out = []
    for ya, yb in ((y1, y2), (y2, y1)):
        u = np.array([yb[1], -yb[0]])  # annihilated by the other root
        M = (ya[0] * W1 + ya[1] * W2) / (ya[0] * u[0] + ya[1] * u[1])
        b, c = _rank_one_factors(M)
        nb = np.linalg.norm(b)
        out.append((u * nb, b / nb, c))
    return out
