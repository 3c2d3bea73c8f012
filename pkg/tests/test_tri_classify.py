import itertools

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from oracles import cayley_hyperdet
from slocc4.errors import NotGenuine, ZeroState
from slocc4.orbits import apply, haar_random_state, random_local_op
from slocc4.qtypes import StateVector, TripartiteClass as T, normalize, permute_qubits
from slocc4.tri_classify import (
    classify3,
    factor_product,
    factor_zero_psi,
    ghz_decomposition,
    hyperdet_oracle,
    partition_matrices,
    w_blocks,
)

GHZ = normalize(StateVector.from_basis(["000", "111"]))
W = normalize(StateVector.from_basis(["001", "010", "100"]))
BELL = np.array([1, 0, 0, 1]) / np.sqrt(2)
E0 = np.array([1, 0])

CANON = {
    T.P000: StateVector.from_basis(["000"]),
    T.Zero1Psi23: StateVector(np.kron(E0, BELL)),
    T.Zero2Psi13: permute_qubits(StateVector(np.kron(E0, BELL)), (2, 1, 3)),
    T.Zero3Psi12: permute_qubits(StateVector(np.kron(E0, BELL)), (3, 2, 1)),
    T.GHZ: GHZ,
    T.W: W,
}


class TestWBlocks:
    def test_ghz(self):
        W1, W2 = w_blocks(GHZ)
        r = 1 / np.sqrt(2)
        assert np.allclose(W1, [[r, 0], [0, 0]]) and np.allclose(W2, [[0, 0], [0, r]])

    def test_w(self):
        W1, W2 = w_blocks(W)
        r = 1 / np.sqrt(3)
        assert np.allclose(W1, [[0, r], [r, 0]]) and np.allclose(W2, [[r, 0], [0, 0]])

    def test_product(self):
        W1, W2 = w_blocks(StateVector.from_basis(["000"]))
        assert np.allclose(W1, [[1, 0], [0, 0]]) and not W2.any()


class TestClassify3:
    def test_examples(self):
        assert classify3(GHZ).cls is T.GHZ
        assert classify3(W).cls is T.W
        assert classify3(CANON[T.Zero1Psi23]).cls is T.Zero1Psi23
        assert classify3(StateVector.from_basis(["010"])).cls is T.P000

    def test_all_canonical(self):
        for cls, s in CANON.items():
            rep = classify3(s)
            assert rep.cls is cls and not rep.boundary

    def test_report_fields(self):
        rep = classify3(W)
        assert rep.ranks == (2, 2, 2) and rep.w_ranks == (2, 1) and rep.disc_degenerate is True

    def test_zero(self):
        with pytest.raises(ZeroState):
            classify3(StateVector(np.zeros(8)))

    def test_rank_one_slices_are_ghz(self):
        # both slices rank 1 but the state is not a product: GHZ directly
        rep = classify3(StateVector.from_basis(["000", "111"]))
        assert rep.w_ranks == (1, 1) and rep.disc_degenerate is None

    def test_nonnormalized_input(self):
        assert classify3(StateVector(7 * W.amps)).cls is T.W

    @pytest.mark.parametrize("cls", list(CANON))
    def test_slocc_invariance(self, cls):
        for seed in range(300):
            op = random_local_op(3, 100, seed=seed)
            rep = classify3(apply(op, CANON[cls]))
            assert rep.cls is cls, seed

    @given(st.permutations([1, 2, 3]), st.sampled_from(list(CANON)))
    def test_permutation_covariance(self, perm, cls):
        assert classify3(permute_qubits(CANON[cls], perm)).cls is cls.permuted(perm)

    def test_ranks_match_minor_test(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            cls = list(CANON)[rng.integers(6)]
            s = apply(random_local_op(3, 10, seed=int(rng.integers(1 << 30))), CANON[cls])
            rep = classify3(s)
            for M, r in zip(partition_matrices(s.tensor), rep.ranks):
                minors = [M[0, i] * M[1, j] - M[0, j] * M[1, i] for i, j in itertools.combinations(range(4), 2)]
                assert (max(map(abs, minors)) > 1e-9 * np.linalg.norm(M) ** 2) == (r == 2)


class TestCaseFivePointTwo:
    """One slice of rank 1: the spectrum of Wa^-1 Wb is {0, tr}; non-degenerate iff tr != 0."""

    def test_equivalence(self):
        rng = np.random.default_rng(11)
        for _ in range(300):
            Wa = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            x = rng.normal(size=2) + 1j * rng.normal(size=2)
            y = rng.normal(size=2) + 1j * rng.normal(size=2)
            if rng.random() < 0.5:
                z = np.linalg.solve(Wa, x)
                y = np.array([z[1], -z[0]])  # forces tr(Wa^-1 x y^T) = 0
            Wb = np.outer(x, y)
            tr = np.trace(np.linalg.solve(Wa, Wb))
            s = StateVector(np.stack([Wa, Wb]).reshape(-1))
            rep = classify3(s)
            assert rep.cls is (T.GHZ if abs(tr) > 1e-6 else T.W)


class TestHyperdet:
    def test_examples(self):
        assert hyperdet_oracle(GHZ) == pytest.approx(0.25)
        assert hyperdet_oracle(W) == pytest.approx(0, abs=1e-15)
        rng = np.random.default_rng(1)
        a, b, c = (rng.normal(size=2) + 1j * rng.normal(size=2) for _ in range(3))
        assert hyperdet_oracle(np.kron(a, np.kron(b, c))) == pytest.approx(0, abs=1e-12)

    def test_closed_form_matches_symbolic_expansion(self):
        # the 2x2x2 hyperdeterminant equals the discriminant of det(x A + y B)
        syms = sympy.symbols("a0:8")
        A = sympy.Matrix(2, 2, syms[:4])
        B = sympy.Matrix(2, 2, syms[4:])
        x, y = sympy.symbols("x y")
        q = sympy.Poly(sympy.expand((x * A + y * B).det()), x, y)
        a, b, c = (q.coeff_monomial(m) for m in (x**2, x * y, y**2))
        disc = sympy.expand(b**2 - 4 * a * c)
        f = sympy.lambdify(syms, disc)
        rng = np.random.default_rng(5)
        for _ in range(50):
            v = rng.normal(size=8) + 1j * rng.normal(size=8)
            assert abs(f(*v)) == pytest.approx(hyperdet_oracle(v), rel=1e-10)
            assert abs(cayley_hyperdet(v)) == pytest.approx(hyperdet_oracle(v), rel=1e-10)

    def test_agreement_small_batch(self):
        for seed in range(500):
            s = haar_random_state(3, seed)
            rep = classify3(s)
            assert (rep.cls is T.GHZ) == (hyperdet_oracle(s) > 1e-8) or rep.boundary


class TestFactorizations:
    def test_factor_product(self):
        rng = np.random.default_rng(2)
        a, b, c = (rng.normal(size=2) + 1j * rng.normal(size=2) for _ in range(3))
        x, y, z = factor_product(np.kron(a, np.kron(b, c)))
        assert np.allclose(np.kron(x, np.kron(y, z)), np.kron(a, np.kron(b, c)))

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_factor_zero_psi(self, k):
        s = CANON[T.zero_psi(k)]
        x, M = factor_zero_psi(s, k)
        t = np.multiply.outer(x, M)
        t = np.moveaxis(t, 0, k - 1)
        assert np.allclose(t.reshape(-1), s.amps)

    @settings(max_examples=50)
    @given(st.integers(0, 2**31))
    def test_ghz_decomposition(self, seed):
        s = apply(random_local_op(3, 30, seed=seed), GHZ)
        terms = ghz_decomposition(s)
        rec = sum(np.kron(a, np.kron(b, c)) for a, b, c in terms)
        assert np.allclose(rec, s.amps, atol=1e-10)

    def test_ghz_decomposition_rejects_w(self):
        with pytest.raises(NotGenuine):
            ghz_decomposition(W)
