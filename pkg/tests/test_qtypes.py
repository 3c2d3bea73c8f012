import itertools
import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from slocc4.errors import BadPartition, BadPermutation, StateFileError, ZeroState
from slocc4.qtypes import (
    ALL_CLASSES,
    DEGENERATE_CLASSES,
    GENUINE_CLASSES,
    CoefficientMatrix,
    Family,
    StateVector,
    StructuralClass,
    Tolerances,
    TripartiteClass,
    compose_permutations,
    inverse_reshape,
    normalize,
    parse_label,
    permute_qubits,
    reshape,
    state_from_json,
    state_to_json,
)

perms4 = st.permutations([1, 2, 3, 4])


def basis(label):
    return StateVector.from_basis([label])


def test_index_convention_qubit1_most_significant():
    s = basis("1000")
    assert s.amps[8] == 1 and np.count_nonzero(s.amps) == 1


class TestNormalize:
    def test_unit_unchanged(self):
        s = basis("0000")
        assert np.array_equal(normalize(s).amps, s.amps)

    def test_scaling(self):
        amps = np.zeros(16)
        amps[0] = 2
        assert np.allclose(normalize(StateVector(amps)).amps[0], 1)

    def test_uniform_sixteen(self):
        assert np.allclose(normalize(StateVector(np.ones(16))).amps, 0.25)

    def test_zero_raises(self):
        with pytest.raises(ZeroState):
            normalize(StateVector(np.zeros(8)))

    @given(st.integers(0, 2**31))
    def test_idempotent(self, seed):
        rng = np.random.default_rng(seed)
        s = normalize(StateVector(rng.normal(size=16) + 1j * rng.normal(size=16)))
        assert abs(s.norm - 1) < 1e-12
        assert np.allclose(normalize(s).amps, s.amps, atol=1e-12)


class TestStateVector:
    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            StateVector([np.nan] + [0] * 7)

    def test_rejects_bad_length(self):
        with pytest.raises(ValueError):
            StateVector([1] * 5)

    def test_rejects_other_qubit_counts(self):
        with pytest.raises(ValueError):
            StateVector([1] * 4)

    def test_immutable(self):
        s = basis("000")
        with pytest.raises(ValueError):
            s.amps[0] = 2


class TestReshape:
    def test_partition1_first_entry(self):
        C = reshape(basis("000"), 1)
        expected = np.zeros((2, 4))
        expected[0, 0] = 1
        assert np.array_equal(C.entries, expected)

    def test_partition2_layout(self):
        # qubit values (0, 0, 1): qubit-2 bit 0 selects row 0, the remaining
        # bits (qubit 1, qubit 3) = (0, 1) spell column 1
        C = reshape(basis("001"), 2)
        assert C.entries[0, 1] == 1
        # qubit values (1, 0, 1): row 0, column 3
        C = reshape(basis("101"), 2)
        assert C.entries[0, 3] == 1

    @pytest.mark.parametrize("n", [3, 4])
    def test_exhaustive_index_map(self, n):
        for q in range(1, n + 1):
            for idx in range(2**n):
                bits = format(idx, f"0{n}b")
                C = reshape(basis(bits), q)
                rest = bits[: q - 1] + bits[q:]
                assert C.entries[int(bits[q - 1]), int(rest, 2)] == 1
                assert np.count_nonzero(C.entries) == 1

    @pytest.mark.parametrize("n", [3, 4])
    def test_round_trip_exact(self, n):
        rng = np.random.default_rng(n)
        s = StateVector(rng.normal(size=2**n) + 1j * rng.normal(size=2**n))
        for q in range(1, n + 1):
            assert np.array_equal(inverse_reshape(reshape(s, q)).amps, s.amps)

    def test_bad_partition(self):
        with pytest.raises(BadPartition):
            reshape(basis("000"), 4)
        with pytest.raises(BadPartition):
            reshape(basis("0000"), 0)


class TestPermute:
    def test_identity(self):
        s = StateVector(np.arange(16) + 1.0)
        assert permute_qubits(s, (1, 2, 3, 4)) == s

    def test_swap34(self):
        assert permute_qubits(basis("0001"), (1, 2, 4, 3)) == basis("0010")

    def test_swap12_involution(self):
        s = StateVector(np.arange(16) + 1.0)
        assert permute_qubits(permute_qubits(s, (2, 1, 3, 4)), (2, 1, 3, 4)) == s

    def test_convention_moves_qubit_i_to_pi_i(self):
        # qubit 1 carries the 1; after pi(1) = 3 it sits on qubit 3
        assert permute_qubits(basis("1000"), (3, 1, 2, 4)) == basis("0010")

    @given(perms4, perms4)
    def test_composition(self, p1, p2):
        s = StateVector(np.arange(16) + 1j * np.arange(16)[::-1])
        lhs = permute_qubits(permute_qubits(s, p1), p2)
        rhs = permute_qubits(s, compose_permutations(p2, p1))
        assert lhs == rhs

    def test_bad_perm(self):
        with pytest.raises(BadPermutation):
            permute_qubits(basis("0000"), (1, 1, 2, 3))


class TestJson:
    def test_round_trip(self):
        s = StateVector(np.arange(16) * (1 + 0.5j))
        assert state_from_json(json.dumps(state_to_json(s))) == s

    def test_wrong_count_names_expected(self):
        with pytest.raises(StateFileError, match="16"):
            state_from_json({"n_qubits": 4, "amplitudes": [[0, 0]] * 15})

    @pytest.mark.parametrize(
        "doc",
        [
            "not json",
            "[]",
            {"n_qubits": 5, "amplitudes": []},
            {"n_qubits": 3, "amplitudes": [[0, 0]] * 7 + [[1]]},
            {"n_qubits": 3, "amplitudes": [[0, 0]] * 7 + [["a", 0]]},
            {"n_qubits": True, "amplitudes": []},
        ],
    )
    def test_malformed(self, doc):
        with pytest.raises(StateFileError):
            state_from_json(doc if isinstance(doc, str) else json.dumps(doc))


class TestTolerances:
    def test_defaults(self):
        t = Tolerances()
        assert (t.rank_rel, t.disc_rel, t.root_cluster, t.cond_max) == (1e-9, 1e-8, 1e-7, 1e2)

    @pytest.mark.parametrize("kw", [{"rank_rel": 0}, {"disc_rel": -1}, {"rank_rel": 1.0}, {"cond_max": float("nan")}])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            Tolerances(**kw)


class TestLabels:
    def test_counts(self):
        assert len(DEGENERATE_CLASSES) == 18
        assert len(GENUINE_CLASSES) == 16
        assert len(set(ALL_CLASSES)) == 34
        assert len({c.family for c in GENUINE_CLASSES}) == 8

    def test_tripartite_order(self):
        T = TripartiteClass
        assert T.P000.level < T.Zero1Psi23.level < T.GHZ.level == T.W.level

    def test_names_parse_back(self):
        for c in ALL_CLASSES:
            assert parse_label(c.name) == c
            assert parse_label(c.name.lower()) == c

    def test_aliases(self):
        assert parse_label("GHZ").family is Family.W000_000
        assert parse_label("W").family is Family.W000_W
        assert parse_label("Phi4").family is Family.W0kPsi_0kPsi

    def test_unknown(self):
        with pytest.raises(KeyError):
            parse_label("GHZ5")

    def test_psipsi_carries_pairs(self):
        c = parse_label("Psi13Psi24")
        assert c.deco == (1, 3) and c.name == "Psi13Psi24"

    @given(perms4)
    def test_degenerate_action_is_a_group_action(self, p):
        q = (2, 3, 1, 4)
        for c in DEGENERATE_CLASSES:
            assert c.permuted(q).permuted(p) == c.permuted(compose_permutations(p, q))
            assert c.permuted(p).family is c.family

    def test_genuine_action_needs_qubit1_fixed(self):
        c = StructuralClass(Family.W000_0kPsi, (1,))
        assert c.permuted((1, 3, 2, 4)).deco == (2,)
        with pytest.raises(ValueError):
            c.permuted((2, 1, 3, 4))

    def test_decoration_checks(self):
        with pytest.raises(ValueError):
            StructuralClass(Family.D0GHZ, ())
        with pytest.raises(ValueError):
            StructuralClass(Family.W0iPsi_0jPsi, (2, 2))

    def test_tripartite_permutation(self):
        T = TripartiteClass
        assert T.Zero1Psi23.permuted((2, 1, 3)) is T.Zero2Psi13
        for c in (T.P000, T.GHZ, T.W):
            assert c.permuted((3, 1, 2)) is c

    def test_coefficient_matrix_shape(self):
        C = reshape(basis("0000"), 3)
        assert isinstance(C, CoefficientMatrix) and C.shape == (2, 8) and C.partition_qubit == 3
