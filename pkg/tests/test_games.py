import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from afforest.errors import CoalitionOutOfRange, MissingTableEntry, NodeSetMismatch, TooLarge, WrongNodeSet
from afforest.games import (
    AdditiveGame,
    AttachmentGame,
    SymmetricGame,
    TableGame,
    check_convex,
    check_superadditive,
    example_convexity_game,
    is_dummy_in_game,
    linear_combination,
    popcounts,
)
from afforest.generators import random_convex_game, random_superadditive_game, random_table_game

from conftest import LABELS5
from oracles import convex_brute, superadditive_brute


def m(*idx):
    return sum(1 << i for i in idx)


def lm(*labels):
    # labels "1".."5" sit at index label - 1
    return m(*(int(x) - 1 for x in labels))


def tables(n_max=6):
    return st.integers(1, n_max).flatmap(
        lambda n: st.lists(st.integers(-6, 12), min_size=(1 << n) - 1, max_size=(1 << n) - 1)
        .map(lambda xs: TableGame.from_dense([0.0] + [float(x) for x in xs])))


class TestEvaluate:
    def test_attachment(self):
        v = AttachmentGame(5)
        assert v(m(0, 1, 2, 3)) == 3 and v(0) == 0 and v(m(2)) == 0

    def test_empty_coalition_is_zero_for_every_kind(self):
        for v in (AttachmentGame(3), AdditiveGame([1, 2, 3]), SymmetricGame([0, 1, 4, 9]),
                  TableGame(3, {m(0): 2.0})):
            assert v(0) == 0

    def test_out_of_range(self):
        with pytest.raises(CoalitionOutOfRange):
            AttachmentGame(3).worth(8)
        with pytest.raises(CoalitionOutOfRange):
            AdditiveGame([1.0]).worth(-1)

    def test_additive_identity(self):
        w = [0.5, -1.25, 3.0, 7.0]
        v = AdditiveGame(w)
        for s in range(16):
            assert v(s) == sum(w[i] for i in range(4) if s >> i & 1)

    def test_symmetric(self):
        v = SymmetricGame([0, 1, 4, 9])
        assert v(m(0, 2)) == 4
        with pytest.raises(ValueError):
            SymmetricGame([1, 2])

    def test_sparse_and_strict_tables(self):
        v = TableGame(3, {m(0, 1): 2.0})
        assert v(m(0, 1)) == 2.0 and v(m(2)) == 0.0 and v.defaulted == 6
        strict = TableGame(3, {m(0, 1): 2.0}, strict=True)
        with pytest.raises(MissingTableEntry):
            strict(m(2))

    def test_dense_matches_worth(self):
        for v in (AttachmentGame(4), AdditiveGame([1, 2, 3, 4]), SymmetricGame([0, 1, 3, 6, 10])):
            table = v.dense()
            assert all(table[s] == v(s) for s in range(16))


class TestExampleConvexityGame:
    def test_values(self):
        v = example_convexity_game(LABELS5)
        assert v(lm("3", "5")) == 5
        assert v(lm("2", "3")) == 7
        assert v(lm("4", "2", "3")) == 12
        assert v(lm("5", "4", "2", "3")) == 21
        assert all(v(lm(x)) == 0 for x in LABELS5)
        assert v(lm("1", "2", "4")) == 0

    def test_marginal_arithmetic(self):
        v = example_convexity_game(LABELS5)
        # MC_5({4,2}) = 12 > 9 = MC_5({4,2,3})
        assert v(lm("4", "2", "5")) - v(lm("4", "2")) == 12
        assert v(lm("4", "2", "3", "5")) - v(lm("4", "2", "3")) == 9

    def test_label_positions(self):
        v = example_convexity_game(["5", "4", "3", "2", "1"])
        assert v(m(0, 2)) == 5  # labels 5 and 3

    def test_wrong_nodes(self):
        with pytest.raises(WrongNodeSet):
            example_convexity_game(["1", "2", "3", "4", "6"])


class TestCertificates:
    @pytest.mark.parametrize("n", range(1, 11))
    def test_attachment_superadditive(self, n):
        assert check_superadditive(AttachmentGame(n)).holds

    def test_additive(self):
        v = AdditiveGame([1.0, -2.0, 3.0])
        assert check_superadditive(v).holds and check_convex(v).holds

    def test_superadditive_counterexample(self):
        v = TableGame(2, {m(0): 1.0, m(1): 1.0, m(0, 1): 1.5})
        cert = check_superadditive(v)
        assert cert.verdict == "fails"
        q, s = cert.counterexample
        assert {q, s} == {m(0), m(1)}
        assert v(q | s) < v(q) + v(s)

    def test_example_game_not_convex(self):
        v = example_convexity_game(LABELS5)
        cert = check_convex(v)
        assert cert.verdict == "fails"
        a, b = cert.counterexample
        assert v(a | b) + v(a & b) < v(a) + v(b)
        assert cert.node is not None and a >> cert.node & 1 and not b >> cert.node & 1
        assert check_superadditive(v).holds

    def test_attachment_convex(self):
        assert check_convex(AttachmentGame(6)).holds

    def test_too_large(self):
        v = AttachmentGame(21)
        with pytest.raises(TooLarge):
            check_superadditive(v)
        assert check_convex(v, allow_unverified=True).verdict == "unverified"

    @settings(max_examples=80, deadline=None)
    @given(tables(5))
    def test_superadditive_matches_brute_force(self, v):
        cert = check_superadditive(v)
        assert cert.holds == superadditive_brute(v.dense(), v.n, v.tolerance())
        if not cert.holds:
            q, s = cert.counterexample
            assert q & s == 0 and v(q | s) < v(q) + v(s)

    @settings(max_examples=80, deadline=None)
    @given(tables(5))
    def test_pairwise_convexity_equals_definition(self, v):
        assert check_convex(v).holds == convex_brute(v.dense(), v.n, v.tolerance())

    def test_convex_implies_superadditive(self, rng):
        hits = 0
        for _ in range(300):
            n = int(rng.integers(1, 6))
            v = TableGame.from_dense(np.concatenate([[0.0], rng.integers(-2, 6, (1 << n) - 1).astype(float)]))
            if check_convex(v).holds:
                hits += 1
                assert check_superadditive(v).holds
        for _ in range(30):
            v = random_convex_game(rng, int(rng.integers(2, 7)))
            assert check_convex(v).holds and check_superadditive(v).holds
        assert hits > 0

    def test_generators(self, rng):
        for _ in range(20):
            n = int(rng.integers(2, 7))
            v = random_superadditive_game(rng, n)
            assert superadditive_brute(v.dense(), n)
            assert check_superadditive(v).holds
            assert convex_brute(random_convex_game(rng, n).dense(), n)


class TestDummy:
    def test_examples(self):
        v = AdditiveGame([1, 2, 3])
        assert all(is_dummy_in_game(v, i) for i in range(3))
        assert not is_dummy_in_game(AttachmentGame(3), 0)
        assert not is_dummy_in_game(example_convexity_game(LABELS5), 0)


class TestLinearCombination:
    def test_examples(self, rng):
        v = random_table_game(rng, 4)
        w = random_table_game(rng, 4)
        same = linear_combination(1, v, 0, w)
        assert np.array_equal(same.dense(), v.dense())
        assert not linear_combination(0, v, 0, w).dense().any()
        assert linear_combination(2, AttachmentGame(3), 0, AttachmentGame(3))(m(0, 1)) == 2

    def test_mismatch(self):
        with pytest.raises(NodeSetMismatch):
            linear_combination(1, AttachmentGame(3), 1, AttachmentGame(4))

    def test_pointwise_n10(self, rng):
        v = random_table_game(rng, 10)
        w = SymmetricGame(np.arange(11.0) ** 2)
        c = linear_combination(0.5, v, -3.0, w)
        expect = 0.5 * v.dense() - 3.0 * popcounts(10) ** 2
        assert np.allclose(c.dense(), expect, rtol=0, atol=1e-12)
