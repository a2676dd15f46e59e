import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from scipy.stats import chisquare

from afforest import kernels
from afforest.digraph import OrgStructure, build_org_structure
from afforest.errors import EnumerationCapExceeded, ForestMismatch
from afforest.forests import (
    COUNT_SATURATION,
    MaximalSpanningForest,
    count_maximal_forests,
    enumerate_maximal_forests,
    enumerated_parents,
    forest_components,
    is_saturated,
    random_words,
    sample_maximal_forest,
    sample_maximal_forests,
    sampled_parents,
    subtree,
)
from afforest.generators import random_dag

from conftest import labels
from oracles import forests_by_subset_filter
from test_digraph import dags


def parents_by_label(f):
    return f.to_json()["parents"]


def lab(g, mask):
    return set(g.labels_of(mask))


class TestCount:
    def test_examples(self, fig1, fixb_graph):
        assert count_maximal_forests(fig1) == 2
        assert count_maximal_forests(build_org_structure(["a"], [])) == 1
        assert count_maximal_forests(fixb_graph) == 6

    def test_big_count_is_exact_and_flagged(self):
        # 70 sinks with two parents each
        n = 140
        arcs = [(i, j) for i in range(70) for j in range(70, 140) if j - 70 in (i, (i + 1) % 70)]
        g = OrgStructure(labels(n), arcs)
        assert count_maximal_forests(g) == 2**70
        assert not is_saturated(2**70)
        assert is_saturated(COUNT_SATURATION + 1)
        with pytest.raises(EnumerationCapExceeded) as exc:
            next(enumerate_maximal_forests(g))
        assert "--mc" in str(exc.value)


class TestEnumerate:
    def test_figure1(self, fig1):
        got = [parents_by_label(f) for f in enumerate_maximal_forests(fig1)]
        assert got == [{"2": "1", "3": "1", "4": "2"}, {"2": "5", "3": "1", "4": "2"}]

    def test_six_forest_family(self, fixb_graph):
        got = [parents_by_label(f) for f in enumerate_maximal_forests(fixb_graph)]
        expect = [{"2": "4", "3": j, "4": i} for j in ("1", "2", "4") for i in ("1", "5")]
        assert got == expect

    def test_path(self):
        g = build_org_structure(list("abc"), [("a", "b"), ("b", "c")])
        (f,) = enumerate_maximal_forests(g)
        assert f.arcs == g.arcs

    def test_cap(self, fixb_graph):
        with pytest.raises(EnumerationCapExceeded):
            list(enumerate_maximal_forests(fixb_graph, cap=5))
        assert len(list(enumerate_maximal_forests(fixb_graph, cap=None))) == 6

    @settings(max_examples=80, deadline=None)
    @given(dags(max_n=7))
    def test_agrees_with_subset_filter(self, g):
        if len(g.arcs) > 14:
            g = OrgStructure(g.labels, g.arcs[:14])
        ours = sorted(f.arcs for f in enumerate_maximal_forests(g))
        brute = sorted(forests_by_subset_filter(g.n, g.arcs))
        assert ours == brute
        assert len(ours) == count_maximal_forests(g) == len(set(ours))

    @settings(max_examples=60, deadline=None)
    @given(dags(max_n=8))
    def test_forest_invariants(self, g):
        src = g.sources()
        for f in enumerate_maximal_forests(g, cap=2000):
            h = nx.DiGraph()
            h.add_nodes_from(range(g.n))
            h.add_edges_from(f.arcs)
            assert nx.is_branching(h)
            assert f.roots() == src
            comps = f.components()
            assert len(comps) == bin(src).count("1")
            assert sum(comps) == g.full_mask
            # maximality: every other arc would give its head a second parent
            for i, j in g.arcs:
                if (i, j) not in f.arcs:
                    assert f.parents[j] >= 0

    def test_bit_reproducible(self, fixb_graph):
        a = enumerated_parents(fixb_graph, 0, 6)
        b = enumerated_parents(fixb_graph, 0, 6)
        assert np.array_equal(a, b)
        assert np.array_equal(enumerated_parents(fixb_graph, 2, 5), a[2:5])


class TestSubtrees:
    def test_figure1(self, fig1):
        f1, f2 = enumerate_maximal_forests(fig1)
        assert lab(fig1, subtree(f1, "1")) == {"1", "2", "3", "4"}
        assert lab(fig1, subtree(f2, "5")) == {"5", "2", "4"}
        assert lab(fig1, subtree(f1, "4")) == {"4"}
        assert [lab(fig1, c) for c in forest_components(f1)] == [{"1", "2", "3", "4"}, {"5"}]
        assert [lab(fig1, c) for c in forest_components(f2)] == [{"1", "3"}, {"5", "2", "4"}]

    def test_single_node(self):
        g = build_org_structure(["a"], [])
        (f,) = enumerate_maximal_forests(g)
        assert forest_components(f) == [1]

    def test_forest_validation(self, fig1):
        with pytest.raises(ForestMismatch):
            MaximalSpanningForest(fig1, (-1, 2, 0, 1, -1))
        with pytest.raises(ForestMismatch):
            MaximalSpanningForest(fig1, (1, 0, 0, 1, -1))
        f = MaximalSpanningForest.from_labels(fig1, {"2": "5", "3": "1", "4": "2"})
        assert f.parents == (-1, 4, 0, 1, -1)
        assert '"5" -> "2"' in f.to_dot()


class TestSampling:
    def test_figure1_frequency(self, fig1):
        hits = sum(f.parents[1] == 0 for f in sample_maximal_forests(fig1, seed=1, k=10_000))
        assert abs(hits / 10_000 - 0.5) <= 0.015

    def test_path_always_same(self):
        g = build_org_structure(list("abc"), [("a", "b"), ("b", "c")])
        for seed in range(5):
            assert sample_maximal_forest(g, seed).arcs == g.arcs

    def test_six_forests_uniform(self, fixb_graph):
        k = 60_000
        rows = sampled_parents(fixb_graph, 7, 0, k)
        keys, counts = np.unique(rows, axis=0, return_counts=True)
        assert len(keys) == 6
        sigma = math.sqrt(k * (1 / 6) * (5 / 6))
        assert np.all(np.abs(counts - k / 6) <= 3 * sigma)

    @pytest.mark.parametrize("seed", [0, 3])
    def test_chi_square(self, seed):
        rng = np.random.default_rng(seed)
        while True:
            g = random_dag(rng, 6, 0.5)
            c = count_maximal_forests(g)
            if 6 <= c <= 24:
                break
        k = 100_000
        rows = sampled_parents(g, seed, 0, k)
        all_rows = enumerated_parents(g, 0, c)
        index = {tuple(r): t for t, r in enumerate(all_rows)}
        obs = np.bincount([index[tuple(r)] for r in rows], minlength=c)
        assert chisquare(obs).pvalue > 0.001

    def test_counter_based_stream(self, fixb_graph):
        whole = sampled_parents(fixb_graph, 11, 0, 50)
        for s in (0, 17, 49):
            assert sample_maximal_forest(fixb_graph, 11, s).parents == tuple(whole[s])
        assert np.array_equal(sampled_parents(fixb_graph, 11, 20, 30), whole[20:30])
        assert np.array_equal(random_words(11, 8, 3, 5), random_words(11, 8, 0, 5)[3:])

    def test_seed_changes_stream(self, fixb_graph):
        assert not np.array_equal(sampled_parents(fixb_graph, 1, 0, 50), sampled_parents(fixb_graph, 2, 0, 50))


@pytest.mark.skipif(len(kernels.available_backends()) < 2, reason="compiled extension not built")
class TestBackendParity:
    def test_enumeration_and_sampling(self, rng):
        for _ in range(30):
            g = random_dag(rng, int(rng.integers(2, 10)), 0.5)
            c = min(count_maximal_forests(g), 5000)
            out = {}
            before = kernels.backend()
            for name in ("python", "cython"):
                kernels.use_backend(name)
                out[name] = (enumerated_parents(g, 0, c), sampled_parents(g, 9, 100, 700))
            kernels.use_backend(before)
            assert np.array_equal(out["python"][0], out["cython"][0])
            assert np.array_equal(out["python"][1], out["cython"][1])
