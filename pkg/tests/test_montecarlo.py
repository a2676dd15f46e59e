import numpy as np
import pytest

from afforest import kernels
from afforest.digraph import build_org_structure
from afforest.errors import InvalidPlan
from afforest.games import AdditiveGame, AttachmentGame
from afforest.generators import random_dag, random_table_game
from afforest.measures import OrganisationalSituation, af_exact
from afforest.montecarlo import EstimationPlan, af_estimate, probably_dummy, required_sample_size

EXACT_A = np.array([1.5, 1, 0, 0, 0.5])


class TestPlan:
    @pytest.mark.parametrize("plan", [
        EstimationPlan(k=1),
        EstimationPlan(alpha=0),
        EstimationPlan(alpha=1.5),
        EstimationPlan(mode="target_precision"),
        EstimationPlan(mode="target_precision", epsilon=0.1, pilot_k=10),
        EstimationPlan(mode="bogus"),
        EstimationPlan(seed=-1),
    ])
    def test_invalid(self, plan, fixture_a):
        with pytest.raises(InvalidPlan):
            af_estimate(fixture_a, plan)

    def test_required_sample_size(self):
        assert required_sample_size([0.0, 0.0], 0.1, 0.05, pilot_k=200) == 200
        assert required_sample_size([1.0, 0.3], 0.1, 0.05) == 385
        assert required_sample_size([2.0], 0.1, 0.05) == 1537

    def test_target_precision(self, fixture_b):
        rep = af_estimate(fixture_b, EstimationPlan("target_precision", seed=3, epsilon=0.2))
        assert rep.samples >= 200 and rep.plan["approximate"]
        z = 1.959963984540054
        # the pilot-based plan lands near the requested half-width
        assert np.max(z * rep.std_error) < 0.2 * 1.3


class TestEstimate:
    def test_fixture_a_within_4se(self, fixture_a):
        for seed in range(5):
            rep = af_estimate(fixture_a, EstimationPlan(k=2000, seed=seed))
            assert np.all(np.abs(rep.af - EXACT_A) <= 4 * rep.std_error + 1e-12)
            assert rep.method == "monte_carlo" and rep.samples == 2000 and rep.seed == seed
            assert rep.productivity == pytest.approx(rep.af.sum(), abs=0)

    def test_unique_forest_zero_variance(self):
        g = build_org_structure(list("abcd"), [("a", "b"), ("b", "c"), ("c", "d")])
        sit = OrganisationalSituation(g, AttachmentGame(4))
        rep = af_estimate(sit, EstimationPlan(k=10, seed=1))
        assert np.array_equal(rep.af, af_exact(sit).af) and not rep.std_error.any()

    def test_fixture_b_within_5se(self, fixture_b):
        rep = af_estimate(fixture_b, EstimationPlan(k=50_000, seed=8))
        exact = af_exact(fixture_b).af
        assert np.all(np.abs(rep.af - exact) <= 5 * rep.std_error + 1e-12)

    def test_unbiased(self, fixture_a):
        est = np.array([af_estimate(fixture_a, EstimationPlan(k=500, seed=s)).af[0] for s in range(200)])
        se_mean = est.std(ddof=1) / np.sqrt(len(est))
        assert abs(est.mean() - 1.5) <= 4 * se_mean

    def test_standard_errors_shrink(self, fixture_b):
        a = af_estimate(fixture_b, EstimationPlan(k=5000, seed=2)).std_error
        b = af_estimate(fixture_b, EstimationPlan(k=20_000, seed=2)).std_error
        moving = a > 0
        ratio = b[moving] / a[moving]
        assert np.all(np.abs(ratio - 0.5) <= 0.1)

    def test_reproducible_across_workers(self, rng):
        g = random_dag(rng, 9, 0.5)
        sit = OrganisationalSituation(g, random_table_game(rng, 9))
        plan = EstimationPlan(k=30_000, seed=42)
        ref = af_estimate(sit, plan, workers=1)
        for w in (2, 3, 8):
            rep = af_estimate(sit, plan, workers=w)
            assert rep.af.tobytes() == ref.af.tobytes()
            assert rep.std_error.tobytes() == ref.std_error.tobytes()

    @pytest.mark.skipif(len(kernels.available_backends()) < 2, reason="compiled extension not built")
    def test_backends_bit_identical(self, fixture_b):
        before = kernels.backend()
        out = []
        for name in ("python", "cython"):
            kernels.use_backend(name)
            out.append(af_estimate(fixture_b, EstimationPlan(k=9000, seed=5)))
        kernels.use_backend(before)
        assert out[0].af.tobytes() == out[1].af.tobytes()
        assert out[0].std_error.tobytes() == out[1].std_error.tobytes()

    def test_confidence_intervals(self, fixture_a):
        rep = af_estimate(fixture_a, EstimationPlan(k=1000, seed=0, alpha=0.1))
        ci = rep.confidence_intervals()
        assert ci.shape == (5, 2) and np.all(ci[:, 0] <= rep.af) and np.all(rep.af <= ci[:, 1])
        assert af_exact(fixture_a).confidence_intervals() is None


class TestProbablyDummy:
    def test_fixture_a(self, fixture_a):
        res = probably_dummy(fixture_a, "1", EstimationPlan(k=100, seed=0))
        assert res.verdict == "not_dummy"
        assert res.witness.to_json()["parents"]["2"] == "1"  # the forest F1
        assert probably_dummy(fixture_a, "3", EstimationPlan(k=100, seed=0)).verdict == "dummy_consistent"

    def test_additive(self, fixb_graph):
        sit = OrganisationalSituation(fixb_graph, AdditiveGame([1, 2, 3, 4, 5]))
        for i in range(5):
            assert probably_dummy(sit, i, EstimationPlan(k=50, seed=i)).verdict == "dummy_consistent"
