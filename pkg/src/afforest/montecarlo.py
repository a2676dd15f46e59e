"""Monte Carlo estimation of the AF measure.

Samples are numbered ``0..k-1`` and split into fixed-size chunks that depend
only on the structure, never on the worker count.  Each chunk reports its
column sums and centred second moments; chunks are merged in index order, so
a given ``(seed, k)`` always yields the same bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

from . import kernels
from .errors import InvalidPlan
from .forests import MaximalSpanningForest, count_maximal_forests, kernel_tables, sample_maximal_forest, sampled_parents
from .measures import AFReport, OrganisationalSituation, map_chunks


@dataclass(frozen=True)
class EstimationPlan:
    """How many forests to sample.

    ``fixed_k`` draws exactly ``k`` forests.  ``target_precision`` first draws
    ``pilot_k`` forests, then sizes the run so every node's confidence
    half-width is about ``epsilon`` at level ``1 - alpha`` (a CLT plan, not a
    guarantee).
    """

    mode: str = "fixed_k"
    k: int = 10_000
    seed: int = 0
    epsilon: float | None = None
    alpha: float = 0.05
    pilot_k: int = 200

    def validate(self) -> "EstimationPlan":
        if self.mode not in ("fixed_k", "target_precision"):
            raise InvalidPlan(f"unknown plan mode {self.mode!r}")
        if not 0 < self.alpha < 1:
            raise InvalidPlan("alpha must lie strictly between 0 and 1")
        if not 0 <= self.seed < 2**64:
            raise InvalidPlan("seed must be an unsigned 64-bit integer")
        if self.mode == "fixed_k" and self.k < 2:
            raise InvalidPlan("at least two samples are needed")
        if self.mode == "target_precision":
            if self.epsilon is None or not self.epsilon > 0:
                raise InvalidPlan("target precision needs epsilon > 0")
            if self.pilot_k < 30:
                raise InvalidPlan("the pilot sample needs at least 30 forests")
        return self


def required_sample_size(pilot_std, epsilon: float, alpha: float, pilot_k: int = 200) -> int:
    """Samples needed for a normal-approximation half-width of ``epsilon``.

    Uses the largest per-node standard deviation of the pilot; an all-zero
    pilot has nothing left to estimate and keeps ``pilot_k``.
    """
    worst = float(np.max(pilot_std)) if np.size(pilot_std) else 0.0
    if not math.isfinite(worst):
        raise InvalidPlan("pilot standard deviations must be finite")
    if worst == 0.0:
        return pilot_k
    z = NormalDist().inv_cdf(1 - alpha / 2)
    return math.ceil((z * worst / epsilon) ** 2)


def _moments(sit: OrganisationalSituation, seed: int, k: int, workers: int | None):
    g = sit.structure
    t = kernel_tables(g)
    form = sit.game.kernel_form()
    chunks = [(a, min(k, a + t.batch)) for a in range(0, k, t.batch)]

    def chunk(rng):
        m, _ = kernels.marginals(sampled_parents(g, seed, *rng), t.order, form)
        s = m.sum(axis=0)
        dev = m - s / m.shape[0]
        return m.shape[0], s, np.einsum("ij,ij->j", dev, dev)

    total = np.zeros(g.n)
    m2 = np.zeros(g.n)
    seen = 0
    for cnt, s, c2 in map_chunks(chunk, chunks, workers):
        if seen:
            delta = s / cnt - total / seen
            m2 += c2 + delta * delta * (seen * cnt / (seen + cnt))
        else:
            m2 += c2
        total += s
        seen += cnt
    return total, m2


def af_estimate(sit: OrganisationalSituation, plan: EstimationPlan, workers: int | None = None) -> AFReport:
    plan.validate()
    meta = {"mode": plan.mode, "approximate": True}
    if plan.mode == "target_precision":
        total, m2 = _moments(sit, plan.seed, plan.pilot_k, workers)
        pilot_std = np.sqrt(m2 / (plan.pilot_k - 1))
        k = max(plan.pilot_k, required_sample_size(pilot_std, plan.epsilon, plan.alpha, plan.pilot_k))
        meta.update(epsilon=plan.epsilon, pilot_k=plan.pilot_k)
    else:
        k = plan.k
    total, m2 = _moments(sit, plan.seed, k, workers)
    af = total / k
    se = np.sqrt(m2 / (k - 1)) / math.sqrt(k)
    return AFReport(sit.labels, af, float(np.sum(af)), count_maximal_forests(sit.structure),
                    "monte_carlo", samples=k, seed=plan.seed, std_error=se, alpha=plan.alpha, plan=meta)


@dataclass(frozen=True)
class ProbableDummy:
    verdict: str  # "dummy_consistent" or "not_dummy"
    witness: MaximalSpanningForest | None = None
    witness_index: int | None = None


def probably_dummy(sit: OrganisationalSituation, node, plan: EstimationPlan) -> ProbableDummy:
    """Search sampled forests for one where the node adds value beyond its own worth.

    ``dummy_consistent`` only means no such forest was drawn.
    """
    plan.validate()
    g = sit.structure
    i = g.index(node)
    t = kernel_tables(g)
    form = sit.game.kernel_form()
    alone = sit.game.worth(1 << i)
    tol = sit.game.tolerance()
    for a in range(0, plan.k, t.batch):
        b = min(plan.k, a + t.batch)
        m, _ = kernels.marginals(sampled_parents(g, plan.seed, a, b), t.order, form)
        bad = np.flatnonzero(np.abs(m[:, i] - alone) > tol)
        if bad.size:
            idx = a + int(bad[0])
            return ProbableDummy("not_dummy", sample_maximal_forest(g, plan.seed, idx), idx)
    return ProbableDummy("dummy_consistent")
