"""Exact Average Forest measure, productivity and related diagnostics."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .digraph import OrgStructure, iter_bits
from .errors import ForestMismatch, NodeSetMismatch, ValidationError
from .forests import (
    DEFAULT_ENUMERATION_CAP,
    MaximalSpanningForest,
    count_maximal_forests,
    enumerated_parents,
    kernel_tables,
    parent_batches,
)
from .games import CharacteristicFunction, GameClassCertificate, check_convex, check_superadditive


def resolve_workers(workers: int | None = None) -> int:
    """Worker count from the argument, else ``AFFOREST_THREADS`` (0 = all CPUs)."""
    if workers is None:
        try:
            workers = int(os.environ.get("AFFOREST_THREADS", "0"))
        except ValueError:
            workers = 0
    if workers <= 0:
        workers = os.cpu_count() or 1
    return workers


def map_chunks(fn: Callable, chunks: Sequence, workers: int | None = None) -> list:
    """Apply ``fn`` to every chunk; results come back in chunk order."""
    workers = min(resolve_workers(workers), max(1, len(chunks)))
    if workers == 1:
        return [fn(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, chunks))


class OrganisationalSituation:
    """A structure paired with a game over the same players.

    Game-class certificates are computed on first request and cached.
    """

    def __init__(self, structure: OrgStructure, game: CharacteristicFunction,
                 warnings: Sequence[str] = ()):
        if structure.n < 2:
            raise ValidationError("an organisational situation needs at least two agents")
        if game.n != structure.n:
            raise NodeSetMismatch(f"game has {game.n} players but the structure has {structure.n} nodes")
        self.structure = structure
        self.game = game
        self.warnings = list(warnings)
        self._certs = {}

    @property
    def n(self) -> int:
        return self.structure.n

    @property
    def labels(self) -> tuple[str, ...]:
        return self.structure.labels

    def certificate(self, prop: str) -> GameClassCertificate:
        if prop not in self._certs:
            check = {"superadditive": check_superadditive, "convex": check_convex}[prop]
            self._certs[prop] = check(self.game, allow_unverified=True)
        return self._certs[prop]

    def with_structure(self, structure: OrgStructure) -> "OrganisationalSituation":
        other = OrganisationalSituation(structure, self.game, self.warnings)
        other._certs = self._certs  # same game, same certificates
        return other


@dataclass
class AFReport:
    """Per-node AF values plus how they were obtained."""

    labels: tuple[str, ...]
    af: np.ndarray
    productivity: float
    forest_count: int
    method: str
    samples: int | None = None
    seed: int | None = None
    std_error: np.ndarray | None = None
    alpha: float | None = None
    plan: dict = field(default_factory=dict)

    def value(self, label: str) -> float:
        return float(self.af[self.labels.index(label)])

    def confidence_intervals(self) -> np.ndarray | None:
        """Per-node normal-approximation intervals, shape ``(n, 2)``."""
        if self.std_error is None:
            return None
        from statistics import NormalDist

        z = NormalDist().inv_cdf(1 - self.alpha / 2)
        return np.stack([self.af - z * self.std_error, self.af + z * self.std_error], axis=1)


def marginal_contribution_vector(sit: OrganisationalSituation, f: MaximalSpanningForest) -> np.ndarray:
    if f.structure != sit.structure:
        raise ForestMismatch("forest belongs to a different organisational structure")
    t = kernel_tables(sit.structure)
    parents = np.array([f.parents], dtype=np.int32)
    out, _ = kernels.marginals(parents, t.order, sit.game.kernel_form())
    return out[0]


def _exact_sums(sit: OrganisationalSituation, cap: int | None, workers: int | None):
    g = sit.structure
    t = kernel_tables(g)
    form = sit.game.kernel_form()

    def chunk(rng):
        parents = enumerated_parents(g, *rng)
        m, prod = kernels.marginals(parents, t.order, form)
        return m.sum(axis=0), prod.sum()

    parts = map_chunks(chunk, list(parent_batches(g, cap)), workers)
    total = np.zeros(g.n)
    prod = 0.0
    for m, p in parts:
        total += m
        prod += p
    return total, prod


def af_exact(sit: OrganisationalSituation, cap: int | None = DEFAULT_ENUMERATION_CAP,
             workers: int | None = None) -> AFReport:
    """Average of the marginal contribution vectors over every maximal spanning forest."""
    count = count_maximal_forests(sit.structure)
    total, prod = _exact_sums(sit, cap, workers)
    return AFReport(sit.labels, total / count, prod / count, count, "exact")


def productivity(sit: OrganisationalSituation, cap: int | None = DEFAULT_ENUMERATION_CAP,
                 workers: int | None = None) -> float:
    """Mean total worth of the trees of a uniformly random maximal spanning forest."""
    return af_exact(sit, cap, workers).productivity


@dataclass(frozen=True)
class EfficiencyCheck:
    productivity: float
    components_worth: float
    gap: float
    qsc: bool
    weakly_connected: bool
    theorem_holds: bool
    note: str = ""


def efficiency_check(sit: OrganisationalSituation, report: AFReport | None = None) -> EfficiencyCheck:
    """Compare productivity with the summed worth of the weak components.

    A quasi-strongly connected structure must reach the upper bound exactly;
    ``theorem_holds`` records whether it did.
    """
    if report is None:
        report = af_exact(sit)
    g, v = sit.structure, sit.game
    comps = g.weak_components()
    bound = sum(v.worth(c) for c in comps)
    gap = bound - report.productivity
    qsc = g.is_quasi_strongly_connected().result
    tol = v.tolerance()
    if report.method != "exact" and report.std_error is not None:
        tol += 4 * float(np.sqrt(np.sum(report.std_error ** 2)))
    holds = not qsc or abs(gap) <= tol
    note = ""
    if not qsc and abs(gap) <= tol:
        note = "efficient without quasi-strong connectivity; the game is additive across the forest splits"
    elif not qsc:
        note = "not quasi-strongly connected: some forests split a component"
    return EfficiencyCheck(report.productivity, bound, gap, qsc, len(comps) == 1, holds, note)


@dataclass(frozen=True)
class ComponentFeasibility:
    component: int
    af_sum: float
    worth: float
    slack: float
    feasible: bool


@dataclass(frozen=True)
class FeasibilityResult:
    components: list
    advisory: bool  # superadditivity was not certified, so feasibility is not guaranteed


def component_feasibility(sit: OrganisationalSituation, report: AFReport) -> FeasibilityResult:
    if report.method != "exact":
        raise ValueError("component feasibility needs an exact AF report")
    v = sit.game
    tol = v.tolerance()
    rows = []
    for c in sit.structure.weak_components():
        af_sum = float(sum(report.af[i] for i in iter_bits(c)))
        worth = v.worth(c)
        slack = worth - af_sum
        rows.append(ComponentFeasibility(c, af_sum, worth, slack, slack >= -tol))
    return FeasibilityResult(rows, not sit.certificate("superadditive").holds)


def is_situation_dummy(sit: OrganisationalSituation, node, cap: int | None = DEFAULT_ENUMERATION_CAP) -> bool:
    """True iff the node's marginal contribution equals its own worth in every forest."""
    g = sit.structure
    i = g.index(node)
    t = kernel_tables(g)
    form = sit.game.kernel_form()
    alone = sit.game.worth(1 << i)
    tol = sit.game.tolerance()
    for start, stop in parent_batches(g, cap):
        m, _ = kernels.marginals(enumerated_parents(g, start, stop), t.order, form)
        if np.any(np.abs(m[:, i] - alone) > tol):
            return False
    return True
