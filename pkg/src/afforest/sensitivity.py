"""Effect of deleting or adding one arc on the AF measure.

For a deleted arc (i0, j0) every node gets exactly one tag, first match wins:

1. ``unchanged_successor``: the node is j0 or one of its successors.
2. ``unchanged_local``: the node's local digraph survives the deletion.
3. ``direct_competition_gain``: another immediate predecessor of j0 that is
   not a predecessor of any immediate predecessor of j0 (needs superadditivity).
4. ``direct_subordinate_loss``: i0 itself, when i0 is no indirect competitor.
5. ``indirect_competition_gain``: an indirect competitor outside the closed
   predecessor set of i0 (needs convexity).
6. ``indirect_subordinate_loss``: a predecessor of i0 that is neither a
   direct nor an indirect competitor, when i0 is no indirect competitor
   (needs convexity).  A direct competitor above i0 gains as a competitor
   and loses as a superior, so it is left conflictive.
7. ``conflictive``: everything else; no direction is predicted.

Gains predict AF before <= after, losses before >= after.  An added arc is
read as the deletion that would undo it: tags come from the enlarged
structure and the directions flip.
"""

from __future__ import annotations

from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

from .digraph import OrgStructure, iter_bits
from .errors import ArcNotPresent, ValidationError
from .forests import DEFAULT_ENUMERATION_CAP
from .measures import AFReport, OrganisationalSituation, af_exact

UNCHANGED_SUCCESSOR = "unchanged_successor"
UNCHANGED_LOCAL = "unchanged_local"
DIRECT_GAIN = "direct_competition_gain"
DIRECT_LOSS = "direct_subordinate_loss"
INDIRECT_GAIN = "indirect_competition_gain"
INDIRECT_LOSS = "indirect_subordinate_loss"
CONFLICTIVE = "conflictive"

REQUIRED_CLASS = {
    UNCHANGED_SUCCESSOR: None,
    UNCHANGED_LOCAL: None,
    DIRECT_GAIN: "superadditive",
    DIRECT_LOSS: "superadditive",
    INDIRECT_GAIN: "convex",
    INDIRECT_LOSS: "convex",
    CONFLICTIVE: None,
}

# direction of AF(before) relative to AF(after) when the arc is deleted
DELETE_DIRECTION = {
    UNCHANGED_SUCCESSOR: "=",
    UNCHANGED_LOCAL: "=",
    DIRECT_GAIN: "<=",
    DIRECT_LOSS: ">=",
    INDIRECT_GAIN: "<=",
    INDIRECT_LOSS: ">=",
    CONFLICTIVE: "?",
}
_FLIP = {"=": "=", "<=": ">=", ">=": "<=", "?": "?"}


@dataclass(frozen=True)
class ArcEdit:
    kind: str  # "delete" or "add"
    arc: tuple

    def __post_init__(self):
        if self.kind not in ("delete", "add"):
            raise ValueError(f"edit kind must be 'delete' or 'add', got {self.kind!r}")


def apply_edit(sit: OrganisationalSituation, edit: ArcEdit) -> OrganisationalSituation:
    g = sit.structure
    if edit.kind == "delete":
        return sit.with_structure(g.without_arc(*edit.arc))
    return sit.with_structure(g.with_arc(*edit.arc))


def _arc(g: OrgStructure, arc) -> tuple[int, int]:
    i, j = g.index(arc[0]), g.index(arc[1])
    if not g.succ_mask[i] >> j & 1:
        raise ArcNotPresent(f"arc ({g.labels[i]!r}, {g.labels[j]!r}) is not in the structure")
    return i, j


def direct_competitors(g: OrgStructure, arc) -> int:
    i0, j0 = _arc(g, arc)
    return g.pred_mask[j0] & ~(1 << i0)


def indirect_competitors(g: OrgStructure, arc) -> int:
    ic = 0
    for k in iter_bits(direct_competitors(g, arc)):
        ic |= g.reach_up[k]
    return ic


@dataclass(frozen=True)
class EffectClassification:
    arc: tuple[int, int]
    tags: tuple[str, ...]

    def required_class(self, i: int) -> str | None:
        return REQUIRED_CLASS[self.tags[i]]

    def nodes_with(self, tag: str) -> int:
        return sum(1 << i for i, t in enumerate(self.tags) if t == tag)


def classify_nodes(g: OrgStructure, arc) -> EffectClassification:
    i0, j0 = _arc(g, arc)
    reduced = g.without_arc(i0, j0)
    dc = direct_competitors(g, (i0, j0))
    ic = indirect_competitors(g, (i0, j0))
    closed_succ_j0 = g.reach_down[j0] | (1 << j0)
    # predecessors of any immediate predecessor of j0
    above_parents = 0
    for j in iter_bits(g.pred_mask[j0]):
        above_parents |= g.reach_up[j]
    closed_pred_i0 = g.reach_up[i0] | (1 << i0)
    i0_competes = bool(ic >> i0 & 1)

    tags = []
    for k in range(g.n):
        bit = 1 << k
        if closed_succ_j0 & bit:
            tags.append(UNCHANGED_SUCCESSOR)
        elif g.local_digraph(k) == reduced.local_digraph(k):
            tags.append(UNCHANGED_LOCAL)
        elif dc & bit and not above_parents & bit:
            tags.append(DIRECT_GAIN)
        elif k == i0 and not i0_competes:
            tags.append(DIRECT_LOSS)
        elif ic & bit and not closed_pred_i0 & bit:
            tags.append(INDIRECT_GAIN)
        elif g.reach_up[i0] & bit and not (ic | dc) & bit and not i0_competes:
            tags.append(INDIRECT_LOSS)
        else:
            tags.append(CONFLICTIVE)
    return EffectClassification((i0, j0), tuple(tags))


@dataclass(frozen=True)
class NodeEffect:
    label: str
    tag: str
    required_class: str | None
    predicted: str  # AF before vs after: "=", "<=", ">=" or "?"
    delta: float  # after - before
    consistent: bool | None  # None: not applicable


@dataclass
class SensitivityReport:
    edit: ArcEdit
    edit_labels: tuple[str, str]
    before: AFReport
    after: AFReport
    nodes: list

    def violations(self) -> list:
        return [e for e in self.nodes if e.consistent is False]


def _consistent(predicted: str, delta: float, tol: float, slack: float = 0.0) -> bool:
    if predicted == "=":
        return abs(delta) <= tol + slack
    if predicted == "<=":
        return delta >= -tol - slack
    return delta <= tol + slack


def sensitivity_report(sit: OrganisationalSituation, edit: ArcEdit, method: str = "exact",
                       plan=None, cap: int | None = DEFAULT_ENUMERATION_CAP,
                       workers: int | None = None) -> SensitivityReport:
    """Before/after AF for one arc edit, with each node's predicted and observed change."""
    g = sit.structure
    edited = apply_edit(sit, edit)
    if edit.kind == "delete":
        cls = classify_nodes(g, edit.arc)
        flip = False
    else:
        cls = classify_nodes(edited.structure, edit.arc)
        flip = True

    if method == "exact":
        before, after = af_exact(sit, cap, workers), af_exact(edited, cap, workers)
    elif method == "monte_carlo":
        from .montecarlo import af_estimate

        if plan is None:
            raise ValidationError("Monte Carlo sensitivity needs an estimation plan")
        before, after = af_estimate(sit, plan, workers), af_estimate(edited, plan, workers)
    else:
        raise ValueError(f"unknown method {method!r}")

    tol = sit.game.tolerance()
    slack = np.zeros(g.n)
    if method == "monte_carlo":
        z = NormalDist().inv_cdf(1 - before.alpha / 2)
        slack = z * (before.std_error + after.std_error)

    nodes = []
    for k in range(g.n):
        tag = cls.tags[k]
        predicted = DELETE_DIRECTION[tag]
        if flip:
            predicted = _FLIP[predicted]
        delta = float(after.af[k] - before.af[k])
        req = REQUIRED_CLASS[tag]
        if predicted == "?" or (req is not None and not sit.certificate(req).holds):
            ok = None
        else:
            ok = _consistent(predicted, delta, tol, float(slack[k]))
        nodes.append(NodeEffect(g.labels[k], tag, req, predicted, delta, ok))
    i0, j0 = cls.arc
    return SensitivityReport(edit, (g.labels[i0], g.labels[j0]), before, after, nodes)
