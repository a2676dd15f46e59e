"""Circuit-free directed graphs (organisational structures).

Nodes carry user-facing string labels and are addressed internally by dense
indices ``0..n-1`` in label order.  Every node set handed out by this module
is a coalition bitmask: a plain ``int`` whose bit ``i`` is set iff node ``i``
belongs to the set.  Python ints are unbounded, so structural queries work for
any ``n``; only table games restrict ``n`` (see :mod:`afforest.games`).
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Sequence

from .errors import (
    ArcAlreadyPresent,
    ArcNotPresent,
    CircuitDetected,
    DuplicateArc,
    DuplicateLabel,
    SelfLoop,
    UnknownNode,
    ValidationError,
    WouldCreateCircuit,
)


def iter_bits(mask: int) -> Iterator[int]:
    """Yield the indices of the set bits of ``mask`` in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def members(mask: int) -> list[int]:
    return list(iter_bits(mask))


def popcount(mask: int) -> int:
    return bin(mask).count("1")


class Neighbourhood(NamedTuple):
    in_degree: int
    immediate_predecessors: int
    immediate_successors: int


class TransitiveSets(NamedTuple):
    predecessors: int
    successors: int


class QSCResult(NamedTuple):
    result: bool
    root: int | None


@dataclass(frozen=True)
class LocalDigraph:
    """The part of a structure that determines one node's AF value."""

    center: int
    vertex_set: int
    arc_set: tuple[tuple[int, int], ...]


class OrgStructure:
    """Validated, immutable circuit-free digraph.

    Use :func:`build_org_structure` to construct one from labels.
    """

    def __init__(self, labels: Sequence[str], arcs: Iterable[tuple[int, int]]):
        labels = tuple(labels)
        if not labels:
            raise ValidationError("an organisational structure needs at least one node")
        index = {}
        for i, lab in enumerate(labels):
            if not isinstance(lab, str) or not lab:
                raise ValidationError(f"node labels must be non-empty strings, got {lab!r}")
            if lab in index:
                raise DuplicateLabel(f"duplicate node label {lab!r}")
            index[lab] = i
        n = len(labels)
        seen = set()
        for a in arcs:
            i, j = a
            if not (0 <= i < n and 0 <= j < n):
                raise UnknownNode(f"arc {a!r} refers to a node outside 0..{n - 1}")
            if i == j:
                raise SelfLoop(f"self-loop on node {labels[i]!r}")
            if (i, j) in seen:
                raise DuplicateArc(f"duplicate arc ({labels[i]!r}, {labels[j]!r})")
            seen.add((i, j))

        self.labels = labels
        self.n = n
        self._index = index
        self.arcs = tuple(sorted(seen))
        preds = [[] for _ in range(n)]
        succs = [[] for _ in range(n)]
        for i, j in self.arcs:
            succs[i].append(j)
            preds[j].append(i)
        self.preds = tuple(tuple(p) for p in preds)
        self.succs = tuple(tuple(s) for s in succs)
        self.pred_mask = tuple(mask_of(p) for p in preds)
        self.succ_mask = tuple(mask_of(s) for s in succs)

        witness = self._find_circuit()
        if witness is not None:
            raise CircuitDetected([labels[i] for i in witness])
        self.topo_order = self._topological_order()

        # S(i) and P(i), strict, as bitmasks
        down = [0] * n
        for i in reversed(self.topo_order):
            m = 0
            for j in self.succs[i]:
                m |= down[j] | (1 << j)
            down[i] = m
        up = [0] * n
        for j in self.topo_order:
            m = 0
            for i in self.preds[j]:
                m |= up[i] | (1 << i)
            up[j] = m
        self.reach_down = tuple(down)
        self.reach_up = tuple(up)

    # -- identity -----------------------------------------------------------

    def __repr__(self):
        return f"OrgStructure(n={self.n}, arcs={len(self.arcs)})"

    def __eq__(self, other):
        if not isinstance(other, OrgStructure):
            return NotImplemented
        return self.labels == other.labels and self.arcs == other.arcs

    def __hash__(self):
        return hash((self.labels, self.arcs))

    def index(self, node) -> int:
        """Resolve a label (``str``) or an index (``int``) to an index."""
        if isinstance(node, str):
            try:
                return self._index[node]
            except KeyError:
                raise UnknownNode(f"unknown node label {node!r}") from None
        if isinstance(node, int) and not isinstance(node, bool) and 0 <= node < self.n:
            return node
        raise UnknownNode(f"unknown node {node!r}")

    def label(self, i: int) -> str:
        return self.labels[i]

    def labels_of(self, mask: int) -> list[str]:
        return [self.labels[i] for i in iter_bits(mask)]

    def mask(self, nodes: Iterable) -> int:
        return mask_of(self.index(x) for x in nodes)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def has_arc(self, i, j) -> bool:
        i, j = self.index(i), self.index(j)
        return bool(self.succ_mask[i] >> j & 1)

    # -- validation helpers ---------------------------------------------------

    def _find_circuit(self) -> list[int] | None:
        n = self.n
        colour = [0] * n  # 0 white, 1 on stack, 2 done
        for root in range(n):
            if colour[root]:
                continue
            path = [root]
            its = [iter(self.succs[root])]
            colour[root] = 1
            while its:
                nxt = next(its[-1], None)
                if nxt is None:
                    colour[path.pop()] = 2
                    its.pop()
                elif colour[nxt] == 1:
                    start = path.index(nxt)
                    return path[start:] + [nxt]
                elif colour[nxt] == 0:
                    colour[nxt] = 1
                    path.append(nxt)
                    its.append(iter(self.succs[nxt]))
        return None

    def _topological_order(self) -> tuple[int, ...]:
        # Kahn with a min-heap: the smallest available index always goes first
        indeg = [len(p) for p in self.preds]
        heap = [i for i in range(self.n) if indeg[i] == 0]
        order = []
        while heap:
            i = heapq.heappop(heap)
            order.append(i)
            for j in self.succs[i]:
                indeg[j] -= 1
                if indeg[j] == 0:
                    heapq.heappush(heap, j)
        return tuple(order)

    # -- queries ------------------------------------------------------------

    def in_degree(self, node) -> int:
        return len(self.preds[self.index(node)])

    def sources(self) -> int:
        return mask_of(i for i in range(self.n) if not self.preds[i])

    def non_sources(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n) if self.preds[i])

    def neighbourhood(self, node) -> Neighbourhood:
        i = self.index(node)
        return Neighbourhood(len(self.preds[i]), self.pred_mask[i], self.succ_mask[i])

    def transitive_sets(self, node) -> TransitiveSets:
        i = self.index(node)
        return TransitiveSets(self.reach_up[i], self.reach_down[i])

    def predecessors(self, node) -> int:
        return self.reach_up[self.index(node)]

    def successors(self, node) -> int:
        return self.reach_down[self.index(node)]

    def weak_components(self) -> list[int]:
        """Weakly connected components, ordered by their smallest member."""
        comp = [-1] * self.n
        blocks = []
        for start in range(self.n):
            if comp[start] >= 0:
                continue
            block = 0
            stack = [start]
            comp[start] = len(blocks)
            while stack:
                u = stack.pop()
                block |= 1 << u
                for w in self.preds[u] + self.succs[u]:
                    if comp[w] < 0:
                        comp[w] = len(blocks)
                        stack.append(w)
            blocks.append(block)
        return blocks

    def is_quasi_strongly_connected(self) -> QSCResult:
        full = self.full_mask
        for r in range(self.n):
            if self.reach_down[r] | (1 << r) == full:
                return QSCResult(True, r)
        return QSCResult(False, None)

    def local_digraph(self, node) -> LocalDigraph:
        k = self.index(node)
        strict_succ = self.reach_down[k]
        closed = strict_succ | (1 << k)
        feeders = 0
        for j in iter_bits(strict_succ):
            feeders |= self.pred_mask[j]
        arcs = [
            (i, j) for i, j in self.arcs
            if (closed >> i & 1 and closed >> j & 1) or (feeders >> i & 1 and strict_succ >> j & 1)
        ]
        return LocalDigraph(k, closed | feeders, tuple(arcs))

    def is_inessential_arc(self, i, j) -> bool:
        i, j = self.index(i), self.index(j)
        if not self.succ_mask[i] >> j & 1:
            raise ArcNotPresent(f"arc ({self.labels[i]!r}, {self.labels[j]!r}) is not in the structure")
        if self.reach_down[j] >> i & 1:
            return False
        for k in self.succs[i]:
            if k != j and not (self.reach_down[k] >> i & 1) and self.reach_down[k] >> j & 1:
                return True
        return False

    # -- edits ----------------------------------------------------------------

    def without_arc(self, i, j) -> "OrgStructure":
        i, j = self.index(i), self.index(j)
        if not self.succ_mask[i] >> j & 1:
            raise ArcNotPresent(f"arc ({self.labels[i]!r}, {self.labels[j]!r}) is not in the structure")
        return OrgStructure(self.labels, [a for a in self.arcs if a != (i, j)])

    def with_arc(self, i, j) -> "OrgStructure":
        i, j = self.index(i), self.index(j)
        if i == j:
            raise SelfLoop(f"self-loop on node {self.labels[i]!r}")
        if self.succ_mask[i] >> j & 1:
            raise ArcAlreadyPresent(f"arc ({self.labels[i]!r}, {self.labels[j]!r}) already exists")
        if self.reach_down[j] >> i & 1:
            path = self._path(j, i)
            raise WouldCreateCircuit([self.labels[x] for x in path + [j]])
        return OrgStructure(self.labels, self.arcs + ((i, j),))

    def _path(self, a: int, b: int) -> list[int]:
        # a reaches b; walk successors that still reach b
        path = [a]
        while a != b:
            a = next(s for s in self.succs[a] if s == b or self.reach_down[s] >> b & 1)
            path.append(a)
        return path

    def arcs_by_label(self) -> list[tuple[str, str]]:
        return [(self.labels[i], self.labels[j]) for i, j in self.arcs]


def build_org_structure(labels: Sequence[str], arcs: Iterable[tuple[str, str]]) -> OrgStructure:
    """Validate ``labels`` and label-pair ``arcs`` into an :class:`OrgStructure`.

    Raises DuplicateLabel, SelfLoop, DuplicateArc, UnknownNode or
    CircuitDetected (the latter carries a witness circuit of labels).
    """
    labels = list(labels)
    index = {}
    for i, lab in enumerate(labels):
        if lab in index:
            raise DuplicateLabel(f"duplicate node label {lab!r}")
        index[lab] = i
    pairs = []
    for a in arcs:
        try:
            u, w = a
        except (TypeError, ValueError):
            raise ValidationError(f"arc must be a pair of labels, got {a!r}") from None
        if u not in index or w not in index:
            bad = u if u not in index else w
            raise UnknownNode(f"arc ({u!r}, {w!r}) refers to unknown node {bad!r}")
        pairs.append((index[u], index[w]))
    return OrgStructure(labels, pairs)
