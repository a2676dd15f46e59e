"""Maximal spanning forests of circuit-free digraphs.

A maximal spanning forest is fixed by choosing one immediate predecessor
(its *parent*) for every non-source node, so forests are stored as parent
vectors with ``-1`` marking sources.  Enumeration treats the vector as a
mixed-radix counter over the non-source nodes in index order (first node most
significant, predecessors in index order).

Random forests come from a counter-based stream: the draw for node ``j`` of
sample ``s`` under ``seed`` is word ``s * W + j`` of the Philox stream keyed by
``seed`` (``W`` is ``n`` rounded up to a multiple of four).  Any sample can
therefore be regenerated alone, and parallel workers need no coordination.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator

import numpy as np

from . import kernels
from .digraph import OrgStructure, iter_bits
from .errors import EnumerationCapExceeded, ForestMismatch

DEFAULT_ENUMERATION_CAP = 10**6
COUNT_SATURATION = 2**128 - 1
# upper bound on batch rows * W so draw buffers stay around 32 MiB
_BATCH_WORDS = 1 << 22
MAX_BATCH = 4096


@dataclass(frozen=True)
class KernelTables:
    n: int
    nodes: np.ndarray  # non-source nodes, ascending, int32
    radix: np.ndarray  # their in-degrees, int64
    pred_offsets: np.ndarray
    pred_flat: np.ndarray
    order: np.ndarray  # reverse topological order, int64
    width: int  # RNG words per sample
    batch: int


@lru_cache(maxsize=128)
def kernel_tables(g: OrgStructure) -> KernelTables:
    nodes = np.array(g.non_sources(), dtype=np.int32)
    radix = np.array([len(g.preds[j]) for j in nodes], dtype=np.int64)
    offsets = np.zeros(g.n + 1, dtype=np.int64)
    offsets[1:] = np.cumsum([len(p) for p in g.preds])
    flat = np.array([i for p in g.preds for i in p], dtype=np.int32)
    order = np.array(g.topo_order[::-1], dtype=np.int64)
    width = max(4, -(-g.n // 4) * 4)
    batch = max(1, min(MAX_BATCH, _BATCH_WORDS // width))
    return KernelTables(g.n, nodes, radix, offsets, flat, order, width, batch)


@dataclass(frozen=True)
class MaximalSpanningForest:
    """Parent-choice representation of one maximal spanning forest."""

    structure: OrgStructure = field(repr=False, compare=False)
    parents: tuple[int, ...]

    def __post_init__(self):
        g = self.structure
        if len(self.parents) != g.n:
            raise ForestMismatch(f"parent vector has {len(self.parents)} entries for {g.n} nodes")
        for j, p in enumerate(self.parents):
            if g.preds[j]:
                if not (p >= 0 and g.pred_mask[j] >> p & 1):
                    raise ForestMismatch(f"node {g.labels[j]!r} needs a parent among its immediate predecessors")
            elif p != -1:
                raise ForestMismatch(f"source {g.labels[j]!r} cannot have a parent")

    @property
    def arcs(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted((p, j) for j, p in enumerate(self.parents) if p >= 0))

    def children(self, i: int) -> tuple[int, ...]:
        return tuple(j for j, p in enumerate(self.parents) if p == i)

    def roots(self) -> int:
        return sum(1 << j for j, p in enumerate(self.parents) if p < 0)

    def subtree(self, node) -> int:
        """Mask of ``node`` and all of its descendants in the forest."""
        i = self.structure.index(node)
        kids = [[] for _ in self.parents]
        for j, p in enumerate(self.parents):
            if p >= 0:
                kids[p].append(j)
        mask, stack = 0, [i]
        while stack:
            u = stack.pop()
            mask |= 1 << u
            stack.extend(kids[u])
        return mask

    def components(self) -> list[int]:
        """One block per source (tree root), ordered by root index."""
        return [self.subtree(r) for r in iter_bits(self.roots())]

    def to_json(self) -> dict:
        labels = self.structure.labels
        return {"parents": {labels[j]: labels[p] for j, p in enumerate(self.parents) if p >= 0}}

    def to_dot(self) -> str:
        labels = self.structure.labels
        lines = ["digraph forest {"]
        lines += [f'  "{lab}";' for lab in labels]
        lines += [f'  "{labels[p]}" -> "{labels[j]}";' for p, j in self.arcs]
        lines.append("}")
        return "\n".join(lines)

    @classmethod
    def from_labels(cls, g: OrgStructure, parents: dict) -> "MaximalSpanningForest":
        vec = [-1] * g.n
        for child, parent in parents.items():
            vec[g.index(child)] = g.index(parent)
        return cls(g, tuple(vec))


def count_maximal_forests(g: OrgStructure) -> int:
    """Exact number of maximal spanning forests: the product of in-degrees over non-sources."""
    return math.prod(len(g.preds[j]) for j in range(g.n) if g.preds[j])


def is_saturated(count: int) -> bool:
    """Whether ``count`` overflows the 128-bit range used in reports."""
    return count > COUNT_SATURATION


def _check_cap(g: OrgStructure, cap: int | None) -> int:
    count = count_maximal_forests(g)
    if cap is not None and count > cap:
        raise EnumerationCapExceeded(count, cap)
    if count >= 2**62:
        raise EnumerationCapExceeded(count, 2**62)
    return count


def parent_batches(g: OrgStructure, cap: int | None = DEFAULT_ENUMERATION_CAP) -> Iterator[tuple[int, int]]:
    """Index ranges ``[start, stop)`` covering every forest, in fixed-size chunks."""
    count = _check_cap(g, cap)
    step = kernel_tables(g).batch
    for start in range(0, count, step):
        yield start, min(count, start + step)


def enumerated_parents(g: OrgStructure, start: int, stop: int) -> np.ndarray:
    t = kernel_tables(g)
    return kernels.enumerate_parents(start, stop, t.nodes, t.radix, t.pred_offsets, t.pred_flat, g.n)


def enumerate_maximal_forests(g: OrgStructure, cap: int | None = DEFAULT_ENUMERATION_CAP) -> Iterator[MaximalSpanningForest]:
    """Yield every maximal spanning forest exactly once, in mixed-radix order."""
    for start, stop in parent_batches(g, cap):
        for row in enumerated_parents(g, start, stop):
            yield MaximalSpanningForest(g, tuple(int(x) for x in row))


def random_words(seed: int, width: int, start: int, stop: int) -> np.ndarray:
    """Raw 64-bit draws for samples ``[start, stop)``, shape ``(stop - start, width)``."""
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    if width % 4:
        raise ValueError("width must be a multiple of 4")
    gen = np.random.Philox(key=seed, counter=start * (width // 4))
    return gen.random_raw((stop - start) * width).reshape(stop - start, width)


def sampled_parents(g: OrgStructure, seed: int, start: int, stop: int) -> np.ndarray:
    t = kernel_tables(g)
    draws = random_words(seed, t.width, start, stop)
    return kernels.sample_parents(draws, t.nodes, t.radix, t.pred_offsets, t.pred_flat, g.n)


def sample_maximal_forest(g: OrgStructure, seed: int, index: int = 0) -> MaximalSpanningForest:
    """Uniform random maximal spanning forest number ``index`` of the stream ``seed``.

    Each non-source node picks its parent uniformly and independently, which
    makes every maximal spanning forest equally likely.
    """
    row = sampled_parents(g, seed, index, index + 1)[0]
    return MaximalSpanningForest(g, tuple(int(x) for x in row))


def sample_maximal_forests(g: OrgStructure, seed: int, k: int) -> Iterator[MaximalSpanningForest]:
    step = kernel_tables(g).batch
    for start in range(0, k, step):
        for row in sampled_parents(g, seed, start, min(k, start + step)):
            yield MaximalSpanningForest(g, tuple(int(x) for x in row))


def subtree(f: MaximalSpanningForest, node) -> int:
    return f.subtree(node)


def forest_components(f: MaximalSpanningForest) -> list[int]:
    return f.components()
