"""Random structures and games for property tests and benchmarks.

All functions take a ``numpy.random.Generator`` so callers control seeding.
"""

from __future__ import annotations

import numpy as np

from .digraph import OrgStructure
from .games import TableGame, popcounts


def _labels(n: int) -> list[str]:
    return [str(i + 1) for i in range(n)]


def random_dag(rng: np.random.Generator, n: int, p: float = 0.4) -> OrgStructure:
    """Circuit-free digraph: arcs follow a hidden random order, each with probability ``p``.

    The hidden order is shuffled so index order and topological order differ.
    """
    order = rng.permutation(n)
    arcs = [(int(order[a]), int(order[b])) for a in range(n) for b in range(a + 1, n) if rng.random() < p]
    return OrgStructure(_labels(n), arcs)


def random_qsc_dag(rng: np.random.Generator, n: int, p: float = 0.3) -> OrgStructure:
    """Circuit-free digraph where the first node of a hidden order reaches every other node."""
    order = rng.permutation(n)
    arcs = set()
    for b in range(1, n):
        arcs.add((int(order[rng.integers(b)]), int(order[b])))
        for a in range(b):
            if rng.random() < p:
                arcs.add((int(order[a]), int(order[b])))
    return OrgStructure(_labels(n), sorted(arcs))


def superadditive_cover(base: np.ndarray) -> np.ndarray:
    """Smallest superadditive game above ``base``: best split of each coalition into blocks."""
    size = len(base)
    v = np.array(base, dtype=float)
    v[0] = 0.0
    for s in range(1, size):
        low = s & -s
        rest = s ^ low
        # blocks containing the lowest member, combined with the best split of the remainder
        sub = rest
        while True:
            block = sub | low
            if block != s:
                cand = v[block] + v[s ^ block]
                if cand > v[s]:
                    v[s] = cand
            if sub == 0:
                break
            sub = (sub - 1) & rest
    return v


def random_superadditive_game(rng: np.random.Generator, n: int, strict: float = 0.0) -> TableGame:
    """Superadditive table game built as the cover of random nonnegative worths.

    ``strict > 0`` adds ``strict * (|S| - 1)`` to break ties between splits.
    """
    base = rng.uniform(0.0, 10.0, size=1 << n)
    v = superadditive_cover(base)
    if strict:
        v = v + strict * np.maximum(popcounts(n) - 1, 0)
    v[0] = 0.0
    return TableGame.from_dense(v)


def random_convex_game(rng: np.random.Generator, n: int, c: float | None = None,
                       unanimity: int = 3) -> TableGame:
    """Additive part plus ``c * |S|**2`` plus a few nonnegative unanimity games.

    Each piece is supermodular, hence so is the sum.
    """
    full = 1 << n
    masks = np.arange(full)
    sizes = popcounts(n).astype(float)
    w = rng.uniform(0.0, 5.0, size=n)
    v = np.zeros(full)
    for i in range(n):
        v += np.where(masks >> i & 1, w[i], 0.0)
    v += (rng.uniform(0.1, 2.0) if c is None else c) * sizes ** 2
    for _ in range(unanimity):
        t = int(rng.integers(1, full))
        v += np.where(masks & t == t, rng.uniform(0.0, 5.0), 0.0)
    v[0] = 0.0
    return TableGame.from_dense(v)


def random_table_game(rng: np.random.Generator, n: int) -> TableGame:
    """Arbitrary game with no class guarantees."""
    v = rng.uniform(-5.0, 10.0, size=1 << n)
    v[0] = 0.0
    return TableGame.from_dense(v)
