"""Characteristic functions and brute-force game-class verification.

Coalitions are int bitmasks over node indices (see :mod:`afforest.digraph`).
Four kinds of game are supported:

* ``TableGame``: explicit worths, possibly sparse (missing entries are 0);
* ``AdditiveGame``: v(S) = sum of member weights;
* ``AttachmentGame``: v(S) = |S| - 1 for non-empty S;
* ``SymmetricGame``: v(S) = f[|S|].

The last three are *separable*: v(S) = sum_{i in S} w_i + f[|S|].  The
kernels evaluate separable games from subtree sizes and weight sums, so they
work for any number of nodes; table games need bitmask coalitions and are
limited to 64 nodes (dense tables to 20).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import kernels
from .errors import (
    CoalitionOutOfRange,
    MissingTableEntry,
    NodeSetMismatch,
    TooLarge,
    WrongNodeSet,
)

log = logging.getLogger(__name__)

TOLERANCE = 1e-9
MAX_TABLE_NODES = 64
MAX_DENSE_NODES = 20
MAX_VERIFY_NODES = 20


def popcounts(n: int) -> np.ndarray:
    """Cardinality of every coalition mask ``0..2**n - 1``."""
    counts = np.zeros(1 << n, dtype=np.int64)
    for b in range(n):
        counts[1 << b:1 << (b + 1)] = counts[:1 << b] + 1
    return counts


class CharacteristicFunction:
    kind: str = ""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("a game needs at least one player")
        self.n = n
        self._dense = None

    def worth(self, mask: int) -> float:
        raise NotImplementedError

    def __call__(self, mask: int) -> float:
        return self.worth(mask)

    def _check(self, mask: int):
        if mask < 0 or mask >> self.n:
            raise CoalitionOutOfRange(f"coalition {mask:#x} is not over {self.n} players")

    def separable(self):
        """``(weights, by_size)`` arrays for separable games, else ``None``."""
        return None

    def dense(self) -> np.ndarray:
        """All 2**n worths as a float64 array indexed by coalition mask."""
        if self._dense is None:
            if self.n > MAX_DENSE_NODES:
                raise TooLarge(f"cannot materialise a table over {self.n} players (max {MAX_DENSE_NODES})")
            self._dense = self._materialise()
            self._dense.setflags(write=False)
        return self._dense

    def _materialise(self) -> np.ndarray:
        w, f = self.separable()
        n = self.n
        table = np.zeros(1 << n)
        for b in range(n):
            table[1 << b:1 << (b + 1)] = table[:1 << b] + w[b]
        return table + f[popcounts(n)]

    def grand_worth(self) -> float:
        return self.worth((1 << self.n) - 1)

    def tolerance(self) -> float:
        """Absolute comparison tolerance, scaled by the grand coalition."""
        return TOLERANCE * max(1.0, abs(self.grand_worth()))

    def kernel_form(self):
        sep = self.separable()
        if sep is not None:
            return ("separable", sep)
        if self.n <= MAX_DENSE_NODES:
            return ("table", self.dense())
        return ("callable", self.worth)


class TableGame(CharacteristicFunction):
    """Explicit worths keyed by coalition mask; absent coalitions are worth 0.

    In strict mode evaluating an absent non-empty coalition raises
    :class:`MissingTableEntry` instead.
    """

    kind = "table"

    def __init__(self, n: int, values: Mapping[int, float], strict: bool = False):
        super().__init__(n)
        if n > MAX_TABLE_NODES:
            raise TooLarge(f"table games support at most {MAX_TABLE_NODES} players, got {n}")
        vals = {}
        for mask, x in values.items():
            self._check(mask)
            x = float(x)
            if mask == 0 and x != 0.0:
                raise ValueError("the empty coalition must be worth 0")
            if mask:
                vals[mask] = x
        self.values = vals
        self.strict = strict
        self.defaulted = (1 << n) - 1 - len(vals)
        if self.defaulted and strict:
            log.debug("strict table game is missing %d coalitions", self.defaulted)

    @classmethod
    def from_dense(cls, table: Sequence[float]) -> "TableGame":
        table = np.array(table, dtype=float)
        n = int(table.size).bit_length() - 1
        if table.size != 1 << n or n < 1:
            raise ValueError("dense table length must be a power of two >= 2")
        if table[0] != 0.0:
            raise ValueError("the empty coalition must be worth 0")
        nz = np.flatnonzero(table)
        game = cls(n, dict(zip(nz.tolist(), table[nz].tolist())))
        game.defaulted = 0
        table.setflags(write=False)
        game._dense = table
        return game

    def worth(self, mask: int) -> float:
        self._check(mask)
        if mask == 0:
            return 0.0
        if self._dense is not None:
            return float(self._dense[mask])
        try:
            return self.values[mask]
        except KeyError:
            if self.strict:
                raise MissingTableEntry(f"no worth given for coalition {mask:#x}") from None
            return 0.0

    def _materialise(self) -> np.ndarray:
        if self.strict and self.defaulted:
            raise MissingTableEntry(f"{self.defaulted} coalitions have no worth in strict mode")
        table = np.zeros(1 << self.n)
        if self.values:
            keys = np.fromiter(self.values.keys(), dtype=np.int64, count=len(self.values))
            table[keys] = np.fromiter(self.values.values(), dtype=float, count=len(self.values))
        return table


class AdditiveGame(CharacteristicFunction):
    kind = "additive"

    def __init__(self, weights: Sequence[float]):
        super().__init__(len(weights))
        self.weights = tuple(float(x) for x in weights)

    def worth(self, mask: int) -> float:
        self._check(mask)
        total = 0.0
        i = 0
        while mask:
            if mask & 1:
                total += self.weights[i]
            mask >>= 1
            i += 1
        return total

    def separable(self):
        return np.array(self.weights), np.zeros(self.n + 1)


class AttachmentGame(CharacteristicFunction):
    """v(S) = |S| - 1 for every non-empty S."""

    kind = "attachment"

    def worth(self, mask: int) -> float:
        self._check(mask)
        return float(bin(mask).count("1") - 1) if mask else 0.0

    def separable(self):
        f = np.arange(-1.0, self.n)
        f[0] = 0.0
        return np.zeros(self.n), f


class SymmetricGame(CharacteristicFunction):
    kind = "symmetric"

    def __init__(self, by_size: Sequence[float]):
        super().__init__(len(by_size) - 1)
        if by_size[0] != 0:
            raise ValueError("by_size[0] must be 0")
        self.by_size = tuple(float(x) for x in by_size)

    def worth(self, mask: int) -> float:
        self._check(mask)
        return self.by_size[bin(mask).count("1")]

    def separable(self):
        return np.zeros(self.n), np.array(self.by_size)


def evaluate(v: CharacteristicFunction, s: int) -> float:
    return v.worth(s)


def example_convexity_game(labels: Sequence[str]) -> TableGame:
    """Five-player game on labels 1..5 whose worths break convexity.

    Singletons and every subset of {1, 2, 4} are worth 0, v({3, 5}) = 5, and
    for non-empty S within {1, 2, 4} of size s: v(S + 3) = v(S + 5) =
    3 + (s + 1)**2 and v(S + {3, 5}) = 5 + (s + 2)**2.  Bits follow the
    position of each label in ``labels``.
    """
    labels = list(labels)
    if sorted(labels) != ["1", "2", "3", "4", "5"]:
        raise WrongNodeSet(f"the convexity example needs exactly the nodes 1..5, got {labels}")
    bit = {lab: 1 << i for i, lab in enumerate(labels)}
    low = [bit["1"], bit["2"], bit["4"]]
    three, five = bit["3"], bit["5"]
    values = {three | five: 5.0}
    for pick in range(1, 8):
        s = bin(pick).count("1")
        base = sum(b for k, b in enumerate(low) if pick >> k & 1)
        values[base | three] = 3.0 + (s + 1) ** 2
        values[base | five] = 3.0 + (s + 1) ** 2
        values[base | three | five] = 5.0 + (s + 2) ** 2
    return TableGame(5, values)


def linear_combination(a: float, v: CharacteristicFunction, b: float, w: CharacteristicFunction) -> TableGame:
    if v.n != w.n:
        raise NodeSetMismatch(f"games over {v.n} and {w.n} players cannot be combined")
    return TableGame.from_dense(a * v.dense() + b * w.dense())


# -- game-class certificates --------------------------------------------------

@dataclass(frozen=True)
class GameClassCertificate:
    """Outcome of an exhaustive game-class check.

    For a failed superadditivity check ``counterexample`` is a disjoint pair
    (S, Q) with v(S | Q) < v(S) + v(Q).  For a failed convexity check it is a
    pair (A, B) with v(A | B) + v(A & B) < v(A) + v(B), and ``node`` is the
    player in A but not in B.
    """

    property: str
    verdict: str
    counterexample: tuple[int, int] | None = None
    node: int | None = None

    @property
    def holds(self) -> bool:
        return self.verdict == "holds"


def _verify_size(v: CharacteristicFunction, prop: str, allow_unverified: bool):
    if v.n > MAX_VERIFY_NODES:
        if allow_unverified:
            return GameClassCertificate(prop, "unverified")
        raise TooLarge(f"exhaustive {prop} check is limited to {MAX_VERIFY_NODES} players, got {v.n}")
    return None


def check_superadditive(v: CharacteristicFunction, allow_unverified: bool = False) -> GameClassCertificate:
    """Exhaustively test v(S | Q) >= v(S) + v(Q) over disjoint non-empty S, Q."""
    early = _verify_size(v, "superadditive", allow_unverified)
    if early is not None:
        return early
    q, s = kernels.superadditive_violation(v.dense(), v.n, v.tolerance())
    if q < 0:
        return GameClassCertificate("superadditive", "holds")
    return GameClassCertificate("superadditive", "fails", (q, s))


def check_convex(v: CharacteristicFunction, allow_unverified: bool = False) -> GameClassCertificate:
    """Test supermodularity through its pairwise form.

    For all i != j and S avoiding both:
    v(S + i + j) + v(S) >= v(S + i) + v(S + j).
    """
    early = _verify_size(v, "convex", allow_unverified)
    if early is not None:
        return early
    table = v.dense()
    n = v.n
    tol = v.tolerance()
    masks = np.arange(1 << n, dtype=np.int64)
    for i in range(n):
        bi = 1 << i
        for j in range(i + 1, n):
            bj = 1 << j
            s = masks[(masks & (bi | bj)) == 0]
            gap = table[s | bi | bj] + table[s] - table[s | bi] - table[s | bj]
            bad = np.flatnonzero(gap < -tol)
            if bad.size:
                base = int(s[bad[0]])
                return GameClassCertificate("convex", "fails", (base | bi, base | bj), i)
    return GameClassCertificate("convex", "holds")


def is_dummy_in_game(v: CharacteristicFunction, i: int) -> bool:
    if v.n > MAX_VERIFY_NODES:
        raise TooLarge(f"dummy check is limited to {MAX_VERIFY_NODES} players, got {v.n}")
    if not 0 <= i < v.n:
        raise CoalitionOutOfRange(f"player {i} is not among {v.n} players")
    table = v.dense()
    bi = 1 << i
    masks = np.arange(1 << v.n, dtype=np.int64)
    s = masks[(masks & bi) == 0]
    return bool(np.all(np.abs(table[s | bi] - table[s] - table[bi]) <= v.tolerance()))
