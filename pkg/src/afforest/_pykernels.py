"""Pure Python/NumPy implementations of the hot kernels.

Each function vectorises over the batch axis (one row per forest) and loops
over nodes.  The floating-point operations happen in the same order as in
``_ckernels.pyx``, so both backends return bit-identical results.
"""

import numpy as np

_SUBMASK_CACHE = {}


def enumerate_parents(start, stop, nodes, radix, pred_offsets, pred_flat, n):
    idx = np.arange(start, stop, dtype=np.int64)
    parents = np.full((idx.size, n), -1, dtype=np.int32)
    # last digit varies fastest
    for d in range(len(nodes) - 1, -1, -1):
        node = nodes[d]
        digit = idx % radix[d]
        idx //= radix[d]
        parents[:, node] = pred_flat[pred_offsets[node] + digit]
    return parents


def sample_parents(draws, nodes, radix, pred_offsets, pred_flat, n):
    parents = np.full((draws.shape[0], n), -1, dtype=np.int32)
    for d in range(len(nodes)):
        node = nodes[d]
        digit = (draws[:, node] % np.uint64(radix[d])).astype(np.int64)
        parents[:, node] = pred_flat[pred_offsets[node] + digit]
    return parents


def marginals_table(parents, order, table):
    batch, n = parents.shape
    rows = np.arange(batch)
    mask = np.broadcast_to(np.left_shift(1, np.arange(n, dtype=np.int64)), (batch, n)).copy()
    below = np.zeros((batch, n))
    out = np.empty((batch, n))
    prod = np.zeros(batch)
    for i in order:
        val = table[mask[:, i]]
        out[:, i] = val - below[:, i]
        p = parents[:, i]
        has = p >= 0
        r, pp = rows[has], p[has]
        mask[r, pp] |= mask[r, i]
        below[r, pp] += val[has]
        prod[~has] += val[~has]
    return out, prod


def marginals_separable(parents, order, weights, by_size):
    batch, n = parents.shape
    rows = np.arange(batch)
    size = np.ones((batch, n), dtype=np.int64)
    wsum = np.broadcast_to(np.asarray(weights, dtype=float), (batch, n)).copy()
    below = np.zeros((batch, n))
    out = np.empty((batch, n))
    prod = np.zeros(batch)
    for i in order:
        val = wsum[:, i] + by_size[size[:, i]]
        out[:, i] = val - below[:, i]
        p = parents[:, i]
        has = p >= 0
        r, pp = rows[has], p[has]
        size[r, pp] += size[r, i]
        wsum[r, pp] += wsum[r, i]
        below[r, pp] += val[has]
        prod[~has] += val[~has]
    return out, prod


def _submasks(mask):
    """All submasks of ``mask`` in ascending order."""
    bits = [b for b in range(mask.bit_length()) if mask >> b & 1]
    k = len(bits)
    key = tuple(bits)
    hit = _SUBMASK_CACHE.get(key)
    if hit is not None:
        return hit
    ar = np.arange(1 << k, dtype=np.int64)
    sub = np.zeros(1 << k, dtype=np.int64)
    for t, b in enumerate(bits):
        sub |= ((ar >> t) & 1) << b
    if len(_SUBMASK_CACHE) < 4096:
        _SUBMASK_CACHE[key] = sub
    return sub


def superadditive_violation(table, n, tol):
    """First (Q, S) with v(Q | S) < v(Q) + v(S) - tol.

    Scans unions U ascending and, inside U, the parts Q holding the lowest
    member of U in ascending order; returns (-1, -1) when none exists.
    """
    for u in range(3, 1 << n):
        low = u & -u
        if u == low:
            continue
        rest = u ^ low
        q = low | _submasks(rest)[:-1]
        bad = np.flatnonzero(table[u] < table[q] + table[u ^ q] - tol)
        if bad.size:
            qq = int(q[bad[0]])
            return qq, u ^ qq
    return -1, -1
