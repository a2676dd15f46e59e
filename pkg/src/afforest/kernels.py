"""Backend selection for the hot kernels.

The compiled extension ``_ckernels`` is used when it imports; otherwise, or
when ``AFFOREST_PURE_PYTHON=1`` is set, the NumPy implementation in
``_pykernels`` takes over.  Both produce bit-identical results.
"""

import os

import numpy as np

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["cython"] = _ckernels

if os.environ.get("AFFOREST_PURE_PYTHON", "") not in ("", "0") or _ckernels is None:
    _impl = _pykernels
else:
    _impl = _ckernels


def available_backends():
    return sorted(_BACKENDS)


def backend():
    return "cython" if _impl is _ckernels and _ckernels is not None else "python"


def use_backend(name):
    """Switch backends at runtime (used by tests and the benchmark)."""
    global _impl
    try:
        _impl = _BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} is not available; have {available_backends()}") from None


def enumerate_parents(start, stop, nodes, radix, pred_offsets, pred_flat, n):
    return _impl.enumerate_parents(int(start), int(stop), nodes, radix, pred_offsets, pred_flat, n)


def sample_parents(draws, nodes, radix, pred_offsets, pred_flat, n):
    return _impl.sample_parents(draws, nodes, radix, pred_offsets, pred_flat, n)


def marginals(parents, order, form):
    """Marginal contribution rows and per-forest productivity for a batch.

    ``form`` is a game's :meth:`kernel_form`.
    """
    kind, payload = form
    if kind == "table":
        return _impl.marginals_table(parents, order, payload)
    if kind == "separable":
        weights, by_size = payload
        return _impl.marginals_separable(parents, order, np.ascontiguousarray(weights, dtype=float),
                                         np.ascontiguousarray(by_size, dtype=float))
    return _marginals_callable(parents, order, payload)


def _marginals_callable(parents, order, worth):
    # sparse tables beyond the dense limit: one dict lookup per subtree
    batch, n = parents.shape
    out = np.empty((batch, n))
    prod = np.zeros(batch)
    for b in range(batch):
        row = parents[b]
        mask = [1 << i for i in range(n)]
        below = [0.0] * n
        for i in order:
            val = worth(mask[i])
            out[b, i] = val - below[i]
            p = row[i]
            if p >= 0:
                mask[p] |= mask[i]
                below[p] += val
            else:
                prod[b] += val
    return out, prod


def superadditive_violation(table, n, tol):
    return _impl.superadditive_violation(np.ascontiguousarray(table, dtype=float), n, float(tol))
