"""Counting componentwise dominance in the standard orthant.

``dominance_counts(y)[i] == #{j : y[j] >= y[i] componentwise}``. The closed
inequality means every point counts itself. The fast paths return exactly the
same integers as the brute-force double loop.
"""

from __future__ import annotations

import numpy as np

_BLOCK_ELEMS = 4_000_000


def naive_counts(y: np.ndarray) -> np.ndarray:
    """Reference O(m^2 n) count, vectorized one row block at a time."""
    y = np.asarray(y, dtype=float)
    m, n = y.shape
    out = np.empty(m, dtype=np.int64)
    step = max(1, _BLOCK_ELEMS // max(1, m * n))
    for a in range(0, m, step):
        blk = y[a:a + step]
        out[a:a + step] = np.all(y[None, :, :] >= blk[:, None, :], axis=2).sum(axis=1)
    return out


def _counts_2d(y: np.ndarray) -> np.ndarray:
    # Sweep in decreasing first coordinate; a Fenwick tree over second-coordinate
    # ranks counts already-inserted points with y2 >= y2_i. Ties in the first
    # coordinate are inserted as a group before querying.
    m = y.shape[0]
    _, rank = np.unique(y[:, 1], return_inverse=True)
    rank = rank.ravel()
    k = int(rank.max()) + 1
    # reversed ranks so that "y2 >= v" becomes a prefix query
    rev = (k - 1 - rank) + 1
    tree = [0] * (k + 1)
    order = np.lexsort((-y[:, 1], -y[:, 0]))
    first = y[order, 0]
    out = np.empty(m, dtype=np.int64)
    rev_l = rev.tolist()
    order_l = order.tolist()
    i = 0
    while i < m:
        j = i
        while j + 1 < m and first[j + 1] == first[i]:
            j += 1
        for p in order_l[i:j + 1]:
            r = rev_l[p]
            while r <= k:
                tree[r] += 1
                r += r & -r
        for p in order_l[i:j + 1]:
            r = rev_l[p]
            s = 0
            while r > 0:
                s += tree[r]
                r -= r & -r
            out[p] = s
        i = j + 1
    return out


def _counts_sorted_blocks(y: np.ndarray) -> np.ndarray:
    # Sort by first coordinate descending; a point can only be dominated by the
    # prefix of points whose first coordinate is >= its own.
    m, n = y.shape
    order = np.argsort(-y[:, 0], kind="stable")
    ys = y[order]
    neg_first = -ys[:, 0]
    # number of points with first coordinate >= ys[i, 0]
    prefix = np.searchsorted(neg_first, neg_first, side="right")
    out_sorted = np.empty(m, dtype=np.int64)
    step = max(1, _BLOCK_ELEMS // max(1, m * n))
    rest = ys[:, 1:]
    for a in range(0, m, step):
        b = min(m, a + step)
        end = int(prefix[b - 1])
        blk = rest[a:b]
        cand = rest[:end]
        dom = np.all(cand[None, :, :] >= blk[:, None, :], axis=2)
        # candidates beyond a row's own prefix cannot dominate it
        mask = np.arange(end)[None, :] < prefix[a:b, None]
        out_sorted[a:b] = (dom & mask).sum(axis=1)
    out = np.empty(m, dtype=np.int64)
    out[order] = out_sorted
    return out


def dominance_counts(y, method: str = "auto") -> np.ndarray:
    """Number of rows of ``y`` dominating each row (inclusive).

    Parameters
    ----------
    y : array_like, shape (m, n)
    method : {"auto", "sweep", "blocks", "naive"}
        ``sweep`` needs n == 2. ``auto`` picks ``sweep`` for n == 2 and
        ``blocks`` otherwise.
    """
    y = np.asarray(y, dtype=float)
    if y.ndim != 2 or y.shape[0] == 0:
        raise ValueError(f"expected a non-empty (m, n) array, got shape {y.shape}")
    if method == "auto":
        method = "sweep" if y.shape[1] == 2 else "blocks"
    if method == "sweep":
        if y.shape[1] != 2:
            raise ValueError("sweep counting is only defined for n == 2")
        return _counts_2d(y)
    if method == "blocks":
        if y.shape[1] == 1:
            return naive_counts(y)
        return _counts_sorted_blocks(y)
    if method == "naive":
        return naive_counts(y)
    raise ValueError(f"unknown method {method!r}")
