"""Bottleneck and interleaving distances between finite barcodes.

Matching ``[a, d)`` with ``[a', d')`` costs ``max(|a - a'|, |d - d'|)``
and leaving a finite bar unmatched costs half its length.  Infinite bars
can only be matched with infinite bars.
"""

from __future__ import annotations

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .barcode import INF, Barcode


def _split(barcode: Barcode):
    finite, infinite = [], []
    for b, d in barcode.expanded():
        (infinite if d == INF else finite).append((b, d))
    return finite, sorted(b for b, _ in infinite)


def _perfect_matching_exists(X, Y, cost, del_x, del_y, delta) -> bool:
    n, m = len(X), len(Y)
    size = n + m
    rows, cols = [], []
    # left side: X then diagonal copies of Y; right side: Y then diagonal copies of X
    ii, jj = np.nonzero(cost <= delta)
    rows.extend(ii.tolist())
    cols.extend(jj.tolist())
    for i in np.nonzero(del_x <= delta)[0]:
        rows.append(int(i))
        cols.append(m + int(i))
    for j in np.nonzero(del_y <= delta)[0]:
        rows.append(n + int(j))
        cols.append(int(j))
    for j in range(m):
        for i in range(n):
            rows.append(n + j)
            cols.append(m + i)
    graph = csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(size, size))
    match = maximum_bipartite_matching(graph, perm_type="column")
    return bool(np.all(match >= 0))


def bottleneck(b1: Barcode, b2: Barcode) -> float:
    """Bottleneck distance, exact: binary search over the finite set of
    candidate costs with a bipartite-matching feasibility test at each."""
    fin1, inf1 = _split(b1)
    fin2, inf2 = _split(b2)
    if len(inf1) != len(inf2):
        return INF
    # sorted order is an optimal bottleneck matching of points on a line
    inf_part = max((abs(x - y) for x, y in zip(inf1, inf2)), default=0.0)
    if not fin1 and not fin2:
        return float(inf_part)
    X = np.array(fin1, dtype=float).reshape(-1, 2)
    Y = np.array(fin2, dtype=float).reshape(-1, 2)
    del_x = (X[:, 1] - X[:, 0]) / 2
    del_y = (Y[:, 1] - Y[:, 0]) / 2
    cost = np.maximum(
        np.abs(X[:, None, 0] - Y[None, :, 0]),
        np.abs(X[:, None, 1] - Y[None, :, 1]),
    )
    upper = max(del_x.max(initial=0.0), del_y.max(initial=0.0))
    candidates = np.unique(np.concatenate([[0.0], cost.ravel(), del_x, del_y]))
    candidates = candidates[candidates <= upper]
    lo, hi = 0, len(candidates) - 1  # candidates[hi] == upper is always feasible
    while lo < hi:
        mid = (lo + hi) // 2
        if _perfect_matching_exists(X, Y, cost, del_x, del_y, candidates[mid]):
            hi = mid
        else:
            lo = mid + 1
    return float(max(candidates[lo], inf_part))


def interleaving(b1: Barcode, b2: Barcode) -> float:
    """Interleaving distance of the interval-decomposable modules with these
    barcodes; by the isometry theorem it equals the bottleneck distance."""
    return bottleneck(b1, b2)
