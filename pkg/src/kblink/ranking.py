"""Sparse HITS and PageRank iterations over integer-indexed edge lists.

Both routines run sequentially over scipy CSR matrices, so results are
bitwise reproducible for a fixed node order.
"""
from __future__ import annotations

from typing import Callable, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp


class EmptyGraph(ValueError):
    pass


def _adjacency(n: int, src: Sequence[int], dst: Sequence[int]) -> sp.csr_matrix:
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    adj = sp.csr_matrix((np.ones(len(src)), (src, dst)), shape=(n, n))
    # parallel edges collapse
    adj.data[:] = 1.0
    return adj


def pagerank(
    n: int,
    src: Sequence[int],
    dst: Sequence[int],
    alpha: float = 0.15,
    iterations: int = 50,
    tol: Optional[float] = None,
    callback: Optional[Callable[[int, np.ndarray], None]] = None,
) -> np.ndarray:
    """Damped PageRank with uniform teleport and uniform dangling redistribution.

    ``alpha`` is the teleport probability, so the damping factor is
    ``1 - alpha``. Runs ``iterations`` steps, or stops early once the L1
    change drops below ``tol`` when one is given.
    """
    if n == 0:
        raise EmptyGraph("PageRank on an empty graph")
    adj = _adjacency(n, src, dst)
    outdeg = np.asarray(adj.sum(axis=1)).ravel()
    dangling = outdeg == 0
    inv = np.zeros(n)
    inv[~dangling] = 1.0 / outdeg[~dangling]
    # transition[v, u] = 1/outdeg(u) for every edge u -> v
    transition = (sp.diags(inv) @ adj).T.tocsr()
    pr = np.full(n, 1.0 / n)
    for it in range(iterations):
        spread = transition @ pr + pr[dangling].sum() / n
        new = alpha / n + (1.0 - alpha) * spread
        delta = np.abs(new - pr).sum()
        pr = new
        if callback is not None:
            callback(it, pr)
        if tol is not None and delta < tol:
            break
    return pr


def _l2_normalize(vec: np.ndarray) -> np.ndarray:
    norm = np.sqrt(np.dot(vec, vec))
    if norm == 0.0:
        return vec
    return vec / norm


def hits(
    n: int,
    src: Sequence[int],
    dst: Sequence[int],
    iterations: int = 20,
    callback: Optional[Callable[[int, np.ndarray, np.ndarray], None]] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """Return (authority, hub) after exactly ``iterations`` HITS rounds.

    Each round sets authorities from current hubs, then hubs from the new
    authorities, then L2-normalizes both. All-zero vectors stay zero.
    """
    adj = _adjacency(n, src, dst)
    adj_t = adj.T.tocsr()
    auth = np.ones(n)
    hub = np.ones(n)
    for it in range(iterations):
        auth = _l2_normalize(adj_t @ hub)
        hub = _l2_normalize(adj @ auth)
        if callback is not None:
            callback(it, auth, hub)
    return auth, hub
