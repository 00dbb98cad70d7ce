"""Seeded random graph models."""

from __future__ import annotations

import numpy as np

from .graph import Graph, GraphError, graph_from_edge_list


def erdos_renyi(n: int, p: float, rng: np.random.Generator) -> Graph:
    """G(n, p): each of the ``n(n-1)/2`` pairs is an edge independently with probability ``p``."""
    if n < 1:
        raise GraphError(f"n must be positive, got {n}")
    if not 0.0 < p <= 1.0:
        raise GraphError(f"p must lie in (0, 1], got {p}")
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < p
    return graph_from_edge_list(n, zip(iu[keep].tolist(), ju[keep].tolist()))


def barabasi_albert(n: int, m: int, rng: np.random.Generator) -> Graph:
    """Preferential attachment seeded with the complete graph on ``m`` nodes.

    Each arriving node ``t = m..n-1`` attaches to ``m`` distinct existing
    nodes drawn with probability proportional to degree (uniformly while all
    degrees are zero); draws that hit an already chosen target are redrawn.
    The result has exactly ``m(m-1)/2 + m(n-m)`` edges.
    """
    if m < 1:
        raise GraphError(f"m must be at least 1, got {m}")
    if m >= n:
        raise GraphError(f"Barabasi-Albert needs m < n, got m={m}, n={n}")
    edges = [(u, v) for u in range(m) for v in range(u + 1, m)]
    deg = np.zeros(n)
    deg[:m] = m - 1
    for t in range(m, n):
        weights = deg[:t]
        total = weights.sum()
        prob = weights / total if total > 0 else np.full(t, 1.0 / t)
        targets: set[int] = set()
        while len(targets) < m:
            targets.add(int(rng.choice(t, p=prob)))
        for v in sorted(targets):
            edges.append((v, t))
            deg[v] += 1
        deg[t] = m
    return graph_from_edge_list(n, edges)


def ba_edge_count(n: int, m: int) -> int:
    return m * (m - 1) // 2 + m * (n - m)
