"""Rewiring selection strategies used by the experiment harness.

``random``
    two distinct edges drawn uniformly, random orientation.
``high-degree``
    all four endpoints lie in the top degree quartile.
``low-degree``
    the new edge ``(u, u')`` joins two bottom-quartile nodes; ``v`` and
    ``v'`` are unconstrained because the bottom quartile of a heavy-tailed
    graph typically spans no edge at all.
``localized``
    every rewiring deletes an edge at one fixed node, so ``R_node = k``.

Degree-targeted strategies never touch a node twice within a plan. Quartiles
hold ``ceil(n/4)`` nodes; ties in degree go to the smaller node index.
"""

from __future__ import annotations

import math

import numpy as np

from .graph import Graph
from .perturbation import (
    Rewiring,
    RewiringPlan,
    apply_rewiring,
    is_valid_rewiring,
    sample_rewiring,
)

STRATEGIES = ("random", "high-degree", "low-degree", "localized")
MAX_RETRIES = 1000


class StrategyError(ValueError):
    pass


def top_quartile(g: Graph) -> list[int]:
    deg = g.degrees()
    order = sorted(range(g.num_nodes), key=lambda u: (-deg[u], u))
    return order[: math.ceil(g.num_nodes / 4)]


def bottom_quartile(g: Graph) -> list[int]:
    deg = g.degrees()
    order = sorted(range(g.num_nodes), key=lambda u: (deg[u], u))
    return order[: math.ceil(g.num_nodes / 4)]


def _sample_localized(
    g: Graph, node: int, rng: np.random.Generator, max_retries: int
) -> Rewiring | None:
    nbrs = g.neighbors[node]
    edges = g.edges()
    if not nbrs or len(edges) < 2:
        return None
    for _ in range(max_retries):
        v = nbrs[rng.integers(len(nbrs))]
        a, b = edges[rng.integers(len(edges))]
        if rng.integers(2):
            a, b = b, a
        r = Rewiring((node, v), (a, b))
        if is_valid_rewiring(g, r):
            return r
    return None


def select_rewirings(
    g: Graph,
    strategy: str,
    k: int,
    seed: int | np.random.Generator,
    node: int | None = None,
    max_retries: int = MAX_RETRIES,
) -> RewiringPlan:
    """Pick ``k`` rewirings, each valid on the graph left by the previous ones.

    If candidates run out the plan is returned short, with ``shortfall``
    counting the missing rewirings.
    """
    if strategy not in STRATEGIES:
        raise StrategyError(f"unknown strategy {strategy!r}; choose from {STRATEGIES}")
    if k < 0:
        raise StrategyError(f"number of rewirings must be nonnegative, got {k}")
    if strategy == "localized":
        if node is None:
            raise StrategyError("the localized strategy needs a node")
        g._check_node(node)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)

    if strategy == "high-degree":
        quartile = set(top_quartile(g))
    elif strategy == "low-degree":
        quartile = set(bottom_quartile(g))
    touched: set[int] = set()

    def targeted(r: Rewiring) -> bool:
        (u, v), (u2, v2) = r.e1, r.e2
        if touched.intersection(r.nodes):
            return False
        if u not in quartile or u2 not in quartile:
            return False
        return strategy == "low-degree" or (v in quartile and v2 in quartile)

    out: list[Rewiring] = []
    cur = g
    for _ in range(k):
        if strategy == "random":
            r = sample_rewiring(cur, rng, max_retries=max_retries)
        elif strategy == "localized":
            r = _sample_localized(cur, node, rng, max_retries)
        else:
            pool = [
                e for e in cur.edges()
                if (e[0] in quartile or e[1] in quartile) and not touched.intersection(e)
            ]
            r = sample_rewiring(cur, rng, edges=pool, max_retries=max_retries, accept=targeted)
        if r is None:
            break
        out.append(r)
        touched.update(r.nodes)
        cur = apply_rewiring(cur, r)
    return RewiringPlan(tuple(out), requested=k, shortfall=k - len(out))
