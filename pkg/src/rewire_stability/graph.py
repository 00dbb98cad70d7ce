"""Undirected, unweighted graphs with a fixed node labelling.

Graphs are immutable: ``add_edge`` and ``delete_edge`` return new graphs so the
original and perturbed topology can be held side by side.
"""

from __future__ import annotations

from bisect import bisect_left, insort
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, TextIO

import numpy as np

Edge = tuple[int, int]


class GraphError(ValueError):
    """Invalid graph construction or mutation."""


def _canonical(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on nodes ``0..num_nodes-1``.

    Adjacency is stored as one sorted tuple of neighbours per node.
    """

    num_nodes: int
    neighbors: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.neighbors) != self.num_nodes:
            raise GraphError(
                f"expected {self.num_nodes} neighbour lists, got {len(self.neighbors)}"
            )

    def _check_node(self, u: int) -> None:
        if not 0 <= u < self.num_nodes:
            raise GraphError(f"node {u} out of range for graph with {self.num_nodes} nodes")

    def degree(self, u: int) -> int:
        self._check_node(u)
        return len(self.neighbors[u])

    def degrees(self) -> np.ndarray:
        return np.array([len(nb) for nb in self.neighbors], dtype=np.int64)

    def has_edge(self, u: int, v: int) -> bool:
        self._check_node(u)
        self._check_node(v)
        nb = self.neighbors[u]
        i = bisect_left(nb, v)
        return i < len(nb) and nb[i] == v

    @property
    def num_edges(self) -> int:
        return sum(len(nb) for nb in self.neighbors) // 2

    def edges(self) -> list[Edge]:
        """All edges as ``(u, v)`` with ``u < v``, sorted lexicographically."""
        return [(u, v) for u, nb in enumerate(self.neighbors) for v in nb if u < v]

    def edge_set(self) -> frozenset[Edge]:
        return frozenset(self.edges())

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.num_nodes, self.num_nodes))
        for u, nb in enumerate(self.neighbors):
            a[u, list(nb)] = 1.0
        return a

    def isolated_nodes(self) -> list[int]:
        return [u for u, nb in enumerate(self.neighbors) if not nb]

    def _with(self, u: int, v: int, add: bool) -> Graph:
        lists = [list(nb) for nb in self.neighbors]
        if add:
            insort(lists[u], v)
            insort(lists[v], u)
        else:
            lists[u].remove(v)
            lists[v].remove(u)
        return Graph(self.num_nodes, tuple(tuple(nb) for nb in lists))

    def add_edge(self, u: int, v: int) -> Graph:
        if u == v:
            raise GraphError(f"cannot add self-loop ({u}, {u})")
        if self.has_edge(u, v):
            raise GraphError(f"edge ({u}, {v}) already present")
        return self._with(u, v, add=True)

    def delete_edge(self, u: int, v: int) -> Graph:
        if u == v or not self.has_edge(u, v):
            raise GraphError(f"edge ({u}, {v}) not present")
        return self._with(u, v, add=False)

    def with_edges(self, removed: Iterable[Edge] = (), added: Iterable[Edge] = ()) -> Graph:
        """Batch mutation; deletions are applied before additions."""
        g = self
        for u, v in removed:
            g = g.delete_edge(u, v)
        for u, v in added:
            g = g.add_edge(u, v)
        return g


def graph_from_edge_list(n: int, pairs: Iterable[Sequence[int]]) -> Graph:
    """Build a graph from node pairs; duplicates and both orientations collapse."""
    if n < 0:
        raise GraphError(f"number of nodes must be nonnegative, got {n}")
    seen: set[Edge] = set()
    for pair in pairs:
        u, v = (int(x) for x in pair)
        for w in (u, v):
            if not 0 <= w < n:
                raise GraphError(f"endpoint {w} of pair ({u}, {v}) out of range 0..{n - 1}")
        if u == v:
            raise GraphError(f"self-loop ({u}, {u}) not allowed")
        seen.add(_canonical(u, v))
    lists: list[list[int]] = [[] for _ in range(n)]
    for u, v in seen:
        lists[u].append(v)
        lists[v].append(u)
    return Graph(n, tuple(tuple(sorted(nb)) for nb in lists))


def complete_graph(n: int) -> Graph:
    return graph_from_edge_list(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


# Edge-list text format: header "n m", then m lines "u v"; '#' starts a comment.

def parse_edge_list(text: str) -> Graph:
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 2:
            raise GraphError(f"line {lineno}: expected two integers, got {raw!r}")
        try:
            rows.append((int(fields[0]), int(fields[1])))
        except ValueError:
            raise GraphError(f"line {lineno}: expected two integers, got {raw!r}") from None
    if not rows:
        raise GraphError("edge list is missing the 'n m' header")
    (n, m), pairs = rows[0], rows[1:]
    if len(pairs) != m:
        raise GraphError(f"header announces {m} edges but {len(pairs)} were given")
    return graph_from_edge_list(n, pairs)


def format_edge_list(g: Graph) -> str:
    edges = g.edges()
    lines = [f"{g.num_nodes} {len(edges)}"] + [f"{u} {v}" for u, v in edges]
    return "\n".join(lines) + "\n"


def read_edge_list(path: str | Path | TextIO) -> Graph:
    if hasattr(path, "read"):
        return parse_edge_list(path.read())
    return parse_edge_list(Path(path).read_text())


def write_edge_list(g: Graph, path: str | Path) -> None:
    Path(path).write_text(format_edge_list(g))
