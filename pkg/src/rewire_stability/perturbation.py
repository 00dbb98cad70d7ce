"""Double edge rewiring and the error matrix it induces on the shift operator.

A rewiring of edges ``(u, v)`` and ``(u', v')`` deletes both and adds
``(u, u')`` and ``(v, v')``. Every node keeps its degree, so only the
off-diagonal entries of the shift operator change, which is what makes the
per-row closed form and the degree-based bound below exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .graph import Edge, Graph
from .shift import NORM_TOL, ShiftOperator, spectral_norm


class RewiringError(ValueError):
    pass


@dataclass(frozen=True)
class Rewiring:
    """Delete ``e1 = (u, v)`` and ``e2 = (u', v')``; add ``(u, u')`` and ``(v, v')``."""

    e1: Edge
    e2: Edge

    @property
    def nodes(self) -> tuple[int, int, int, int]:
        return (*self.e1, *self.e2)

    @property
    def deleted(self) -> tuple[Edge, Edge]:
        return self.e1, self.e2

    @property
    def added(self) -> tuple[Edge, Edge]:
        (u, v), (u2, v2) = self.e1, self.e2
        return (u, u2), (v, v2)

    def format(self) -> str:
        return " ".join(str(x) for x in self.nodes)


def check_rewiring(g: Graph, r: Rewiring) -> None:
    """Raise ``RewiringError`` naming the first violated precondition."""
    (u, v), (u2, v2) = r.e1, r.e2
    for w in r.nodes:
        if not 0 <= w < g.num_nodes:
            raise RewiringError(f"{r.format()}: node {w} out of range")
    if len(set(r.nodes)) != 4:
        raise RewiringError(f"{r.format()}: endpoints must be four distinct nodes")
    for a, b in r.deleted:
        if not g.has_edge(a, b):
            raise RewiringError(f"{r.format()}: edge ({a}, {b}) to delete is absent")
    for a in (u, v):
        for b in (u2, v2):
            if g.has_edge(a, b):
                raise RewiringError(
                    f"{r.format()}: nodes {a} and {b} are already adjacent"
                )


def is_valid_rewiring(g: Graph, r: Rewiring) -> bool:
    try:
        check_rewiring(g, r)
    except RewiringError:
        return False
    return True


def apply_rewiring(g: Graph, r: Rewiring) -> Graph:
    check_rewiring(g, r)
    return g.with_edges(removed=r.deleted, added=r.added)


def apply_plan(g: Graph, rewirings: Iterable[Rewiring]) -> Graph:
    """Apply rewirings in order; each is validated against the current state."""
    for i, r in enumerate(rewirings):
        try:
            g = apply_rewiring(g, r)
        except RewiringError as exc:
            raise RewiringError(f"rewiring #{i}: {exc}") from None
    return g


@dataclass(frozen=True)
class RewiringPlan:
    rewirings: tuple[Rewiring, ...]
    requested: int
    shortfall: int = 0

    def __len__(self) -> int:
        return len(self.rewirings)

    def __iter__(self):
        return iter(self.rewirings)


def format_plan(rewirings: Iterable[Rewiring]) -> str:
    return "".join(r.format() + "\n" for r in rewirings)


def parse_plan(text: str) -> list[Rewiring]:
    """Parse lines ``u v u' v'``; blank lines and ``#`` comments are skipped."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            u, v, u2, v2 = (int(tok) for tok in line.split())
        except ValueError:
            raise RewiringError(f"line {lineno}: expected 'u v u2 v2', got {raw!r}") from None
        out.append(Rewiring((u, v), (u2, v2)))
    return out


def read_plan(path: str | Path) -> list[Rewiring]:
    return parse_plan(Path(path).read_text())


def write_plan(rewirings: Iterable[Rewiring], path: str | Path) -> None:
    Path(path).write_text(format_plan(rewirings))


def sample_rewiring(
    g: Graph,
    rng: np.random.Generator,
    edges: Sequence[Edge] | None = None,
    max_retries: int = 1000,
    accept=None,
) -> Rewiring | None:
    """Draw two distinct edges uniformly with random orientation until valid.

    Args:
        edges: candidate pool; defaults to every edge of ``g``.
        accept: optional extra predicate on the oriented rewiring.

    Returns None after ``max_retries`` rejected draws.
    """
    pool = g.edges() if edges is None else list(edges)
    if len(pool) < 2:
        return None
    for _ in range(max_retries):
        i, j = rng.choice(len(pool), size=2, replace=False)
        flips = rng.integers(0, 2, size=2)
        a, b = pool[i]
        c, d = pool[j]
        r = Rewiring((b, a) if flips[0] else (a, b), (d, c) if flips[1] else (c, d))
        if is_valid_rewiring(g, r) and (accept is None or accept(r)):
            return r
    return None


def random_plan(g: Graph, k: int, seed: int, max_retries: int = 1000) -> RewiringPlan:
    rng = np.random.default_rng(seed)
    out: list[Rewiring] = []
    cur = g
    for _ in range(k):
        r = sample_rewiring(cur, rng, max_retries=max_retries)
        if r is None:
            break
        out.append(r)
        cur = apply_rewiring(cur, r)
    return RewiringPlan(tuple(out), requested=k, shortfall=k - len(out))


@dataclass(frozen=True)
class RewiringSummary:
    """Per-node bookkeeping of a perturbation.

    Attributes:
        counts: ``R_u``, raw number of rewirings touching each node.
        deleted_neighbors: net set of neighbours each node lost.
        added_neighbors: net set of neighbours each node gained.
        delta: smallest original degree among every node ``u`` was
            disconnected from or connected to (0 where ``R_u == 0``).
        degrees_before, degrees_after: degree sequences of both graphs.
    """

    counts: np.ndarray
    deleted_neighbors: tuple[frozenset[int], ...]
    added_neighbors: tuple[frozenset[int], ...]
    delta: np.ndarray
    degrees_before: np.ndarray
    degrees_after: np.ndarray

    @property
    def degree_preserving(self) -> bool:
        return bool(np.array_equal(self.degrees_before, self.degrees_after))

    @property
    def num_nodes(self) -> int:
        return len(self.counts)


def _net_changes(g: Graph, gp: Graph):
    before, after = g.edge_set(), gp.edge_set()
    deleted = [set() for _ in range(g.num_nodes)]
    added = [set() for _ in range(g.num_nodes)]
    for a, b in before - after:
        deleted[a].add(b)
        deleted[b].add(a)
    for a, b in after - before:
        added[a].add(b)
        added[b].add(a)
    return tuple(map(frozenset, deleted)), tuple(map(frozenset, added))


def summarize_plan(g: Graph, rewirings: Iterable[Rewiring]) -> RewiringSummary:
    rewirings = list(rewirings)
    gp = apply_plan(g, rewirings)
    deg = g.degrees()
    n = g.num_nodes
    counts = np.zeros(n, dtype=np.int64)
    partners: list[set[int]] = [set() for _ in range(n)]
    for r in rewirings:
        for a, b in (*r.deleted, *r.added):
            partners[a].add(b)
            partners[b].add(a)
        for w in r.nodes:
            counts[w] += 1
    delta = np.array([min((deg[p] for p in ps), default=0) for ps in partners], dtype=np.int64)
    deleted, added = _net_changes(g, gp)
    return RewiringSummary(counts, deleted, added, delta, deg, gp.degrees())


def summarize_perturbation(g: Graph, gp: Graph) -> RewiringSummary:
    """Summary of an arbitrary edge perturbation from the net edge difference.

    ``R_u`` is taken as ``max(|D_u|, |A_u|)``, the number of rewirings a pure
    rewiring sequence would need to produce the same change at ``u``.
    """
    if g.num_nodes != gp.num_nodes:
        raise RewiringError("graphs have different numbers of nodes")
    deleted, added = _net_changes(g, gp)
    deg = g.degrees()
    counts = np.array([max(len(d), len(a)) for d, a in zip(deleted, added)], dtype=np.int64)
    delta = np.array(
        [min((deg[p] for p in d | a), default=0) for d, a in zip(deleted, added)],
        dtype=np.int64,
    )
    return RewiringSummary(counts, deleted, added, delta, deg, gp.degrees())


@dataclass(frozen=True, eq=False)
class ErrorMatrix:
    """``E = S_p - S`` for two operators sharing ``gamma``."""

    matrix: np.ndarray
    gamma: float


def error_matrix(s: ShiftOperator, sp: ShiftOperator) -> ErrorMatrix:
    if s.n != sp.n:
        raise RewiringError(f"operators have different sizes ({s.n} vs {sp.n})")
    if s.gamma != sp.gamma:
        raise RewiringError(f"operators use different gamma ({s.gamma} vs {sp.gamma})")
    return ErrorMatrix(sp.matrix - s.matrix, s.gamma)


def row_norms(e: ErrorMatrix) -> np.ndarray:
    """Manhattan norm of every row of ``E``."""
    return np.abs(e.matrix).sum(axis=1)


def norm_one(e: ErrorMatrix) -> float:
    return float(np.max(row_norms(e), initial=0.0))


def norm_max(e: ErrorMatrix) -> float:
    return float(np.max(np.abs(e.matrix), initial=0.0))


def norm_two(e: ErrorMatrix, tol: float = NORM_TOL) -> float:
    return spectral_norm(e.matrix, tol=tol)


def _require_degree_preserving(summary: RewiringSummary) -> None:
    if not summary.degree_preserving:
        changed = np.flatnonzero(summary.degrees_before != summary.degrees_after)
        raise RewiringError(
            f"perturbation changes the degree of node(s) {changed[:10].tolist()}; "
            "the closed form and rewiring bound need every degree preserved"
        )


def row_norm_closed_form(g: Graph, summary: RewiringSummary, gamma: float, u: int) -> float:
    """Row Manhattan norm of ``E`` at ``u`` from degrees alone.

    Every deleted or added neighbour ``v`` contributes one flipped entry of
    size ``1/sqrt((d_u+gamma)(d_v+gamma))``.
    """
    _require_degree_preserving(summary)
    g._check_node(u)
    deg = g.degrees().astype(float) + gamma
    inner = sum(1.0 / np.sqrt(deg[v]) for v in sorted(summary.deleted_neighbors[u]))
    inner += sum(1.0 / np.sqrt(deg[v]) for v in sorted(summary.added_neighbors[u]))
    return float(inner / np.sqrt(deg[u]))


def bound_term(r_u, d_u, delta_u, gamma):
    """Per-node rewiring bound ``2 R_u / sqrt((d_u+gamma)(delta_u+gamma))``."""
    r_u = np.asarray(r_u, dtype=float)
    denom = np.sqrt((np.asarray(d_u, dtype=float) + gamma) * (np.asarray(delta_u, dtype=float) + gamma))
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(r_u > 0, 2.0 * r_u / np.where(r_u > 0, denom, 1.0), 0.0)


def rewiring_bound_terms(g: Graph, summary: RewiringSummary, gamma: float) -> np.ndarray:
    _require_degree_preserving(summary)
    return bound_term(summary.counts, g.degrees(), summary.delta, gamma)


def rewiring_bound(g: Graph, summary: RewiringSummary, gamma: float) -> float:
    """Upper bound on ``||E||_1`` (hence ``||E||_2``) for a rewiring sequence."""
    return float(np.max(rewiring_bound_terms(g, summary, gamma), initial=0.0))
