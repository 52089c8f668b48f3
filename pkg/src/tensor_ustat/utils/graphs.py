"""Decomposition graphs, vertex elimination and treewidth.

Graphs here are small (a handful of indices), so everything works on plain
adjacency sets. Exact treewidth is a branch-and-bound over elimination orders
in the style of QuickBB: a min-fill upper bound, degeneracy / minor-min-width
lower bounds, the simplicial-vertex rule and memoization on eliminated sets.
"""

from __future__ import annotations

import logging
from collections.abc import Hashable, Iterable, Mapping, Sequence
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional

import networkx as nx

from ..errors import GroundSetMismatch, OutOfTable, TooLarge, VertexAbsent
from ..models import EngineConfig, Heuristic

if TYPE_CHECKING:
    from .partitions import SetPartition

logger = logging.getLogger(__name__)

Adjacency = dict[int, set[int]]

# largest treewidth of any simple graph with e edges.
_MAX_TREEWIDTH_BY_EDGES = (1, 1, 2, 2, 2, 3, 3, 3, 3, 4, 4, 4, 4, 4, 5)


class SimpleGraph:
    """Finite undirected graph without self-loops.

    Vertices are integer ids; `labels` optionally names them (partition blocks
    for quotient graphs). Instances are immutable.
    """

    __slots__ = ("_adj", "labels")

    def __init__(
        self,
        adjacency: Mapping[int, Iterable[int]],
        labels: Optional[Mapping[int, Hashable]] = None,
    ) -> None:
        adj: dict[int, frozenset[int]] = {}
        for v, nbrs in adjacency.items():
            adj[int(v)] = frozenset(int(u) for u in nbrs)
        for v, nbrs in adj.items():
            if v in nbrs:
                raise ValueError(f"self-loop at vertex {v}")
            for u in nbrs:
                if u not in adj or v not in adj[u]:
                    raise ValueError(f"adjacency is not symmetric between {v} and {u}")
        self._adj = adj
        self.labels = dict(labels) if labels is not None else None

    @classmethod
    def from_edges(
        cls, vertices: Iterable[int], edges: Iterable[tuple[int, int]]
    ) -> SimpleGraph:
        """Build a graph; duplicate edges collapse, self-loops are rejected."""
        adj: Adjacency = {int(v): set() for v in vertices}
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            adj.setdefault(u, set()).add(v)
            adj.setdefault(v, set()).add(u)
        return cls(adj)

    @classmethod
    def from_networkx(cls, graph: nx.Graph) -> SimpleGraph:
        return cls.from_edges(graph.nodes, graph.edges)

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(self.vertices)
        graph.add_edges_from(self.edges)
        return graph

    @property
    def vertices(self) -> list[int]:
        return sorted(self._adj)

    @property
    def vertex_count(self) -> int:
        return len(self._adj)

    @property
    def edges(self) -> list[tuple[int, int]]:
        return sorted((u, v) for u, nbrs in self._adj.items() for v in nbrs if u < v)

    @property
    def edge_count(self) -> int:
        return sum(len(nbrs) for nbrs in self._adj.values()) // 2

    def neighbors(self, v: int) -> frozenset[int]:
        if v not in self._adj:
            raise VertexAbsent(v)
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    def __contains__(self, v: object) -> bool:
        return v in self._adj

    def adjacency(self) -> Adjacency:
        """Mutable copy of the adjacency sets."""
        return {v: set(nbrs) for v, nbrs in self._adj.items()}

    def remove_edge(self, u: int, v: int) -> SimpleGraph:
        adj = self.adjacency()
        adj[u].discard(v)
        adj[v].discard(u)
        return SimpleGraph(adj)

    def canonical_form(self) -> tuple[tuple[int, ...], ...]:
        """Sorted adjacency after relabeling sorted vertex ids to 0..k-1."""
        relabel = {v: i for i, v in enumerate(self.vertices)}
        return tuple(tuple(sorted(relabel[u] for u in self._adj[v])) for v in self.vertices)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SimpleGraph):
            return NotImplemented
        return self._adj == other._adj

    def __hash__(self) -> int:
        return hash(tuple((v, tuple(sorted(self._adj[v]))) for v in self.vertices))

    def __repr__(self) -> str:
        return f"SimpleGraph(vertices={self.vertex_count}, edges={self.edges})"


@dataclass(frozen=True)
class EliminationOrder:
    """A vertex-elimination order and the width it attains."""

    order: tuple[int, ...]
    predicted_width: int

    def predicted_peak_entries(self, extent: int) -> int:
        return extent ** (self.predicted_width + 1)


def decomposition_graph(signature: Sequence[Sequence[int]]) -> SimpleGraph:
    """Graph on indices with an edge for every pair co-occurring in some tuple."""
    adj: Adjacency = {}
    for tup in signature:
        members = set(tup)
        for i in members:
            adj.setdefault(i, set()).update(members - {i})
    return SimpleGraph(adj)


def _eliminate_inplace(adj: Adjacency, v: int) -> int:
    """Eliminate v from a mutable adjacency; returns v's degree at elimination."""
    nbrs = adj.pop(v)
    for u in nbrs:
        adj[u].discard(v)
        adj[u].update(nbrs - {u})
    return len(nbrs)


def eliminate_vertex(g: SimpleGraph, v: int) -> SimpleGraph:
    """Connect v's neighbors pairwise, then delete v."""
    if v not in g:
        raise VertexAbsent(v)
    adj = g.adjacency()
    _eliminate_inplace(adj, v)
    return SimpleGraph(adj)


def elimination_width(g: SimpleGraph, order: Sequence[int]) -> int:
    """Max degree met while eliminating vertices of g in the given order."""
    if sorted(order) != g.vertices:
        raise ValueError("order is not a permutation of the graph's vertices")
    adj = g.adjacency()
    return max((_eliminate_inplace(adj, v) for v in order), default=0)


def _fill_in(adj: Adjacency, v: int) -> int:
    nbrs = sorted(adj[v])
    return sum(
        1 for i, a in enumerate(nbrs) for b in nbrs[i + 1 :] if b not in adj[a]
    )


def _is_clique(adj: Adjacency, vertices: Iterable[int]) -> bool:
    vs = list(vertices)
    return all(b in adj[a] for i, a in enumerate(vs) for b in vs[i + 1 :])


def greedy_order(
    adj: Adjacency,
    heuristic: Heuristic,
    candidates: Optional[Iterable[int]] = None,
) -> tuple[list[int], int]:
    """Greedy elimination of `candidates` (default: every vertex) from a mutable adjacency.

    Ties go to the lowest vertex id. Returns the order and its width.
    """
    pending = set(adj) if candidates is None else set(candidates)
    order: list[int] = []
    width = 0
    while pending:
        if heuristic is Heuristic.MIN_FILL:
            v = min(pending, key=lambda u: (_fill_in(adj, u), u))
        else:
            v = min(pending, key=lambda u: (len(adj[u]), u))
        width = max(width, _eliminate_inplace(adj, v))
        pending.discard(v)
        order.append(v)
    return order, width


def treewidth_upper(
    g: SimpleGraph, heuristic: Heuristic = Heuristic.MIN_FILL
) -> tuple[int, EliminationOrder]:
    """Width of a heuristic elimination order; always >= the treewidth."""
    order, width = greedy_order(g.adjacency(), Heuristic(heuristic))
    return width, EliminationOrder(tuple(order), width)


def _degeneracy(adj: Adjacency) -> int:
    work = {v: set(nbrs) for v, nbrs in adj.items()}
    best = 0
    while work:
        v = min(work, key=lambda u: (len(work[u]), u))
        best = max(best, len(work[v]))
        for u in work.pop(v):
            work[u].discard(v)
    return best


def degeneracy(g: SimpleGraph) -> int:
    """Max over min-degree peeling of the minimum degree at removal."""
    return _degeneracy(g.adjacency())


def _minor_min_width(adj: Adjacency) -> int:
    work = {v: set(nbrs) for v, nbrs in adj.items()}
    best = 0
    while work:
        v = min(work, key=lambda u: (len(work[u]), u))
        best = max(best, len(work[v]))
        nbrs = work.pop(v)
        if not nbrs:
            continue
        # contract v into its neighbor sharing the fewest neighbors with it
        u = min(nbrs, key=lambda w: (len(work[w] & nbrs), w))
        for w in nbrs:
            work[w].discard(v)
        for w in nbrs - {u}:
            work[w].add(u)
            work[u].add(w)
    return best


def minor_min_width(g: SimpleGraph) -> int:
    """Contraction-based treewidth lower bound."""
    return _minor_min_width(g.adjacency())


def branch_and_bound_order(
    adj: Adjacency, candidates: Optional[Iterable[int]] = None
) -> tuple[list[int], int]:
    """Exact minimum width of eliminating `candidates` (default: all vertices).

    Vertices outside `candidates` stay in the graph; when they form a clique
    (einsum outputs) the result is also the width of eliminating them last.
    """
    pending0 = frozenset(adj) if candidates is None else frozenset(candidates)
    best_order, best = greedy_order({v: set(n) for v, n in adj.items()}, Heuristic.MIN_FILL, pending0)
    alt_order, alt = greedy_order({v: set(n) for v, n in adj.items()}, Heuristic.MIN_DEGREE, pending0)
    if alt < best:
        best_order, best = alt_order, alt
    lower = max(_degeneracy(adj), _minor_min_width(adj)) if candidates is None else 0
    if lower >= best:
        return best_order, best

    seen: dict[frozenset[int], int] = {}
    state = {"best": best, "order": best_order}

    def search(work: Adjacency, pending: frozenset[int], prefix: list[int], running: int) -> None:
        if running >= state["best"]:
            return
        if not pending:
            state["best"], state["order"] = running, list(prefix)
            return
        # every remaining degree is below the number of remaining vertices
        if len(work) - 1 <= running:
            state["best"], state["order"] = running, prefix + sorted(pending)
            return
        eliminated = frozenset(adj) - frozenset(work)
        if seen.get(eliminated, state["best"] + 1) <= running:
            return
        seen[eliminated] = running
        if candidates is None and max(running, _degeneracy(work)) >= state["best"]:
            return

        ordered = sorted(pending, key=lambda u: (len(work[u]), u))
        if candidates is None:
            for v in ordered:
                if _is_clique(work, work[v]):
                    ordered = [v]
                    break
        for v in ordered:
            step = max(running, len(work[v]))
            if step >= state["best"]:
                continue
            child = {u: set(n) for u, n in work.items()}
            _eliminate_inplace(child, v)
            search(child, pending - {v}, prefix + [v], step)

    search({v: set(n) for v, n in adj.items()}, pending0, [], 0)
    return state["order"], state["best"]


def treewidth_exact(
    g: SimpleGraph, config: Optional[EngineConfig] = None
) -> tuple[int, EliminationOrder]:
    """Treewidth as the min over orders of the max elimination degree, with a witness."""
    config = config or EngineConfig()
    if g.vertex_count > config.treewidth_exact_limit:
        raise TooLarge(
            f"{g.vertex_count} vertices exceeds exact treewidth limit {config.treewidth_exact_limit}"
        )
    if g.vertex_count == 0:
        return 0, EliminationOrder((), 0)
    order, width = branch_and_bound_order(g.adjacency())
    logger.debug("treewidth %d for %r via order %s", width, g, order)
    return width, EliminationOrder(tuple(order), width)


def quotient_graph(g: SimpleGraph, partition: SetPartition) -> SimpleGraph:
    """Blocks become vertices; blocks are adjacent when an original edge joins them."""
    if g.vertices != list(range(partition.m)):
        raise GroundSetMismatch(
            f"partition of [{partition.m}] does not cover vertices {g.vertices}"
        )
    rgs = partition.rgs
    adj: Adjacency = {b: set() for b in range(partition.size)}
    for u, v in g.edges:
        a, b = rgs[u], rgs[v]
        if a != b:
            adj[a].add(b)
            adj[b].add(a)
    return SimpleGraph(adj, labels=dict(enumerate(partition.blocks)))


def max_treewidth_by_edges(e: int) -> int:
    """t(e): the largest treewidth of a simple graph with e edges, for 1 <= e <= 15."""
    if not 1 <= e <= len(_MAX_TREEWIDTH_BY_EDGES):
        raise OutOfTable(f"t(e) is tabulated for 1 <= e <= 15, got {e}")
    return _MAX_TREEWIDTH_BY_EDGES[e - 1]


_K5_RING = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2), (2, 4), (4, 1), (1, 3), (3, 0)]

_WITNESS_EDGES: dict[int, list[tuple[int, int]]] = {
    1: [(0, 1)],
    2: [(0, 1), (1, 2)],
    3: [(0, 1), (1, 2), (2, 0)],
    4: [(0, 1), (1, 3), (2, 3), (0, 3)],
    5: [(0, 1), (1, 3), (2, 3), (0, 3), (2, 4)],
    6: [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3)],
    7: [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3), (2, 4)],
    8: [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (2, 4), (4, 5)],
    9: [(0, 1), (1, 3), (3, 4), (2, 5), (5, 4), (0, 3), (1, 4), (0, 4), (2, 6)],
    10: list(_K5_RING),
    11: _K5_RING + [(5, 0)],
    12: _K5_RING + [(5, 0), (5, 1)],
    13: _K5_RING + [(5, 0), (6, 0), (5, 6)],
    14: _K5_RING + [(6, 0), (7, 0), (5, 6), (7, 5)],
    15: [(a, b) for a in range(6) for b in range(a + 1, 6)],
}


def witness_graph(e: int) -> SimpleGraph:
    """Graph with e edges whose treewidth attains t(e)."""
    if e not in _WITNESS_EDGES:
        raise OutOfTable(f"no witness graph for e={e}")
    edges = _WITNESS_EDGES[e]
    vertices = {v for edge in edges for v in edge}
    return SimpleGraph.from_edges(vertices, edges)
