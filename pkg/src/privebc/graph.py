"""Partitioned graphs, party views, and the exact egocentric betweenness oracle."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import networkx as nx
import numpy as np

from privebc.seeds import derive_rng

log = logging.getLogger(__name__)


class GraphError(ValueError):
    """Raised for malformed graphs or unknown nodes."""


def _norm(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


class Graph:
    """Simple undirected graph on dense integer nodes ``0..n-1``.

    Edges are stored once as ``(u, v)`` with ``u < v``. Self-loops and
    repeated edges are dropped (with a warning) at construction.
    """

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        if n < 0:
            raise GraphError(f"node count must be non-negative, got {n}")
        self.n = int(n)
        adj: list[set[int]] = [set() for _ in range(self.n)]
        edge_set: set[tuple[int, int]] = set()
        loops = dupes = 0
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphError(f"edge ({u}, {v}) references unknown node (n={self.n})")
            if u == v:
                loops += 1
                continue
            e = _norm(u, v)
            if e in edge_set:
                dupes += 1
                continue
            edge_set.add(e)
            adj[u].add(v)
            adj[v].add(u)
        if loops or dupes:
            log.warning("dropped %d self-loops and %d duplicate edges", loops, dupes)
        self.edges: frozenset[tuple[int, int]] = frozenset(edge_set)
        self.adj: tuple[frozenset[int], ...] = tuple(frozenset(s) for s in adj)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def check_node(self, v: int) -> None:
        if not (0 <= v < self.n):
            raise GraphError(f"unknown node {v} (graph has {self.n} nodes)")

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.num_edges})"


@dataclass(frozen=True)
class PartitionedGraph:
    """A graph whose nodes are owned by ``n_parties`` disjoint parties."""

    graph: Graph
    owner: tuple[int, ...]
    n_parties: int

    def __post_init__(self):
        if len(self.owner) != self.graph.n:
            raise GraphError("ownership must assign every node exactly once")
        if self.n_parties < 1:
            raise GraphError("need at least one party")
        for v, p in enumerate(self.owner):
            if not (0 <= p < self.n_parties):
                raise GraphError(f"node {v} owned by unknown party {p}")

    @classmethod
    def from_owner(cls, graph: Graph, owner: Sequence[int], n_parties: int | None = None):
        owner = tuple(int(p) for p in owner)
        if n_parties is None:
            n_parties = max(owner, default=-1) + 1 or 1
        return cls(graph, owner, n_parties)

    def nodes_of(self, party: int) -> frozenset[int]:
        return frozenset(v for v, p in enumerate(self.owner) if p == party)

    def party_of(self, v: int) -> int:
        self.graph.check_node(v)
        return self.owner[v]


@dataclass(frozen=True)
class PartyView:
    """What one party knows: its own nodes and every edge touching them."""

    party: int
    owned: frozenset[int]
    neighbors: dict[int, frozenset[int]] = field(repr=False)

    @property
    def incident_edges(self) -> frozenset[tuple[int, int]]:
        return frozenset(_norm(u, w) for u, nb in self.neighbors.items() for w in nb)

    def knows_edge(self, u: int, w: int) -> bool:
        return u in self.owned or w in self.owned

    def has_edge(self, u: int, w: int) -> bool:
        if u in self.owned:
            return w in self.neighbors[u]
        if w in self.owned:
            return u in self.neighbors[w]
        raise GraphError(f"party {self.party} has no knowledge of pair ({u}, {w})")


def build_views(pg: PartitionedGraph) -> list[PartyView]:
    views = []
    for p in range(pg.n_parties):
        owned = pg.nodes_of(p)
        views.append(PartyView(p, owned, {v: pg.graph.adj[v] for v in owned}))
    return views


def ego_network(graph: Graph, a: int) -> frozenset[int]:
    graph.check_node(a)
    return graph.adj[a]


def exact_ebc(graph: Graph, a: int, exact: bool = False) -> float | Fraction:
    """Egocentric betweenness of ``a``.

    Sums, over unordered non-adjacent pairs of neighbours of ``a``, the
    reciprocal of their number of common neighbours inside ``N(a) + {a}``.
    With ``exact=True`` the result is a ``Fraction``.
    """
    graph.check_node(a)
    return ebc_on_set(graph, a, graph.adj[a], exact=exact)


def ebc_on_set(graph: Graph, a: int, members: Iterable[int], exact: bool = False):
    """EBC formula evaluated with ``members`` standing in for the ego network.

    For a pair with no 2-path inside ``members + {a}`` (possible only when
    ``members`` contains non-neighbours of ``a``) the path count is floored
    at one, so every term lies in ``(0, 1]``.
    """
    nodes = sorted(set(members) - {a})
    inside = set(nodes)
    local = {i: graph.adj[i] & inside for i in nodes}
    ego_adj = graph.adj[a]
    counts: dict[int, int] = {}
    for idx, i in enumerate(nodes):
        ni = local[i]
        via_a = i in ego_adj
        for j in nodes[idx + 1:]:
            if j in ni:
                continue
            c = len(ni & local[j]) + (1 if via_a and j in ego_adj else 0)
            c = max(c, 1)
            counts[c] = counts.get(c, 0) + 1
    if exact:
        return sum((Fraction(k, c) for c, k in counts.items()), Fraction(0))
    return float(sum(k / c for c, k in sorted(counts.items())))


def generate_graph(model: str, n: int, *, p: float | None = None, m: int | None = None,
                   seed: int = 0) -> Graph:
    """Synthetic graph from ``erdos-renyi`` (``p``) or ``barabasi-albert`` (``m``).

    Barabasi-Albert graphs start from a star on ``m + 1`` nodes and end with
    exactly ``m * (n - m)`` edges.
    """
    if n < 2:
        raise GraphError(f"need n >= 2, got {n}")
    if model in ("erdos-renyi", "er"):
        if p is None or not (0.0 <= p <= 1.0):
            raise GraphError(f"erdos-renyi needs 0 <= p <= 1, got {p}")
        g = nx.gnp_random_graph(n, p, seed=seed)
    elif model in ("barabasi-albert", "ba"):
        if m is None or not (1 <= m < n):
            raise GraphError(f"barabasi-albert needs 1 <= m < n, got m={m}")
        g = nx.barabasi_albert_graph(n, m, seed=seed)
    else:
        raise GraphError(f"unknown model {model!r}")
    return Graph(n, g.edges())


def partition_uniform(graph: Graph, k: int, seed: int) -> PartitionedGraph:
    """Assign each node independently and uniformly to one of ``k`` parties."""
    if k < 1:
        raise GraphError(f"party count must be >= 1, got {k}")
    if k > graph.n:
        raise GraphError(f"cannot split {graph.n} nodes among {k} parties")
    rng = derive_rng(seed, "partition", k)
    owner = rng.integers(0, k, size=graph.n)
    return PartitionedGraph(graph, tuple(int(x) for x in owner), k)


def sample_egos(graph: Graph, count: int, seed: int, min_degree: int = 2) -> list[int]:
    """Draw ``count`` distinct egos uniformly among nodes of degree >= ``min_degree``."""
    eligible = np.array([v for v in range(graph.n) if graph.degree(v) >= min_degree])
    if len(eligible) == 0:
        raise GraphError(f"no node has degree >= {min_degree}")
    rng = derive_rng(seed, "egos")
    count = min(count, len(eligible))
    return sorted(int(v) for v in rng.choice(eligible, size=count, replace=False))
