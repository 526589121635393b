"""Immutable regular-graph representation and BFS-based metrics.

A graph is stored in compressed row form: ``indices`` is a flat int32 array
of length n*d whose slice [u*d:(u+1)*d] lists the (sorted) neighbors of u.
Directed edges are indexed e = d*u + rank, where rank is the position of the
head in u's sorted neighbor list; this makes edge ids reproducible across
runs. Instances are immutable after construction and safe to share across
threads.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import (
    Asymmetric,
    Disconnected,
    IrregularGraph,
    NonSimple,
    SelfLoop,
)


@dataclass(frozen=True)
class RegularGraph:
    """Connected simple d-regular graph (d >= 3)."""

    n: int
    d: int
    indices: np.ndarray
    bipartition: np.ndarray | None = None
    provenance: dict = field(default_factory=dict)

    @property
    def bipartite(self) -> bool:
        return self.bipartition is not None

    def neighbors(self, u: int) -> np.ndarray:
        return self.indices[u * self.d : (u + 1) * self.d]

    def edges(self):
        """Undirected edges as (u, v) with u < v, lexicographically sorted."""
        tails = np.repeat(np.arange(self.n, dtype=np.int64), self.d)
        heads = self.indices.astype(np.int64)
        keep = tails < heads
        return list(zip(tails[keep].tolist(), heads[keep].tolist()))


def from_adjacency(adj: dict | list, d: int, provenance: dict | None = None) -> RegularGraph:
    """Build and validate a RegularGraph from a neighbor-list mapping."""
    n = len(adj)
    if n <= d:
        raise IrregularGraph(f"need n > d, got n={n}, d={d}")
    indices = np.empty(n * d, dtype=np.int32)
    for u in range(n):
        nbrs = sorted(adj[u])
        if len(nbrs) != d:
            raise IrregularGraph(f"vertex {u} has degree {len(adj[u])}, expected {d}")
        if any(v == u for v in nbrs):
            raise SelfLoop(f"vertex {u} is adjacent to itself")
        if len(set(nbrs)) != d:
            raise NonSimple(f"vertex {u} has a parallel edge")
        if any(v < 0 or v >= n for v in nbrs):
            raise IrregularGraph(f"vertex {u} lists a neighbor outside [0, {n})")
        indices[u * d : (u + 1) * d] = nbrs
    graph = RegularGraph(n=n, d=d, indices=indices, bipartition=None,
                         provenance=provenance or {})
    _check_symmetry(graph)
    dist = _connected_distances(graph, 0)
    bipartition = _two_coloring(graph, dist)
    indices.setflags(write=False)
    if bipartition is not None:
        bipartition.setflags(write=False)
    return RegularGraph(n=n, d=d, indices=indices, bipartition=bipartition,
                        provenance=provenance or {})


def from_edges(n: int, d: int, edges, provenance: dict | None = None) -> RegularGraph:
    """Build and validate a RegularGraph from an undirected edge list."""
    adj = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    return from_adjacency(adj, d, provenance)


def _check_symmetry(graph: RegularGraph):
    n, d = graph.n, graph.d
    rows = graph.indices.reshape(n, d)
    tails = np.repeat(np.arange(n, dtype=np.int64), d)
    heads = graph.indices.astype(np.int64)
    rank = (rows[heads] < tails[:, None]).sum(axis=1)
    back = rows[heads, rank.clip(max=d - 1)]
    if not np.all((rank < d) & (back == tails)):
        bad = int(np.flatnonzero((rank >= d) | (back != tails))[0])
        raise Asymmetric(
            f"edge ({bad // d}, {graph.indices[bad]}) has no reverse entry")


def _connected_distances(graph: RegularGraph, src: int) -> np.ndarray:
    dist = _kernels.bfs_distances(graph.indices, graph.d, src)
    if (dist < 0).any():
        raise Disconnected(f"{int((dist < 0).sum())} vertices unreachable from {src}")
    return dist


def _two_coloring(graph: RegularGraph, dist0: np.ndarray) -> np.ndarray | None:
    parity = (dist0 % 2).astype(np.int8)
    tails = np.repeat(np.arange(graph.n, dtype=np.int64), graph.d)
    if np.all(parity[tails] != parity[graph.indices]):
        return parity
    return None


@dataclass(frozen=True)
class DirectedEdgeSpace:
    """Indexing of the N = d*n directed edges with the reversal involution."""

    N: int
    tail: np.ndarray
    head: np.ndarray
    rev: np.ndarray


def validate_and_index(graph: RegularGraph) -> DirectedEdgeSpace:
    """Canonical directed-edge indexing; re-checks symmetry and simplicity."""
    n, d = graph.n, graph.d
    head = graph.indices.astype(np.int32)
    tail = np.repeat(np.arange(n, dtype=np.int32), d)
    if (head == tail).any():
        raise SelfLoop("adjacency contains a self-loop")
    rows = graph.indices.reshape(n, d)
    rank = (rows[head] < tail[:, None]).sum(axis=1)
    ok = rank < d
    back = rows[head, np.where(ok, rank, 0)]
    if not np.all(ok & (back == tail)):
        raise Asymmetric("adjacency is not symmetric")
    rev = (head.astype(np.int64) * d + rank).astype(np.int32)
    if not np.array_equal(rev[rev], np.arange(n * d, dtype=np.int32)):
        raise Asymmetric("edge reversal is not an involution")
    for arr in (tail, head, rev):
        arr.setflags(write=False)
    return DirectedEdgeSpace(N=n * d, tail=tail, head=head, rev=rev)


def bfs_distances(graph: RegularGraph, x: int) -> np.ndarray:
    """Exact shortest-path distances from x; raises Disconnected otherwise."""
    if not 0 <= x < graph.n:
        raise IndexError(f"source {x} outside [0, {graph.n})")
    return _connected_distances(graph, x)


@dataclass(frozen=True)
class DistanceProfile:
    """Histogram of distances from one source vertex."""

    source: int
    histogram: np.ndarray
    median: int
    window_radius: float
    exceedance: int

    @property
    def n(self) -> int:
        return int(self.histogram.sum())

    @property
    def exceedance_fraction(self) -> float:
        return self.exceedance / self.n


def distance_profile(graph: RegularGraph, x: int, window_radius: float) -> DistanceProfile:
    """Distance histogram plus the count of y with |dist(x,y) - log_{d-1} n|
    exceeding the window radius."""
    if window_radius < 0:
        raise ValueError("window_radius must be >= 0")
    dist = bfs_distances(graph, x)
    hist = np.bincount(dist)
    center = math.log(graph.n) / math.log(graph.d - 1)
    exceed = int(np.count_nonzero(np.abs(dist - center) > window_radius))
    cum = np.cumsum(hist)
    median = int(np.searchsorted(cum, (graph.n + 1) // 2))
    return DistanceProfile(source=x, histogram=hist, median=median,
                           window_radius=window_radius, exceedance=exceed)


def graph_metrics(graph: RegularGraph) -> dict:
    """Exact diameter (all-pairs BFS), exact girth, bipartiteness flag."""
    ecc = _kernels.eccentricities(graph.indices, graph.d)
    if (ecc < 0).any():
        raise Disconnected("graph is not connected")
    g = int(_kernels.girth(graph.indices, graph.d))
    return {
        "diameter": int(ecc.max()),
        "girth": g,
        "bipartite": graph.bipartite,
    }


def diameter_volume_lower_bound(n: int, d: int) -> float:
    """Ball-volume diameter lower bound log_{d-1}((n-1)(d-2)/d + 1) - 1."""
    return math.log((n - 1) * (d - 2) / d + 1) / math.log(d - 1) - 1
