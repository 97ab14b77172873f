"""Immutable weighted multigraphs, the edge-list text format, and an
unmetered reference Dijkstra used as the ground-truth distance oracle.

Vertices are the integers ``1..n``.  Edges carry a stable identity
(:class:`EdgeRef`) so parallel edges between the same endpoints stay
distinguishable, and self-loops are kept.
"""
from __future__ import annotations

import heapq
import json
import math
import numbers
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import (
    EmptyGraph,
    InvalidPair,
    InvalidWalk,
    NonPositiveWeight,
    ParseError,
    VertexOutOfRange,
)

#: Distance value used for "t is not reachable from s".
UNREACHABLE = math.inf

DEGENERATE_PRAGMA = "# degenerate-weights"
INSTANCE_PREFIX = "# instance: "


@dataclass(frozen=True, order=True)
class EdgeRef:
    """Identity of one edge.  Undirected refs are stored with ``tail <= head``."""

    tail: int
    head: int
    k: int = 1

    def other(self, v: int) -> int:
        if v == self.tail:
            return self.head
        if v == self.head:
            return self.tail
        raise ValueError(f"{v} is not an endpoint of {self}")

    def as_dict(self) -> dict:
        return {"u": self.tail, "v": self.head, "k": self.k}

    def __str__(self) -> str:
        return f"{self.tail}-{self.head}#{self.k}"


class MultiGraph:
    """A directed or undirected multigraph with positive edge weights.

    Incidence lists keep input order.  In an undirected graph a self-loop
    appears twice in its endpoint's list, so ``degree(v)`` is always the
    length of that list.
    """

    __slots__ = (
        "directed", "n", "weighted", "degenerate",
        "refs", "ends", "weights", "_index", "_out", "_in",
    )

    def __init__(self, directed: bool, n: int, ends: Sequence[tuple[int, int]],
                 weights: Sequence[float], *, weighted: bool = True,
                 degenerate: bool = False):
        self.directed = bool(directed)
        self.n = n
        self.weighted = weighted
        self.degenerate = degenerate
        self.ends = tuple(ends)
        self.weights = tuple(float(w) for w in weights)

        counter: dict[tuple[int, int], int] = {}
        refs = []
        out: list[list[int]] = [[] for _ in range(n + 1)]
        inn: list[list[int]] = [[] for _ in range(n + 1)] if self.directed else out
        for idx, (u, v) in enumerate(self.ends):
            key = (u, v) if self.directed else (min(u, v), max(u, v))
            counter[key] = counter.get(key, 0) + 1
            refs.append(EdgeRef(key[0], key[1], counter[key]))
            out[u].append(idx)
            inn[v].append(idx)
        self.refs = tuple(refs)
        self._index = {r: i for i, r in enumerate(refs)}
        self._out = tuple(tuple(x) for x in out)
        self._in = tuple(tuple(x) for x in inn) if self.directed else self._out

    # -- structure -------------------------------------------------------

    @property
    def m(self) -> int:
        return len(self.refs)

    def check_vertex(self, v: int) -> None:
        if not isinstance(v, numbers.Integral) or not 1 <= v <= self.n:
            raise VertexOutOfRange(f"vertex {v} outside [1, {self.n}]")

    def incidence(self, v: int) -> tuple[int, ...]:
        """Edge indices incident to ``v`` (undirected graphs)."""
        return self._out[v]

    def out_edges(self, v: int) -> tuple[int, ...]:
        return self._out[v]

    def in_edges(self, v: int) -> tuple[int, ...]:
        return self._in[v]

    def degree(self, v: int) -> int:
        return len(self._out[v])

    def out_degree(self, v: int) -> int:
        return len(self._out[v])

    def in_degree(self, v: int) -> int:
        return len(self._in[v])

    def degree_sequence(self) -> list[tuple[int, int]]:
        """Per-vertex (out, in) degrees; for undirected graphs both entries are the degree."""
        return [(len(self._out[v]), len(self._in[v])) for v in range(1, self.n + 1)]

    def max_degree(self) -> int:
        return max((len(self._out[v]) for v in range(1, self.n + 1)), default=0)

    def index_of(self, ref: EdgeRef) -> int:
        return self._index[ref]

    def has_edge(self, ref: EdgeRef) -> bool:
        return ref in self._index

    def weight(self, ref: EdgeRef) -> float:
        return self.weights[self._index[ref]]

    def far_end(self, idx: int, v: int) -> int:
        """Endpoint of edge ``idx`` reached when leaving ``v`` along it."""
        a, b = self.ends[idx]
        return b if a == v else a

    def edge_list(self) -> list[tuple[int, int, float]]:
        return [(u, v, w) for (u, v), w in zip(self.ends, self.weights)]

    def with_unit_weights(self) -> MultiGraph:
        """Same topology and incidence order, every weight 1, unweighted mode."""
        return MultiGraph(self.directed, self.n, self.ends, [1.0] * self.m, weighted=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MultiGraph):
            return NotImplemented
        return (self.directed, self.n, self.weighted, self.degenerate, self.ends, self.weights) == (
            other.directed, other.n, other.weighted, other.degenerate, other.ends, other.weights)

    def __hash__(self) -> int:
        return hash((self.directed, self.n, self.ends, self.weights))

    def __repr__(self) -> str:
        kind = "directed" if self.directed else "undirected"
        return f"MultiGraph({kind}, n={self.n}, m={self.m})"


def _validate_ends(n: int, edge_list: Iterable) -> tuple[list[tuple[int, int]], list[float]]:
    if n < 1:
        raise EmptyGraph("graph needs at least one vertex")
    ends, weights = [], []
    for entry in edge_list:
        u, v, w = entry if len(entry) == 3 else (*entry, 1.0)
        for x in (u, v):
            if not 1 <= x <= n:
                raise VertexOutOfRange(f"vertex {x} outside [1, {n}]")
        ends.append((int(u), int(v)))
        weights.append(float(w))
    return ends, weights


def build_graph(directed: bool, n: int, edge_list: Iterable, *, weighted: bool = True) -> MultiGraph:
    """Validate ``(u, v, w)`` triples and build a :class:`MultiGraph`.

    In unweighted mode the weight may be omitted and must equal 1 if given.
    """
    ends, weights = _validate_ends(n, edge_list)
    for (u, v), w in zip(ends, weights):
        if not w > 0 or math.isnan(w):
            raise NonPositiveWeight(f"edge {u}-{v} has weight {w}")
        if not weighted and w != 1.0:
            raise NonPositiveWeight(f"unweighted graph edge {u}-{v} has weight {w} != 1")
    return MultiGraph(directed, n, ends, weights, weighted=weighted)


def build_degenerate_graph(directed: bool, n: int, edge_list: Iterable) -> MultiGraph:
    """Relaxed constructor allowing zero weights; the result is tagged ``degenerate``.

    Only the zero-weight demonstrations consume such graphs; every Dijkstra
    variant refuses them.
    """
    ends, weights = _validate_ends(n, edge_list)
    for (u, v), w in zip(ends, weights):
        if w < 0 or math.isnan(w):
            raise NonPositiveWeight(f"edge {u}-{v} has negative weight {w}")
    return MultiGraph(directed, n, ends, weights, weighted=True, degenerate=True)


# -- text format ---------------------------------------------------------

def write_edge_list(G: MultiGraph, provenance: dict | None = None) -> str:
    lines = []
    if provenance is not None:
        lines.append(INSTANCE_PREFIX + json.dumps(provenance, sort_keys=True))
    if G.degenerate:
        lines.append(DEGENERATE_PRAGMA)
    kind = "directed" if G.directed else "undirected"
    mode = "weighted" if G.weighted else "unweighted"
    lines.append(f"{kind} {G.n} {G.m} {mode}")
    for (u, v), w in zip(G.ends, G.weights):
        lines.append(f"{u} {v} {w!r}" if G.weighted else f"{u} {v}")
    return "\n".join(lines) + "\n"


def read_edge_list(text: str) -> MultiGraph:
    header = None
    degenerate = False
    triples = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if stripped == DEGENERATE_PRAGMA:
            degenerate = True
            continue
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if header is None:
            if len(parts) != 4 or parts[0] not in ("directed", "undirected") \
                    or parts[3] not in ("weighted", "unweighted"):
                raise ParseError("header must be '<directed|undirected> <n> <m> <weighted|unweighted>'",
                                 lineno)
            try:
                n, m = int(parts[1]), int(parts[2])
            except ValueError:
                raise ParseError("n and m must be integers", lineno) from None
            header = (parts[0] == "directed", n, m, parts[3] == "weighted")
            continue
        weighted = header[3]
        expected = 3 if weighted else 2
        if len(parts) not in (expected, 3):
            raise ParseError(f"expected {expected} fields, got {len(parts)}", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
            w = float(parts[2]) if len(parts) == 3 else 1.0
        except ValueError:
            raise ParseError(f"cannot parse edge line {line!r}", lineno) from None
        triples.append((u, v, w))
    if header is None:
        raise ParseError("missing header")
    directed, n, m, weighted = header
    if len(triples) != m:
        raise ParseError(f"header declares {m} edges, found {len(triples)}")
    if degenerate:
        return build_degenerate_graph(directed, n, triples)
    return build_graph(directed, n, triples, weighted=weighted)


def read_provenance(text: str) -> dict | None:
    for raw in text.splitlines():
        if raw.startswith(INSTANCE_PREFIX):
            return json.loads(raw[len(INSTANCE_PREFIX):])
    return None


# -- unmetered reference distances --------------------------------------

def distances_from(G: MultiGraph, source: int, *, reverse: bool = False) -> list[float]:
    """Plain Dijkstra over the raw graph; ``dist[v]`` for v in 1..n (index 0 unused).

    With ``reverse=True`` distances are *to* ``source`` (in-edges followed).
    Zero weights are fine here; this is the test oracle, not a metered search.
    """
    dist = [math.inf] * (G.n + 1)
    dist[source] = 0.0
    heap = [(0.0, source)]
    lists = G._in if reverse else G._out
    done = [False] * (G.n + 1)
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for idx in lists[u]:
            x = G.far_end(idx, u)
            nd = d + G.weights[idx]
            if nd < dist[x]:
                dist[x] = nd
                heapq.heappush(heap, (nd, x))
    return dist


def true_distance(G: MultiGraph, u: int, v: int) -> float:
    """Exact shortest u-v distance, :data:`UNREACHABLE` if there is none."""
    G.check_vertex(u)
    G.check_vertex(v)
    if u == v:
        raise InvalidPair("distance is only defined for two different vertices")
    return distances_from(G, u)[v]


def walk_length(G: MultiGraph, s: int, t: int, path: Sequence[EdgeRef]) -> float:
    """Check that ``path`` chains from s to t over edges of G and return its weight.

    Weights are summed from s outward, in path order.
    """
    cur = s
    total = 0.0
    for ref in path:
        if not G.has_edge(ref):
            raise InvalidWalk(f"edge {ref} not in graph")
        if G.directed:
            if ref.tail != cur:
                raise InvalidWalk(f"edge {ref} does not leave {cur}")
            cur = ref.head
        else:
            if cur not in (ref.tail, ref.head):
                raise InvalidWalk(f"edge {ref} not incident to {cur}")
            cur = ref.other(cur)
        total += G.weight(ref)
    if cur != t:
        raise InvalidWalk(f"walk ends at {cur}, not {t}")
    return total
