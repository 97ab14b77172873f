"""Single-direction Dijkstra that advances one edge relaxation per step.

A :class:`SearchState` is driven by repeated :meth:`SearchState.step`
calls.  Each call does one of three things: closes the next open vertex
(and asks the oracle for its directional degree), relaxes one edge of the
vertex being scanned (one Neighbor-family query), or reports exhaustion.
This granularity lets a bidirectional driver interleave two searches edge
by edge.
"""
from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass
from enum import Enum, IntEnum

from .errors import NoPathRecorded
from .graph import EdgeRef
from .oracle import Oracle


class Direction(str, Enum):
    FORWARD = "fwd"
    BACKWARD = "bwd"


class VertexStatus(IntEnum):
    UNVISITED = 0
    OPEN = 1
    CLOSED = 2


@dataclass(frozen=True)
class ClosedVertex:
    v: int
    label: float


@dataclass(frozen=True)
class RelaxedEdge:
    edge: EdgeRef
    source: int  # the vertex being scanned
    target: int
    weight: float
    improved: bool
    target_was_closed: bool


@dataclass(frozen=True)
class Exhausted:
    pass


EXHAUSTED = Exhausted()
StepEvent = ClosedVertex | RelaxedEdge | Exhausted


class SearchState:
    """Dijkstra state for one direction over an oracle.

    Open-set ties are broken by smallest label, then smallest vertex id.
    With ``fifo=True`` the open set is a plain queue, which is label order
    on unit-weight graphs (BFS).
    """

    def __init__(self, oracle: Oracle, source: int, direction: Direction = Direction.FORWARD,
                 *, fifo: bool = False, channel: str | None = None):
        oracle._G.check_vertex(source)
        self.oracle = oracle
        self.source = source
        self.direction = Direction(direction)
        self.fifo = fifo
        self.channel = channel if channel is not None else self.direction.value
        if not oracle.directed:
            side = "both"
        else:
            side = "out" if self.direction is Direction.FORWARD else "in"
        self._deg, self._nbr = oracle.side_queries(side)

        n = oracle.n
        self.label = [math.inf] * (n + 1)
        self.status = [VertexStatus.UNVISITED] * (n + 1)
        self.parent: list[EdgeRef | None] = [None] * (n + 1)
        self.label[source] = 0.0
        self.status[source] = VertexStatus.OPEN
        self.n_open = 1
        self._heap: list = [] if fifo else [(0.0, source)]
        self._queue: deque = deque([source]) if fifo else deque()
        self.current: tuple[int, int, int] | None = None  # (vertex, last index, degree)
        self.last_closed: int | None = None
        self.closed_order: list[int] = []
        self.relaxations = 0
        self.exhausted = False

    # -- queries about the state -------------------------------------------

    def is_closed(self, v: int) -> bool:
        return self.status[v] == VertexStatus.CLOSED

    def is_seen(self, v: int) -> bool:
        return self.status[v] != VertexStatus.UNVISITED

    @property
    def mid_scan(self) -> bool:
        return self.current is not None

    @property
    def frontier_label(self) -> float:
        """Label of the most recently closed vertex; 0 before anything closed."""
        return 0.0 if self.last_closed is None else self.label[self.last_closed]

    def peek_min(self) -> float:
        """Smallest label in the open set (inf if empty)."""
        if self.fifo:
            return self.label[self._queue[0]] if self._queue else math.inf
        heap = self._heap
        while heap and (self.status[heap[0][1]] != VertexStatus.OPEN or heap[0][0] != self.label[heap[0][1]]):
            heapq.heappop(heap)
        return heap[0][0] if heap else math.inf

    # -- stepping --------------------------------------------------------------

    def _pop_open(self) -> int | None:
        if self.fifo:
            while self._queue:
                v = self._queue.popleft()
                if self.status[v] == VertexStatus.OPEN:
                    return v
            return None
        heap = self._heap
        while heap:
            d, v = heapq.heappop(heap)
            if self.status[v] == VertexStatus.OPEN and d == self.label[v]:
                return v
        return None

    def step(self) -> StepEvent:
        if self.current is not None:
            u, j, deg = self.current
            j += 1
            other, w, ref = self._nbr(u, j, self.channel)
            self.current = None if j == deg else (u, j, deg)
            self.relaxations += 1
            was_closed = self.status[other] == VertexStatus.CLOSED
            improved = False
            if not was_closed:
                cand = self.label[u] + w
                if cand < self.label[other]:
                    if self.status[other] == VertexStatus.UNVISITED:
                        self.status[other] = VertexStatus.OPEN
                        self.n_open += 1
                        if self.fifo:
                            self._queue.append(other)
                    self.label[other] = cand
                    self.parent[other] = ref
                    if not self.fifo:
                        heapq.heappush(self._heap, (cand, other))
                    improved = True
            return RelaxedEdge(ref, u, other, w, improved, was_closed)

        v = self._pop_open()
        if v is None:
            self.exhausted = True
            return EXHAUSTED
        self.status[v] = VertexStatus.CLOSED
        self.n_open -= 1
        self.last_closed = v
        self.closed_order.append(v)
        deg = self._deg(v, self.channel)
        if deg > 0:
            self.current = (v, 0, deg)
        return ClosedVertex(v, self.label[v])

    def run(self, max_steps: int | None = None) -> list[StepEvent]:
        """Step until exhaustion (or ``max_steps``); returns the events."""
        events = []
        while max_steps is None or len(events) < max_steps:
            ev = self.step()
            events.append(ev)
            if ev is EXHAUSTED:
                break
        return events

    # -- paths ---------------------------------------------------------------

    def _prev(self, x: int, ref: EdgeRef) -> int:
        if not self.oracle.directed:
            return ref.other(x)
        return ref.tail if self.direction is Direction.FORWARD else ref.head

    def extract_path(self, v: int) -> list[EdgeRef]:
        """Edges from the source to ``v`` (forward) or from ``v`` to the source (backward),
        in graph orientation.  Uses stored parent edges, so it costs no queries."""
        if self.label[v] == math.inf:
            raise NoPathRecorded(f"vertex {v} was never reached from {self.source}")
        edges = []
        x = v
        while x != self.source:
            ref = self.parent[x]
            edges.append(ref)
            x = self._prev(x, ref)
        if self.direction is Direction.FORWARD:
            edges.reverse()
        return edges


def init(oracle: Oracle, source: int, direction: Direction = Direction.FORWARD, **kw) -> SearchState:
    return SearchState(oracle, source, direction, **kw)
