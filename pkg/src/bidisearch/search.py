"""Search strategies over a metered oracle.

The reference strategy is bidirectional Dijkstra with the equal-work
selection rule (alternate one edge relaxation per direction) and the
Pohl stopping bound.  The same driver also runs the historical selection
rules, an eager-meet BFS variant, and a deliberately unsound first-meet
rule.  Unidirectional baselines live here too.
"""
from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass, field
from enum import Enum

from .engine import EXHAUSTED, ClosedVertex, Direction, RelaxedEdge, SearchState
from .errors import InvalidPair, ModeMismatch, TraceMissing
from .graph import UNREACHABLE, EdgeRef, MultiGraph
from .oracle import Oracle, OrderingPolicy, QueryLedger, attach


class SelectionRule(str, Enum):
    EQUAL_EDGE_WORK = "equal"
    DANTZIG_ALTERNATE_VERTICES = "dantzig"
    NICHOLSON_MIN_FRONTIER = "nicholson"
    POHL_CARDINALITY = "cardinality"


class StoppingRule(str, Enum):
    POHL_BOUND = "pohl"
    EAGER_MEET = "eager"
    FIRST_MEET_INCORRECT = "first-meet"


class Termination(str, Enum):
    STOPPED = "Stopped"
    FORWARD_EXHAUSTED = "ForwardExhausted"
    BACKWARD_EXHAUSTED = "BackwardExhausted"


UNSOUND_RULES = frozenset({StoppingRule.FIRST_MEET_INCORRECT})


@dataclass(frozen=True)
class MeetingEvent:
    """One strict improvement of the best known s-t walk length."""

    mu: float
    edge: EdgeRef | None
    close_index: int  # number of ClosedVertex events (both directions) so far
    scanned_by: Direction | None
    scanning: int  # vertex whose scan produced the candidate
    neighbor: int  # the other endpoint, already labelled by the opposite search
    fwd_end: int
    bwd_end: int


@dataclass
class RunReport:
    s: int
    t: int
    distance: float
    path: list[EdgeRef]
    ledger: QueryLedger
    per_direction: dict[str, QueryLedger]
    termination: Termination
    strategy: str
    unsound: bool = False
    mu: float = math.inf
    stop_labels: tuple[float, float] = (0.0, 0.0)
    meetings: list[MeetingEvent] | None = None
    wall_time: float = 0.0
    fwd: SearchState | None = field(default=None, repr=False)
    bwd: SearchState | None = field(default=None, repr=False)

    @property
    def reachable(self) -> bool:
        return self.distance != UNREACHABLE

    def to_dict(self) -> dict:
        return {
            "distance": None if self.distance == UNREACHABLE else self.distance,
            "path": [e.as_dict() for e in self.path],
            "counts": self.ledger.to_dict(),
            "per_direction": {k: v.to_dict() for k, v in self.per_direction.items()},
            "termination": self.termination.value,
            "strategy": self.strategy,
            "unsound": self.unsound,
            "wall_time": self.wall_time,
        }


def _trace_requested(trace: bool) -> bool:
    return trace or os.environ.get("BIDI_TRACE") == "1"


def _check_pair(G: MultiGraph, s: int, t: int) -> None:
    G.check_vertex(s)
    G.check_vertex(t)
    if s == t:
        raise InvalidPair("s and t must differ")


def _check_positive(G: MultiGraph) -> None:
    if G.degenerate:
        raise ModeMismatch("graph has zero-weight edges; Dijkstra variants need positive weights")


class _Bidirectional:
    """Driver interleaving a forward and a backward :class:`SearchState`."""

    def __init__(self, oracle: Oracle, s: int, t: int, sel: SelectionRule, stop: StoppingRule,
                 *, fifo: bool, record: bool):
        self.oracle = oracle
        self.fwd = SearchState(oracle, s, Direction.FORWARD, fifo=fifo)
        self.bwd = SearchState(oracle, t, Direction.BACKWARD, fifo=fifo)
        self.s, self.t = s, t
        self.sel, self.stop = sel, stop
        self.mu = math.inf
        self.e_mid: EdgeRef | None = None
        self.ends: tuple[int, int] | None = None  # (fwd-side vertex, bwd-side vertex)
        self.meetings: list[MeetingEvent] | None = [] if record else None
        self.closes = 0
        self.done = False
        self.termination = Termination.STOPPED
        self.meet_vertex: int | None = None

    def _offer(self, cand: float, edge, scanned_by, scanning, neighbor, fwd_end, bwd_end) -> None:
        # strict improvement only: ties keep the earliest e_mid
        if cand < self.mu:
            self.mu = cand
            self.e_mid = edge
            self.ends = (fwd_end, bwd_end)
            if self.meetings is not None:
                self.meetings.append(MeetingEvent(cand, edge, self.closes, scanned_by,
                                                  scanning, neighbor, fwd_end, bwd_end))

    def _bound(self) -> float:
        return self.fwd.frontier_label + self.bwd.frontier_label

    def _handle(self, state: SearchState, ev) -> None:
        other = self.bwd if state is self.fwd else self.fwd
        if isinstance(ev, ClosedVertex):
            self.closes += 1
            if self.stop is StoppingRule.FIRST_MEET_INCORRECT:
                if other.is_closed(ev.v):
                    self.meet_vertex = ev.v
                    self.done = True
            else:
                if other.is_closed(ev.v):
                    # a vertex closed by both searches is itself a meeting point;
                    # without this the stop can fire while the opposite root is
                    # still being scanned and return a longer walk
                    side = Direction.FORWARD if state is self.fwd else Direction.BACKWARD
                    self._offer(state.label[ev.v] + other.label[ev.v], None, side, ev.v, ev.v, ev.v, ev.v)
                if self._bound() >= self.mu:
                    self.done = True
        elif isinstance(ev, RelaxedEdge):
            x = ev.target
            linked = other.is_closed(x)
            if self.stop is StoppingRule.EAGER_MEET:
                linked = other.is_seen(x)
            if linked:
                cand = state.label[ev.source] + ev.weight + other.label[x]
                if state is self.fwd:
                    self._offer(cand, ev.edge, Direction.FORWARD, ev.source, x, ev.source, x)
                else:
                    self._offer(cand, ev.edge, Direction.BACKWARD, ev.source, x, x, ev.source)
        else:
            # Exhaustion ends the run; the exhausted side has exact labels for
            # everything it can reach.
            if state is self.fwd:
                self.termination = Termination.FORWARD_EXHAUSTED
                if self.fwd.is_closed(self.t):
                    self._offer(self.fwd.label[self.t], None, None, self.t, self.t, self.t, self.t)
            else:
                self.termination = Termination.BACKWARD_EXHAUSTED
                if self.bwd.is_closed(self.s):
                    self._offer(self.bwd.label[self.s], None, None, self.s, self.s, self.s, self.s)
            self.done = True
            return
        if self.stop is StoppingRule.EAGER_MEET and not self.done and self.mu <= self._bound() + 1:
            # on unit weights every s-t walk of length <= a + b has already been offered
            self.done = True

    def _turn(self, state: SearchState) -> None:
        if self.sel is SelectionRule.EQUAL_EDGE_WORK:
            # a turn ends with one Neighbor-family query; closes do not consume it
            while not self.done:
                ev = state.step()
                self._handle(state, ev)
                if not isinstance(ev, ClosedVertex):
                    return
            return
        # vertex-granular rules: close one vertex, then scan all its edges
        while not self.done:
            ev = state.step()
            self._handle(state, ev)
            if ev is EXHAUSTED or (isinstance(ev, ClosedVertex) and not state.mid_scan):
                return
            if isinstance(ev, RelaxedEdge) and not state.mid_scan:
                return

    def _choose(self, last: SearchState | None) -> SearchState:
        if self.sel in (SelectionRule.EQUAL_EDGE_WORK, SelectionRule.DANTZIG_ALTERNATE_VERTICES):
            return self.fwd if last is not self.fwd else self.bwd
        if self.sel is SelectionRule.NICHOLSON_MIN_FRONTIER:
            return self.fwd if self.fwd.peek_min() <= self.bwd.peek_min() else self.bwd
        return self.fwd if self.fwd.n_open <= self.bwd.n_open else self.bwd

    def run(self) -> None:
        last = None
        while not self.done:
            state = self._choose(last)
            self._turn(state)
            last = state
        if self.meet_vertex is not None:
            v = self.meet_vertex
            self.mu = self.fwd.label[v] + self.bwd.label[v]
            self.e_mid, self.ends = None, (v, v)

    def path(self) -> list[EdgeRef]:
        if self.mu == math.inf:
            return []
        x, y = self.ends
        mid = [self.e_mid] if self.e_mid is not None else []
        return self.fwd.extract_path(x) + mid + self.bwd.extract_path(y)


def strategy_name(sel: SelectionRule, stop: StoppingRule, *, bfs: bool = False) -> str:
    if bfs:
        return f"bfs-{stop.value}"
    if stop is StoppingRule.FIRST_MEET_INCORRECT:
        return "first-meet" if sel is SelectionRule.EQUAL_EDGE_WORK else f"bidi-{sel.value}-first-meet"
    return f"bidi-{sel.value}-{stop.value}"


def _bidirectional(G, policy, s, t, sel, stop, *, fifo, trace, oracle=None) -> RunReport:
    record = _trace_requested(trace)
    if oracle is None:
        oracle = attach(G, policy, trace=record)
    started = time.perf_counter()
    drv = _Bidirectional(oracle, s, t, sel, stop, fifo=fifo, record=record)
    drv.run()
    elapsed = time.perf_counter() - started
    return RunReport(
        s=s, t=t,
        distance=drv.mu if drv.mu != math.inf else UNREACHABLE,
        path=drv.path(),
        ledger=oracle.snapshot(),
        per_direction={"fwd": oracle.snapshot("fwd"), "bwd": oracle.snapshot("bwd")},
        termination=drv.termination,
        strategy=strategy_name(sel, stop, bfs=fifo),
        unsound=stop in UNSOUND_RULES,
        mu=drv.mu,
        stop_labels=(drv.fwd.frontier_label, drv.bwd.frontier_label),
        meetings=drv.meetings,
        wall_time=elapsed,
        fwd=drv.fwd, bwd=drv.bwd,
    )


def run_bidirectional(G: MultiGraph, policy: OrderingPolicy | None, s: int, t: int,
                      sel: SelectionRule = SelectionRule.EQUAL_EDGE_WORK,
                      stop: StoppingRule = StoppingRule.POHL_BOUND,
                      *, trace: bool = False, oracle: Oracle | None = None) -> RunReport:
    """Bidirectional Dijkstra with a pluggable selection and stopping rule.

    With the defaults (equal edge work, Pohl bound) this is the
    instance-optimal reference algorithm: the two searches alternate single
    edge relaxations; a relaxation reaching a vertex closed by the opposite
    search offers the walk ``d_fwd(u) + w + d_bwd(v)`` as a candidate for
    ``mu``, and so does closing a vertex the opposite search already
    closed (``d_fwd(v) + d_bwd(v)``); after every close the run stops once
    ``label(last fwd close) + label(last bwd close) >= mu``.

    If either search runs out of open vertices the run ends at once, and the
    exhausted side's exact labels decide reachability.
    """
    _check_pair(G, s, t)
    _check_positive(G)
    sel, stop = SelectionRule(sel), StoppingRule(stop)
    if stop is StoppingRule.EAGER_MEET and G.weighted:
        raise ModeMismatch("the eager-meet rule is only sound on unweighted graphs")
    return _bidirectional(G, policy, s, t, sel, stop, fifo=False, trace=trace, oracle=oracle)


def run_bidirectional_bfs(G: MultiGraph, policy: OrderingPolicy | None, s: int, t: int,
                          stop: StoppingRule = StoppingRule.POHL_BOUND,
                          *, trace: bool = False, oracle: Oracle | None = None) -> RunReport:
    """Equal-work bidirectional BFS on an unweighted graph (queues instead of heaps)."""
    _check_pair(G, s, t)
    if G.weighted or G.degenerate:
        raise ModeMismatch("bidirectional BFS needs an unweighted graph")
    stop = StoppingRule(stop)
    return _bidirectional(G, policy, s, t, SelectionRule.EQUAL_EDGE_WORK, stop,
                          fifo=True, trace=trace, oracle=oracle)


def _unidirectional(G, policy, s, t, name, should_stop, trace, oracle) -> RunReport:
    if oracle is None:
        oracle = attach(G, policy, trace=_trace_requested(trace))
    started = time.perf_counter()
    fwd = SearchState(oracle, s, Direction.FORWARD)
    termination = Termination.FORWARD_EXHAUSTED
    while True:
        ev = fwd.step()
        if ev is EXHAUSTED:
            break
        if isinstance(ev, ClosedVertex) and should_stop(fwd, ev):
            termination = Termination.STOPPED
            break
    dist = fwd.label[t]
    empty = QueryLedger({}, frozenset())
    return RunReport(
        s=s, t=t,
        distance=dist if dist != math.inf else UNREACHABLE,
        path=fwd.extract_path(t) if dist != math.inf else [],
        ledger=oracle.snapshot(),
        per_direction={"fwd": oracle.snapshot("fwd"), "bwd": empty},
        termination=termination,
        strategy=name,
        mu=dist,
        stop_labels=(fwd.frontier_label, 0.0),
        wall_time=time.perf_counter() - started,
        fwd=fwd,
    )


def run_unidirectional_early_abort(G: MultiGraph, policy: OrderingPolicy | None, s: int, t: int,
                                   *, trace: bool = False, oracle: Oracle | None = None) -> RunReport:
    """Forward Dijkstra on a directed graph, aborted as soon as a closed
    vertex's label equals the current label of ``t``.  Only out-degree and
    out-neighbor queries are issued.  The contract is the distance."""
    _check_pair(G, s, t)
    _check_positive(G)
    if not G.directed:
        raise ModeMismatch("early-abort Dijkstra is defined on directed graphs")
    return _unidirectional(G, policy, s, t, "early-abort",
                           lambda st, ev: ev.label == st.label[t], trace, oracle)


def run_classical_dijkstra(G: MultiGraph, policy: OrderingPolicy | None, s: int, t: int,
                           *, until: str = "target", trace: bool = False,
                           oracle: Oracle | None = None) -> RunReport:
    """Metered one-directional Dijkstra from s.

    ``until="target"`` stops when t closes; ``until="exhaustion"`` empties the open set.
    """
    _check_pair(G, s, t)
    _check_positive(G)
    if until not in ("target", "exhaustion"):
        raise ValueError(f"until must be 'target' or 'exhaustion', got {until!r}")
    if until == "target":
        return _unidirectional(G, policy, s, t, "classical", lambda st, ev: ev.v == t, trace, oracle)
    return _unidirectional(G, policy, s, t, "classical-exhaustive", lambda st, ev: False, trace, oracle)


# -- meeting trace ---------------------------------------------------------

@dataclass(frozen=True)
class MeetingTrace:
    """Every strict improvement of mu, plus the vertices around the final one.

    For the event that first reached the final mu: ``u0`` is the vertex being
    scanned, ``v0`` its neighbour labelled by the opposite search, and ``w0``
    the vertex that opened ``v0`` in that opposite search (None when ``v0``
    is that search's root).
    """

    events: list[MeetingEvent]
    side: Direction | None = None
    u0: int | None = None
    v0: int | None = None
    w0: int | None = None
    d_s: float | None = None
    d_t: float | None = None

    def as_tuples(self) -> list[tuple[float, EdgeRef | None, int]]:
        return [(e.mu, e.edge, e.close_index) for e in self.events]

    def split(self) -> tuple[float, float] | None:
        """(d_s, d_t) with ``mu == d_s + 2 + d_t`` on unit-weight runs.

        When ``v0`` is the opposite root there is no ``w0``; the two middle
        edges are then taken one step earlier on the scanning side.  Returns
        None if mu < 2 leaves no such split, or if mu was settled by an
        exhausted search rather than by a meeting edge.
        """
        if self.d_s is not None and self.d_t is not None:
            return self.d_s, self.d_t
        if not self.events or self.side is None:
            return None
        mu = self.events[-1].mu
        if mu < 2:
            return None
        if self.side is Direction.FORWARD:
            return mu - 2.0, 0.0
        return 0.0, mu - 2.0


def meeting_trace(report: RunReport) -> MeetingTrace:
    if report.meetings is None:
        raise TraceMissing("run the search with trace=True to record meetings")
    if not report.meetings:
        return MeetingTrace([])
    final = report.meetings[-1]
    if final.scanned_by is None:
        return MeetingTrace(list(report.meetings))
    fwd, bwd = report.fwd, report.bwd
    u0, v0 = final.scanning, final.neighbor
    opposite = bwd if final.scanned_by is Direction.FORWARD else fwd
    scanner = fwd if opposite is bwd else bwd
    if final.edge is None:
        # meeting at a vertex closed by both searches: read it as the edge
        # into v0 from its forward parent
        v = final.scanning
        fr, br = fwd.parent[v], bwd.parent[v]
        if fr is None or br is None:
            return MeetingTrace(list(report.meetings), final.scanned_by)
        u0, w0 = fwd._prev(v, fr), bwd._prev(v, br)
        return MeetingTrace(list(report.meetings), Direction.FORWARD, u0, v, w0,
                            fwd.label[u0], bwd.label[w0])
    ref = opposite.parent[v0]
    w0 = opposite._prev(v0, ref) if ref is not None else None
    d_s = d_t = None
    if w0 is not None:
        if final.scanned_by is Direction.FORWARD:
            d_s, d_t = scanner.label[u0], opposite.label[w0]
        else:
            d_s, d_t = opposite.label[w0], scanner.label[u0]
    return MeetingTrace(list(report.meetings), final.scanned_by, u0, v0, w0, d_s, d_t)


# -- strategy registry ---------------------------------------------------------

def _bidi(sel, stop):
    return lambda G, policy, s, t, **kw: run_bidirectional(G, policy, s, t, sel, stop, **kw)


def _bfs(stop):
    return lambda G, policy, s, t, **kw: run_bidirectional_bfs(G, policy, s, t, stop, **kw)


#: Name -> callable ``(G, policy, s, t, *, trace=False)`` returning a RunReport.
STRATEGIES = {
    strategy_name(sel, StoppingRule.POHL_BOUND): _bidi(sel, StoppingRule.POHL_BOUND)
    for sel in SelectionRule
}
STRATEGIES["first-meet"] = _bidi(SelectionRule.EQUAL_EDGE_WORK, StoppingRule.FIRST_MEET_INCORRECT)
STRATEGIES["bidi-equal-eager"] = _bidi(SelectionRule.EQUAL_EDGE_WORK, StoppingRule.EAGER_MEET)
STRATEGIES["bfs-pohl"] = _bfs(StoppingRule.POHL_BOUND)
STRATEGIES["bfs-eager"] = _bfs(StoppingRule.EAGER_MEET)
STRATEGIES["early-abort"] = run_unidirectional_early_abort
STRATEGIES["classical"] = run_classical_dijkstra
STRATEGIES["classical-exhaustive"] = (
    lambda G, policy, s, t, **kw: run_classical_dijkstra(G, policy, s, t, until="exhaustion", **kw))

#: Strategies whose answers may be wrong by design.
UNSOUND_STRATEGIES = frozenset({"first-meet"})
