"""Metered query access to a :class:`~bidisearch.graph.MultiGraph`.

Search code never touches the graph directly.  It goes through an
:class:`Oracle`, which answers Degree/Neighbor style queries, counts each
one, and remembers which edges have been explored.  Neighbor order is
fixed per incidence list at attach time by an ordering policy.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Mapping

import numpy as np

from .errors import NeighborIndexOutOfRange, PolicyMismatch, TraceMismatch, VertexOutOfRange
from .graph import EdgeRef, MultiGraph, distances_from


class QueryKind(str, Enum):
    DEGREE = "Degree"
    NEIGHBOR = "Neighbor"
    INDEGREE = "Indegree"
    OUTDEGREE = "Outdegree"
    INNEIGHBOR = "Inneighbor"
    OUTNEIGHBOR = "Outneighbor"


NEIGHBOR_FAMILY = frozenset({QueryKind.NEIGHBOR, QueryKind.INNEIGHBOR, QueryKind.OUTNEIGHBOR})
DEGREE_FAMILY = frozenset({QueryKind.DEGREE, QueryKind.INDEGREE, QueryKind.OUTDEGREE})
_DIRECTED_ONLY = frozenset({QueryKind.INDEGREE, QueryKind.OUTDEGREE,
                            QueryKind.INNEIGHBOR, QueryKind.OUTNEIGHBOR})

# side -> (degree kind, neighbor kind) for each directedness
_KINDS = {
    (False, "both"): (QueryKind.DEGREE, QueryKind.NEIGHBOR),
    (True, "out"): (QueryKind.OUTDEGREE, QueryKind.OUTNEIGHBOR),
    (True, "in"): (QueryKind.INDEGREE, QueryKind.INNEIGHBOR),
}


# -- ordering policies ------------------------------------------------------

@dataclass(frozen=True)
class AsStored:
    pass


@dataclass(frozen=True)
class SeededShuffle:
    seed: int


@dataclass(frozen=True)
class Adversarial:
    rule: str = "higher-label-last"
    anchor: int | None = None


OrderingPolicy = AsStored | SeededShuffle | Adversarial


@dataclass(frozen=True)
class AdversarialRule:
    reorder: Callable[[MultiGraph, int | None, tuple, tuple], tuple[list, list]]
    directed_only: bool = False
    needs_anchor: bool = False


def _higher_label_last(G, anchor, out, inn):
    label = distances_from(G, anchor)
    key = lambda v: lambda idx: label[G.far_end(idx, v)]  # noqa: E731
    new_out = [sorted(lst, key=key(v)) for v, lst in enumerate(out)]
    if not G.directed:
        return new_out, new_out
    return new_out, [sorted(lst, key=key(v)) for v, lst in enumerate(inn)]


def _split_reverse(G, anchor, out, inn):
    return [list(x) for x in out], [list(reversed(x)) for x in inn]


ADVERSARIAL_RULES: dict[str, AdversarialRule] = {
    # edges toward vertices with larger distance from the anchor are listed last
    "higher-label-last": AdversarialRule(_higher_label_last, needs_anchor=True),
    # out-lists as stored, in-lists reversed
    "split-reverse": AdversarialRule(_split_reverse, directed_only=True),
}


def parse_policy(name: str, seed: int = 0, anchor: int | None = None) -> OrderingPolicy:
    """Map a CLI-style ordering name to a policy object."""
    if name in ("stored", "as-stored"):
        return AsStored()
    if name in ("shuffle", "seeded-shuffle"):
        return SeededShuffle(seed)
    if name in ADVERSARIAL_RULES:
        return Adversarial(name, anchor)
    raise PolicyMismatch(f"unknown ordering {name!r}")


def _permute(G: MultiGraph, policy: OrderingPolicy) -> tuple[tuple, tuple]:
    out = G._out
    inn = G._in
    if isinstance(policy, AsStored):
        return out, inn
    if isinstance(policy, SeededShuffle):
        rng = np.random.default_rng(policy.seed)
        new_out = tuple(tuple(lst[i] for i in rng.permutation(len(lst))) for lst in out)
        if not G.directed:
            return new_out, new_out
        return new_out, tuple(tuple(lst[i] for i in rng.permutation(len(lst))) for lst in inn)
    if isinstance(policy, Adversarial):
        rule = ADVERSARIAL_RULES.get(policy.rule)
        if rule is None:
            raise PolicyMismatch(f"unknown adversarial rule {policy.rule!r}")
        if rule.directed_only and not G.directed:
            raise PolicyMismatch(f"rule {policy.rule!r} needs an in/out split (directed graph)")
        if rule.needs_anchor:
            if policy.anchor is None or not 1 <= policy.anchor <= G.n:
                raise PolicyMismatch(f"rule {policy.rule!r} needs an anchor vertex in [1, {G.n}]")
        new_out, new_in = rule.reorder(G, policy.anchor, out, inn)
        new_out = tuple(tuple(x) for x in new_out)
        return new_out, (tuple(tuple(x) for x in new_in) if G.directed else new_out)
    raise PolicyMismatch(f"not an ordering policy: {policy!r}")


# -- ledger -----------------------------------------------------------------

@dataclass(frozen=True)
class QueryLedger:
    counts: Mapping[QueryKind, int]
    explored: frozenset[EdgeRef]
    trace: tuple | None = None

    @property
    def neighbor_queries(self) -> int:
        return sum(self.counts.get(k, 0) for k in NEIGHBOR_FAMILY)

    @property
    def degree_queries(self) -> int:
        return sum(self.counts.get(k, 0) for k in DEGREE_FAMILY)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def counts_dict(self) -> dict[str, int]:
        return {k.value: self.counts.get(k, 0) for k in QueryKind}

    def to_dict(self) -> dict:
        return {
            **self.counts_dict(),
            "neighbor_family": self.neighbor_queries,
            "degree_family": self.degree_queries,
            "explored": len(self.explored),
        }


@dataclass
class _Tally:
    counts: dict = field(default_factory=lambda: {k: 0 for k in QueryKind})
    explored: set = field(default_factory=set)

    def freeze(self, trace=None) -> QueryLedger:
        return QueryLedger(dict(self.counts), frozenset(self.explored), trace)


@dataclass(frozen=True)
class TraceEntry:
    seq: int
    kind: QueryKind
    args: tuple
    ans: object

    def to_json(self) -> str:
        ans = self.ans
        if isinstance(ans, tuple):
            other, w, ref = ans
            ans = [other, w, ref.as_dict()]
        return json.dumps({"k": self.kind.value, "args": list(self.args), "ans": ans, "seq": self.seq})

    @classmethod
    def from_json(cls, line: str) -> TraceEntry:
        obj = json.loads(line)
        ans = obj["ans"]
        if isinstance(ans, list):
            ref = ans[2]
            ans = (ans[0], ans[1], EdgeRef(ref["u"], ref["v"], ref["k"]))
        return cls(obj["seq"], QueryKind(obj["k"]), tuple(obj["args"]), ans)


class Oracle:
    """Query gateway over one graph with exact metering.

    ``by`` on each query names an optional channel (e.g. ``"fwd"``/``"bwd"``)
    whose separate tally is kept alongside the shared ledger.
    """

    def __init__(self, G: MultiGraph, policy: OrderingPolicy | None = None, *, trace: bool = False):
        self._G = G
        self.policy = policy if policy is not None else AsStored()
        self._out, self._in = _permute(G, self.policy)
        self._tally = _Tally()
        self._channels: dict[str, _Tally] = {}
        self._trace: list[TraceEntry] | None = [] if trace else None
        self._seq = 0

    @property
    def n(self) -> int:
        return self._G.n

    @property
    def directed(self) -> bool:
        return self._G.directed

    @property
    def weighted(self) -> bool:
        return self._G.weighted

    @property
    def degenerate(self) -> bool:
        return self._G.degenerate

    def _charge(self, kind: QueryKind, by: str | None, ref: EdgeRef | None, args, ans) -> None:
        self._tally.counts[kind] += 1
        if ref is not None:
            self._tally.explored.add(ref)
        if by is not None:
            ch = self._channels.setdefault(by, _Tally())
            ch.counts[kind] += 1
            if ref is not None:
                ch.explored.add(ref)
        if self._trace is not None:
            self._trace.append(TraceEntry(self._seq, kind, args, ans))
        self._seq += 1

    def _check(self, kind: QueryKind, i: int) -> None:
        if (kind in _DIRECTED_ONLY) != self._G.directed:
            where = "directed" if self._G.directed else "undirected"
            raise PolicyMismatch(f"{kind.value} query is not available on a {where} graph")
        self._G.check_vertex(i)

    def _lists(self, kind: QueryKind) -> tuple:
        return self._in if kind in (QueryKind.INDEGREE, QueryKind.INNEIGHBOR) else self._out

    def _degree(self, kind: QueryKind, i: int, by: str | None) -> int:
        self._check(kind, i)
        d = len(self._lists(kind)[i])
        self._charge(kind, by, None, (i,), d)
        return d

    def _neighbor(self, kind: QueryKind, i: int, j: int, by: str | None) -> tuple[int, float, EdgeRef]:
        self._check(kind, i)
        lst = self._lists(kind)[i]
        if not 1 <= j <= len(lst):
            raise NeighborIndexOutOfRange(f"vertex {i} has no neighbor #{j} (degree {len(lst)})")
        idx = lst[j - 1]
        G = self._G
        ans = (G.far_end(idx, i), G.weights[idx], G.refs[idx])
        self._charge(kind, by, ans[2], (i, j), ans)
        return ans

    # public query set

    def degree(self, i: int, *, by: str | None = None) -> int:
        return self._degree(QueryKind.DEGREE, i, by)

    def out_degree(self, i: int, *, by: str | None = None) -> int:
        return self._degree(QueryKind.OUTDEGREE, i, by)

    def in_degree(self, i: int, *, by: str | None = None) -> int:
        return self._degree(QueryKind.INDEGREE, i, by)

    def neighbor(self, i: int, j: int, *, by: str | None = None):
        return self._neighbor(QueryKind.NEIGHBOR, i, j, by)

    def out_neighbor(self, i: int, j: int, *, by: str | None = None):
        return self._neighbor(QueryKind.OUTNEIGHBOR, i, j, by)

    def in_neighbor(self, i: int, j: int, *, by: str | None = None):
        return self._neighbor(QueryKind.INNEIGHBOR, i, j, by)

    def side_queries(self, side: str) -> tuple[Callable, Callable]:
        """(degree, neighbor) callables for ``side`` in {"both", "out", "in"}."""
        try:
            dk, nk = _KINDS[(self._G.directed, side)]
        except KeyError:
            raise PolicyMismatch(f"side {side!r} invalid for this graph") from None
        return (lambda i, by=None: self._degree(dk, i, by),
                lambda i, j, by=None: self._neighbor(nk, i, j, by))

    def query(self, kind: QueryKind, *args, by: str | None = None):
        if kind in NEIGHBOR_FAMILY:
            return self._neighbor(kind, *args, by)
        return self._degree(kind, *args, by)

    def snapshot(self, channel: str | None = None) -> QueryLedger:
        if channel is not None:
            return self._channels.get(channel, _Tally()).freeze()
        trace = tuple(self._trace) if self._trace is not None else None
        return self._tally.freeze(trace)


def attach(G: MultiGraph, policy: OrderingPolicy | None = None, *, trace: bool = False) -> Oracle:
    return Oracle(G, policy, trace=trace)


def replay(trace: Iterable[TraceEntry], oracle: Oracle) -> QueryLedger:
    """Re-issue every query of ``trace`` against ``oracle``; raise on any differing answer."""
    for entry in trace:
        got = oracle.query(entry.kind, *entry.args)
        if got != entry.ans:
            raise TraceMismatch(f"query #{entry.seq} {entry.kind.value}{entry.args}: "
                                f"recorded {entry.ans!r}, got {got!r}")
    return oracle.snapshot()


def dump_trace(trace: Iterable[TraceEntry]) -> str:
    return "".join(e.to_json() + "\n" for e in trace)


def load_trace(text: str) -> list[TraceEntry]:
    return [TraceEntry.from_json(line) for line in text.splitlines() if line.strip()]
