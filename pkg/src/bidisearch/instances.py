"""Instance generators and proof-derived perturbations.

* random corpora (Erdos-Renyi, weighted grids, random multigraphs),
* the graded double-tree lower-bound family with one hidden connecting
  edge, and a searcher tailored to it,
* the zero-weight double binary tree and an advice-following walker,
* explored-edge sets of the reference run and the degree-preserving
  rewirings that turn any unexplored pair of edges into a shorter s-t path.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from .errors import (
    AdviceMismatch,
    GapNonpositive,
    NeighborIndexOutOfRange,
    OrientationViolated,
    SameEdge,
    SpecInvalid,
    Unreachable,
)
from .graph import (
    UNREACHABLE,
    EdgeRef,
    MultiGraph,
    build_degenerate_graph,
    build_graph,
    distances_from,
    true_distance,
)
from .oracle import AsStored, OrderingPolicy, QueryLedger, attach
from .search import (
    RunReport,
    Termination,
    meeting_trace,
    run_bidirectional,
    run_bidirectional_bfs,
    run_classical_dijkstra,
)

StPair = tuple[int, int]
WEIGHT_GRID = 1024  # weights are multiples of 1/1024 so path sums stay exact


@dataclass(frozen=True)
class InstanceSpec:
    family: str
    params: dict
    seed: int | None = None

    def to_json(self) -> str:
        return json.dumps({"family": self.family, "params": self.params, "seed": self.seed},
                          sort_keys=True)

    def as_dict(self) -> dict:
        return {"family": self.family, "params": dict(self.params), "seed": self.seed}

    @classmethod
    def from_dict(cls, d: dict) -> InstanceSpec:
        return cls(d["family"], d["params"], d.get("seed"))


# -- random models -----------------------------------------------------------

@dataclass(frozen=True)
class ErdosRenyi:
    n: int
    p: float


@dataclass(frozen=True)
class GridWithWeights:
    rows: int
    cols: int


@dataclass(frozen=True)
class RandomMulti:
    n: int
    m: int
    loop_rate: float = 0.05
    parallel_rate: float = 0.1


def _weights(rng: np.random.Generator, count: int, weight_range) -> list[float]:
    if weight_range is None:
        return [1.0] * count
    lo, hi = weight_range
    kmin = math.floor(lo * WEIGHT_GRID) + 1
    kmax = math.floor(hi * WEIGHT_GRID)
    if kmin > kmax:
        raise SpecInvalid(f"weight range {weight_range} has no grid point")
    return [float(k) / WEIGHT_GRID for k in rng.integers(kmin, kmax + 1, size=count)]


def gen_random(model, weight_range: tuple[float, float] | None = (0.0, 10.0), seed: int = 0,
               *, directed: bool = False) -> tuple[MultiGraph, StPair]:
    """Reproducible random instance and a distinct (s, t) pair.

    Weights are drawn from the grid ``k/1024`` inside ``(lo, hi]``;
    ``weight_range=None`` gives an unweighted graph.
    """
    if weight_range is not None and weight_range[0] < 0:
        raise SpecInvalid("weights must be positive")
    rng = np.random.default_rng(seed)
    ends: list[tuple[int, int]] = []
    if isinstance(model, ErdosRenyi):
        n = model.n
        if n < 2 or not 0 <= model.p <= 1:
            raise SpecInvalid(f"bad Erdos-Renyi parameters {model}")
        for u in range(1, n + 1):
            for v in range(1 if directed else u + 1, n + 1):
                if u != v and rng.random() < model.p:
                    ends.append((u, v))
    elif isinstance(model, GridWithWeights):
        r, c = model.rows, model.cols
        if r < 1 or c < 1 or r * c < 2:
            raise SpecInvalid(f"bad grid parameters {model}")
        n = r * c
        vid = lambda i, j: i * c + j + 1  # noqa: E731
        for i in range(r):
            for j in range(c):
                if j + 1 < c:
                    ends.append((vid(i, j), vid(i, j + 1)))
                if i + 1 < r:
                    ends.append((vid(i, j), vid(i + 1, j)))
    elif isinstance(model, RandomMulti):
        n = model.n
        if n < 2 or model.m < 0:
            raise SpecInvalid(f"bad multigraph parameters {model}")
        for _ in range(model.m):
            roll = rng.random()
            if ends and roll < model.parallel_rate:
                ends.append(ends[int(rng.integers(len(ends)))])
            elif roll < model.parallel_rate + model.loop_rate:
                u = int(rng.integers(1, n + 1))
                ends.append((u, u))
            else:
                u, v = (int(x) for x in rng.integers(1, n + 1, size=2))
                ends.append((u, v))
    else:
        raise SpecInvalid(f"unknown random model {model!r}")
    weights = _weights(rng, len(ends), weight_range)
    G = build_graph(directed, n, [(u, v, w) for (u, v), w in zip(ends, weights)],
                    weighted=weight_range is not None)
    s, t = (int(x) for x in rng.choice(np.arange(1, n + 1), size=2, replace=False))
    return G, (s, t)


def directed_star(k: int = 100) -> tuple[MultiGraph, StPair]:
    """s->t (1), s->x_i (10), x_i->y_i (10); the edge to t is listed first."""
    s, t = 1, 2
    edges = [(s, t, 1.0)]
    edges += [(s, 2 + i, 10.0) for i in range(1, k + 1)]
    edges += [(2 + i, 2 + k + i, 10.0) for i in range(1, k + 1)]
    return build_graph(True, 2 + 2 * k, edges), (s, t)


# -- graded double tree (Delta-gap lower bound) ----------------------------

@dataclass(frozen=True)
class LowerBoundSpec:
    delta: int
    depth: int
    i: int
    nu: float = 1.0

    @property
    def last_layer_edges(self) -> int:
        return self.delta ** (self.depth - 2) * self.delta * (self.delta + 1) // 2

    def validate(self) -> None:
        if self.delta < 2 or self.depth < 2:
            raise SpecInvalid("need delta >= 2 and depth >= 2")
        if not self.nu > 0:
            raise SpecInvalid("nu must be positive")
        if not 1 <= self.i <= self.last_layer_edges:
            raise SpecInvalid(f"hidden edge index {self.i} outside [1, {self.last_layer_edges}]")

    def hidden_class(self) -> int:
        """Degree of the penultimate vertices joined by the hidden edge."""
        self.validate()
        group_size = self.delta ** (self.depth - 2)
        seen = 0
        for q in range(self.delta ** (self.depth - 1)):
            children = self.delta - q // group_size
            if seen + children >= self.i:
                return children + 1
            seen += children
        raise AssertionError("unreachable")


def _graded_tree(delta: int, depth: int) -> tuple[list[list[int]], list[tuple[int, int]], list[tuple[int, int]]]:
    """Local ids in BFS order.  Returns layers, all edges, and the last-layer edges in order."""
    layers = [[0]]
    edges: list[tuple[int, int]] = []
    nxt = 1
    group_size = delta ** (depth - 2)
    for level in range(depth):
        layer = []
        for q, p in enumerate(layers[-1]):
            children = delta if level < depth - 1 else delta - q // group_size
            for _ in range(children):
                edges.append((p, nxt))
                layer.append(nxt)
                nxt += 1
        layers.append(layer)
    last = [e for e in edges if e[1] in set(layers[-1])]
    return layers, edges, last


def gen_lower_bound_G1(spec: LowerBoundSpec) -> tuple[MultiGraph, StPair, int]:
    """Two graded Delta-ary trees of the given depth rooted at s and t.

    Penultimate vertices come in Delta groups of ``Delta**(depth-2)``; group g
    keeps ``Delta - g`` children.  The i-th last-layer edge (left to right) is
    removed in both trees, its leaf deleted, and the two penultimate parents
    are joined by one edge.  Every weight is ``nu``; ``nu == 1`` yields an
    unweighted-mode graph.  Returns the graph, (s, t) and the degree class k
    of the joined vertices.
    """
    spec.validate()
    layers, edges, last = _graded_tree(spec.delta, spec.depth)
    hidden_parent, hidden_leaf = last[spec.i - 1]
    size = 1 + sum(len(x) for x in layers[1:])
    ids: dict[tuple[int, int], int] = {}
    nxt = 1
    for tree in (0, 1):
        for local in range(size):
            if local != hidden_leaf:
                ids[(tree, local)] = nxt
                nxt += 1
    triples = []
    for tree in (0, 1):
        for p, c in edges:
            if c != hidden_leaf:
                triples.append((ids[(tree, p)], ids[(tree, c)], spec.nu))
    triples.append((ids[(0, hidden_parent)], ids[(1, hidden_parent)], spec.nu))
    G = build_graph(False, nxt - 1, triples, weighted=spec.nu != 1.0)
    return G, (ids[(0, 0)], ids[(1, 0)]), spec.hidden_class()


class _NotG1(Exception):
    pass


def _explore_tree(oracle, root: int, avoid: set[int], depth: int | None = None):
    """Scan layers from ``root`` down to the penultimate layer, verifying the tree shape.

    Without ``depth`` the penultimate layer is recognised by its graded
    degrees.  With ``depth`` known, that layer is only collected: its
    membership is all the other side needs, so no degrees are asked for it.
    """
    delta = oracle.degree(root)
    if delta < 2:
        raise _NotG1
    parent_edge: dict[int, EdgeRef | None] = {root: None}
    weight = None
    layer, degs = [root], {root: delta}
    level = 0
    while True:
        nxt = []
        for u in layer:
            for j in range(1, degs[u] + 1):
                x, w, ref = oracle.neighbor(u, j)
                if ref == parent_edge[u]:
                    continue
                if weight is None:
                    weight = w
                if w != weight or x in parent_edge or x in avoid:
                    raise _NotG1
                parent_edge[x] = ref
                nxt.append(x)
        level += 1
        if len(nxt) != delta ** level or level > oracle.n:
            raise _NotG1
        if depth is not None and level == depth - 1:
            return nxt, {}, parent_edge, weight, depth
        degs = {x: oracle.degree(x) for x in nxt}
        layer = nxt
        if all(d == delta + 1 for d in degs.values()):
            if depth is not None and level >= depth - 1:
                raise _NotG1
            continue
        if depth is not None:
            raise _NotG1
        # graded penultimate layer: delta groups of delta**(level-1), degrees delta+1 .. 2
        group = delta ** (level - 1)
        for g in range(delta):
            want = delta + 1 - g
            if sum(1 for x in layer[g * group:(g + 1) * group] if degs[x] == want) != group:
                raise _NotG1
        return layer, degs, parent_edge, weight, level + 1


def _tree_path(parent_edge: dict, x: int) -> list[EdgeRef]:
    path = []
    while parent_edge[x] is not None:
        ref = parent_edge[x]
        path.append(ref)
        x = ref.other(x)
    path.reverse()
    return path


def tailored_searcher_G1(G: MultiGraph, s: int, t: int, k: int,
                         policy: OrderingPolicy | None = None) -> RunReport:
    """Search tailored to the graded double tree whose hidden edge joins degree-k vertices.

    Both trees are scanned down to their penultimate layers (checking the
    shape on the way; t's penultimate layer is collected without degree
    queries); then only degree-k penultimate vertices on the s side
    are scanned, looking for an edge of the minimum weight into the t-side
    penultimate layer.  Any deviation from the expected shape, or no such
    edge, falls back to classical Dijkstra on the same oracle, so the answer
    is always correct for graphs whose weights are at least the tree weight.
    """
    oracle = attach(G, policy)
    if not G.directed and not G.degenerate:
        try:
            pen_s, degs_s, par_s, nu, depth = _explore_tree(oracle, s, {t})
            pen_t, _, par_t, nu_t, depth_t = _explore_tree(oracle, t, set(par_s), depth)
            if (nu_t, depth_t, len(pen_t)) != (nu, depth, len(pen_s)):
                raise _NotG1
            target = set(pen_t)
            for p in pen_s:
                if degs_s[p] != k:
                    continue
                for j in range(1, k + 1):
                    x, w, ref = oracle.neighbor(p, j)
                    if ref != par_s[p] and x in target and w == nu:
                        path = _tree_path(par_s, p) + [ref] + list(reversed(_tree_path(par_t, x)))
                        dist = 0.0
                        for e in path:
                            dist += G.weight(e)
                        led = oracle.snapshot()
                        return RunReport(s, t, dist, path, led, {"fwd": led, "bwd": QueryLedger({}, frozenset())},
                                         Termination.STOPPED, "tailored-g1")
            raise _NotG1
        except (_NotG1, NeighborIndexOutOfRange):
            pass
    rep = run_classical_dijkstra(G, policy, s, t, oracle=oracle)
    rep.strategy = "tailored-g1-fallback"
    return rep


# -- zero-weight double binary tree ------------------------------------------

def gen_zero_weight_G0(depth: int, i: int) -> tuple[MultiGraph, StPair]:
    """Two complete binary trees of the given depth, all weights 0, joined at their i-th leaves.

    Vertex ``h`` (heap numbering) of the s tree has id ``h``; the t tree is
    offset by ``2**(depth+1) - 1``.
    """
    if depth < 1 or not 1 <= i <= 2 ** depth:
        raise SpecInvalid(f"need depth >= 1 and 1 <= i <= 2**depth, got depth={depth}, i={i}")
    size = 2 ** (depth + 1) - 1
    triples = [(h // 2, h, 0.0) for h in range(2, size + 1)]
    triples += [(size + h // 2, size + h, 0.0) for h in range(2, size + 1)]
    leaf = 2 ** depth + i - 1
    triples.append((leaf, size + leaf, 0.0))
    return build_degenerate_graph(False, 2 * size, triples), (1, size + 1)


def g0_advice(depth: int, i: int) -> list[int]:
    """The designed s-to-t vertex path of ``gen_zero_weight_G0(depth, i)``."""
    size = 2 ** (depth + 1) - 1
    h = 2 ** depth + i - 1
    down = []
    while h >= 1:
        down.append(h)
        h //= 2
    down.reverse()
    return down + [size + x for x in reversed(down)]


def advice_walker_G0(G0: MultiGraph, advice: list[int], policy: OrderingPolicy | None = None) -> RunReport:
    """Follow the advised vertex path, probing neighbor indices in order at each hop.

    Confirms the walk has total weight 0 and returns distance 0.
    """
    if len(advice) < 2:
        raise AdviceMismatch("advice must contain at least s and t")
    oracle = attach(G0, policy)
    path = []
    total = 0.0
    for cur, nxt in zip(advice, advice[1:]):
        j = 1
        while True:
            try:
                x, w, ref = oracle.neighbor(cur, j)
            except NeighborIndexOutOfRange:
                raise AdviceMismatch(f"no edge {cur}-{nxt} in the graph") from None
            if x == nxt:
                break
            j += 1
        path.append(ref)
        total += w
    if total != 0.0:
        raise AdviceMismatch(f"advised walk has weight {total}, not 0")
    led = oracle.snapshot()
    return RunReport(advice[0], advice[-1], 0.0, path, led,
                     {"fwd": led, "bwd": QueryLedger({}, frozenset())}, Termination.STOPPED, "advice-walker")


# -- explored sets and perturbations --------------------------------------------

@dataclass(frozen=True)
class ExploredSets:
    E_s: frozenset[EdgeRef]
    E_t: frozenset[EdgeRef]
    d_s: float
    d_t: float
    report: RunReport = field(repr=False, compare=False)


def explored_sets(G: MultiGraph, s: int, t: int) -> ExploredSets:
    """Edge sets the lower-bound arguments work with.

    Weighted graphs: the edges each direction of the reference run explored,
    with ``d_s``/``d_t`` the labels of the last vertices closed on each side.
    Unweighted graphs: ``d_s``/``d_t`` come from the meeting trace of
    bidirectional BFS and the sets are all edges leaving vertices within
    ``d_s`` of s (resp. entering vertices within ``d_t`` of t).
    """
    if G.weighted:
        rep = run_bidirectional(G, AsStored(), s, t, trace=True)
        if not rep.reachable:
            raise Unreachable(f"{t} is not reachable from {s}")
        return ExploredSets(rep.per_direction["fwd"].explored, rep.per_direction["bwd"].explored,
                            rep.stop_labels[0], rep.stop_labels[1], rep)
    rep = run_bidirectional_bfs(G, AsStored(), s, t, trace=True)
    if not rep.reachable:
        raise Unreachable(f"{t} is not reachable from {s}")
    split = meeting_trace(rep).split()
    if split is None:
        raise SpecInvalid("s and t are adjacent; no (d_s, d_t) split exists")
    d_s, d_t = split
    ds = distances_from(G, s)
    dt = distances_from(G, t, reverse=True)
    E_s = {G.refs[idx] for u in range(1, G.n + 1) if ds[u] <= d_s for idx in G.out_edges(u)}
    E_t = {G.refs[idx] for u in range(1, G.n + 1) if dt[u] <= d_t for idx in G.in_edges(u)}
    return ExploredSets(frozenset(E_s), frozenset(E_t), d_s, d_t, rep)


class PerturbMode(str, Enum):
    WEIGHTED_SWAP = "WeightedSwap"
    WEIGHTED_SINGLE = "WeightedSingle"
    UNWEIGHTED_SWAP = "UnweightedSwap"


@dataclass(frozen=True)
class PerturbationPlan:
    s: int
    t: int
    e1: EdgeRef
    u1: int
    v1: int
    e2: EdgeRef
    u2: int
    v2: int
    delta: float
    delta_prime: float
    mode: PerturbMode


def _orient(G: MultiGraph, ref: EdgeRef, dist: list[float], near: int | None) -> tuple[int, int]:
    """(near endpoint, far endpoint) of ``ref`` w.r.t. ``dist``; directed edges keep their
    orientation and ``near`` selects which end is returned first."""
    a, b = ref.tail, ref.head
    if near is not None:
        if near not in (a, b):
            raise OrientationViolated(f"{near} is not an endpoint of {ref}")
        return near, (b if near == a else a)
    return (a, b) if dist[a] <= dist[b] else (b, a)


def _oriented_pair(G, s, t, e1, e2, u1, v2):
    ds = distances_from(G, s)
    dt = distances_from(G, t, reverse=True)
    if G.directed:
        u1_, v1_ = e1.tail, e1.head
        u2_, v2_ = e2.tail, e2.head
        if (u1 is not None and u1 != u1_) or (v2 is not None and v2 != v2_):
            raise OrientationViolated("directed edges keep their orientation")
    else:
        u1_, v1_ = _orient(G, e1, ds, u1)
        v2_, u2_ = _orient(G, e2, dt, v2)
        if ds[u1_] > ds[v1_] or dt[v2_] > dt[u2_]:
            raise OrientationViolated(
                f"need d(s,u1) <= d(s,v1) and d(v2,t) <= d(u2,t); got "
                f"{ds[u1_]} > {ds[v1_]} or {dt[v2_]} > {dt[u2_]}")
    return (u1_, v1_, u2_, v2_), ds, dt


def make_plan(G: MultiGraph, s: int, t: int, e1: EdgeRef, e2: EdgeRef, *,
              u1: int | None = None, v2: int | None = None,
              delta_prime: float | None = None) -> PerturbationPlan:
    """Orient e1 toward s and e2 toward t, compute the gap
    ``delta = d(s,t) - d(s,u1) - d(v2,t)`` and pick ``delta_prime`` (default delta/2)."""
    (u1_, v1_, u2_, v2_), ds, dt = _oriented_pair(G, s, t, e1, e2, u1, v2)
    delta = ds[t] - ds[u1_] - dt[v2_]
    if not delta > 0 or math.isnan(delta):
        raise GapNonpositive(f"gap {delta} is not positive for e1={e1}, e2={e2}")
    dp = delta / 2 if delta_prime is None else delta_prime
    mode = PerturbMode.WEIGHTED_SINGLE if e1 == e2 else PerturbMode.WEIGHTED_SWAP
    return PerturbationPlan(s, t, e1, u1_, v1_, e2, u2_, v2_, delta, dp, mode)


def perturb_weighted(G: MultiGraph, plan: PerturbationPlan) -> MultiGraph:
    """Build G' from a plan.

    Distinct edges: e1 becomes ``u1-v2`` with weight ``delta_prime`` and e2
    becomes ``v1-u2`` (``u2->v1`` when directed) with weight
    ``w(e1) + w(e2)``; each replacement keeps the slot of the edge it
    replaces.  Same edge: only its weight changes to ``delta_prime``.
    The degree sequence is unchanged either way.
    """
    (u1, v1, u2, v2), ds, dt = _oriented_pair(G, plan.s, plan.t, plan.e1, plan.e2, plan.u1, plan.v2)
    if (u1, v1, u2, v2) != (plan.u1, plan.v1, plan.u2, plan.v2):
        raise OrientationViolated("plan endpoints do not match the edges")
    delta = ds[plan.t] - ds[u1] - dt[v2]
    if not delta > 0:
        raise GapNonpositive(f"gap {delta} is not positive on this graph")
    if not 0 < plan.delta_prime < delta:
        raise GapNonpositive(f"delta_prime {plan.delta_prime} not in (0, {delta})")
    triples = G.edge_list()
    i1, i2 = G.index_of(plan.e1), G.index_of(plan.e2)
    if plan.e1 == plan.e2:
        u, v, _ = triples[i1]
        triples[i1] = (u, v, plan.delta_prime)
    else:
        w = G.weights[i1] + G.weights[i2]
        triples[i1] = (u1, v2, plan.delta_prime)
        triples[i2] = (u2, v1, w) if G.directed else (v1, u2, w)
    return build_graph(G.directed, G.n, triples)


def perturb_unweighted(G: MultiGraph, s: int, t: int, e1: EdgeRef, e2: EdgeRef, *,
                       u1: int | None = None, v2: int | None = None) -> MultiGraph:
    """Degree-preserving swap of two distinct edges on a unit-weight graph:
    e1, e2 become ``u1-v2`` and ``v1-u2`` (``u1->v2``, ``u2->v1`` when directed)."""
    if e1 == e2:
        raise SameEdge("the unweighted swap needs two distinct edges")
    (u1_, v1_, u2_, v2_), _, _ = _oriented_pair(G, s, t, e1, e2, u1, v2)
    triples = G.edge_list()
    i1, i2 = G.index_of(e1), G.index_of(e2)
    triples[i1] = (u1_, v2_, 1.0)
    triples[i2] = (u2_, v1_, 1.0) if G.directed else (v1_, u2_, 1.0)
    return build_graph(G.directed, G.n, triples, weighted=G.weighted)


# -- witness search ------------------------------------------------------------

@dataclass(frozen=True)
class Witness:
    graph: MultiGraph
    pair: StPair
    wrong: float
    right: float
    instance: InstanceSpec


def find_incorrect_instance(strategy: str | Callable = "first-meet", trial_budget: int = 10_000,
                            seed: int = 0, *, n: int = 8, p: float = 0.5,
                            weight_range: tuple[float, float] = (0.0, 10.0)) -> Witness | None:
    """Sample Erdos-Renyi instances until ``strategy`` answers with a distance
    different from the true one.  Returns None when the budget runs out."""
    from .search import STRATEGIES

    run = STRATEGIES[strategy] if isinstance(strategy, str) else strategy
    for trial in range(trial_budget):
        inst_seed = seed * 1_000_003 + trial
        G, (s, t) = gen_random(ErdosRenyi(n, p), weight_range, inst_seed)
        right = true_distance(G, s, t)
        wrong = run(G, AsStored(), s, t).distance
        if wrong != right:
            spec = InstanceSpec("er", {"n": n, "p": p, "s": s, "t": t,
                                       "weights": list(weight_range)}, inst_seed)
            return Witness(G, (s, t), wrong, right, spec)
    return None


def instance_from_spec(spec: InstanceSpec) -> tuple[MultiGraph, StPair]:
    """Regenerate an instance from its provenance record."""
    p = spec.params
    fam = spec.family
    if fam == "er":
        wr = tuple(p["weights"]) if p.get("weights") is not None else None
        return gen_random(ErdosRenyi(p["n"], p["p"]), wr, spec.seed, directed=p.get("directed", False))
    if fam == "grid":
        wr = tuple(p["weights"]) if p.get("weights") is not None else None
        return gen_random(GridWithWeights(p["rows"], p["cols"]), wr, spec.seed)
    if fam == "multi":
        wr = tuple(p["weights"]) if p.get("weights") is not None else None
        return gen_random(RandomMulti(p["n"], p["m"]), wr, spec.seed, directed=p.get("directed", False))
    if fam == "g1":
        G, st, _ = gen_lower_bound_G1(LowerBoundSpec(p["delta"], p["depth"], p["i"], p.get("nu", 1.0)))
        return G, st
    if fam == "g0":
        return gen_zero_weight_G0(p["depth"], p["i"])
    raise SpecInvalid(f"unknown family {fam!r}")


__all__ = [name for name in dir() if not name.startswith("_")] + ["UNREACHABLE", "asdict"]
