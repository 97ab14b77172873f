"""Certification suites: executable checks of the optimality arguments.

Each suite draws seeded instances, runs the relevant construction and
records every failure with the instance that reproduces it.  A suite passes
iff its failure list is empty.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import BidiError, SpecInvalid
from .graph import MultiGraph, distances_from, true_distance, walk_length
from .instances import (
    InstanceSpec,
    LowerBoundSpec,
    PerturbMode,
    advice_walker_G0,
    explored_sets,
    g0_advice,
    gen_lower_bound_G1,
    gen_zero_weight_G0,
    instance_from_spec,
    make_plan,
    perturb_unweighted,
    perturb_weighted,
    tailored_searcher_G1,
)
from .oracle import AsStored, attach, replay
from .search import Termination, meeting_trace, run_bidirectional, run_bidirectional_bfs


class Suite(str, Enum):
    PERTURB_WEIGHTED = "perturb-weighted"
    PERTURB_UNWEIGHTED = "perturb-unweighted"
    DELTA_GAP = "delta-gap"
    ZERO_WEIGHT = "zero-weight"
    EQUAL_WORK = "equal-work"
    STOP_SOUNDNESS = "stop-soundness"
    TRACE_REPLAY = "trace-replay"


@dataclass
class CertReport:
    suite: Suite
    trials: int
    failures: list[tuple[InstanceSpec, str]] = field(default_factory=list)
    table: list[dict] | None = None
    stats: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def fail(self, spec: InstanceSpec, detail: str) -> None:
        self.failures.append((spec, detail))

    def to_dict(self) -> dict:
        failures = sorted(self.failures, key=lambda f: (f[0].seed if f[0].seed is not None else -1, f[1]))
        out = {
            "suite": self.suite.value,
            "trials": self.trials,
            "passed": self.passed,
            "failures": [{"instance": spec.as_dict(), "detail": detail} for spec, detail in failures],
            "stats": self.stats,
        }
        if self.table is not None:
            out["table"] = self.table
        return out


# -- corpora ---------------------------------------------------------------

def corpus_spec(seed: int, *, weighted: bool = True, max_n: int = 50, max_m: int = 200) -> InstanceSpec:
    """Random multigraph instance with parallel edges and self-loops; the
    direction alternates with the seed."""
    rng = np.random.default_rng([seed, 0xB1D1])
    n = int(rng.integers(2, max_n + 1))
    m = int(rng.integers(n, max_m + 1)) if max_m >= n else max_m
    return InstanceSpec("multi", {
        "n": n, "m": m, "directed": seed % 2 == 1,
        "weights": [0.0, 10.0] if weighted else None,
    }, seed)


def _seeds(seed: int, count: int) -> range:
    return range(seed * 100_003, seed * 100_003 + count)


def _reference(spec: InstanceSpec):
    G, (s, t) = instance_from_spec(spec)
    return G, s, t, run_bidirectional(G, AsStored(), s, t, trace=True)


def _check_answer(report: CertReport, spec: InstanceSpec, G: MultiGraph, s: int, t: int, rep) -> None:
    right = true_distance(G, s, t)
    if rep.distance != right:
        report.fail(spec, f"distance {rep.distance} != true {right}")
        return
    if rep.reachable:
        try:
            total = walk_length(G, s, t, rep.path)
        except BidiError as exc:
            report.fail(spec, f"bad path: {exc}")
            return
        if total != rep.distance:
            report.fail(spec, f"path weight {total} != distance {rep.distance}")


def equal_work(trials: int = 1000, seed: int = 0) -> CertReport:
    """Correct answers with valid paths, and per-direction Neighbor-family counts within 1."""
    report = CertReport(Suite.EQUAL_WORK, trials)
    for sd in _seeds(seed, trials):
        spec = corpus_spec(sd)
        G, s, t, rep = _reference(spec)
        _check_answer(report, spec, G, s, t, rep)
        f = rep.per_direction["fwd"].neighbor_queries
        b = rep.per_direction["bwd"].neighbor_queries
        if abs(f - b) > 1:
            report.fail(spec, f"forward {f} vs backward {b} neighbor queries")
    return report


def stop_soundness(trials: int = 1000, seed: int = 0) -> CertReport:
    """When t is reachable: the two stop labels sum to at least mu, and mu is the answer."""
    report = CertReport(Suite.STOP_SOUNDNESS, trials)
    checked = 0
    for sd in _seeds(seed, trials):
        spec = corpus_spec(sd)
        G, s, t, rep = _reference(spec)
        if not rep.reachable:
            continue
        checked += 1
        a, b = rep.stop_labels
        if a + b < rep.mu:
            report.fail(spec, f"stop labels {a} + {b} < mu {rep.mu}")
        if rep.mu != rep.distance:
            report.fail(spec, f"mu {rep.mu} != distance {rep.distance}")
    report.stats["reachable_runs"] = checked
    return report


def _sorted_edges(edges) -> list:
    return sorted(edges)


def perturb_weighted_suite(trials: int = 200, seed: int = 0) -> CertReport:
    """Rewire an unexplored pair of edges (or shorten one edge) and check the
    s-t distance drops while every degree stays the same."""
    report = CertReport(Suite.PERTURB_WEIGHTED, trials)
    modes = {m.value: 0 for m in (PerturbMode.WEIGHTED_SWAP, PerturbMode.WEIGHTED_SINGLE)}
    done = 0
    sd = seed * 100_003
    while done < trials:
        spec = corpus_spec(sd)
        rng = np.random.default_rng([sd, 0x5EED])
        sd += 1
        G, (s, t) = instance_from_spec(spec)
        ex = None
        try:
            ex = explored_sets(G, s, t)
        except BidiError:
            continue
        if ex.report.termination is not Termination.STOPPED:
            continue
        E_s, E_t = _sorted_edges(ex.E_s), _sorted_edges(ex.E_t)
        common = sorted(ex.E_s & ex.E_t)
        if not E_s or not E_t:
            continue
        done += 1
        if common and done % 2 == 0:
            e1 = e2 = common[int(rng.integers(len(common)))]
        else:
            e1 = E_s[int(rng.integers(len(E_s)))]
            e2 = E_t[int(rng.integers(len(E_t)))]
        try:
            plan = make_plan(G, s, t, e1, e2)
            G2 = perturb_weighted(G, plan)
        except BidiError as exc:
            report.fail(spec, f"e1={e1} e2={e2}: {type(exc).__name__}: {exc}")
            continue
        modes[plan.mode.value] += 1
        d, d2 = true_distance(G, s, t), true_distance(G2, s, t)
        if not d2 < d:
            report.fail(spec, f"e1={e1} e2={e2}: perturbed distance {d2} not below {d}")
        if G2.degree_sequence() != G.degree_sequence() or G2.n != G.n:
            report.fail(spec, f"e1={e1} e2={e2}: degree sequence changed")
    report.stats["modes"] = modes
    if min(modes.values()) == 0:
        report.fail(InstanceSpec("multi", {}, seed), f"a perturbation branch was never exercised: {modes}")
    return report


def perturb_unweighted_suite(trials: int = 200, seed: int = 0) -> CertReport:
    """Unit-weight swap: mu = d_s + 2 + d_t and the rewired graph has an s-t
    path of at most d_s + d_t + 1 edges."""
    report = CertReport(Suite.PERTURB_UNWEIGHTED, trials)
    done = 0
    sd = seed * 100_003
    while done < trials:
        spec = corpus_spec(sd, weighted=False, max_n=40, max_m=80)
        rng = np.random.default_rng([sd, 0x5EED])
        sd += 1
        G, (s, t) = instance_from_spec(spec)
        if true_distance(G, s, t) < 2:
            continue
        try:
            ex = explored_sets(G, s, t)
        except BidiError:
            continue
        done += 1
        d = true_distance(G, s, t)
        mt = meeting_trace(ex.report)
        if mt.events[-1].mu != ex.d_s + 2 + ex.d_t or d != ex.d_s + 2 + ex.d_t:
            report.fail(spec, f"mu {mt.events[-1].mu}, d {d} vs d_s={ex.d_s}, d_t={ex.d_t}")
            continue
        if ex.E_s & ex.E_t:
            report.fail(spec, "E_s and E_t intersect")
            continue
        E_s, E_t = _sorted_edges(ex.E_s), _sorted_edges(ex.E_t)
        e1 = E_s[int(rng.integers(len(E_s)))]
        e2 = E_t[int(rng.integers(len(E_t)))]
        ds = distances_from(G, s)
        dt = distances_from(G, t, reverse=True)
        # e1 must leave the d_s-ball at its s-near end; pick that end explicitly
        u1 = e1.tail if G.directed or ds[e1.tail] <= ds[e1.head] else e1.head
        v2 = e2.head if G.directed or dt[e2.head] <= dt[e2.tail] else e2.tail
        try:
            G2 = perturb_unweighted(G, s, t, e1, e2, u1=u1, v2=v2)
        except BidiError as exc:
            report.fail(spec, f"e1={e1} e2={e2}: {type(exc).__name__}: {exc}")
            continue
        d2 = true_distance(G2, s, t)
        if not d2 <= ex.d_s + ex.d_t + 1 < d:
            report.fail(spec, f"e1={e1} e2={e2}: perturbed distance {d2}, bound {ex.d_s + ex.d_t + 1}, d {d}")
        if G2.degree_sequence() != G.degree_sequence():
            report.fail(spec, f"e1={e1} e2={e2}: degree sequence changed")
    return report


def delta_gap(depth: int = 3, deltas: tuple[int, ...] = tuple(range(2, 9)), samples: int = 20,
              seed: int = 0, *, min_gain: float = 2.0, noise: float = 0.10) -> CertReport:
    """Query ratio of bidirectional BFS to the tailored searcher on the graded double tree.

    R(delta) is the mean BFS query count over the mean tailored count.  The
    suite passes when R(max)/R(min) >= ``min_gain`` and R never drops by more
    than ``noise`` (relative) from one delta to the next.
    """
    if len(deltas) < 2:
        raise SpecInvalid("delta-gap needs at least two deltas")
    report = CertReport(Suite.DELTA_GAP, samples * len(deltas))
    rng = np.random.default_rng(seed)
    table = []
    for delta in deltas:
        total = LowerBoundSpec(delta, depth, 1).last_layer_edges
        bfs_q, tail_q = [], []
        for i in rng.integers(1, total + 1, size=samples):
            lb = LowerBoundSpec(delta, depth, int(i))
            spec = InstanceSpec("g1", {"delta": delta, "depth": depth, "i": int(i), "nu": 1.0}, seed)
            G, (s, t), k = gen_lower_bound_G1(lb)
            want = (2 * depth - 1) * lb.nu
            b = run_bidirectional_bfs(G, AsStored(), s, t)
            a = tailored_searcher_G1(G, s, t, k)
            if b.distance != want or a.distance != want:
                report.fail(spec, f"distances bfs={b.distance} tailored={a.distance}, want {want}")
            if a.strategy != "tailored-g1":
                report.fail(spec, "tailored searcher fell back on a genuine instance")
            bfs_q.append(b.ledger.total)
            tail_q.append(a.ledger.total)
        mb, mt = float(np.mean(bfs_q)), float(np.mean(tail_q))
        table.append({"delta": delta, "bfs_queries": mb, "tailored_queries": mt, "ratio": mb / mt})
    report.table = table
    ratios = [row["ratio"] for row in table]
    gain = ratios[-1] / ratios[0]
    report.stats.update(gain=gain, min_gain=min_gain, noise=noise)
    anchor = InstanceSpec("g1", {"depth": depth, "deltas": list(deltas)}, seed)
    if gain < min_gain:
        report.fail(anchor, f"R({deltas[-1]})/R({deltas[0]}) = {gain:.3f} < {min_gain}")
    for prev, cur in zip(table, table[1:]):
        if cur["ratio"] < prev["ratio"] * (1 - noise):
            report.fail(anchor, f"ratio drops from {prev['ratio']:.3f} (delta={prev['delta']}) "
                                f"to {cur['ratio']:.3f} (delta={cur['delta']})")
    return report


def zero_weight(depth: int = 10, trials: int = 20, seed: int = 0, *, advice_budget: int = 50) -> CertReport:
    """On the zero-weight double tree the advice walker answers 0 within
    ``advice_budget`` queries while bidirectional BFS needs at least n/8."""
    report = CertReport(Suite.ZERO_WEIGHT, trials)
    rng = np.random.default_rng(seed)
    walker, bfs = [], []
    for i in rng.integers(1, 2 ** depth + 1, size=trials):
        i = int(i)
        spec = InstanceSpec("g0", {"depth": depth, "i": i}, seed)
        G0, (s, t) = gen_zero_weight_G0(depth, i)
        w = advice_walker_G0(G0, g0_advice(depth, i))
        b = run_bidirectional_bfs(G0.with_unit_weights(), AsStored(), s, t)
        walker.append(w.ledger.total)
        bfs.append(b.ledger.total)
        if w.distance != 0.0 or w.ledger.total > advice_budget:
            report.fail(spec, f"walker distance {w.distance} with {w.ledger.total} queries")
        if b.ledger.total < G0.n / 8:
            report.fail(spec, f"bidirectional BFS used only {b.ledger.total} < n/8 = {G0.n / 8} queries")
    report.stats.update(n=2 * (2 ** (depth + 1) - 1), walker_max=max(walker, default=0),
                        bfs_min=min(bfs, default=0), bfs_mean=float(np.mean(bfs)) if bfs else 0.0)
    return report


def trace_replay(trials: int = 50, seed: int = 0) -> CertReport:
    """Replay recorded query traces against fresh oracles; answers and ledgers must match."""
    report = CertReport(Suite.TRACE_REPLAY, trials)
    for sd in _seeds(seed, trials):
        spec = corpus_spec(sd)
        G, s, t, rep = _reference(spec)
        fresh = attach(G, AsStored())
        try:
            replay(rep.ledger.trace, fresh)
        except BidiError as exc:
            report.fail(spec, f"replay diverged: {exc}")
            continue
        led = fresh.snapshot()
        if led.counts_dict() != rep.ledger.counts_dict() or led.explored != rep.ledger.explored:
            report.fail(spec, "replayed ledger differs")
    return report


SUITES = {
    Suite.PERTURB_WEIGHTED: perturb_weighted_suite,
    Suite.PERTURB_UNWEIGHTED: perturb_unweighted_suite,
    Suite.DELTA_GAP: delta_gap,
    Suite.ZERO_WEIGHT: zero_weight,
    Suite.EQUAL_WORK: equal_work,
    Suite.STOP_SOUNDNESS: stop_soundness,
    Suite.TRACE_REPLAY: trace_replay,
}


def run_suite(suite: str | Suite, **kwargs) -> CertReport:
    try:
        suite = Suite(suite)
    except ValueError:
        raise SpecInvalid(f"unknown suite {suite!r}; choose from {[s.value for s in Suite]}") from None
    return SUITES[suite](**kwargs)


__all__ = ["CertReport", "Suite", "SUITES", "run_suite", "corpus_spec", "math"]
