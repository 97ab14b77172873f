from __future__ import annotations

import pytest

from bidisearch.errors import NeighborIndexOutOfRange, PolicyMismatch, TraceMismatch, VertexOutOfRange
from bidisearch.graph import EdgeRef, build_graph
from bidisearch.oracle import (
    Adversarial,
    AsStored,
    QueryKind,
    SeededShuffle,
    attach,
    dump_trace,
    load_trace,
    parse_policy,
    replay,
)


@pytest.fixture
def star():
    return build_graph(False, 4, [(1, 2, 1.0), (1, 3, 2.0), (1, 4, 3.0)])


def test_as_stored_answers_in_input_order(star):
    o = attach(star)
    assert o.degree(1) == 3
    assert [o.neighbor(1, j)[0] for j in (1, 2, 3)] == [2, 3, 4]
    assert o.neighbor(3, 1) == (1, 2.0, EdgeRef(1, 3))


def test_every_call_is_counted_including_repeats(star):
    o = attach(star)
    o.neighbor(1, 1)
    o.neighbor(1, 1)
    o.degree(1)
    led = o.snapshot()
    assert led.counts[QueryKind.NEIGHBOR] == 2
    assert led.degree_queries == 1 and led.total == 3
    assert led.explored == frozenset({EdgeRef(1, 2)})


def test_out_of_range_index_is_an_error_and_not_counted(star):
    o = attach(star)
    with pytest.raises(NeighborIndexOutOfRange):
        o.neighbor(2, 2)
    with pytest.raises(VertexOutOfRange):
        o.degree(5)
    assert o.snapshot().total == 0


def test_query_family_must_match_directedness(star):
    with pytest.raises(PolicyMismatch):
        attach(star).out_degree(1)
    D = build_graph(True, 2, [(1, 2, 1.0)])
    with pytest.raises(PolicyMismatch):
        attach(D).neighbor(1, 1)
    o = attach(D)
    assert o.out_degree(1) == 1 and o.in_degree(1) == 0 and o.in_neighbor(2, 1)[0] == 1


def test_channels_split_the_ledger(star):
    o = attach(star)
    o.neighbor(1, 1, by="fwd")
    o.neighbor(1, 2, by="bwd")
    o.neighbor(1, 3, by="bwd")
    assert o.snapshot("fwd").neighbor_queries == 1
    assert o.snapshot("bwd").explored == frozenset({EdgeRef(1, 3), EdgeRef(1, 4)})
    assert o.snapshot().neighbor_queries == 3


def test_shuffle_is_a_seeded_permutation(star):
    a = [attach(star, SeededShuffle(7)).neighbor(1, j)[0] for j in (1, 2, 3)]
    b = [attach(star, SeededShuffle(7)).neighbor(1, j)[0] for j in (1, 2, 3)]
    assert a == b and sorted(a) == [2, 3, 4]


def test_higher_label_last_orders_by_anchor_distance():
    G = build_graph(False, 4, [(1, 4, 3.0), (1, 2, 1.0), (1, 3, 2.0)])
    o = attach(G, Adversarial("higher-label-last", anchor=1))
    assert [o.neighbor(1, j)[0] for j in (1, 2, 3)] == [2, 3, 4]


def test_adversarial_rule_validation(star):
    with pytest.raises(PolicyMismatch):
        attach(star, Adversarial("higher-label-last"))
    with pytest.raises(PolicyMismatch):
        attach(star, Adversarial("split-reverse"))
    with pytest.raises(PolicyMismatch):
        attach(star, Adversarial("nope", 1))
    with pytest.raises(PolicyMismatch):
        parse_policy("random")
    assert parse_policy("shuffle", 3) == SeededShuffle(3)
    assert parse_policy("stored") == AsStored()


def test_split_reverse_reverses_in_lists_only():
    D = build_graph(True, 3, [(1, 3, 1.0), (2, 3, 1.0), (3, 1, 1.0), (3, 2, 1.0)])
    o = attach(D, Adversarial("split-reverse"))
    assert [o.in_neighbor(3, j)[0] for j in (1, 2)] == [2, 1]
    assert [o.out_neighbor(3, j)[0] for j in (1, 2)] == [1, 2]


def test_trace_round_trip_and_replay(star):
    o = attach(star, trace=True)
    o.degree(1)
    o.neighbor(1, 2)
    trace = load_trace(dump_trace(o.snapshot().trace))
    assert [e.kind for e in trace] == [QueryKind.DEGREE, QueryKind.NEIGHBOR]
    led = replay(trace, attach(star))
    assert led.counts_dict() == o.snapshot().counts_dict()


def test_replay_detects_different_graph(star):
    o = attach(star, trace=True)
    o.neighbor(1, 1)
    other = build_graph(False, 4, [(1, 3, 2.0), (1, 2, 1.0), (1, 4, 3.0)])
    with pytest.raises(TraceMismatch):
        replay(o.snapshot().trace, attach(other))
