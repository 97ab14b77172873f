from __future__ import annotations

import pytest

from bidisearch.errors import InvalidPair, ModeMismatch, TraceMissing
from bidisearch.graph import EdgeRef, build_degenerate_graph, build_graph, true_distance, walk_length
from bidisearch.instances import directed_star
from bidisearch.oracle import AsStored, SeededShuffle
from bidisearch.search import (
    STRATEGIES,
    UNSOUND_STRATEGIES,
    SelectionRule,
    StoppingRule,
    Termination,
    meeting_trace,
    run_bidirectional,
    run_bidirectional_bfs,
    run_classical_dijkstra,
    run_unidirectional_early_abort,
)


def test_path_graph_reference_run(path_graph):
    # hand simulation: f closes s, relaxes s-a; b closes t, relaxes t-b; f closes a,
    # relaxes a-s then a-b; b closes b, relaxes b-a (a closed forward: mu = 1+2+1);
    # f closes b with 3 + 1 >= 4 and stops before scanning it
    rep = run_bidirectional(path_graph, AsStored(), 1, 4, trace=True)
    assert rep.distance == 4.0
    assert rep.path == [EdgeRef(1, 2), EdgeRef(2, 3), EdgeRef(3, 4)]
    assert rep.per_direction["fwd"].neighbor_queries == 3
    assert rep.per_direction["bwd"].neighbor_queries == 3
    assert rep.per_direction["fwd"].explored == {EdgeRef(1, 2), EdgeRef(2, 3)}
    assert rep.per_direction["bwd"].explored == {EdgeRef(2, 3), EdgeRef(3, 4)}
    assert rep.stop_labels == (3.0, 1.0)
    assert rep.termination is Termination.STOPPED
    [ev] = rep.meetings
    assert (ev.mu, ev.edge, ev.scanning, ev.neighbor) == (4.0, EdgeRef(2, 3), 3, 2)


def test_single_edge(single_edge):
    rep = run_bidirectional(single_edge, AsStored(), 1, 2)
    assert rep.distance == 5.0 and rep.path == [EdgeRef(1, 2)]


def test_root_scan_counterexample_is_answered_correctly(root_scan_counterexample):
    # without the vertex-meeting candidate this instance returns 3 via the self-loop
    G = root_scan_counterexample
    rep = run_bidirectional(G, AsStored(), 1, 2, trace=True)
    assert true_distance(G, 1, 2) == 1.0
    assert rep.distance == 1.0 and rep.path == [EdgeRef(1, 2)]
    assert rep.meetings[-1].edge is None and rep.meetings[-1].scanning == 2


def test_unreachable_target():
    G = build_graph(True, 3, [(1, 2, 1.0), (3, 2, 1.0)])
    rep = run_bidirectional(G, AsStored(), 1, 3)
    assert not rep.reachable and rep.path == []
    assert rep.to_dict()["distance"] is None
    assert rep.termination in (Termination.FORWARD_EXHAUSTED, Termination.BACKWARD_EXHAUSTED)


def test_exhaustion_with_reachable_target_is_exact():
    # backward side runs dry first; forward never met it through a closed vertex
    G = build_graph(True, 3, [(1, 2, 1.0), (2, 3, 1.0), (1, 3, 5.0)])
    rep = run_bidirectional(G, AsStored(), 1, 3)
    assert rep.distance == 2.0


def test_input_validation(path_graph):
    with pytest.raises(InvalidPair):
        run_bidirectional(path_graph, None, 2, 2)
    with pytest.raises(ModeMismatch):
        run_bidirectional(path_graph, None, 1, 4, stop=StoppingRule.EAGER_MEET)
    with pytest.raises(ModeMismatch):
        run_bidirectional_bfs(path_graph, None, 1, 4)
    with pytest.raises(ModeMismatch):
        run_unidirectional_early_abort(path_graph, None, 1, 4)
    Z = build_degenerate_graph(False, 2, [(1, 2, 0.0)])
    with pytest.raises(ModeMismatch):
        run_bidirectional(Z, None, 1, 2)


@pytest.mark.parametrize("sel", list(SelectionRule))
def test_historical_selection_rules_are_correct(sel):
    G = build_graph(False, 6, [(1, 2, 7.0), (1, 3, 9.0), (1, 6, 14.0), (2, 3, 10.0), (2, 4, 15.0),
                               (3, 4, 11.0), (3, 6, 2.0), (4, 5, 6.0), (5, 6, 9.0)])
    rep = run_bidirectional(G, SeededShuffle(1), 1, 5, sel)
    assert rep.distance == 20.0
    assert walk_length(G, 1, 5, rep.path) == 20.0


def test_first_meet_is_flagged_unsound():
    assert UNSOUND_STRATEGIES == {"first-meet"}
    G = build_graph(False, 2, [(1, 2, 1.0)])
    assert STRATEGIES["first-meet"](G, AsStored(), 1, 2).unsound


def test_first_meet_frozen_witness():
    # located by find_incorrect_instance("first-meet", 10_000, seed=0)
    from bidisearch.instances import ErdosRenyi, gen_random
    G, (s, t) = gen_random(ErdosRenyi(8, 0.5), (0.0, 10.0), 2)
    assert (s, t) == (4, 8)
    rep = STRATEGIES["first-meet"](G, AsStored(), s, t)
    assert rep.distance == 12.6142578125
    assert true_distance(G, s, t) == 10.0693359375
    assert STRATEGIES["bidi-equal-pohl"](G, AsStored(), s, t).distance == 10.0693359375


def test_early_abort_on_directed_star():
    G, (s, t) = directed_star(100)
    ea = run_unidirectional_early_abort(G, AsStored(), s, t)
    ex = run_classical_dijkstra(G, AsStored(), s, t, until="exhaustion")
    assert ea.distance == ex.distance == 1.0
    assert ea.ledger.neighbor_queries == 101
    assert ex.ledger.neighbor_queries == 201
    assert ea.ledger.counts_dict()["Inneighbor"] == 0


def test_bfs_eager_and_pohl_agree_on_grid():
    from bidisearch.instances import GridWithWeights, gen_random
    G, _ = gen_random(GridWithWeights(5, 6), None, 0)
    for stop in (StoppingRule.POHL_BOUND, StoppingRule.EAGER_MEET):
        assert run_bidirectional_bfs(G, SeededShuffle(3), 1, 30, stop).distance == 9.0
    eager = run_bidirectional(G, AsStored(), 1, 30, stop=StoppingRule.EAGER_MEET)
    assert eager.distance == 9.0


def test_meeting_trace_on_unweighted_path():
    G = build_graph(False, 4, [(1, 2), (2, 3), (3, 4)], weighted=False)
    rep = run_bidirectional_bfs(G, AsStored(), 1, 4, trace=True)
    mt = meeting_trace(rep)
    assert (mt.u0, mt.v0, mt.w0) == (3, 2, 1)
    assert mt.split() == (0.0, 1.0)
    assert mt.as_tuples()[-1][0] == 3.0
    with pytest.raises(TraceMissing):
        meeting_trace(run_bidirectional_bfs(G, AsStored(), 1, 4))


def test_report_dict_has_schema_fields(path_graph):
    d = run_bidirectional(path_graph, AsStored(), 1, 4).to_dict()
    assert set(d) == {"distance", "path", "counts", "per_direction", "termination", "strategy",
                      "unsound", "wall_time"}
    assert d["path"][0] == {"u": 1, "v": 2, "k": 1}


def test_bidi_trace_env_forces_recording(path_graph, monkeypatch):
    monkeypatch.setenv("BIDI_TRACE", "1")
    assert run_bidirectional(path_graph, AsStored(), 1, 4).ledger.trace is not None
