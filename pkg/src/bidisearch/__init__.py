"""Bidirectional Dijkstra in a metered query model, with lower-bound instances
and perturbation checks for its optimality arguments."""
from __future__ import annotations

from .graph import (
    UNREACHABLE,
    EdgeRef,
    MultiGraph,
    build_graph,
    read_edge_list,
    true_distance,
    walk_length,
    write_edge_list,
)
from .oracle import Adversarial, AsStored, Oracle, QueryKind, QueryLedger, SeededShuffle, attach, replay
from .search import (
    STRATEGIES,
    RunReport,
    SelectionRule,
    StoppingRule,
    Termination,
    meeting_trace,
    run_bidirectional,
    run_bidirectional_bfs,
    run_classical_dijkstra,
    run_unidirectional_early_abort,
)

__version__ = "0.1.0"
