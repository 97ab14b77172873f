"""Stopping a unidirectional search as soon as t is closed saves work that
the exhaustive variant spends on the rest of the graph.
"""
from __future__ import annotations

from bidisearch import AsStored, run_classical_dijkstra, run_unidirectional_early_abort
from bidisearch.instances import directed_star

# %% s points to t and to 100 spokes, each of which leads to one more vertex.
G, (s, t) = directed_star(100)
ea = run_unidirectional_early_abort(G, AsStored(), s, t)
ex = run_classical_dijkstra(G, AsStored(), s, t, until="exhaustion")
print("early abort :", ea.distance, ea.ledger.neighbor_queries, "neighbor queries")
print("exhaustive  :", ex.distance, ex.ledger.neighbor_queries, "neighbor queries")
