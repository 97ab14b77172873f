"""Search random graphs for an instance where stopping at the first meeting
vertex returns a wrong distance, then compare it with the sound rule.
"""
from __future__ import annotations

from bidisearch import AsStored, run_bidirectional
from bidisearch.instances import find_incorrect_instance

# %% Random Erdos-Renyi graphs on 8 vertices with dyadic weights in (0, 10].
w = find_incorrect_instance("first-meet", trial_budget=10_000, seed=0)
print("witness from instance seed", w.instance.seed, "pair", w.pair)
print("first-meet answer", w.wrong, "true distance", w.right)

# %% The reference strategy on the same graph.
rep = run_bidirectional(w.graph, AsStored(), *w.pair)
print("bidi-equal-pohl answer", rep.distance, "after", rep.ledger.neighbor_queries, "neighbor queries")
print("edges", w.graph.edge_list())
