"""Walk through one bidirectional run on a four-vertex path graph.

Run with ``python3 demos/path_graph_walkthrough.py``.
"""
from __future__ import annotations

from bidisearch import AsStored, build_graph, run_bidirectional

# %% The instance: s=1 - 2 - 3 - t=4 with weights 1, 2, 1.
G = build_graph(False, 4, [(1, 2, 1.0), (2, 3, 2.0), (3, 4, 1.0)])

# %% One run with the equal-work alternation and the frontier-sum stop.
rep = run_bidirectional(G, AsStored(), 1, 4, trace=True)
print("distance", rep.distance, "via", [(e.tail, e.head) for e in rep.path])
print("termination", rep.termination.value, "mu", rep.mu, "stop labels", rep.stop_labels)

# %% Work per direction stays within one Neighbor query.
for side in ("fwd", "bwd"):
    led = rep.per_direction[side]
    print(side, "neighbor", led.neighbor_queries, "degree", led.degree_queries,
          "explored", sorted((e.tail, e.head) for e in led.explored))

# %% Every improvement of mu, in order.
for ev in rep.meetings:
    print("mu ->", ev.mu, "at close", ev.close_index, "edge", ev.edge)
