"""With zero-weight tree edges, a walker that knows which leaf carries the
cross edge finds t in O(depth) queries while bidirectional BFS pays for
most of the graph.
"""
from __future__ import annotations

from bidisearch import AsStored, run_bidirectional_bfs
from bidisearch.instances import advice_walker_G0, g0_advice, gen_zero_weight_G0

depth, i = 10, 700

# %% Two complete binary trees of depth 10 joined by one leaf-to-leaf edge.
G0, (s, t) = gen_zero_weight_G0(depth, i)
print("n", G0.n, "m", G0.m, "s", s, "t", t)

# %% The walker follows the advice bits down from s, crosses, and climbs to t.
walk = advice_walker_G0(G0, g0_advice(depth, i))
print("advice walker", walk.ledger.total, "queries, distance", walk.distance)

# %% Bidirectional BFS on the same topology with unit weights.
bfs = run_bidirectional_bfs(G0.with_unit_weights(), AsStored(), s, t)
print("bidirectional BFS", bfs.ledger.total, "queries")
