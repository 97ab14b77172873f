"""Show why an algorithm must explore a pair of edges: rewiring them keeps
every degree but creates a shorter s-t path.
"""
from __future__ import annotations

from bidisearch import build_graph, true_distance
from bidisearch.instances import explored_sets, make_plan, perturb_unweighted, perturb_weighted

# %% Weighted: a 6-cycle with s=1 and t=4, so both sides explore some edges.
G = build_graph(False, 6, [(1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0), (4, 5, 1.0), (5, 6, 1.0), (6, 1, 1.0)])
ex = explored_sets(G, 1, 4)
e1 = min(ex.E_s, key=lambda e: (e.tail, e.head, e.k))
e2 = min(ex.E_t, key=lambda e: (e.tail, e.head, e.k))
plan = make_plan(G, 1, 4, e1, e2)
H = perturb_weighted(G, plan)
print("plan", plan.mode.value, "gap", plan.delta, "new weight", plan.delta_prime)
print("d(s,t):", true_distance(G, 1, 4), "->", true_distance(H, 1, 4))
print("degrees unchanged:", G.degree_sequence() == H.degree_sequence())

# %% Unweighted: on the path s-a-b-c-t, swapping s-a and c-t adds the edge s-t.
P = build_graph(False, 5, [(1, 2), (2, 3), (3, 4), (4, 5)], weighted=False)
Q = perturb_unweighted(P, 1, 5, P.refs[0], P.refs[3])
print("path d(s,t):", true_distance(P, 1, 5), "->", true_distance(Q, 1, 5), Q.edge_list())
