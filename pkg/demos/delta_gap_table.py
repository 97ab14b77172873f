"""Tabulate how much a searcher tailored to the lower-bound family saves
over bidirectional BFS as the tree degree grows.
"""
from __future__ import annotations

from bidisearch.certify import delta_gap

# %% Depth-3 trees, 20 random hidden cross edges per degree.
rep = delta_gap(depth=3, deltas=tuple(range(2, 9)), samples=20, seed=0)
print(f"{'delta':>5} {'bfs':>9} {'tailored':>9} {'ratio':>6}")
for row in rep.table:
    print(f"{row['delta']:>5} {row['bfs_queries']:>9.1f} {row['tailored_queries']:>9.1f} {row['ratio']:>6.2f}")
print("R(8)/R(2) =", round(rep.stats["gain"], 3), "passed" if rep.passed else "FAILED")
