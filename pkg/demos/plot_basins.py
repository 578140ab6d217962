"""
Basin sweep
===========

Classify a grid of seeds and compare each limit with the sector prediction.
"""

from collections import Counter

from flagflow import make_model
from flagflow.flow import basin_sweep

for family, m, k in [("I", 3, 2), ("II", 2, 4)]:
    model = make_model(family, m, k)
    grid = basin_sweep(model, (0.0, 5.0), (0.0, 5.0), 12, 12, workers=2)
    limits = Counter(c.dynamic.target for c in grid)
    print(f"{model.label}: {dict(sorted(limits.items()))}, all consistent: {grid.all_consistent}")

    # a coarse text picture, top row = largest y
    symbols = {"p1": "1", "p2": "2", "p3": "3"}
    for j in reversed(range(grid.ny)):
        row = grid.cells[j * grid.nx:(j + 1) * grid.nx]
        print("   " + "".join(symbols.get(c.dynamic.target, "?") for c in row))
