"""
Equilibria at infinity and Einstein rays
========================================

The three first-quadrant equilibria on the equator, their eigenvalues, and the
invariant lines through the origin.
"""

import math

from flagflow import make_model, polynomial_field
from flagflow.analysis import invariant_rays, named_equilibria
from flagflow.models import einstein_directions

for family, m, k in [("I", 2, 2), ("II", 1, 3)]:
    model = make_model(family, m, k)
    print(model.label)

    for e in named_equilibria(model):
        eig = ", ".join(f"{l.real:+.6f}" for l in e.eigenvalues)
        print(f"  {e.name}: disc ({e.disc.u:.6f}, {e.disc.v:.6f})  eig ({eig})  {e.classification.value}")

    # invariant rays come from the cubic a*P2 - b*P1; the Einstein defect vanishes on the same rays
    for r in invariant_rays(polynomial_field(model)):
        print(f"  ray x/y = {r.slope}  angle {math.degrees(r.angle):.4f} deg")
    zeros = einstein_directions(model)
    print("  Einstein directions (deg):", [round(math.degrees(a), 4) for a in zeros])
