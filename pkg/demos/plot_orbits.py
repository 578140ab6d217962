"""
Single orbits: compactified and raw
===================================

Integrate one seed per region, compare the raw system with the compactified
one on the Poincare disc.
"""

from flagflow import make_model
from flagflow.flow import integrate_compactified, integrate_raw, orbit_deviation, sector_of

model = make_model("I", 2, 2)

for seed in [(0.1, 1.0), (1.0, 1.0), (2.0, 1.0), (4.0, 1.0)]:
    comp = integrate_compactified(model, *seed)
    raw = integrate_raw(model, *seed)
    print(f"seed {seed}: region {sector_of(model, *seed).value:7s} "
          f"-> {comp.omega}  raw stop: {raw.stop_reason:8s} "
          f"deviation {orbit_deviation(raw, comp):.2e}")

# below the Kaehler ray x grows without bound while y/x -> 0
raw = integrate_raw(model, 4.0, 1.0)
x, y = raw.xy[-1]
print(f"raw R3 orbit ends at x = {x:.3e}, y = {y:.3e}, y/x = {y / x:.3e}")
