"""
Flow systems and their compactification
=======================================

Build a model, look at its polynomial field and at the same field written in
the charts around infinity.
"""

from fractions import Fraction

from flagflow import make_model, polynomial_field
from flagflow.compactify import Chart, compactified_field
from flagflow.report import model_summary

# SO(9)/(U(2)xSO(5)): m = 2, k = 2
model = make_model("I", 2, 2)
print(model_summary(model))

vf = polynomial_field(model)

# near the x-direction at infinity; the equator is z2 = 0
u1 = compactified_field(vf, Chart.U1)
print("U1:", u1.format(("z1", "z2")))

# near the y-direction; z1' at z2 = 0 is a quadratic with roots 1/3 and 2
u2 = compactified_field(vf, Chart.U2)
print("U2:", u2.format(("z1", "z2")))
print("U2 z1' at z1 = 2:", u2.p1(2, 0), " at z1 = 1/3:", u2.p1(Fraction(1, 3), 0))
