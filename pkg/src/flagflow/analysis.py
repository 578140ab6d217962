"""Equilibria at infinity, their linear type, and invariant rays."""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

from .algebra import poly_eval, real_roots, univariate
from .compactify import (
    Chart,
    ChartPoint,
    DiscPoint,
    SpherePoint,
    VectorField,
    central_projection,
    chart_to_sphere,
    compactified_field,
    disc_projection,
)
from .errors import ConsistencyError, NotAnEquilibriumError, ParameterError
from .models import Family, FlagModel, polynomial_field, ray_slopes

__all__ = [
    "Classification",
    "Equilibrium",
    "RayDirection",
    "NamedEquilibria",
    "classify_equilibrium",
    "infinity_equilibria",
    "finite_origin",
    "invariant_rays",
    "named_equilibria",
    "closed_form_points",
    "ray_disc_point",
    "model_equilibria",
]

EIG_TOL = 1e-10
RESIDUAL_TOL = 1e-8
DEDUP_TOL = 1e-9


class Classification(str, enum.Enum):
    StableNode = "stable_node"
    UnstableNode = "unstable_node"
    Saddle = "saddle"
    StableFocus = "stable_focus"
    UnstableFocus = "unstable_focus"
    LinearCenter = "linear_center"
    Degenerate = "degenerate"

    @property
    def is_stable(self) -> bool:
        return self in (Classification.StableNode, Classification.StableFocus)


@dataclass(frozen=True)
class Equilibrium:
    name: str | None
    chart: Chart
    z1: float
    sphere: SpherePoint
    disc: DiscPoint
    eigenvalues: tuple[complex, complex]
    classification: Classification
    z2: float = 0.0

    @property
    def angle(self) -> float:
        return self.disc.angle

    def renamed(self, name: str) -> "Equilibrium":
        return Equilibrium(name, self.chart, self.z1, self.sphere, self.disc,
                           self.eigenvalues, self.classification, self.z2)


@dataclass(frozen=True)
class RayDirection:
    """Unit direction ``(a, b)`` of an invariant line through the origin.

    `slope` is ``a/b`` (exact when rational, ``inf`` for the x-axis).
    """

    a: float
    b: float
    slope: Fraction | float

    @property
    def angle(self) -> float:
        return math.atan2(self.b, self.a)


def _eigen_2x2(j):
    (a, b), (c, d) = j
    if b == 0 or c == 0:
        return complex(a), complex(d)
    a, b, c, d = float(a), float(b), float(c), float(d)
    tr, det = a + d, a * d - b * c
    disc = cmath.sqrt(tr * tr / 4 - det)
    return tr / 2 + disc, tr / 2 - disc


def _classify(eigs) -> Classification:
    l1, l2 = eigs
    if abs(l1) < EIG_TOL or abs(l2) < EIG_TOL:
        return Classification.Degenerate
    if abs(l1.imag) < EIG_TOL and abs(l2.imag) < EIG_TOL:
        r1, r2 = l1.real, l2.real
        if r1 < 0 and r2 < 0:
            return Classification.StableNode
        if r1 > 0 and r2 > 0:
            return Classification.UnstableNode
        return Classification.Saddle
    if abs(l1.real) < EIG_TOL:
        return Classification.LinearCenter
    return Classification.StableFocus if l1.real < 0 else Classification.UnstableFocus


def classify_equilibrium(vf_chart: VectorField, point):
    """Linearize `vf_chart` at `point` and return ``(eigenvalues, classification)``.

    The Jacobian is built from exact partial derivatives; with a rational
    `point` it is exact, and triangular Jacobians yield exact eigenvalues.
    """
    x, y = point
    fx, fy = vf_chart(float(x), float(y))
    if math.hypot(fx, fy) > RESIDUAL_TOL:
        raise NotAnEquilibriumError(f"field does not vanish at {point}: |F| = {math.hypot(fx, fy):.3e}")
    jac = [[poly_eval(d, (x, y)) for d in row] for row in vf_chart.jacobian()]
    eigs = _eigen_2x2(jac)
    return eigs, _classify(eigs)


def _make_equilibrium(field: VectorField, chart: Chart, z1) -> Equilibrium:
    eigs, cls = classify_equilibrium(field, (z1, 0))
    sphere = chart_to_sphere(ChartPoint(chart, float(z1), 0.0))
    # pin the equator exactly
    sphere = SpherePoint(sphere.y1, sphere.y2, 0.0)
    return Equilibrium(None, chart, z1, sphere, disc_projection(sphere), eigs, cls)


def infinity_equilibria(vf: VectorField) -> list[Equilibrium]:
    """Equilibria of the compactified field on the first-quadrant equator arc.

    Roots ``z1 >= 0`` of the U1 field restricted to ``z2 = 0`` cover every
    direction except ``(0, 1, 0)``, which is checked at the U2 origin. Results
    are ordered by disc angle, largest first. When the arc carries exactly the
    pattern (stable, saddle, stable) with the last on the x-axis, the points are
    named ``p1, p2, p3``.
    """
    if vf.degree < 1:
        raise ParameterError("constant field has no dynamics at infinity")
    u1 = compactified_field(vf, Chart.U1)
    restricted = univariate(u1.p1, "x", at=0)
    if not restricted:
        raise NotAnEquilibriumError("the whole equator consists of equilibria")
    found = [_make_equilibrium(u1, Chart.U1, z) for z in real_roots(restricted, lo=0)]

    u2 = compactified_field(vf, Chart.U2)
    if poly_eval(u2.p1, (0, 0)) == 0 and poly_eval(u2.p2, (0, 0)) == 0:
        found.append(_make_equilibrium(u2, Chart.U2, Fraction(0)))

    unique: list[Equilibrium] = []
    for e in found:
        if all(e.sphere.distance(u.sphere) >= DEDUP_TOL for u in unique):
            unique.append(e)
    unique.sort(key=lambda e: -e.angle)

    pattern = [e.classification for e in unique]
    if (
        pattern == [Classification.StableNode, Classification.Saddle, Classification.StableNode]
        and unique[-1].chart is Chart.U1
        and unique[-1].z1 == 0
    ):
        unique = [e.renamed(n) for e, n in zip(unique, ("p1", "p2", "p3"))]
    return unique


def finite_origin(vf: VectorField) -> Equilibrium | None:
    """The origin, if it is an equilibrium. For homogeneous quadratic fields it
    is totally degenerate (zero Jacobian)."""
    if poly_eval(vf.p1, (0, 0)) != 0 or poly_eval(vf.p2, (0, 0)) != 0:
        return None
    jac = [[poly_eval(d, (0, 0)) for d in row] for row in vf.jacobian()]
    eigs = _eigen_2x2(jac)
    sphere = SpherePoint(0.0, 0.0, 1.0)
    eq = Equilibrium("origin", Chart.U3, 0.0, sphere, DiscPoint(0.0, 0.0), eigs, _classify(eigs))
    return eq


def invariant_rays(vf: VectorField) -> list[RayDirection]:
    """Invariant lines through the origin meeting the closed first quadrant.

    For a homogeneous field the direction ``(a, b)`` is invariant iff
    ``W(a, b) = a P2(a, b) - b P1(a, b)`` vanishes. Rays are ordered by angle,
    largest first.
    """
    if not (vf.p1.is_homogeneous() and vf.p2.is_homogeneous()) or vf.degree < 1:
        raise ParameterError("invariant_rays needs a homogeneous field")
    from .algebra import Poly2

    x, y = Poly2.var("x"), Poly2.var("y")
    w = x * vf.p2 - y * vf.p1
    if w.is_zero():
        raise ParameterError("every line through the origin is invariant")

    rays: list[RayDirection] = []
    # b = 0: the x-axis, invariant iff the pure x^deg coefficient of W vanishes
    if poly_eval(w, (1, 0)) == 0:
        rays.append(RayDirection(1.0, 0.0, math.inf))
    # b = 1: roots r = a/b >= 0 of W(r, 1)
    for r in real_roots(univariate(w, "x", at=1), lo=0):
        rf = float(r)
        n = math.hypot(rf, 1.0)
        rays.append(RayDirection(rf / n, 1.0 / n, r))
    rays.sort(key=lambda r: -r.angle)
    return rays


class NamedEquilibria(NamedTuple):
    p1: Equilibrium
    p2: Equilibrium
    p3: Equilibrium


def closed_form_points(model: FlagModel) -> dict[str, tuple[float, float, float]]:
    """Sphere coordinates of the three first-quadrant equilibria at infinity."""
    m, k = model.m, model.k
    if model.family is Family.TypeI:
        r = math.sqrt(5 * m * m - 8 * m + 4 * m * k + 4 * k * k + 4)
        p1 = (2 * (m - 1) / r, (m + 2 * k) / r, 0.0)
    else:
        r = math.sqrt(20 * m * m + 36 * m + 16 * k * k + 16 * m * k + 8 * k + 17)
        p1 = (4 * (m + 1) / r, (4 * k + 2 * m + 1) / r, 0.0)
    s5 = math.sqrt(5)
    return {"p1": p1, "p2": (2 / s5, 1 / s5, 0.0), "p3": (1.0, 0.0, 0.0)}


@lru_cache(maxsize=256)
def model_equilibria(model: FlagModel) -> tuple[Equilibrium, ...]:
    return tuple(infinity_equilibria(polynomial_field(model)))


def named_equilibria(model: FlagModel, tol: float = 1e-10) -> NamedEquilibria:
    """Closed-form p1, p2, p3 matched against the root-finding result."""
    computed = model_equilibria(model)
    out = {}
    for name, pt in closed_form_points(model).items():
        matches = [e for e in computed if math.dist(e.sphere.as_tuple(), pt) <= tol]
        if len(matches) != 1:
            raise ConsistencyError(
                f"{name} closed form {pt} matched {len(matches)} computed equilibria for {model.label}"
            )
        out[name] = matches[0].renamed(name)
    return NamedEquilibria(**out)


def ray_disc_point(model: FlagModel, ray: str, t: float) -> tuple[float, float]:
    """Disc image of the point at parameter `t` on ray ``gamma1``, ``gamma2`` or ``gamma3``.

    Type I uses the explicit closed-form parametrizations; type II goes through
    the central projection of ``t * direction``.
    """
    m, k = model.m, model.k
    if ray == "gamma3":
        return (t / math.sqrt(1 + t * t), 0.0)
    if model.family is Family.TypeI:
        if ray == "gamma1":
            mk = m + 2 * k
            rho = math.sqrt(
                (m * m + 4 * m * k + 4 * k * k
                 + t * t * (5 * m * m - 8 * m + 4 + 4 * m * k + 4 * k * k)) / mk**2
            )
            return (2 * (m - 1) * t / (rho * mk), t / rho)
        if ray == "gamma2":
            s = math.sqrt(5 * t * t + 1)
            return (2 * t / s, t / s)
    else:
        s1, s2 = ray_slopes(model)
        if ray in ("gamma1", "gamma2"):
            # type II lines are written as (t, c t)
            c = 1 / float(s1 if ray == "gamma1" else s2)
            d = disc_projection(central_projection(t, c * t))
            return d.as_tuple()
    raise ValueError(f"unknown ray {ray!r}")
