"""Poincaré compactification of planar polynomial vector fields.

The plane is sent to the open northern hemisphere of the unit sphere by central
projection, the equator playing the role of the points at infinity. The six
charts ``U1, U2, U3`` (``y_i > 0``) and ``V1, V2, V3`` (``y_i < 0``) use
coordinates ``(y_j / y_i, y_k / y_i)`` with ``j < k``; in every chart the
compactified field is polynomial once the positive factor ``1/Delta**(d-1)`` is
dropped, which only reparametrizes time.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

from .algebra import Poly2, poly_eval
from .errors import ChartDomainError, HemisphereError

__all__ = [
    "Chart",
    "VectorField",
    "SpherePoint",
    "DiscPoint",
    "ChartPoint",
    "central_projection",
    "disc_projection",
    "chart_coords",
    "chart_to_sphere",
    "compactified_field",
    "chart_transition",
    "CHART_TOL",
]

#: a sphere point belongs to chart U_i / V_i when |y_i| exceeds this
CHART_TOL = 1e-9


class Chart(str, enum.Enum):
    U1 = "U1"
    U2 = "U2"
    U3 = "U3"
    V1 = "V1"
    V2 = "V2"
    V3 = "V3"

    @property
    def axis(self) -> int:
        return int(self.value[1]) - 1

    @property
    def sign(self) -> int:
        return 1 if self.value[0] == "U" else -1

    def __str__(self):
        return self.value


@dataclass(frozen=True, eq=False)
class VectorField:
    """Planar polynomial field ``(p1, p2)``."""

    p1: Poly2
    p2: Poly2

    @property
    def degree(self) -> int:
        return max(self.p1.degree, self.p2.degree)

    def __eq__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return self.p1 == other.p1 and self.p2 == other.p2

    def __hash__(self):
        return hash((self.p1, self.p2))

    def __neg__(self):
        return VectorField(-self.p1, -self.p2)

    def __call__(self, x, y):
        return poly_eval(self.p1, (x, y)), poly_eval(self.p2, (x, y))

    @cached_property
    def fast(self) -> Callable[[float, float], tuple[float, float]]:
        """Float evaluator compiled to a plain Python function."""
        return _compile_pair(self.p1, self.p2)

    def jacobian(self):
        from .algebra import poly_diff

        return (
            (poly_diff(self.p1, "x"), poly_diff(self.p1, "y")),
            (poly_diff(self.p2, "x"), poly_diff(self.p2, "y")),
        )

    def format(self, names=("x", "y")) -> str:
        return f"{names[0]}' = {self.p1.format(names)}\n{names[1]}' = {self.p2.format(names)}"


def _monomial_src(i: int, j: int, a: str, b: str) -> str:
    factors = [a] * i + [b] * j
    return "*".join(factors) if factors else "1.0"


def _compile_pair(p: Poly2, q: Poly2):
    def expr(poly):
        if poly.is_zero():
            return "0.0"
        return " + ".join(f"({float(c)!r})*{_monomial_src(i, j, 'a', 'b')}" for (i, j), c in poly)

    src = f"lambda a, b: ({expr(p)}, {expr(q)})"
    return eval(src, {"__builtins__": {}})  # noqa: S307 - source built from numeric literals only


@dataclass(frozen=True)
class SpherePoint:
    y1: float
    y2: float
    y3: float

    def __post_init__(self):
        n = math.sqrt(self.y1**2 + self.y2**2 + self.y3**2)
        if abs(n - 1.0) > 1e-12:
            raise ValueError(f"point not on the unit sphere (norm {n!r})")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.y1, self.y2, self.y3)

    def distance(self, other: "SpherePoint") -> float:
        return math.dist(self.as_tuple(), other.as_tuple())


@dataclass(frozen=True)
class DiscPoint:
    u: float
    v: float

    def __post_init__(self):
        if self.u * self.u + self.v * self.v > 1 + 1e-12:
            raise ValueError(f"({self.u}, {self.v}) lies outside the closed unit disc")

    def as_tuple(self) -> tuple[float, float]:
        return (self.u, self.v)

    @property
    def angle(self) -> float:
        return math.atan2(self.v, self.u)

    def distance(self, other: "DiscPoint") -> float:
        return math.dist(self.as_tuple(), other.as_tuple())


@dataclass(frozen=True)
class ChartPoint:
    chart: Chart
    z1: float
    z2: float

    @property
    def at_infinity(self) -> bool:
        return self.chart.axis != 2 and self.z2 == 0


def _normalized(a: float, b: float, c: float) -> tuple[float, float, float]:
    n = math.sqrt(a * a + b * b + c * c)
    return a / n, b / n, c / n


def central_projection(x: float, y: float) -> SpherePoint:
    """Map a plane point to the northern hemisphere, ``(x, y, 1) / sqrt(1 + x^2 + y^2)``."""
    return SpherePoint(*_normalized(float(x), float(y), 1.0))


def disc_projection(s: SpherePoint) -> DiscPoint:
    if s.y3 < -1e-12:
        raise HemisphereError(f"y3 = {s.y3!r} < 0: only the northern hemisphere projects to the disc")
    return DiscPoint(s.y1, s.y2)


def chart_coords(s: SpherePoint, chart: Chart | str) -> ChartPoint:
    chart = Chart(chart)
    y = s.as_tuple()
    i = chart.axis
    yi = y[i]
    if yi * chart.sign <= CHART_TOL:
        raise ChartDomainError(f"y{i + 1} = {yi!r} is outside chart {chart}")
    j, k = (a for a in range(3) if a != i)
    return ChartPoint(chart, y[j] / yi, y[k] / yi)


def chart_to_sphere(c: ChartPoint) -> SpherePoint:
    i = c.chart.axis
    coords = [0.0, 0.0, 0.0]
    coords[i] = 1.0
    j, k = (a for a in range(3) if a != i)
    coords[j], coords[k] = float(c.z1), float(c.z2)
    s = c.chart.sign
    a, b, cc = _normalized(*coords)
    return SpherePoint(s * a, s * b, s * cc)


def chart_transition(c: ChartPoint, target: Chart | str) -> ChartPoint:
    target = Chart(target)
    if target == c.chart:
        return c
    return chart_coords(chart_to_sphere(c), target)


def _pullback(p: Poly2, d: int, chart: Chart) -> Poly2:
    """``z2**d * p`` evaluated at the chart's plane coordinates.

    U1: ``x = 1/z2, y = z1/z2``; U2: ``x = z1/z2, y = 1/z2``.
    Each term ``c x^i y^j`` becomes a monomial with ``z2`` power ``d - i - j``.
    """
    out = {}
    for (i, j), c in p:
        e = d - i - j
        if chart.axis == 0:
            out[(j, e)] = c
        else:
            out[(i, e)] = c
    return Poly2(out)


def compactified_field(vf: VectorField, chart: Chart | str) -> VectorField:
    """Polynomial expression of the compactified field in a local chart.

    The ``1/Delta**(d-1)`` factor is omitted. V-charts are the U-chart
    expressions times ``(-1)**(d-1)``.
    """
    chart = Chart(chart)
    d = vf.degree
    if chart.axis == 2:
        out = VectorField(vf.p1, vf.p2)
    else:
        z1, z2 = Poly2.var("x"), Poly2.var("y")
        P = _pullback(vf.p1, d, chart)
        Q = _pullback(vf.p2, d, chart)
        if chart.axis == 0:
            out = VectorField(-z1 * P + Q, -z2 * P)
        else:
            out = VectorField(-z1 * Q + P, -z2 * Q)
    if chart.sign < 0 and (d - 1) % 2 == 1:
        out = -out
    return out
