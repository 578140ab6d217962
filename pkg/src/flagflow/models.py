"""Ricci flow of invariant metrics on two families of flag manifolds.

Type I is ``SO(2n+1) / (U(m) x SO(2k+1))`` and type II is
``Sp(n) / (U(m) x Sp(k))``, both with ``n = m + k`` and two isotropy summands
carrying metric parameters ``lambda1`` (horizontal, along the base of the
fibration over a symmetric space) and ``lambda2`` (vertical, along the fiber).

The flow systems implemented by `raw_rhs` are ``(lambda1', lambda2') = (-r1, -r2)``.
That is the Ricci flow ``lambda_i' = -2 r_i`` at half speed, which leaves every
orbit unchanged.

A note on signs for type II: the second Ricci component has the form
``r2 = -a + b * lambda1/lambda2`` with ``b > 0``, so the flow equation for
``lambda2`` carries ``-b * x/y``.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real

from scipy.optimize import brentq

from .algebra import Poly2
from .compactify import VectorField
from .errors import DomainError, ParameterError

__all__ = [
    "Family",
    "FlagModel",
    "Metric",
    "RicciComponents",
    "FibrationInfo",
    "make_model",
    "ricci_components",
    "raw_rhs",
    "raw_coefficients",
    "polynomial_field",
    "einstein_defect",
    "fibration_info",
    "ray_slopes",
    "einstein_directions",
]

F = Fraction


class Family(str, enum.Enum):
    TypeI = "I"
    TypeII = "II"

    @classmethod
    def parse(cls, value) -> "Family":
        if isinstance(value, cls):
            return value
        v = str(value).strip().upper()
        aliases = {"I": cls.TypeI, "1": cls.TypeI, "TYPEI": cls.TypeI,
                   "II": cls.TypeII, "2": cls.TypeII, "TYPEII": cls.TypeII}
        try:
            return aliases[v]
        except KeyError:
            raise ParameterError(f"unknown family {value!r}; expected I or II") from None


@dataclass(frozen=True)
class FlagModel:
    family: Family
    m: int
    k: int
    strict: bool = True
    notes: tuple[str, ...] = field(default=(), compare=False)

    @property
    def n(self) -> int:
        return self.m + self.k

    @property
    def label(self) -> str:
        n, m, k = self.n, self.m, self.k
        if self.family is Family.TypeI:
            return f"SO({2 * n + 1})/(U({m})xSO({2 * k + 1}))"
        return f"Sp({n})/(U({m})xSp({k}))"


@dataclass(frozen=True)
class Metric:
    lambda1: Real
    lambda2: Real

    def __post_init__(self):
        if not (self.lambda1 > 0 and self.lambda2 > 0):
            raise DomainError(f"metric parameters must be positive, got ({self.lambda1}, {self.lambda2})")


@dataclass(frozen=True)
class RicciComponents:
    r1: Real
    r2: Real


@dataclass(frozen=True)
class FibrationInfo:
    dim_m1: int
    dim_m2: int
    fiber_label: str
    base_label: str
    total_label: str


def make_model(family, m: int, k: int, strict: bool = True) -> FlagModel:
    """Validate parameters and build a `FlagModel`.

    In strict mode type I needs ``m > 1, k != 1`` and type II needs
    ``m >= 1, k >= 3``. Non-strict mode accepts any ``m >= 1, k >= 0`` and
    records (and warns about) the violated constraint.
    """
    family = Family.parse(family)
    if isinstance(m, bool) or isinstance(k, bool) or int(m) != m or int(k) != k:
        raise ParameterError(f"m and k must be integers, got m={m!r}, k={k!r}")
    m, k = int(m), int(k)
    if m < 1:
        raise ParameterError("parameter m>=1 required")
    if k < 0:
        raise ParameterError("parameter k>=0 required")

    problems = []
    if family is Family.TypeI:
        if m <= 1:
            problems.append("m>1")
        if k == 1:
            problems.append("k!=1")
    else:
        if k < 3:
            problems.append("k>=3")
    if problems and strict:
        raise ParameterError(f"parameter {' and '.join(problems)} required (strict mode)")
    notes = tuple(f"outside the validated range: {p} violated" for p in problems)
    for note in notes:
        warnings.warn(f"type {family.value} m={m} k={k}: {note}", stacklevel=2)
    return FlagModel(family, m, k, strict, notes)


def raw_coefficients(model: FlagModel) -> dict[str, Fraction]:
    """Exact constants of the flow system.

    Type I::

        x' = a + b * x^2/y^2
        y' = c + e * (y^2 - (x - y)^2) / (x y)

    Type II::

        x' = a + b * x^2/y^2
        y' = c - e * x/y
    """
    m, k, n = model.m, model.k, model.n
    if model.family is Family.TypeI:
        return {
            "a": F(2 * (m - 1), 2 * n - 1),
            "b": F(1 + 2 * k, 2 * (2 * n - 1)),
            "c": F(n + k, 2 * n - 1),
            "e": F(m - 1, 2 * (2 * n - 1)),
        }
    return {
        "a": F(2 + 2 * m, 2 * n + 2),
        "b": F(2 * k, 4 * n + 4),
        "c": F(4 * m + 4 * k + 3, 4 * n + 4),
        "e": F(4 * m + 2, 16 * n + 16),
    }


def _exactify(v):
    return v if isinstance(v, (int, Fraction)) else float(v)


def ricci_components(model: FlagModel, metric: Metric) -> RicciComponents:
    l1, l2 = _exactify(metric.lambda1), _exactify(metric.lambda2)
    c = raw_coefficients(model)
    if model.family is Family.TypeI:
        r1 = -c["a"] - c["b"] * l1 * l1 / (l2 * l2)
        r2 = -c["c"] - c["e"] * (l2 * l2 - (l1 - l2) ** 2) / (l1 * l2)
    else:
        r1 = -c["a"] - c["b"] * l1 * l1 / (l2 * l2)
        r2 = -c["c"] + c["e"] * l1 / l2
    return RicciComponents(r1, r2)


def raw_rhs(model: FlagModel, x, y):
    """Right-hand side of the (rational) flow system at ``(x, y) = (lambda1, lambda2)``."""
    if not (x > 0 and y > 0):
        raise DomainError(f"flow system defined on the open first quadrant, got ({x}, {y})")
    x, y = _exactify(x), _exactify(y)
    c = raw_coefficients(model)
    xdot = c["a"] + c["b"] * x * x / (y * y)
    if model.family is Family.TypeI:
        ydot = c["c"] + c["e"] * (y * y - (x - y) ** 2) / (x * y)
    else:
        ydot = c["c"] - c["e"] * x / y
    return xdot, ydot


def polynomial_field(model: FlagModel) -> VectorField:
    """The flow system multiplied by ``y^2``; polynomial, homogeneous of degree 2.

    Equivalent to the rational system on the open first quadrant and leaves the
    x-axis invariant.
    """
    c = raw_coefficients(model)
    if model.family is Family.TypeI:
        p1 = Poly2({(2, 0): c["b"], (0, 2): c["a"]})
        # y^2 (y^2 - (x-y)^2) / (x y) = y (2y - x)
        p2 = Poly2({(1, 1): -c["e"], (0, 2): c["c"] + 2 * c["e"]})
    else:
        p1 = Poly2({(2, 0): c["b"], (0, 2): c["a"]})
        p2 = Poly2({(1, 1): -c["e"], (0, 2): c["c"]})
    return VectorField(p1, p2)


def einstein_defect(model: FlagModel, metric: Metric):
    """``r1 * lambda2 - r2 * lambda1``; vanishes exactly when Ric is proportional to g."""
    r = ricci_components(model, metric)
    return r.r1 * _exactify(metric.lambda2) - r.r2 * _exactify(metric.lambda1)


def einstein_directions(model: FlagModel, n_grid: int = 20000, xtol: float = 1e-15) -> list[float]:
    """Angles in the open quarter circle where `einstein_defect` changes sign.

    The defect along ``(cos a, sin a)`` is scanned on a uniform grid of
    `n_grid` cells, then every bracketed sign change is refined with Brent's
    method. Grid points that are exact zeros count once.
    """

    def g(a):
        return float(einstein_defect(model, Metric(math.cos(a), math.sin(a))))

    lo, hi = 0.0, math.pi / 2
    angles = [lo + (hi - lo) * i / n_grid for i in range(1, n_grid)]
    vals = [g(a) for a in angles]
    roots = []
    for i, (a, fa) in enumerate(zip(angles, vals)):
        if fa == 0:
            roots.append(a)
            continue
        if i + 1 < len(vals) and vals[i + 1] != 0 and (fa > 0) != (vals[i + 1] > 0):
            roots.append(brentq(g, a, angles[i + 1], xtol=xtol, rtol=4 * 2.220446049250313e-16))
    return roots


def ray_slopes(model: FlagModel) -> tuple[Fraction, Fraction]:
    """Slopes ``x/y`` of the two Einstein rays, steepest (non-Kähler) first."""
    m, k = model.m, model.k
    if model.family is Family.TypeI:
        return F(2 * (m - 1), m + 2 * k), F(2)
    return F(4 * (m + 1), 4 * k + 2 * m + 1), F(2)


def fibration_info(model: FlagModel) -> FibrationInfo:
    m, k, n = model.m, model.k, model.n
    if model.family is Family.TypeI:
        return FibrationInfo(
            dim_m1=2 * m * (2 * k + 1),
            dim_m2=m * (m - 1),
            fiber_label=f"SO({2 * m})/U({m})",
            base_label=f"SO({2 * n + 1})/(SO({2 * m})xSO({2 * k + 1}))",
            total_label=model.label,
        )
    return FibrationInfo(
        dim_m1=4 * m * k,
        dim_m2=m * (m + 1),
        fiber_label=f"Sp({m})/U({m})",
        base_label=f"Sp({n})/(Sp({m})xSp({k}))",
        total_label=model.label,
    )
