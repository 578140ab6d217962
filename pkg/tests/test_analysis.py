import math
from fractions import Fraction as F

import numpy as np
import pytest

from flagflow.algebra import Poly2, poly_eval
from flagflow.analysis import (
    Classification,
    classify_equilibrium,
    closed_form_points,
    finite_origin,
    infinity_equilibria,
    invariant_rays,
    named_equilibria,
    ray_disc_point,
)
from flagflow.compactify import Chart, VectorField, compactified_field
from flagflow.errors import NotAnEquilibriumError, ParameterError
from flagflow.models import make_model, polynomial_field, ray_slopes

x, y = Poly2.var("x"), Poly2.var("y")
SN, SA = Classification.StableNode, Classification.Saddle


def strict_models(limit=12):
    out = []
    for n in range(2, limit + 1):
        for m in range(1, n + 1):
            k = n - m
            if m > 1 and k != 1:
                out.append(make_model("I", m, k))
            if k >= 3:
                out.append(make_model("II", m, k))
    return out


STRICT = strict_models()
ids = [mdl.label for mdl in STRICT]


def test_type_one_equilibria_example():
    eqs = infinity_equilibria(polynomial_field(make_model("I", 2, 2)))
    assert [e.name for e in eqs] == ["p1", "p2", "p3"]
    assert [e.z1 for e in eqs] == [3, F(1, 2), 0]
    assert all(e.chart is Chart.U1 for e in eqs)
    assert [e.classification for e in eqs] == [SN, SA, SN]
    assert eqs[0].eigenvalues == (complex(F(-15, 7)), complex(F(-41, 14)))
    assert eqs[1].eigenvalues == (complex(F(5, 14)), complex(F(-3, 7)))
    assert eqs[2].eigenvalues == (complex(F(-3, 7)), complex(F(-5, 14)))


def test_no_equilibrium_at_u2_origin_for_type_one():
    u2 = compactified_field(polynomial_field(make_model("I", 2, 2)), Chart.U2)
    assert poly_eval(u2.p1, (0, 0)) == F(2, 7)


def test_type_two_disc_points():
    n = named_equilibria(make_model("II", 1, 3))
    assert n.p1.disc.as_tuple() == pytest.approx((8 / 17, 15 / 17), abs=1e-12)
    assert n.p2.disc.as_tuple() == pytest.approx((2 / 5**0.5, 1 / 5**0.5), abs=1e-12)
    assert n.p3.disc.as_tuple() == pytest.approx((1, 0), abs=1e-12)
    assert [n.p1.classification, n.p2.classification, n.p3.classification] == [SN, SA, SN]


def test_named_type_one():
    n = named_equilibria(make_model("I", 2, 2))
    assert n.p1.disc.as_tuple() == pytest.approx((0.316228, 0.948683), abs=1e-6)
    assert n.p1.sphere.as_tuple() == pytest.approx((2 / 40**0.5, 6 / 40**0.5, 0), abs=1e-12)


def test_classify_examples():
    u1 = compactified_field(polynomial_field(make_model("I", 2, 2)), Chart.U1)
    eigs, cls = classify_equilibrium(u1, (F(1, 2), 0))
    assert cls is SA and eigs == (5 / 14, -3 / 7)
    with pytest.raises(NotAnEquilibriumError):
        classify_equilibrium(u1, (1, 0))


@pytest.mark.parametrize("field,expected", [
    (VectorField(-x, -2 * y), SN),
    (VectorField(x, 3 * y), Classification.UnstableNode),
    (VectorField(-x + y, -x - y), Classification.StableFocus),
    (VectorField(x + y, -x + y), Classification.UnstableFocus),
    (VectorField(y, -x), Classification.LinearCenter),
    (VectorField(x * x, -y), Classification.Degenerate),
    (VectorField(x, -y), SA),
])
def test_classification_table(field, expected):
    assert classify_equilibrium(field, (0, 0))[1] is expected


def test_finite_origin_degenerate():
    o = finite_origin(polynomial_field(make_model("I", 2, 2)))
    assert o.classification is Classification.Degenerate
    assert finite_origin(VectorField(x + 1, y)) is None


@pytest.mark.parametrize("model", STRICT, ids=ids)
def test_equilibrium_pattern_all_strict(model):
    eqs = infinity_equilibria(polynomial_field(model))
    assert [e.classification for e in eqs] == [SN, SA, SN]
    assert [e.name for e in eqs] == ["p1", "p2", "p3"]
    for e in eqs:
        assert math.fsum(c * c for c in e.sphere.as_tuple()) == pytest.approx(1, abs=1e-12)
        assert abs(e.sphere.y3) <= 1e-12
        assert math.hypot(*e.disc.as_tuple()) == pytest.approx(1, abs=1e-12)
        field = compactified_field(polynomial_field(model), e.chart)
        assert math.hypot(*field(float(e.z1), 0.0)) <= 1e-10
    # closed forms agree
    named = named_equilibria(model)
    cf = closed_form_points(model)
    for name in ("p1", "p2", "p3"):
        assert getattr(named, name).sphere.as_tuple() == pytest.approx(cf[name], abs=1e-10)


@pytest.mark.parametrize("model", STRICT, ids=ids)
def test_rays_all_strict(model):
    vf = polynomial_field(model)
    rays = invariant_rays(vf)
    assert len(rays) == 3
    assert rays[-1].slope == math.inf and (rays[-1].a, rays[-1].b) == (1.0, 0.0)
    assert sorted(r.slope for r in rays[:2]) == sorted(ray_slopes(model))
    for r in rays:
        resid = r.a * poly_eval(vf.p2, (r.a, r.b)) - r.b * poly_eval(vf.p1, (r.a, r.b))
        assert abs(resid) <= 1e-12
        assert r.a**2 + r.b**2 == pytest.approx(1, abs=1e-15)


def test_rays_examples():
    r = invariant_rays(polynomial_field(make_model("I", 2, 2)))
    assert [ray.slope for ray in r] == [F(1, 3), 2, math.inf]
    r = invariant_rays(polynomial_field(make_model("II", 1, 3)))
    assert [ray.slope for ray in r] == [F(8, 15), 2, math.inf]
    r = invariant_rays(VectorField(x * x, y * y))
    got = sorted((round(d.a, 12), round(d.b, 12)) for d in r)
    h = round(2**-0.5, 12)
    assert got == [(0.0, 1.0), (h, h), (1.0, 0.0)]


def test_rays_need_homogeneous():
    with pytest.raises(ParameterError):
        invariant_rays(VectorField(x * x + 1, y))
    with pytest.raises(ParameterError):
        invariant_rays(VectorField(x * x, x * y))


@pytest.mark.parametrize("model", STRICT[::4], ids=ids[::4])
def test_ray_endpoints_match_equilibria(model):
    named = named_equilibria(model)
    for ray, eq in [("gamma1", named.p1), ("gamma2", named.p2), ("gamma3", named.p3)]:
        u, v = ray_disc_point(model, ray, 1e6)
        assert math.dist((u, v), eq.disc.as_tuple()) <= 1e-10
    assert ray_disc_point(model, "gamma2", 0.0) == pytest.approx((0, 0))


def test_ray_disc_point_unknown():
    with pytest.raises(ValueError):
        ray_disc_point(make_model("I", 2, 2), "gamma4", 1.0)


@pytest.mark.parametrize("model", STRICT[::3], ids=ids[::3])
def test_saddle_eigenvectors(model):
    p2 = named_equilibria(model).p2
    field = compactified_field(polynomial_field(model), p2.chart)
    jac = np.array([[float(poly_eval(d, (p2.z1, 0))) for d in row] for row in field.jacobian()])
    vals, vecs = np.linalg.eig(jac)
    pos = vecs[:, np.argmax(vals.real)]
    neg = vecs[:, np.argmin(vals.real)]
    assert abs(pos[1]) <= 1e-12 * abs(pos[0])  # along the equator
    assert abs(neg[1]) > 1e-3  # transverse, into the disc
