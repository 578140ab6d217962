"""Acceptance criteria, one test per criterion.

Each test runs inside the ``criterion`` fixture, which enforces the runtime
budget and feeds the PASS/FAIL summary printed at the end of the session.
"""

import math
import subprocess
import sys
from fractions import Fraction as F

import numpy as np
import pytest

from flagflow.algebra import Poly2, poly_divmod_var, univariate
from flagflow.analysis import Classification, infinity_equilibria, invariant_rays, named_equilibria
from flagflow.compactify import Chart, compactified_field
from flagflow.flow import (
    Region,
    Verdict,
    classify_basin,
    grid_points,
    integrate_compactified,
    integrate_raw,
    orbit_deviation,
    sector_of,
)
from flagflow.models import einstein_directions, make_model, polynomial_field, ray_slopes

pytestmark = pytest.mark.acceptance

TYPE_I = [(2, 2), (3, 2), (4, 3), (2, 0), (5, 5)]
TYPE_II = [(1, 3), (2, 3), (2, 4), (3, 5), (1, 8)]
SN, SA = Classification.StableNode, Classification.Saddle


def closed_form_u1(m, k):
    """U1 chart field written out coefficient by coefficient."""
    n = m + k
    h = F(1, 2 * (2 * n - 1))
    z1 = Poly2({(1, 0): -h * (m + 2 * k), (2, 0): h * (2 * k + 2 * n + 2 * m - 2), (3, 0): h * (4 - 4 * m)})
    z2 = Poly2({(0, 1): -h * (1 + 2 * k), (2, 1): -h * (4 * m - 4)})
    return z1, z2


def u1_cubic_in_u2(m, k, z):
    """The U1 cubic reused verbatim as a U2 field; a candidate that must be rejected."""
    n = m + k
    h = F(1, 2 * (2 * n - 1))
    return h * (-m - 2 * k) * z + h * (2 * k + 2 * n + 2 * m - 2) * z**2 + h * (-4 * m + 4) * z**3


def test_criterion_01_chart_formula(criterion):
    with criterion(1, "U1 chart field equals the closed-form coefficients exactly", 1.0) as c:
        for m, k in TYPE_I:
            field = compactified_field(polynomial_field(make_model("I", m, k)), Chart.U1)
            assert (field.p1, field.p2) == closed_form_u1(m, k), (m, k)
        c.note(f"{len(TYPE_I)} models")


def test_criterion_02_u2_roots(criterion):
    with criterion(2, "U2 roots at 2 and 2(m-1)/(m+2k); U1 cubic rejected there", 1.0) as c:
        for m, k in TYPE_I:
            field = compactified_field(polynomial_field(make_model("I", m, k)), Chart.U2)
            restricted = Poly2({(i, 0): v for i, v in enumerate(univariate(field.p1, "x", at=0)) if v})
            q1, q2 = F(2), F(2 * (m - 1), m + 2 * k)
            assert restricted(q1, 0) == 0 and restricted(q2, 0) == 0, (m, k)
        at_q1 = u1_cubic_in_u2(2, 2, F(2))
        at_q2 = u1_cubic_in_u2(2, 2, F(1, 3))
        assert (at_q1, at_q2) == (F(6, 7), F(-8, 189))
        assert not (at_q1 == 0 and at_q2 == 0)
        c.note(f"U1 cubic in U2 at (2,2): {at_q1} at z1=2, {at_q2} at z1=1/3")


def test_criterion_03_invariant_rays(criterion):
    with criterion(3, "invariant ray slopes for both families", 1.0) as c:
        cases = [("I", m, k, F(2 * (m - 1), m + 2 * k)) for m, k in TYPE_I]
        cases += [("II", m, k, F(4 * (m + 1), 4 * k + 2 * m + 1)) for m, k in TYPE_II]
        for fam, m, k, s1 in cases:
            rays = invariant_rays(polynomial_field(make_model(fam, m, k)))
            assert len(rays) == 3
            got = sorted(float(r.slope) for r in rays[:2])
            assert got == pytest.approx(sorted([float(s1), 2.0]), abs=1e-12), (fam, m, k)
            axis = rays[-1]
            assert math.isinf(axis.slope) and (axis.a, axis.b) == (1.0, 0.0)
        c.note(f"{len(cases)} models")


def test_criterion_04_equilibrium_atlas(criterion):
    with criterion(4, "equilibrium atlas for I(2,2) and II(1,3)", 1.0):
        eqs = infinity_equilibria(polynomial_field(make_model("I", 2, 2)))
        by_z = {F(e.z1): e for e in eqs}
        assert set(by_z) == {F(0), F(1, 2), F(3)}
        want = {F(0): ((-3 / 7, -5 / 14), SN), F(1, 2): ((5 / 14, -3 / 7), SA), F(3): ((-15 / 7, -41 / 14), SN)}
        for z, (eig, cls) in want.items():
            e = by_z[z]
            assert [l.real for l in e.eigenvalues] == pytest.approx(eig, abs=1e-12)
            assert all(abs(l.imag) <= 1e-12 for l in e.eigenvalues)
            assert e.classification is cls
        m, k = 2, 2
        r = math.sqrt(5 * m * m - 8 * m + 4 * m * k + 4 * k * k + 4)
        p1 = named_equilibria(make_model("I", m, k)).p1
        assert p1.sphere.as_tuple() == pytest.approx((2 * (m - 1) / r, (m + 2 * k) / r, 0), abs=1e-12)

        n = named_equilibria(make_model("II", 1, 3))
        assert n.p1.disc.as_tuple() == pytest.approx((8 / 17, 15 / 17), abs=1e-12)
        assert n.p2.disc.as_tuple() == pytest.approx((2 / math.sqrt(5), 1 / math.sqrt(5)), abs=1e-12)
        assert n.p3.disc.as_tuple() == pytest.approx((1, 0), abs=1e-12)


BASIN_MODELS = [("I", 2, 2), ("I", 3, 2), ("I", 2, 0), ("II", 1, 3), ("II", 2, 3), ("II", 2, 4)]


def test_criterion_05_basins(criterion):
    with criterion(5, "basin grids agree with the sector predictions", 60.0) as c:
        g2 = math.atan2(1, 2)
        checked = skipped = 0
        for fam, m, k in BASIN_MODELS:
            model = make_model(fam, m, k)
            for x0, y0 in grid_points((0.05, 5), (0.05, 5), 10, 10):
                res = classify_basin(model, x0, y0)
                if abs(math.atan2(y0, x0) - g2) <= 1e-3:
                    skipped += 1
                    continue
                assert res.consistent, (model.label, x0, y0, res)
                checked += 1
            named = named_equilibria(model)
            s1, s2 = ray_slopes(model)
            for slope, target in ((s1, named.p1), (s2, named.p2)):
                for t in (F(1, 2), F(3)):
                    traj = integrate_compactified(model, slope * t, t, dense=False)
                    om = traj.omega
                    assert om.verdict is Verdict.CONVERGED and om.target == target.name, (model.label, slope, t)
                    assert om.final_disc.distance(target.disc) <= 1e-6
        c.note(f"{checked} grid cells consistent, {skipped} near gamma2 excluded")


ORBIT_SEEDS = [(0.1, 1), (0.3, 2), (1, 1), (1.5, 1), (0.5, 4), (2.5, 1), (4, 1), (3, 0.5), (0.05, 0.2), (1, 3)]


def test_criterion_06_orbit_equivalence(criterion):
    with criterion(6, "raw and compactified orbits coincide on the disc", 30.0) as c:
        worst = 0.0
        for fam, m, k in (("I", 2, 2), ("II", 1, 3)):
            model = make_model(fam, m, k)
            for seed in ORBIT_SEEDS:
                d = orbit_deviation(integrate_raw(model, *seed), integrate_compactified(model, *seed))
                assert d <= 1e-6, (model.label, seed, d)
                worst = max(worst, d)
        c.note(f"max deviation {worst:.2e}")


def test_criterion_07_einstein_rays(criterion):
    with criterion(7, "exactly two Einstein directions, matching the invariant rays", 5.0):
        for fam, params in (("I", TYPE_I), ("II", TYPE_II)):
            for m, k in params:
                model = make_model(fam, m, k)
                zeros = sorted(einstein_directions(model))
                assert len(zeros) == 2
                interior = sorted(r.angle for r in invariant_rays(polynomial_field(model)) if r.b > 0)
                assert zeros == pytest.approx(interior, abs=1e-10), model.label


def test_criterion_08_equator_invariance(criterion):
    with criterion(8, "z2 divides the z2-component in U1 and U2", 1.0) as c:
        count = 0
        for fam, params in (("I", TYPE_I), ("II", TYPE_II)):
            for m, k in params:
                vf = polynomial_field(make_model(fam, m, k))
                for chart in (Chart.U1, Chart.U2):
                    _, rem = poly_divmod_var(compactified_field(vf, chart).p2, "y")
                    assert rem.is_zero()
                    count += 1
        c.note(f"{count} chart fields")


R3_SEEDS = [(2.2, 1), (2.5, 1), (3, 1), (4, 1), (6, 1), (10, 0.5), (3, 1.2), (40, 1), (0.5, 0.1), (20, 9)]


def test_criterion_09_r3_asymptotics(criterion):
    with criterion(9, "R3 orbits: y/x below 1e-3 and endpoint at (1,0)", 30.0) as c:
        model = make_model("I", 2, 2)
        grows = 0
        for seed in R3_SEEDS:
            assert sector_of(model, *seed) is Region.R3
            traj = integrate_compactified(model, *seed)
            ratio = traj.disc[:, 1] / traj.disc[:, 0]
            assert np.min(ratio) < 1e-3, seed
            assert math.dist(traj.disc[-1], (1, 0)) <= 1e-6, seed
            raw = integrate_raw(model, *seed)
            grows += raw.xy[-1, 0] > raw.xy[0, 0]
        # reported only: along raw R3 orbits lambda1 grows while lambda2/lambda1 -> 0
        c.note(f"raw lambda1 increased on {grows}/{len(R3_SEEDS)} orbits (reported, not asserted)")


CLI_RUNS = [
    ["portrait", "--family", "I", "--m", "2", "--k", "2"],
    ["equilibria", "--family", "I", "--m", "2", "--k", "2", "--json"],
    ["basin", "--family", "I", "--m", "2", "--k", "2", "--grid", "10x10", "--xmax", "5", "--ymax", "5"],
]


def test_criterion_10_determinism(criterion):
    with criterion(10, "portrait, equilibria --json and basin are byte-identical across runs", 10.0):
        for argv in CLI_RUNS:
            outs = [subprocess.run([sys.executable, "-m", "flagflow", *argv], capture_output=True,
                                   check=True).stdout for _ in range(2)]
            assert outs[0] == outs[1] and outs[0], argv[0]
