import math

import numpy as np
import pytest
import sympy as sp

from rharmonic import jets as J
from rharmonic.curves import (
    CurveMap,
    circle_alpha_star,
    circle_map,
    curve_energy,
    curve_t_sequence,
    curve_tension,
    geodesic_reparam_tension,
    paraboloid_alpha_star,
    paraboloid_surface,
    sphere_surface,
)
from rharmonic.numerics import Quadrature

g = sp.Symbol("g")
W_EXPR = g + sp.sin(g) * 3 / 10
A_EXPR = 1 + sp.cos(2 * g) / 5


def wobbly():
    return CurveMap(lambda x: x + 0.3 * J.sin(x), lambda x: 1.0 + 0.2 * J.cos(2.0 * x), sphere_surface(), 1)


def printed_s2_components():
    """Printed S^2 components of tau and d tau."""
    w, a = W_EXPR, A_EXPR
    tw = w.diff(g, 2) + 2 * sp.cot(a) * w.diff(g) * a.diff(g)
    ta = a.diff(g, 2) - sp.sin(2 * a) * w.diff(g) ** 2 / 2
    dw = tw.diff(g) + (ta * w.diff(g) + tw * a.diff(g)) * sp.cot(a)
    da = ta.diff(g) - tw * sp.sin(2 * a) * w.diff(g) / 2
    d2w = dw.diff(g) + (da * w.diff(g) + dw * a.diff(g)) * sp.cot(a)
    d2a = da.diff(g) - dw * sp.sin(2 * a) * w.diff(g) / 2
    return (tw, ta), (dw, da), (d2w, d2a)


def test_t_sequence_matches_printed_s2_formulas():
    exprs = printed_s2_components()
    c = wobbly()
    for g0 in np.random.default_rng(0).uniform(0, 2 * math.pi, 10):
        seq = curve_t_sequence(c, float(g0), 4)
        for j, (ew, ea) in zip((2, 3, 4), exprs):
            tw, ta = seq[j]
            assert float(tw.c[0]) == pytest.approx(float(ew.subs(g, g0)), rel=1e-10, abs=1e-12)
            assert float(ta.c[0]) == pytest.approx(float(ea.subs(g, g0)), rel=1e-10, abs=1e-12)


def test_energy_matches_printed_4_energy():
    _, _, (d2w, d2a) = printed_s2_components()
    dens = sp.lambdify(g, (sp.sin(A_EXPR) ** 2 * d2w**2 + d2a**2) / 2, "numpy")
    nodes = np.arange(256) * 2 * math.pi / 256
    want = float(np.sum(dens(nodes)) * 2 * math.pi / 256)
    assert curve_energy(wobbly(), 4, Quadrature.trapezoid(256)) == pytest.approx(want, rel=1e-10)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_circle_tension(k):
    a = circle_alpha_star(2)
    tw, ta = curve_tension(circle_map(sphere_surface(), k, a), 0.4)
    assert float(tw.c[0]) == pytest.approx(0.0, abs=1e-15)
    assert float(ta.c[0]) == pytest.approx(-0.5 * math.sin(2 * a) * k * k)


def test_geodesic_tension_vanishes():
    c = circle_map(sphere_surface(), 1, math.pi / 2)
    seq = curve_t_sequence(c, 0.3, 5)
    for tw, ta in seq.values():
        assert abs(float(tw.c[0])) < 1e-15 and abs(float(ta.c[0])) < 1e-15
    assert curve_energy(c, 3) == pytest.approx(0.0, abs=1e-25)


def test_paraboloid_circle_tension():
    a = paraboloid_alpha_star(3)
    _, ta = curve_tension(circle_map(paraboloid_surface(), 1, a), 1.0)
    assert float(ta.c[0]) == pytest.approx(-a / (1 + 4 * a * a))


def test_circle_energies():
    assert curve_energy(circle_map(sphere_surface(), 1, math.pi / 4), 2) == pytest.approx(math.pi / 4)
    assert curve_energy(circle_map(sphere_surface(), 1, circle_alpha_star(3)), 3) == pytest.approx(4 * math.pi / 27)


def test_es_flavor_coincides():
    c = wobbly()
    assert curve_energy(c, 3, flavor="es_energy") == curve_energy(c, 3)


def test_rotation_invariance():
    c = wobbly()
    shifted = CurveMap(lambda x: c.w(x + 0.7), lambda x: c.alpha(x + 0.7), c.target, 1)
    q = Quadrature.trapezoid(128)
    assert curve_energy(shifted, 3, q) == pytest.approx(curve_energy(c, 3, q), rel=1e-10)


def test_geodesic_reparametrization():
    cube = geodesic_reparam_tension([0, 0, 0, 1], 2)
    assert cube["r_harmonic"] and cube["proper"] and cube["tau_r_coefficient"] == 0.0
    lin = geodesic_reparam_tension([0, 1], 5)
    assert lin["r_harmonic"] and not lin["proper"]
    q4 = geodesic_reparam_tension([0, 0, 0, 0, 1], 2)
    assert q4["tau_r_coefficient"] == pytest.approx(-24.0) and not q4["r_harmonic"]
    assert geodesic_reparam_tension([0, 0, 0, 0, 1], 3)["r_harmonic"]


def test_validation():
    with pytest.raises(ValueError):
        curve_energy(wobbly(), 1)
    with pytest.raises(ValueError):
        paraboloid_alpha_star(2)
