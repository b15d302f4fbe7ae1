import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from rharmonic import jets as J
from rharmonic.conformal_metrics import (
    BetaState,
    ConformalFactor,
    beta_blowup_scan,
    beta_rhs,
    change_of_variables_check,
    gamma_ode_rhs,
    hat_tau4_at_state,
    hat_tau4_explicit,
    hat_tau4_radial,
    integrate_gamma_ode,
    order7_structure,
    pole_regularity,
    tau4_identity,
)
from rharmonic.equivariant import Profile
from rharmonic.errors import DomainError


def _gamma_ode_oracle(eps):
    """gamma''' solved from the radial bracket with sympy, as a numeric function of (m, rho, g1, g2)."""
    rho, m = sp.symbols("rho m")
    f = sp.sin(rho) if eps == 1 else sp.sinh(rho)
    g = sp.Function("g")(rho)
    g1, g2, g3 = (g.diff(rho, k) for k in (1, 2, 3))
    fd = f.diff(rho)
    LD = lambda F: -(F.diff(rho, 2) + (m - 1) * fd / f * F.diff(rho) - (m - 1) * F * fd**2 / f**2)
    lap = lambda u: -(u.diff(rho, 2) + (m - 1) * fd / f * u.diff(rho))
    br = (m - 1) * LD(g1) + (13 * m - 14) * g1 * g2
    br -= ((m**2 + 2 * m - 2) * lap(g) - (m - 1) * (m**2 - 4 * m - 32) * g1**2 + eps * (m - 1) ** 2) * g1
    sol = sp.solve(sp.Eq(br, 0), g3)[0]
    a, b = sp.symbols("a b")
    sol = sol.subs(g2, b).subs(g1, a)
    return sp.lambdify((m, rho, a, b), sol, "math")


@pytest.mark.parametrize("eps", [1, -1])
def test_gamma_ode_matches_sympy(eps):
    oracle = _gamma_ode_oracle(eps)
    rng = np.random.default_rng(11 + eps)
    for _ in range(30):
        m = int(rng.integers(3, 12))
        rho = float(rng.uniform(0.2, 2.9 if eps == 1 else 3.0))
        g1, g2 = rng.normal(size=2)
        want = oracle(m, rho, g1, g2)
        assert gamma_ode_rhs(m, eps, rho, g1, g2) == pytest.approx(want, rel=1e-10, abs=1e-10)


def test_hat_forms_agree():
    cf = ConformalFactor(Profile(lambda x: 0.2 * J.cos(x) - 0.1 * J.cos(x) ** 3), 1, 6)
    for rho in (0.3, 1.0, 2.0, 2.8):
        assert float(hat_tau4_radial(cf, rho)) == pytest.approx(float(hat_tau4_explicit(cf, rho)), rel=1e-9)


def test_hat_at_state_matches_profile():
    gamma = Profile(lambda x: 0.3 * J.cosh(x) + 0.1 * x * x)
    cf = ConformalFactor(gamma, -1, 5)
    rho = 0.8
    j = gamma.eval(rho, 3)
    state = [float(J.lead_value(j.c[k])) * math.factorial(k) for k in range(4)]
    assert hat_tau4_at_state(5, -1, rho, state) == pytest.approx(float(hat_tau4_radial(cf, rho)), rel=1e-10)


def test_zero_factor_is_critical():
    for eps in (1, -1):
        cf = ConformalFactor(Profile.constant(0.0), eps, 5)
        assert abs(float(hat_tau4_radial(cf, 1.0))) < 1e-12
        assert abs(float(tau4_identity(cf, 1.0))) < 1e-12


def test_beta_blowup_symmetric():
    s = beta_blowup_scan(8, 0.0, 1.0)
    assert s.forward.status == "blow_up" and s.backward.status == "blow_up"
    assert s.t_plus == pytest.approx(0.43960327, abs=1e-6)
    assert s.t_minus == pytest.approx(-s.t_plus, abs=1e-9)


def test_beta_rhs_parity():
    # (t, beta, beta') -> (-t, -beta, beta') flips the sign of beta''
    for m in (4, 8, 11):
        a = beta_rhs(m, BetaState(0.3, 0.7, -0.2))
        b = beta_rhs(m, BetaState(-0.3, -0.7, -0.2))
        assert a == pytest.approx(-b, rel=1e-12)


@pytest.mark.parametrize("eps", [1, -1])
def test_change_of_variables(eps):
    for m in (3, 5, 8):
        assert change_of_variables_check(m, eps, [0.0, 0.01, 0.005]) < 1e-9


def test_change_of_variables_reports_blowup():
    with pytest.raises(DomainError):
        change_of_variables_check(5, -1, [0.0, 0.1, 0.05])


def test_pole_regularity():
    assert pole_regularity(Profile(lambda x: J.cos(x) ** 2))["regular"]
    rep = pole_regularity(Profile(lambda x: x))
    assert not rep["regular"]
    assert rep[0.0][0] == pytest.approx(1.0)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=8, max_size=8), st.integers(3, 9), st.sampled_from([1, -1]))
def test_order7_is_affine_in_top_derivative(state, m, eps):
    cf = ConformalFactor(Profile.constant(0.0), eps, m)
    coef, defect = order7_structure(cf, 1.1, state)
    assert abs(defect) < 1e-9 * max(1.0, abs(coef))
    assert coef != 0.0


def test_order7_validates_state():
    cf = ConformalFactor(Profile.constant(0.0), 1, 5)
    with pytest.raises(ValueError):
        order7_structure(cf, 1.0, [0.0] * 7)


def test_domain_errors():
    with pytest.raises(ValueError):
        ConformalFactor(Profile.constant(0.0), 0, 5)
    with pytest.raises(ValueError):
        ConformalFactor(Profile.constant(0.0), 1, 2)
    with pytest.raises(DomainError):
        ConformalFactor(Profile.constant(0.0), 1, 5).check(math.pi)
    with pytest.raises(DomainError):
        BetaState(1.0, 0.0, 0.0).check()
    with pytest.raises(DomainError):
        BetaState(0.5, 0.0, 0.0).check(eps=-1)
    with pytest.raises(DomainError):
        gamma_ode_rhs(5, 1, 0.0, 0.1, 0.1)
    with pytest.raises(DomainError):
        beta_rhs(5, BetaState(1.0, 0.1, 0.1))
    with pytest.raises(ValueError):
        beta_blowup_scan(8, 0.0, 1.0, t0=0.999999)


@pytest.mark.parametrize("eps", [1, -1])
def test_hat_vanishes_along_ode_solution(eps):
    m = 6
    rho0, rho1 = (1.2, 2.0) if eps == 1 else (0.8, 1.5)
    out = integrate_gamma_ode(m, eps, rho0, [0.0, 0.05, -0.02], rho1)
    assert out.status == "completed"
    for rho, y in out.samples[:: max(1, len(out.samples) // 50)]:
        g3 = gamma_ode_rhs(m, eps, rho, y[1], y[2])
        assert abs(hat_tau4_at_state(m, eps, rho, [y[0], y[1], y[2], g3])) < 1e-6
    # off the solution the residual does not vanish
    assert abs(hat_tau4_at_state(m, eps, rho0, [0.0, 0.05, -0.02, 1.0])) > 1e-3
