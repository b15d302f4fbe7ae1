"""Acceptance criteria 1 to 9 at their stated tolerances."""

import math

import numpy as np
import pytest

from rharmonic import jets as J
from rharmonic.closed_forms import (
    CylinderSolution,
    clifford_back_substitution,
    clifford_polynomial,
    constant_solution_gate,
    cylinder_harmonicity,
    cylinder_laplacian_power,
    cylinder_power_by_jets,
    cylinder_problem,
    el_zero_verdict,
    hypersphere_critical,
    isometric_roots,
)
from rharmonic.condition_c import es4_family_energy, infimum_gap_check, ingredient_bounds
from rharmonic.conformal_metrics import ConformalFactor, beta_blowup_scan, hat_tau4_explicit, hat_tau4_radial
from rharmonic.equivariant import (
    Profile,
    ReducedProblem,
    bump_perturbation,
    el_residual,
    tau4es_assembly,
    variation_consistency,
)
from rharmonic.geometry import ModelManifold, WarpFunction
from rharmonic.spectrum import (
    CurveProblem,
    closed_form_block,
    fourier_block,
    index_nullity,
    printed_basis_scale,
)


def _rel(a, b):
    return abs(a - b) / max(abs(a), abs(b))


def _random_profile(rng, scale=0.4):
    c = rng.uniform(-scale, scale, 4)
    a0 = rng.uniform(0.3, 1.2)
    return Profile(lambda x: a0 + c[0] * x + c[1] * J.sin(x) + c[2] * x * x * 0.25 + c[3] * J.cos(2.0 * x), "random")


# -- 1 ---------------------------------------------------------------------

_C1 = [(r, m, "r_energy") for r in (2, 3, 4) for m in range(2, 6)] + [(4, m, "es4_energy") for m in range(2, 6)]


@pytest.mark.criterion(1)
@pytest.mark.parametrize("r,m,flavor", _C1)
def test_hypersphere_radius(r, m, flavor):
    P = ReducedProblem(ModelManifold(m, WarpFunction.constant(1.0)), WarpFunction.sin(), r, flavor)
    rho = np.linspace(0.5, 2.0, 10)
    a = hypersphere_critical(r)
    assert np.max(np.abs(el_residual(P, Profile.constant(a), rho).residual)) < 1e-8
    for d in (-0.1, 0.1):
        assert np.min(np.abs(el_residual(P, Profile.constant(a + d), rho).residual)) > 1e-4


# -- 2 ---------------------------------------------------------------------


@pytest.mark.criterion(2)
@pytest.mark.parametrize("p", [1, 2, 3])
def test_clifford_isometric_factorization(p):
    t = np.polynomial.Polynomial([0.0, 1.0])
    for r in range(2, 9):
        want = (p * (2 * t - 1) * (r * t * t - r * t + 1)).coef
        assert np.array_equal(np.asarray(clifford_polynomial(p, p, r).coeffs, dtype=float), want)
    roots = isometric_roots(p, p, 5)
    expect = [0.5 - 0.5 * math.sqrt(0.2), 0.5, 0.5 + 0.5 * math.sqrt(0.2)]
    assert len(roots) == 3
    assert max(abs(a - b) for a, b in zip(roots, expect)) < 1e-10


@pytest.mark.criterion(2)
@pytest.mark.parametrize("r", range(3, 9))
def test_clifford_back_substitution(r):
    roots = isometric_roots(1, 2, r)
    assert roots
    for t in roots:
        assert abs(clifford_back_substitution(1, 2, r, t)) < 1e-10


# -- 3 ---------------------------------------------------------------------


@pytest.mark.criterion(3)
def test_constant_gate_empty():
    for m in [3, 4, 5, 6, 7, 10, 11, 12]:
        assert not constant_solution_gate(m).admissible


@pytest.mark.criterion(3)
def test_constant_gate_roots():
    g8, g9 = constant_solution_gate(8), constant_solution_gate(9)
    assert len(g8.roots_x) == 1 and len(g9.roots_x) == 1
    assert abs(g8.roots_x[0] - (math.sqrt(921) - 23) / 28) < 1e-10
    assert abs(g9.roots_x[0] - (math.sqrt(105) - 19) / 16) < 1e-10


@pytest.mark.criterion(3)
@pytest.mark.parametrize("flavor", ["r_energy", "es4_energy"])
def test_constant_solution_m8_critical(flavor):
    a = constant_solution_gate(8).alpha_star[0]
    P = ReducedProblem(ModelManifold(8, WarpFunction.identity()), WarpFunction.sin(), 4, flavor)
    assert np.max(np.abs(el_residual(P, Profile.constant(a), np.linspace(0.5, 2.0, 10)).residual)) < 1e-8


# -- 4 ---------------------------------------------------------------------

_RHO20 = np.linspace(1.0, 2.0, 20)


@pytest.mark.criterion(4)
@pytest.mark.parametrize("m", range(2, 10))
def test_cylinder_log_iff(m):
    for r in range(2, 7):
        zero, v, _ = el_zero_verdict(cylinder_problem(m, r), Profile(J.log), _RHO20)
        assert zero == (m % 2 == 0 and r >= m // 2), (m, r, v)


@pytest.mark.criterion(4)
def test_cylinder_coefficient_by_jets():
    for m in range(2, 10):
        for r in range(2, 7):
            c = cylinder_laplacian_power(m, r)
            got = float(cylinder_power_by_jets(m, r, np.longdouble("1.7")))
            assert abs(got - c) / max(1.0, abs(c)) < 1e-9, (m, r, got, c)


def _catalog():
    sols = [CylinderSolution("rho_sq"), CylinderSolution("rho_sq_log_rho")]
    sols += [CylinderSolution("rho_pow", k) for k in range(2, 7)]
    return sols


@pytest.mark.criterion(4)
@pytest.mark.parametrize("sol", _catalog(), ids=lambda s: f"{s.form}-{s.rprime}")
def test_cylinder_catalog(sol):
    for m in range(2, 10):
        for r in range(2, 7):
            if not sol.validity(m, r):
                continue
            assert cylinder_harmonicity(sol, m, r), (m, r)
            zero, v, _ = el_zero_verdict(cylinder_problem(m, r), sol.profile(m), _RHO20)
            assert zero, (m, r, v)


# -- 5 ---------------------------------------------------------------------


@pytest.mark.criterion(5)
@pytest.mark.parametrize("target", ["sphere", "hyperbolic"])
def test_assembly_matches_lagrangian(target):
    rng = np.random.default_rng(5 if target == "sphere" else 6)
    h = WarpFunction.sin() if target == "sphere" else WarpFunction.sinh()
    for i in range(50):
        m = int(rng.integers(2, 7))
        f = WarpFunction.sin() if i % 2 else WarpFunction.identity()
        P = ReducedProblem(ModelManifold(m, f), h, 4, "es4_energy")
        prof = _random_profile(rng)
        rho = float(rng.uniform(0.4, 2.4))
        el = float(el_residual(P, prof, rho).residual) / float(f.f(rho)) ** (m - 1)
        tau = float(tau4es_assembly(P, prof, rho))
        assert _rel(tau, -el) < 1e-7, (i, tau, -el)


# -- 6 ---------------------------------------------------------------------


@pytest.mark.criterion(6)
def test_hat_tau4_forms_agree():
    rng = np.random.default_rng(60)
    for i in range(100):
        eps = 1 if i % 2 else -1
        m = int(rng.integers(3, 10))
        c = rng.uniform(-0.5, 0.5, 3)
        if eps == 1:
            gamma = Profile(lambda x, c=c: c[0] * J.cos(x) + c[1] * J.cos(x) ** 2 + c[2] * J.cos(x) ** 3)
        else:
            gamma = Profile(lambda x, c=c: c[0] * J.cosh(x) + c[1] * J.cosh(x) ** 2 * 0.3 + c[2] * x * x)
        rho = float(rng.uniform(0.3, 2.8) if eps == 1 else rng.uniform(0.3, 2.0))
        cf = ConformalFactor(gamma, eps, m)
        a, b = float(hat_tau4_radial(cf, rho)), float(hat_tau4_explicit(cf, rho))
        assert _rel(a, b) < 1e-8, (i, a, b)


@pytest.mark.criterion(6)
def test_beta_blowup_m8():
    base = beta_blowup_scan(8, 0.0, 1.0, rel_tol=1e-10)
    half = beta_blowup_scan(8, 0.0, 1.0, rel_tol=5e-11)
    for t, th in ((base.t_plus, half.t_plus), (base.t_minus, half.t_minus)):
        assert t is not None and th is not None
        assert 0.39 <= abs(t) <= 0.49
        assert abs(t - th) < 1e-3


# -- 7 ---------------------------------------------------------------------


@pytest.mark.criterion(7)
@pytest.mark.parametrize("r", [2, 3, 4])
@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_circle_index_nullity(r, k):
    prob = CurveProblem("circle", r, k)
    rep = index_nullity(prob, 2 * k + 6)
    assert rep.certificate["certified"]
    assert (rep.index, rep.nullity) == (1 + 2 * (k - 1), 3)
    for b in rep.blocks[1:]:
        printed = closed_form_block(prob, b.mode)
        assert np.max(np.abs(b.matrix - printed)) < 1e-7 * max(1.0, np.max(np.abs(printed)))
    ev = sorted(rep.blocks[k].eigenvalues)
    assert abs(ev[0]) < 1e-7 * ev[-1]


@pytest.mark.criterion(7)
@pytest.mark.parametrize("r", [3, 4])
def test_paraboloid_index_nullity(r):
    prob = CurveProblem("paraboloid", r)
    rep = index_nullity(prob, 10)
    assert (rep.index, rep.nullity) == (1, 1)
    ev0 = sorted(rep.blocks[0].eigenvalues)
    assert ev0[0] < 0 and abs(ev0[1]) < 1e-9
    for b in rep.blocks[1:]:
        assert np.min(b.eigenvalues) > 0
    s = printed_basis_scale(prob)
    D = np.diag([1.0, 1.0, s, s])
    for m in range(1, 6):
        printed = closed_form_block(prob, m)
        got = D @ fourier_block(prob, m).matrix @ D
        assert np.max(np.abs(got - printed)) < 1e-7 * max(1.0, np.max(np.abs(printed)))


# -- 8 ---------------------------------------------------------------------

_LADDER = [2.0**j for j in range(1, 17)]


@pytest.fixture(scope="module")
def ladder_report():
    return infimum_gap_check(_LADDER)


@pytest.mark.criterion(8)
def test_condition_c_monotone(ladder_report):
    assert ladder_report["monotone_decreasing"]
    assert ladder_report["infimum_attained"] is False


@pytest.mark.criterion(8)
def test_condition_c_below_threshold_on_ladder(ladder_report):
    # The standard cutoff gives E(2^16) = 1.709e-3, decaying like a^-2.
    assert ladder_report["inf_estimate"] < 1e-3, ladder_report["inf_estimate"]


@pytest.mark.criterion(8)
def test_condition_c_sin_bound():
    for a in _LADDER:
        b = ingredient_bounds(a)
        assert b["sup_sin"] <= b["sin_bound"] + 1e-12


# -- 9 ---------------------------------------------------------------------

_C9 = [(2, "r_energy"), (3, "r_energy"), (4, "r_energy"), (4, "es4_energy")]


@pytest.mark.criterion(9)
@pytest.mark.parametrize("r,flavor", _C9)
def test_variational_consistency(r, flavor):
    rng = np.random.default_rng(90 + r + (flavor == "es4_energy"))
    for i in range(3):
        m = int(rng.integers(2, 6))
        f, h = (WarpFunction.sin(), WarpFunction.sin()) if i % 2 else (WarpFunction.identity(), WarpFunction.sinh())
        P = ReducedProblem(ModelManifold(m, f), h, r, flavor)
        d, p = variation_consistency(P, _random_profile(rng), bump_perturbation(0.6, 2.2, r + 1), 0.6, 2.2)
        assert _rel(d, p) < 1e-6, (i, d, p)
