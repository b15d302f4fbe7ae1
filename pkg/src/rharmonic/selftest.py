"""Fast invariant suite behind ``rharmonic self-test``.

Each check returns (name, ok, value, tolerance).
"""

from __future__ import annotations

import math

import numpy as np

from . import jets as J
from .closed_forms import (
    CylinderSolution,
    clifford_back_substitution,
    constant_solution_gate,
    cylinder_harmonicity,
    cylinder_problem,
    el_zero_verdict,
    hypersphere_critical,
    isometric_roots,
)
from .condition_c import es4_family_energy, ingredient_bounds
from .conformal_metrics import ConformalFactor, beta_blowup_scan, hat_tau4_explicit, hat_tau4_radial
from .equivariant import Profile, ReducedProblem, bump_perturbation, el_residual, tau4es_assembly, variation_consistency
from .geometry import ModelManifold, WarpFunction
from .numerics import PolyReal, Quadrature, integrate, real_roots
from .spectrum import CurveProblem, index_nullity


def _jets():
    x = J.jet_var(0.7, 6)
    err = max(abs(float(c)) for c in (J.log(J.exp(x)) - x).c)
    return "jets log(exp(x)) = x", err < 1e-13, err, 1e-13


def _quadrature():
    v = integrate(Quadrature.trapezoid(32), lambda g: np.cos(g) ** 2, 0.0, 2 * math.pi)
    return "periodic trapezoid", abs(v - math.pi) < 1e-13, abs(v - math.pi), 1e-13


def _roots():
    got = real_roots(PolyReal([-6.0, 11.0, -6.0, 1.0]), 0.0, 4.0)
    err = max(abs(a - b) for a, b in zip(got, (1.0, 2.0, 3.0)))
    return "cubic roots", len(got) == 3 and err < 1e-12, err, 1e-12


def _hypersphere():
    worst = 0.0
    for r in (2, 3, 4):
        P = ReducedProblem(ModelManifold(3, WarpFunction.constant(1.0)), WarpFunction.sin(), r)
        res = el_residual(P, Profile.constant(hypersphere_critical(r)), np.linspace(0.5, 2.0, 10)).residual
        worst = max(worst, float(np.max(np.abs(res))))
    return "hypersphere critical radius", worst < 1e-8, worst, 1e-8


def _clifford():
    roots = isometric_roots(1, 1, 5)
    want = [0.5 - 0.5 * math.sqrt(0.2), 0.5, 0.5 + 0.5 * math.sqrt(0.2)]
    err = max(abs(a - b) for a, b in zip(roots, want)) if len(roots) == 3 else math.inf
    err = max(err, max(abs(clifford_back_substitution(1, 2, 4, t)) for t in isometric_roots(1, 2, 4)))
    return "Clifford roots", err < 1e-10, err, 1e-10


def _constant():
    g8 = constant_solution_gate(8)
    err = abs(g8.roots_x[0] - (math.sqrt(921) - 23) / 28) if g8.roots_x else math.inf
    ok = not constant_solution_gate(7).admissible and err < 1e-10
    return "constant solutions m=8", ok, err, 1e-10


def _cylinder():
    m, r = 4, 2
    zero, v, _ = el_zero_verdict(cylinder_problem(m, r), Profile(J.log), np.linspace(1.0, 2.0, 20))
    ok = zero and cylinder_harmonicity(CylinderSolution("log_rho"), m, r)
    return "cylinder log rho, m=4 r=2", ok, v, 1e-9


def _assembly():
    P = ReducedProblem(ModelManifold(3, WarpFunction.sin()), WarpFunction.sin(), 4, "es4_energy")
    prof = Profile(lambda x: 0.4 + 0.3 * J.sin(x) + 0.1 * x * x)
    rho = 1.1
    el = float(el_residual(P, prof, rho).residual) / math.sin(rho) ** 2
    tau = float(tau4es_assembly(P, prof, rho))
    err = abs(tau + el) / max(1.0, abs(el))
    return "tau4ES assembly", err < 1e-7, err, 1e-7


def _hat_forms():
    cf = ConformalFactor(Profile(lambda x: 0.2 * J.cos(x) + 0.05 * J.cos(x) ** 2), 1, 5)
    a, b = float(hat_tau4_radial(cf, 1.2)), float(hat_tau4_explicit(cf, 1.2))
    err = abs(a - b) / max(1.0, abs(a))
    return "hat tau4 forms", err < 1e-8, err, 1e-8


def _beta():
    t = beta_blowup_scan(8, 0.0, 1.0).t_plus
    ok = t is not None and 0.39 <= abs(t) <= 0.49
    return "beta blow-up m=8", ok, t, None


def _spectrum():
    rep = index_nullity(CurveProblem("circle", 2, 1), 8)
    return "circle r=2 k=1 index/nullity", (rep.index, rep.nullity) == (1, 3), [rep.index, rep.nullity], None


def _condition_c():
    b = ingredient_bounds(10.0)
    ok = b["sup_sin"] <= b["sin_bound"] + 1e-12 and es4_family_energy(100.0) < es4_family_energy(10.0)
    return "condition C decay and sin bound", ok, b["sup_sin"], b["sin_bound"] + 1e-12


def _variation():
    P = ReducedProblem(ModelManifold(3, WarpFunction.sin()), WarpFunction.sin(), 2)
    prof = Profile(lambda x: 0.3 + 0.5 * J.sin(x))
    d, p = variation_consistency(P, prof, bump_perturbation(0.6, 2.2, 3), 0.6, 2.2)
    err = abs(d - p) / max(abs(p), 1e-300)
    return "variational consistency r=2", err < 1e-6, err, 1e-6


def run_checks() -> list:
    return [
        _jets,
        _quadrature,
        _roots,
        _hypersphere,
        _clifford,
        _constant,
        _cylinder,
        _assembly,
        _hat_forms,
        _beta,
        _spectrum,
        _condition_c,
        _variation,
    ]
