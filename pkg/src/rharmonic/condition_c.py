"""Failure of Condition (C) for the ES-4 energy on the flat torus.

The degree-one family ``alpha_a = 2 atan(a rho) + xi(rho)(pi - 2 atan(a rho))``
is harmonic on the unit disc, constant (= pi) beyond rho = 2, and its
energy ``2 pi * integral_1^2 L_4^ES`` tends to 0 as a grows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import jets as J
from .equivariant import Profile, ReducedProblem, lagrangian, reduced_energy
from .geometry import ModelManifold, WarpFunction
from .numerics import Quadrature

__all__ = [
    "smooth_step_exp",
    "CutoffXi",
    "FamilyMember",
    "family_problem",
    "es4_family_energy",
    "inner_energy",
    "ingredient_bounds",
    "seam_jump",
    "decay_exponent",
    "infimum_gap_check",
]


def _lead_array(x):
    return np.asarray(J.lead_value(x), dtype=float)


def smooth_step_exp(x, c: float = 1.0):
    """``exp(-c/x)`` for x > 0 and 0 otherwise; evaluates on floats, arrays and jets."""
    lead = _lead_array(x)
    mask = lead > 0
    if not np.any(mask):
        return x * 0.0
    if isinstance(x, J.Jet):
        safe = J.Jet(x.base, [np.where(mask, x.c[0], 1.0)] + list(x.c[1:]))
        y = J.exp(-c / safe)
        return J.Jet(x.base, [np.where(mask, ci, 0.0) if np.ndim(mask) else (ci if mask else 0.0 * ci) for ci in y.c])
    safe = np.where(mask, x, 1.0)
    return np.where(mask, np.exp(-c / safe), 0.0)


@dataclass(frozen=True)
class CutoffXi:
    """``xi = E_l(rho - 1) / (E_l(rho - 1) + E_r(2 - rho))`` with ``E_c(x) = exp(-c/x)``."""

    c_left: float = 1.0
    c_right: float = 1.0

    @classmethod
    def standard(cls) -> "CutoffXi":
        return cls(1.0, 1.0)

    @classmethod
    def variant(cls) -> "CutoffXi":
        """Asymmetric and steeper on the right."""
        return cls(0.5, 2.0)

    def __call__(self, rho):
        A = smooth_step_exp(rho - 1.0, self.c_left)
        B = smooth_step_exp(2.0 - rho, self.c_right)
        return A / (A + B)


@dataclass(frozen=True)
class FamilyMember:
    a: float
    xi: CutoffXi = CutoffXi()

    def __post_init__(self):
        if not self.a > 1:
            raise ValueError("the family needs a > 1")

    def alpha(self, rho):
        base = 2.0 * J.atan(self.a * rho)
        return base + self.xi(rho) * (math.pi - base)

    @property
    def profile(self) -> Profile:
        return Profile(self.alpha, f"alpha_a a={self.a!r}")


def family_problem() -> ReducedProblem:
    """m = 2, f = rho, h = sin, ES-4 flavor."""
    return ReducedProblem(ModelManifold(2, WarpFunction.identity()), WarpFunction.sin(), 4, "es4_energy")


def es4_family_energy(a: float, q: Quadrature | None = None, xi: CutoffXi | None = None, rtol: float = 1e-10) -> float:
    """``2 pi * integral_1^2 L_4^ES`` of alpha_a."""
    fm = FamilyMember(a, xi or CutoffXi())
    return reduced_energy(family_problem(), fm.profile, 1.0, 2.0, q, vol=True, rtol=rtol)


def inner_energy(a: float, lo: float = 0.1, xi: CutoffXi | None = None) -> float:
    """Energy over [lo, 1], where alpha_a is harmonic."""
    fm = FamilyMember(a, xi or CutoffXi())
    return reduced_energy(family_problem(), fm.profile, lo, 1.0, vol=True, rtol=1e-10)


def ingredient_bounds(a: float, xi: CutoffXi | None = None, n: int = 2001) -> dict:
    """Sampled suprema on [1, 2] of |sin alpha_a| and |alpha_a^(i)|, i = 1..4, with the sin bound."""
    fm = FamilyMember(a, xi or CutoffXi())
    rho = np.linspace(1.0, 2.0, n)
    j = fm.profile.eval(rho, 4)
    return {
        "sup_sin": float(np.max(np.abs(np.sin(j.c[0])))),
        "sin_bound": 2.0 * a / (1.0 + a * a),
        "sup_derivatives": {i: float(np.max(np.abs(j.c[i]))) * math.factorial(i) for i in range(1, 5)},
    }


def seam_jump(a: float, h: float = 1e-4, xi: CutoffXi | None = None) -> tuple[float, float]:
    """(|L(1+h) - L(1-h)|, local scale max(|L(1+-h)|, |L(1+2h)|)) for L_4^ES."""
    prof = FamilyMember(a, xi or CutoffXi()).profile
    P = family_problem()
    lm, lp, lf = (float(lagrangian(P, prof, x)) for x in (1.0 - h, 1.0 + h, 1.0 + 2 * h))
    return abs(lp - lm), max(abs(lm), abs(lp), abs(lf))


def decay_exponent(a_list, energies) -> float:
    """Least-squares slope of log E against log a."""
    x, y = np.log(np.asarray(a_list, dtype=float)), np.log(np.asarray(energies, dtype=float))
    return float(np.polyfit(x, y, 1)[0])


def infimum_gap_check(a_list, xi: CutoffXi | None = None, energies=None) -> dict:
    """Energies along ``a_list`` with the infimum estimate; the infimum 0 is never attained.

    Precomputed ``energies`` (one per a) skip the quadrature.
    """
    a_list = list(a_list)
    if not a_list:
        raise ValueError("a_list must not be empty")
    if energies is None:
        energies = [es4_family_energy(a, xi=xi) for a in a_list]
    elif len(energies) != len(a_list):
        raise ValueError("need one energy per a")
    energies = [float(e) for e in energies]
    diffs = np.diff(energies)
    return {
        "a": a_list,
        "energy": energies,
        "inf_estimate": float(min(energies)),
        "monotone_decreasing": bool(np.all(diffs < 0.01 * np.abs(np.asarray(energies[:-1])))),
        "decay_exponent": decay_exponent(a_list, energies) if len(a_list) > 1 else None,
        "infimum_attained": False,
        "note": "energy 0 would force a harmonic map, and there is none of degree one on the torus",
    }
