"""r-energies of closed curves ``gamma -> (w(gamma), alpha(gamma))`` in surfaces of revolution.

``T_2 = tau`` and ``T_{j+1} = nabla_{c'} T_j``; the r-energy is
``1/2 \\oint f(alpha)^2 T_{r,w}^2 + h(alpha)^2 T_{r,alpha}^2``.  On a circle
domain the r-energy and the ES-r-energy coincide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import jets as J
from .geometry import SurfaceOfRevolution, WarpFunction, cut, rho_jet
from .numerics import Quadrature, integrate

__all__ = [
    "CurveMap",
    "CurveField",
    "sphere_surface",
    "paraboloid_surface",
    "flat_plane",
    "circle_map",
    "circle_alpha_star",
    "paraboloid_alpha_star",
    "curve_tension",
    "curve_t_sequence",
    "curve_energy",
    "energy_density",
    "geodesic_reparam_tension",
]


def sphere_surface() -> SurfaceOfRevolution:
    return SurfaceOfRevolution(WarpFunction.sin(), WarpFunction.constant(1.0), (0.0, math.pi))


def paraboloid_surface() -> SurfaceOfRevolution:
    return SurfaceOfRevolution(WarpFunction.identity(), WarpFunction.sqrt_one_plus_4sq(), (0.0, math.inf))


def flat_plane() -> SurfaceOfRevolution:
    """Euclidean plane in polar coordinates (w angle, alpha radius)."""
    return SurfaceOfRevolution(WarpFunction.identity(), WarpFunction.constant(1.0), (0.0, math.inf))


def circle_alpha_star(r: int) -> float:
    return math.asin(1.0 / math.sqrt(r))


def paraboloid_alpha_star(r: int) -> float:
    if r < 3:
        raise ValueError("the paraboloid circle needs r >= 3")
    return 1.0 / (2.0 * math.sqrt(r - 2))


def _as_jet(x: J.Jet, value) -> J.Jet:
    return value if isinstance(value, J.Jet) and value._rank >= x._rank else x * 0.0 + value


@dataclass(frozen=True)
class CurveMap:
    """Components are callables on parameter jets; ``winding`` is the w-degree."""

    w: Callable
    alpha: Callable
    target: SurfaceOfRevolution
    winding: int = 0

    def jets(self, g0, K: int):
        x = rho_jet(g0, K)
        return _as_jet(x, self.w(x)), _as_jet(x, self.alpha(x))


@dataclass(frozen=True)
class CurveField:
    """Section ``V_w d/dw + V_alpha d/d alpha`` along a curve."""

    w: Callable
    alpha: Callable

    @classmethod
    def zero(cls) -> "CurveField":
        return cls(lambda x: x * 0.0, lambda x: x * 0.0)

    def jets(self, g0, K: int):
        x = rho_jet(g0, K)
        return _as_jet(x, self.w(x)), _as_jet(x, self.alpha(x))


def circle_map(target: SurfaceOfRevolution, k: int, alpha_star: float) -> CurveMap:
    return CurveMap(lambda x: k * x, lambda x: x * 0.0 + alpha_star, target, k)


# -- generic recursion ----------------------------------------------------


def _tension(S: SurfaceOfRevolution, w, a):
    n = a.order - 2
    w1, a1 = w.derivative(), a.derivative()
    an = cut(a, n)
    f, df, h, dh = S.f.f(an), S.f.df(an), S.h.f(an), S.h.df(an)
    w1n, a1n = cut(w1, n), cut(a1, n)
    tw = w1.derivative() + 2.0 * (df / f) * w1n * a1n
    ta = a1.derivative() - (f * df / (h * h)) * w1n * w1n + (dh / h) * a1n * a1n
    return tw, ta


def _step(S: SurfaceOfRevolution, w, a, Tw, Ta):
    n = Tw.order - 1
    an = cut(a, n)
    f, df, h, dh = S.f.f(an), S.f.df(an), S.h.f(an), S.h.df(an)
    w1, a1 = cut(w.derivative(), n), cut(a.derivative(), n)
    Twn, Tan = cut(Tw, n), cut(Ta, n)
    nw = Tw.derivative() + (df / f) * (Tan * w1 + Twn * a1)
    na = Ta.derivative() - (f * df / (h * h)) * Twn * w1 + (dh / h) * Tan * a1
    return nw, na


def _sequence(S: SurfaceOfRevolution, w, a, r: int) -> dict:
    T = {2: _tension(S, w, a)}
    for j in range(3, r + 1):
        T[j] = _step(S, w, a, *T[j - 1])
    return T


def energy_density(S: SurfaceOfRevolution, w, a, r: int):
    """``1/2 (f^2 T_w^2 + h^2 T_alpha^2)`` for jets of order >= r; returns the lead value."""
    Tw, Ta = _sequence(S, w, a, r)[r]
    an = cut(a, 0)
    f, h = S.f.f(an), S.h.f(an)
    return (0.5 * (f * f * cut(Tw, 0) * cut(Tw, 0) + h * h * cut(Ta, 0) * cut(Ta, 0))).c[0]


# -- public operations ----------------------------------------------------


def curve_tension(c: CurveMap, g0, K: int = 0):
    w, a = c.jets(g0, K + 2)
    return _tension(c.target, w, a)


def curve_t_sequence(c: CurveMap, g0, r: int, K: int = 0) -> dict:
    """``{j: (T_{j,w}, T_{j,alpha})}`` for j = 2..r at order K."""
    w, a = c.jets(g0, K + r)
    return {j: (cut(tw, K), cut(ta, K)) for j, (tw, ta) in _sequence(c.target, w, a, r).items()}


def curve_energy(c: CurveMap, r: int, q: Quadrature | None = None, flavor: str = "r_energy") -> float:
    if r < 2:
        raise ValueError("r must be >= 2")
    if flavor not in ("r_energy", "es_energy"):
        raise ValueError(f"unknown flavor {flavor!r}")
    q = q or Quadrature.trapezoid(64)

    def density(g):
        w, a = c.jets(g, r)
        return energy_density(c.target, w, a, r)

    return integrate(q, density, 0.0, 2 * math.pi)


def geodesic_reparam_tension(mu: Sequence[float], r: int) -> dict:
    """Reparametrized unit-speed geodesic ``phi(mu(s))``: ``tau_r = (-1)^{r-1} mu^{(2r)}(s) phi'(mu(s))``.

    ``mu`` holds ascending polynomial coefficients.  ``tau_r_coefficient`` is
    the factor at s = 0 and ``tau_r_polynomial`` the full factor in s.
    """
    poly = np.polynomial.Polynomial(list(mu)).trim()
    deg = poly.degree() if np.any(poly.coef) else 0
    factor = (-1) ** (r - 1) * poly.deriv(2 * r) if deg >= 2 * r else np.polynomial.Polynomial([0.0])
    r_harmonic = deg <= 2 * r - 1
    return {
        "tau_r_coefficient": float(factor(0.0)),
        "tau_r_polynomial": [float(x) for x in factor.coef],
        "r_harmonic": bool(r_harmonic),
        "proper": bool(r_harmonic and deg >= 2),
    }
