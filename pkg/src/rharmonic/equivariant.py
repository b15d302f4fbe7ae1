"""Reduced r-energies of rotationally symmetric maps ``(w, rho) -> (w, alpha(rho))``.

The Lagrangian is written once over generic jets.  For the Euler-Lagrange
residual it is evaluated on a *formal* alpha-jet whose coefficients are the
slot variables ``u_j / j!``; each slot is itself a dual number over the
rho-jet of ``alpha^(j)``.  Formal differentiation then realises the total
derivative ``D = d/drho + sum u_{j+1} d/du_j`` while the dual tangent yields
``dL/du_i`` as a rho-jet, ready for ``d^i/drho^i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import mpmath
import numpy as np

from . import jets as J
from .geometry import (
    ModelManifold,
    WarpFunction,
    cut,
    radial_divergence,
    radial_laplacian,
    rho_jet,
    space_form_sign,
)
from .numerics import Quadrature, _composite, integrate, integrate_radial, rk_integrate
from .errors import DomainError, PoleError

__all__ = [
    "Profile",
    "ReducedProblem",
    "ELReport",
    "sphere_volume",
    "tension_tau_alpha",
    "t_sequence",
    "lagrangian",
    "lagrangian_parts",
    "reduced_energy",
    "el_residual",
    "el_residual_mp",
    "tau4es_assembly",
    "divergence_identity",
    "bump_perturbation",
    "variation_consistency",
    "CRITICAL_TOL",
]

CRITICAL_TOL = 1e-8


def sphere_volume(m: int) -> float:
    """Volume of the unit sphere S^{m-1} in R^m."""
    return 2.0 * math.pi ** (m / 2) / math.gamma(m / 2)


@dataclass(frozen=True)
class Profile:
    """A jet-evaluable scalar function; ``fn`` maps an identity jet to a jet."""

    fn: Callable
    description: str = "custom"

    def eval(self, rho0, K: int) -> J.Jet:
        x = rho_jet(rho0, K)
        out = self.fn(x)
        if not isinstance(out, J.Jet):
            out = x * 0.0 + out
        return out

    def __call__(self, rho):
        return self.fn(rho)

    @classmethod
    def constant(cls, c: float) -> "Profile":
        return cls(lambda x: x * 0.0 + c, f"constant {c!r}")

    @classmethod
    def from_first_order_ode(
        cls, rhs: Callable, rho_init: float, alpha_init: float, rel_tol: float = 1e-12, description: str = "ode"
    ) -> "Profile":
        """Solution of ``alpha' = rhs(rho, alpha)``; higher jets come from differentiating ``rhs``."""
        return cls(_OdeFn(rhs, rho_init, alpha_init, rel_tol), description)


@dataclass(frozen=True)
class _OdeFn:
    rhs: Callable
    rho_init: float
    alpha_init: float
    rel_tol: float

    def values(self, rho0) -> np.ndarray:
        pts = np.atleast_1d(np.asarray(rho0, dtype=float))
        out = np.empty_like(pts)
        f = lambda t, y: np.array([self.rhs(t, y[0])])
        for side in (pts >= self.rho_init, pts < self.rho_init):
            idx = np.nonzero(side)[0]
            idx = idx[np.argsort(np.abs(pts[idx] - self.rho_init))]
            t, y = self.rho_init, self.alpha_init
            for i in idx:
                if pts[i] != t:
                    res = rk_integrate(f, [y], t, pts[i], self.rel_tol, escape=1e12)
                    if res.status != "completed":
                        raise DomainError(f"profile ODE failed ({res.status}) before rho={pts[i]}")
                    t, y = pts[i], float(res.y_final[0])
                out[i] = y
        return out if np.ndim(rho0) else out[0]

    def __call__(self, x):
        if not isinstance(x, J.Jet):
            return self.values(x)
        a0 = self.values(x.base)
        a = J.Jet(x.base, [a0])
        for k in range(x.order):
            a = self.rhs(rho_jet(x.base, k), a).integral(a0)
        return a


@dataclass(frozen=True)
class ReducedProblem:
    """``flavor`` is ``r_energy`` or ``es4_energy`` (the latter needs r = 4)."""

    domain: ModelManifold
    h: WarpFunction
    r: int
    flavor: str = "r_energy"

    def __post_init__(self):
        if self.r < 2:
            raise ValueError("order r must be >= 2")
        if self.flavor not in ("r_energy", "es4_energy"):
            raise ValueError(f"unknown flavor {self.flavor!r}")
        if self.flavor == "es4_energy" and self.r != 4:
            raise ValueError("es4_energy requires r = 4")

    @property
    def m(self) -> int:
        return self.domain.m


@dataclass
class ELReport:
    rho0: float
    residual: float
    residual_parts: dict = field(default_factory=dict)
    input_jet_order: int = 0
    tolerance: float = CRITICAL_TOL

    @property
    def critical(self) -> bool:
        return bool(np.all(np.abs(self.residual) < self.tolerance))


# -- generic formula layer (rho, a: jets of equal order) ------------------


def _tension(P: ReducedProblem, rho, a):
    n = a.order - 2
    a1 = a.derivative()
    a2 = a1.derivative()
    rr = cut(rho, n)
    f = P.domain.f.f(rr)
    if np.any(np.asarray(J.lead_value(f)) == 0):
        raise PoleError("domain warp vanishes")
    fr = P.domain.f.df(rr) / f
    an = cut(a, n)
    m1 = P.m - 1
    return a2 + m1 * fr * cut(a1, n) - m1 * P.h.f(an) * P.h.df(an) / (f * f)


def _even_chain(P: ReducedProblem, rho, a, upto: int) -> dict:
    """T_2, T_4, ... up to ``upto`` as jets of decreasing order."""
    T = {2: _tension(P, rho, a)}
    for j in range(4, upto + 1, 2):
        T[j] = -radial_laplacian(P.domain, P.h, a, T[j - 2], rho=rho)
    return T


def _odd_square(P: ReducedProblem, rho, a, T):
    n = T.order - 1
    rr = cut(rho, n)
    f = P.domain.f.f(rr)
    dh = P.h.df(cut(a, n))
    Td = T.derivative()
    Tn = cut(T, n)
    return Td * Td + (P.m - 1) * dh * dh * Tn * Tn / (f * f)


def _sequence(P: ReducedProblem, rho, a, upto: int) -> dict:
    T = _even_chain(P, rho, a, upto - (upto % 2))
    out = dict(T)
    for j in range(3, upto + 1, 2):
        out[j] = _odd_square(P, rho, a, T[j - 1])
    return out


def _lagrangian_parts(P: ReducedProblem, rho, a):
    """(main, extra) Lagrangian jets at order ``a.order - r``; extra is the ES-4 curvature term."""
    r = P.r
    n = a.order - r
    seq = _sequence(P, rho, a, r)
    Tr = cut(seq[r], n)
    sq = Tr * Tr if r % 2 == 0 else Tr
    f = P.domain.f.f(cut(rho, n))
    V = f ** (P.m - 1)
    main = 0.5 * sq * V
    if P.flavor != "es4_energy":
        return main, None
    tau = cut(seq[2], n)
    ad = cut(a.derivative(), n)
    d2h = P.h.d2f(cut(a, n))
    extra = 0.5 * (P.m - 1) * ad * ad * tau * tau * d2h * d2h / (f * f) * V
    return main, extra


# -- public operations ----------------------------------------------------


def _prepare(P: ReducedProblem, alpha: Profile, rho0, K: int):
    P.domain.check(rho0)
    return rho_jet(rho0, K), alpha.eval(rho0, K)


def tension_tau_alpha(P: ReducedProblem, alpha: Profile, rho0, K: int = 0) -> J.Jet:
    rho, a = _prepare(P, alpha, rho0, K + 2)
    return _tension(P, rho, a)


def t_sequence(P: ReducedProblem, alpha: Profile, rho0, upto: int | None = None, K: int = 0) -> dict:
    """``{j: T_j}`` for j = 2..upto at order K; odd j hold the square ``T_j**2``."""
    upto = P.r if upto is None else upto
    rho, a = _prepare(P, alpha, rho0, K + upto)
    return {j: cut(t, K) for j, t in _sequence(P, rho, a, upto).items()}


def lagrangian_parts(P: ReducedProblem, alpha: Profile, rho0):
    rho, a = _prepare(P, alpha, rho0, P.r)
    main, extra = _lagrangian_parts(P, rho, a)
    return main.c[0], (0.0 if extra is None else extra.c[0])


def lagrangian(P: ReducedProblem, alpha: Profile, rho0):
    main, extra = lagrangian_parts(P, alpha, rho0)
    return main + extra


def reduced_energy(
    P: ReducedProblem,
    alpha: Profile,
    a: float,
    b: float,
    q: Quadrature | None = None,
    vol: bool = True,
    rtol: float = 1e-11,
) -> float:
    """``Vol(S^{m-1}) * integral_a^b L``; adaptive composite Gauss when ``q`` is None."""
    L = lambda x: lagrangian(P, alpha, x)
    val = integrate(q, L, a, b) if q is not None else integrate_radial(L, a, b, rtol=rtol).value
    return sphere_volume(P.m) * val if vol else val


def el_residual(P: ReducedProblem, alpha: Profile, rho0) -> ELReport:
    """Exact Euler-Lagrange residual at ``rho0`` (vectorizes over an array of points)."""
    P.domain.check(rho0)
    r = P.r
    a = alpha.eval(rho0, 2 * r)
    slots = []
    for j in range(r + 1):
        slots.append(cut(a, r))
        if j < r:
            a = a.derivative()
    rho_out = rho_jet(rho0, r)
    zeros = [s * 0.0 for s in slots]
    totals = [0.0, 0.0]
    for i in range(r + 1):
        u = [J.Dual(s, z + 1.0 if j == i else z) for j, (s, z) in enumerate(zip(slots, zeros))]
        formal_a = J.Jet(rho0, [u[j] / math.factorial(j) for j in range(r + 1)])
        formal_rho = J.Jet(rho0, [J.Dual(rho_out, zeros[0]), 1.0] + [0.0] * (r - 1))
        for k, part in enumerate(_lagrangian_parts(P, formal_rho, formal_a)):
            if part is not None:
                totals[k] = totals[k] + (-1) ** i * J.total_derivative(part.c[0].tangent, i)
    parts = {"r_energy": totals[0]}
    if P.flavor == "es4_energy":
        parts = {"tau4": totals[0], "hat_tau4": totals[1]}
    return ELReport(rho0, totals[0] + totals[1], parts, 2 * r)


def el_residual_mp(P: ReducedProblem, alpha: Profile, rho0, dps: int = 40) -> ELReport:
    """:func:`el_residual` carried out in mpmath arithmetic at ``dps`` digits.

    Residuals come back as floats.  The alpha callable must use the jet
    elementary functions so that its coefficients stay in mpmath.
    """
    with mpmath.workdps(dps):
        pts = np.array([mpmath.mpf(str(float(x))) for x in np.atleast_1d(rho0)], dtype=object)
        rep = el_residual(P, alpha, pts)
        as_float = lambda v: np.array([float(x) for x in np.atleast_1d(v)])
        res = as_float(rep.residual)
        parts = {k: as_float(v) for k, v in rep.residual_parts.items()}
    if np.ndim(rho0) == 0:
        res, parts = res[0], {k: v[0] for k, v in parts.items()}
    return ELReport(rho0, res, parts, rep.input_jet_order)


def tau4es_assembly(P: ReducedProblem, alpha: Profile, rho0):
    """d/d alpha component of tau_4^ES from the space-form operator expressions."""
    eps = space_form_sign(P.h)
    if eps == 0 or P.r != 4:
        raise ValueError("assembly needs r = 4 and a sphere or hyperbolic target")
    M, h, m1 = P.domain, P.h, P.m - 1
    rho, a = _prepare(P, alpha, rho0, 8)
    tau = _tension(P, rho, a)
    L1 = radial_laplacian(M, h, a, tau, rho=rho)
    L2 = radial_laplacian(M, h, a, L1, rho=rho)
    L3 = radial_laplacian(M, h, a, L2, rho=rho)

    def at(n):
        rr, an = cut(rho, n), cut(a, n)
        return M.f.f(rr), M.f.df(rr), h.f(an), h.df(an), cut(a.derivative(), n), cut(tau, n)

    f, df, hh, dh, ad, t = at(0)
    A = L3 - eps * m1 * cut(L2, 0) * hh * hh / (f * f) + 2 * eps * m1 * cut(L1, 0) * t * hh * dh / (f * f)

    f6, _, h6, _, ad6, t6 = at(6)
    G = -2 * m1 * t6 * h6 * h6 * ad6 * ad6 / (f6 * f6)
    C = 0.5 * (cut(radial_laplacian(M, h, a, G, rho=rho), 0) - eps * m1 * hh * hh * cut(G, 0) / (f * f))

    f1, _, h1, _, ad1, t1 = at(1)
    W = (h1 * h1 * ad1 * t1 * t1 / (f1 * f1)).derivative()
    B = -m1 * (-t * t * ad * ad * hh * dh / (f * f) + m1 * df * hh * hh * ad * t * t / (f * f * f) + W)
    return (A - B - C).c[0]


def divergence_identity(P: ReducedProblem, alpha: Profile, rho0):
    """(div Z, tau^2 + <d phi, nabla tau>) for Z = tau alpha' d/d rho."""
    rho, a = _prepare(P, alpha, rho0, 3)
    tau = _tension(P, rho, a)
    ad = cut(a.derivative(), 1)
    lhs = radial_divergence(P.domain, tau * ad, rho=rho).c[0]
    f = P.domain.f.f(cut(rho, 0))
    an = cut(a, 0)
    t0 = tau.c[0]
    rhs = t0 * t0 + ad.c[0] * tau.derivative().c[0] + (P.m - 1) * t0 * (P.h.f(an) * P.h.df(an) / (f * f)).c[0]
    return lhs, rhs


def bump_perturbation(a: float, b: float, order: int) -> Profile:
    """``((rho - a)(b - rho))^order`` scaled to peak 1; vanishes to ``order`` at both ends."""
    scale = (0.25 * (b - a) ** 2) ** order
    return Profile(lambda x: ((x - a) * (b - x)) ** order / scale, f"bump^{order} on [{a}, {b}]")


def variation_consistency(
    P: ReducedProblem, alpha: Profile, v: Profile, a: float, b: float, h: float = 1e-3, n: int = 16, panels: int = 16
) -> tuple[float, float]:
    """(discrete first variation of the reduced energy, integral of EL * v), both without Vol.

    The first entry is a Richardson-extrapolated central difference over a
    fixed composite Gauss rule; ``v`` must vanish to order r at a and b.
    """

    def energy(t):
        prof = Profile(lambda x: alpha.fn(x) + t * v.fn(x), "perturbed")
        return _composite(lambda x: lagrangian(P, prof, x), a, b, n, panels)

    d = lambda s: (energy(s) - energy(-s)) / (2 * s)
    discrete = (4 * d(0.5 * h) - d(h)) / 3
    predicted = _composite(lambda x: el_residual(P, alpha, x).residual * v(x), a, b, n, panels)
    return discrete, predicted
