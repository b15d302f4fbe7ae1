"""ES-4-harmonic conformal metrics ``e^{2 gamma} g`` on space forms.

All operators act on radial quantities.  ``epsilon = +1`` uses f = sin on
(0, pi) and ``epsilon = -1`` uses f = sinh on (0, inf).  The identity map
has alpha = rho and h = f, so the rough Laplacian ``L_Delta`` of the geometry
module applies with ``h'(alpha) = f'(rho)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import jets as J
from .equivariant import Profile
from .errors import DomainError
from .geometry import ModelManifold, WarpFunction, cut, rho_jet
from .numerics import OdeOutcome, rk_integrate

__all__ = [
    "ConformalFactor",
    "BetaState",
    "STANDOFF",
    "tau_tilde",
    "hat_tau4_radial",
    "hat_tau4_explicit",
    "hat_tau4_at_state",
    "tau4_identity",
    "order7_structure",
    "gamma_ode_rhs",
    "sphere_ode_rhs",
    "hyperbolic_ode_rhs",
    "integrate_gamma_ode",
    "pole_regularity",
    "beta_rhs",
    "BetaScan",
    "beta_blowup_scan",
    "change_of_variables_check",
]

STANDOFF = 1e-3


@dataclass(frozen=True)
class ConformalFactor:
    gamma: Profile
    eps: int
    m: int

    def __post_init__(self):
        if self.eps not in (1, -1):
            raise ValueError("eps must be +1 or -1")
        if self.m < 3:
            raise ValueError("conformal factors need m >= 3")

    @property
    def warp(self) -> WarpFunction:
        return WarpFunction.sin() if self.eps == 1 else WarpFunction.sinh()

    @property
    def domain(self) -> ModelManifold:
        return ModelManifold(self.m, self.warp)

    def check(self, rho0, delta: float = STANDOFF) -> None:
        v = np.asarray(J.lead_value(rho0), dtype=float)
        hi = math.pi - delta if self.eps == 1 else math.inf
        if not np.all((v > delta) & (v < hi)):
            raise DomainError(f"rho={v} is within {delta} of a pole")


# -- radial operators with h = f ----------------------------------------


def _ops(cf: ConformalFactor, rho0, K: int):
    """(rho jet, gamma jet, f'/f jet) at order K."""
    cf.check(rho0)
    x = rho_jet(rho0, K)
    f = cf.warp
    fr = f.df(x) / f.f(x)
    return x, cf.gamma.eval(rho0, K), fr


def _LD(m: int, fr, F):
    """``-(F'' + (m-1)(f'/f)F' - (m-1) F (f'/f)^2)``, order F.order - 2."""
    n = F.order - 2
    d1 = F.derivative()
    frn = cut(fr, n)
    return -(d1.derivative() + (m - 1) * frn * cut(d1, n) - (m - 1) * cut(F, n) * frn * frn)


def _lap(m: int, fr, u):
    n = u.order - 2
    d1 = u.derivative()
    return -(d1.derivative() + (m - 1) * cut(fr, n) * cut(d1, n))


def _div(m: int, fr, F):
    n = F.order - 1
    return F.derivative() + (m - 1) * cut(fr, n) * cut(F, n)


def _tilde_lap(m: int, fr, g, F):
    """Conformal rough Laplacian ``e^{-2 gamma}(L_Delta F - (m-2) gamma' F')``."""
    n = F.order - 2
    g1 = cut(g.derivative(), n)
    return J.exp(-2.0 * cut(g, n)) * (_LD(m, fr, F) - (m - 2) * g1 * cut(F.derivative(), n))


def tau_tilde(cf: ConformalFactor, rho0, K: int = 0) -> J.Jet:
    """Radial component ``(m-2) e^{-2 gamma} gamma'`` at order K."""
    _, g, _ = _ops(cf, rho0, K + 1)
    g1 = g.derivative()
    return (cf.m - 2) * J.exp(-2.0 * cut(g, K)) * g1


def _hat_gamma_form(m: int, eps: int, fr, g):
    n = g.order - 3
    g1 = g.derivative()
    g2 = g1.derivative()
    g1n, g2n = cut(g1, n), cut(g2, n)
    lap = cut(_lap(m, fr, g), n)
    bracket = (
        (m - 1) * _LD(m, fr, g1)
        + (13 * m - 14) * g1n * g2n
        - ((m * m + 2 * m - 2) * lap - (m - 1) * (m * m - 4 * m - 32) * g1n * g1n + eps * (m - 1) ** 2) * g1n
    )
    return eps * eps * J.exp(-8.0 * cut(g, n)) * (m - 2) * bracket


def _hat_explicit_form(m: int, eps: int, fr, g):
    n = g.order - 3
    gn = cut(g, n + 2)
    T = (m - 2) * J.exp(-2.0 * gn) * cut(g.derivative(), n + 2)
    e4T = J.exp(-4.0 * gn) * T
    first = (m - 1) * eps * eps * _tilde_lap(m, fr, cut(g, n + 2), e4T)
    Tn, Td = cut(T, n), T.derivative()
    Td = cut(Td, n)
    g1 = cut(g.derivative(), n)
    e2 = J.exp(-2.0 * cut(g, n))
    rest = (
        (m - 2) * cut(_div(m, fr, T), n) * Tn
        + (m - 2) * Tn * Td
        + (m - 4) * Tn * Tn * g1
        + (m - 2) * (m - 4) * Tn * Tn * g1
        + 2 * Tn * Td
        - (m - 1) ** 2 * eps * e2 * Tn
    )
    return first + eps * eps * J.exp(-4.0 * cut(g, n)) * rest


def hat_tau4_radial(cf: ConformalFactor, rho0):
    """Radial component of hat tau_4 in the gamma form."""
    _, g, fr = _ops(cf, rho0, 3)
    return _hat_gamma_form(cf.m, cf.eps, fr, g).c[0]


def hat_tau4_explicit(cf: ConformalFactor, rho0):
    """Radial component of hat tau_4 through tau tilde and the conformal Laplacian."""
    _, g, fr = _ops(cf, rho0, 3)
    return _hat_explicit_form(cf.m, cf.eps, fr, g).c[0]


def hat_tau4_at_state(m: int, eps: int, rho0: float, state) -> float:
    """Gamma-form hat tau_4 from the values of gamma and its first three derivatives at rho0."""
    cf = ConformalFactor(Profile.constant(0.0), eps, m)
    cf.check(rho0)
    x = rho_jet(rho0, 3)
    fr = cf.warp.df(x) / cf.warp.f(x)
    g = J.Jet(rho0, [float(v) / math.factorial(j) for j, v in enumerate(state)])
    if g.order != 3:
        raise ValueError("state holds gamma and its first three derivatives")
    return float(_hat_gamma_form(m, eps, fr, g).c[0])


def _tau4_full(m: int, eps: int, fr, g):
    """``Dt^3 T + eps e^{-2 gamma}[(1-m) Dt^2 T - (T Y)' + div(Y) T + div(T) Y]`` with Y = Dt T."""
    K = g.order
    T = (m - 2) * J.exp(-2.0 * cut(g, K - 1)) * g.derivative()
    gT = cut(g, K - 1)
    Y = _tilde_lap(m, fr, gT, T)
    Y2 = _tilde_lap(m, fr, cut(g, K - 3), Y)
    Y3 = _tilde_lap(m, fr, cut(g, K - 5), Y2)
    n = K - 7
    Tn, Yc = cut(T, n + 1), cut(Y, n + 1)
    e2 = J.exp(-2.0 * cut(g, n))
    bracket = (
        (1 - m) * cut(Y2, n)
        - (Tn * Yc).derivative()
        + _div(m, fr, Yc) * cut(T, n)
        + _div(m, fr, Tn) * cut(Y, n)
    )
    return cut(Y3, n) + eps * e2 * bracket


def tau4_identity(cf: ConformalFactor, rho0):
    """Radial component of tau_4 of the identity into the conformal metric (a 7th-order expression)."""
    _, g, fr = _ops(cf, rho0, 7)
    return _tau4_full(cf.m, cf.eps, fr, g).c[0]


def order7_structure(cf: ConformalFactor, rho0, state) -> tuple[float, float]:
    """Coefficient of gamma^(7) in tau_4 at a state (gamma, gamma', ..., gamma^(7)), and the
    nonlinearity defect R(s + e7) - R(s) - coefficient (zero for an affine dependence)."""
    cf.check(rho0)
    state = [float(v) for v in state]
    if len(state) != 8:
        raise ValueError("state holds gamma and its first seven derivatives")
    x = rho_jet(rho0, 7)
    fr = cf.warp.df(x) / cf.warp.f(x)
    frd = J.Jet(rho0, [J.Dual(v, 0.0) for v in fr.c])

    def tau(top, seed):
        c = [J.Dual(state[j] / math.factorial(j), 0.0) for j in range(7)]
        c.append(J.Dual(top / math.factorial(7), seed / math.factorial(7)))
        return _tau4_full(cf.m, cf.eps, frd, J.Jet(rho0, c)).c[0]

    coef = float(tau(state[7], 1.0).tangent)
    defect = float(tau(state[7] + 1.0, 0.0).value - tau(state[7], 0.0).value - coef)
    return coef, defect


# -- ODE forms ------------------------------------------------------------


def gamma_ode_rhs(m: int, eps: int, rho: float, g1: float, g2: float) -> float:
    """``gamma'''`` from hat tau_4 = 0."""
    if eps == 1:
        if not STANDOFF <= rho <= math.pi - STANDOFF:
            raise DomainError("rho is at the singular locus of the sphere equation")
        fr = math.cos(rho) / math.sin(rho)
    else:
        if rho < STANDOFF:
            raise DomainError("rho is at the singular locus of the hyperbolic equation")
        fr = 1.0 / math.tanh(rho)
    return (
        (m * m - 4 * m - 32) * g1**3
        + (m * m + 2 * m - 2) * fr * g1 * g1
        - (m - 1) * fr * g2
        + g1 * ((m + 16) * g2 + (m - 1) * (fr * fr - eps))
    )


def sphere_ode_rhs(m: int, rho: float, g1: float, g2: float) -> float:
    return gamma_ode_rhs(m, 1, rho, g1, g2)


def hyperbolic_ode_rhs(m: int, rho: float, g1: float, g2: float) -> float:
    return gamma_ode_rhs(m, -1, rho, g1, g2)


def integrate_gamma_ode(m: int, eps: int, rho0: float, state, rho1: float, rel_tol: float = 1e-11) -> OdeOutcome:
    """Integrate (gamma, gamma', gamma'') from rho0 to rho1."""
    rhs = lambda t, y: np.array([y[1], y[2], gamma_ode_rhs(m, eps, t, y[1], y[2])])
    return rk_integrate(rhs, list(state), rho0, rho1, rel_tol)


def pole_regularity(gamma: Profile, K: int = 7, tol: float = 1e-9, poles=(0.0, math.pi)) -> dict:
    """Odd derivatives up to order K at each pole; ``regular`` when all are below tol."""
    out = {}
    for p in poles:
        j = gamma.eval(p, K)
        out[p] = [float(J.lead_value(j.c[k])) * math.factorial(k) for k in range(1, K + 1, 2)]
    out["regular"] = all(abs(v) < tol for p in poles for v in out[p])
    return out


@dataclass(frozen=True)
class BetaState:
    t: float
    beta: float
    dbeta: float

    def check(self, eps: int = 1, delta: float = STANDOFF) -> None:
        if eps == 1 and abs(abs(self.t) - 1.0) < delta:
            raise DomainError("t is at the singular locus t = +-1")
        if eps == -1 and self.t <= 1.0 + delta:
            raise DomainError("the hyperbolic branch needs t > 1")


def beta_rhs(m: int, s: BetaState) -> float:
    if abs(abs(s.t) - 1.0) < 1e-14:
        raise DomainError("t = +-1 is singular")
    q = s.t / (s.t * s.t - 1.0)
    b, bp = s.beta, s.dbeta
    return (
        (m * m - 4 * m - 32) * b**3
        + (m * m + 3 * m + 14) * q * b * b
        + b * ((m + 16) * bp + (m - 2) / (s.t * s.t - 1.0))
        - (m + 2) * q * bp
    )


@dataclass
class BetaScan:
    forward: OdeOutcome
    backward: OdeOutcome

    @property
    def t_plus(self) -> float | None:
        return self.forward.t_escape

    @property
    def t_minus(self) -> float | None:
        return self.backward.t_escape


def beta_blowup_scan(
    m: int,
    beta0: float,
    dbeta0: float,
    t0: float = 0.0,
    t_range: tuple[float, float] = (-1.0 + STANDOFF, 1.0 - STANDOFF),
    rel_tol: float = 1e-10,
    escape: float = 1e8,
) -> BetaScan:
    """Integrate the beta equation from t0 towards both ends of ``t_range``."""
    BetaState(t0, beta0, dbeta0).check()
    lo, hi = t_range
    if not lo < t0 < hi:
        raise ValueError("t0 must lie inside t_range")
    rhs = lambda t, y: np.array([y[1], beta_rhs(m, BetaState(t, y[0], y[1]))])
    fwd = rk_integrate(rhs, [beta0, dbeta0], t0, hi, rel_tol, escape)
    bwd = rk_integrate(rhs, [beta0, dbeta0], t0, lo, rel_tol, escape)
    return BetaScan(fwd, bwd)


def change_of_variables_check(
    m: int, eps: int, state, rho0: float | None = None, rho1: float | None = None, rel_tol: float = 1e-11
) -> float:
    """Transport a gamma-ODE trajectory to beta; max of |beta'' - beta_rhs| / max(1, |beta''|).

    With t = cos rho (sphere) or t = cosh rho (hyperbolic), beta = gamma'/t'.
    ``state`` is (gamma, gamma', gamma'') at rho0; the trajectory must stay finite.
    """
    if rho0 is None:
        rho0, rho1 = (0.5 * math.pi, 2.5) if eps == 1 else (1.0, 2.0)
    out = integrate_gamma_ode(m, eps, rho0, state, rho1, rel_tol)
    if out.status != "completed":
        raise DomainError(f"gamma trajectory ended with {out.status} at rho={out.t_final}")
    worst = 0.0
    for rho, y in out.samples:
        g1, g2 = float(y[1]), float(y[2])
        g3 = gamma_ode_rhs(m, eps, rho, g1, g2)
        x = rho_jet(rho, 3)
        t = J.cos(x) if eps == 1 else J.cosh(x)
        dt = t.derivative()
        beta = J.Jet(rho, [g1, g2, 0.5 * g3]) / dt
        bp = beta.derivative() / cut(dt, 1)
        bpp = bp.derivative() / cut(dt, 0)
        lhs = bpp.c[0]
        worst = max(worst, abs(lhs - beta_rhs(m, BetaState(t.c[0], beta.c[0], bp.c[0]))) / max(1.0, abs(lhs)))
    return worst

