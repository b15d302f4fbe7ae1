"""Closed-form criteria: hypersphere and Clifford densities, the Clifford cubic,
the constant-solution gate, and the cylinder (conformal diffeomorphism) catalog.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import jets as J
from .equivariant import Profile, ReducedProblem, el_residual, el_residual_mp, tension_tau_alpha
from .geometry import ModelManifold, WarpFunction, cut, function_laplacian, rho_jet
from .numerics import PolyReal, real_roots

__all__ = [
    "CliffordParams",
    "CylinderSolution",
    "ConstantGate",
    "ConformalSweep",
    "hypersphere_density",
    "hypersphere_critical",
    "clifford_density",
    "clifford_polynomial",
    "isometric_roots",
    "general_clifford_condition",
    "clifford_back_substitution",
    "constant_solution_cubic",
    "constant_solution_gate",
    "constant_residual_scan",
    "cylinder_laplacian_power",
    "radial_laplacian_exact",
    "cylinder_harmonicity",
    "cylinder_is_harmonic",
    "cylinder_power_by_jets",
    "cylinder_problem",
    "el_zero_verdict",
    "almansi_check",
    "conformal_profile",
    "conformal_nonexistence_sweep",
]


def hypersphere_density(r: int, alpha):
    """``sin^2 a cos^{2(r-1)} a``; generic over floats, arrays and jets."""
    c = J.cos(alpha)
    return J.sin(alpha) ** 2 * c ** (2 * (r - 1))


def hypersphere_critical(r: int) -> float:
    if r < 2:
        raise ValueError("r must be >= 2")
    return math.asin(1.0 / math.sqrt(r))


@dataclass(frozen=True)
class CliffordParams:
    p: int
    q: int
    R1: float
    R2: float
    r: int

    def __post_init__(self):
        if self.p < 1 or self.q < 1:
            raise ValueError("p, q must be >= 1")
        if self.R1 <= 0 or self.R2 <= 0 or abs(self.R1**2 + self.R2**2 - 1.0) > 1e-12:
            raise ValueError("need positive radii with R1^2 + R2^2 = 1")
        if self.r < 2:
            raise ValueError("r must be >= 2")

    @classmethod
    def isometric(cls, p: int, q: int, r: int, t: float) -> "CliffordParams":
        """Radii with R1^2 = t."""
        return cls(p, q, math.sqrt(t), math.sqrt(1.0 - t), r)


def clifford_density(c: CliffordParams, alpha):
    s, co = J.sin(alpha), J.cos(alpha)
    a, b = c.p / c.R1**2, c.q / c.R2**2
    return s * s * co * co * (a * co * co + b * s * s) ** (c.r - 2)


def clifford_polynomial(p: int, q: int, r: int) -> PolyReal:
    """``r(p+q)t^3 + [q-p-r(q+2p)]t^2 + (2p+rp)t - p``."""
    if p < 1 or q < 1 or r < 2:
        raise ValueError("need p, q >= 1 and r >= 2")
    return PolyReal([-p, 2 * p + r * p, q - p - r * (q + 2 * p), r * (p + q)])


def isometric_roots(p: int, q: int, r: int) -> list[float]:
    return [t for t in real_roots(clifford_polynomial(p, q, r), 0.0, 1.0) if 0.0 < t < 1.0]


def general_clifford_condition(p, q, R1: float, R2: float, r: int, alpha):
    a, b = p / R1**2, q / R2**2
    s2 = J.sin(alpha) ** 2
    return a + ((r - 1) * (b - a) - 2 * a) * s2 + r * (a - b) * s2 * s2


def clifford_back_substitution(p: int, q: int, r: int, t: float) -> float:
    """General condition at the isometric configuration R1^2 = t, sin^2 alpha = t."""
    c = CliffordParams.isometric(p, q, r, t)
    return float(general_clifford_condition(p, q, c.R1, c.R2, r, math.asin(c.R1)))


# -- constant solutions on the punctured ball into the sphere ----------------


def constant_solution_cubic(m: int) -> PolyReal:
    """The cubic in ``x = cos(2 alpha*)`` for constant ES-4 solutions."""
    return PolyReal(
        [
            1060 * m**3 - 18084 * m**2 + 96252 * m - 159868,
            512 * m**3 - 6368 * m**2 + 21856 * m - 16000,
            100 * m**3 - 724 * m**2 + 1148 * m - 524,
            8 * m**3 - 24 * m**2 + 24 * m - 8,
        ]
    )


@dataclass
class ConstantGate:
    m: int
    roots_x: list
    alpha_star: list
    all_roots_x: list
    cubic_roots_x: list

    @property
    def admissible(self) -> bool:
        return bool(self.roots_x)


_EDGE = 1e-9


def constant_solution_gate(m: int) -> ConstantGate:
    """Admissible x in (-1, 1) from the closed-form roots; the cubic is solved independently."""
    if m < 3:
        raise ValueError("m must be >= 3")
    xs = [(17.0 - 5.0 * m) / (m - 1)]
    disc = -199 * m**2 + 2882 * m - 9399
    if disc >= 0:
        base = (-15 * m**2 + 112 * m - 97) / (m - 1) ** 2
        d = math.sqrt(disc) / (m - 1)
        xs += [0.25 * (base - d), 0.25 * (base + d)]
    ok = sorted(x for x in xs if -1.0 + _EDGE < x < 1.0 - _EDGE)
    cubic = [x for x in real_roots(constant_solution_cubic(m), -1.0, 1.0) if -1.0 + _EDGE < x < 1.0 - _EDGE]
    return ConstantGate(m, ok, [0.5 * math.acos(x) for x in ok], sorted(xs), cubic)


def _ball_to_sphere(m: int, flavor: str) -> ReducedProblem:
    return ReducedProblem(ModelManifold(m, WarpFunction.identity()), WarpFunction.sin(), 4, flavor)


def constant_residual_scan(m: int, n: int = 10_000, flavor: str = "es4_energy", rho0: float = 1.0):
    """EL residual of constant profiles on an alpha grid in (0, pi/2); returns (alphas, residuals, zeros).

    ``zeros`` are the sign changes of the residual refined linearly.
    """
    alphas = np.linspace(0.0, 0.5 * math.pi, n + 2)[1:-1]
    P = _ball_to_sphere(m, flavor)
    res = np.asarray(el_residual(P, Profile(lambda x: x * 0.0 + alphas, "constant grid"), rho0).residual)
    idx = np.nonzero(np.sign(res[:-1]) * np.sign(res[1:]) < 0)[0]
    zeros = [float(alphas[i] - res[i] * (alphas[i + 1] - alphas[i]) / (res[i + 1] - res[i])) for i in idx]
    return alphas, res, zeros


# -- cylinder catalog ---------------------------------------------------------


def cylinder_laplacian_power(m: int, r: int) -> int:
    """Coefficient of rho^{-2r} in ``Delta^{r-1} T_2`` for alpha = log rho."""
    if m < 2 or r < 1:
        raise ValueError("need m >= 2 and r >= 1")
    prod = 1
    for k in range(1, r + 1):
        prod *= m - 2 * k
    return 2 ** (r - 1) * math.factorial(r - 1) * prod


def radial_laplacian_exact(expr: dict, m: int) -> dict:
    """Positive radial Laplacian on R^m of ``sum c * rho^p * log(rho)^q`` given as {(p, q): c}."""
    out: dict = {}

    def add(key, val):
        if val:
            out[key] = out.get(key, 0) + val

    for (p, q), c in expr.items():
        add((p - 2, q), -c * (p * (p - 1) + (m - 1) * p))
        if q >= 1:
            add((p - 2, q - 1), -c * q * (2 * p + m - 2))
        if q >= 2:
            add((p - 2, q - 2), -c * q * (q - 1))
    return {k: v for k, v in out.items() if v != 0}


@dataclass(frozen=True)
class CylinderSolution:
    """Radial profiles into S^{m-1} x R; ``rprime`` is set for the ``rho_pow`` form."""

    form: str
    rprime: int | None = None

    FORMS = ("log_rho", "rho_sq", "rho_sq_log_rho", "rho_pow")

    def __post_init__(self):
        if self.form not in self.FORMS:
            raise ValueError(f"unknown form {self.form!r}")
        if (self.form == "rho_pow") != (self.rprime is not None):
            raise ValueError("rprime is required exactly for rho_pow")
        if self.rprime is not None and self.rprime < 2:
            raise ValueError("rprime must be >= 2")

    def expr(self, m: int) -> dict:
        if self.form == "log_rho":
            return {(0, 1): Fraction(1)}
        if self.form == "rho_sq":
            return {(2, 0): Fraction(1)}
        if self.form == "rho_sq_log_rho":
            return {(2, 1): Fraction(1)}
        return {(2 * self.rprime - m, 0): Fraction(1)}

    def profile(self, m: int) -> Profile:
        if self.form == "log_rho":
            return Profile(J.log, "log rho")
        if self.form == "rho_sq":
            return Profile(lambda x: x * x, "rho^2")
        if self.form == "rho_sq_log_rho":
            return Profile(lambda x: x * x * J.log(x), "rho^2 log rho")
        p = 2 * self.rprime - m
        return Profile(lambda x: x**p if p >= 0 else 1.0 / x ** (-p), f"rho^{p}")

    def validity(self, m: int, r: int) -> bool:
        """Catalog predicate for r-harmonicity."""
        if self.form == "log_rho":
            return m % 2 == 0 and r >= m // 2
        if self.form == "rho_sq":
            return r >= 2
        if self.form == "rho_sq_log_rho":
            return m % 2 == 0 and r >= m // 2 + 1
        return r >= self.rprime


def _laplacian_power(expr: dict, m: int, n: int) -> dict:
    for _ in range(n):
        expr = radial_laplacian_exact(expr, m)
    return expr


def cylinder_harmonicity(sol: CylinderSolution, m: int, r: int) -> bool:
    """Exact verdict ``Delta^r alpha == 0``; the EL operator is then ``-Delta^r alpha``."""
    return not _laplacian_power(sol.expr(m), m, r)


def cylinder_is_harmonic(sol: CylinderSolution, m: int) -> bool:
    return not _laplacian_power(sol.expr(m), m, 1)


def cylinder_problem(m: int, r: int, flavor: str = "r_energy") -> ReducedProblem:
    """R^m minus the origin into S^{m-1} x R."""
    return ReducedProblem(ModelManifold(m, WarpFunction.identity()), WarpFunction.constant(1.0), r, flavor)


def el_zero_verdict(P: ReducedProblem, alpha: Profile, rho, tol: float = 1e-9, nonzero: float = 1e-3):
    """(is_zero, max |residual|, precision) with a precision ladder.

    Extended precision first; values strictly between ``tol`` and ``nonzero``
    are recomputed with mpmath at 40 digits.
    """
    rho = np.asarray(rho, dtype=np.longdouble)
    v = float(np.max(np.abs(el_residual(P, alpha, rho).residual)))
    prec = "longdouble"
    if tol <= v <= nonzero:
        v = float(np.max(np.abs(el_residual_mp(P, alpha, rho).residual)))
        prec = "mpmath40"
    return v < tol, v, prec


def _iterated_laplacian(M: ModelManifold, g: J.Jet, n: int) -> J.Jet:
    for _ in range(n):
        g = function_laplacian(M, g)
    return g


def cylinder_power_by_jets(m: int, r: int, rho0=1.7):
    """``Delta^{r-1} T_2 * rho^{2r}`` for alpha = log rho by jet iteration.

    Pass an ``np.longdouble`` rho0 to carry the iteration in extended precision.
    """
    P = ReducedProblem(ModelManifold(m, WarpFunction.identity()), WarpFunction.constant(1.0), max(r, 2))
    T2 = tension_tau_alpha(P, Profile(J.log), rho0, 2 * (r - 1))
    return _iterated_laplacian(P.domain, T2, r - 1).c[0] * rho0 ** (2 * r)


def almansi_check(u: Profile, m: int, r: int, rho0) -> tuple:
    """(``Delta^r u``, ``Delta^{r+1}(rho^2 u)``) at rho0 by jet iteration on R^m."""
    M = ModelManifold(m, WarpFunction.identity())
    a = u.eval(rho0, 2 * r + 2)
    x = rho_jet(rho0, 2 * r + 2)
    return (
        _iterated_laplacian(M, cut(a, 2 * r), r).c[0],
        _iterated_laplacian(M, x * x * a, r + 1).c[0],
    )


# -- conformal profiles -------------------------------------------------------

_TARGETS = {"flat": WarpFunction.identity, "sphere": WarpFunction.sin, "hyperbolic": WarpFunction.sinh}


def conformal_profile(domain: ModelManifold, target: str, rho_init: float, alpha_init: float, rel_tol=1e-12) -> Profile:
    """Solution of ``alpha' = h(alpha) / f(rho)`` through (rho_init, alpha_init)."""
    h = _TARGETS[target]()
    f = domain.f
    return Profile.from_first_order_ode(
        lambda rho, a: h.f(a) / f.f(rho), rho_init, alpha_init, rel_tol, f"conformal into {target}"
    )


@dataclass
class ConformalSweep:
    target: str
    m: int
    r: int
    flavor: str
    rho: np.ndarray
    residuals: np.ndarray

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.residuals)))


def conformal_nonexistence_sweep(
    domain: ModelManifold,
    target: str,
    r: int,
    rho_range: tuple[float, float] = (0.5, 2.0),
    points: int = 50,
    rho_init: float = 1.0,
    alpha_init: float | None = None,
    flavor: str = "r_energy",
) -> ConformalSweep:
    """EL residual along the conformal solution at ``points`` radii.

    The default start keeps the solution finite on the default range: pi/2 into
    the sphere, 1 into flat space, 1/2 into hyperbolic space.
    """
    if target not in _TARGETS:
        raise ValueError(f"target must be one of {sorted(_TARGETS)}")
    if alpha_init is None:
        alpha_init = {"sphere": 0.5 * math.pi, "flat": 1.0, "hyperbolic": 0.5}[target]
    prof = conformal_profile(domain, target, rho_init, alpha_init)
    P = ReducedProblem(domain, _TARGETS[target](), r, flavor)
    rho = np.linspace(*rho_range, points)
    return ConformalSweep(target, domain.m, r, flavor, rho, np.asarray(el_residual(P, prof, rho).residual))
