"""Warped-product models, Christoffel symbols, and radial vector-field calculus.

Warp functions are written once over the generic algebra of :mod:`jets`, so
the same callable evaluates on floats, batched arrays, jets and duals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import jets as J
from .errors import DomainError, OrderTooLow, PoleError

__all__ = [
    "WarpFunction",
    "ModelManifold",
    "SurfaceOfRevolution",
    "space_form_sign",
    "rho_jet",
    "cut",
    "christoffel_model",
    "christoffel_surface",
    "radial_laplacian",
    "function_laplacian",
    "radial_divergence",
]


def _const_like(x, c: float):
    return x * 0.0 + c


@dataclass(frozen=True)
class WarpFunction:
    """A warp with its first two derivatives, each acting on any algebra element."""

    kind: str
    f: Callable
    df: Callable
    d2f: Callable
    interval: tuple[float, float] = (-math.inf, math.inf)
    param: float | None = None

    def __call__(self, x):
        return self.f(x)

    def eval(self, x0, K: int) -> J.Jet:
        return self.f(rho_jet(x0, K))

    @classmethod
    def identity(cls) -> "WarpFunction":
        return cls("identity", lambda x: x, lambda x: _const_like(x, 1.0), lambda x: _const_like(x, 0.0), (0.0, math.inf))

    @classmethod
    def sin(cls) -> "WarpFunction":
        return cls("sin", J.sin, J.cos, lambda x: -J.sin(x), (0.0, math.pi))

    @classmethod
    def sinh(cls) -> "WarpFunction":
        return cls("sinh", J.sinh, J.cosh, J.sinh, (0.0, math.inf))

    @classmethod
    def cosh(cls) -> "WarpFunction":
        return cls("cosh", J.cosh, J.sinh, J.cosh)

    @classmethod
    def constant(cls, c: float) -> "WarpFunction":
        if c <= 0:
            raise DomainError("a constant warp must be positive")
        return cls(
            "constant",
            lambda x: _const_like(x, c),
            lambda x: _const_like(x, 0.0),
            lambda x: _const_like(x, 0.0),
            param=c,
        )

    @classmethod
    def sqrt_one_plus_4sq(cls) -> "WarpFunction":
        return cls(
            "sqrt_one_plus_4sq",
            lambda x: J.sqrt(1.0 + 4.0 * x * x),
            lambda x: 4.0 * x / J.sqrt(1.0 + 4.0 * x * x),
            lambda x: 4.0 / J.power(1.0 + 4.0 * x * x, 1.5),
        )

    @classmethod
    def custom(cls, f: Callable, df: Callable, d2f: Callable, interval=(-math.inf, math.inf), kind="custom"):
        """User warp; all three callables must accept jets (no finite-difference fallback)."""
        return cls(kind, f, df, d2f, tuple(interval))

    @classmethod
    def scaled(cls, w: "WarpFunction", c: float) -> "WarpFunction":
        """``x -> c * w(x / c)``: the warp of the domain metric multiplied by c**2."""
        lo, hi = w.interval
        return cls(
            f"scaled({w.kind},{c})",
            lambda x: c * w.f(x / c),
            lambda x: w.df(x / c),
            lambda x: w.d2f(x / c) / c,
            (c * lo, c * hi),
            c,
        )

    def contains(self, x) -> bool:
        v = np.asarray(J.lead_value(x), dtype=float)
        lo, hi = self.interval
        return bool(np.all((v > lo) & (v < hi)))


def space_form_sign(h: WarpFunction) -> int:
    """+1 for sin, -1 for sinh, 0 for flat targets."""
    return {"sin": 1, "sinh": -1, "identity": 0, "constant": 0}.get(h.kind, 0)


def rho_jet(x0, K: int) -> J.Jet:
    """Identity jet of order K (K may be 0)."""
    return J.jet_var(x0, K) if K >= 1 else J.Jet(x0, [x0])


def cut(j, n: int):
    """Truncate a jet to order n; scalars pass through."""
    if isinstance(j, J.Jet) and j.order > n:
        return j.truncate(n)
    return j


@dataclass(frozen=True)
class ModelManifold:
    """``M_f``: S^{m-1} x I with metric f(rho)^2 g_S + d rho^2."""

    m: int
    f: WarpFunction
    interval: tuple[float, float] = field(default=None)

    def __post_init__(self):
        if self.m < 2:
            raise ValueError("model manifolds need m >= 2")
        if self.interval is None:
            object.__setattr__(self, "interval", self.f.interval)
        lo, hi = self.interval
        flo, fhi = self.f.interval
        if lo < flo or hi > fhi:
            raise DomainError("f must be positive on the declared interval")

    def check(self, rho) -> None:
        v = np.asarray(J.lead_value(rho), dtype=float)
        lo, hi = self.interval
        if not np.all((v > lo) & (v < hi)):
            raise DomainError(f"rho={v} lies outside {self.interval}")


@dataclass(frozen=True)
class SurfaceOfRevolution:
    """Metric f(alpha)^2 dw^2 + h(alpha)^2 d alpha^2."""

    f: WarpFunction
    h: WarpFunction
    domain: tuple[float, float] = (-math.inf, math.inf)


def christoffel_model(M: ModelManifold, rho: J.Jet) -> dict:
    """Nonzero symbols: ``Gamma^m_ij = -f f' (g_S)_ij`` (stored as -f f') and ``Gamma^j_im = f'/f``."""
    M.check(rho)
    f, df = M.f.f(rho), M.f.df(rho)
    return {"Gamma_m_ij": -f * df, "Gamma_j_im": df / f}


def christoffel_surface(S: SurfaceOfRevolution, alpha: J.Jet) -> dict:
    f = S.f.f(alpha)
    if np.any(np.asarray(J.lead_value(f)) == 0):
        raise PoleError("f(alpha) vanishes")
    h = S.h.f(alpha)
    return {
        "G1_12": S.f.df(alpha) / f,
        "G2_11": -f * S.f.df(alpha) / (h * h),
        "G2_22": S.h.df(alpha) / h,
    }


def _radial_setup(M: ModelManifold, F: J.Jet, drop: int, rho):
    if F.order < drop:
        raise OrderTooLow(f"need a jet of order >= {drop}")
    n = F.order - drop
    if rho is None:
        rho = rho_jet(F.base, n)
        M.check(rho)
    rho = cut(rho, n)
    f = M.f.f(rho)
    return n, f, M.f.df(rho) / f


def radial_laplacian(M: ModelManifold, h: WarpFunction, alpha: J.Jet, F: J.Jet, rho=None) -> J.Jet:
    """``L_Delta(F) = -[F'' + (m-1)(f'/f)F' - (m-1) F h'(alpha)^2 / f^2]``, order F.order-2."""
    n, f, fr = _radial_setup(M, F, 2, rho)
    d1 = F.derivative()
    d2 = d1.derivative()
    dh = h.df(cut(alpha, n))
    m1 = M.m - 1
    return -(d2 + m1 * fr * cut(d1, n) - m1 * cut(F, n) * dh * dh / (f * f))


def function_laplacian(M: ModelManifold, g: J.Jet, rho=None) -> J.Jet:
    """Positive radial Laplacian ``-(g'' + (m-1)(f'/f) g')``, order g.order-2."""
    n, f, fr = _radial_setup(M, g, 2, rho)
    d1 = g.derivative()
    return -(d1.derivative() + (M.m - 1) * fr * cut(d1, n))


def radial_divergence(M: ModelManifold, F: J.Jet, rho=None) -> J.Jet:
    """Divergence of the radial field F d/d rho: ``F' + (m-1)(f'/f) F``."""
    n, f, fr = _radial_setup(M, F, 1, rho)
    return F.derivative() + (M.m - 1) * fr * cut(F, n)
