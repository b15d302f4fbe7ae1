"""Quadrature, adaptive Runge-Kutta with blow-up detection, polynomial roots, Jacobi eigenvalues."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DegreeTooHigh, NonFiniteSample, NotSymmetric

__all__ = [
    "Quadrature",
    "integrate",
    "integrate_radial",
    "RadialIntegral",
    "OdeOutcome",
    "rk_integrate",
    "PolyReal",
    "real_roots",
    "sym_eigen",
]


# -- quadrature -----------------------------------------------------------


@dataclass(frozen=True)
class Quadrature:
    """``kind`` is ``gauss_legendre`` or ``periodic_trapezoid``."""

    kind: str
    n: int

    def __post_init__(self):
        if self.kind not in ("gauss_legendre", "periodic_trapezoid"):
            raise ValueError(f"unknown quadrature kind {self.kind!r}")
        if self.n < 2:
            raise ValueError("quadrature needs n >= 2")

    @classmethod
    def gauss(cls, n: int) -> "Quadrature":
        return cls("gauss_legendre", n)

    @classmethod
    def trapezoid(cls, n: int) -> "Quadrature":
        return cls("periodic_trapezoid", n)

    def nodes_weights(self, a: float = 0.0, b: float = 2 * np.pi):
        if self.kind == "periodic_trapezoid":
            x = a + (b - a) * np.arange(self.n) / self.n
            return x, np.full(self.n, (b - a) / self.n)
        x, w = np.polynomial.legendre.leggauss(self.n)
        half = 0.5 * (b - a)
        return a + half * (x + 1.0), half * w


def _checked(values) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(v)):
        raise NonFiniteSample("integrand returned a non-finite value")
    return v


def integrate(q: Quadrature, f: Callable, a: float = 0.0, b: float = 2 * np.pi) -> float:
    """Apply ``q`` to the vectorized integrand ``f`` on [a, b]; periodic kinds use one period."""
    if q.kind == "gauss_legendre" and not a < b:
        raise ValueError("integration bounds must satisfy a < b")
    x, w = q.nodes_weights(a, b)
    return float(np.dot(w, _checked(f(x))))


@dataclass(frozen=True)
class RadialIntegral:
    value: float
    panels: int
    rel_change: float


def _composite(f: Callable, a: float, b: float, n: int, panels: int) -> float:
    x, w = np.polynomial.legendre.leggauss(n)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    nodes = (edges[:-1, None] + half[:, None] * (x[None, :] + 1.0)).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return float(np.dot(weights, _checked(f(nodes))))


def integrate_radial(
    f: Callable, a: float, b: float, n: int = 12, rtol: float = 1e-9, panels: int = 4, max_panels: int = 4096
) -> RadialIntegral:
    """Composite Gauss-Legendre, doubling panels until two resolutions agree to ``rtol``."""
    if not a < b:
        raise ValueError("integration bounds must satisfy a < b")
    prev = _composite(f, a, b, n, panels)
    while True:
        panels *= 2
        cur = _composite(f, a, b, n, panels)
        change = abs(cur - prev) / max(abs(cur), 1e-300)
        if change <= rtol or abs(cur - prev) <= 1e-300 or panels >= max_panels:
            return RadialIntegral(cur, panels, change)
        prev = cur


# -- adaptive Runge-Kutta (Dormand-Prince 5(4)) ---------------------------

_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])


@dataclass
class OdeOutcome:
    """``status`` is ``completed``, ``blow_up`` or ``step_underflow``."""

    status: str
    samples: list = field(default_factory=list)
    t_escape: float | None = None
    rel_tol: float = 0.0
    escape: float = 0.0
    steps: int = 0

    @property
    def t_final(self) -> float:
        return self.samples[-1][0]

    @property
    def y_final(self) -> np.ndarray:
        return self.samples[-1][1]


def rk_integrate(
    rhs: Callable,
    y0: Sequence[float],
    t0: float,
    t1: float,
    rel_tol: float = 1e-10,
    escape: float = 1e8,
    max_steps: int = 500_000,
) -> OdeOutcome:
    """Integrate ``y' = rhs(t, y)`` from t0 to t1 (either direction).

    Blow-up is declared when ``|y|_inf > escape`` and the accepted step then
    collapses below ``1e-12 |t1 - t0|``; a collapse without escape is reported
    as ``step_underflow``.
    """
    if not 1e-14 < rel_tol < 1e-2:
        raise ValueError("rel_tol must lie in (1e-14, 1e-2)")
    y = np.atleast_1d(np.asarray(y0, dtype=float)).copy()
    k1 = np.asarray(rhs(t0, y), dtype=float)
    if not np.all(np.isfinite(k1)):
        raise NonFiniteSample("right-hand side is not finite at the initial point")
    span = abs(t1 - t0)
    direction = 1.0 if t1 >= t0 else -1.0
    floor = 1e-12 * span
    h = 1e-3 * span if span > 0 else 0.0
    t = t0
    out = OdeOutcome("completed", [(t, y.copy())], rel_tol=rel_tol, escape=escape)
    escaped_at = None
    while direction * (t1 - t) > 0:
        if out.steps >= max_steps:
            raise RuntimeError("rk_integrate exceeded its step budget")
        h = min(h, abs(t1 - t))
        k = [k1]
        ok = True
        for i in range(1, 7):
            yi = y + direction * h * sum(a * kj for a, kj in zip(_A[i], k))
            ki = np.asarray(rhs(t + direction * _C[i] * h, yi), dtype=float)
            if not np.all(np.isfinite(ki)):
                ok = False
                break
            k.append(ki)
        if ok:
            K = np.array(k)
            y5 = y + direction * h * (_B5 @ K)
            y4 = y + direction * h * (_B4 @ K)
            scale = rel_tol * np.maximum(np.maximum(np.abs(y), np.abs(y5)), 1.0)
            err = float(np.max(np.abs(y5 - y4) / scale))
            ok = np.isfinite(err) and np.all(np.isfinite(y5))
        if ok and err <= 1.0:
            t = t + direction * h
            y = y5
            k1 = k[6]
            out.steps += 1
            out.samples.append((t, y.copy()))
            if escaped_at is None and np.max(np.abs(y)) > escape:
                escaped_at = t
            fac = 5.0 if err == 0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
        else:
            fac = 0.2 if not ok else max(0.1, 0.9 * err ** -0.25)
        h *= fac
        if h < floor and direction * (t1 - t) > floor:
            out.status = "blow_up" if escaped_at is not None else "step_underflow"
            out.t_escape = t if escaped_at is not None else None
            return out
    return out


# -- polynomials ----------------------------------------------------------


class PolyReal:
    """Dense real polynomial, ascending coefficients, trimmed at 1e-14."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[float]):
        c = [float(x) for x in coeffs]
        scale = max((abs(x) for x in c), default=0.0)
        while len(c) > 1 and abs(c[-1]) <= 1e-14 * max(scale, 1.0):
            c.pop()
        self.coeffs = c or [0.0]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        acc = 0.0 * np.asarray(x, dtype=float)
        for a in reversed(self.coeffs):
            acc = acc * x + a
        return acc

    def magnitude(self, x: float) -> float:
        return sum(abs(a) * abs(x) ** i for i, a in enumerate(self.coeffs))

    def derivative(self) -> "PolyReal":
        return PolyReal([i * a for i, a in enumerate(self.coeffs)][1:] or [0.0])

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyReal) and self.coeffs == other.coeffs

    def __repr__(self) -> str:
        return f"PolyReal({self.coeffs})"


def _refine(p: PolyReal, dp: PolyReal, a: float, b: float) -> float:
    fa = p(a)
    for _ in range(200):
        mid = 0.5 * (a + b)
        fm = p(mid)
        if fm == 0.0 or b - a <= 1e-15 * max(1.0, abs(mid)):
            break
        if (fm < 0) == (fa < 0):
            a, fa = mid, fm
        else:
            b = mid
    x = 0.5 * (a + b)
    for _ in range(4):
        d = dp(x)
        if d == 0:
            break
        nx = x - p(x) / d
        if not a - 1e-12 <= nx <= b + 1e-12:
            break
        x = nx
    return float(x)


def real_roots(p: PolyReal, lo: float, hi: float) -> list[float]:
    """All distinct real roots of ``p`` in the open interval (lo, hi)."""
    if not isinstance(p, PolyReal):
        p = PolyReal(p)
    if p.degree > 8:
        raise DegreeTooHigh(f"degree {p.degree} exceeds 8")
    if p.degree <= 0:
        return []
    dp = p.derivative()
    crit = real_roots(dp, lo, hi) if p.degree > 1 else []
    pts = [lo] + crit + [hi]
    roots: list[float] = []
    for c in crit:
        if abs(p(c)) <= 1e-12 * max(p.magnitude(c), 1e-300):
            roots.append(c)
    for a, b in zip(pts[:-1], pts[1:]):
        fa, fb = p(a), p(b)
        if fa == 0.0 or fb == 0.0:
            continue
        if (fa < 0) != (fb < 0):
            roots.append(_refine(p, dp, a, b))
    roots = sorted(x for x in roots if lo < x < hi)
    merged: list[float] = []
    for x in roots:
        if merged and abs(x - merged[-1]) <= 1e-10 * max(1.0, abs(x)):
            continue
        merged.append(x)
    return merged


# -- symmetric eigenvalues ------------------------------------------------


def sym_eigen(M, vectors: bool = False, sweeps: int = 50):
    """Ascending eigenvalues of a small symmetric matrix by cyclic Jacobi rotations."""
    A = np.array(M, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NotSymmetric("matrix must be square")
    n = A.shape[0]
    norm = np.max(np.abs(A)) if A.size else 0.0
    if np.max(np.abs(A - A.T), initial=0.0) >= 1e-9 * max(norm, 1e-300) and norm > 0:
        raise NotSymmetric("matrix is not symmetric")
    A = 0.5 * (A + A.T)
    Q = np.eye(n)
    for _ in range(sweeps):
        off = np.sqrt(np.sum(np.triu(A, 1) ** 2))
        if off <= 1e-15 * max(norm, 1e-300):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if A[p, q] == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * A[p, q])
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0)) if theta != 0 else 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                J = np.eye(n)
                J[p, p] = J[q, q] = c
                J[p, q] = s
                J[q, p] = -s
                A = J.T @ A @ J
                Q = Q @ J
    w = np.diag(A).copy()
    order = np.argsort(w)
    if vectors:
        return w[order], Q[:, order]
    return w[order]
