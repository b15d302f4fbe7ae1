"""Second variation of curve r-energies: Fourier blocks, index and nullity.

Directional derivatives use dual numbers inside the jet coefficients.  Mixed
second derivatives use a bidual ``Dual(Dual(x, W), Dual(V, 0))`` whose
``tangent.tangent`` part is the ``eps_t eps_s`` coefficient.  Stacking several
sections along leading array axes yields a whole Hessian block in one pass.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import jets as J
from .curves import (
    CurveField,
    CurveMap,
    circle_alpha_star,
    circle_map,
    energy_density,
    paraboloid_alpha_star,
    paraboloid_surface,
    sphere_surface,
)
from .errors import CertificateFailure, NotCriticalWarning
from .numerics import Quadrature, sym_eigen

__all__ = [
    "CurveProblem",
    "FourierBlock",
    "SpectrumReport",
    "first_variation",
    "hessian_pair",
    "hessian_matrix",
    "mode_basis",
    "fourier_block",
    "closed_form_block",
    "closed_form_eigenvalues",
    "printed_basis_scale",
    "index_nullity",
]


@dataclass(frozen=True)
class CurveProblem:
    """``circle`` (phi_{r,k} into S^2) or ``paraboloid`` (w = gamma at alpha*)."""

    kind: str
    r: int
    k: int = 1

    def __post_init__(self):
        if self.kind not in ("circle", "paraboloid"):
            raise ValueError(f"unknown problem {self.kind!r}")
        if self.kind == "paraboloid" and self.k != 1:
            raise ValueError("the paraboloid problem has k = 1")

    @property
    def target(self):
        return sphere_surface() if self.kind == "circle" else paraboloid_surface()

    @property
    def alpha_star(self) -> float:
        return circle_alpha_star(self.r) if self.kind == "circle" else paraboloid_alpha_star(self.r)

    @property
    def curve(self) -> CurveMap:
        return circle_map(self.target, self.k, self.alpha_star)


def _nodes(q: Quadrature | None, n: int):
    q = q or Quadrature.trapezoid(n)
    if q.kind != "periodic_trapezoid":
        raise ValueError("closed curves use the periodic trapezoid rule")
    return q.nodes_weights(0.0, 2 * math.pi)


def _stack(fields: Sequence[CurveField], g, K: int):
    """Coefficient arrays of the section jets, shape (len(fields), len(g)) per order."""
    ws, als = zip(*(fld.jets(g, K) for fld in fields))
    cw = [np.array([np.broadcast_to(j.c[i], g.shape) for j in ws]) for i in range(K + 1)]
    ca = [np.array([np.broadcast_to(j.c[i], g.shape) for j in als]) for i in range(K + 1)]
    return cw, ca


def first_variation(c: CurveMap, r: int, V: CurveField, q: Quadrature | None = None) -> float:
    """``d/dt E_r(c + tV)`` at t = 0."""
    return float(_first_variations(c, r, [V], q)[0])


def _first_variations(c: CurveMap, r: int, fields, q=None) -> np.ndarray:
    g, wts = _nodes(q, 64)
    w, a = c.jets(g, r)
    vw, va = _stack(fields, g, r)
    wd = J.Jet(g, [J.Dual(np.broadcast_to(w.c[i], g.shape), vw[i]) for i in range(r + 1)])
    ad = J.Jet(g, [J.Dual(np.broadcast_to(a.c[i], g.shape), va[i]) for i in range(r + 1)])
    return energy_density(c.target, wd, ad, r).tangent @ wts


def hessian_matrix(c: CurveMap, r: int, V: Sequence[CurveField], W: Sequence[CurveField], q=None) -> np.ndarray:
    """``H[i, j] = d^2/dt ds E_r(c + t V_i + s W_j)`` at the origin."""
    g, wts = _nodes(q, 64)
    w, a = c.jets(g, r)
    vw, va = _stack(V, g, r)
    uw, ua = _stack(W, g, r)

    def bidual(x, tv, tw):
        return J.Jet(
            g,
            [
                J.Dual(J.Dual(np.broadcast_to(x.c[i], g.shape), tw[i][None, :, :]), J.Dual(tv[i][:, None, :], 0.0))
                for i in range(r + 1)
            ],
        )

    dens = energy_density(c.target, bidual(w, vw, uw), bidual(a, va, ua), r)
    return np.asarray(dens.tangent.tangent) @ wts


def hessian_pair(c: CurveMap, r: int, V: CurveField, W: CurveField, q=None, check: bool = True) -> float:
    if check:
        fv = max(abs(first_variation(c, r, V, q)), abs(first_variation(c, r, W, q)))
        if fv > 1e-8:
            warnings.warn(f"first variation {fv:.3e} is not zero", NotCriticalWarning, stacklevel=2)
    return float(hessian_matrix(c, r, [V], [W], q)[0, 0])


def _trig(m: int, kind: str, scale: float):
    if m == 0:
        return lambda x: x * 0.0 + scale
    fn = J.cos if kind == "cos" else J.sin
    return lambda x: scale * fn(m * x)


def _zero(x):
    return x * 0.0


def mode_basis(problem: CurveProblem, m: int) -> tuple[list[CurveField], list[str]]:
    """L^2-orthonormal sections of frequency m for the metric f^2 dw^2 + h^2 d alpha^2."""
    S, a = problem.target, problem.alpha_star
    fs, hs = float(S.f.f(a)), float(S.h.f(a))
    if m == 0:
        s = 1.0 / math.sqrt(2 * math.pi)
        return (
            [CurveField(_trig(0, "cos", s / fs), _zero), CurveField(_zero, _trig(0, "cos", s / hs))],
            ["dw", "dalpha"],
        )
    s = 1.0 / math.sqrt(math.pi)
    return (
        [
            CurveField(_trig(m, "cos", s / fs), _zero),
            CurveField(_trig(m, "sin", s / fs), _zero),
            CurveField(_zero, _trig(m, "cos", s / hs)),
            CurveField(_zero, _trig(m, "sin", s / hs)),
        ],
        ["cos dw", "sin dw", "cos dalpha", "sin dalpha"],
    )


@dataclass
class FourierBlock:
    mode: int
    matrix: np.ndarray
    basis: list
    eigenvalues: np.ndarray = field(default=None)

    def __post_init__(self):
        M = np.asarray(self.matrix)
        if np.max(np.abs(M - M.T)) > 1e-9 * max(np.max(np.abs(M)), 1.0):
            raise ValueError("Fourier block is not symmetric")
        self.matrix = 0.5 * (M + M.T)
        if self.eigenvalues is None:
            self.eigenvalues = sym_eigen(self.matrix)


def fourier_block(problem: CurveProblem, m: int, q: Quadrature | None = None) -> FourierBlock:
    basis, labels = mode_basis(problem, m)
    q = q or Quadrature.trapezoid(4 * m + 16)
    H = hessian_matrix(problem.curve, problem.r, basis, basis, q)
    return FourierBlock(m, H, labels)


def printed_basis_scale(problem: CurveProblem) -> float:
    """Ratio of the printed d/d alpha section to the unit one.

    The paraboloid r = 3 block is printed for ``cos(m gamma) d/d alpha / (2 sqrt(pi))``,
    whose norm is h(alpha*)/2 = 1/sqrt(2), so printed = D H D with D = diag(1, 1, s, s).
    """
    if problem.kind == "paraboloid" and problem.r == 3:
        return 1.0 / float(problem.target.h.f(problem.alpha_star))
    return 1.0


def closed_form_block(problem: CurveProblem, m: int) -> np.ndarray | None:
    """Printed A, B, C block for m >= 1 (basis as in :func:`printed_basis_scale`), or None."""
    r, k = problem.r, problem.k
    if m < 1:
        return None
    if problem.kind == "circle":
        if r == 2:
            A, B, C = m**2 * (3 * k**2 + m**2), m**4 + 2 * m**2 * k**2 - k**4, 2 * math.sqrt(2) * k * m**3
        elif r == 3:
            A = m**2 * (20 * k**4 + 30 * m**2 * k**2 + 3 * m**4) / 3
            B = (-8 * k**6 + 21 * m**2 * k**4 + 84 * m**4 * k**2 + 9 * m**6) / 9
            C = math.sqrt(2 / 3) * k * m**3 * (35 * k**2 + 18 * m**2) / 3
        elif r == 4:
            A = m**2 * (189 * k**6 + 630 * m**2 * k**4 + 336 * m**4 * k**2 + 16 * m**6) / 16
            B = (-54 * k**8 + 171 * m**2 * k**6 + 2020 * m**4 * k**4 + 1312 * m**6 * k**2 + 64 * m**8) / 64
            C = math.sqrt(3) * k * m**3 * (399 * k**4 + 644 * m**2 * k**2 + 128 * m**4) / 32
        else:
            return None
    else:
        if r == 3:
            A = m**2 * (15 + 30 * m**2 + 4 * m**4) / 4
            B = (-2 + 21 * m**2 + 112 * m**4 + 16 * m**6) / 32
            C = m**3 * (35 + 24 * m**2) / 8
        elif r == 4:
            A = m**2 * (224 + 840 * m**2 + 504 * m**4 + 27 * m**6) / 27
            B = (-64 + 456 * m**2 + 6060 * m**4 + 4428 * m**6 + 243 * m**8) / 243
            C = 2 * math.sqrt(2 / 3) * m**3 * (266 + 483 * m**2 + 108 * m**4) / 27
        else:
            return None
    return np.array([[A, 0, 0, -C], [0, A, C, 0], [0, C, B, 0], [-C, 0, 0, B]], dtype=float)


def closed_form_eigenvalues(problem: CurveProblem, m: int) -> tuple[float, float] | None:
    """Printed (lambda^-, lambda^+) for m >= 1 where the text gives them."""
    r, k = problem.r, problem.k
    if problem.kind == "circle" and r == 2:
        base = -(k**4) + 2 * m**4 + 5 * k**2 * m**2
        disc = math.sqrt(k**8 + 2 * k**6 * m**2 + k**4 * m**4 + 32 * k**2 * m**6)
        return 0.5 * (base - disc), 0.5 * (base + disc)
    if problem.kind == "circle" and r == 3:
        base = -8 * k**6 + 81 * k**4 * m**2 + 174 * k**2 * m**4 + 18 * m**6
        disc = math.sqrt(
            64 * k**12 + 624 * k**10 * m**2 + 1617 * k**8 * m**4 + 29868 * k**6 * m**6
            + 30276 * k**4 * m**8 + 7776 * k**2 * m**10
        )
        return (base - disc) / 18, (base + disc) / 18
    if problem.kind == "paraboloid" and r == 3:
        base = -2 + 141 * m**2 + 352 * m**4 + 48 * m**6
        disc = math.sqrt(
            4 + 396 * m**2 + 10313 * m**4 + 103808 * m**6 + 127072 * m**8 + 40960 * m**10 + 256 * m**12
        )
        return (base - disc) / 64, (base + disc) / 64
    if problem.kind == "paraboloid" and r == 4:
        base = -32 + 1236 * m**2 + 6810 * m**4 + 4482 * m**6 + 243 * m**8
        disc = 2 * math.sqrt(
            256 + 12480 * m**2 + 164100 * m**4 + 4114188 * m**6 + 14037309 * m**8
            + 15720480 * m**10 + 5634441 * m**12 + 629856 * m**14
        )
        return (base - disc) / 243, (base + disc) / 243
    return None


@dataclass
class SpectrumReport:
    problem: CurveProblem
    blocks: list
    index: int
    nullity: int
    M_max: int
    null_tol: float
    certificate: dict
    first_variation_max: float


def index_nullity(
    problem: CurveProblem, M_max: int, null_tol: float = 1e-6, require_certificate: bool = True
) -> SpectrumReport:
    """Count negative and zero eigenvalues over modes 0..M_max with a growth certificate on the tail."""
    if M_max < problem.k + 3:
        raise ValueError("M_max must be at least k + 3")
    blocks = [fourier_block(problem, m) for m in range(M_max + 1)]
    index = nullity = 0
    for b in blocks:
        scale = max(1.0, float(np.max(np.abs(b.eigenvalues))))
        for lam in b.eigenvalues:
            if abs(lam) < null_tol * scale:
                nullity += 1
            elif lam < 0:
                index += 1
    tail = [float(np.min(b.eigenvalues)) for b in blocks[-3:]]
    certified = all(t > 0 for t in tail) and tail[0] < tail[1] < tail[2]
    cert = {"tail_min_eigenvalues": tail, "growth_ratio": tail[2] / tail[1] if tail[1] else math.inf, "certified": certified}
    if require_certificate and not certified:
        raise CertificateFailure(f"tail not certified: {tail}")
    fv = 0.0
    for m in range(min(M_max, 12) + 1):
        basis, _ = mode_basis(problem, m)
        fv = max(fv, float(np.max(np.abs(_first_variations(problem.curve, problem.r, basis, Quadrature.trapezoid(4 * m + 16))))))
    return SpectrumReport(problem, blocks, index, nullity, M_max, null_tol, cert, fv)
