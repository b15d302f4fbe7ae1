"""Truncated Taylor jets and nestable first-order tangents.

A :class:`Jet` stores ``c[i] = f^(i)(base)/i!``.  Coefficients may be floats,
numpy arrays (a batch of base points evaluated at once) or other algebra
elements such as :class:`Dual`, which is how jets of jets and bidual numbers
are built.  Every algebra object carries a nesting rank so that mixed
expressions resolve unambiguously: the object of higher rank treats the other
one as a scalar.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import mpmath
import numpy as np

from .errors import DivisionByZeroLeadCoefficient, DomainError, MismatchedJets, OrderTooLow

__all__ = [
    "Jet",
    "Dual",
    "TangentJet",
    "jet_const",
    "jet_var",
    "jet_arith",
    "jet_elementary",
    "total_derivative",
    "tangent_eval",
    "lead_value",
    "exp",
    "log",
    "sqrt",
    "sin",
    "cos",
    "tan",
    "sinh",
    "cosh",
    "tanh",
    "atan",
    "asin",
    "power",
]


def _rank(x) -> int:
    return getattr(x, "_rank", 0)


def lead_value(x):
    """Innermost numeric value of a (possibly nested) jet or dual."""
    while True:
        if isinstance(x, Jet):
            x = x.c[0]
        elif isinstance(x, Dual):
            x = x.value
        else:
            return x


def _any_zero(x) -> bool:
    return bool(np.any(np.asarray(lead_value(x)) == 0))


def _same_base(a, b) -> bool:
    if a is b:
        return True
    return np.shape(a) == np.shape(b) and bool(np.all(np.asarray(a) == np.asarray(b)))


class Jet:
    """Jet of order ``K`` at ``base``; ``c`` holds the K+1 normalized coefficients."""

    __slots__ = ("base", "c", "_rank")

    def __init__(self, base, coeffs: Sequence):
        c = list(coeffs)
        if not c:
            raise OrderTooLow("a jet needs at least one coefficient")
        self.base = base
        self.c = c
        self._rank = 1 + max(_rank(x) for x in c)

    @property
    def order(self) -> int:
        return len(self.c) - 1

    @property
    def base_point(self):
        return self.base

    @property
    def value(self):
        return self.c[0]

    @property
    def coeffs(self):
        if self._rank == 1:
            return np.array([np.asarray(x, dtype=float) for x in self.c])
        return list(self.c)

    def __repr__(self) -> str:
        return f"Jet(base={self.base!r}, coeffs={self.c!r})"

    # -- structure ---------------------------------------------------------

    def _peer(self, other):
        """Return ``other`` if it is a compatible jet, None if it is a scalar."""
        if isinstance(other, Jet) and other._rank == self._rank:
            if other.order != self.order:
                raise MismatchedJets(f"orders differ: {self.order} vs {other.order}")
            if not _same_base(self.base, other.base):
                raise MismatchedJets("base points differ")
            return other
        if _rank(other) < self._rank:
            return None
        if _rank(other) == self._rank:
            raise TypeError(f"cannot combine Jet with {type(other).__name__} of equal rank")
        return NotImplemented

    def _new(self, coeffs) -> "Jet":
        return Jet(self.base, coeffs)

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise OrderTooLow(f"cannot raise order {self.order} to {order}")
        return self._new(self.c[: order + 1])

    def derivative(self) -> "Jet":
        """Jet of the derivative, one order lower."""
        if self.order == 0:
            raise OrderTooLow("cannot differentiate an order-0 jet")
        return self._new([(i + 1) * self.c[i + 1] for i in range(self.order)])

    def integral(self, constant) -> "Jet":
        """Antiderivative with the given value at the base, one order higher."""
        return self._new([constant] + [self.c[i] / (i + 1) for i in range(len(self.c))])

    def map(self, fn: Callable) -> "Jet":
        return self._new([fn(x) for x in self.c])

    # -- arithmetic --------------------------------------------------------

    def __neg__(self):
        return self._new([-x for x in self.c])

    def __pos__(self):
        return self

    def __add__(self, other):
        o = self._peer(other)
        if o is NotImplemented:
            return o
        if o is None:
            return self._new([self.c[0] + other] + self.c[1:])
        return self._new([x + y for x, y in zip(self.c, o.c)])

    __radd__ = __add__

    def __sub__(self, other):
        o = self._peer(other)
        if o is NotImplemented:
            return o
        if o is None:
            return self._new([self.c[0] - other] + self.c[1:])
        return self._new([x - y for x, y in zip(self.c, o.c)])

    def __rsub__(self, other):
        o = self._peer(other)
        if o is NotImplemented:
            return o
        return self._new([other - self.c[0]] + [-x for x in self.c[1:]])

    def __mul__(self, other):
        o = self._peer(other)
        if o is NotImplemented:
            return o
        if o is None:
            return self._new([x * other for x in self.c])
        a, b = self.c, o.c
        return self._new([sum(a[i] * b[k - i] for i in range(k + 1)) for k in range(len(a))])

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._peer(other)
        if o is NotImplemented:
            return o
        if o is None:
            return self._new([x / other for x in self.c])
        return _series_div(self.c, o)

    def __rtruediv__(self, other):
        o = self._peer(other)
        if o is NotImplemented:
            return o
        return _series_div([other] + [0.0] * self.order, self)

    def __pow__(self, p):
        if isinstance(p, (int, np.integer)):
            return _int_pow(self, int(p))
        return power(self, p)


def _series_div(a: list, b: Jet) -> Jet:
    b0 = b.c[0]
    if _any_zero(b0):
        raise DivisionByZeroLeadCoefficient("lead coefficient of the divisor is zero")
    q = []
    for k in range(len(b.c)):
        s = a[k] - sum(b.c[j] * q[k - j] for j in range(1, k + 1)) if k else a[0]
        q.append(s / b0)
    return b._new(q)


def _int_pow(x, n: int):
    if n < 0:
        return 1.0 / _int_pow(x, -n)
    result = None
    base = x
    while n:
        if n & 1:
            result = base if result is None else result * base
        n >>= 1
        if n:
            base = base * base
    return x * 0.0 + 1.0 if result is None else result


class Dual:
    """First-order tangent: ``value + tangent*eps`` with ``eps**2 = 0``.

    Components may be any algebra element; ``Dual(Dual(x, a), Dual(b, 0))``
    is a bidual with two independent nilpotent tags.
    """

    __slots__ = ("value", "tangent", "_rank")

    def __init__(self, value, tangent):
        self.value = value
        self.tangent = tangent
        self._rank = 1 + max(_rank(value), _rank(tangent))

    def __repr__(self) -> str:
        return f"Dual({self.value!r}, {self.tangent!r})"

    def _peer(self, other):
        if isinstance(other, Dual) and other._rank == self._rank:
            return other
        if _rank(other) < self._rank:
            return None
        if _rank(other) == self._rank:
            raise TypeError(f"cannot combine Dual with {type(other).__name__} of equal rank")
        return NotImplemented

    def __neg__(self):
        return Dual(-self.value, -self.tangent)

    def __pos__(self):
        return self

    def __add__(self, other):
        o = self._peer(other)
        if o is NotImplemented:
            return o
        if o is None:
            return Dual(self.value + other, self.tangent)
        return Dual(self.value + o.value, self.tangent + o.tangent)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._peer(other)
        if o is NotImplemented:
            return o
        if o is None:
            return Dual(self.value - other, self.tangent)
        return Dual(self.value - o.value, self.tangent - o.tangent)

    def __rsub__(self, other):
        o = self._peer(other)
        if o is NotImplemented:
            return o
        return Dual(other - self.value, -self.tangent)

    def __mul__(self, other):
        o = self._peer(other)
        if o is NotImplemented:
            return o
        if o is None:
            return Dual(self.value * other, self.tangent * other)
        return Dual(self.value * o.value, self.value * o.tangent + self.tangent * o.value)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._peer(other)
        if o is NotImplemented:
            return o
        if o is None:
            return Dual(self.value / other, self.tangent / other)
        q = self.value / o.value
        return Dual(q, (self.tangent - q * o.tangent) / o.value)

    def __rtruediv__(self, other):
        o = self._peer(other)
        if o is NotImplemented:
            return o
        q = other / self.value
        return Dual(q, -q * self.tangent / self.value)

    def __pow__(self, p):
        if isinstance(p, (int, np.integer)):
            return _int_pow(self, int(p))
        return power(self, p)


TangentJet = Dual


# -- elementary functions -------------------------------------------------


def _scalar(npfn, name: str, x, *args):
    """Base-ring evaluation; mpmath scalars and object arrays keep their precision."""
    if isinstance(x, mpmath.mpf):
        return getattr(mpmath, name)(x, *args)
    if isinstance(x, np.ndarray) and x.dtype == object:
        fn = getattr(mpmath, name)
        return np.frompyfunc(lambda v: fn(v, *args), 1, 1)(x)
    return npfn(x, *args)


def _recur_pair(a: Jet, f0, g0, sign: float):
    """Joint recurrence for (sin, cos) when sign=-1 and (sinh, cosh) when sign=+1."""
    s, c = [f0], [g0]
    for k in range(1, len(a.c)):
        s.append(sum(j * a.c[j] * c[k - j] for j in range(1, k + 1)) / k)
        c.append(sign * sum(j * a.c[j] * s[k - j] for j in range(1, k + 1)) / k)
    return a._new(s), a._new(c)


def _lead_check(x, ok: Callable[[np.ndarray], np.ndarray], what: str):
    v = np.asarray(lead_value(x), dtype=float)
    if not np.all(ok(v)):
        raise DomainError(f"{what} at lead value {v}")


def exp(x):
    if isinstance(x, Jet):
        e = [exp(x.c[0])]
        for k in range(1, len(x.c)):
            e.append(sum(j * x.c[j] * e[k - j] for j in range(1, k + 1)) / k)
        return x._new(e)
    if isinstance(x, Dual):
        e = exp(x.value)
        return Dual(e, e * x.tangent)
    return _scalar(np.exp, "exp", x)


def log(x):
    _lead_check(x, lambda v: v > 0, "log needs a positive argument")
    if isinstance(x, Jet):
        a = x.c
        out = [log(a[0])]
        for k in range(1, len(a)):
            s = a[k] - sum(j * out[j] * a[k - j] for j in range(1, k)) / k if k > 1 else a[k]
            out.append(s / a[0])
        return x._new(out)
    if isinstance(x, Dual):
        return Dual(log(x.value), x.tangent / x.value)
    return _scalar(np.log, "log", x)


def sqrt(x):
    if isinstance(x, (Jet, Dual)):
        _lead_check(x, lambda v: v > 0, "sqrt jet needs a positive argument")
    else:
        _lead_check(x, lambda v: v >= 0, "sqrt needs a nonnegative argument")
    if isinstance(x, Jet):
        a = x.c
        s = [sqrt(a[0])]
        for k in range(1, len(a)):
            acc = a[k] - sum(s[j] * s[k - j] for j in range(1, k)) if k > 1 else a[k]
            s.append(acc / (2.0 * s[0]))
        return x._new(s)
    if isinstance(x, Dual):
        s = sqrt(x.value)
        return Dual(s, x.tangent / (2.0 * s))
    return _scalar(np.sqrt, "sqrt", x)


def sin(x):
    if isinstance(x, Jet):
        return _recur_pair(x, sin(x.c[0]), cos(x.c[0]), -1.0)[0]
    if isinstance(x, Dual):
        return Dual(sin(x.value), cos(x.value) * x.tangent)
    return _scalar(np.sin, "sin", x)


def cos(x):
    if isinstance(x, Jet):
        return _recur_pair(x, sin(x.c[0]), cos(x.c[0]), -1.0)[1]
    if isinstance(x, Dual):
        return Dual(cos(x.value), -sin(x.value) * x.tangent)
    return _scalar(np.cos, "cos", x)


def sinh(x):
    if isinstance(x, Jet):
        return _recur_pair(x, sinh(x.c[0]), cosh(x.c[0]), 1.0)[0]
    if isinstance(x, Dual):
        return Dual(sinh(x.value), cosh(x.value) * x.tangent)
    return _scalar(np.sinh, "sinh", x)


def cosh(x):
    if isinstance(x, Jet):
        return _recur_pair(x, sinh(x.c[0]), cosh(x.c[0]), 1.0)[1]
    if isinstance(x, Dual):
        return Dual(cosh(x.value), sinh(x.value) * x.tangent)
    return _scalar(np.cosh, "cosh", x)


def tan(x):
    _lead_check(x, lambda v: np.abs(np.cos(v)) > 1e-12, "tan is singular")
    if isinstance(x, Jet):
        s, c = _recur_pair(x, sin(x.c[0]), cos(x.c[0]), -1.0)
        return s / c
    if isinstance(x, Dual):
        t = tan(x.value)
        return Dual(t, (1.0 + t * t) * x.tangent)
    return _scalar(np.tan, "tan", x)


def tanh(x):
    if isinstance(x, Jet):
        s, c = _recur_pair(x, sinh(x.c[0]), cosh(x.c[0]), 1.0)
        return s / c
    if isinstance(x, Dual):
        t = tanh(x.value)
        return Dual(t, (1.0 - t * t) * x.tangent)
    return _scalar(np.tanh, "tanh", x)


def _integrate_derivative(x: Jet, value0, dfdx: Callable[[Jet], Jet]) -> Jet:
    """Jet of F(x) from F(x0) and F' (as a function of a lower-order jet)."""
    if x.order == 0:
        return x._new([value0])
    low = x.truncate(x.order - 1)
    return (dfdx(low) * x.derivative()).integral(value0)


def atan(x):
    if isinstance(x, Jet):
        return _integrate_derivative(x, atan(x.c[0]), lambda u: 1.0 / (1.0 + u * u))
    if isinstance(x, Dual):
        return Dual(atan(x.value), x.tangent / (1.0 + x.value * x.value))
    return _scalar(np.arctan, "atan", x)


def asin(x):
    _lead_check(x, lambda v: np.abs(v) < 1, "asin needs |x| < 1")
    if isinstance(x, Jet):
        return _integrate_derivative(x, asin(x.c[0]), lambda u: 1.0 / sqrt(1.0 - u * u))
    if isinstance(x, Dual):
        return Dual(asin(x.value), x.tangent / sqrt(1.0 - x.value * x.value))
    return _scalar(np.arcsin, "asin", x)


def power(x, p):
    """``x**p`` for real ``p``; integer exponents allow any nonzero lead."""
    if float(p).is_integer() and isinstance(x, (Jet, Dual)):
        return _int_pow(x, int(p))
    if isinstance(x, Jet):
        _lead_check(x, lambda v: v > 0, "non-integer power needs a positive argument")
        a = x.c
        y = [power(a[0], p)]
        for k in range(1, len(a)):
            y.append(sum(((p + 1) * j - k) * a[j] * y[k - j] for j in range(1, k + 1)) / (k * a[0]))
        return x._new(y)
    if isinstance(x, Dual):
        return Dual(power(x.value, p), p * power(x.value, p - 1) * x.tangent)
    return _scalar(np.power, "power", x, p)


# -- spec-level API -------------------------------------------------------


def jet_const(c, base, K: int) -> Jet:
    if K < 0:
        raise OrderTooLow("order must be nonnegative")
    return Jet(base, [c] + [0.0] * K)


def jet_var(x0, K: int) -> Jet:
    if K < 1:
        raise OrderTooLow("the identity jet needs order >= 1")
    return Jet(x0, [x0, 1.0] + [0.0] * (K - 1))


_ARITH = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": lambda a, b: a / b,
}

_ELEMENTARY = {
    "sin": sin,
    "cos": cos,
    "sinh": sinh,
    "cosh": cosh,
    "tan": tan,
    "tanh": tanh,
    "exp": exp,
    "log": log,
    "sqrt": sqrt,
    "atan": atan,
    "asin": asin,
}


def jet_arith(op: str, a: Jet, b: Jet) -> Jet:
    if isinstance(a, Jet) and isinstance(b, Jet):
        a._peer(b)
    return _ARITH[op](a, b)


def jet_elementary(fn: str, a: Jet, c: float | None = None) -> Jet:
    if fn == "pow":
        return power(a, c)
    return _ELEMENTARY[fn](a)


def total_derivative(a: Jet, i: int):
    """``i!`` times the i-th coefficient: the i-th derivative at the base."""
    if i > a.order:
        raise OrderTooLow(f"derivative {i} requested from an order-{a.order} jet")
    return math.factorial(i) * a.c[i]


def tangent_eval(program: Callable, inputs: Sequence[Jet], seed_slot: int) -> Dual:
    """Evaluate ``program(*inputs)`` with a unit tangent on one input slot."""
    if not 0 <= seed_slot < len(inputs):
        raise IndexError("seed_slot does not index an input")
    args = [Dual(x, x * 0.0 + (1.0 if i == seed_slot else 0.0)) for i, x in enumerate(inputs)]
    return program(*args)
