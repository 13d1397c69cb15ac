"""Second-order forward-mode jets over the complex field.

A :class:`Jet2` carries ``(f, f', f'')`` of a holomorphic function at a point
(or at an array of points).  Components may themselves be Jet2 instances; that
nesting is how compositions needing a third derivative (``f'(g(z))``) are
obtained without raising the jet order.
"""

from __future__ import annotations

import contextlib
import contextvars
from dataclasses import dataclass
from typing import Any

import numpy as np

from ..errors import DomainError, ExprOverflowError
from .ast import (
    Add, Const, Cos, Cosh, Div, Exp, Expr, Log, Mul, Neg, Pow, Sin, Sinh, Sqrt, Sub, Var,
)

# strict: poles/branch points/overflow raise; lenient: they become NaN/inf.
_STRICT: contextvars.ContextVar[bool] = contextvars.ContextVar("hsurf_strict", default=True)


@contextlib.contextmanager
def lenient():
    """Evaluate without raising on poles/overflow; bad points come out non-finite."""
    token = _STRICT.set(False)
    try:
        with np.errstate(all="ignore"):
            yield
    finally:
        _STRICT.reset(token)


def _strict() -> bool:
    return _STRICT.get()


def _check_finite(x, what: str):
    if _strict() and not np.all(np.isfinite(x)):
        raise ExprOverflowError(f"{what} overflowed")
    return x


@dataclass(frozen=True, slots=True)
class Jet2:
    f: Any
    df: Any
    d2f: Any

    # keep numpy from broadcasting over a Jet2 as an object scalar
    __array_ufunc__ = None

    @staticmethod
    def variable(z) -> "Jet2":
        z = np.asarray(z, dtype=complex) if np.ndim(z) else complex(z)
        one = np.ones_like(z) if np.ndim(z) else 1.0 + 0j
        return Jet2(z, one, 0 * one)

    def compose(self, v, d1, d2) -> "Jet2":
        """Chain rule: given phi(x), phi'(x), phi''(x) at x = self.f."""
        return Jet2(v, d1 * self.df, d2 * self.df * self.df + d1 * self.d2f)

    def __add__(self, o):
        if isinstance(o, Jet2):
            return Jet2(self.f + o.f, self.df + o.df, self.d2f + o.d2f)
        return Jet2(self.f + o, self.df, self.d2f)

    __radd__ = __add__

    def __neg__(self):
        return Jet2(-self.f, -self.df, -self.d2f)

    def __sub__(self, o):
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if isinstance(o, Jet2):
            return Jet2(
                self.f * o.f,
                self.df * o.f + self.f * o.df,
                self.d2f * o.f + 2 * (self.df * o.df) + self.f * o.d2f,
            )
        return Jet2(self.f * o, self.df * o, self.d2f * o)

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet2":
        r = _div(1.0, self.f)
        r2 = r * r
        return self.compose(r, -r2, 2 * (r2 * r))

    def __truediv__(self, o):
        if isinstance(o, Jet2):
            return self * o.reciprocal()
        return self * _div(1.0, o)

    def __rtruediv__(self, o):
        return self.reciprocal() * o

    @property
    def shape(self):
        return np.shape(_innermost(self.f))


def _innermost(x):
    while isinstance(x, Jet2):
        x = x.f
    return x


# --------------------------------------------------------------------------
# primitives that dispatch on Jet2 vs plain scalars/arrays


def _div(a, b):
    if isinstance(b, Jet2):
        return b.reciprocal() * a
    if isinstance(a, Jet2):
        return a * _div(1.0, b)
    if _strict() and np.any(np.asarray(b) == 0):
        raise DomainError("division by zero (pole)")
    with np.errstate(all="ignore"):
        return a / b


def cexp(x):
    if isinstance(x, Jet2):
        e = cexp(x.f)
        return x.compose(e, e, e)
    with np.errstate(all="ignore"):
        return _check_finite(np.exp(x), "exp")


def clog(x):
    if isinstance(x, Jet2):
        r = _div(1.0, x.f)
        return x.compose(clog(x.f), r, -(r * r))
    if _strict() and np.any(np.asarray(x) == 0):
        raise DomainError("log at 0 (branch point)")
    with np.errstate(all="ignore"):
        return np.log(x)


def csin(x):
    if isinstance(x, Jet2):
        s, c = csin(x.f), ccos(x.f)
        return x.compose(s, c, -s)
    with np.errstate(all="ignore"):
        return _check_finite(np.sin(x), "sin")


def ccos(x):
    if isinstance(x, Jet2):
        s, c = csin(x.f), ccos(x.f)
        return x.compose(c, -s, -c)
    with np.errstate(all="ignore"):
        return _check_finite(np.cos(x), "cos")


def csinh(x):
    if isinstance(x, Jet2):
        s, c = csinh(x.f), ccosh(x.f)
        return x.compose(s, c, s)
    with np.errstate(all="ignore"):
        return _check_finite(np.sinh(x), "sinh")


def ccosh(x):
    if isinstance(x, Jet2):
        s, c = csinh(x.f), ccosh(x.f)
        return x.compose(c, s, c)
    with np.errstate(all="ignore"):
        return _check_finite(np.cosh(x), "cosh")


def csqrt(x):
    if isinstance(x, Jet2):
        s = csqrt(x.f)
        r = _div(1.0, s)
        return x.compose(s, 0.5 * r, -0.25 * (r * _div(1.0, x.f)))
    with np.errstate(all="ignore"):
        return np.sqrt(x)


def _int_pow(x, n: int):
    if n < 0:
        return _div(1.0, _int_pow(x, -n))
    result = None
    base = x
    while n:
        if n & 1:
            result = base if result is None else result * base
        n >>= 1
        if n:
            base = base * base
    return 1.0 + 0 * x if result is None else result


def cpow(x, a: float):
    """``x**a``; integer ``a`` by repeated products, otherwise principal branch."""
    integral = float(a).is_integer() and abs(a) < 2**31
    if isinstance(x, Jet2):
        if integral:
            n = int(a)
            if n == 0:
                return Jet2(1.0 + 0 * x.f, 0 * x.df, 0 * x.d2f)
            if n == 1:
                return x
            return x.compose(_int_pow(x.f, n), n * _int_pow(x.f, n - 1), n * (n - 1) * _int_pow(x.f, n - 2))
        v = cpow(x.f, a)
        r = _div(1.0, x.f)
        d1 = a * (v * r)
        return x.compose(v, d1, (a - 1) * (d1 * r))
    if integral:
        return _check_finite(_int_pow(x, int(a)), "power")
    if _strict() and np.any(np.asarray(x) == 0):
        raise DomainError("non-integer power at 0 (branch point)")
    with np.errstate(all="ignore"):
        return _check_finite(np.exp(a * np.log(x)), "power")


_UNARY_FUNCS = {Exp: cexp, Log: clog, Sin: csin, Cos: ccos, Sinh: csinh, Cosh: ccosh, Sqrt: csqrt}


def evaluate(expr: Expr, x):
    """Evaluate ``expr`` with ``z`` bound to ``x`` (scalar, ndarray, or Jet2)."""
    if isinstance(expr, Var):
        return x
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Add):
        return evaluate(expr.left, x) + evaluate(expr.right, x)
    if isinstance(expr, Sub):
        return evaluate(expr.left, x) - evaluate(expr.right, x)
    if isinstance(expr, Mul):
        return evaluate(expr.left, x) * evaluate(expr.right, x)
    if isinstance(expr, Div):
        return _div(evaluate(expr.left, x), evaluate(expr.right, x))
    if isinstance(expr, Neg):
        return -evaluate(expr.arg, x)
    if isinstance(expr, Pow):
        return cpow(evaluate(expr.base, x), expr.exponent)
    fn = _UNARY_FUNCS.get(type(expr))
    if fn is None:
        raise TypeError(f"not an expression node: {expr!r}")
    return fn(evaluate(expr.arg, x))


def _broadcast_const(value, like):
    if np.ndim(like):
        return np.full(np.shape(like), value, dtype=complex)
    return complex(value)


def eval_values(expr: Expr, z):
    """Plain values ``f(z)`` (no derivatives), broadcast to the shape of ``z``."""
    z = np.asarray(z, dtype=complex) if np.ndim(z) else complex(z)
    out = evaluate(expr, z)
    return _broadcast_const(out, z) if np.ndim(out) < np.ndim(z) else out


def eval_jet(expr: Expr, z) -> Jet2:
    """Exact ``(f, f', f'')`` at ``z`` by jet propagation (no differencing)."""
    zj = Jet2.variable(z)
    out = evaluate(expr, zj)
    if not isinstance(out, Jet2):
        return Jet2(_broadcast_const(out, zj.f), 0 * zj.df, 0 * zj.df)
    # constant sub-results may leave scalar components; broadcast for uniformity
    comps = [c if np.ndim(c) == np.ndim(zj.f) else _broadcast_const(c, zj.f) for c in (out.f, out.df, out.d2f)]
    return Jet2(*comps)


def eval_composed_derivative(f: Expr, g_jet: Jet2) -> tuple[Jet2, Jet2]:
    """Jets in ``z`` of ``f(g(z))`` and ``f'(g(z))`` given the jet of ``g``.

    Evaluates ``f`` on a jet whose components are themselves jets in ``z``; the
    outer derivative slot then holds ``f'(g(z))`` with its own z-derivatives.
    """
    one = Jet2(1.0 + 0 * g_jet.f, 0 * g_jet.df, 0 * g_jet.d2f)
    zero = Jet2(0 * g_jet.f, 0 * g_jet.df, 0 * g_jet.d2f)
    outer = evaluate(f, Jet2(g_jet, one, zero))
    if not isinstance(outer, Jet2):
        c = _broadcast_const(outer, g_jet.f)
        return Jet2(c, 0 * g_jet.df, 0 * g_jet.df), Jet2(0 * c, 0 * c, 0 * c)

    def as_z_jet(comp):
        if isinstance(comp, Jet2):
            return comp
        c = _broadcast_const(comp, g_jet.f)
        return Jet2(c, 0 * c, 0 * c)

    return as_z_jet(outer.f), as_z_jet(outer.df)
