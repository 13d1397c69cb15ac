"""The real scalar field h on the (u, v) plane, with exact gradient and Hessian.

Fields are built from holomorphic data:

* H2 family: ``h = (<1, A> + <g, B>) / (1 + |g|^2)`` for arbitrary A, B;
* H1 family: same, with ``B = ∫ (A'g - A g' + i c1 g') dz`` (numeric contour integral);
* f-family:  ``h = <1, f'(g)> - 2 <g, f(g)> / (1 + |g|^2)``.

``<p, q>`` is the real inner product ``Re(conj(p) q)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from enum import Enum
from typing import Any, Protocol

import numpy as np

from .holo import Expr, Jet2, antiderivative, eval_composed_derivative, eval_jet, lenient
from .holo.jet import _strict


@dataclass(frozen=True)
class RealJet2:
    """Value, gradient ``(g1, g2)`` and Hessian ``(h11, h12, h22)`` of a real field."""

    val: Any
    g1: Any
    g2: Any
    h11: Any
    h12: Any
    h22: Any

    __array_ufunc__ = None

    @staticmethod
    def constant(c, like=None) -> "RealJet2":
        c = np.full(np.shape(like), c, dtype=float) if like is not None and np.ndim(like) else float(c)
        z = 0 * c
        return RealJet2(c, z, z, z, z, z)

    @staticmethod
    def univariate(val, d1, d2) -> "RealJet2":
        """A field depending on u only."""
        z = 0 * np.asarray(val, dtype=float) if np.ndim(val) else 0.0
        return RealJet2(val, d1, z, d2, z, z)

    @staticmethod
    def real_part(j: Jet2) -> "RealJet2":
        # f' = f_{,1} = -i f_{,2}  =>  f_{,2} = i f',  f_{,22} = -f''
        return RealJet2(
            np.real(j.f), np.real(j.df), -np.imag(j.df),
            np.real(j.d2f), -np.imag(j.d2f), -np.real(j.d2f),
        )

    @staticmethod
    def imag_part(j: Jet2) -> "RealJet2":
        return RealJet2(
            np.imag(j.f), np.imag(j.df), np.real(j.df),
            np.imag(j.d2f), np.real(j.d2f), -np.imag(j.d2f),
        )

    @property
    def grad(self) -> complex:
        """Gradient as the complex number ``h_{,1} + i h_{,2}``."""
        return self.g1 + 1j * self.g2

    @property
    def laplacian(self):
        return self.h11 + self.h22

    def __add__(self, o):
        if isinstance(o, RealJet2):
            return RealJet2(self.val + o.val, self.g1 + o.g1, self.g2 + o.g2,
                            self.h11 + o.h11, self.h12 + o.h12, self.h22 + o.h22)
        return RealJet2(self.val + o, self.g1, self.g2, self.h11, self.h12, self.h22)

    __radd__ = __add__

    def __neg__(self):
        return RealJet2(-self.val, -self.g1, -self.g2, -self.h11, -self.h12, -self.h22)

    def __sub__(self, o):
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if isinstance(o, RealJet2):
            a, b = self, o
            return RealJet2(
                a.val * b.val,
                a.g1 * b.val + a.val * b.g1,
                a.g2 * b.val + a.val * b.g2,
                a.h11 * b.val + 2 * a.g1 * b.g1 + a.val * b.h11,
                a.h12 * b.val + a.g1 * b.g2 + a.g2 * b.g1 + a.val * b.h12,
                a.h22 * b.val + 2 * a.g2 * b.g2 + a.val * b.h22,
            )
        return RealJet2(self.val * o, self.g1 * o, self.g2 * o, self.h11 * o, self.h12 * o, self.h22 * o)

    __rmul__ = __mul__

    def __truediv__(self, o):
        if not isinstance(o, RealJet2):
            return self * (1.0 / o)
        a, b = self, o
        q = a.val / b.val
        q1 = (a.g1 - q * b.g1) / b.val
        q2 = (a.g2 - q * b.g2) / b.val
        return RealJet2(
            q, q1, q2,
            (a.h11 - 2 * q1 * b.g1 - q * b.h11) / b.val,
            (a.h12 - q1 * b.g2 - q2 * b.g1 - q * b.h12) / b.val,
            (a.h22 - 2 * q2 * b.g2 - q * b.h22) / b.val,
        )

    def __rtruediv__(self, o):
        return RealJet2.constant(o, self.val) / self


def inner(p: Jet2, q: Jet2) -> RealJet2:
    """``<p, q> = Re p Re q + Im p Im q`` as a real jet."""
    return RealJet2.real_part(p) * RealJet2.real_part(q) + RealJet2.imag_part(p) * RealJet2.imag_part(q)


class FieldClass(str, Enum):
    H1 = "h1"
    H2 = "h2"


class Field(Protocol):
    """Anything that yields the real jet of h at z; ``g`` parameterises the sphere."""

    g: Expr

    def jet(self, z, strict: bool = True) -> RealJet2: ...


def _run(fn, strict: bool):
    if strict and _strict():
        return fn()
    with lenient():
        return fn()


def _h_from(g: Jet2, A: Jet2, B: Jet2) -> RealJet2:
    T = 1.0 + inner(g, g)
    return (RealJet2.real_part(A) + inner(g, B)) / T


@dataclass(frozen=True)
class H2Field:
    g: Expr
    A: Expr
    B: Expr
    kind: FieldClass = FieldClass.H2

    def jet(self, z, strict: bool = True) -> RealJet2:
        return _run(lambda: _h_from(eval_jet(self.g, z), eval_jet(self.A, z), eval_jet(self.B, z)), strict)


@dataclass(frozen=True)
class H1Field:
    """H1 field; B is the contour antiderivative of ``A'g - A g' + i c1 g'`` from ``z0``.

    B(z0) = ``B0`` (default 0).  B' and B'' come from the integrand's jets, never
    from differencing the quadrature.
    """

    g: Expr
    A: Expr
    c1: float = 0.0
    z0: complex = 0j
    B0: complex = 0j
    path: tuple = ()
    tol: float = 1e-12
    kind: FieldClass = FieldClass.H1

    def integrand_jet(self, z) -> Jet2:
        g, A = eval_jet(self.g, z), eval_jet(self.A, z)
        ic1 = 1j * self.c1
        return Jet2(
            A.df * g.f - A.f * g.df + ic1 * g.df,
            A.d2f * g.f - A.f * g.d2f + ic1 * g.d2f,
            0 * g.f,  # third slot unused
        )

    def integrand(self, zs):
        return self.integrand_jet(zs).f

    def B_values(self, z, strict: bool = True):
        return self.B0 + antiderivative(self.integrand, self.z0, z, tol=self.tol, path=self.path, strict=strict)

    def B_jet(self, z, strict: bool = True) -> Jet2:
        def build():
            d = self.integrand_jet(z)
            return Jet2(self.B_values(z, strict=strict), d.f, d.df)

        return _run(build, strict)

    def jet(self, z, strict: bool = True) -> RealJet2:
        def build():
            return _h_from(eval_jet(self.g, z), eval_jet(self.A, z), self.B_jet(z, strict=strict))

        return _run(build, strict)


@dataclass(frozen=True)
class PropFField:
    """``h = <1, f'(g)> - 2 <g, f(g)> / (1 + |g|^2)``; an H1 field with no quadrature."""

    f: Expr
    g: Expr
    kind: FieldClass = FieldClass.H1

    def jet(self, z, strict: bool = True) -> RealJet2:
        def build():
            gj = eval_jet(self.g, z)
            fg, dfg = eval_composed_derivative(self.f, gj)
            T = 1.0 + inner(gj, gj)
            return RealJet2.real_part(dfg) - 2.0 * inner(gj, fg) / T

        return _run(build, strict)


def build_h2_field(g: Expr, A: Expr, B: Expr) -> H2Field:
    return H2Field(g, A, B)


def build_h1_field(g: Expr, A: Expr, c1: float = 0.0, *, z0: complex = 0j, B0: complex = 0j,
                   path=(), tol: float = 1e-12) -> H1Field:
    return H1Field(g, A, float(c1), complex(z0), complex(B0), tuple(complex(p) for p in path), tol)


def build_propf_field(f: Expr, g: Expr) -> PropFField:
    return PropFField(f, g)


@dataclass(frozen=True)
class HoloData:
    """Holomorphic input data of a surface: g, A, B (H2 only), c, c1 and class."""

    g: Expr
    A: Expr | None = None
    B: Expr | None = None
    f: Expr | None = None
    c: float = 1.0
    c1: float = 0.0
    kind: FieldClass = FieldClass.H1
    z0: complex = 0j
    extras: dict = dc_field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.c == 0:
            raise ValueError("c must be nonzero")
        kind = FieldClass(self.kind)
        object.__setattr__(self, "kind", kind)
        if self.f is not None:
            if kind is not FieldClass.H1:
                raise ValueError("an f-based field is always class H1")
        elif self.A is None:
            raise ValueError("A is required")
        elif kind is FieldClass.H2 and self.B is None:
            raise ValueError("class H2 requires B")
        elif kind is FieldClass.H1 and self.B is not None:
            raise ValueError("class H1 derives B from (g, A, c1); do not supply B")

    def field(self) -> Field:
        if self.f is not None:
            return build_propf_field(self.f, self.g)
        if self.kind is FieldClass.H2:
            return build_h2_field(self.g, self.A, self.B)
        return build_h1_field(self.g, self.A, self.c1, z0=self.z0)
