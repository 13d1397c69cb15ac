"""Per-point geometry of the surfaces X, their Gauss map N and companion eta.

With ``Y = (2g, 1 - |g|^2) / T`` (inverse stereographic projection of g,
``T = 1 + |g|^2``) and the conformal factor ``L = 4|g'|^2 / T^2``:

    eta = (h_{,1} Y_{,1} + h_{,2} Y_{,2}) / L + h Y,     S = <eta, eta>
    N   = Y - (2h / S) eta
    X   = Y - (2(h + c) / S) eta
    W   = [S I - 2h V] [S I - 2(h + c) V]^{-1}

All functions accept a scalar ``z`` or an ndarray of points.  Scalar calls raise
on degenerate/singular points; array calls mask them and fill NaN.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import DegeneratePointError, DomainError, SingularPointError
from .field import Field, RealJet2, inner
from .holo import Expr, Jet2, eval_jet, lenient

EPS_S = 1e-14
P_REL_THRESHOLD = 1e-10
DETV_REL_THRESHOLD = 1e-10
SYMMETRY_TOL = 1e-9
PSI_ONE_TOL = 1e-12


def _vec(*comps) -> np.ndarray:
    return np.stack(np.broadcast_arrays(*comps), axis=-1)


def _dot(a, b):
    return np.sum(a * b, axis=-1)


@dataclass(frozen=True)
class SurfaceFrame:
    """Everything the construction produces at one point (or an array of points).

    Vectors carry a trailing axis of length 3; V has trailing shape (2, 2).
    """

    z: Any
    c: float
    g: Jet2
    Y: np.ndarray
    Y1: np.ndarray  # dY/du
    Y2: np.ndarray  # dY/dv
    T: Any
    L: Any
    h: RealJet2
    w: Any  # g''/g' - (2/T) g' conj(g): the Christoffel symbols in complex form
    V: np.ndarray
    eta: np.ndarray
    S: Any
    N: np.ndarray
    X: np.ndarray
    P: Any
    degenerate: Any

    @property
    def trV(self):
        return self.V[..., 0, 0] + self.V[..., 1, 1]

    @property
    def detV(self):
        return self.V[..., 0, 0] * self.V[..., 1, 1] - self.V[..., 0, 1] * self.V[..., 1, 0]

    @property
    def singular_X(self):
        """|P| below the relative threshold: X is not an immersion here."""
        return self.degenerate | ~(np.abs(self.P) > P_REL_THRESHOLD * self.S**2)

    @property
    def singular_eta(self):
        scale = np.sum(self.V**2, axis=(-2, -1))
        return self.degenerate | ~(np.abs(self.detV) > DETV_REL_THRESHOLD * scale)

    def __len__(self):
        return int(np.size(self.T))

    def take(self, mask) -> "SurfaceFrame":
        """Sub-frame for the points selected by a boolean/index mask (array frames only)."""
        def pick(x):
            if isinstance(x, RealJet2):
                return RealJet2(*(np.asarray(c)[mask] for c in (x.val, x.g1, x.g2, x.h11, x.h12, x.h22)))
            if isinstance(x, Jet2):
                return Jet2(*(np.asarray(c)[mask] for c in (x.f, x.df, x.d2f)))
            if isinstance(x, float):
                return x
            return np.asarray(x)[mask]

        return SurfaceFrame(**{k: pick(getattr(self, k)) for k in self.__dataclass_fields__})


def sphere_point(g: Jet2):
    """Y and its u/v partials from the jet of g."""
    rg, ig = RealJet2.real_part(g), RealJet2.imag_part(g)
    T = 1.0 + rg * rg + ig * ig
    comps = (2.0 * rg / T, 2.0 * ig / T, (1.0 - rg * rg - ig * ig) / T)
    Y = _vec(*(c.val for c in comps))
    Y1 = _vec(*(c.g1 for c in comps))
    Y2 = _vec(*(c.g2 for c in comps))
    return Y, Y1, Y2, T.val


def frame_at(z, field: Field, c: float, *, eps_S: float = EPS_S, strict: bool | None = None) -> SurfaceFrame:
    """Assemble the frame at ``z``.

    ``strict`` defaults to True for scalar ``z`` (errors raise) and False for
    arrays (bad points are flagged in ``degenerate`` and filled with NaN).
    """
    if c == 0:
        raise ValueError("c must be nonzero")
    scalar = np.ndim(z) == 0
    if strict is None:
        strict = scalar
    zz = complex(z) if scalar else np.asarray(z, dtype=complex)
    if strict:
        return _frame(zz, field, float(c), eps_S, True)
    with lenient():
        return _frame(zz, field, float(c), eps_S, False)


def _frame(z, field: Field, c: float, eps_S: float, strict: bool) -> SurfaceFrame:
    g = eval_jet(field.g, z)
    if strict and np.any(g.df == 0):
        raise DomainError("g'(z) = 0: the sphere parameterization is not conformal here")
    h = field.jet(z, strict=strict)
    Y, Y1, Y2, T = sphere_point(g)
    dg2 = np.abs(g.df) ** 2
    L = 4.0 * dg2 / T**2
    w = g.d2f / g.df - (2.0 / T) * g.df * np.conj(g.f)
    # <w, grad h> and <i w, grad h>
    wg = np.real(w) * h.g1 + np.imag(w) * h.g2
    iwg = -np.imag(w) * h.g1 + np.real(w) * h.g2
    V11 = (h.h11 - wg + h.val * L) / L
    V12 = (h.h12 - iwg) / L
    V22 = (h.h22 + wg + h.val * L) / L
    V = np.stack(np.broadcast_arrays(np.stack(np.broadcast_arrays(V11, V12), -1),
                                     np.stack(np.broadcast_arrays(V12, V22), -1)), -2)
    hv = np.asarray(h.val)[..., None]
    eta = (np.asarray(h.g1)[..., None] * Y1 + np.asarray(h.g2)[..., None] * Y2) / np.asarray(L)[..., None] + hv * Y
    S = _dot(eta, eta)
    degenerate = ~(S > eps_S) | ~(dg2 > 0) | ~np.isfinite(S)
    if strict and np.any(degenerate):
        raise DegeneratePointError(f"S = {S} <= {eps_S}: eta vanishes, X and N undefined")
    with np.errstate(all="ignore"):
        Sx = np.asarray(S)[..., None]
        N = Y - 2.0 * hv / Sx * eta
        X = Y - 2.0 * (hv + c) / Sx * eta
    hc = h.val + c
    trV, detV = V11 + V22, V11 * V22 - V12 * V12
    P = S**2 - 2.0 * hc * S * trV + 4.0 * hc**2 * detV
    if np.ndim(degenerate):
        N = np.where(degenerate[..., None], np.nan, N)
        X = np.where(degenerate[..., None], np.nan, X)
    return SurfaceFrame(z=z, c=c, g=g, Y=Y, Y1=Y1, Y2=Y2, T=T, L=L, h=h, w=w, V=V,
                        eta=eta, S=S, N=N, X=X, P=P, degenerate=degenerate)


def eta_closed_form(z, field: Field, g: Expr | None = None):
    """Closed-form eta with complex products (cross-check for :func:`frame_at`).

    ``(T/2 ∇h g'/|g'|^2 - g <∇h, g/g'> + (2h/T) g,  (2-T)/T h - <∇h, g/g'>)``
    where ``∇h = h_{,1} + i h_{,2}``.
    """
    gj = eval_jet(g if g is not None else field.g, z)
    h = field.jet(z)
    T = 1.0 + np.abs(gj.f) ** 2
    grad = h.grad
    ratio = gj.f / gj.df
    proj = np.real(np.conj(grad) * ratio)  # <∇h, g/g'>
    planar = (T / 2.0) * grad * gj.df / np.abs(gj.df) ** 2 - gj.f * proj + (2.0 * h.val / T) * gj.f
    return _vec(np.real(planar), np.imag(planar), (2.0 - T) / T * h.val - proj)


@dataclass(frozen=True)
class CurvatureReport:
    W: np.ndarray
    k1: Any
    k2: Any
    H: Any
    K: Any
    Psi: Any
    Lambda: Any
    R: Any
    s1: Any
    s2: Any
    H_S: Any
    trV: Any
    detV: Any
    singular: Any


def _sym_eigs(M: np.ndarray, strict: bool):
    a, b, b2, d = M[..., 0, 0], M[..., 0, 1], M[..., 1, 0], M[..., 1, 1]
    scale = np.maximum(np.abs(M).max(axis=(-2, -1)), 1.0)
    asym = np.abs(b - b2) / scale
    bad = ~(asym < SYMMETRY_TOL)
    if strict and np.any(bad):
        raise SingularPointError(f"Weingarten matrix not symmetric (asymmetry {asym})")
    bs = 0.5 * (b + b2)
    m = 0.5 * (a + d)
    r = np.hypot(0.5 * (a - d), bs)
    return m + r, m - r, bad


def curvature_report(frame: SurfaceFrame, c: float | None = None, *, strict: bool | None = None) -> CurvatureReport:
    """Principal curvatures, radius function and spherical curvatures at the frame."""
    c = frame.c if c is None else float(c)
    scalar = np.ndim(frame.S) == 0
    strict = scalar if strict is None else strict
    with np.errstate(all="ignore"):
        return _curvatures(frame, c, strict)


def _curvatures(frame: SurfaceFrame, c: float, strict: bool) -> CurvatureReport:
    S, h, V = frame.S, frame.h.val, frame.V
    if strict and np.any(frame.degenerate):
        raise DegeneratePointError("S below threshold")
    singular = frame.singular_X
    if strict and np.any(singular):
        raise SingularPointError(f"P = {frame.P} ~ 0: X is singular here")
    I = np.eye(2)
    Sm = np.asarray(S)[..., None, None]
    A = Sm * I - 2.0 * np.asarray(h)[..., None, None] * V
    Bm = Sm * I - 2.0 * np.asarray(h + c)[..., None, None] * V
    det = Bm[..., 0, 0] * Bm[..., 1, 1] - Bm[..., 0, 1] * Bm[..., 1, 0]
    inv = np.stack([np.stack([Bm[..., 1, 1], -Bm[..., 0, 1]], -1),
                    np.stack([-Bm[..., 1, 0], Bm[..., 0, 0]], -1)], -2) / np.asarray(det)[..., None, None]
    W = A @ inv
    e1, e2, asym = _sym_eigs(W, strict)
    k1, k2 = -e2, -e1  # k1 >= k2
    Psi = _dot(frame.X, frame.N)
    Lam = _dot(frame.X, frame.X)
    near_one = ~(np.abs(Psi - 1.0) > PSI_ONE_TOL)
    if strict and np.any(near_one):
        raise SingularPointError("<X, N> = 1: the sphere congruence condition fails")
    R = (1.0 - Lam) / (2.0 * (Psi - 1.0))
    d1, d2 = 1.0 - k1 * R, 1.0 - k2 * R
    pole = ~(np.abs(d1) > 1e-14) | ~(np.abs(d2) > 1e-14)
    if strict and np.any(pole):
        raise SingularPointError("1 - k_i R = 0: spherical curvature has a pole here")
    s1, s2 = (1.0 + k1) / d1, (1.0 + k2) / d2
    return CurvatureReport(
        W=W, k1=k1, k2=k2, H=0.5 * (k1 + k2), K=k1 * k2, Psi=Psi, Lambda=Lam, R=R,
        s1=s1, s2=s2, H_S=0.5 * (s1 + s2), trV=frame.trV, detV=frame.detV,
        singular=singular | asym | near_one | pole,
    )
