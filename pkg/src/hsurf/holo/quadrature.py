"""Antiderivatives of holomorphic functions by contour quadrature.

Vectorised adaptive Gauss-Kronrod (7/15) along straight segments or polylines;
many endpoints are integrated in one pass, which is what grid sampling needs.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from ..errors import DomainError, ExprOverflowError, IntegrationError
from .ast import Expr
from .jet import eval_values, lenient

# Kronrod 15-point nodes on [0, 1] (symmetric), Gauss 7-point weights at the odd nodes.
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XK[:-1], _XK[::-1]])  # 15 nodes in [-1, 1]
KRONROD_WEIGHTS = np.concatenate([_WK[:-1], _WK[::-1]])
_GAUSS_FULL = np.zeros(15)
_GAUSS_FULL[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])
GAUSS_WEIGHTS = _GAUSS_FULL

MAX_DEPTH = 40
MAX_INTERVALS = 2_000_000
_EPS = np.finfo(float).eps

Integrand = Callable[[np.ndarray], np.ndarray]


def _as_callable(integrand: Expr | Integrand) -> Integrand:
    if isinstance(integrand, Expr):
        return lambda zs: eval_values(integrand, zs)
    return integrand


def _gk(fn: Integrand, a: np.ndarray, b: np.ndarray):
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    pts = mid[:, None] + half[:, None] * NODES[None, :]
    with lenient():
        vals = np.asarray(fn(pts.ravel()), dtype=complex).reshape(pts.shape)
    bad = ~np.all(np.isfinite(vals), axis=1)
    vals = np.where(np.isfinite(vals), vals, 0.0)
    k = half * (vals @ KRONROD_WEIGHTS)
    g = half * (vals @ GAUSS_WEIGHTS)
    scale = np.abs(half) * (np.abs(vals) @ KRONROD_WEIGHTS)
    return k, np.abs(k - g), scale, bad


def integrate_segments(
    integrand: Expr | Integrand,
    a,
    b,
    *,
    tol: float = 1e-12,
    strict: bool = True,
) -> np.ndarray:
    """∫ f over each straight segment ``[a_k, b_k]``; ``a`` and ``b`` broadcast.

    ``tol`` is an absolute tolerance per segment, apportioned by sub-interval
    length. With ``strict=False`` a failed segment yields NaN instead of raising.
    """
    fn = _as_callable(integrand)
    a, b = np.broadcast_arrays(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))
    shape = a.shape
    a0, b0 = a.ravel(), b.ravel()
    total = np.zeros(a0.size, dtype=complex)
    failed = np.zeros(a0.size, dtype=bool)

    length = np.abs(b0 - a0)
    idx = np.nonzero(length > 0)[0]
    lo, hi = a0[idx], b0[idx]
    budget = np.full(idx.size, float(tol))
    for _depth in range(MAX_DEPTH + 1):
        if idx.size == 0:
            break
        if idx.size > MAX_INTERVALS:
            break
        k, err, scale, bad = _gk(fn, lo, hi)
        if np.any(bad):
            if strict:
                raise IntegrationError("integrand not finite on the path (pole on path?)")
            failed[idx[bad]] = True
        ok = ~bad & (err <= np.maximum(budget, 64 * _EPS * scale))
        np.add.at(total, idx[ok], k[ok])
        more = ~bad & ~ok
        if not np.any(more):
            idx = idx[:0]
            break
        idx, lo, hi, budget = idx[more], lo[more], hi[more], budget[more]
        mid = 0.5 * (lo + hi)
        idx = np.concatenate([idx, idx])
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
        budget = np.concatenate([budget, budget]) * 0.5
    if idx.size:
        if strict:
            raise IntegrationError("quadrature did not converge within the subdivision budget")
        failed[np.unique(idx)] = True
    total[failed] = np.nan
    return total.reshape(shape)


def antiderivative(
    integrand: Expr | Integrand,
    z0,
    z,
    *,
    tol: float = 1e-12,
    path: Sequence[complex] | None = None,
    strict: bool = True,
):
    """``∫_{z0}^{z} f(w) dw`` along the polyline ``z0 → *path → z``.

    The antiderivative is normalised to vanish at ``z0``.  ``z`` may be an
    array; intermediate ``path`` vertices are shared by all endpoints.
    """
    vertices = [complex(z0)] + [complex(p) for p in (path or ())]
    zz = np.asarray(z, dtype=complex)
    fixed = 0j
    try:
        for p, q in zip(vertices[:-1], vertices[1:]):
            fixed += complex(integrate_segments(integrand, p, q, tol=tol, strict=True))
    except (DomainError, ExprOverflowError) as exc:  # pragma: no cover - defensive
        raise IntegrationError(str(exc)) from exc
    out = fixed + integrate_segments(integrand, vertices[-1], zz, tol=tol, strict=strict)
    return complex(out) if np.ndim(z) == 0 else out
