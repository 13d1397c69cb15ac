"""Numeric residual checks for the identities the construction must satisfy.

Every check returns a :class:`ResidualReport`.  Residuals are absolute unless
the report's ``extras['scaled']`` is set, in which case each point's residual is
divided by ``max(1, |reference quantity|)`` so that large-valued fields are not
penalised for rounding.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable, Iterable, Sequence

import numpy as np

from .datasets import Domain
from .field import Field, FieldClass
from .geometry import SurfaceFrame, curvature_report, frame_at
from .holo import Expr, eval_jet, lenient

RICHARDSON_WINDOW = (3.5, 4.5)
SKIP_FLAG_FRACTION = 0.05
REGULAR_MARGIN = 1e-3

_FMT = "{:.6e}"


@dataclass(frozen=True)
class ResidualReport:
    name: str
    max_abs: float
    mean_abs: float
    points_checked: int
    points_skipped_singular: int
    tolerance: float
    seed: int | None = None
    # "max_abs": pass iff max_abs <= tolerance; "richardson": pass iff the step-halving
    # ratio lies in RICHARDSON_WINDOW or the fine-step residual is already <= tolerance
    criterion: str = "max_abs"
    extras: dict = dc_field(default_factory=dict, compare=False)

    @property
    def passed(self) -> bool:
        if self.criterion == "richardson":
            ratio = self.extras.get("ratio", float("nan"))
            lo, hi = RICHARDSON_WINDOW
            return bool(self.max_abs <= self.tolerance or lo <= ratio <= hi)
        return bool(self.max_abs <= self.tolerance)

    @property
    def skip_flagged(self) -> bool:
        total = self.points_checked + self.points_skipped_singular
        return total > 0 and self.points_skipped_singular > SKIP_FLAG_FRACTION * total

    def to_kv(self) -> str:
        """One ``key=value`` line per metric, prefixed with the report name."""
        rows = [
            ("max_abs", _FMT.format(self.max_abs)),
            ("mean_abs", _FMT.format(self.mean_abs)),
            ("points_checked", str(self.points_checked)),
            ("points_skipped_singular", str(self.points_skipped_singular)),
            ("tolerance", _FMT.format(self.tolerance)),
            ("criterion", self.criterion),
            ("pass", str(self.passed).lower()),
            ("seed", "none" if self.seed is None else str(self.seed)),
        ]
        if self.skip_flagged:
            rows.append(("flag", "skipped>5%: domain likely misconfigured"))
        for k in sorted(self.extras):
            v = self.extras[k]
            rows.append((k, _FMT.format(v) if isinstance(v, float) else str(v)))
        return "".join(f"{self.name}.{k}={v}\n" for k, v in rows)


def format_table(reports: Sequence[ResidualReport]) -> str:
    """Fixed-width plain-text table, one row per report."""
    head = f"{'check':<34} {'max_abs':>13} {'mean_abs':>13} {'tol':>10} {'n':>5} {'skip':>5}  result\n"
    lines = [head, "-" * (len(head) - 1) + "\n"]
    for r in reports:
        result = "PASS" if r.passed else "FAIL"
        if r.skip_flagged:
            result += " (skip>5%)"
        lines.append(f"{r.name:<34} {r.max_abs:>13.4e} {r.mean_abs:>13.4e} {r.tolerance:>10.1e} "
                     f"{r.points_checked:>5d} {r.points_skipped_singular:>5d}  {result}\n")
    return "".join(lines)


def format_kv(reports: Sequence[ResidualReport]) -> str:
    return "".join(r.to_kv() for r in reports)


def _report(name: str, resid, tol: float, *, skipped: int = 0, seed=None, criterion="max_abs", **extras) -> ResidualReport:
    r = np.abs(np.asarray(resid, dtype=float).ravel())
    finite = np.isfinite(r)
    skipped += int(np.sum(~finite))
    r = r[finite]
    if r.size == 0:
        return ResidualReport(name, float("inf"), float("inf"), 0, skipped, tol, seed, criterion, extras)
    # fixed reduction order: numpy pairwise sum over the given point order
    return ResidualReport(name, float(np.max(r)), float(np.mean(r)), int(r.size), skipped, tol, seed, criterion, extras)


def _points(points) -> np.ndarray:
    pts = np.atleast_1d(np.asarray(points, dtype=complex)).ravel()
    if pts.size == 0:
        raise ValueError("empty sample set")
    return pts


# --------------------------------------------------------------------------
# sampling


def regular_points(field: Field, c: float, domain: Domain, n: int, seed: int, *,
                   margin: float = REGULAR_MARGIN, need_eta: bool = False) -> tuple[np.ndarray, int]:
    """``n`` seeded random points of ``domain`` where X (and optionally eta) is regular.

    A point is kept when the frame is non-degenerate, every curvature quantity is
    finite, ``|P| > margin S^2`` and (for ``need_eta``) ``|det V| > margin |V|^2``.
    Returns the points and the number of draws rejected before ``n`` were found.
    """
    rng = np.random.default_rng(seed)
    kept: list[np.ndarray] = []
    have, rejected, drawn = 0, 0, 0
    while have < n:
        if drawn > 50 * n + 1000:
            raise ValueError(f"could not find {n} regular points in {domain} ({rejected} rejected)")
        z = domain.draw(rng, max(n, 32))
        drawn += z.size
        ok = regular_mask(field, c, z, margin=margin, need_eta=need_eta)
        for zi, oi in zip(z, ok):
            if have == n:
                break
            if oi:
                kept.append(zi)
                have += 1
            else:
                rejected += 1
    return np.array(kept, dtype=complex), rejected


def regular_mask(field: Field, c: float, z, *, margin: float = REGULAR_MARGIN, need_eta: bool = False) -> np.ndarray:
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    fr = frame_at(z, field, c, strict=False)
    cr = curvature_report(fr, strict=False)
    with np.errstate(all="ignore"):
        ok = ~fr.degenerate & ~np.asarray(cr.singular) & (np.abs(fr.P) > margin * fr.S**2)
        ok &= np.isfinite(cr.H_S) & np.all(np.isfinite(fr.X), axis=-1)
        if need_eta:
            ok &= np.abs(fr.detV) > margin * np.sum(fr.V**2, axis=(-2, -1))
    return ok


# --------------------------------------------------------------------------
# Helmholtz-type residuals


def _field_g(field: Field, g: Expr | None) -> Expr:
    return field.g if g is None else g


def helmholtz_q(field: Field, g: Expr | None, z):
    """``(Δh + 2 L h) / L`` with jet-exact Δh; identically zero on H1 fields."""
    with lenient():
        gj = eval_jet(_field_g(field, g), z)
        h = field.jet(z, strict=False)
        T = 1.0 + np.abs(gj.f) ** 2
        L = 4.0 * np.abs(gj.df) ** 2 / T**2
        return (h.laplacian + 2.0 * L * h.val) / L


def helmholtz_residual(field: Field, g: Expr | None, points, *, tol: float = 1e-8, seed: int | None = None) -> ResidualReport:
    """max/mean of ``|Δh + (8|g'|^2/T^2) h|`` at the sample points."""
    pts = _points(points)
    with lenient():
        gj = eval_jet(_field_g(field, g), pts)
        h = field.jet(pts, strict=False)
        T = 1.0 + np.abs(gj.f) ** 2
        resid = h.laplacian + 8.0 * np.abs(gj.df) ** 2 / T**2 * h.val
    return _report("helmholtz", resid, tol, seed=seed)


def _stencil_laplacian(fn: Callable[[np.ndarray], np.ndarray], centers: np.ndarray, step: float) -> np.ndarray:
    offsets = np.array([0, step, -step, 1j * step, -1j * step])
    vals = np.real(fn((centers[:, None] + offsets[None, :]).ravel())).reshape(centers.size, 5)
    return (vals[:, 1:].sum(axis=1) - 4.0 * vals[:, 0]) / step**2


def _richardson(name: str, fn, centers, step: float, tol: float, seed) -> ResidualReport:
    if not step > 0:
        raise ValueError("step must be positive")
    pts = _points(centers)
    if pts.size < 1:
        raise ValueError("grid too small")
    coarse = np.abs(_stencil_laplacian(fn, pts, step))
    fine = np.abs(_stencil_laplacian(fn, pts, step / 2))
    good = np.isfinite(coarse) & np.isfinite(fine)
    mc = float(np.max(coarse[good])) if np.any(good) else float("inf")
    mf = float(np.max(fine[good])) if np.any(good) else float("inf")
    ratio = mc / mf if mf > 0 else float("inf")
    return _report(name, np.where(good, fine, np.nan), tol, seed=seed, criterion="richardson",
                   step=float(step), max_abs_coarse=mc, ratio=float(ratio))


def generalized_helmholtz_residual(field: Field, g: Expr | None, centers, step: float, *,
                                   tol: float = 1e-8, seed: int | None = None) -> ResidualReport:
    """5-point flat Laplacian of ``q = (T^2/(4|g'|^2))(Δh + 2 L h)`` at ``step`` and ``step/2``.

    ``max_abs`` is the fine-step residual; ``extras`` carries the coarse one and the ratio.
    """
    return _richardson("generalized_helmholtz", lambda z: helmholtz_q(field, g, z), centers, step, tol, seed)


def laguerre_residual(field: Field, g: Expr | None, centers, step: float, *, c: float = 1.0,
                      tol: float = 1e-8, seed: int | None = None) -> ResidualReport:
    """Flat Laplacian of ``tr V`` (assembled from the V matrix, not from Δh)."""
    if g is not None and g != field.g:
        raise ValueError("g must match the field's g")
    return _richardson("laguerre", lambda z: frame_at(z, field, c, strict=False).trV, centers, step, tol, seed)


def minimality_residual(field: Field, g: Expr | None, points, *, c: float = 1.0, tol: float = 1e-8,
                        seed: int | None = None) -> ResidualReport:
    """max |tr V| over points where eta is regular (det V away from 0)."""
    pts = _points(points)
    fr = frame_at(pts, field, c, strict=False)
    scale = np.sum(fr.V**2, axis=(-2, -1))
    regular = ~fr.degenerate & (np.abs(fr.detV) > 1e-10 * scale)
    if not np.any(regular):
        raise ValueError("det V vanishes at every sample point: eta has no regular points here")
    return _report("minimality_trV", fr.trV[regular], tol, skipped=int(np.sum(~regular)), seed=seed)


# --------------------------------------------------------------------------
# identities at frames


def _frames_of(frames) -> list[SurfaceFrame]:
    if isinstance(frames, SurfaceFrame):
        return [frames]
    return list(frames)


IDENTITY_TOLERANCES = {
    "radius": 1e-9,
    "gap": 1e-9,
    "congruence": 1e-9,
    "support": 1e-10,
    "trV_jet": 1e-10,
    "trV_HS_bridge": 1e-9,
    "unit_N": 1e-10,
    "psi_not_one": 0.0,
}


def _identity_residuals(frame: SurfaceFrame, c: float) -> tuple[dict[str, np.ndarray], np.ndarray, float]:
    cr = curvature_report(frame, c, strict=False)
    with np.errstate(all="ignore"):
        h = np.asarray(frame.h.val)
        R, Psi = np.asarray(cr.R), np.asarray(cr.Psi)
        S = np.asarray(frame.S)
        gap_ref = 4.0 * c * c / S
        trV = np.asarray(frame.trV)
        jet_trV = frame.h.laplacian / frame.L + 2.0 * h
        res = {
            "radius": np.abs(h + c / (R + 1.0)) / np.maximum(1.0, np.abs(h)),
            "gap": np.abs(np.sum((frame.X - frame.N) ** 2, axis=-1) - gap_ref) / np.maximum(1.0, gap_ref),
            "congruence": np.linalg.norm(frame.X + R[..., None] * frame.N - (1.0 + R)[..., None] * frame.Y, axis=-1)
            / np.maximum(1.0, np.abs(R)),
            "support": np.abs(np.sum(frame.eta * frame.Y, axis=-1) - h) / np.maximum(1.0, np.abs(h)),
            "trV_jet": np.abs(trV - jet_trV) / np.maximum(1.0, np.abs(trV)),
            "trV_HS_bridge": np.abs(trV - 2.0 * c * np.asarray(cr.H_S) / (Psi - 1.0)) / np.maximum(1.0, np.abs(trV)),
            "unit_N": np.abs(np.linalg.norm(frame.N, axis=-1) - 1.0),
            "psi_not_one": (np.abs(Psi - 1.0) <= 1e-12).astype(float),
        }
    singular = np.asarray(frame.degenerate | np.asarray(cr.singular))
    min_gap = float(np.nanmin(np.where(singular, np.nan, np.abs(Psi - 1.0)))) if np.any(~singular) else float("nan")
    return res, singular, min_gap


def identity_suite(frames, c: float | None = None, *, seed: int | None = None) -> list[ResidualReport]:
    """One report per frame identity; singular or degenerate frames are counted as skipped."""
    frames = _frames_of(frames)
    if not frames:
        raise ValueError("no frames given")
    c = frames[0].c if c is None else float(c)
    acc: dict[str, list[np.ndarray]] = {k: [] for k in IDENTITY_TOLERANCES}
    skipped = 0
    min_gap = float("inf")
    for fr in frames:
        res, singular, mg = _identity_residuals(fr, c)
        singular = np.atleast_1d(singular)
        skipped += int(np.sum(singular))
        if np.isfinite(mg):
            min_gap = min(min_gap, mg)
        for k, v in res.items():
            acc[k].append(np.atleast_1d(v)[~singular])
    out = []
    for k, tol in IDENTITY_TOLERANCES.items():
        extras = {"scaled": True}
        if k == "psi_not_one":
            extras = {"min_abs_psi_minus_one": min_gap}
        out.append(_report(k, np.concatenate(acc[k]), tol, skipped=skipped, seed=seed, **extras))
    return out


# --------------------------------------------------------------------------
# finite-difference checks


def _d4(fn: Callable[[np.ndarray], np.ndarray], z: np.ndarray, step: float):
    """Fourth-order central differences in u and v of a vector-valued fn."""
    offs = np.array([2, 1, -1, -2], dtype=float)
    wts = np.array([-1, 8, -8, 1], dtype=float) / (12.0 * step)
    out = []
    for direction in (1.0, 1j):
        pts = (z[:, None] + direction * step * offs[None, :]).ravel()
        vals = fn(pts)
        vals = vals.reshape(z.size, 4, *vals.shape[1:])
        out.append(np.einsum("k,nk...->n...", wts, vals))
    return out[0], out[1]


def weingarten_fd_check(field: Field, c: float, points, *, step: float = 1e-4, tol: float = 1e-5,
                        seed: int | None = None) -> ResidualReport:
    """Relative error of ``N_{,i} = Σ_j W_ij X_{,j}`` with fourth-order differences."""
    pts = _points(points)
    ok = regular_mask(field, c, pts)
    pts_ok = pts[ok]
    X = lambda z: frame_at(z, field, c, strict=False).X  # noqa: E731
    N = lambda z: frame_at(z, field, c, strict=False).N  # noqa: E731
    Xu, Xv = _d4(X, pts_ok, step)
    Nu, Nv = _d4(N, pts_ok, step)
    W = curvature_report(frame_at(pts_ok, field, c, strict=False), strict=False).W
    r1 = Nu - (W[:, 0, 0, None] * Xu + W[:, 0, 1, None] * Xv)
    r2 = Nv - (W[:, 1, 0, None] * Xu + W[:, 1, 1, None] * Xv)
    nx = np.linalg.norm(Xu, axis=1) + np.linalg.norm(Xv, axis=1)
    nn = np.linalg.norm(Nu, axis=1) + np.linalg.norm(Nv, axis=1)
    scale = np.maximum(nn, np.abs(W).max(axis=(1, 2)) * nx)
    rel = np.maximum(np.linalg.norm(r1, axis=1), np.linalg.norm(r2, axis=1)) / scale
    return _report("weingarten_fd", rel, tol, skipped=int(np.sum(~ok)), seed=seed, step=float(step))


def eta_derivative_check(field: Field, c: float, points, *, step: float = 1e-4, tol: float = 1e-6,
                         seed: int | None = None) -> list[ResidualReport]:
    """``η_{,j} = Σ_k V_jk Y_{,k}`` and tangency ``<η_{,j}, Y> = 0`` by differences."""
    pts = _points(points)
    fr = frame_at(pts, field, c, strict=False)
    ok = ~fr.degenerate & np.all(np.isfinite(fr.eta), axis=-1)
    pts, fr = pts[ok], fr.take(ok)
    eu, ev = _d4(lambda z: frame_at(z, field, c, strict=False).eta, pts, step)
    V = fr.V
    pred_u = V[:, 0, 0, None] * fr.Y1 + V[:, 0, 1, None] * fr.Y2
    pred_v = V[:, 1, 0, None] * fr.Y1 + V[:, 1, 1, None] * fr.Y2
    scale = np.maximum(1.0, np.maximum(np.linalg.norm(eu, axis=1), np.linalg.norm(ev, axis=1)))
    caju = np.maximum(np.linalg.norm(eu - pred_u, axis=1), np.linalg.norm(ev - pred_v, axis=1)) / scale
    tang = np.maximum(np.abs(np.sum(eu * fr.Y, axis=1)), np.abs(np.sum(ev * fr.Y, axis=1))) / scale
    skipped = int(np.sum(~ok))
    return [
        _report("eta_derivative_fd", caju, tol, skipped=skipped, seed=seed, step=float(step)),
        _report("eta_tangency_fd", tang, tol, skipped=skipped, seed=seed, step=float(step)),
    ]


def eta_mean_curvature_fd(field: Field, c: float, points, *, step: float = 1e-3, tol: float = 1e-5,
                          seed: int | None = None) -> ResidualReport:
    """Mean curvature of the eta immersion from its fundamental forms (differences only).

    Reported scale-free as ``|H| (EG - F^2)^{1/4}``.
    """
    pts = _points(points)
    fr = frame_at(pts, field, c, strict=False)
    scale = np.sum(fr.V**2, axis=(-2, -1))
    ok = ~fr.degenerate & (np.abs(fr.detV) > REGULAR_MARGIN * scale)
    pts = pts[ok]
    s = step
    offsets = np.array([0, s, -s, 1j * s, -1j * s, s + 1j * s, s - 1j * s, -s + 1j * s, -s - 1j * s])
    eta = frame_at((pts[:, None] + offsets[None, :]).ravel(), field, c, strict=False).eta.reshape(pts.size, 9, 3)
    e0, ep, em, fp, fm, pp, pm, mp, mm = (eta[:, k] for k in range(9))
    xu, xv = (ep - em) / (2 * s), (fp - fm) / (2 * s)
    xuu, xvv = (ep - 2 * e0 + em) / s**2, (fp - 2 * e0 + fm) / s**2
    xuv = (pp - pm - mp + mm) / (4 * s * s)
    n = np.cross(xu, xv)
    area = np.linalg.norm(n, axis=1)
    n = n / area[:, None]
    E, F, G = (np.sum(a * b, axis=1) for a, b in ((xu, xu), (xu, xv), (xv, xv)))
    e, f, g = (np.sum(a * n, axis=1) for a in (xuu, xuv, xvv))
    H = (e * G - 2 * f * F + g * E) / (2 * (E * G - F * F))
    return _report("eta_mean_curvature_fd", H * np.sqrt(area), tol, skipped=int(np.sum(~ok)), seed=seed,
                   step=float(step), scaled=True)


def conformal_form_check(field: Field, c: float, points, *, step: float = 1e-4, tol: float = 1e-6,
                         seed: int | None = None) -> ResidualReport:
    """Anisotropy of ``|dX + R dN|^2`` relative to the sphere metric ``L δ``.

    ``max_abs`` measures departure from proportionality; extras record how well
    the measured factor matches ``(1+R)^2`` and ``1+R^2``.
    """
    pts = _points(points)
    ok = regular_mask(field, c, pts)
    pts = pts[ok]
    Xu, Xv = _d4(lambda z: frame_at(z, field, c, strict=False).X, pts, step)
    Nu, Nv = _d4(lambda z: frame_at(z, field, c, strict=False).N, pts, step)
    fr = frame_at(pts, field, c, strict=False)
    R = curvature_report(fr, strict=False).R
    au, av = Xu + R[:, None] * Nu, Xv + R[:, None] * Nv
    F11, F12, F22 = np.sum(au * au, 1), np.sum(au * av, 1), np.sum(av * av, 1)
    aniso = np.maximum(np.abs(F12), np.abs(F11 - F22)) / (np.abs(F11) + np.abs(F22))
    lam = (F11 + F22) / (2 * fr.L)
    dev_sq = float(np.max(np.abs(lam / (1 + R) ** 2 - 1))) if lam.size else float("nan")
    dev_sum = float(np.max(np.abs(lam / (1 + R**2) - 1))) if lam.size else float("nan")
    best = "(1+R)^2" if dev_sq <= dev_sum else "1+R^2"
    return _report("conformal_form", aniso, tol, skipped=int(np.sum(~ok)), seed=seed,
                   lambda_rel_dev_one_plus_R_squared=dev_sq, lambda_rel_dev_one_plus_R2=dev_sum,
                   best_factor=best)


# --------------------------------------------------------------------------
# full suite


@dataclass(frozen=True)
class SuiteConfig:
    n_points: int = 100
    seed: int = 42
    fd_step: float = 1e-4
    stencil_step: float = 1e-2
    n_centers: int = 20


def run_suite(field: Field, c: float, kind: FieldClass, domain: Domain, cfg: SuiteConfig = SuiteConfig()) -> list[ResidualReport]:
    """Every applicable check on seeded regular points of ``domain``."""
    kind = FieldClass(kind)
    pts, rejected = regular_points(field, c, domain, cfg.n_points, cfg.seed)
    centers = pts[: cfg.n_centers]
    frames = frame_at(pts, field, c, strict=False)
    reports: list[ResidualReport] = []
    if kind is FieldClass.H1:
        reports.append(helmholtz_residual(field, None, pts, seed=cfg.seed))
        reports.append(minimality_residual(field, None, pts, c=c, seed=cfg.seed))
    reports.append(generalized_helmholtz_residual(field, None, centers, cfg.stencil_step, seed=cfg.seed))
    reports.append(laguerre_residual(field, None, centers, cfg.stencil_step, c=c, seed=cfg.seed))
    reports.extend(identity_suite(frames, c, seed=cfg.seed))
    reports.append(weingarten_fd_check(field, c, pts, step=cfg.fd_step, seed=cfg.seed))
    reports.extend(eta_derivative_check(field, c, pts, step=cfg.fd_step, seed=cfg.seed))
    reports.append(conformal_form_check(field, c, pts, step=cfg.fd_step, seed=cfg.seed))
    # sampling rejections count against every point-sampled report
    return [_with_rejections(r, rejected) for r in reports]


def _with_rejections(r: ResidualReport, rejected: int) -> ResidualReport:
    return ResidualReport(r.name, r.max_abs, r.mean_abs, r.points_checked, r.points_skipped_singular + rejected,
                          r.tolerance, r.seed, r.criterion, r.extras)


def all_passed(reports: Iterable[ResidualReport]) -> bool:
    return all(r.passed for r in reports)


__all__ = [
    "ResidualReport", "SuiteConfig", "all_passed", "conformal_form_check", "eta_derivative_check",
    "eta_mean_curvature_fd", "format_kv", "format_table", "generalized_helmholtz_residual",
    "helmholtz_q", "helmholtz_residual", "identity_suite", "laguerre_residual", "minimality_residual",
    "regular_mask", "regular_points", "run_suite", "weingarten_fd_check",
]
