"""Rotational H1 / H2 surfaces (g = e^z, radial h) and their profile curves.

The closed-form profiles below are transcribed coefficient by coefficient; the
generic frame pipeline is the reference they are regression-tested against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

from .field import FieldClass, RealJet2
from .geometry import frame_at
from .holo import Exp, Var

G_EXP = Exp(Var())

AXIS_TOL = 1e-8
BISECT_TOL = 1e-10
TANGENT_PRECHECK = 1e-3  # grid minima above this cannot hide a double root


@dataclass(frozen=True)
class RotH1Params:
    """``h = a1 - (a2 + a1 (u - 1)) tanh u``."""

    a1: float
    a2: float
    c: float = 1.0
    kind = FieldClass.H1

    def __post_init__(self):
        if self.c == 0:
            raise ValueError("c must be nonzero")
        if self.a1 == 0 and self.a2 == 0:
            raise ValueError("(a1, a2) = (0, 0) makes eta degenerate")


@dataclass(frozen=True)
class RotH2Params:
    """``h = (a2 + c1 u + e^{2u} (a3 + c2 u)) / (1 + e^{2u})``."""

    a2: float
    a3: float
    c1: float
    c2: float
    c: float = 1.0
    kind = FieldClass.H2

    def __post_init__(self):
        if self.c == 0:
            raise ValueError("c must be nonzero")


RotParams = Union[RotH1Params, RotH2Params]


def rot_h_value(params: RotParams, u) -> RealJet2:
    """Radial h and its derivatives; all v-derivatives vanish."""
    u = np.asarray(u, dtype=float) if np.ndim(u) else float(u)
    if isinstance(params, RotH1Params):
        a1, a2 = params.a1, params.a2
        t = np.tanh(u)
        sech2 = 1.0 - t * t
        lin = a2 + a1 * (u - 1.0)
        val = a1 - lin * t
        d1 = -a1 * t - lin * sech2
        d2 = -2.0 * a1 * sech2 + 2.0 * lin * sech2 * t
        return RealJet2.univariate(val, d1, d2)
    p = params
    # divide through by e^{2u} for u > 0 to keep the quotient finite
    e = np.exp(-2.0 * np.abs(u))
    pos = u > 0
    lo_num = p.a2 + p.c1 * u
    hi_num = p.a3 + p.c2 * u
    # h = (lo + E hi)/(1 + E), E = e^{2u}; with s = E/(1+E) (logistic of 2u): h = lo + s (hi - lo)
    s = np.where(pos, 1.0 / (1.0 + e), e / (1.0 + e))
    ds = 2.0 * s * (1.0 - s)
    d2s = 2.0 * ds * (1.0 - 2.0 * s)
    diff = hi_num - lo_num
    ddiff = p.c2 - p.c1
    val = lo_num + s * diff
    d1 = p.c1 + ds * diff + s * ddiff
    d2 = d2s * diff + 2.0 * ds * ddiff
    if np.ndim(u) == 0:
        val, d1, d2 = float(val), float(d1), float(d2)
    return RealJet2.univariate(val, d1, d2)


@dataclass(frozen=True)
class RadialField:
    """Field adapter: g = e^z with the radial h of ``params``."""

    params: RotParams
    g = G_EXP

    def jet(self, z, strict: bool = True) -> RealJet2:
        return rot_h_value(self.params, np.real(z))


# --------------------------------------------------------------------------
# closed-form profiles


def _h1_profile(p: RotH1Params, u: float):
    a1, a2, c = p.a1, p.a2, p.c
    E = math.exp(2 * u)
    eu = math.exp(u)
    l1 = E * E + 4 * E * (u - 1) - 1
    l2 = 1 - 2 * u + E * E * (2 * u - 3) + E * (2 - 8 * u + 4 * u * u)
    p1 = a2 * (E - 1) - 2 * c * (1 + E)
    p2 = c * (1 + E) * (u - 1) + a2 * (u - E * (u - 2))
    p3 = 1 - E**3 + E * (5 - 4 * u * u) + E * E * (11 - 16 * u + 4 * u * u)
    den = (1 + E) * (4 * a2 * a2 * E + 8 * a1 * a2 * E * (u - 1)
                     + a1 * a1 * (1 + E * E + E * (6 - 8 * u + 4 * u * u)))
    M = 2 * eu * (4 * a2 * a2 * E + 2 * a2 * a1 * l1 + a1 * (-2 * c * (1 + E) ** 2 + a1 * l2))
    N = 4 * a2 * E * p1 - 8 * a1 * E * p2 + a1 * a1 * p3
    M1 = a1 * (1 + E) / (2 * eu)
    N1 = a2 + a1 * (u - 1)
    return M / den, N / den, M1, N1, den


def _h2_profile(p: RotH2Params, u: float, corrected: bool = False):
    a2, a3, c1, c2, c = p.a2, p.a3, p.c1, p.c2, p.c
    E = math.exp(2 * u)
    eu = math.exp(u)
    q1 = c1 * (1 - 2 * u) + c2 * E
    q2 = c1 + E * (2 * a3 + c2 + 2 * c2 * u)
    q3 = c1 + E * (2 * a3 + 2 * c + c2 + 2 * c2 * u)
    q4 = E * (2 * a3 + c2 - c2 * E + 2 * c2 * u)
    q5 = c1 * (1 + E * (2 * u - 1))
    q6 = 4 * a2 * a2 * E - 4 * a2 * c2 * E * E + c1 * c1 * (1 + E * (1 - 2 * u) ** 2)
    q7 = -2 * a3 + a2 * (2 - 4 * u) + c2 * (-1 - 2 * u + E * (2 * u - 1))
    q8 = 4 * a3 * a3 + 4 * a3 * (c2 + 2 * c2 * u) + c2 * c2 * (E + (1 + 2 * u) ** 2)
    r1 = (2 * a3 + 4 * c + c2 - c2 * E + a2 * (2 - 4 * u) - 4 * c * u + 2 * c2 * u + 2 * c2 * E * u)
    r2_tail = c2 * (8 * c * (u + 1) + c2 * ((1 + 2 * u) ** 2 - E))
    if corrected:
        # the trailing c2 group belongs inside the e^{2u}(...) bracket
        r2_tail *= E
    r2 = (-4 * a2 * a2 + a2 * (4 * c2 * E - 8 * c) + E * (4 * a3 * a3 + 4 * a3 * (2 * c + c2 + 2 * c2 * u))
          + r2_tail)
    r3 = 4 * a2 * a2 * E - 4 * a2 * c2 * E * E + c1 * c1 * (1 + E * (1 - 2 * u) ** 2)
    r4 = -2 * a3 + a2 * (2 - 4 * u) + c2 * (E * (2 * u - 1) - 1 - 2 * u)
    r5 = 4 * a3 * a3 + 4 * a3 * (c2 + 2 * c2 * u) + c2 * c2 * (E + (1 + 2 * u) ** 2)
    den_m = q6 - 2 * c1 * E * q7 + E * E * q8
    den_n = r3 - 2 * c1 * E * r4 + E * E * r5
    M = 2 * eu * (q1 * q2 - 2 * a2 * q3 - 2 * c * (q4 + q5)) / den_m
    N = (c1 * c1 * (1 - E * (1 - 2 * u) ** 2) + 2 * c1 * E * r1 + E * r2) / den_n
    M1 = (math.exp(-u) * (E * (2 * a2 + 2 * a3 + c2 - c2 * E + 2 * c2 * u) + c1 * (1 + E * (2 * u - 1)))
          / (2 * (1 + E)))
    N1 = (a2 + c1 * (u - 1) - E * (a3 + c2 + c2 * u)) / (1 + E)
    return M, N, M1, N1, den_m * den_n


KNOWN_ERRATA = {
    "H2.N.r2": "printed r2 ends with + c2(8c(u+1) + c2((1+2u)^2 - e^{2u})) outside the e^{2u} bracket; "
               "the construction requires that group multiplied by e^{2u}",
}


@dataclass(frozen=True)
class ProfileSample:
    u: float
    M: float
    N: float
    M1: float
    N1: float
    P: float
    detV: float
    singular_X: bool
    singular_eta: bool


def closed_form_profile(params: RotParams, u: float, *, corrected: bool = False) -> tuple[float, float, float, float]:
    """(M, N, M1, N1) from the printed formulas; NaN where a denominator vanishes.

    ``corrected=True`` repairs the one coefficient of the H2 height N that
    disagrees with the construction (see :data:`KNOWN_ERRATA`).
    """
    try:
        if isinstance(params, RotH1Params):
            M, N, M1, N1, _den = _h1_profile(params, float(u))
        else:
            M, N, M1, N1, _den = _h2_profile(params, float(u), corrected)
    except (ZeroDivisionError, OverflowError):
        return (math.nan,) * 4
    return M, N, M1, N1


def generic_profile(params: RotParams, u):
    """The frame pipeline at (u, v = 0): returns the frame (array or scalar)."""
    return frame_at(np.asarray(u, dtype=float) + 0j, RadialField(params), params.c, strict=False)


def _profile(params: RotParams, u: float) -> ProfileSample:
    M, N, M1, N1 = closed_form_profile(params, u)
    fr = generic_profile(params, np.array([u]))
    return ProfileSample(
        u=float(u), M=M, N=N, M1=M1, N1=N1,
        P=float(fr.P[0]), detV=float(fr.detV[0]),
        singular_X=bool(fr.singular_X[0]) or not math.isfinite(M + N),
        singular_eta=bool(fr.singular_eta[0]),
    )


def rot_h1_profile(params: RotH1Params, u: float) -> ProfileSample:
    return _profile(params, u)


def rot_h2_profile(params: RotH2Params, u: float) -> ProfileSample:
    return _profile(params, u)


def profile_samples(params: RotParams, us: Iterable[float]) -> list[ProfileSample]:
    return [_profile(params, u) for u in us]


# --------------------------------------------------------------------------
# singularity scan


@dataclass(frozen=True)
class Singularity:
    u: float
    kind: str  # 'isolated' | 'circle'
    surface: str  # 'X' | 'eta'


def _indicator(params: RotParams, surface: str):
    """Scale-free regularity function of u whose zeros are the singular parallels."""
    def fn(u):
        fr = generic_profile(params, np.atleast_1d(u))
        if surface == "X":
            val = fr.P / fr.S**2
        else:
            val = fr.detV / np.sum(fr.V**2, axis=(-2, -1))
        return val, fr
    return fn


def _radius(fr, surface: str):
    pts = fr.X if surface == "X" else fr.eta
    return np.hypot(pts[..., 0], pts[..., 1])


def singularity_scan(params: RotParams, u_range: tuple[float, float], resolution: int = 2001,
                     *, surface: str = "X") -> list[Singularity]:
    """Locate zeros of P (surface X) or det V (surface eta) in ``u_range``.

    Sign changes are refined by bisection to ``|Δu| <= 1e-10``; a root whose
    profile point lies on the axis (|M| <= 1e-8) is an isolated singular point,
    any other root a circle of singularities.  Double roots (touching zero
    without a sign change) are caught as near-zero local minima of |indicator|.
    """
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    if surface not in ("X", "eta"):
        raise ValueError("surface must be 'X' or 'eta'")
    lo, hi = map(float, u_range)
    fn = _indicator(params, surface)
    us = np.linspace(lo, hi, int(resolution))
    vals, _ = fn(us)
    roots: list[float] = []
    for k in range(len(us) - 1):
        a, b, fa, fb = us[k], us[k + 1], vals[k], vals[k + 1]
        if fa == 0:
            roots.append(a)
        elif np.sign(fa) * np.sign(fb) < 0:
            roots.append(_bisect(fn, a, b, fa))
    if vals[-1] == 0:
        roots.append(us[-1])
    # tangential zeros: local minima of |f| that nearly vanish
    mag = np.abs(vals)
    for k in range(1, len(us) - 1):
        strict_min = mag[k] <= mag[k - 1] and mag[k] <= mag[k + 1] and (mag[k] < mag[k - 1] or mag[k] < mag[k + 1])
        if strict_min and mag[k] < TANGENT_PRECHECK and np.sign(vals[k - 1]) == np.sign(vals[k + 1]) != 0:
            u_star, f_star = _golden_min(lambda x: abs(fn(x)[0][0]), us[k - 1], us[k + 1])
            if f_star < 1e-9:
                roots.append(u_star)
    merged: list[float] = []
    for r in sorted(roots):
        if not merged or r - merged[-1] > 10 * BISECT_TOL:
            merged.append(r)
    roots = merged
    out = []
    for r in roots:
        _, fr = fn(r)
        kind = "isolated" if _radius(fr, surface)[0] <= AXIS_TOL else "circle"
        out.append(Singularity(u=float(r), kind=kind, surface=surface))
    return out


def _bisect(fn, a: float, b: float, fa: float) -> float:
    while b - a > BISECT_TOL:
        m = 0.5 * (a + b)
        fm = fn(m)[0][0]
        if fm == 0:
            return m
        if np.sign(fm) == np.sign(fa):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def _golden_min(f, a: float, b: float):
    invphi = (math.sqrt(5) - 1) / 2
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > BISECT_TOL:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    m = 0.5 * (a + b)
    return m, f(m)


def count_kinds(sings: list[Singularity]) -> dict[str, int]:
    return {"isolated": sum(s.kind == "isolated" for s in sings),
            "circle": sum(s.kind == "circle" for s in sings)}


# --------------------------------------------------------------------------
# closed form vs generic pipeline

PROFILE_FIELDS = ("M", "N", "M1", "N1")
AGREEMENT_TOL = 1e-8
REGULARITY_MARGIN = 1e-6  # skip samples this close (scale-free) to a singular parallel


@dataclass(frozen=True)
class DiscrepancyRow:
    params: RotParams
    max_rel: dict  # field name -> max relative error over the regular samples
    samples: int

    @property
    def agrees(self) -> bool:
        return all(v <= AGREEMENT_TOL for v in self.max_rel.values())


def random_params(kind: str, rng: np.random.Generator) -> RotParams:
    """Parameters drawn from [-2, 2] with c from [0.5, 2]; H1 draws avoid a1 = a2 = 0."""
    c = float(rng.uniform(0.5, 2.0))
    if kind == "h1":
        a1, a2 = rng.uniform(-2, 2, 2)
        return RotH1Params(float(a1), float(a2), c)
    if kind == "h2":
        a2, a3, c1, c2 = rng.uniform(-2, 2, 4)
        return RotH2Params(float(a2), float(a3), float(c1), float(c2), c)
    raise ValueError(f"unknown class {kind!r}")


def compare_profile(params: RotParams, us, *, corrected: bool = False) -> DiscrepancyRow:
    """Max relative deviation of each closed-form coordinate from the frame pipeline."""
    us = np.asarray(us, dtype=float)
    fr = generic_profile(params, us)
    regular = np.abs(fr.P) > REGULARITY_MARGIN * fr.S**2
    errs = {k: 0.0 for k in PROFILE_FIELDS}
    n = 0
    for i in np.flatnonzero(regular):
        ref = (fr.X[i, 0], fr.X[i, 2], fr.eta[i, 0], fr.eta[i, 2])
        got = closed_form_profile(params, us[i], corrected=corrected)
        if not all(map(math.isfinite, got + ref)):
            continue
        n += 1
        for k, a, b in zip(PROFILE_FIELDS, got, ref):
            errs[k] = max(errs[k], abs(a - b) / max(1.0, abs(b)))
    return DiscrepancyRow(params, errs, n)


def discrepancy_table(kind: str, n_sets: int = 50, *, seed: int = 42, u_range=(-2.0, 2.0), n_u: int = 41,
                      corrected: bool = False) -> list[DiscrepancyRow]:
    rng = np.random.default_rng(seed)
    us = np.linspace(*u_range, n_u)
    return [compare_profile(random_params(kind, rng), us, corrected=corrected) for _ in range(n_sets)]


def format_discrepancy_table(rows: list[DiscrepancyRow]) -> str:
    head = "params".ljust(48) + "".join(k.rjust(11) for k in PROFILE_FIELDS) + "  samples  agrees"
    lines = [head]
    for r in rows:
        vals = ",".join(f"{v:.3g}" for v in vars(r.params).values())
        lines.append(f"{type(r.params).__name__}({vals})".ljust(48)
                     + "".join(f"{r.max_rel[k]:11.2e}" for k in PROFILE_FIELDS)
                     + f"  {r.samples:7d}  {'yes' if r.agrees else 'no'}")
    return "\n".join(lines)


# --------------------------------------------------------------------------
# singularity kinds of the H2 companion eta, by sign class of c1 c2

SIGN_CLASSES = ("c1c2>0", "c1c2<0", "c1=0,c2!=0", "c1!=0,c2=0", "c1=c2=0")


def _claim_holds(sign_class: str, counts: dict[str, int]) -> bool:
    iso, circ = counts["isolated"], counts["circle"]
    if sign_class == "c1c2>0":
        return iso >= 1 and circ >= 1
    if sign_class == "c1=0,c2!=0":
        return iso + circ >= 1
    if sign_class == "c1!=0,c2=0":
        return circ >= 1
    if sign_class == "c1=c2=0":
        return iso + circ == 0
    return True  # c1c2<0: every pattern is admissible


def _draw_in_class(sign_class: str, rng: np.random.Generator) -> RotH2Params:
    a2, a3 = rng.uniform(-2, 2, 2)
    m1, m2 = rng.uniform(0.2, 2, 2)
    s1, s2 = rng.choice([-1.0, 1.0], 2)
    c1, c2 = {
        "c1c2>0": (s1 * m1, s1 * m2),
        "c1c2<0": (s1 * m1, -s1 * m2),
        "c1=0,c2!=0": (0.0, s2 * m2),
        "c1!=0,c2=0": (s1 * m1, 0.0),
        "c1=c2=0": (0.0, 0.0),
    }[sign_class]
    return RotH2Params(float(a2), float(a3), float(c1), float(c2), 1.0)


@dataclass(frozen=True)
class SweepResult:
    sign_class: str
    patterns: dict  # (isolated, circle) -> number of parameter sets
    consistent: int  # sets matching the class's stated possibility
    total: int


def sign_class_sweep(n_per_class: int = 50, *, seed: int = 42, u_range=(-6.0, 6.0),
                     resolution: int = 2001, classes: Iterable[str] = SIGN_CLASSES) -> list[SweepResult]:
    """Scan eta for random H2 parameters in each sign class and tally the kinds found.

    Counts are for the finite window only; a singular parallel outside it is not seen.
    Each class draws from its own seeded stream, so restricting ``classes`` does not
    change the parameters drawn for the others.
    """
    out = []
    for k, cls in enumerate(SIGN_CLASSES):
        if cls not in classes:
            continue
        rng = np.random.default_rng([seed, k])
        patterns: dict[tuple[int, int], int] = {}
        consistent = 0
        for _ in range(n_per_class):
            counts = count_kinds(singularity_scan(_draw_in_class(cls, rng), u_range, resolution, surface="eta"))
            key = (counts["isolated"], counts["circle"])
            patterns[key] = patterns.get(key, 0) + 1
            consistent += _claim_holds(cls, counts)
        out.append(SweepResult(cls, dict(sorted(patterns.items())), consistent, n_per_class))
    return out
