import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from hsurf.geometry import frame_at
from hsurf.rotational import (
    KNOWN_ERRATA, RadialField, RotH1Params, RotH2Params, closed_form_profile, compare_profile, count_kinds,
    discrepancy_table, format_discrepancy_table, generic_profile, profile_samples, rot_h1_profile,
    rot_h2_profile, rot_h_value, sign_class_sweep, singularity_scan,
)
from hsurf.verify import helmholtz_residual, minimality_residual

US = np.linspace(-2, 2, 401)
params_h1 = st.builds(RotH1Params, st.floats(0.2, 2), st.floats(-2, 2), st.floats(0.5, 2))
params_h2 = st.builds(RotH2Params, *(st.floats(-2, 2) for _ in range(4)), st.floats(0.5, 2))


class TestCatenoid:
    """a1 = a2 = 1: eta is the catenoid with meridian (cosh u, u)."""

    p = RotH1Params(1.0, 1.0)

    def test_profile(self):
        err = max(max(abs(s.M1 - math.cosh(s.u)), abs(s.N1 - s.u)) for s in profile_samples(self.p, US))
        assert err <= 1e-12

    def test_minimal(self):
        assert minimality_residual(RadialField(self.p), None, US + 0.3j).max_abs <= 1e-8


def test_h2_sphere_profile():
    # h = (-1 + 2 e^{2u}) / (1 + e^{2u}); eta meridian lies on the circle of radius 1/2 about (0, -3/2)
    p = RotH2Params(-1.0, 2.0, 0.0, 0.0)
    for u in np.linspace(-4, 4, 401):
        s = rot_h2_profile(p, u)
        assert abs(s.M1**2 + (s.N1 + 1.5) ** 2 - 0.25) <= 1e-12


class TestRadialH:
    def test_h1_value(self):
        # at u = 0: h = a1, h' = -(a2 - a1)
        j = rot_h_value(RotH1Params(2.0, 5.0), 0.0)
        assert (j.val, j.g1) == pytest.approx((2.0, -3.0))
        assert j.g2 == 0 and j.h22 == 0

    def test_h2_limits(self):
        p = RotH2Params(1.0, 3.0, 0.0, 0.0)
        assert rot_h_value(p, -40.0).val == pytest.approx(1.0)
        assert rot_h_value(p, 40.0).val == pytest.approx(3.0)
        assert np.isfinite(rot_h_value(p, np.array([-800.0, 800.0])).val).all()

    @given(params_h2, st.floats(-3, 3))
    def test_h2_derivatives(self, p, u):
        e = 1e-5
        f = lambda x: rot_h_value(p, x).val  # noqa: E731
        j = rot_h_value(p, u)
        assert abs(j.g1 - (f(u + e) - f(u - e)) / (2 * e)) <= 1e-6 * max(1, abs(j.g1))
        assert abs(j.h11 - (f(u + e) - 2 * f(u) + f(u - e)) / e**2) <= 1e-3

    @settings(max_examples=30)
    @given(params_h1, st.floats(-2, 2), st.floats(-3, 3))
    def test_h1_radial_fields_are_helmholtz(self, p, u, v):
        assert helmholtz_residual(RadialField(p), None, complex(u, v)).max_abs <= 1e-8

    def test_validation(self):
        with pytest.raises(ValueError):
            RotH1Params(0.0, 0.0)
        with pytest.raises(ValueError):
            RotH2Params(1, 1, 1, 1, c=0.0)


class TestRadiality:
    @given(params_h1, st.floats(-2, 2), st.floats(-3, 3))
    def test_rotation_about_axis(self, p, u, v):
        fr = generic_profile(p, np.array([u]))
        rot = frame_at(np.array([complex(u, v)]), RadialField(p), p.c, strict=False)
        expect = np.array([math.cos(v) * fr.X[0, 0], math.sin(v) * fr.X[0, 0], fr.X[0, 2]])
        assert np.allclose(rot.X[0], expect, atol=1e-9 * max(1, np.abs(fr.X).max()))


class TestClosedForm:
    @given(params_h1, st.floats(-2, 2))
    def test_h1_matches_pipeline(self, p, u):
        row = compare_profile(p, [u])
        assert row.samples == 0 or row.agrees

    @given(params_h2, st.floats(-2, 2))
    def test_h2_corrected_matches_pipeline(self, p, u):
        row = compare_profile(p, [u], corrected=True)
        assert row.samples == 0 or row.agrees

    def test_printed_h2_height_disagrees(self):
        row = compare_profile(RotH2Params(1, 1, 1, 1), np.linspace(-2, 2, 41))
        assert row.max_rel["M"] <= 1e-12 and row.max_rel["M1"] <= 1e-12 and row.max_rel["N1"] <= 1e-12
        assert row.max_rel["N"] > 1e-2
        assert "H2.N.r2" in KNOWN_ERRATA

    def test_printed_h2_height_agrees_without_c2(self):
        # the misplaced group carries a factor c2
        row = compare_profile(RotH2Params(0.5, -1.2, 0.7, 0.0, 1.3), np.linspace(-2, 2, 41))
        assert row.agrees

    def test_table_is_deterministic(self):
        a = format_discrepancy_table(discrepancy_table("h2", 5, seed=3))
        b = format_discrepancy_table(discrepancy_table("h2", 5, seed=3))
        assert a == b and len(a.splitlines()) == 6

    def test_pole_gives_nan(self):
        # h = 0 makes both denominators vanish identically
        assert all(math.isnan(x) for x in closed_form_profile(RotH2Params(0, 0, 0, 0), 0.0))


class TestScan:
    def test_h1_unit(self):
        s = singularity_scan(RotH1Params(1.0, 1.0), (-4, 4))
        assert count_kinds(s) == {"isolated": 2, "circle": 2}
        # symmetric under u -> -u
        us = sorted(x.u for x in s)
        assert us[0] == pytest.approx(-us[-1], abs=1e-9)

    def test_h1_a2_three(self):
        assert count_kinds(singularity_scan(RotH1Params(1.0, 3.0), (-3, 3))) == {"isolated": 1, "circle": 1}

    def test_roots_are_zeros_of_P(self):
        p = RotH1Params(1.0, 3.0)
        for s in singularity_scan(p, (-3, 3)):
            fr = generic_profile(p, np.array([s.u]))
            assert abs(fr.P[0]) <= 1e-8 * fr.S[0] ** 2
            assert rot_h1_profile(p, s.u).singular_X

    def test_complete_eta(self):
        assert singularity_scan(RotH2Params(-1, 2, 2, -1), (-6, 6), surface="eta") == []

    def test_catenoid_eta_is_regular(self):
        assert singularity_scan(RotH1Params(1.0, 1.0), (-3, 3), surface="eta") == []

    def test_argument_checks(self):
        with pytest.raises(ValueError):
            singularity_scan(RotH1Params(1, 1), (-1, 1), resolution=1)
        with pytest.raises(ValueError):
            singularity_scan(RotH1Params(1, 1), (-1, 1), surface="Y")


class TestRadialEta:
    @given(params_h2, st.floats(-2, 2), st.floats(-3, 3))
    def test_eta_norm_and_height_constant_in_v(self, p, u, v):
        f = RadialField(p)
        a = frame_at(np.array([complex(u, 0.0)]), f, p.c, strict=False).eta[0]
        b = frame_at(np.array([complex(u, v)]), f, p.c, strict=False).eta[0]
        scale = max(1.0, np.linalg.norm(a))
        assert abs(np.linalg.norm(a) - np.linalg.norm(b)) <= 1e-10 * scale
        assert abs(a[2] - b[2]) <= 1e-10 * scale

    @given(st.floats(-2, 2), st.floats(-2, 2))
    def test_no_c_terms_gives_sphere(self, a2, a3):
        assume(abs(a2) + abs(a3) > 1e-3)  # h = 0 collapses eta to a point
        # the meridian lies on one circle centred on the axis
        s = profile_samples(RotH2Params(a2, a3, 0.0, 0.0), np.linspace(-3, 3, 31))
        M, N = np.array([x.M1 for x in s]), np.array([x.N1 for x in s])
        # least squares for M^2 + N^2 = 2 k N + r: a circle centred at (0, k)
        coef, *_ = np.linalg.lstsq(np.stack([2 * N, np.ones_like(N)], axis=1), M**2 + N**2, rcond=None)
        resid = M**2 + N**2 - 2 * coef[0] * N - coef[1]
        assert np.max(np.abs(resid)) <= 1e-10 * max(1.0, np.max(M**2 + N**2))


class TestSignClassSweep:
    def test_stated_possibilities(self):
        res = {r.sign_class: r for r in sign_class_sweep(50)}
        for cls in ("c1c2>0", "c1c2<0", "c1=0,c2!=0", "c1=c2=0"):
            assert res[cls].consistent == res[cls].total == 50, cls
        assert res["c1=c2=0"].patterns == {(0, 0): 50}
        # a complete case occurs when c1 c2 < 0
        assert res["c1c2<0"].patterns.get((0, 0), 0) > 0

    def test_circle_with_c2_zero_may_lie_outside_default_window(self):
        narrow = sign_class_sweep(50, classes=["c1!=0,c2=0"])[0]
        wide = sign_class_sweep(50, classes=["c1!=0,c2=0"], u_range=(-16, 16), resolution=8001)[0]
        assert narrow.consistent < 50 and wide.consistent == 50
