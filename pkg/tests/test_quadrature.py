import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from hsurf.errors import IntegrationError
from hsurf.holo import antiderivative, integrate_segments, parse_expr
from hsurf.holo.quadrature import GAUSS_WEIGHTS, KRONROD_WEIGHTS, NODES


class TestRule:
    def test_kronrod_exact_to_degree_22(self):
        for k in range(23):
            exact = (1 - (-1) ** (k + 1)) / (k + 1)
            assert np.dot(KRONROD_WEIGHTS, NODES**k) == pytest.approx(exact, abs=1e-14)

    def test_embedded_gauss_exact_to_degree_13(self):
        for k in range(14):
            exact = (1 - (-1) ** (k + 1)) / (k + 1)
            assert np.dot(GAUSS_WEIGHTS, NODES**k) == pytest.approx(exact, abs=1e-14)

    def test_gauss_nodes_are_legendre_roots(self):
        roots = np.sort(np.polynomial.legendre.legroots([0] * 7 + [1]))
        np.testing.assert_allclose(NODES[GAUSS_WEIGHTS > 0], roots, atol=1e-15)


class TestAntiderivative:
    def test_polynomial(self):
        assert antiderivative(parse_expr("2*z"), 0, 1 + 1j) == pytest.approx(2j, abs=1e-14)

    def test_exponential(self):
        assert antiderivative(parse_expr("e^z"), 0, 1) == pytest.approx(math.e - 1, abs=1e-14)

    def test_path_independence_exp_times_z(self):
        f = parse_expr("e^z*z")
        exact = cmath.exp(1 + 1j) * 1j + 1  # e^z (z - 1) from 0 to 1+i
        a = antiderivative(f, 0, 1 + 1j, path=[1])
        b = antiderivative(f, 0, 1 + 1j, path=[1j])
        assert abs(a - b) <= 1e-10
        assert abs(a - exact) <= 1e-12

    @pytest.mark.parametrize("text", ["sin(z)*e^z", "1/(z - 3)", "sqrt(z + 2)", "cosh(z)^2"])
    def test_against_mpmath(self, text):
        f = parse_expr(text)
        z1 = 0.8 + 1.2j
        from hsurf.holo import eval_values

        ref = mpmath.quad(lambda t: complex(eval_values(f, complex(z1 * float(t)))) * z1, [0, 1])
        assert abs(antiderivative(f, 0, z1) - complex(ref)) <= 1e-12

    def test_vectorised_endpoints(self):
        ends = np.array([0.5, 1j, -1 + 0.3j, 0.0])
        out = antiderivative(parse_expr("3*z^2"), 0, ends)
        np.testing.assert_allclose(out, ends**3, atol=1e-13)

    def test_pole_on_path_raises(self):
        with pytest.raises(IntegrationError, match="pole"):
            antiderivative(parse_expr("1/z"), -1, 1)

    def test_pole_on_path_lenient_gives_nan(self):
        out = antiderivative(parse_expr("1/z"), -1, np.array([1.0, -0.5]), strict=False)
        assert np.isnan(out[0]) and out[1] == pytest.approx(math.log(0.5), abs=1e-12)

    def test_routing_around_pole(self):
        # upper and lower half-plane routes differ by the residue 2*pi*i
        f = parse_expr("1/z")
        up = antiderivative(f, -1, 1, path=[-1 + 1j, 1 + 1j])
        down = antiderivative(f, -1, 1, path=[-1 - 1j, 1 - 1j])
        assert up - down == pytest.approx(-2j * math.pi, abs=1e-11)


@given(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5), st.floats(-1.5, 1.5), st.floats(-1.5, 1.5))
def test_homotopic_paths_agree(x, y, px, py):
    f = parse_expr("e^z*sin(z) + z^3")
    end, via = complex(x, y), complex(px, py)
    direct = antiderivative(f, 0, end)
    routed = antiderivative(f, 0, end, path=[via])
    assert abs(direct - routed) <= 1e-10


def test_zero_length_segment():
    assert integrate_segments(parse_expr("e^z"), 1j, 1j) == 0
