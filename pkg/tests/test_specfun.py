import math

import numpy as np
import pytest
import scipy.special
from hypothesis import given
from hypothesis import strategies as st

from pqdslln.errors import DomainError
from pqdslln.specfun import HypergeometricArgs, gamma, gauss_2f1, pochhammer


class TestGamma:
    def test_integers(self):
        assert gamma(1.0) == pytest.approx(1.0, rel=1e-14)
        assert gamma(5.0) == pytest.approx(24.0, rel=1e-14)

    def test_half(self):
        assert gamma(0.5) == pytest.approx(1.7724538509055159, rel=1e-13)

    def test_against_reference_grid(self):
        # contract: relative error <= 1e-12 on [0.5, 50]
        for x in np.linspace(0.5, 50.0, 997):
            assert gamma(float(x)) == pytest.approx(math.gamma(x), rel=1e-12)

    @given(st.floats(min_value=0.5, max_value=49.0))
    def test_recurrence(self, x):
        assert gamma(x + 1.0) == pytest.approx(x * gamma(x), rel=1e-12)

    @pytest.mark.parametrize("x", [0.0, -1.0, -0.5, math.nan])
    def test_domain(self, x):
        with pytest.raises(DomainError):
            gamma(x)


class TestPochhammer:
    def test_empty_product(self):
        assert pochhammer(3.7, 0) == 1.0

    def test_small(self):
        assert pochhammer(3.0, 2) == 12.0

    def test_zero_factor(self):
        assert pochhammer(-1.0, 2) == 0.0

    @given(st.floats(min_value=0.1, max_value=20.0), st.integers(min_value=0, max_value=20))
    def test_gamma_ratio(self, a, n):
        assert pochhammer(a, n) == pytest.approx(gamma(a + n) / gamma(a), rel=1e-10)

    def test_negative_n(self):
        with pytest.raises(DomainError):
            pochhammer(1.0, -1)


class TestGauss2F1:
    @given(
        st.floats(min_value=-5.0, max_value=5.0),
        st.floats(min_value=-5.0, max_value=5.0),
        st.floats(min_value=0.3, max_value=6.0),
    )
    def test_z_zero(self, a, b, c):
        assert gauss_2f1(a, b, c, 0.0) == 1.0

    @given(st.floats(min_value=-0.99, max_value=0.99))
    def test_two_term_polynomial(self, z):
        # (-1, 1/2; 3/2): single correction term (-1)(1/2)/(3/2) z = -z/3
        assert gauss_2f1(-1.0, 0.5, 1.5, z) == pytest.approx(1.0 - z / 3.0, abs=1e-14)

    def test_log_identity(self):
        # 2F1(1, 1; 2; z) = -log(1 - z) / z
        assert gauss_2f1(1.0, 1.0, 2.0, 0.5) == pytest.approx(1.3862943611198906, rel=1e-13)
        for z in (-0.7, 0.1, 0.9):
            assert gauss_2f1(1.0, 1.0, 2.0, z) == pytest.approx(-math.log1p(-z) / z, rel=1e-12)

    @given(
        st.floats(min_value=-4.0, max_value=4.0),
        st.floats(min_value=-4.0, max_value=4.0),
        st.floats(min_value=0.5, max_value=8.0),
        st.floats(min_value=-0.9, max_value=0.9),
    )
    def test_symmetry_in_ab(self, a, b, c, z):
        assert gauss_2f1(a, b, c, z) == pytest.approx(gauss_2f1(b, a, c, z), rel=1e-12, abs=1e-12)

    @pytest.mark.parametrize("m", [0, 1, 2, 3, 5])
    def test_terminating_is_polynomial(self, m):
        # degree-m polynomial: interpolating m+2 samples reproduces it
        a, b, c = -float(m), 1.3, 2.7
        xs = np.linspace(-2.0, 2.0, m + 2)
        ys = [gauss_2f1(a, b, c, float(x)) for x in xs]
        coeffs = np.polynomial.polynomial.polyfit(xs, ys, m)
        for z in np.linspace(-3.0, 3.0, 7):
            interp = float(np.polynomial.polynomial.polyval(z, coeffs))
            assert gauss_2f1(a, b, c, float(z)) == pytest.approx(interp, rel=1e-12, abs=1e-12)

    @given(
        st.floats(min_value=-3.0, max_value=3.0),
        st.floats(min_value=-3.0, max_value=3.0),
        st.floats(min_value=0.5, max_value=6.0),
        st.floats(min_value=-0.8, max_value=0.8),
    )
    def test_against_scipy(self, a, b, c, z):
        expected = float(scipy.special.hyp2f1(a, b, c, z))
        assert gauss_2f1(a, b, c, z) == pytest.approx(expected, rel=1e-9, abs=1e-9)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            gauss_2f1(1.0, 1.0, 0.0, 0.5)  # c = 0
        with pytest.raises(DomainError):
            gauss_2f1(1.0, 1.0, -2.0, 0.5)  # c negative integer
        with pytest.raises(DomainError):
            gauss_2f1(1.1, 1.0, 2.0, 1.0)  # |z| >= 1 without termination
        with pytest.raises(DomainError):
            gauss_2f1(0.5, 0.5, 1.5, -1.5)

    def test_terminating_allows_large_z(self):
        # a = -2 terminates, so |z| >= 1 is fine
        value = gauss_2f1(-2.0, 1.0, 3.0, 2.0)
        expected = 1.0 + (-2.0 * 1.0 / 3.0) * 2.0 + ((-2.0) * (-1.0) * 1.0 * 2.0 / (3.0 * 4.0)) * 4.0 / 2.0
        assert value == pytest.approx(expected, rel=1e-14)

    def test_args_bundle(self):
        args = HypergeometricArgs(a=-1.0, b=0.5, c=1.5, z=0.25)
        assert args.evaluate() == pytest.approx(1.0 - 0.25 / 3.0, abs=1e-14)
        with pytest.raises(DomainError):
            HypergeometricArgs(a=0.5, b=0.5, c=1.5, z=1.0)
