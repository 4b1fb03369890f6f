import math

import numpy as np
import pytest
from scipy import integrate

from gammagof.errors import DomainError
from gammagof.special import (
    GammaParams,
    digamma,
    erf_paper,
    erfcx,
    gamma_cdf,
    gamma_pdf,
    gamma_quantile,
    ln_gamma,
    std_gamma_pdf,
    trigamma,
    upper_inc_gamma,
)


class TestLnGamma:
    def test_known_values(self):
        assert ln_gamma(1.0) == pytest.approx(0.0, abs=1e-13)
        assert ln_gamma(5.0) == pytest.approx(math.log(24.0), rel=1e-12)
        assert ln_gamma(0.5) == pytest.approx(0.5 * math.log(math.pi), rel=1e-12)

    def test_recurrence(self):
        xs = np.logspace(-1.3, 2, 80)
        lhs = ln_gamma(xs + 1.0) - ln_gamma(xs)
        assert np.allclose(lhs, np.log(xs), rtol=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            ln_gamma(0.0)
        with pytest.raises(DomainError):
            ln_gamma(-2.0)
        with pytest.raises(DomainError):
            ln_gamma(float("nan"))


class TestDigammaTrigamma:
    def test_euler_mascheroni(self):
        assert digamma(1.0) == pytest.approx(-0.5772156649015329, abs=1e-12)

    def test_trigamma_known(self):
        assert trigamma(1.0) == pytest.approx(math.pi**2 / 6.0, rel=1e-12)
        assert trigamma(0.5) == pytest.approx(math.pi**2 / 2.0, rel=1e-12)

    def test_recurrences(self):
        xs = np.logspace(math.log10(0.05), 2, 200)
        d = digamma(xs + 1.0) - digamma(xs)
        assert np.allclose(d, 1.0 / xs, rtol=1e-10)
        t = trigamma(xs + 1.0) - trigamma(xs)
        assert np.allclose(t, -1.0 / xs**2, rtol=1e-10)

    def test_trigamma_positive(self):
        xs = np.logspace(-2, 3, 50)
        assert np.all(trigamma(xs) > 0.0)

    def test_digamma_log_sandwich(self):
        # -1/(2x) - 1/x^2 < psi(x) - log(x) < -1/(2x), strictly
        xs = np.logspace(-2, 3, 1000)
        gap = digamma(xs) - np.log(xs)
        assert np.all(gap < -0.5 / xs)
        assert np.all(gap > -0.5 / xs - 1.0 / xs**2)

    def test_domain(self):
        for fn in (digamma, trigamma):
            with pytest.raises(DomainError):
                fn(0.0)
            with pytest.raises(DomainError):
                fn(-1.0)


class TestGammaCdf:
    def test_exponential_case(self):
        ts = np.array([0.0, 0.1, 1.0, 3.5, 10.0])
        assert np.allclose(gamma_cdf(ts, 1.0), -np.expm1(-ts), rtol=1e-12, atol=1e-15)

    def test_integer_shape(self):
        assert gamma_cdf(1.0, 2.0) == pytest.approx(1.0 - 2.0 * math.exp(-1.0), rel=1e-12)

    def test_quadrature_oracle_small_shape(self):
        val, err = integrate.quad(lambda x: std_gamma_pdf(x, 0.3), 0.0, 0.5)
        assert gamma_cdf(0.5, 0.3) == pytest.approx(val, abs=max(1e-10, 10 * err))

    def test_monotone_and_limits(self):
        for k in (0.3, 1.0, 4.7):
            ts = np.linspace(0.0, 60.0, 400)
            vals = gamma_cdf(ts, k)
            assert vals[0] == 0.0
            assert np.all(np.diff(vals) >= -1e-15)
            assert vals[-1] == pytest.approx(1.0, abs=1e-12)

    def test_derivative_matches_pdf(self):
        # central finite differences of P(., k) against p(., k, 1)
        h = 1e-6
        for k in (0.6, 1.0, 2.5, 8.0):
            ts = np.linspace(0.3, 3.0 * k + 5.0, 31)
            fd = (gamma_cdf(ts + h, k) - gamma_cdf(ts - h, k)) / (2.0 * h)
            assert np.allclose(fd, std_gamma_pdf(ts, k), rtol=1e-6)

    def test_domain(self):
        with pytest.raises(DomainError):
            gamma_cdf(-0.5, 1.0)
        with pytest.raises(DomainError):
            gamma_cdf(1.0, 0.0)


class TestGammaPdf:
    def test_exponential(self):
        p = GammaParams(1.0, 1.0)
        ts = np.array([0.2, 1.0, 4.0])
        assert np.allclose(gamma_pdf(ts, p), np.exp(-ts), rtol=1e-13)

    def test_point_value(self):
        assert gamma_pdf(2.0, GammaParams(2.0, 1.0)) == pytest.approx(2.0 * math.exp(-2.0), rel=1e-12)

    @pytest.mark.parametrize("k", [0.5, 1.0, 3.0])
    @pytest.mark.parametrize("lam", [0.5, 2.0])
    def test_normalization(self, k, lam):
        val, _ = integrate.quad(
            lambda t: gamma_pdf(t, GammaParams(k, lam)), 0.0, np.inf, points=None, limit=200
        )
        assert val == pytest.approx(1.0, abs=1e-8)

    def test_domain(self):
        with pytest.raises(DomainError):
            gamma_pdf(-1.0, GammaParams(2.0, 1.0))
        with pytest.raises(DomainError):
            GammaParams(-1.0, 1.0)
        with pytest.raises(DomainError):
            GammaParams(2.0, 0.0)


class TestUpperIncGamma:
    def test_a_one(self):
        for t in (0.2, 1.0, 6.0):
            assert upper_inc_gamma(1.0, t) == pytest.approx(math.exp(-t), rel=1e-12)

    def test_a_two(self):
        for t in (0.2, 1.0, 6.0):
            assert upper_inc_gamma(2.0, t) == pytest.approx((1.0 + t) * math.exp(-t), rel=1e-12)

    def test_negative_half_quadrature(self):
        val, err = integrate.quad(lambda x: x**-1.5 * math.exp(-x), 1.0, np.inf)
        assert upper_inc_gamma(-0.5, 1.0) == pytest.approx(val, abs=max(1e-10, 10 * err))

    @pytest.mark.parametrize("a", [-1.95, -1.0, -0.5, 0.0, 0.7, 3.0])
    @pytest.mark.parametrize("t", [0.05, 0.4, 0.9, 1.5, 8.0])
    def test_quadrature_grid(self, a, t):
        val, err = integrate.quad(lambda x: x ** (a - 1.0) * math.exp(-x), t, np.inf, limit=200)
        assert upper_inc_gamma(a, t) == pytest.approx(val, rel=1e-8, abs=max(1e-12, 10 * err))

    @pytest.mark.parametrize("a", [-1.0, 0.5, 2.0])
    def test_tail_asymptotics(self, a):
        t = 50.0
        ratio = upper_inc_gamma(a, t) * math.exp(t) * t ** (1.0 - a)
        assert ratio == pytest.approx(1.0, rel=0.05)

    def test_domain(self):
        with pytest.raises(DomainError):
            upper_inc_gamma(1.0, 0.0)
        with pytest.raises(DomainError):
            upper_inc_gamma(1.0, -2.0)


class TestErf:
    def test_zero(self):
        assert erf_paper(0.0) == 0.0

    def test_limit(self):
        assert erf_paper(10.0) == pytest.approx(1.0, abs=1e-12)

    def test_quadrature_oracle(self):
        val, _ = integrate.quad(lambda u: 2.0 / math.sqrt(math.pi) * math.exp(-u * u), 0.0, 1.0)
        assert erf_paper(1.0) == pytest.approx(val, abs=1e-10)
        assert erf_paper(1.0) == pytest.approx(0.84270079, abs=5e-9)

    def test_strictly_increasing(self):
        xs = np.linspace(0.0, 4.0, 100)
        assert np.all(np.diff(erf_paper(xs)) > 0.0)

    def test_domain(self):
        with pytest.raises(DomainError):
            erf_paper(-0.1)

    def test_erfcx_consistency(self):
        # erfcx(z) * exp(-z^2) == 1 - erf(z) where both are representable
        for z in (0.0, 0.5, 1.2, 1.3, 2.0, 4.0):
            assert erfcx(z) * math.exp(-z * z) == pytest.approx(1.0 - erf_paper(z), abs=1e-13)
        # large-z asymptote ~ 1/(z sqrt(pi))
        assert erfcx(500.0) == pytest.approx(1.0 / (500.0 * math.sqrt(math.pi)), rel=1e-5)


class TestGammaQuantile:
    @pytest.mark.parametrize("k", [0.4, 1.0, 7.5])
    @pytest.mark.parametrize("p", [0.01, 0.5, 0.95, 1.0 - 1e-9])
    def test_roundtrip(self, k, p):
        assert gamma_cdf(gamma_quantile(p, k), k) == pytest.approx(p, abs=1e-9)
