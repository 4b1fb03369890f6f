import math

import numpy as np
import pytest
from scipy import integrate, stats

from gammagof.distributions import (
    AlternativeSpec,
    Family,
    RngStream,
    cdf,
    density,
    derive_seed,
    parse_alternative,
    quantile,
    sample,
)
from gammagof.errors import DomainError

# every (family, theta) pair exercised by the power tables
TABLE_SPECS = [
    AlternativeSpec(Family.GAMMA, th) for th in (0.25, 0.5, 1.0, 5.0, 10.0)
] + [
    AlternativeSpec(Family.WEIBULL, th) for th in (0.5, 1.5, 3.0)
] + [
    AlternativeSpec(Family.INVGAUSS, th) for th in (0.5, 1.5, 3.0)
] + [
    AlternativeSpec(Family.LOGNORMAL, th) for th in (0.5, 0.8, 1.5)
] + [
    AlternativeSpec(Family.POWER, th) for th in (1.0, 2.0, 4.0)
] + [
    AlternativeSpec(Family.SPARETO, th) for th in (1.0, 2.0)
] + [
    AlternativeSpec(Family.GOMPERTZ, th) for th in (2.0, 4.0)
] + [
    AlternativeSpec(Family.LFR, th) for th in (2.0, 4.0)
]


def _ids(specs):
    return [s.token() for s in specs]


class TestTokens:
    def test_roundtrip(self):
        for spec in TABLE_SPECS:
            assert parse_alternative(spec.token()) == spec

    def test_bad_tokens(self):
        with pytest.raises(DomainError):
            parse_alternative("weibull")
        with pytest.raises(DomainError):
            parse_alternative("cauchy:1")
        with pytest.raises(DomainError):
            parse_alternative("gamma:-2")


class TestInverseTransforms:
    """Closed-form inverse-CDF identities cited for the samplers."""

    def test_power_is_u_pow_theta(self):
        # CDF x^(1/theta) inverts to U^theta
        spec = AlternativeSpec(Family.POWER, 2.5)
        u = np.linspace(0.01, 0.99, 25)
        assert np.allclose(cdf(spec, u**2.5), u, rtol=1e-12)

    def test_gompertz_inverse(self):
        spec = AlternativeSpec(Family.GOMPERTZ, 3.0)
        u = np.linspace(0.01, 0.99, 25)
        x = np.log(1.0 - 3.0 * np.log(1.0 - u))
        assert np.allclose(cdf(spec, x), u, rtol=1e-10)

    def test_lfr_inverse(self):
        spec = AlternativeSpec(Family.LFR, 2.0)
        u = np.linspace(0.01, 0.99, 25)
        s = -np.log(1.0 - u)
        x = (-1.0 + np.sqrt(1.0 + 2.0 * 2.0 * s)) / 2.0
        assert np.allclose(cdf(spec, x), u, rtol=1e-10)


class TestDensities:
    def test_weibull_exponential_case(self):
        spec = AlternativeSpec(Family.WEIBULL, 1.0)
        x = np.array([0.1, 1.0, 4.0])
        assert np.allclose(density(spec, x), np.exp(-x), rtol=1e-12)

    def test_spareto_formula(self):
        spec = AlternativeSpec(Family.SPARETO, 1.7)
        x = np.array([0.2, 1.0, 9.0])
        assert np.allclose(density(spec, x), 1.7 / (1.0 + x) ** 2.7, rtol=1e-12)

    def test_outside_support(self):
        for spec in (AlternativeSpec(Family.POWER, 2.0), AlternativeSpec(Family.LFR, 2.0)):
            assert density(spec, -1.0) == 0.0
        assert density(AlternativeSpec(Family.POWER, 2.0), 1.5) == 0.0

    @pytest.mark.parametrize("spec", TABLE_SPECS, ids=_ids(TABLE_SPECS))
    def test_normalization(self, spec):
        # piecewise by quantile segments; heavy tails make a single panel useless
        probs = [0.0, 0.25, 0.5, 0.9, 0.99, 0.999, 1.0 - 1e-6, 1.0 - 1e-10]
        knots = [quantile(spec, p) for p in probs]
        total = 0.0
        for lo, hi in zip(knots[:-1], knots[1:]):
            val, _ = integrate.quad(lambda x: density(spec, x), lo, hi, limit=200)
            total += val
        assert total == pytest.approx(1.0, abs=2e-6)


class TestCdf:
    def test_spareto_closed_form(self):
        spec = AlternativeSpec(Family.SPARETO, 2.0)
        x = np.array([0.5, 1.0, 3.0])
        assert np.allclose(cdf(spec, x), 1.0 - (1.0 + x) ** -2.0, rtol=1e-12)

    def test_lognormal_normal_link(self):
        spec = AlternativeSpec(Family.LOGNORMAL, 0.8)
        x = np.array([0.3, 1.0, 2.5])
        assert np.allclose(cdf(spec, x), stats.norm.cdf(np.log(x) / 0.8), rtol=1e-10)

    @pytest.mark.parametrize(
        "spec",
        [AlternativeSpec(Family.INVGAUSS, th) for th in (0.5, 1.5, 3.0)],
        ids=_ids([AlternativeSpec(Family.INVGAUSS, th) for th in (0.5, 1.5, 3.0)]),
    )
    def test_invgauss_vs_quadrature(self, spec):
        for x in (0.3, 1.0, 2.2):
            val, err = integrate.quad(lambda u: density(spec, u), 0.0, x)
            assert cdf(spec, x) == pytest.approx(val, abs=max(1e-9, 10 * err))

    @pytest.mark.parametrize("spec", TABLE_SPECS, ids=_ids(TABLE_SPECS))
    def test_shape(self, spec):
        xs = np.linspace(-1.0, quantile(spec, 0.999), 200)
        vals = cdf(spec, xs)
        assert np.all(np.diff(vals) >= -1e-13)
        assert cdf(spec, -5.0) == 0.0
        assert cdf(spec, quantile(spec, 1.0 - 1e-12) * 2.0 + 10.0) == pytest.approx(1.0, abs=1e-9)


class TestSampler:
    @pytest.mark.parametrize("spec", TABLE_SPECS, ids=_ids(TABLE_SPECS))
    def test_ks_agreement(self, spec):
        # two-sided KS of 1e5 variates against cdf(); must not reject at 0.1%
        x = sample(spec, 100_000, RngStream(derive_seed("ks-check", spec.token())))
        assert np.all(x > 0.0)
        if spec.family is Family.POWER:
            assert np.all(x <= 1.0)
        res = stats.kstest(x, lambda v: cdf(spec, v))
        assert res.pvalue > 0.001

    def test_invgauss_moments(self):
        for th in (0.5, 1.5, 3.0):
            spec = AlternativeSpec(Family.INVGAUSS, th)
            x = sample(spec, 100_000, RngStream(derive_seed("mom", th)))
            se_mean = math.sqrt(1.0 / th / 100_000)
            assert abs(x.mean() - 1.0) < 3.0 * se_mean
            # Var = 1/theta; SE of sample variance ~ sqrt((mu4 - var^2)/n)
            var = x.var()
            mu4 = np.mean((x - x.mean()) ** 4)
            se_var = math.sqrt(max(mu4 - var**2, 0.0) / 100_000)
            assert abs(var - 1.0 / th) < 3.0 * se_var

    def test_gamma_moments(self):
        for k in (0.5, 1.0, 5.0):
            spec = AlternativeSpec(Family.GAMMA, k)
            x = sample(spec, 100_000, RngStream(derive_seed("gmom", k)))
            se_mean = math.sqrt(k / 100_000)
            assert abs(x.mean() - k) < 3.0 * se_mean
            var = x.var()
            mu4 = np.mean((x - x.mean()) ** 4)
            se_var = math.sqrt(max(mu4 - var**2, 0.0) / 100_000)
            assert abs(var - k) < 3.0 * se_var

    def test_determinism(self):
        spec = AlternativeSpec(Family.WEIBULL, 3.0)
        st = RngStream(12345, 7)
        a = sample(spec, 1000, st)
        b = sample(spec, 1000, st)
        assert np.array_equal(a, b)

    def test_distinct_streams_differ(self):
        spec = AlternativeSpec(Family.GAMMA, 2.0)
        a = sample(spec, 100, RngStream(1, 0))
        b = sample(spec, 100, RngStream(1, 1))
        assert not np.array_equal(a, b)

    def test_size_validation(self):
        with pytest.raises(DomainError):
            sample(AlternativeSpec(Family.GAMMA, 1.0), 0, RngStream(0))


class TestQuantile:
    @pytest.mark.parametrize("spec", TABLE_SPECS[:8], ids=_ids(TABLE_SPECS[:8]))
    def test_roundtrip(self, spec):
        for p in (0.05, 0.5, 0.99):
            assert cdf(spec, quantile(spec, p)) == pytest.approx(p, abs=1e-8)
