"""Fixed-point transform diagnostics and the fixed-alternative limit constant.

The characterizing transform of a positive variable X with E|X| < inf is

    T(t) = E[ (-(k-1)/X + 1/lam) min(X, t) ],   t > 0,

whose unique fixed point over (k, lam) choices is the Gamma(k, lam) law:
T coincides with the distribution function exactly when X is Gamma(k, lam).
This module evaluates the empirical version of T on a grid, the exact
transform for the Gamma null by quadrature, the population limit parameters
of the likelihood fit under a fixed alternative, and the limit constant

    Delta = integral ( T_alt(t) - F_alt(t) )^2 exp(-a t) dt

that the scaled statistic G_n/n approaches under that alternative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .distributions import AlternativeSpec, cdf, density, quantile
from .errors import NumericError
from .special import digamma, std_gamma_pdf, trigamma
from .statistics import ScaledSample

_QUAD_TOL = 1e-10


@dataclass(frozen=True)
class TransformCurve:
    """Empirical transform and empirical CDF sampled on a grid."""

    grid: np.ndarray
    t_hat: np.ndarray
    f_hat: np.ndarray


def default_grid(s: ScaledSample, size: int = 512) -> np.ndarray:
    """Geometric grid from Y_min/10 to 2 Y_max."""
    lo = s.y_sorted[0] / 10.0
    hi = 2.0 * s.y_sorted[-1]
    return np.geomspace(lo, hi, size)


def empirical_transform(s: ScaledSample, grid) -> TransformCurve:
    """Evaluate the empirical transform and empirical CDF on an ascending grid."""
    grid = np.asarray(grid, dtype=float)
    y = s.y_sorted
    b = -(s.k_hat - 1.0) / y + 1.0
    tt = grid[:, None]
    t_hat = np.mean(b * np.minimum(y, tt), axis=-1)
    f_hat = np.mean(y <= tt, axis=-1)
    return TransformCurve(grid, t_hat, f_hat)


def exact_transform(t: float, k: float) -> float:
    """Transform of the Gamma(k, 1) law at t, by direct quadrature.

    Splits at t: on [0, t] the integrand is (x - (k-1)) p(x, k); beyond t it
    is t (1 - (k-1)/x) p(x, k). By the fixed-point property the value equals
    the Gamma CDF; callers compare against it.
    """
    if t <= 0.0:
        return 0.0
    head, he = integrate.quad(
        lambda x: (x - (k - 1.0)) * std_gamma_pdf(x, k), 0.0, t,
        epsabs=1e-12, epsrel=1e-12, limit=300,
    )
    tail, te = integrate.quad(
        lambda x: (1.0 - (k - 1.0) / x) * std_gamma_pdf(x, k), t, np.inf,
        epsabs=1e-12, epsrel=1e-12, limit=300,
    )
    val = head + t * tail
    if not math.isfinite(val):
        raise NumericError("transform quadrature failed")
    return val


def _break_points(spec: AlternativeSpec) -> list[float]:
    """Quadrature break points: a decade ladder around the central quantiles.

    Wide panels near an endpoint singularity defeat the Gauss-Kronrod error
    estimate (both embedded rules err together), so panels are kept to about
    one decade each.
    """
    med = quantile(spec, 0.5)
    down = [med * 10.0**-j for j in range(1, 17)]
    up = [med * 10.0**j for j in range(1, 17)]
    qs = [quantile(spec, p) for p in (0.25, 0.75, 0.95, 1.0 - 1e-4, 1.0 - 1e-8)]
    return sorted(set(down + [med] + up + qs))


def _expect(spec: AlternativeSpec, fn, breaks, lo: float = 0.0, hi: float | None = None) -> float:
    """Adaptive quadrature of fn(x) q(x) over [lo, hi] within the support.

    hi=None integrates over the whole support; the final panel runs to
    infinity so heavy algebraic tails are not silently truncated.
    """
    to_inf = hi is None
    if to_inf:
        hi = quantile(spec, 1.0 - 1e-10)
    if hi <= lo:
        return 0.0
    seg = [lo] + sorted(p for p in breaks if lo < p < hi) + [hi]
    if to_inf:
        seg.append(np.inf)
    total = 0.0
    for a, b in zip(seg[:-1], seg[1:]):
        val, _ = integrate.quad(
            lambda x: fn(x) * density(spec, x), a, b,
            epsabs=_QUAD_TOL, epsrel=1e-11, limit=300,
        )
        total += val
    return total


def mle_limit_params(spec: AlternativeSpec) -> tuple[float, float]:
    """Population limits (k, lam) of the likelihood fit under the alternative.

    k solves log(k) - psi(k) = log(E X) - E[log X]; lam = E X / k. The root is
    bracketed by the digamma sandwich 1/(2k) < log(k) - psi(k) < 1/(2k) + 1/k^2
    and polished by Newton steps.
    """
    breaks = _break_points(spec)
    ex = _expect(spec, lambda x: x, breaks)
    elog = _expect(spec, math.log, breaks)
    r = math.log(ex) - elog
    if not (math.isfinite(r) and r > 0.0):
        raise NumericError(f"log-moment gap must be positive, got {r!r}")
    k_lo = 1.0 / (2.0 * r)
    k_hi = (1.0 + math.sqrt(1.0 + 16.0 * r)) / (4.0 * r)
    h = lambda k: math.log(k) - digamma(k) - r
    if not (h(k_lo) > 0.0 and h(k_hi) < 0.0):
        raise NumericError("sandwich bracket failed for the shape limit equation")
    for _ in range(120):
        mid = 0.5 * (k_lo + k_hi)
        if h(mid) > 0.0:
            k_lo = mid
        else:
            k_hi = mid
    k = 0.5 * (k_lo + k_hi)
    for _ in range(4):
        k = k - h(k) / (1.0 / k - trigamma(k))
    return k, ex / k


def delta_k(spec: AlternativeSpec, k: float, lam: float, a: float) -> float:
    """Limit constant of G_n/n under the alternative, with estimator limits (k, lam).

    Evaluates integral_0^Tmax (m(t) - F(lam t))^2 exp(-a t) dt on the
    lam-scaled variable, where m is the transform of X/lam with parameters
    (k, 1) and F is the alternative's distribution function.
    """
    p999 = quantile(spec, 1.0 - 1e-10)
    breaks = _break_points(spec)

    def m_of(t: float) -> float:
        c = lam * t
        head = _expect(spec, lambda x: x / lam - (k - 1.0), breaks, hi=c) if c > 0 else 0.0
        tail_mass = 1.0 - cdf(spec, c)
        tail_inv = _expect_tail_inv(spec, c, p999)
        return head + t * (tail_mass - (k - 1.0) * lam * tail_inv)

    t_max = p999 / lam + 50.0 / a
    val, err = integrate.quad(
        lambda t: (m_of(t) - cdf(spec, lam * t)) ** 2 * math.exp(-a * t),
        0.0,
        t_max,
        epsabs=_QUAD_TOL,
        limit=300,
    )
    if not math.isfinite(val) or val < -1e-12:
        raise NumericError("limit-constant quadrature failed")
    return max(val, 0.0)


def _expect_tail_inv(spec: AlternativeSpec, c: float, hi: float) -> float:
    """E[ X^-1 1{X > c} ] for the alternative, by quadrature."""
    mid = max(hi, c * 2.0 + 1.0)
    val, _ = integrate.quad(
        lambda x: density(spec, x) / x, c, mid, epsabs=_QUAD_TOL, epsrel=1e-11, limit=300
    )
    tail, _ = integrate.quad(
        lambda x: density(spec, x) / x, mid, np.inf, epsabs=_QUAD_TOL, limit=300
    )
    return val + tail
