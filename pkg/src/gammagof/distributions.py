"""Samplers, densities, and distribution functions for the null and alternative families.

Seven alternative families plus the Gamma null itself, each indexed by a single
positive parameter theta and serialized by a lowercase token:

    gamma, weibull, invgauss, lognormal, power, spareto, gompertz, lfr

Sampling is driven by explicit, reproducible streams: an (seed, stream_id)
pair keys a counter-based Philox generator, so identical pairs replay the
identical variate sequence and distinct stream ids are independent.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .errors import DomainError
from .special import gamma_cdf, norm_cdf, std_gamma_pdf

_MASK64 = (1 << 64) - 1
_TINY = np.finfo(float).tiny


class Family(str, Enum):
    GAMMA = "gamma"
    WEIBULL = "weibull"
    INVGAUSS = "invgauss"
    LOGNORMAL = "lognormal"
    POWER = "power"
    SPARETO = "spareto"
    GOMPERTZ = "gompertz"
    LFR = "lfr"


@dataclass(frozen=True)
class AlternativeSpec:
    """A sampling family together with its positive parameter theta."""

    family: Family
    theta: float

    def __post_init__(self):
        if not isinstance(self.family, Family):
            object.__setattr__(self, "family", Family(self.family))
        if not (math.isfinite(self.theta) and self.theta > 0.0):
            raise DomainError(f"theta must be finite and > 0, got {self.theta!r}")

    def token(self) -> str:
        return f"{self.family.value}:{self.theta:g}"


def parse_alternative(token: str) -> AlternativeSpec:
    """Parse a 'family:theta' token, e.g. 'invgauss:0.5'."""
    name, sep, par = token.strip().partition(":")
    if not sep:
        raise DomainError(f"alternative token {token!r} lacks a ':theta' part")
    try:
        fam = Family(name)
    except ValueError:
        raise DomainError(f"unknown family {name!r} in token {token!r}") from None
    return AlternativeSpec(fam, float(par))


def derive_seed(*parts) -> int:
    """Stable 64-bit seed derived from arbitrary labelled parts."""
    h = hashlib.blake2b(digest_size=8)
    for p in parts:
        h.update(repr(p).encode())
        h.update(b"\x1f")
    return int.from_bytes(h.digest(), "little")


@dataclass(frozen=True)
class RngStream:
    """Reproducible random stream keyed by (seed, stream_id)."""

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        key = ((self.stream_id & _MASK64) << 64) | (self.seed & _MASK64)
        return np.random.Generator(np.random.Philox(key=key))

    def with_stream(self, stream_id: int) -> "RngStream":
        return replace(self, stream_id=stream_id)

    def derive(self, *parts) -> "RngStream":
        """A fresh stream family keyed by this stream plus extra labels."""
        return RngStream(derive_seed(self.seed, self.stream_id, *parts), 0)


def gamma_variates(gen: np.random.Generator, k: float, size: int) -> np.ndarray:
    """Gamma(k, 1) variates via the Marsaglia-Tsang squeeze; U^(1/k) boost for k < 1."""
    if k < 1.0:
        base = _marsaglia_tsang(gen, k + 1.0, size)
        u = np.fmax(gen.random(size), _TINY)
        return np.fmax(base * u ** (1.0 / k), _TINY)
    return _marsaglia_tsang(gen, k, size)


def _marsaglia_tsang(gen: np.random.Generator, k: float, size: int) -> np.ndarray:
    d = k - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    out = np.empty(size, dtype=float)
    filled = 0
    while filled < size:
        m = (size - filled) + (size - filled) // 4 + 8
        x = gen.standard_normal(m)
        v = (1.0 + c * x) ** 3
        u = gen.random(m)
        ok = v > 0.0
        x2 = x * x
        squeeze = u < 1.0 - 0.0331 * x2 * x2
        with np.errstate(divide="ignore", invalid="ignore"):
            full = np.log(u) < 0.5 * x2 + d * (1.0 - v + np.log(np.where(ok, v, 1.0)))
        acc = ok & (squeeze | full)
        vals = d * v[acc]
        take = min(vals.size, size - filled)
        out[filled : filled + take] = vals[:take]
        filled += take
    return out


def _invgauss_variates(gen: np.random.Generator, theta: float, size: int) -> np.ndarray:
    # Michael-Schucany-Haas with mean 1, shape theta; smaller root computed
    # in rationalized form to avoid cancellation for large nu.
    nu = gen.standard_normal(size) ** 2
    w = nu / (2.0 * theta)
    x1 = 1.0 / (1.0 + w + np.sqrt(w * (w + 2.0)))
    u = gen.random(size)
    return np.where(u <= 1.0 / (1.0 + x1), x1, 1.0 / x1)


def _uniform_open(gen: np.random.Generator, size: int) -> np.ndarray:
    # U in (0, 1): the exact-zero draw (prob 2^-53) is clamped away so that
    # inverse-CDF variates stay strictly positive.
    return np.fmax(gen.random(size), _TINY)


def _std_exponential(gen: np.random.Generator, size: int) -> np.ndarray:
    # -log(1-U) with U in [0,1); clamped strictly positive
    return np.fmax(-np.log1p(-gen.random(size)), _TINY)


def sample_with(gen: np.random.Generator, spec: AlternativeSpec, n: int) -> np.ndarray:
    """Draw n variates from spec using an already materialized generator."""
    th = spec.theta
    fam = spec.family
    if fam is Family.GAMMA:
        return gamma_variates(gen, th, n)
    if fam is Family.WEIBULL:
        return _std_exponential(gen, n) ** (1.0 / th)
    if fam is Family.INVGAUSS:
        return _invgauss_variates(gen, th, n)
    if fam is Family.LOGNORMAL:
        return np.exp(th * gen.standard_normal(n))
    if fam is Family.POWER:
        return _uniform_open(gen, n) ** th
    if fam is Family.SPARETO:
        return np.fmax(_uniform_open(gen, n) ** (-1.0 / th) - 1.0, _TINY)
    if fam is Family.GOMPERTZ:
        return np.log1p(th * _std_exponential(gen, n))
    if fam is Family.LFR:
        s = _std_exponential(gen, n)
        return 2.0 * s / (1.0 + np.sqrt(1.0 + 2.0 * th * s))
    raise DomainError(f"unknown family {fam!r}")


def sample(spec: AlternativeSpec, n: int, rng: RngStream) -> np.ndarray:
    """n iid variates from spec; identical (seed, stream_id) replays identically."""
    if n < 1:
        raise DomainError("sample size must be >= 1")
    return sample_with(rng.generator(), spec, n)


def density(spec: AlternativeSpec, x) -> np.ndarray:
    """Density of spec at x; zero outside the support."""
    x = np.asarray(x, dtype=float)
    th = spec.theta
    fam = spec.family
    pos = x > 0.0
    xs = np.where(pos, x, 1.0)  # placeholder off-support
    with np.errstate(over="ignore", under="ignore"):
        if fam is Family.GAMMA:
            val = std_gamma_pdf(xs, th)
        elif fam is Family.WEIBULL:
            val = th * xs ** (th - 1.0) * np.exp(-(xs**th))
        elif fam is Family.INVGAUSS:
            val = math.sqrt(th / (2.0 * math.pi)) * xs**-1.5 * np.exp(
                -th * (xs - 1.0) ** 2 / (2.0 * xs)
            )
        elif fam is Family.LOGNORMAL:
            val = np.exp(-np.log(xs) ** 2 / (2.0 * th * th)) / (th * xs * math.sqrt(2.0 * math.pi))
        elif fam is Family.POWER:
            val = np.where(xs <= 1.0, xs ** ((1.0 - th) / th) / th, 0.0)
        elif fam is Family.SPARETO:
            val = th / (1.0 + xs) ** (1.0 + th)
        elif fam is Family.GOMPERTZ:
            val = np.exp(xs) / th * np.exp((1.0 - np.exp(xs)) / th)
        elif fam is Family.LFR:
            val = (1.0 + th * xs) * np.exp(-xs - th * xs * xs / 2.0)
        else:
            raise DomainError(f"unknown family {fam!r}")
    out = np.where(pos, val, 0.0)
    return float(out) if out.ndim == 0 else out


def cdf(spec: AlternativeSpec, x) -> np.ndarray:
    """Distribution function of spec at x (any real x)."""
    x = np.asarray(x, dtype=float)
    th = spec.theta
    fam = spec.family
    pos = x > 0.0
    xs = np.where(pos, x, 1.0)
    with np.errstate(over="ignore", under="ignore"):
        if fam is Family.GAMMA:
            val = np.asarray(gamma_cdf(xs, th))
        elif fam is Family.WEIBULL:
            val = -np.expm1(-(xs**th))
        elif fam is Family.INVGAUSS:
            rt = np.sqrt(th / xs)
            val = np.asarray(norm_cdf(rt * (xs - 1.0))) + math.exp(2.0 * th) * np.asarray(
                norm_cdf(-rt * (xs + 1.0))
            )
        elif fam is Family.LOGNORMAL:
            val = np.asarray(norm_cdf(np.log(xs) / th))
        elif fam is Family.POWER:
            val = np.minimum(xs, 1.0) ** (1.0 / th)
        elif fam is Family.SPARETO:
            val = 1.0 - (1.0 + xs) ** -th
        elif fam is Family.GOMPERTZ:
            ex = np.exp(np.minimum(xs, 700.0))
            val = -np.expm1((1.0 - ex) / th)
        elif fam is Family.LFR:
            val = -np.expm1(-xs - th * xs * xs / 2.0)
        else:
            raise DomainError(f"unknown family {fam!r}")
    out = np.where(pos, np.clip(val, 0.0, 1.0), 0.0)
    return float(out) if out.ndim == 0 else out


def quantile(spec: AlternativeSpec, p: float) -> float:
    """Quantile by bisection on cdf(); 0 <= p < 1."""
    if not (0.0 <= p < 1.0):
        raise DomainError("quantile requires 0 <= p < 1")
    if p == 0.0:
        return 0.0
    hi = 1.0
    for _ in range(600):
        if cdf(spec, hi) >= p:
            break
        hi *= 1.5
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if cdf(spec, mid) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
