"""Random variate generation for Tweedie models.

Streams come from numpy's PCG64 generator seeded explicitly, so a given
(seed, params, n) triple reproduces bit-identical output on any platform
with the same numpy.  Cross-language ports can target the distributional
properties (moments, zero mass, KS distance), not the bit stream.

Draws exist exactly where the models do and a standard sampler is known:
p = 0, 1, 2, 3 and the compound-Poisson range 1 < p < 2.  Indices beyond
that (p < 0 or p > 3) would need stable-distribution machinery and are
rejected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .tweedie import TweedieParams, scale_transform

__all__ = ["SamplerConfig", "sample", "sample_scaled_pair", "compound_poisson_zero_mass"]


@dataclass(frozen=True)
class SamplerConfig:
    """Seed and draw count for one sampling call."""

    seed: int
    n: int

    def __post_init__(self):
        if not isinstance(self.seed, (int, np.integer)) or not 0 <= int(self.seed) < 2 ** 64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if not isinstance(self.n, (int, np.integer)) or self.n < 0:
            raise DomainError(f"n must be a nonnegative integer, got {self.n!r}")


def compound_poisson_zero_mass(params: TweedieParams) -> float:
    """P(X = 0) = exp(-lambda) with lambda = mu**(2-p)/(phi*(2-p)), for 1 < p < 2."""
    p = params.p
    if not 1.0 < p < 2.0:
        raise DomainError(f"zero mass exists only for 1 < p < 2, not p={p}")
    return math.exp(-params.mu ** (2.0 - p) / (params.phi * (2.0 - p)))


def sample(params: TweedieParams, cfg: SamplerConfig) -> np.ndarray:
    """Draw cfg.n variates from Tw_p(mu, phi).

    p=0 is Gaussian(mu, phi); p=1 Poisson(mu); p=2 gamma with shape 1/phi
    and mean mu; p=3 inverse Gaussian (numpy's Wald sampler, the
    transformation-with-rejection method).  For 1 < p < 2 the draw is a
    Poisson(lambda) count N of gamma summands with shape (2-p)/(p-1) and
    scale phi*(p-1)*mu**(p-1), so that E[X] = mu and Var[X] = phi*mu**p;
    N = 0 yields an exact zero.
    """
    p, mu, phi = params.p, params.mu, params.phi
    rng = np.random.Generator(np.random.PCG64(int(cfg.seed)))
    n = int(cfg.n)

    if p == 0.0:
        return rng.normal(mu, math.sqrt(phi), size=n)
    if p == 1.0:
        return rng.poisson(mu, size=n).astype(float)
    if p == 2.0:
        return rng.gamma(1.0 / phi, mu * phi, size=n)
    if p == 3.0:
        return rng.wald(mu, 1.0 / phi, size=n)
    if 1.0 < p < 2.0:
        lam = mu ** (2.0 - p) / (phi * (2.0 - p))
        shape = (2.0 - p) / (p - 1.0)
        scale = phi * (p - 1.0) * mu ** (p - 1.0)
        counts = rng.poisson(lam, size=n)
        out = np.zeros(n, dtype=float)
        hit = counts > 0
        if np.any(hit):
            out[hit] = rng.gamma(counts[hit] * shape, scale)
        return out
    raise DomainError(f"no sampler for p={p}; supported: 0, 1, 2, 3 and 1 < p < 2")


def sample_scaled_pair(params: TweedieParams, c: float, cfg: SamplerConfig):
    """Draws of c*X versus draws from the scale-transformed parameters.

    Returns (c * sample(params, cfg), sample(scale_transform(params, c), cfg)).
    The two vectors are equal in distribution (c*Tw_p(mu, phi) =
    Tw_p(c*mu, c**(2-p)*phi)) but not pointwise, except at c=1 where the
    shared seed makes them identical.
    """
    c = float(c)
    if not math.isfinite(c) or c <= 0.0:
        raise DomainError(f"scale factor must be a positive real, got {c!r}")
    return c * sample(params, cfg), sample(scale_transform(params, c), cfg)
