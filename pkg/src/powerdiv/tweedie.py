"""Tweedie dispersion models Tw_p(mu, phi).

The density of every member factors through the beta divergence of the same
power index,

    p(x) = g(x, phi) * exp{ -d_beta(x, mu) / phi },

so the mean enters only through the divergence and the base measure g carries
all the normalization.  This module provides the parameter maps (mean to
canonical parameter and back, cumulant, variance function) in the normalized
convention where theta(1) = 0 and psi(0) = 0, and evaluates log densities
with three interchangeable base measures:

    exact        closed forms at p in {0, 1, 2, 3}
    series       compound-Poisson index sum for 1 < p < 2
    saddlepoint  g ~ (2*pi*phi*x**p)**(-1/2) for everything else

Supports: all reals at p=0; nonnegative integers at p=1 (phi fixed to 1);
x >= 0 with an atom at zero for 1 < p < 2; x > 0 at p >= 2.  There is no
model at all for 0 < p < 1 even though the divergences exist there.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .divergences import ModelClass, PowerIndex, beta_divergence, classify
from .errors import DomainError, SeriesError

__all__ = [
    "TweedieParams",
    "DensityMethod",
    "DensityEval",
    "CanonicalPair",
    "variance_function",
    "theta_of_mu",
    "mu_of_theta",
    "cumulant",
    "cumulant_at_mu",
    "canonical_pair",
    "unit_deviance",
    "log_density",
    "log_densities",
    "scale_transform",
]

# Summation limits for the compound-Poisson series: drop terms 1e-17 below
# the running maximum (they cannot move a double), refuse windows wider than
# the cap (the caller is probing a hopeless corner of parameter space).
_SERIES_REL_CUTOFF_NATS = 17.0 * math.log(10.0)
_SERIES_MAX_TERMS = 100_000
_SERIES_CHUNK = 512


@dataclass(frozen=True)
class TweedieParams:
    """Parameters of a Tweedie model: mean, dispersion, power index.

    Construction validates that a distribution actually exists: any real p
    outside (0, 1), positive dispersion, positive mean (any real mean in the
    Gaussian case p=0), and unit dispersion when p=1 (the Poisson family has
    no free dispersion here; quasi-Poisson is out of scope).
    """

    mu: float
    phi: float
    p: float

    def __post_init__(self):
        object.__setattr__(self, "mu", float(self.mu))
        object.__setattr__(self, "phi", float(self.phi))
        object.__setattr__(self, "p", float(self.p))
        if classify(self.p) is ModelClass.NO_MODEL:
            raise DomainError(
                f"no dispersion model exists for 0 < p < 1 (got p={self.p}); "
                "divergences are still defined there, densities are not"
            )
        if not math.isfinite(self.phi) or self.phi <= 0.0:
            raise DomainError(f"phi must be a positive real, got {self.phi!r}")
        if not math.isfinite(self.mu):
            raise DomainError(f"mu must be finite, got {self.mu!r}")
        if self.p != 0.0 and self.mu <= 0.0:
            raise DomainError(f"mu must be positive for p={self.p}")
        if self.p == 1.0 and self.phi != 1.0:
            raise DomainError("p=1 is the Poisson family, which requires phi == 1")

    @property
    def power_index(self) -> PowerIndex:
        return PowerIndex.from_p(self.p)

    @property
    def model_class(self) -> ModelClass:
        return classify(self.p)

    def variance(self) -> float:
        """Var(x) = phi * mu**p."""
        return self.phi * self.mu ** self.p


class DensityMethod(str, enum.Enum):
    """How the base measure g(x, phi) is evaluated."""

    EXACT = "exact"
    SERIES = "series"
    SADDLEPOINT = "saddlepoint"


@dataclass(frozen=True)
class DensityEval:
    """A log-density value plus how it was obtained."""

    log_density: float
    method: DensityMethod
    series_terms_used: int = 0
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class CanonicalPair:
    """Canonical parameter and cumulant value at a given mean."""

    theta: float
    psi: float


def _positive_array(name: str, v) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    flat = np.atleast_1d(arr)
    if not np.all(np.isfinite(flat)):
        raise DomainError(f"{name} must be finite")
    if np.any(flat <= 0.0):
        raise DomainError(f"{name} must be positive")
    return arr


def variance_function(p: float, mu) -> float | np.ndarray:
    """Power variance function v(mu) = mu**p; satisfies v(c*mu) = c**p * v(mu)."""
    p = float(p)
    arr = _positive_array("mu", mu)
    out = arr ** p
    return float(out) if arr.ndim == 0 else out


def theta_of_mu(p: float, mu) -> float | np.ndarray:
    """Canonical parameter theta(mu) = (mu**(1-p) - 1)/(1-p), log(mu) at p=1.

    Normalized so theta(1) = 0; strictly increasing in mu since
    d theta / d mu = mu**(-p) = 1/v(mu) > 0.
    """
    p = float(p)
    arr = _positive_array("mu", mu)
    if p == 1.0:
        out = np.log(arr)
    else:
        a = 1.0 - p
        if abs(a) < 1e-4:
            out = np.expm1(a * np.log(arr)) / a
        else:
            out = (arr ** a - 1.0) / a
    return float(out) if arr.ndim == 0 else out


def mu_of_theta(p: float, theta) -> float | np.ndarray:
    """Inverse of theta_of_mu: mu = (1 + (1-p)*theta)**(1/(1-p)), exp(theta) at p=1."""
    p = float(p)
    arr = np.asarray(theta, dtype=float)
    flat = np.atleast_1d(arr)
    if not np.all(np.isfinite(flat)):
        raise DomainError("theta must be finite")
    if p == 1.0:
        out = np.exp(arr)
    else:
        a = 1.0 - p
        if np.any(np.atleast_1d(1.0 + a * arr) <= 0.0):
            raise DomainError(f"theta outside the canonical domain for p={p}")
        out = np.exp(np.log1p(a * arr) / a)
    return float(out) if arr.ndim == 0 else out


def cumulant(p: float, theta) -> float | np.ndarray:
    """Cumulant psi(theta), normalized so psi(0) = 0.

    psi(theta) = ((1 + (1-p)*theta)**((2-p)/(1-p)) - 1)/(2-p) for p not in
    {1, 2}, with limits exp(theta) - 1 at p=1 and -log(1-theta) at p=2.
    Its derivative in theta is the mean: d psi/d theta = mu(theta).
    """
    p = float(p)
    arr = np.asarray(theta, dtype=float)
    flat = np.atleast_1d(arr)
    if not np.all(np.isfinite(flat)):
        raise DomainError("theta must be finite")
    if p == 1.0:
        out = np.expm1(arr)
    else:
        a = 1.0 - p
        if np.any(np.atleast_1d(1.0 + a * arr) <= 0.0):
            raise DomainError(f"theta outside the canonical domain for p={p}")
        u = np.log1p(a * arr) / a  # log mu
        if p == 2.0:
            out = u
        else:
            b = 2.0 - p
            out = np.expm1(b * u) / b
    return float(out) if arr.ndim == 0 else out


def cumulant_at_mu(p: float, mu) -> float | np.ndarray:
    """psi(theta(mu)) = (mu**(2-p) - 1)/(2-p), log(mu) at p=2."""
    p = float(p)
    arr = _positive_array("mu", mu)
    if p == 2.0:
        out = np.log(arr)
    else:
        b = 2.0 - p
        if abs(b) < 1e-4:
            out = np.expm1(b * np.log(arr)) / b
        else:
            out = (arr ** b - 1.0) / b
    return float(out) if arr.ndim == 0 else out


def canonical_pair(p: float, mu: float) -> CanonicalPair:
    """Bundle (theta(mu), psi(theta(mu)))."""
    return CanonicalPair(theta=float(theta_of_mu(p, mu)), psi=float(cumulant_at_mu(p, mu)))


def unit_deviance(p: float, x, mu) -> float | np.ndarray:
    """Unit deviance d(x, mu) = 2 * beta_divergence(p, x, mu).

    Twice the log-likelihood ratio of the saturated model (mu set to x) to
    the parametric one, scaled by the dispersion.
    """
    return 2.0 * beta_divergence(p, x, mu)


def _resolve_method(p: float, method) -> DensityMethod:
    if method is None:
        if p in (0.0, 1.0, 2.0, 3.0):
            return DensityMethod.EXACT
        if 1.0 < p < 2.0:
            return DensityMethod.SERIES
        return DensityMethod.SADDLEPOINT
    m = DensityMethod(method)
    if m is DensityMethod.EXACT and p not in (0.0, 1.0, 2.0, 3.0):
        raise DomainError(f"no exact closed form at p={p}; available at p in {{0, 1, 2, 3}}")
    if m is DensityMethod.SERIES and not 1.0 < p < 2.0:
        raise DomainError(f"the series base measure applies only for 1 < p < 2, not p={p}")
    return m


def _check_support(params: TweedieParams, x: np.ndarray) -> None:
    p = params.p
    if not np.all(np.isfinite(x)):
        raise DomainError("x must be finite")
    if p == 0.0:
        return
    if p == 1.0:
        if np.any(x < 0.0) or np.any(x != np.floor(x)):
            raise DomainError("p=1 support is the nonnegative integers")
        return
    if 1.0 < p < 2.0:
        if np.any(x < 0.0):
            raise DomainError("x must be nonnegative for 1 < p < 2")
        return
    if np.any(x <= 0.0):
        raise DomainError(f"x must be positive for p={p}")


def _log_g_exact(p: float, phi: float, x: np.ndarray) -> np.ndarray:
    """Closed-form log base measure at the four special indices.

    x = 0 is only reachable here for p in {0, 1}; the Poisson value uses the
    0*log(0) = 0 convention.
    """
    if p == 0.0:
        return np.full_like(x, -0.5 * math.log(2.0 * math.pi * phi))
    if p == 1.0:
        xl = np.where(x > 0.0, x * np.log(np.where(x > 0.0, x, 1.0)), 0.0)
        return xl - x - gammaln(x + 1.0)
    if p == 2.0:
        a = 1.0 / phi
        return -np.log(x) + a * math.log(a) - a - gammaln(a)
    if p == 3.0:
        return -0.5 * np.log(2.0 * math.pi * phi * x ** 3)
    raise DomainError(f"no exact closed form at p={p}")


def _log_g_saddlepoint(p: float, phi: float, x: np.ndarray) -> np.ndarray:
    """Saddlepoint base measure g = (2*pi*phi*v(x))**(-1/2), v(x) = x**p."""
    if p == 0.0:
        return np.full_like(x, -0.5 * math.log(2.0 * math.pi * phi))
    if np.any(x <= 0.0):
        raise DomainError("the saddlepoint base measure needs x > 0")
    return -0.5 * (math.log(2.0 * math.pi * phi) + p * np.log(x))


def _series_window(logz: np.ndarray, alpha: float, j_center: np.ndarray, p: float, phi: float):
    """Find a summation window [lo, hi] covering every point's significant terms.

    A term at index j matters for point i while log W_j(i) stays within the
    cutoff of that point's peak term.  Terms are unimodal in j with the peaks
    clustered in [min(j_center), max(j_center)], so on each side of that block
    the predicate "some point still needs index j" is monotone and the exact
    boundary can be bracketed exponentially and then bisected.
    """

    def any_above(j: float) -> bool:
        lw = j * logz - gammaln(1.0 + j) - gammaln(-alpha * j)
        return bool(np.any(lw > cut))

    peak = j_center * logz - gammaln(1.0 + j_center) - gammaln(-alpha * j_center)
    cut = peak - _SERIES_REL_CUTOFF_NATS
    lo0 = int(j_center.min())
    hi0 = int(j_center.max())

    if lo0 <= 1 or any_above(1.0):
        lo = 1
    else:
        below, above = 1, lo0
        while above - below > 1:
            mid = (below + above) // 2
            if any_above(float(mid)):
                above = mid
            else:
                below = mid
        lo = above

    step = 16
    while any_above(float(hi0 + step)):
        step *= 2
        if hi0 + step - lo + 1 > 4 * _SERIES_MAX_TERMS:
            raise SeriesError(
                f"series window exceeds {_SERIES_MAX_TERMS} terms before its tail is found",
                terms_used=hi0 + step - lo + 1, p=p, phi=phi,
            )
    above, below = (hi0 + step // 2, hi0 + step) if step > 16 else (hi0, hi0 + 16)
    while below - above > 1:
        mid = (above + below) // 2
        if any_above(float(mid)):
            above = mid
        else:
            below = mid
    hi = above
    return lo, hi


def _series_log_w(p: float, phi: float, x: np.ndarray):
    """Log of the compound-Poisson index sum W(x, phi, p) for positive x.

    W = sum_{j>=1} x**(-j*alpha) (p-1)**(j*alpha) / (phi**(j(1-alpha)) (2-p)**j j! Gamma(-j*alpha))
    with alpha = (2-p)/(1-p) < 0.  Summed in log space: the maximizing index
    is near x**(2-p)/((2-p) phi), terms decay super-geometrically on both
    sides, and accumulation is chunked so wide windows stay in bounded memory.

    Returns (logW array, total terms summed).
    """
    a = 1.0 - p
    b = 2.0 - p
    alpha = b / a
    logz = -alpha * np.log(x) + alpha * math.log(p - 1.0) - (1.0 - alpha) * math.log(phi) - math.log(b)
    j_star = x ** b / (b * phi)
    j_center = np.clip(np.round(j_star), 1.0, None)

    lo, hi = _series_window(logz, alpha, j_center, p, phi)
    n_terms = hi - lo + 1
    if n_terms > _SERIES_MAX_TERMS:
        raise SeriesError(
            f"series window [{lo}, {hi}] exceeds the cap of {_SERIES_MAX_TERMS} terms",
            terms_used=n_terms, p=p, phi=phi,
        )

    run_max = np.full(x.shape, -np.inf)
    run_sum = np.zeros_like(x)
    for block in range(lo, hi + 1, _SERIES_CHUNK):
        j = np.arange(block, min(block + _SERIES_CHUNK, hi + 1), dtype=float)
        terms = logz[:, None] * j[None, :] - (gammaln(1.0 + j) + gammaln(-alpha * j))[None, :]
        block_max = terms.max(axis=1)
        new_max = np.maximum(run_max, block_max)
        scale = np.where(np.isfinite(run_max), np.exp(run_max - new_max), 0.0)
        run_sum = run_sum * scale + np.exp(terms - new_max[:, None]).sum(axis=1)
        run_max = new_max
    return run_max + np.log(run_sum), n_terms


def _log_g_series(p: float, phi: float, x: np.ndarray):
    """Series log base measure for 1 < p < 2 and x > 0:
    log g = log W - log x + x**(2-p)/(phi (1-p)(2-p))."""
    log_w, n_terms = _series_log_w(p, phi, x)
    tilt = x ** (2.0 - p) / (phi * (1.0 - p) * (2.0 - p))
    return log_w - np.log(x) + tilt, n_terms


def log_densities(params: TweedieParams, x, method=None) -> np.ndarray:
    """Vectorized log density (or log mass) under a Tweedie model.

    For 1 < p < 2 the zero observations get the exact atom
    log P(x=0) = -mu**(2-p)/(phi (2-p)) and positive ones the series density;
    the result mixes mass and density values, which is what a likelihood
    over compound-Poisson data needs.
    """
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    xv = np.atleast_1d(arr).astype(float)
    _check_support(params, xv)
    p, mu, phi = params.p, params.mu, params.phi
    m = _resolve_method(p, method)

    if m is DensityMethod.SADDLEPOINT and np.any(xv <= 0.0) and p != 0.0:
        raise DomainError("the saddlepoint base measure needs x > 0")

    out = np.empty_like(xv)
    pos = xv > 0.0
    zero = ~pos

    if np.any(zero):
        if p == 0.0 or p == 1.0:
            out[zero] = _log_g_exact(p, phi, xv[zero]) - beta_divergence(p, xv[zero], mu) / phi
        else:
            # 1 < p < 2: atom, log P(0) = -lambda = -mu**(2-p)/(phi(2-p));
            # equivalently log g = 0 so the divergence form still holds.
            out[zero] = -mu ** (2.0 - p) / (phi * (2.0 - p))

    if np.any(pos):
        xp = xv[pos]
        if m is DensityMethod.EXACT:
            log_g = _log_g_exact(p, phi, xp)
        elif m is DensityMethod.SERIES:
            log_g, _ = _log_g_series(p, phi, xp)
        else:
            log_g = _log_g_saddlepoint(p, phi, xp)
        out[pos] = log_g - beta_divergence(p, xp, mu) / phi

    return float(out[0]) if scalar else out.reshape(arr.shape)


def log_density(params: TweedieParams, x: float, method=None) -> DensityEval:
    """Log density of one observation, with evaluation diagnostics.

    The method defaults to the best available for the index: exact closed
    form at p in {0, 1, 2, 3}, the compound-Poisson series for 1 < p < 2,
    the saddlepoint base measure otherwise.  An explicit method overrides
    the default where the combination makes sense (saddlepoint is available
    at every index; exact and series only where they exist).
    """
    xf = float(x)
    xv = np.array([xf])
    _check_support(params, xv)
    p, mu, phi = params.p, params.mu, params.phi
    m = _resolve_method(p, method)
    warnings: tuple[str, ...] = ()
    terms = 0

    if xf == 0.0 and 1.0 < p < 2.0:
        if m is DensityMethod.SADDLEPOINT:
            raise DomainError("the saddlepoint base measure needs x > 0")
        value = -mu ** (2.0 - p) / (phi * (2.0 - p))
        return DensityEval(float(value), DensityMethod.SERIES, 0, ("atom",))

    if m is DensityMethod.EXACT:
        log_g = _log_g_exact(p, phi, xv)
    elif m is DensityMethod.SERIES:
        log_g, terms = _log_g_series(p, phi, xv)
    else:
        log_g = _log_g_saddlepoint(p, phi, xv)
    value = log_g - beta_divergence(p, xv, mu) / phi
    return DensityEval(float(value[0]), m, terms, warnings)


def scale_transform(params: TweedieParams, c: float) -> TweedieParams:
    """Parameters of c*X when X ~ Tw_p(mu, phi): Tw_p(c*mu, c**(2-p)*phi).

    The Tweedie family is the only dispersion family closed under scaling.
    The Poisson member is the exception in practice: c*Tw_1(mu, 1) would
    need dispersion c**1 != 1, so any c != 1 is rejected there.
    """
    c = float(c)
    if not math.isfinite(c) or c <= 0.0:
        raise DomainError(f"scale factor must be a positive real, got {c!r}")
    if params.p == 1.0 and c != 1.0:
        raise DomainError(
            "the Poisson family (p=1) is not closed under scaling: "
            "c*Tw_1(mu, 1) = Tw_1(c*mu, c) needs dispersion c != 1"
        )
    return TweedieParams(mu=c * params.mu, phi=c ** (2.0 - params.p) * params.phi, p=params.p)
