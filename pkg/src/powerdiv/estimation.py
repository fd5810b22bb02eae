"""Maximum-likelihood fitting of Tweedie parameters.

The mean is free: the beta-divergence gradient in the reference argument is
-(x - mu)/mu**p, whose zero over a sample is the sample mean regardless of
the index, so mu_hat never needs an optimizer.  The dispersion is profiled
out per candidate index by a bracketed golden-section search over log(phi),
and the index itself is picked by comparing profile likelihoods over a grid
of candidates, with golden refinement inside the continuous compound-Poisson
segment (1, 2).  Choosing p this way is exactly choosing which divergence
the data prefer, since the log-likelihood kernel is -d_beta/phi.

Feasibility of a candidate p is a property of the data: negative values
leave only the Gaussian; zeros rule out p >= 2; non-integers rule out the
Poisson; 0 < p < 1 has no model at all.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .divergences import ModelClass, beta_divergence, beta_divergence_mu_gradient, classify
from .errors import DomainError, SeriesError
from .tweedie import DensityMethod, TweedieParams, _resolve_method, log_densities

__all__ = [
    "Dataset",
    "FitResult",
    "ProfilePoint",
    "fit_mu",
    "log_likelihood",
    "fit",
    "deviance_profile",
    "default_p_grid",
    "feasible_p",
]

_LOG_PHI_LO = math.log(1e-6)
_LOG_PHI_HI = math.log(1e6)
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_LOGLIK_TOL = 1e-8
_MAX_ITER = 200


@dataclass(frozen=True)
class Dataset:
    """A sample of observations, as a flat float vector.

    Values must be finite; everything else (sign, zeros, integrality) is a
    per-candidate-p feasibility question settled at fit time.  An empty
    dataset is legal and has log-likelihood 0 under any model; fitting it
    is not.
    """

    values: np.ndarray

    def __init__(self, values):
        arr = np.asarray(values, dtype=float).ravel()
        if arr.size and not np.all(np.isfinite(arr)):
            raise DomainError("dataset values must be finite")
        object.__setattr__(self, "values", arr)

    @property
    def count(self) -> int:
        return int(self.values.size)

    @classmethod
    def from_values(cls, values) -> "Dataset":
        return cls(values)


@dataclass(frozen=True)
class FitResult:
    """Joint maximum-likelihood estimate of (mu, phi, p) with diagnostics.

    phi_tilde is the mean-deviance dispersion total_deviance/(2n), reported
    for comparison only; phi_hat is the profile-ML estimate.  iterations
    counts every 1-D optimizer step spent across the fit.
    """

    mu_hat: float
    phi_hat: float
    p_hat: float
    log_likelihood: float
    total_deviance: float
    iterations: int
    converged: bool
    p_feasible_interval: tuple[float, float]
    phi_tilde: float
    density_method: DensityMethod


@dataclass(frozen=True)
class ProfilePoint:
    """One row of a profile over p: deviance at the sample mean plus the
    profile log-likelihood and its maximizing dispersion."""

    p: float
    total_deviance: float
    log_likelihood: float
    phi_hat: float
    feasible: bool


def feasible_p(p: float, data: Dataset) -> bool:
    """Whether a Tweedie model at index p can host every observation.

    Gaussian (p=0) takes anything; negative values kill every other index;
    p=1 needs integers; zeros are only allowed below p=2; indices outside
    [0, 1] with p < 0 or p > 3 evaluate through the saddlepoint base
    measure, which needs strictly positive data; no model exists in (0, 1).
    A positive mean is required everywhere except p=0.
    """
    p = float(p)
    if classify(p) is ModelClass.NO_MODEL:
        return False
    if p == 0.0:
        return True
    v = data.values
    if v.size == 0:
        return True
    if np.any(v < 0.0):
        return False
    if float(np.mean(v)) <= 0.0:
        return False
    if p == 1.0:
        return bool(np.all(v == np.floor(v)))
    if 1.0 < p < 2.0:
        return True
    return bool(np.all(v > 0.0))


def default_p_grid(p_min: float | None = None, p_max: float | None = None) -> np.ndarray:
    """Candidate indices {0, 1, 2, 3} plus a 0.1-step grid over (1, 2),
    optionally clipped to [p_min, p_max] (the endpoints join the grid when
    they are themselves usable indices)."""
    pts = np.concatenate([[0.0, 1.0, 2.0, 3.0], np.arange(1.05, 1.96, 0.1)])
    lo = -np.inf if p_min is None else float(p_min)
    hi = np.inf if p_max is None else float(p_max)
    if lo > hi:
        raise DomainError(f"empty index range [{lo}, {hi}]")
    pts = pts[(pts >= lo) & (pts <= hi)]
    for edge in (p_min, p_max):
        if edge is not None and not 0.0 < float(edge) < 1.0:
            pts = np.append(pts, float(edge))
    return np.unique(np.round(pts, 12))


def fit_mu(p: float, data: Dataset) -> float:
    """Minimizer of the total beta divergence in mu: the sample mean.

    The stationarity condition sum_i (x_i - mu)/mu**p = 0 does not involve
    p beyond a positive factor, so the same estimator serves every index.
    The vanishing of the gradient at the returned value is asserted.
    """
    p = float(p)
    if data.count == 0:
        raise DomainError("cannot fit a mean to an empty dataset")
    v = data.values
    if p != 0.0 and np.any(v < 0.0):
        raise DomainError(f"negative observations are outside the domain for p={p}")
    mu = float(np.mean(v))
    if p != 0.0 and mu <= 0.0:
        raise DomainError(f"the mean estimate must be positive for p={p}")
    grad = float(np.sum(beta_divergence_mu_gradient(p, v, mu)))
    scale = max(1.0, float(np.max(np.abs(v)))) / max(abs(mu), 1e-300) ** p
    assert abs(grad) <= 1e-8 * data.count * scale, "divergence gradient did not vanish at the mean"
    return mu


def log_likelihood(params: TweedieParams, data: Dataset) -> float:
    """Sum of log densities (log masses at compound-Poisson zeros)."""
    if data.count == 0:
        return 0.0
    return float(np.sum(log_densities(params, data.values)))


def _loglik_at(p: float, mu: float, log_phi: float, data: Dataset) -> float:
    """Profile objective; series blowups count as impossible, not fatal."""
    try:
        return log_likelihood(TweedieParams(mu=mu, phi=math.exp(log_phi), p=p), data)
    except SeriesError:
        return -math.inf


def _golden_max(f, a: float, b: float, xtol: float, ftol: float = _LOGLIK_TOL):
    """Golden-section maximization on [a, b].

    Returns (x_best, f_best, iterations, converged); converged means a
    tolerance stopped the search rather than the iteration cap.
    """
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    it = 2
    converged = False
    while it < _MAX_ITER:
        narrow = (b - a) <= xtol
        flat = abs(f1 - f2) <= ftol and (b - a) <= math.sqrt(xtol)
        if narrow or flat:
            converged = True
            break
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
        it += 1
    if (b - a) <= xtol:
        converged = True
    if f1 >= f2:
        return x1, f1, it, converged
    return x2, f2, it, converged


def _profile_phi(p: float, mu: float, data: Dataset):
    """Maximize the log-likelihood over log(phi) in [1e-6, 1e6] at fixed p.

    Starts from the mean-deviance anchor, expands a bracket downhill on
    both sides (in log space, geometric steps), then golden-sections.
    Returns (phi_hat, loglik, iterations, converged).
    """
    if p == 1.0:
        return 1.0, _loglik_at(p, mu, 0.0, data), 1, True

    def f(lam: float) -> float:
        return _loglik_at(p, mu, lam, data)

    anchor = float(np.mean(beta_divergence(p, data.values, mu)))
    lam0 = min(max(math.log(anchor) if anchor > 0 else _LOG_PHI_LO, _LOG_PHI_LO), _LOG_PHI_HI)
    f0 = f(lam0)
    it = 1
    if not math.isfinite(f0):
        grid = np.linspace(_LOG_PHI_LO, _LOG_PHI_HI, 49)
        vals = np.array([f(g) for g in grid])
        it += grid.size
        if not np.any(np.isfinite(vals)):
            return math.nan, -math.inf, it, False
        lam0 = float(grid[int(np.argmax(vals))])
        f0 = float(np.max(vals))

    h = math.log(2.0)
    lo, hi = lam0, lam0
    flo = fhi = f0
    step = h
    while lo > _LOG_PHI_LO:
        probe = max(lo - step, _LOG_PHI_LO)
        fp = f(probe)
        it += 1
        if fp <= flo:
            lo = probe
            break
        lo, flo = probe, fp
        step *= 2.0
    step = h
    while hi < _LOG_PHI_HI:
        probe = min(hi + step, _LOG_PHI_HI)
        fp = f(probe)
        it += 1
        if fp <= fhi:
            hi = probe
            break
        hi, fhi = probe, fp
        step *= 2.0

    lam, fl, g_it, conv = _golden_max(f, lo, hi, xtol=1e-9)
    it += g_it
    at_edge = lam - _LOG_PHI_LO < 1e-6 or _LOG_PHI_HI - lam < 1e-6
    return math.exp(lam), fl, it, conv and not at_edge


def fit(
    data: Dataset,
    *,
    p_grid=None,
    p_min: float | None = None,
    p_max: float | None = None,
) -> FitResult:
    """Joint maximum-likelihood fit of (mu, phi, p).

    Candidates come from p_grid when given, otherwise from the default grid
    clipped to [p_min, p_max].  For each feasible candidate the mean is the
    sample mean and the dispersion is profiled out; the winner (ties to the
    lower index) is golden-refined to |delta p| <= 1e-3 when it sits in the
    open compound-Poisson segment (1, 2), where the likelihood varies
    continuously in p.  The density method is picked per index: exact where
    a closed form exists, the series on (1, 2), the saddlepoint elsewhere.
    """
    if data.count == 0:
        raise DomainError("cannot fit an empty dataset")
    if p_grid is not None:
        candidates = np.unique(np.asarray(list(p_grid), dtype=float))
        if candidates.size == 0:
            raise DomainError("empty candidate grid")
    else:
        candidates = default_p_grid(p_min, p_max)

    feasible = [float(p) for p in candidates if feasible_p(p, data)]
    if not feasible:
        raise DomainError("no candidate p is feasible for this dataset")

    iterations = 0
    best = None  # (loglik, p, phi, converged)
    for p in feasible:
        mu = fit_mu(p, data)
        phi, ll, it, conv = _profile_phi(p, mu, data)
        iterations += it
        if best is None or ll > best[0]:
            best = (ll, p, phi, conv)

    ll_best, p_best, phi_best, conv_best = best

    inner = sorted(q for q in feasible if 1.0 < q < 2.0)
    if 1.0 < p_best < 2.0 and len(inner) > 1:
        i = inner.index(p_best)
        lo = inner[i - 1] if i > 0 else max(1.0 + 1e-6, p_best - 0.1)
        hi = inner[i + 1] if i + 1 < len(inner) else min(2.0 - 1e-6, p_best + 0.1)
        mu = float(np.mean(data.values))
        inner_cost = [0]

        def g(p: float) -> float:
            _, ll, it_inner, _ = _profile_phi(p, mu, data)
            inner_cost[0] += it_inner
            return ll

        p_ref, ll_ref, it, conv_ref = _golden_max(g, lo, hi, xtol=1e-3)
        iterations += it + inner_cost[0]
        if ll_ref > ll_best:
            phi_best, ll_best, it2, conv2 = _profile_phi(p_ref, mu, data)
            iterations += it2
            p_best = p_ref
            conv_best = conv_ref and conv2

    mu_hat = fit_mu(p_best, data)
    total_dev = float(np.sum(2.0 * beta_divergence(p_best, data.values, mu_hat)))
    return FitResult(
        mu_hat=mu_hat,
        phi_hat=phi_best,
        p_hat=p_best,
        log_likelihood=ll_best,
        total_deviance=total_dev,
        iterations=iterations,
        converged=conv_best,
        p_feasible_interval=(min(feasible), max(feasible)),
        phi_tilde=total_dev / (2.0 * data.count),
        density_method=_resolve_method(p_best, None),
    )


def deviance_profile(data: Dataset, p_values) -> list[ProfilePoint]:
    """Deviance and profile log-likelihood across candidate indices.

    The deviance column uses the sample mean and only needs the divergence
    to be defined, so it can be reported even where no model exists for the
    data (marked infeasible, with NaN likelihood columns).
    """
    if data.count == 0:
        raise DomainError("cannot profile an empty dataset")
    v = data.values
    mu = float(np.mean(v))
    out = []
    for p in np.asarray(list(p_values), dtype=float):
        p = float(p)
        div_ok = p == 0.0 or (not np.any(v < 0.0) and mu > 0.0)
        dev = float(np.sum(2.0 * beta_divergence(p, v, mu))) if div_ok else math.nan
        if feasible_p(p, data):
            phi, ll, _, _ = _profile_phi(p, mu, data)
            out.append(ProfilePoint(p, dev, ll, phi, True))
        else:
            out.append(ProfilePoint(p, dev, math.nan, math.nan, False))
    return out
