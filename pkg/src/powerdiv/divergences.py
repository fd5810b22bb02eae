"""Alpha and beta divergences generated by power variance functions.

A mean-variance relationship ``Var(x) = phi * mu**p`` singles out one convex
generator per power index ``p`` (the dual cumulant of the corresponding
dispersion model).  Feeding that generator to the Bregman construction yields
the beta divergence; feeding it to the Csiszar f construction yields the
alpha divergence.  The familiar special cases fall out of the index:

    p = 0    half squared Euclidean (beta) / Pearson (alpha)
    p = 1    Kullback-Leibler (both)
    p = 3/2  Hellinger distance (alpha)
    p = 2    Itakura-Saito (beta) / reversed KL (alpha)

All functions accept scalars or numpy arrays for the point arguments and
broadcast; the power index ``p`` is always a scalar.  Everything here is a
pure function of its inputs.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import DomainError

ArrayLike = Union[float, np.ndarray]

# Half-width of the window around p = 1 and p = 2 inside which the raw
# closed form loses ~|p-1|^-1 precision; the expm1 rearrangement is used
# there instead.  Both branches agree to ~1e-12 at the boundary.
SINGULAR_WINDOW = 1e-4


class ModelClass(enum.Enum):
    """Distribution family attached to a power index, if any."""

    GAUSSIAN = "gaussian"
    POISSON = "poisson"
    COMPOUND_POISSON = "compound_poisson"
    GAMMA = "gamma"
    INVERSE_GAUSSIAN = "inverse_gaussian"
    OTHER_VALID = "other_valid"
    NO_MODEL = "no_model"


def classify(p: float) -> ModelClass:
    """Classify a power index by the model family it induces.

    A dispersion model with variance function ``mu**p`` exists for every real
    ``p`` except ``0 < p < 1``.  Divergences remain well defined on that gap;
    only density evaluation and sampling are barred there.
    """
    p = float(p)
    if not math.isfinite(p):
        raise DomainError(f"power index must be finite, got {p!r}")
    if p == 0.0:
        return ModelClass.GAUSSIAN
    if p == 1.0:
        return ModelClass.POISSON
    if p == 2.0:
        return ModelClass.GAMMA
    if p == 3.0:
        return ModelClass.INVERSE_GAUSSIAN
    if 1.0 < p < 2.0:
        return ModelClass.COMPOUND_POISSON
    if 0.0 < p < 1.0:
        return ModelClass.NO_MODEL
    return ModelClass.OTHER_VALID


@dataclass(frozen=True)
class PowerIndex:
    """A power index together with its model classification."""

    p: float
    model_class: ModelClass

    @classmethod
    def from_p(cls, p: float) -> "PowerIndex":
        return cls(float(p), classify(p))

    @property
    def has_model(self) -> bool:
        return self.model_class is not ModelClass.NO_MODEL


@dataclass(frozen=True)
class ConvexGenerator:
    """A convex scalar function handle with its first derivative."""

    value: Callable[[ArrayLike], ArrayLike]
    deriv: Callable[[ArrayLike], ArrayLike]


def _prepare(x: ArrayLike, mu: ArrayLike):
    """Broadcast the two point arguments; remember if both were scalars."""
    xa = np.asarray(x, dtype=float)
    m = np.asarray(mu, dtype=float)
    scalar = xa.ndim == 0 and m.ndim == 0
    bx, bm = np.broadcast_arrays(xa, m)
    return np.atleast_1d(bx).copy(), np.atleast_1d(bm).copy(), bx.shape, scalar


def _finish(out: np.ndarray, shape, scalar: bool):
    out = out.reshape(shape)
    return float(out) if scalar else out


def _require_finite(name: str, arr: np.ndarray) -> None:
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")


def _check_pair_domain(p: float, x: np.ndarray, mu: np.ndarray, *, mu_positive: bool) -> None:
    """Domain of a divergence pair: everything goes at p=0, otherwise x >= 0
    and mu > 0.  (x = 0 at p >= 2 is in-domain; the value is +inf.)"""
    _require_finite("x", x)
    _require_finite("mu", mu)
    if mu_positive or p != 0.0:
        if np.any(mu <= 0.0):
            raise DomainError(f"mu must be positive for p={p}")
    if p != 0.0 and np.any(x < 0.0):
        raise DomainError(f"x must be nonnegative for p={p}")


def _beta_core(p: float, x: np.ndarray, mu: np.ndarray) -> np.ndarray:
    """Beta divergence values; domains already validated."""
    if p == 0.0:
        d = x - mu
        return 0.5 * d * d

    out = np.empty_like(x)
    zero = x == 0.0
    eq = x == mu
    pos = ~zero & ~eq

    # x = 0: finite mass-point value below p = 2, +inf at and above.
    if p < 2.0:
        b = 2.0 - p
        out[zero] = mu[zero] ** b / b
    else:
        out[zero] = np.inf
    out[eq] = 0.0

    if np.any(pos):
        xp, mp = x[pos], mu[pos]
        if p == 1.0:
            val = xp * np.log(xp / mp) - xp + mp
        elif p == 2.0:
            r = xp / mp
            val = (r - 1.0) - np.log1p(r - 1.0)
        else:
            a = 1.0 - p
            b = 2.0 - p
            if abs(a) < SINGULAR_WINDOW:
                ell = np.log(xp / mp)
                val = mp ** a * (xp * np.expm1(a * ell) - a * (xp - mp)) / (a * (1.0 + a))
            elif abs(b) < SINGULAR_WINDOW:
                ell = np.log(xp / mp)
                val = mp ** b * (np.expm1(b * ell) - b * (xp / mp - 1.0)) / (b * (b - 1.0))
            else:
                val = xp ** b / (a * b) - xp * mp ** a / a + mp ** b / b
        out[pos] = val
    return out


def beta_divergence(p: float, x: ArrayLike, mu: ArrayLike) -> ArrayLike:
    """Beta divergence of order ``p`` between an observation and a reference.

    For p not in {1, 2} this is

        x**(2-p) / ((1-p)(2-p)) - x * mu**(1-p) / (1-p) + mu**(2-p) / (2-p)

    with the KL form ``x log(x/mu) - x + mu`` at p=1 and the Itakura-Saito
    form ``x/mu - log(x/mu) - 1`` at p=2.  Nonnegative, zero iff x == mu.

    Parameters
    ----------
    p : float
        Power index.  Any real value is accepted; no distribution needs to
        exist for the divergence to be defined.
    x : float or ndarray
        Observation.  Any real at p=0, else x >= 0.  At p >= 2 the value
        at x=0 is +inf (returned, not raised).
    mu : float or ndarray
        Reference point.  Any real at p=0, else mu > 0.
    """
    p = float(p)
    bx, bm, shape, scalar = _prepare(x, mu)
    _check_pair_domain(p, bx, bm, mu_positive=False)
    return _finish(_beta_core(p, bx, bm), shape, scalar)


def _alpha_core(p: float, x: np.ndarray, mu: np.ndarray) -> np.ndarray:
    """Alpha divergence values; domains already validated."""
    if p == 0.0:
        d = x - mu
        return 0.5 * d * d / mu

    out = np.empty_like(x)
    zero = x == 0.0
    eq = x == mu
    pos = ~zero & ~eq

    if p < 2.0:
        out[zero] = mu[zero] / (2.0 - p)
    else:
        out[zero] = np.inf
    out[eq] = 0.0

    if np.any(pos):
        xp, mp = x[pos], mu[pos]
        if p == 1.0:
            val = xp * np.log(xp / mp) - xp + mp
        elif p == 2.0:
            val = mp * np.log(mp / xp) + xp - mp
        else:
            a = 1.0 - p
            b = 2.0 - p
            ell = np.log(xp / mp)
            if abs(a) < SINGULAR_WINDOW:
                val = (xp * np.expm1(a * ell) - a * (xp - mp)) / (a * (1.0 + a))
            elif abs(b) < SINGULAR_WINDOW:
                val = (mp * np.expm1(b * ell) - b * (xp - mp)) / (b * (b - 1.0))
            else:
                # grouped so the p=3/2 case is exactly symmetric in (x, mu)
                val = xp ** b * mp ** (p - 1.0) / (a * b) + (mp / b - xp / a)
        out[pos] = val
    return out


def alpha_divergence(p: float, x: ArrayLike, mu: ArrayLike) -> ArrayLike:
    """Alpha divergence of order ``p``: the f-divergence of the same generator.

    For p not in {1, 2} this is

        x**(2-p) * mu**(p-1) / ((1-p)(2-p)) - x / (1-p) + mu / (2-p)

    with KL at p=1, reversed KL at p=2, the Pearson form (x-mu)**2 / (2 mu)
    at p=0 and the Hellinger distance 2*(sqrt(x)-sqrt(mu))**2 at p=3/2.
    The reference must satisfy mu > 0 for every p (it scales the argument).
    """
    p = float(p)
    bx, bm, shape, scalar = _prepare(x, mu)
    _check_pair_domain(p, bx, bm, mu_positive=True)
    return _finish(_alpha_core(p, bx, bm), shape, scalar)


def dual_cumulant(p: float, mu: ArrayLike) -> ArrayLike:
    """Dual cumulant of the power-variance family, normalized so that the
    value and slope vanish at 1.

    For p not in {1, 2}:

        mu**(2-p) / ((1-p)(2-p)) - mu / (1-p) + 1 / (2-p)

    with limits ``mu log mu - mu + 1`` (p=1) and ``mu - log mu - 1`` (p=2).
    Convex in mu; equals the beta divergence to the reference point 1.
    """
    p = float(p)
    m = np.asarray(mu, dtype=float)
    scalar = m.ndim == 0
    m1 = np.atleast_1d(m).astype(float)
    _require_finite("mu", m1)
    if p != 0.0 and np.any(m1 <= 0.0):
        raise DomainError(f"mu must be positive for p={p}")
    ones = np.ones_like(m1)
    return _finish(_beta_core(p, m1, ones), m.shape, scalar)


def _theta_core(p: float, mu: np.ndarray) -> np.ndarray:
    """Normalized derivative of the dual cumulant: (mu**(1-p) - 1) / (1-p)."""
    if p == 1.0:
        return np.log(mu)
    a = 1.0 - p
    if abs(a) < SINGULAR_WINDOW:
        return np.expm1(a * np.log(mu)) / a
    return (mu ** a - 1.0) / a


def power_generator(p: float) -> ConvexGenerator:
    """The dual cumulant of order ``p`` packaged as a Bregman/f generator."""
    p = float(p)

    def value(t: ArrayLike) -> ArrayLike:
        return dual_cumulant(p, t)

    def deriv(t: ArrayLike) -> ArrayLike:
        arr = np.asarray(t, dtype=float)
        scalar = arr.ndim == 0
        t1 = np.atleast_1d(arr)
        _require_finite("mu", t1)
        if p == 0.0:
            out = t1 - 1.0
        else:
            if np.any(t1 <= 0.0):
                raise DomainError(f"mu must be positive for p={p}")
            out = _theta_core(p, t1)
        return _finish(out, arr.shape, scalar)

    return ConvexGenerator(value=value, deriv=deriv)


def _as_generator(generator) -> ConvexGenerator:
    if isinstance(generator, ConvexGenerator):
        return generator
    if isinstance(generator, tuple) and len(generator) == 2:
        return ConvexGenerator(value=generator[0], deriv=generator[1])
    if callable(generator):
        return ConvexGenerator(value=generator, deriv=None)  # type: ignore[arg-type]
    raise TypeError("generator must be a ConvexGenerator, (value, deriv) pair, or callable")


def bregman(generator, x: ArrayLike, mu: ArrayLike) -> ArrayLike:
    """Bregman divergence of an arbitrary convex generator.

    Returns ``f(x) - f(mu) - (x - mu) f'(mu)``, the first-order Taylor
    remainder of the generator at ``mu``.  The generator supplies both the
    value and the derivative (``ConvexGenerator`` or a ``(value, deriv)``
    pair of callables); evaluation errors propagate from the callables.
    """
    gen = _as_generator(generator)
    if gen.deriv is None:
        raise TypeError("bregman requires a generator with a derivative")
    return gen.value(x) - gen.value(mu) - (np.asarray(x, float) - np.asarray(mu, float)) * gen.deriv(mu)


def f_divergence(generator, x: ArrayLike, mu: ArrayLike) -> ArrayLike:
    """Csiszar f-divergence ``mu * f(x / mu)`` for convex f with f(1) = 0."""
    gen = _as_generator(generator)
    m = np.asarray(mu, dtype=float)
    if np.any(np.atleast_1d(m) <= 0.0):
        raise DomainError("mu must be positive for an f-divergence")
    return m * gen.value(np.asarray(x, dtype=float) / m)


def alpha_dual_index(p: float) -> float:
    """Index of the argument-swapped alpha divergence: d_p(x, mu) = d_{3-p}(mu, x)."""
    return 3.0 - float(p)


def beta_from_alpha(p: float, x: ArrayLike, mu: ArrayLike) -> ArrayLike:
    """Beta divergence computed through the connection ``mu**(1-p) * alpha``."""
    p = float(p)
    m = np.asarray(mu, dtype=float)
    return m ** (1.0 - p) * alpha_divergence(p, x, mu)


def q_convention(p: float) -> float:
    """Convert the power index to the ``q = 2 - p`` convention (an involution)."""
    return 2.0 - float(p)


def beta_divergence_mu_gradient(p: float, x: ArrayLike, mu: ArrayLike) -> ArrayLike:
    """Partial derivative of the beta divergence in its reference argument:
    ``-(x - mu) / mu**p``.  Its zero over a sample sits at the sample mean
    for every p, which is what makes the mean estimator index-free."""
    p = float(p)
    bx, bm, shape, scalar = _prepare(x, mu)
    _check_pair_domain(p, bx, bm, mu_positive=False)
    return _finish(-(bx - bm) / bm ** p, shape, scalar)


@dataclass(frozen=True)
class CorrespondenceRow:
    """One line of the index / distribution / divergence correspondence."""

    p: float
    beta_alpha_ratio: str
    distribution: str
    beta: str
    alpha: str
    entropy: str


CORRESPONDENCE_TABLE: tuple[CorrespondenceRow, ...] = (
    CorrespondenceRow(0.0, "mu", "Gaussian", "EU", "Pearson (1/2 chi^2)", "L2"),
    CorrespondenceRow(1.0, "1", "Poisson", "KL", "KL", "Shannon"),
    CorrespondenceRow(1.5, "mu^(-1/2)", "Comp. Poisson", "-", "Hellinger dist.", "-"),
    CorrespondenceRow(2.0, "mu^(-1)", "Gamma", "IS", "Reversed KL", "Burg"),
    CorrespondenceRow(3.0, "mu^(-2)", "Inv. Gaussian", "-", "Rev. Pearson", "-"),
)
