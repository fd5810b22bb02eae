"""Closed forms, generator constructions, and structural identities."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from powerdiv import (
    CORRESPONDENCE_TABLE,
    ConvexGenerator,
    DomainError,
    ModelClass,
    PowerIndex,
    alpha_divergence,
    alpha_dual_index,
    beta_divergence,
    beta_divergence_mu_gradient,
    beta_from_alpha,
    bregman,
    classify,
    dual_cumulant,
    f_divergence,
    power_generator,
    q_convention,
)

KL_2_1 = 0.3862943611198906      # 2 ln 2 - 1
IS_2_1 = 0.3068528194400547      # 1 - ln 2


def test_beta_special_values():
    assert beta_divergence(0.0, 3.0, 1.0) == 2.0
    assert_allclose(beta_divergence(1.0, 2.0, 1.0), KL_2_1, rtol=0, atol=1e-15)
    assert_allclose(beta_divergence(2.0, 2.0, 1.0), IS_2_1, rtol=0, atol=1e-15)
    assert beta_divergence(1.5, 1.0, 1.0) == 0.0


def test_alpha_special_values():
    assert alpha_divergence(0.0, 3.0, 2.0) == 0.25
    assert_allclose(alpha_divergence(1.5, 4.0, 1.0), 2.0, rtol=0, atol=1e-15)
    assert_allclose(alpha_divergence(1.0, 2.0, 1.0), KL_2_1, rtol=0, atol=1e-15)


def test_dual_cumulant_values_and_normalization():
    assert_allclose(dual_cumulant(1.0, 2.0), KL_2_1, rtol=0, atol=1e-15)
    assert_allclose(dual_cumulant(2.0, 2.0), IS_2_1, rtol=0, atol=1e-15)
    assert dual_cumulant(0.0, 3.0) == 2.0
    for p in (-1.0, 0.0, 0.5, 1.0, 1.5, 2.0, 2.7, 3.0):
        assert dual_cumulant(p, 1.0) == 0.0
        # slope at 1 vanishes too
        h = 1e-7
        slope = (dual_cumulant(p, 1.0 + h) - dual_cumulant(p, 1.0 - h)) / (2 * h)
        assert abs(slope) < 1e-7


def test_dual_cumulant_is_beta_to_one():
    rng = np.random.default_rng(11)
    for _ in range(200):
        p = rng.uniform(-2.0, 4.0)
        m = rng.uniform(0.05, 8.0)
        assert_allclose(dual_cumulant(p, m), beta_divergence(p, m, 1.0), rtol=1e-13, atol=1e-15)


def test_closed_form_grids():
    x = np.linspace(0.1, 5.0, 25)
    mu = np.linspace(0.2, 4.0, 25)[:, None]
    xx, mm = np.broadcast_arrays(x, mu)
    assert_allclose(beta_divergence(0.0, xx, mm), 0.5 * (xx - mm) ** 2, atol=1e-12, rtol=0)
    assert_allclose(beta_divergence(1.0, xx, mm), xx * np.log(xx / mm) - xx + mm, atol=1e-12, rtol=0)
    assert_allclose(beta_divergence(2.0, xx, mm), xx / mm - np.log(xx / mm) - 1.0, atol=1e-12, rtol=0)
    assert_allclose(alpha_divergence(0.0, xx, mm), 0.5 * (xx - mm) ** 2 / mm, atol=1e-12, rtol=0)
    assert_allclose(alpha_divergence(1.5, xx, mm), 2.0 * (np.sqrt(xx) - np.sqrt(mm)) ** 2,
                    atol=1e-12, rtol=0)
    assert_allclose(alpha_divergence(2.0, xx, mm), mm * np.log(mm / xx) + xx - mm,
                    atol=1e-12, rtol=0)


def test_nonnegative_and_zero_iff_equal():
    rng = np.random.default_rng(5150)
    for _ in range(2000):
        p = rng.uniform(-2.0, 4.5)
        x = rng.uniform(1e-3, 10.0)
        mu = rng.uniform(1e-3, 10.0)
        db = beta_divergence(p, x, mu)
        da = alpha_divergence(p, x, mu)
        assert db >= 0.0 and da >= 0.0
        if abs(x - mu) > 1e-12:
            assert db > 0.0 and da > 0.0
    assert beta_divergence(1.3, 0.7, 0.7) == 0.0
    assert alpha_divergence(2.4, 0.7, 0.7) == 0.0


def test_bregman_specializes_to_beta():
    rng = np.random.default_rng(99)
    for _ in range(500):
        p = rng.uniform(-2.0, 4.0)
        x = rng.uniform(0.05, 9.0)
        mu = rng.uniform(0.05, 9.0)
        db = beta_divergence(p, x, mu)
        got = bregman(power_generator(p), x, mu)
        assert abs(got - db) <= 1e-10 * (1.0 + abs(db))


def test_f_divergence_specializes_to_alpha():
    rng = np.random.default_rng(100)
    for _ in range(500):
        p = rng.uniform(-2.0, 4.0)
        x = rng.uniform(0.05, 9.0)
        mu = rng.uniform(0.05, 9.0)
        da = alpha_divergence(p, x, mu)
        got = f_divergence(power_generator(p), x, mu)
        assert abs(got - da) <= 1e-10 * (1.0 + abs(da))


def test_f_divergence_kl_example():
    assert_allclose(f_divergence(power_generator(1.0), 2.0, 1.0), KL_2_1, atol=1e-12, rtol=0)
    assert f_divergence(power_generator(1.7), 3.3, 3.3) == 0.0
    with pytest.raises(DomainError):
        f_divergence(power_generator(1.0), 2.0, -1.0)


def test_bregman_quadratic_generator():
    gen = ConvexGenerator(value=lambda t: 0.5 * np.asarray(t) ** 2,
                          deriv=lambda t: np.asarray(t, dtype=float))
    assert bregman(gen, 3.0, 1.0) == 2.0
    assert bregman(gen, 4.0, 4.0) == 0.0
    # a (value, deriv) tuple works too
    assert bregman((gen.value, gen.deriv), 3.0, 1.0) == 2.0


def test_bregman_affine_invariance():
    rng = np.random.default_rng(7)
    base = power_generator(1.5)
    a, b = 0.83, -2.4
    tilted = ConvexGenerator(value=lambda t: base.value(t) + a * np.asarray(t) + b,
                             deriv=lambda t: base.deriv(t) + a)
    for _ in range(100):
        x = rng.uniform(0.1, 6.0)
        mu = rng.uniform(0.1, 6.0)
        d0 = bregman(base, x, mu)
        d1 = bregman(tilted, x, mu)
        assert abs(d1 - d0) <= 1e-10 * (1.0 + abs(d0))


def test_alpha_duality():
    rng = np.random.default_rng(21)
    for _ in range(500):
        p = rng.uniform(-2.0, 4.0)
        x = rng.uniform(0.05, 9.0)
        mu = rng.uniform(0.05, 9.0)
        lhs = alpha_divergence(p, x, mu)
        rhs = alpha_divergence(alpha_dual_index(p), mu, x)
        assert abs(lhs - rhs) <= 1e-10 * (1.0 + abs(lhs))
    assert alpha_dual_index(1.5) == 1.5
    assert alpha_dual_index(0.0) == 3.0


def test_connection_beta_equals_scaled_alpha():
    rng = np.random.default_rng(22)
    for _ in range(500):
        p = rng.uniform(-2.0, 4.0)
        x = rng.uniform(0.05, 9.0)
        mu = rng.uniform(0.05, 9.0)
        db = beta_divergence(p, x, mu)
        got = beta_from_alpha(p, x, mu)
        assert abs(got - db) <= 1e-10 * (1.0 + abs(db))


def test_connection_special_points():
    # at p=1 the two divergences coincide
    assert_allclose(alpha_divergence(1.0, 3.0, 2.0), beta_divergence(1.0, 3.0, 2.0),
                    rtol=1e-14)
    # at mu=1 both reduce to the dual cumulant
    for p in (-0.5, 0.0, 1.5, 2.5):
        assert_allclose(beta_from_alpha(p, 2.3, 1.0), dual_cumulant(p, 2.3), rtol=1e-13)
    assert beta_from_alpha(0.0, 3.0, 2.0) == 0.5
    # equality of beta and alpha requires p=1 or mu=1
    assert abs(alpha_divergence(1.5, 3.0, 2.0) - beta_divergence(1.5, 3.0, 2.0)) > 1e-3


def test_scale_laws():
    rng = np.random.default_rng(23)
    for _ in range(300):
        p = rng.uniform(-2.0, 4.0)
        x = rng.uniform(0.05, 9.0)
        mu = rng.uniform(0.05, 9.0)
        c = 10.0 ** rng.uniform(-3.0, 3.0)
        db = beta_divergence(p, x, mu)
        da = alpha_divergence(p, x, mu)
        assert abs(beta_divergence(p, c * x, c * mu) - c ** (2.0 - p) * db) \
            <= 1e-10 * (1.0 + c ** (2.0 - p) * db)
        assert abs(alpha_divergence(p, c * x, c * mu) - c * da) <= 1e-10 * (1.0 + c * da)


def test_limit_continuity_at_singular_indices():
    eps = 1e-6
    pts = [(2.0, 0.7), (0.3, 1.9), (5.0, 5.0), (1.0, 3.0)]
    for p0 in (1.0, 2.0):
        for x, mu in pts:
            lim_b = beta_divergence(p0, x, mu)
            lim_a = alpha_divergence(p0, x, mu)
            lim_c = dual_cumulant(p0, mu)
            for s in (-1.0, 1.0):
                p = p0 + s * eps
                assert abs(beta_divergence(p, x, mu) - lim_b) <= 1e-4 * (1.0 + abs(lim_b))
                assert abs(alpha_divergence(p, x, mu) - lim_a) <= 1e-4 * (1.0 + abs(lim_a))
                assert abs(dual_cumulant(p, mu) - lim_c) <= 1e-4 * (1.0 + abs(lim_c))


def test_branch_boundary_agreement():
    # the stable expansion and the raw formula meet smoothly at the window edge
    for p0 in (1.0, 2.0):
        for x, mu in [(2.0, 0.7), (0.4, 3.1)]:
            for side in (-1.0, 1.0):
                inner = beta_divergence(p0 + side * (1e-4 - 1e-9), x, mu)
                outer = beta_divergence(p0 + side * (1e-4 + 1e-9), x, mu)
                assert abs(inner - outer) <= 1e-8 * (1.0 + abs(inner))


def test_hellinger_symmetry_and_triangle():
    rng = np.random.default_rng(31)
    for _ in range(200):
        x = rng.uniform(0.05, 9.0)
        mu = rng.uniform(0.05, 9.0)
        assert alpha_divergence(1.5, x, mu) == alpha_divergence(1.5, mu, x)
    for _ in range(500):
        a, b, c = rng.uniform(0.05, 9.0, size=3)
        dist = lambda u, v: math.sqrt(alpha_divergence(1.5, u, v) / 2.0)
        assert dist(a, c) <= dist(a, b) + dist(b, c) + 1e-12


def test_mu_gradient_closed_form_and_fd():
    rng = np.random.default_rng(41)
    for _ in range(300):
        p = rng.uniform(-1.5, 4.0)
        x = rng.uniform(0.1, 8.0)
        mu = rng.uniform(0.1, 8.0)
        g = beta_divergence_mu_gradient(p, x, mu)
        assert_allclose(g, -(x - mu) / mu ** p, rtol=1e-13)
        h = 1e-6 * mu
        fd = (beta_divergence(p, x, mu + h) - beta_divergence(p, x, mu - h)) / (2 * h)
        assert abs(fd - g) <= 1e-6 * (1.0 + abs(g))


def test_zero_observation_values():
    # below p=2 the x=0 value is finite, at and above it is +inf
    assert beta_divergence(1.5, 0.0, 2.0) == 2.0 ** 0.5 / 0.5
    assert math.isinf(beta_divergence(2.0, 0.0, 1.0))
    assert math.isinf(beta_divergence(3.0, 0.0, 2.0))
    assert alpha_divergence(1.0, 0.0, 3.0) == 3.0
    assert math.isinf(alpha_divergence(2.5, 0.0, 1.0))


def test_domain_errors():
    with pytest.raises(DomainError):
        beta_divergence(1.5, -0.1, 1.0)
    with pytest.raises(DomainError):
        beta_divergence(1.5, 1.0, 0.0)
    with pytest.raises(DomainError):
        beta_divergence(1.0, 1.0, -2.0)
    with pytest.raises(DomainError):
        alpha_divergence(0.0, 1.0, 0.0)   # alpha needs mu > 0 even at p=0
    with pytest.raises(DomainError):
        beta_divergence(0.0, np.nan, 1.0)
    with pytest.raises(DomainError):
        dual_cumulant(2.0, -1.0)
    with pytest.raises(DomainError):
        classify(math.inf)
    # p=0 accepts any reals
    assert beta_divergence(0.0, -3.0, -1.0) == 2.0


def test_classification():
    assert classify(0.0) is ModelClass.GAUSSIAN
    assert classify(1.0) is ModelClass.POISSON
    assert classify(1.5) is ModelClass.COMPOUND_POISSON
    assert classify(2.0) is ModelClass.GAMMA
    assert classify(3.0) is ModelClass.INVERSE_GAUSSIAN
    assert classify(0.5) is ModelClass.NO_MODEL
    assert classify(-1.0) is ModelClass.OTHER_VALID
    assert classify(4.2) is ModelClass.OTHER_VALID
    idx = PowerIndex.from_p(0.5)
    assert not idx.has_model
    assert PowerIndex.from_p(1.5).has_model


def test_q_convention_involution():
    for p in (-1.0, 0.0, 1.0, 1.5, 2.0, 3.0):
        q = q_convention(p)
        assert q == 2.0 - p
        assert q_convention(q) == p
    assert q_convention(1.0) == 1.0


def test_correspondence_table_contents():
    by_p = {row.p: row for row in CORRESPONDENCE_TABLE}
    assert by_p[0.0].distribution == "Gaussian" and by_p[0.0].beta == "EU"
    assert by_p[1.0].beta == "KL" and by_p[1.0].alpha == "KL"
    assert by_p[1.5].alpha == "Hellinger dist."
    assert by_p[2.0].distribution == "Gamma"
    assert by_p[2.0].beta == "IS" and by_p[2.0].alpha == "Reversed KL"
    assert by_p[3.0].distribution == "Inv. Gaussian"


def test_array_and_scalar_shapes():
    xs = np.array([0.5, 1.0, 2.0])
    out = beta_divergence(1.5, xs, 1.0)
    assert isinstance(out, np.ndarray) and out.shape == xs.shape
    assert isinstance(beta_divergence(1.5, 2.0, 1.0), float)
    # broadcasting across both arguments
    mus = np.array([[1.0], [2.0]])
    out2 = alpha_divergence(0.0, xs, mus)
    assert out2.shape == (2, 3)
    single = np.array(2.0)
    assert isinstance(beta_divergence(1.5, single, 1.0), float)
