"""Conjugate posterior factorization and sampling.

Oracle: the ridge mean is checked against a dense np.linalg.solve, and the
gamma rate against the residual identity
    rate = b2 + (||Y - X m||^2 + a_n ||m||^2) / 2,
which is algebraically equal to the Y'Y - Y'X m form used in the code but
computed along a different path.
"""

import numpy as np
import pytest
from scipy.linalg import solve_triangular

from sparseproj.errors import SingularSystem
from sparseproj.posterior import (
    PosteriorFactorization,
    factorize,
    sample_posterior,
    sample_posterior_arrays,
)
from sparseproj.types import PriorConfig, validate_dataset


def make_dataset(n=50, p=3, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, p))
    Y = X @ rng.standard_normal(p) + rng.standard_normal(n)
    return validate_dataset(X, Y)


def test_identity_design_flat_prior_recovers_y():
    Y = np.array([1.0, 2.0, 3.0])
    ds = validate_dataset(np.eye(3), Y)
    fact = factorize(ds, PriorConfig(a_n=0.0))
    np.testing.assert_allclose(fact.ridge_mean, Y, atol=1e-12)
    # perfect fit: the residual is zero, so the rate clips to exactly 0
    assert fact.gamma_rate == 0.0
    assert fact.gamma_shape == 1.5


def test_zero_design_gives_prior_gamma_parameters():
    ds = validate_dataset(np.zeros((2, 1)), np.array([1.0, 1.0]))
    fact = factorize(ds, PriorConfig(a_n=1.0))
    np.testing.assert_allclose(fact.ridge_mean, [0.0])
    assert fact.gamma_shape == pytest.approx(1.0)
    assert fact.gamma_rate == pytest.approx(1.0)


def test_ridge_mean_matches_dense_solve():
    ds = make_dataset()
    for a_n in (0.0, 1.0, 17.3):
        fact = factorize(ds, PriorConfig(a_n=a_n))
        expected = np.linalg.solve(ds.X.T @ ds.X + a_n * np.eye(ds.p), ds.X.T @ ds.Y)
        np.testing.assert_allclose(fact.ridge_mean, expected, atol=1e-10)


def test_gamma_rate_residual_identity():
    ds = make_dataset(seed=5)
    prior = PriorConfig(a_n=2.0, b1=0.5, b2=0.25)
    fact = factorize(ds, prior)
    m = fact.ridge_mean
    resid = ds.Y - ds.X @ m
    expected = prior.b2 + 0.5 * (resid @ resid + prior.a_n * (m @ m))
    assert fact.gamma_rate == pytest.approx(expected, rel=1e-12)
    assert fact.gamma_shape == pytest.approx(prior.b1 + ds.n / 2)


def test_precision_cholesky_reconstructs():
    ds = make_dataset(seed=9)
    fact = factorize(ds, PriorConfig(a_n=3.0))
    L = fact.precision_chol
    np.testing.assert_allclose(L @ L.T, ds.n * ds.gram + 3.0 * np.eye(ds.p), rtol=1e-12)
    assert np.all(np.diag(L) > 0)


def test_rank_deficient_flat_prior_raises():
    X = np.column_stack([np.ones(6), np.ones(6)])
    ds = validate_dataset(X, np.arange(6.0))
    with pytest.raises(SingularSystem):
        factorize(ds, PriorConfig(a_n=0.0))
    # any positive ridge rescues it
    factorize(ds, PriorConfig(a_n=1e-6))


def test_sampling_rejects_degenerate_sigma_law():
    ds = validate_dataset(np.eye(2), np.array([1.0, -1.0]))
    fact = factorize(ds, PriorConfig(a_n=0.0))  # perfect fit, rate 0
    with pytest.raises(SingularSystem):
        sample_posterior_arrays(fact, 10, seed=0)


def test_sampling_rejects_bad_count():
    fact = factorize(make_dataset(), PriorConfig())
    with pytest.raises(ValueError):
        sample_posterior_arrays(fact, 0, seed=0)


def test_sampling_deterministic():
    fact = factorize(make_dataset(seed=2), PriorConfig())
    t1, s1 = sample_posterior_arrays(fact, 64, seed=11)
    t2, s2 = sample_posterior_arrays(fact, 64, seed=11)
    np.testing.assert_array_equal(t1, t2)
    np.testing.assert_array_equal(s1, s2)
    t3, _ = sample_posterior_arrays(fact, 64, seed=12)
    assert not np.array_equal(t1, t3)


def test_sharded_sampling_deterministic_given_shard_count():
    fact = factorize(make_dataset(seed=2), PriorConfig())
    t1, s1 = sample_posterior_arrays(fact, 101, seed=4, shards=7)
    t2, s2 = sample_posterior_arrays(fact, 101, seed=4, shards=7)
    np.testing.assert_array_equal(t1, t2)
    np.testing.assert_array_equal(s1, s2)
    assert t1.shape == (101, 3) and s1.shape == (101,)


def test_sample_posterior_wraps_arrays():
    fact = factorize(make_dataset(seed=2), PriorConfig())
    thetas, sigmas = sample_posterior_arrays(fact, 8, seed=3)
    draws = sample_posterior(fact, 8, seed=3)
    assert len(draws) == 8
    for i, d in enumerate(draws):
        np.testing.assert_array_equal(d.theta, thetas[i])
        assert d.sigma == sigmas[i]
        assert d.sigma > 0


def test_moments_large_sample():
    ds = make_dataset(n=60, p=3, seed=7)
    fact = factorize(ds, PriorConfig(a_n=1.0))
    count = 100_000
    thetas, sigmas = sample_posterior_arrays(fact, count, seed=42, shards=4)

    shape, rate = fact.gamma_shape, fact.gamma_rate
    # tau = sigma^-2 is Gamma(shape, rate): mean shape/rate, sd sqrt(shape)/rate
    tau = sigmas ** -2.0
    tau_se = np.sqrt(shape) / rate / np.sqrt(count)
    assert abs(tau.mean() - shape / rate) < 3 * tau_se

    sigma_cov = np.linalg.inv(ds.n * ds.gram + np.eye(ds.p))
    exp_sigma2 = rate / (shape - 1.0)
    theta_cov = exp_sigma2 * sigma_cov

    # posterior mean of theta equals the ridge mean
    se = np.sqrt(np.diag(theta_cov) / count)
    assert np.all(np.abs(thetas.mean(axis=0) - fact.ridge_mean) < 4 * se)

    # marginal covariance of theta is E[sigma^2] * (X'X + a_n I)^-1
    emp_cov = np.cov(thetas.T)
    np.testing.assert_allclose(emp_cov, theta_cov, rtol=0.05, atol=1e-4)

    # whitened displacements L'(theta - m)/sigma are iid standard normal
    L = fact.precision_chol
    w = ((thetas - fact.ridge_mean) @ L) / sigmas[:, None]
    assert np.all(np.abs(w.mean(axis=0)) < 4 / np.sqrt(count))
    assert np.all(np.abs(w.var(axis=0) - 1.0) < 0.03)
    off = np.cov(w.T) - np.eye(ds.p)
    assert np.max(np.abs(off)) < 0.03


def test_factorization_arrays_read_only():
    fact = factorize(make_dataset(), PriorConfig())
    with pytest.raises(ValueError):
        fact.ridge_mean[0] = 1.0
    with pytest.raises(ValueError):
        fact.precision_chol[0, 0] = 1.0


def test_whitening_matches_triangular_solve():
    # a single draw reproduced by hand from the factorization contract
    fact = factorize(make_dataset(seed=13), PriorConfig(a_n=0.5))
    rng = np.random.default_rng(np.random.SeedSequence((99, 0)))
    tau = rng.gamma(fact.gamma_shape, 1.0 / fact.gamma_rate, size=1)
    z = rng.standard_normal((1, 3))
    sigma = tau[0] ** -0.5
    disp = solve_triangular(fact.precision_chol.T, z[0], lower=False)
    expected = fact.ridge_mean + sigma * disp
    thetas, sigmas = sample_posterior_arrays(fact, 1, seed=99)
    np.testing.assert_allclose(thetas[0], expected, rtol=1e-12)
    assert sigmas[0] == pytest.approx(sigma, rel=1e-12)
