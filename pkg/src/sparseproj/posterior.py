"""Conjugate normal-inverse-gamma posterior for the regression coefficients.

Given Y = X theta + eps with eps ~ N(0, sigma^2 I), a N(0, (sigma^2/a_n) I)
prior on theta and an inverse-gamma prior on sigma^2, the posterior factors
as

    sigma^-2 | Y            ~ Gamma(b1 + n/2, b2 + resid/2)
    theta | (Y, sigma)      ~ N(m, sigma^2 (X'X + a_n I)^-1)

with m the ridge mean.  Sampling goes through the Cholesky factor of the
precision matrix (never an explicit inverse): theta = m + sigma * L^-T z.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .errors import SingularSystem
from .types import Dataset, PosteriorDraw, PriorConfig


@dataclass(frozen=True)
class PosteriorFactorization:
    """Everything sampling needs: ridge mean, lower Cholesky factor L of the
    precision X'X + a_n I, and the gamma parameters of the sigma^-2 law."""

    ridge_mean: np.ndarray
    precision_chol: np.ndarray
    gamma_shape: float
    gamma_rate: float

    def __post_init__(self):
        for name in ("ridge_mean", "precision_chol"):
            arr = np.array(getattr(self, name), dtype=float, copy=True)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


def factorize(dataset: Dataset, prior: PriorConfig) -> PosteriorFactorization:
    """Factor the posterior for a dataset under the given prior.

    Works entirely from the accumulated cross products: the precision is
    n*gram + a_n I, the ridge mean solves it against n*xty, and the gamma
    rate uses the residual identity b2 + (Y'Y - Y'X m)/2.

    Raises SingularSystem when the precision is not positive definite
    (possible only with a_n = 0 and rank-deficient X).
    """
    n, p = dataset.n, dataset.p
    precision = n * dataset.gram + prior.a_n * np.eye(p)
    try:
        chol = np.linalg.cholesky(precision)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem("X'X + a_n I is not positive definite") from exc
    xty_full = n * dataset.xty
    half = solve_triangular(chol, xty_full, lower=True)
    ridge_mean = solve_triangular(chol.T, half, lower=False)
    yty = float(dataset.Y @ dataset.Y)
    gamma_rate = prior.b2 + 0.5 * (yty - float(xty_full @ ridge_mean))
    gamma_rate = max(gamma_rate, 0.0)  # clip fp dust when Y lies in span(X)
    gamma_shape = prior.b1 + 0.5 * n
    return PosteriorFactorization(
        ridge_mean=ridge_mean,
        precision_chol=chol,
        gamma_shape=float(gamma_shape),
        gamma_rate=float(gamma_rate),
    )


def _shard_sizes(count: int, shards: int) -> list[int]:
    base, extra = divmod(count, shards)
    return [base + (1 if s < extra else 0) for s in range(shards)]


def sample_posterior_arrays(
    fact: PosteriorFactorization, count: int, seed: int, shards: int = 1
) -> tuple[np.ndarray, np.ndarray]:
    """Draw (thetas, sigmas) as arrays of shape (count, p) and (count,).

    Each shard owns an RNG stream keyed by (seed, shard index), so the draw
    sequence depends only on (seed, shards), never on scheduling.  Draws are
    concatenated in shard order, i.e. canonical draw-index order.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    if fact.gamma_shape <= 0 or fact.gamma_rate <= 0:
        raise SingularSystem(
            "sigma posterior is degenerate (gamma_shape and gamma_rate must be positive)"
        )
    L = fact.precision_chol
    p = L.shape[0]
    thetas = np.empty((count, p))
    sigmas = np.empty(count)
    start = 0
    for s, size in enumerate(_shard_sizes(count, shards)):
        if size == 0:
            continue
        rng = np.random.default_rng(np.random.SeedSequence((int(seed), s)))
        tau = rng.gamma(fact.gamma_shape, 1.0 / fact.gamma_rate, size=size)
        z = rng.standard_normal((size, p))
        sigma = tau ** -0.5
        # theta = m + sigma * L^-T z, one triangular solve for the whole shard
        disp = solve_triangular(L.T, z.T, lower=False).T
        thetas[start:start + size] = fact.ridge_mean + sigma[:, None] * disp
        sigmas[start:start + size] = sigma
        start += size
    return thetas, sigmas


def sample_posterior(
    fact: PosteriorFactorization, count: int, seed: int, shards: int = 1
) -> list[PosteriorDraw]:
    """Draw from the joint posterior of (theta, sigma); deterministic given seed."""
    thetas, sigmas = sample_posterior_arrays(fact, count, seed, shards=shards)
    return [PosteriorDraw(theta=thetas[i], sigma=float(sigmas[i])) for i in range(count)]
