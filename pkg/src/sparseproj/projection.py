"""Sparsity-inducing projection and LASSO solves via coordinate descent.

All problems here share one quadratic form

    f(u) = u'Qu - 2 u'b + lam * penalty(u)

where penalty(u) sums |u_j| over unsigned coordinates and s_j*u_j over signed
ones.  PENALTY CONVENTION: this objective corresponds to the regression loss
(1/n)||Y - Xu||^2 + lam*||u||_1, so the soft-threshold level is lam/2 per
unit of the Gram diagonal.  Common library conventions (e.g. a 1/(2n) loss
factor) differ by a factor of 2; a lam fitted elsewhere must be doubled, or
halved, accordingly before it is passed in here.

Convergence is certified by the KKT residual (max subgradient violation),
not by parameter change.  The descent solvers are vectorized across batches
of right-hand sides sharing one Q, which is how posterior draws are projected.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDiagonal, InsufficientData, NoConvergence
from .types import Dataset, SparseDraw


@dataclass(frozen=True)
class QuadL1Problem:
    """Quadratic-plus-l1 problem u'Qu - 2u'b + lam*penalty(u).

    signed maps coordinate index -> sign in {-1, +1}; listed coordinates get
    the linear penalty lam*s_j*u_j instead of lam*|u_j|.  Q must be symmetric
    to 1e-12 and lam strictly positive.
    """

    Q: np.ndarray
    b: np.ndarray
    penalty_scale: float
    signed: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        Q = np.array(self.Q, dtype=float, copy=True)
        b = np.array(self.b, dtype=float, copy=True).ravel()
        if Q.ndim != 2 or Q.shape[0] != Q.shape[1] or Q.shape[0] != b.shape[0]:
            raise ValueError(f"Q must be p x p matching b, got {Q.shape} and {b.shape}")
        scale = max(1.0, float(np.abs(Q).max()))
        if float(np.abs(Q - Q.T).max()) > 1e-12 * scale:
            raise ValueError("Q must be symmetric to 1e-12")
        if self.penalty_scale <= 0:
            raise ValueError("penalty_scale must be positive")
        Q = 0.5 * (Q + Q.T)
        Q.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "b", b)
        signed = tuple(sorted((int(j), int(s)) for j, s in dict(self.signed or ()).items()))
        if any(s not in (-1, 1) for _, s in signed):
            raise ValueError("signs must be -1 or +1")
        if any(j < 0 or j >= b.shape[0] for j, _ in signed):
            raise ValueError("signed coordinate out of range")
        object.__setattr__(self, "signed", signed)

    @property
    def p(self) -> int:
        return self.b.shape[0]

    def signs_array(self) -> np.ndarray:
        """Signs as a length-p vector, 0 marking unsigned coordinates."""
        s = np.zeros(self.p)
        for j, sj in self.signed:
            s[j] = sj
        return s


@dataclass(frozen=True)
class SolverSettings:
    tol: float = 1e-10
    max_sweeps: int = 10_000
    warm_start: np.ndarray | None = None

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be at least 1")
        if self.warm_start is not None:
            ws = np.array(self.warm_start, dtype=float, copy=True)
            ws.setflags(write=False)
            object.__setattr__(self, "warm_start", ws)


def _soft(x: np.ndarray, t: float) -> np.ndarray:
    return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)


def _kkt_batch(Q: np.ndarray, B: np.ndarray, lam: float, signs: np.ndarray,
               U: np.ndarray) -> np.ndarray:
    """Max KKT violation per row of U against the shared (Q, lam, signs)."""
    G = 2.0 * (U @ Q - B)
    viol = np.empty_like(U)
    unsigned = signs == 0
    if unsigned.any():
        Gu, Uu = G[:, unsigned], U[:, unsigned]
        active = np.abs(Gu + lam * np.sign(Uu))
        inactive = np.maximum(np.abs(Gu) - lam, 0.0)
        viol[:, unsigned] = np.where(Uu != 0.0, active, inactive)
    if not unsigned.all():
        sgn = ~unsigned
        viol[:, sgn] = np.abs(G[:, sgn] + lam * signs[sgn])
    return viol.max(axis=1)


def _cd_shared(Q: np.ndarray, B: np.ndarray, lam: float, signs: np.ndarray,
               U0: np.ndarray, tol: float, max_sweeps: int) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic coordinate descent on a batch of problems sharing Q.

    B and U0 are (m, p); returns (solutions, per-row KKT residual).  Each
    coordinate update is exact minimization, so the objective is monotone
    along the sweep for every row.
    """
    diag = np.diag(Q).copy()
    if np.any(diag <= 0.0):
        raise DegenerateDiagonal("Q has a nonpositive diagonal entry")
    p = Q.shape[0]
    U = np.array(U0, dtype=float, copy=True)
    half = 0.5 * lam
    for _ in range(max_sweeps):
        for j in range(p):
            r = B[:, j] - U @ Q[:, j] + U[:, j] * diag[j]
            if signs[j] == 0:
                U[:, j] = _soft(r, half) / diag[j]
            else:
                U[:, j] = (r - half * signs[j]) / diag[j]
        kkt = _kkt_batch(Q, B, lam, signs, U)
        if kkt.max() <= tol:
            return U, kkt
    raise NoConvergence(
        f"coordinate descent: residual {kkt.max():.3e} > tol {tol:.1e} "
        f"after {max_sweeps} sweeps"
    )


def _cd_multi(Qs: np.ndarray, Bs: np.ndarray, lam: float, U0: np.ndarray,
              tol: float, max_sweeps: int) -> np.ndarray:
    """Unsigned coordinate descent across problems with distinct Q per row.

    Qs is (K, p, p), Bs and U0 are (K, p); used by the cross-validation path
    where each fold owns its own Gram matrix.
    """
    diag = np.einsum("kjj->kj", Qs).copy()
    if np.any(diag <= 0.0):
        raise DegenerateDiagonal("a fold Gram matrix has a nonpositive diagonal entry")
    K, p = Bs.shape
    U = np.array(U0, dtype=float, copy=True)
    half = 0.5 * lam
    for _ in range(max_sweeps):
        for j in range(p):
            r = Bs[:, j] - np.einsum("kp,kp->k", U, Qs[:, :, j]) + U[:, j] * diag[:, j]
            U[:, j] = _soft(r, half) / diag[:, j]
        G = 2.0 * (np.einsum("kp,kpq->kq", U, Qs) - Bs)
        active = np.abs(G + lam * np.sign(U))
        inactive = np.maximum(np.abs(G) - lam, 0.0)
        kkt = np.where(U != 0.0, active, inactive).max(axis=1)
        if kkt.max() <= tol:
            return U
    raise NoConvergence(f"CV path: residual {kkt.max():.3e} > tol {tol:.1e}")


def solve_quad_l1(problem: QuadL1Problem,
                  settings: SolverSettings = SolverSettings()) -> tuple[np.ndarray, float]:
    """Solve one quadratic-l1 problem; returns (solution, kkt_residual).

    Raises DegenerateDiagonal if any Q_jj <= 0 and NoConvergence if the KKT
    residual is still above tol after max_sweeps full sweeps.
    """
    p = problem.p
    U0 = np.zeros((1, p)) if settings.warm_start is None else \
        np.asarray(settings.warm_start, dtype=float).reshape(1, p)
    U, kkt = _cd_shared(problem.Q, problem.b.reshape(1, p), problem.penalty_scale,
                        problem.signs_array(), U0, settings.tol, settings.max_sweeps)
    return U[0], float(kkt[0])


def kkt_check(problem: QuadL1Problem, u: np.ndarray) -> float:
    """Max violation of the stationarity conditions at u.

    With g = 2Qu - 2b: an unsigned active coordinate contributes
    |g_j + lam*sign(u_j)|, an unsigned zero coordinate max(0, |g_j| - lam),
    and a signed coordinate |g_j + lam*s_j| regardless of its value.
    """
    u = np.asarray(u, dtype=float).reshape(1, problem.p)
    return float(_kkt_batch(problem.Q, problem.b.reshape(1, -1),
                            problem.penalty_scale, problem.signs_array(), u)[0])


def objective_value(problem: QuadL1Problem, u: np.ndarray) -> float:
    """Objective u'Qu - 2u'b + lam*penalty(u) at u."""
    u = np.asarray(u, dtype=float).ravel()
    signs = problem.signs_array()
    pen = np.where(signs == 0, np.abs(u), signs * u).sum()
    return float(u @ problem.Q @ u - 2.0 * u @ problem.b + problem.penalty_scale * pen)


def project(dataset: Dataset, theta: np.ndarray, lambda_n: float,
            settings: SolverSettings = SolverSettings()) -> SparseDraw:
    """Project a dense coefficient draw to its sparse representative.

    Minimizes (1/n)||X theta - Xu||^2 + lambda_n*||u||_1, i.e. the quadratic
    problem with Q = C_n and b = C_n theta.  The support of the result is the
    exact nonzero set produced by the soft-threshold updates.
    """
    theta = np.asarray(theta, dtype=float).ravel()
    if theta.shape[0] != dataset.p:
        raise ValueError(f"theta has length {theta.shape[0]}, expected {dataset.p}")
    problem = QuadL1Problem(Q=dataset.gram, b=dataset.gram @ theta,
                            penalty_scale=lambda_n)
    u, kkt = solve_quad_l1(problem, settings)
    return SparseDraw(theta_star=u, support=frozenset(np.nonzero(u)[0].tolist()),
                      kkt_residual=kkt)


def project_draws(dataset: Dataset, thetas: np.ndarray, lambda_n: float,
                  settings: SolverSettings = SolverSettings(),
                  warm: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Project a whole batch of dense draws at once.

    thetas is (m, p); returns (theta_star matrix (m, p), kkt residuals (m,)).
    Equivalent to calling project per row but one vectorized descent.  warm
    optionally seeds the whole batch, e.g. with the LASSO center.
    """
    thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
    if lambda_n <= 0:
        raise ValueError("lambda_n must be positive")
    m, p = thetas.shape
    B = thetas @ dataset.gram
    U0 = np.zeros((m, p)) if warm is None else np.broadcast_to(warm, (m, p))
    return _cd_shared(dataset.gram, B, lambda_n, np.zeros(p), U0,
                      settings.tol, settings.max_sweeps)


def fit_lasso(dataset: Dataset, lambda_n: float,
              settings: SolverSettings = SolverSettings()) -> np.ndarray:
    """LASSO estimate: minimizer of (1/n)||Y - Xu||^2 + lambda_n*||u||_1.

    Same quadratic form as project but with b = X'Y/n, which is the
    projection of the least-squares solution.
    """
    if lambda_n <= 0:
        raise ValueError("lambda_n must be positive")
    problem = QuadL1Problem(Q=dataset.gram, b=dataset.xty, penalty_scale=lambda_n)
    u, _ = solve_quad_l1(problem, settings)
    return u


def default_lambda_grid(dataset: Dataset, num: int = 100) -> np.ndarray:
    """Descending log-spaced grid from the full-shrinkage threshold down 3 decades."""
    lam_max = 2.0 * float(np.abs(dataset.xty).max())
    if lam_max <= 0:
        lam_max = 1.0  # degenerate X'Y = 0; any grid selects the zero fit
    return np.geomspace(lam_max, lam_max * 1e-3, num=num)


def cross_validate_lambda(dataset: Dataset, grid: np.ndarray | None = None,
                          folds: int = 10, seed: int = 0,
                          settings: SolverSettings = SolverSettings()) -> float:
    """Pick the penalty by K-fold cross-validated squared prediction error.

    Folds come from a seeded permutation of the rows.  The error for a grid
    value pools squared residuals on held-out rows over all folds; ties are
    broken toward the larger penalty.  Raises InsufficientData if n < folds.
    """
    if folds < 2:
        raise ValueError("folds must be at least 2")
    if dataset.n < folds:
        raise InsufficientData(f"n = {dataset.n} rows cannot form {folds} folds")
    if grid is None:
        grid = default_lambda_grid(dataset)
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("grid must be nonempty")
    if np.any(grid <= 0):
        raise ValueError("grid values must be positive")
    order = np.argsort(-grid)  # solve large to small so warm starts carry over
    lam_desc = grid[order]

    rng = np.random.default_rng(np.random.SeedSequence((int(seed), 0x5CF0)))
    perm = rng.permutation(dataset.n)
    chunks = np.array_split(perm, folds)
    X, Y, n = dataset.X, dataset.Y, dataset.n
    xtx_full = dataset.gram * n
    xty_full = dataset.xty * n

    Qs, Bs, tests = [], [], []
    for test_idx in chunks:
        Xt, Yt = X[test_idx], Y[test_idx]
        n_tr = n - len(test_idx)
        Qs.append((xtx_full - Xt.T @ Xt) / n_tr)
        Bs.append((xty_full - Xt.T @ Yt) / n_tr)
        tests.append((Xt, Yt))
    Qs = np.stack(Qs)
    Bs = np.stack(Bs)

    errs = np.zeros(lam_desc.size)
    U = np.zeros((folds, dataset.p))
    for g, lam in enumerate(lam_desc):
        U = _cd_multi(Qs, Bs, float(lam), U, settings.tol, settings.max_sweeps)
        errs[g] = sum(float(np.sum((Yt - Xt @ U[k]) ** 2))
                      for k, (Xt, Yt) in enumerate(tests))
    best = errs.min()
    winners = lam_desc[errs <= best]
    return float(winners.max())
