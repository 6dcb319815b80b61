"""Analytic limiting-coverage functions and credibility-level calibration.

For a componentwise credible interval built at credibility 1 - gamma, the
limiting frequentist coverage depends on the rescaled penalty lam0 and on
whether the true coefficient is a signal or a zero:

    signal coverage   psi(gamma, lam0)  = Phi(lam0/2 + z) - Phi(lam0/2 - z)
    zero coverage     psi_zero(gamma, lam0) = P(h_zero(lam0, Z) <= 1 - gamma)

with z = z_{gamma/2} and Z standard normal.  solve_gamma inverts psi in
gamma so a requested coverage target is hit exactly in the limit; the
calibration table tabulates that inversion over a penalty grid.

Since psi < 1 - gamma for lam0 > 0, the requested credibility must exceed
the coverage target; a table row says by how much.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

from .normal import norm_cdf, norm_pdf, norm_ppf

_BISECT_TOL = 1e-12
_Z_HI = 40.0  # Phi saturates to double precision well before this


@dataclass(frozen=True)
class CalibrationQuery:
    """Inputs to a calibration lookup.

    lambda0 is the limiting rescaled penalty lambda_n * sqrt(n).  c_j (the
    limiting Gram diagonal) and sigma0 (error s.d.) rescale it to the
    effective penalty lambda0 * sqrt(c_j) / sigma0; both default to 1.
    """

    lambda0: float
    target: float
    c_j: float = 1.0
    sigma0: float = 1.0

    def __post_init__(self):
        if self.lambda0 < 0:
            raise ValueError("lambda0 must be nonnegative")
        if not 0.0 < self.target < 1.0:
            raise ValueError("target must lie in (0, 1)")
        if self.c_j <= 0 or self.sigma0 <= 0:
            raise ValueError("c_j and sigma0 must be positive")

    @property
    def effective_lambda(self) -> float:
        return self.lambda0 * self.c_j ** 0.5 / self.sigma0


@dataclass(frozen=True)
class CalibrationResult:
    gamma_level: float       # credibility 1 - gamma to request
    psi_at_gamma: float      # achieved limiting signal coverage (= target)
    psi0_at_gamma: float     # limiting zero-coefficient coverage


def h_plus(lambda0: float, zeta: float) -> float:
    """Conditional coverage of a positive-signal coordinate given the
    standardized limit draw zeta: 2*Phi(|zeta - lambda0/2|) - 1."""
    return 2.0 * norm_cdf(abs(zeta - 0.5 * lambda0)) - 1.0


def h_minus(lambda0: float, zeta: float) -> float:
    """Negative-signal counterpart, the mirror image of h_plus."""
    return h_plus(lambda0, -zeta)


def h_zero(lambda0: float, zeta: float) -> float:
    """Conditional coverage of a zero coordinate given zeta.

    Piecewise in zeta with breakpoint b = lambda0/2; the middle branch covers
    |zeta| <= b and the outer branches are mirror images of each other, so
    h_zero is even in zeta.
    """
    b = 0.5 * lambda0
    if zeta > b:
        return norm_cdf(zeta - b) - norm_cdf(-zeta - b)
    if zeta < -b:
        return norm_cdf(-zeta + b) - norm_cdf(zeta + b)
    return norm_cdf(zeta + b) - norm_cdf(zeta - b)


def psi(alpha: float, lambda0: float) -> float:
    """Limiting coverage of a signal coordinate at credibility 1 - alpha."""
    z = norm_ppf(1.0 - 0.5 * alpha)
    return norm_cdf(0.5 * lambda0 + z) - norm_cdf(0.5 * lambda0 - z)


def _bisect(f, lo: float, hi: float, tol: float = _BISECT_TOL) -> float:
    # f(lo) and f(hi) must bracket a sign change; plain midpoint bisection
    flo = f(lo)
    if flo == 0.0:
        return lo
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol:
            return mid
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0.0) == (flo > 0.0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def psi_zero(alpha: float, lambda0: float) -> float:
    """Limiting coverage of a zero coordinate at credibility 1 - alpha.

    The defining integral is the standard-normal mass of the set where
    h_zero <= 1 - alpha.  h_zero is even, decreasing on [0, b] and
    increasing on [b, inf) with b = lambda0/2, so that set is a symmetric
    pair of intervals whose endpoints are found by bisection on the two
    monotone branches.
    """
    if lambda0 == 0.0:
        return 1.0 - alpha
    b = 0.5 * lambda0
    t = 1.0 - alpha
    f = lambda z: h_zero(lambda0, z) - t
    if f(b) > 0.0:
        return 0.0  # even the minimum of h_zero exceeds the credibility
    z1 = 0.0 if f(0.0) <= 0.0 else _bisect(f, 0.0, b)
    hi = b + _Z_HI
    z2 = _bisect(f, b, hi) if f(hi) > 0.0 else hi
    return 2.0 * (norm_cdf(z2) - norm_cdf(z1))


def _zero_of_psi(lambda_eff: float, target: float, method: str = "bisect") -> float:
    """Solve Phi(l/2 + z) - Phi(l/2 - z) = target for z >= 0.

    The left side is strictly increasing in z from 0 to 1, so the root is
    unique.  method "bisect" is the production path; "newton" is a second,
    independent route kept for cross-checking the table against round-off
    and misprints.
    """
    half = 0.5 * lambda_eff

    def g(z: float) -> float:
        return norm_cdf(half + z) - norm_cdf(half - z)

    if method == "bisect":
        return _bisect(lambda z: g(z) - target, 0.0, _Z_HI)
    if method == "newton":
        z = norm_ppf(0.5 + 0.5 * target)  # exact for lambda_eff = 0
        for _ in range(100):
            step = (g(z) - target) / (norm_pdf(half + z) + norm_pdf(half - z))
            z -= step
            if abs(step) < 1e-14:
                break
        return z
    raise ValueError(f"unknown method {method!r}")


def solve_gamma(query: CalibrationQuery, method: str = "bisect") -> CalibrationResult:
    """Find the credibility level whose limiting signal coverage equals target.

    Inverts psi at the effective penalty lambda0*sqrt(c_j)/sigma0 by monotone
    bisection on z_{gamma/2} (tolerance 1e-12) and reports the level 1 - gamma
    together with psi and psi_zero evaluated at the solution.
    """
    lam = query.effective_lambda
    z = _zero_of_psi(lam, query.target, method=method)
    gamma = 2.0 * (1.0 - norm_cdf(z))
    # floor keeps 1 - gamma/2 strictly below 1.0 in doubles, so the quantile
    # lookups inside psi stay well defined when the penalty saturates the level
    gamma = min(max(gamma, 1e-15), 1.0 - 1e-15)
    return CalibrationResult(
        gamma_level=1.0 - gamma,
        psi_at_gamma=psi(gamma, lam),
        psi0_at_gamma=psi_zero(gamma, lam),
    )


# Penalty grid of the reference calibration table: 0.05..1 by 0.05,
# 1.1..2 by 0.1, 2.2..3 by 0.2, then 3.5 and 4.
TABLE_LAMBDAS = tuple(
    [round(0.05 * k, 2) for k in range(1, 21)]
    + [round(1.0 + 0.1 * k, 1) for k in range(1, 11)]
    + [round(2.0 + 0.2 * k, 1) for k in range(1, 6)]
    + [3.5, 4.0]
)
TABLE_TARGETS = (0.9, 0.925, 0.95, 0.975, 0.99)


def calibration_table(lambdas=TABLE_LAMBDAS, targets=TABLE_TARGETS,
                      method: str = "bisect") -> list[list[float]]:
    """gamma_level over the grid; one row per lambda, one column per target."""
    if not lambdas or not targets:
        raise ValueError("lambdas and targets must be nonempty")
    return [
        [solve_gamma(CalibrationQuery(lambda0=lam, target=t), method=method).gamma_level
         for t in targets]
        for lam in lambdas
    ]


def display_level(level: float) -> str:
    """Four-decimal display of a credibility level, truncated rather than
    rounded so the printed value never overstates the computed one (the
    reference-table convention: 0.970852 displays as 0.9708, 0.990173 as
    0.9901).  The 1e-9 nudge only absorbs representation noise at an exact
    four-decimal boundary.
    """
    return f"{math.floor(level * 10000.0 + 1e-9) / 10000.0:.4f}"


def calibration_table_csv(lambdas=TABLE_LAMBDAS, targets=TABLE_TARGETS) -> str:
    """CSV text of the calibration table: rows lambda, columns targets.

    Cells use the truncating four-decimal display convention of
    display_level; calibration_table keeps full precision.
    """
    rows = calibration_table(lambdas, targets)
    out = io.StringIO()
    out.write("lambda," + ",".join(f"{t:g}" for t in targets) + "\n")
    for lam, row in zip(lambdas, rows):
        out.write(f"{lam:g}," + ",".join(display_level(v) for v in row) + "\n")
    return out.getvalue()
