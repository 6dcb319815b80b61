"""Limit-experiment sampler: closed forms, nested-MC coverage, zero mass.

The orthogonal case (C = I) has closed-form branch solutions, so most checks
reconstruct the conditional draws white-box (the (seed, 0x75) stream) and
compare coordinate by coordinate.  Conditional coverage probabilities are
checked against the analytic h/psi functions at Monte-Carlo precision.
"""

import numpy as np
import pytest

from sparseproj.calibration import CalibrationQuery, h_plus, h_zero, psi, psi_zero, solve_gamma
from sparseproj.limits import (
    LimitSpec,
    limitcheck_rows,
    limiting_coverage_mc,
    sample_t_star,
    sample_xi,
    zero_mass_probability,
)
from sparseproj.types import NormSelector


def eye_spec(signs, sigma0=1.0, lambda0=1.0):
    signs = np.asarray(signs, dtype=float)
    return LimitSpec(C=np.eye(signs.size), sigma0=sigma0, lambda0=lambda0,
                     theta0_signs=signs)


def w_star_reference(spec, delta, seed, count):
    """White-box reconstruction of the conditional W* draws."""
    rng = np.random.default_rng(np.random.SeedSequence((int(seed), 0x75)))
    Z = rng.standard_normal((count, spec.p))
    w, V = np.linalg.eigh(spec.C)
    inv_half = (V / np.sqrt(w)) @ V.T
    return spec.sigma0 * (np.asarray(delta, dtype=float) + Z) @ inv_half


# --- LimitSpec ---------------------------------------------------------------

def test_spec_validation():
    with pytest.raises(ValueError):
        LimitSpec(C=np.array([[1.0, 0.2], [0.0, 1.0]]), sigma0=1.0, lambda0=1.0,
                  theta0_signs=np.array([1.0, 0.0]))
    with pytest.raises(ValueError):
        LimitSpec(C=np.array([[1.0, 2.0], [2.0, 1.0]]), sigma0=1.0, lambda0=1.0,
                  theta0_signs=np.array([1.0, 0.0]))  # eigenvalues -1, 3
    with pytest.raises(ValueError):
        eye_spec([0.5, 0.0])
    with pytest.raises(ValueError):
        eye_spec([1.0, 0.0], sigma0=0.0)
    with pytest.raises(ValueError):
        eye_spec([1.0, 0.0], lambda0=-0.1)
    with pytest.raises(ValueError):
        LimitSpec(C=np.eye(3), sigma0=1.0, lambda0=1.0,
                  theta0_signs=np.array([1.0, 0.0]))


def test_spec_properties():
    spec = eye_spec([1.0, -1.0, 0.0, 0.0])
    assert spec.p == 4 and spec.s0 == 2
    assert not spec.C.flags.writeable


# --- sample_xi ---------------------------------------------------------------

def test_xi_positive_sign_branch():
    spec = eye_spec([1.0], lambda0=1.0)
    xi = sample_xi(spec, np.array([0.3]))
    assert xi[0] == pytest.approx(-0.2, abs=1e-10)


def test_xi_noise_inside_band_is_zero():
    spec = eye_spec([0.0], lambda0=1.0)
    for d in (-0.5, -0.2, 0.0, 0.3, 0.5):
        assert sample_xi(spec, np.array([d]))[0] == 0.0


def test_xi_identity_closed_forms_mixed():
    spec = eye_spec([1.0, -1.0, 0.0], sigma0=1.5, lambda0=0.8)
    delta = np.array([0.4, -1.2, 0.9])
    xi = sample_xi(spec, delta)
    b = 1.5 * delta
    assert xi[0] == pytest.approx(b[0] - 0.4, abs=1e-10)
    assert xi[1] == pytest.approx(b[1] + 0.4, abs=1e-10)
    assert xi[2] == pytest.approx(np.sign(b[2]) * max(abs(b[2]) - 0.4, 0.0), abs=1e-10)


def test_xi_zero_penalty_linear_solve():
    rng = np.random.default_rng(0)
    A = rng.standard_normal((3, 3))
    C = A @ A.T / 3 + 0.5 * np.eye(3)
    spec = LimitSpec(C=C, sigma0=2.0, lambda0=0.0,
                     theta0_signs=np.array([1.0, 0.0, -1.0]))
    delta = rng.standard_normal(3)
    w, V = np.linalg.eigh(C)
    expected = 2.0 * (V / np.sqrt(w)) @ V.T @ delta
    np.testing.assert_allclose(sample_xi(spec, delta), expected, atol=1e-9)


def test_xi_rejects_wrong_length():
    with pytest.raises(ValueError):
        sample_xi(eye_spec([1.0, 0.0]), np.zeros(3))


# --- sample_t_star -----------------------------------------------------------

def test_t_star_identity_branches_white_box():
    spec = eye_spec([1.0, -1.0, 0.0], sigma0=1.3, lambda0=0.8)
    delta = np.array([0.4, -1.2, 0.1])
    T = sample_t_star(spec, delta, seed=5, count=200)
    assert T.shape == (200, 3)
    W = w_star_reference(spec, delta, seed=5, count=200)
    np.testing.assert_allclose(T[:, 0], W[:, 0] - 0.4, atol=1e-9)
    np.testing.assert_allclose(T[:, 1], W[:, 1] + 0.4, atol=1e-9)
    soft = np.sign(W[:, 2]) * np.maximum(np.abs(W[:, 2]) - 0.4, 0.0)
    np.testing.assert_allclose(T[:, 2], soft, atol=1e-9)
    # noise coordinate is exactly zero inside the band, never approximately
    np.testing.assert_array_equal(T[:, 2] == 0.0, np.abs(W[:, 2]) <= 0.4)


def test_t_star_zero_penalty_is_w_star():
    rng = np.random.default_rng(1)
    A = rng.standard_normal((2, 2))
    C = A @ A.T / 2 + 0.5 * np.eye(2)
    spec = LimitSpec(C=C, sigma0=0.7, lambda0=0.0,
                     theta0_signs=np.array([1.0, 0.0]))
    delta = np.array([0.2, -0.5])
    T = sample_t_star(spec, delta, seed=9, count=50)
    W = w_star_reference(spec, delta, seed=9, count=50)
    np.testing.assert_allclose(T, W, atol=1e-9)


def test_t_star_deterministic_in_seed():
    spec = eye_spec([1.0, 0.0])
    delta = np.array([0.3, -0.1])
    a = sample_t_star(spec, delta, seed=3, count=10)
    b = sample_t_star(spec, delta, seed=3, count=10)
    np.testing.assert_array_equal(a, b)
    c = sample_t_star(spec, delta, seed=4, count=10)
    assert not np.array_equal(a, c)


# --- conditional coverage equals the h functions -----------------------------

def test_conditional_coverage_matches_h_functions():
    inner = 4000
    cases = [
        # (signs, sigma0, lambda0, delta_j, analytic)
        ([1.0], 1.0, 1.2, 0.9, h_plus(1.2, 0.9)),
        ([-1.0], 1.0, 1.2, -0.7, h_plus(1.2, 0.7)),
        ([0.0], 1.0, 1.5, 1.4, h_zero(1.5, 1.4)),
        ([0.0], 1.0, 1.5, 0.2, h_zero(1.5, 0.2)),
        ([1.0], 2.0, 1.0, 0.8, h_plus(0.5, 0.8)),  # sigma0 rescales the penalty
    ]
    for signs, sigma0, lam, dj, q_true in cases:
        spec = eye_spec(signs, sigma0=sigma0, lambda0=lam)
        delta = np.array([dj])
        xi = sample_xi(spec, delta)
        T = sample_t_star(spec, delta, seed=17, count=inner)
        q_hat = float(np.mean(np.abs(T[:, 0] - xi[0]) <= abs(xi[0])))
        se = max(np.sqrt(q_true * (1.0 - q_true) / inner), 1e-3)
        assert abs(q_hat - q_true) <= 3 * se, (signs, lam, dj, q_hat, q_true)


# --- limiting_coverage_mc ----------------------------------------------------

def test_coverage_signal_component():
    lam = 1.0
    level = solve_gamma(CalibrationQuery(lambda0=lam, target=0.95)).gamma_level
    spec = eye_spec([1.0], lambda0=lam)
    est = limiting_coverage_mc(spec, NormSelector.component(0), level,
                               outer=600, inner=800, seed=2)
    se = np.sqrt(0.95 * 0.05 / 600)
    assert abs(est - 0.95) <= 3 * se


def test_coverage_noise_component_dominates():
    lam = 1.0
    res = solve_gamma(CalibrationQuery(lambda0=lam, target=0.95))
    spec = eye_spec([0.0], lambda0=lam)
    est = limiting_coverage_mc(spec, NormSelector.component(0), res.gamma_level,
                               outer=600, inner=800, seed=3)
    expected = res.psi0_at_gamma
    se = np.sqrt(expected * (1.0 - expected) / 600)
    assert est >= 0.95
    assert abs(est - expected) <= 3 * se


def test_coverage_bvm_case_equals_level():
    spec2 = LimitSpec(C=np.eye(2), sigma0=1.0, lambda0=0.0,
                      theta0_signs=np.array([1.0, 0.0]))
    for selector in (NormSelector.component(0), NormSelector.euclidean()):
        est = limiting_coverage_mc(spec2, selector, 0.9, outer=600, inner=800,
                                   seed=4)
        se = np.sqrt(0.9 * 0.1 / 600)
        assert abs(est - 0.9) <= 3 * se


def test_coverage_validation():
    spec = eye_spec([1.0])
    with pytest.raises(ValueError):
        limiting_coverage_mc(spec, NormSelector.component(0), 0.9, outer=50,
                             inner=100, seed=0)
    with pytest.raises(ValueError):
        limiting_coverage_mc(spec, NormSelector.component(0), 0.9, outer=100,
                             inner=99, seed=0)
    with pytest.raises(ValueError):
        limiting_coverage_mc(spec, NormSelector.component(0), 1.0, outer=100,
                             inner=100, seed=0)


def test_coverage_worker_count_invariant():
    spec = eye_spec([1.0, 0.0], lambda0=0.5)
    sel = NormSelector.component(1)
    one = limiting_coverage_mc(spec, sel, 0.93, outer=100, inner=100, seed=7)
    two = limiting_coverage_mc(spec, sel, 0.93, outer=100, inner=100, seed=7,
                               workers=2)
    assert one == two


def test_coverage_deterministic():
    spec = eye_spec([1.0], lambda0=0.8)
    sel = NormSelector.component(0)
    a = limiting_coverage_mc(spec, sel, 0.95, outer=100, inner=100, seed=11)
    b = limiting_coverage_mc(spec, sel, 0.95, outer=100, inner=100, seed=11)
    assert a == b


# --- zero_mass_probability ---------------------------------------------------

def test_zero_mass_saturates_for_huge_penalty():
    spec = eye_spec([1.0, 0.0], lambda0=10.0)
    est = zero_mass_probability(spec, np.zeros(2), inner=10_000, seed=0)
    assert est >= 0.999


def test_zero_mass_zero_penalty():
    spec = eye_spec([1.0, 0.0], lambda0=0.0)
    assert zero_mass_probability(spec, np.zeros(2), inner=1000, seed=0) == 0.0


def test_zero_mass_unit_penalty_value():
    # P(|N(0,1)| <= 1/2) = Phi(.5) - Phi(-.5)
    expected = 0.38292492254802624
    spec = eye_spec([1.0, 0.0], lambda0=1.0)
    inner = 10_000
    est = zero_mass_probability(spec, np.zeros(2), inner=inner, seed=1)
    se = np.sqrt(expected * (1.0 - expected) / inner)
    assert abs(est - expected) <= 3 * se
    assert est == pytest.approx(0.38292, abs=3 * se)


def test_zero_mass_strictly_positive_with_any_positive_penalty():
    rng = np.random.default_rng(5)
    spec = eye_spec([1.0, -1.0, 0.0], lambda0=0.5)
    est = zero_mass_probability(spec, rng.standard_normal(3), inner=10_000, seed=2)
    assert est > 0.0


def test_zero_mass_requires_noise_coordinate():
    spec = eye_spec([1.0, -1.0], lambda0=1.0)
    with pytest.raises(ValueError):
        zero_mass_probability(spec, np.zeros(2), inner=1000, seed=0)


# --- limitcheck_rows ---------------------------------------------------------

def test_limitcheck_rows_layout():
    def builder(lam):
        return eye_spec([1.0, 0.0], lambda0=lam)

    rows = limitcheck_rows(builder, [0.5], target=0.95, outer=100, inner=100,
                           seed=0)
    assert len(rows) == 2
    res = solve_gamma(CalibrationQuery(lambda0=0.5, target=0.95))
    sig, noi = rows
    assert sig["role"] == "signal" and noi["role"] == "noise"
    assert sig["coordinate"] == 0 and noi["coordinate"] == 1
    for row in rows:
        assert row["lambda0"] == 0.5
        assert row["level"] == res.gamma_level
        assert 0.0 <= row["estimate"] <= 1.0
        est = row["estimate"]
        assert row["mc_se"] == pytest.approx(np.sqrt(est * (1 - est) / 100))
    assert sig["analytic"] == res.psi_at_gamma
    assert noi["analytic"] == res.psi0_at_gamma
