"""Value-type construction, validation, and immutability."""

import numpy as np
import pytest

from sparseproj.errors import DimensionMismatch, NonFiniteInput, SparseProjError
from sparseproj.types import (
    CredibleRegion,
    Dataset,
    FitConfig,
    NormSelector,
    PosteriorDraw,
    PriorConfig,
    SparseDraw,
    validate_dataset,
)


def test_validate_dataset_tiny_example():
    ds = validate_dataset(np.array([[1.0], [1.0]]), np.array([1.0, 3.0]))
    assert ds.n == 2 and ds.p == 1
    np.testing.assert_allclose(ds.gram, [[1.0]])
    np.testing.assert_allclose(ds.xty, [2.0])


def test_validate_dataset_normalizes_by_n():
    rng = np.random.default_rng(3)
    X = rng.standard_normal((40, 3))
    Y = rng.standard_normal(40)
    ds = validate_dataset(X, Y)
    np.testing.assert_allclose(ds.gram, X.T @ X / 40, rtol=1e-12)
    np.testing.assert_allclose(ds.xty, X.T @ Y / 40, rtol=1e-12)
    np.testing.assert_array_equal(ds.gram, ds.gram.T)


def test_validate_dataset_shape_mismatch():
    with pytest.raises(DimensionMismatch):
        validate_dataset(np.ones((3, 2)), np.ones(2))


def test_validate_dataset_rejects_nan_and_inf():
    X = np.ones((4, 2))
    Y = np.ones(4)
    Xbad = X.copy()
    Xbad[1, 0] = np.nan
    with pytest.raises(NonFiniteInput):
        validate_dataset(Xbad, Y)
    Ybad = Y.copy()
    Ybad[0] = np.inf
    with pytest.raises(NonFiniteInput):
        validate_dataset(X, Ybad)


def test_validate_dataset_rejects_empty():
    with pytest.raises(DimensionMismatch):
        validate_dataset(np.ones((0, 2)), np.ones(0))


def test_dataset_arrays_are_read_only():
    ds = validate_dataset(np.eye(3), np.arange(3.0))
    for arr in (ds.X, ds.Y, ds.gram, ds.xty):
        with pytest.raises(ValueError):
            arr[0] = 99.0


def test_dataset_copies_input():
    X = np.eye(2)
    Y = np.ones(2)
    ds = validate_dataset(X, Y)
    X[0, 0] = 7.0
    assert ds.X[0, 0] == 1.0


def test_errors_share_base_class():
    assert issubclass(DimensionMismatch, SparseProjError)
    assert issubclass(NonFiniteInput, SparseProjError)


def test_prior_config_defaults_and_validation():
    cfg = PriorConfig()
    assert cfg.a_n == 1.0 and cfg.b1 == 0.0 and cfg.b2 == 0.0
    PriorConfig(a_n=0.0)  # allowed, full-rank check deferred to factorization
    with pytest.raises(ValueError):
        PriorConfig(a_n=-1.0)
    with pytest.raises(ValueError):
        PriorConfig(b2=-0.5)


def test_fit_config_validation():
    cfg = FitConfig()
    assert cfg.lambda_n == "auto" and cfg.draws == 2000 and cfg.level == 0.95
    FitConfig(lambda_n=0.3, target_coverage=0.9)
    with pytest.raises(ValueError):
        FitConfig(lambda_n="cv")
    with pytest.raises(ValueError):
        FitConfig(lambda_n=0.0)
    with pytest.raises(ValueError):
        FitConfig(draws=1)
    with pytest.raises(ValueError):
        FitConfig(level=1.0)
    with pytest.raises(ValueError):
        FitConfig(target_coverage=0.0)


def test_posterior_draw_guards():
    d = PosteriorDraw(theta=np.array([1.0, -2.0]), sigma=0.5)
    assert not d.theta.flags.writeable
    with pytest.raises(NonFiniteInput):
        PosteriorDraw(theta=np.array([1.0, np.nan]), sigma=0.5)
    with pytest.raises(NonFiniteInput):
        PosteriorDraw(theta=np.array([1.0]), sigma=0.0)


def test_sparse_draw_support_must_match():
    SparseDraw(theta_star=np.array([0.0, 1.5, 0.0]), support=frozenset({1}), kkt_residual=0.0)
    with pytest.raises(ValueError):
        SparseDraw(theta_star=np.array([0.0, 1.5]), support=frozenset({0}), kkt_residual=0.0)
    with pytest.raises(ValueError):
        SparseDraw(theta_star=np.array([1.0]), support=frozenset({0}), kkt_residual=-1e-3)


def test_norm_selector_kinds():
    assert NormSelector.max_norm().kind == "max"
    assert NormSelector.euclidean().kind == "euclidean"
    assert NormSelector.l1().kind == "l1"
    sel = NormSelector.component(1)
    assert sel.kind == "component" and sel.index == 1
    rect = NormSelector.rectangle([2, 0])
    assert rect.indices == (2, 0)


def test_norm_selector_validation():
    with pytest.raises(ValueError):
        NormSelector("chebyshev")
    with pytest.raises(ValueError):
        NormSelector("component")
    with pytest.raises(ValueError):
        NormSelector.component(-1)
    with pytest.raises(ValueError):
        NormSelector.rectangle([])
    with pytest.raises(ValueError):
        NormSelector.rectangle([1, 1])


def test_credible_region_guards():
    reg = CredibleRegion(
        selector=NormSelector.euclidean(),
        center=np.zeros(2),
        radius=1.0,
        level=0.9,
    )
    assert not reg.degenerate and reg.intervals is None
    with pytest.raises(ValueError):
        CredibleRegion(NormSelector.euclidean(), np.zeros(2), radius=-0.1, level=0.9)
    with pytest.raises(ValueError):
        CredibleRegion(NormSelector.euclidean(), np.zeros(2), radius=1.0, level=0.0)


def test_dataset_direct_construction_freezes():
    ds = Dataset(n=1, p=1, X=np.array([[2.0]]), Y=np.array([1.0]),
                 gram=np.array([[4.0]]), xty=np.array([2.0]))
    assert not ds.gram.flags.writeable
