import numpy as np
import pytest

from rcatool.errors import DimensionMismatch
from rcatool.splines import fit_additive


def test_zero_target_fits_zero_functions():
    rng = np.random.default_rng(0)
    y = np.zeros(100)
    model = fit_additive(y, [("x", rng.normal(size=100))])
    assert model.rss == pytest.approx(0.0, abs=1e-18)
    assert model.intercept == 0.0
    vals = model.terms[0](rng.normal(size=50))
    assert np.allclose(vals, 0.0, atol=1e-9)


def test_mean_only_model():
    model = fit_additive(np.array([1.0, -1.0, 1.0, -1.0]), [])
    assert model.intercept == pytest.approx(0.0)
    assert model.rss == pytest.approx(4.0)
    assert model.tss == pytest.approx(4.0)


def test_sine_recovery_across_seeds():
    # Monte-Carlo oracle: rss/N < 0.02 over 10 seeds for y = sin(x) + N(0, 0.1^2)
    for seed in range(10):
        rng = np.random.default_rng(seed)
        x = rng.uniform(-3, 3, 500)
        y = np.sin(x) + rng.normal(0, 0.1, 500)
        model = fit_additive(y, [("x", x)])
        assert model.rss / 500 < 0.02


def test_constant_parent_warns_and_fits_zero():
    rng = np.random.default_rng(1)
    y = rng.normal(size=50)
    with pytest.warns(UserWarning, match="constant"):
        model = fit_additive(y, [("c", np.full(50, 3.0))])
    assert model.rss == pytest.approx(model.tss)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        fit_additive(np.zeros(10), [("x", np.zeros(9))])


def test_rss_recomputable_from_predictions():
    rng = np.random.default_rng(2)
    x1, x2 = rng.normal(size=300), rng.normal(size=300)
    y = np.tanh(2 * x1) + np.sin(2 * x2) + rng.normal(0, 0.2, 300)
    model = fit_additive(y, [("x1", x1), ("x2", x2)])
    pred = model.predict({"x1": x1, "x2": x2})
    assert np.sum((y - pred) ** 2) == pytest.approx(model.rss, rel=1e-9)


def test_adding_a_parent_never_hurts():
    rng = np.random.default_rng(3)
    x1, x2 = rng.normal(size=400), rng.normal(size=400)
    y = np.sin(2 * x1) + rng.normal(0, 0.3, 400)
    small = fit_additive(y, [("x1", x1)])
    big = fit_additive(y, [("x1", x1), ("x2", x2)])
    assert big.rss <= small.rss + 1e-8


def test_huge_penalty_shrinks_to_mean():
    rng = np.random.default_rng(4)
    x = rng.normal(size=300)
    y = np.sin(2 * x) + rng.normal(0, 0.2, 300)
    model = fit_additive(y, [("x", x)], ridge_lambda=1e12)
    assert model.rss == pytest.approx(model.tss, rel=1e-4)
