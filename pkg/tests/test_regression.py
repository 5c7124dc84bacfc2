import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from midas_specd.exceptions import DimensionMismatch, RankDeficient
from midas_specd.regression import LeastSquares, annihilate, fwl_coefficient, ols_fit, project

from _reference import ols, proj_matrix


def test_exact_linear_relation():
    fit = ols_fit(np.array([[1.0], [2.0], [3.0]]), np.array([2.0, 4.0, 6.0]))
    assert fit.coefficients == pytest.approx([2.0])
    np.testing.assert_allclose(fit.residuals, 0.0, atol=1e-14)


def test_intercept_only_is_mean():
    fit = ols_fit(np.ones((3, 1)), np.array([1.0, 2.0, 6.0]))
    assert fit.coefficients[0] == pytest.approx(3.0)
    np.testing.assert_allclose(fit.residuals, [-2.0, -1.0, 3.0], atol=1e-14)


def test_two_by_two_normal_equations():
    # X'X = [[3, 3], [3, 5]], X'y = [8, 11]; det 6 gives (7/6, 3/2)
    design = np.column_stack([np.ones(3), [0.0, 1.0, 2.0]])
    fit = ols_fit(design, np.array([1.0, 3.0, 4.0]))
    np.testing.assert_allclose(fit.coefficients, [7 / 6, 3 / 2], rtol=1e-13)
    np.testing.assert_allclose(fit.fitted + fit.residuals, [1.0, 3.0, 4.0], atol=1e-14)


def test_projection_onto_constants():
    np.testing.assert_allclose(project(np.ones(3), np.array([1.0, 2.0, 3.0])), [2.0, 2.0, 2.0])


def test_projection_properties(rng):
    d = rng.standard_normal((40, 3))
    v = rng.standard_normal(40)
    p = project(d, v)
    np.testing.assert_allclose(project(d, p), p, atol=1e-12)
    np.testing.assert_allclose(p + annihilate(d, v), v, atol=1e-12)
    np.testing.assert_allclose(annihilate(d, p), 0.0, atol=1e-12)
    np.testing.assert_allclose(p, proj_matrix(d) @ v, atol=1e-12)
    np.testing.assert_allclose(project(d, d), d, atol=1e-12)
    np.testing.assert_allclose(annihilate(d, d), 0.0, atol=1e-12)


def test_null_residuals_sum_to_zero(rng):
    xa = rng.standard_normal(60)
    y = 2.0 + 3.0 * xa + rng.standard_normal(60)
    u = annihilate(np.column_stack([np.ones(60), xa]), y)
    assert abs(u.sum()) < 1e-11
    np.testing.assert_allclose(annihilate(np.column_stack([np.ones(60), xa]), xa), 0.0, atol=1e-12)


def test_orthogonal_focus_matches_simple_regression():
    t = np.arange(8.0)
    focus = np.array([1, -1, 1, -1, 1, -1, 1, -1], dtype=float)
    design = np.column_stack([np.ones(8), focus])
    y = 0.5 + 2.0 * focus + 0.1 * t
    simple = (focus @ y) / (focus @ focus)
    assert fwl_coefficient(design, 1, y) == pytest.approx(simple, rel=1e-12)


def test_fwl_seeded_20x3(rng):
    d = rng.standard_normal((20, 3))
    y = rng.standard_normal(20)
    full = ols_fit(d, y).coefficients
    for j in range(3):
        assert fwl_coefficient(d, j, y) == pytest.approx(full[j], rel=1e-10)


def test_fwl_matches_ols_on_random_instances(rng):
    for _ in range(200):
        T = int(rng.integers(8, 200))
        p = int(rng.integers(2, 7))
        d = rng.standard_normal((T, p)) * rng.uniform(0.1, 10.0, size=p)
        y = rng.standard_normal(T)
        j = int(rng.integers(p))
        assert fwl_coefficient(d, j, y) == pytest.approx(ols(d, y)[0][j], rel=1e-9, abs=1e-12)


def test_collinear_focus_raises(rng):
    x = rng.standard_normal(10)
    with pytest.raises(RankDeficient):
        fwl_coefficient(np.column_stack([np.ones(10), x, x]), 2, rng.standard_normal(10))


def test_rank_check_ignores_units(rng):
    x = rng.standard_normal(50)
    # a legitimate design whose columns differ by ten orders of magnitude
    d = np.column_stack([np.ones(50), 1e-6 * x, 1e4 * x ** 2])
    LeastSquares(d)
    with pytest.raises(RankDeficient):
        LeastSquares(np.column_stack([x, 2 * x + 1e-13 * rng.standard_normal(50)]))


def test_zero_column_and_shape_errors():
    with pytest.raises(RankDeficient):
        ols_fit(np.column_stack([np.ones(4), np.zeros(4)]), np.arange(4.0))
    with pytest.raises(DimensionMismatch):
        ols_fit(np.ones((4, 1)), np.ones(5))
    with pytest.raises(DimensionMismatch):
        ols_fit(np.ones((2, 3)), np.ones(2))


def test_gram_inverse(rng):
    d = rng.standard_normal((30, 4)) * [1.0, 100.0, 0.01, 5.0]
    np.testing.assert_allclose(LeastSquares(d).gram_inverse() @ (d.T @ d), np.eye(4), atol=1e-9)


@settings(max_examples=60, deadline=None)
@given(T=st.integers(5, 1000), p=st.integers(1, 10), seed=st.integers(0, 2**32 - 1),
       scale=st.floats(1e-3, 1e3))
def test_normal_equations_hold(T, p, seed, scale):
    if T < p:
        return
    r = np.random.default_rng(seed)
    d = r.standard_normal((T, p))
    y = scale * r.standard_normal(T)
    fit = ols_fit(d, y)
    assert np.max(np.abs(d.T @ fit.residuals)) <= 1e-8 * scale * np.sqrt(T)
    np.testing.assert_allclose(fit.fitted + fit.residuals, y, atol=1e-12 * scale * T)
