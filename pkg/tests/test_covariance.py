import os
import subprocess
import sys

import numpy as np
import pytest
from scipy.signal import lfilter

from midas_specd import _kernels
from midas_specd.covariance import (HacOptions, estimate_moments, hac_long_run_cov,
                                    newey_west_bandwidth, null_ls_cov, tsls_cov)
from midas_specd.exceptions import BandwidthTooLarge, InvalidParameter

from _reference import bartlett_naive


@pytest.mark.parametrize("T, L", [(100, 4), (125, 4), (512, 5), (2000, 7), (1, 1)])
def test_newey_west_bandwidth(T, L):
    assert newey_west_bandwidth(T) == L


def test_lag_zero_is_average_outer_product(rng):
    s = rng.standard_normal((50, 3))
    np.testing.assert_allclose(hac_long_run_cov(s, HacOptions(bandwidth=0)), s.T @ s / 50, atol=1e-14)


@pytest.mark.parametrize("backend", ["numpy", "numba"])
def test_matches_brute_force(rng, backend):
    kernel = getattr(_kernels, f"bartlett_long_run_{backend}")
    s = rng.standard_normal((64, 3)) + 0.3 * np.roll(rng.standard_normal((64, 3)), 1, axis=0)
    for L in (0, 1, 5, 20):
        np.testing.assert_allclose(kernel(s, L), bartlett_naive(s, L), rtol=1e-12, atol=1e-14)


def test_white_noise_long_run_variance():
    x = np.random.default_rng(1).standard_normal(100_000)
    est = hac_long_run_cov(x, HacOptions(bandwidth=5))[0, 0]
    # sd of the estimate ~ sqrt(2 * (1 + 2 * sum w_l^2) / T)
    w = 1 - np.arange(1, 6) / 6
    se = np.sqrt(2 * (1 + 2 * np.sum(w ** 2)) / 100_000)
    assert abs(est - 1.0) < 3 * se


def test_ar1_long_run_variance():
    # x_t = 0.5 x_{t-1} + eta_t has long-run variance 1 / (1 - 0.5)^2 = 4
    eta = np.random.default_rng(2).standard_normal(101_000)
    x = lfilter([1.0], [1.0, -0.5], eta)[1000:]
    est = hac_long_run_cov(x, HacOptions(bandwidth=200))[0, 0]
    assert est == pytest.approx(4.0, rel=0.10)


def test_symmetric_and_psd(rng):
    for L in (0, 3, 30):
        out = hac_long_run_cov(rng.standard_normal((200, 4)) ** 3, HacOptions(bandwidth=L))
        np.testing.assert_array_equal(out, out.T)
        assert np.linalg.eigvalsh(out).min() >= -1e-10


def test_bandwidth_errors():
    with pytest.raises(BandwidthTooLarge):
        hac_long_run_cov(np.ones((5, 1)), HacOptions(bandwidth=5))
    with pytest.raises(InvalidParameter):
        HacOptions(bandwidth=-1)
    with pytest.raises(InvalidParameter):
        HacOptions(kernel="parzen")


def _xa_fixture(rng, T=200):
    xa = rng.standard_normal(T)
    X = np.column_stack([np.ones(T), xa])
    u = rng.standard_normal(T)
    u -= X @ np.linalg.lstsq(X, u, rcond=None)[0]
    return X, u


def test_null_ls_cov_matches_classical_under_homoskedasticity():
    r = np.random.default_rng(3)
    T = 10_000
    xa = 1.0 + r.standard_normal(T)
    X = np.column_stack([np.ones(T), xa])
    y = 0.5 + 2.0 * xa + r.standard_normal(T)
    beta = np.linalg.solve(X.T @ X, X.T @ y)
    u = y - X @ beta
    classical = (u @ u / T) * np.linalg.inv(X.T @ X / T)
    np.testing.assert_allclose(null_ls_cov(X, u, HacOptions(bandwidth=0)), classical, rtol=0.2)


def test_null_ls_cov_zero_residuals_and_psd(rng):
    X, u = _xa_fixture(rng)
    np.testing.assert_array_equal(null_ls_cov(X, np.zeros(200)), np.zeros((2, 2)))
    v = null_ls_cov(X, u)
    np.testing.assert_array_equal(v, v.T)
    assert np.linalg.eigvalsh(v).min() >= -1e-10


def test_tsls_collapses_to_null_when_instruments_are_regressors(rng):
    X, u = _xa_fixture(rng)
    opts = HacOptions(bandwidth=4)
    np.testing.assert_allclose(tsls_cov(estimate_moments(X, X, u, opts)), null_ls_cov(X, u, opts),
                               rtol=1e-10, atol=1e-14)


def test_tsls_psd_and_scaling(rng):
    X, u = _xa_fixture(rng)
    Z = np.column_stack([np.ones(200), X[:, 1] + rng.standard_normal(200), rng.standard_normal(200)])
    mom = estimate_moments(X, Z, u)
    v = tsls_cov(mom)
    np.testing.assert_array_equal(v, v.T)
    assert np.linalg.eigvalsh(v).min() >= -1e-10
    scaled = mom.__class__(mom.q_xx, mom.q_zz, mom.q_xz, mom.omega_hat, 3.0 * mom.sigma_zu_hat)
    np.testing.assert_allclose(tsls_cov(scaled), 3.0 * v, rtol=1e-12)


def test_tsls_invariant_to_instrument_order(rng):
    X, u = _xa_fixture(rng)
    Z = np.column_stack([np.ones(200), X[:, 1] + rng.standard_normal(200), rng.standard_normal(200)])
    a = tsls_cov(estimate_moments(X, Z, u))
    b = tsls_cov(estimate_moments(X, Z[:, [2, 0, 1]], u))
    np.testing.assert_allclose(a, b, rtol=1e-10)


def test_backend_flag_selects_numpy():
    code = "from midas_specd import _kernels; print(_kernels.BACKEND)"
    env = dict(os.environ, MIDAS_SPECD_BACKEND="numpy")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "numpy"
    env["MIDAS_SPECD_BACKEND"] = "fortran"
    bad = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert bad.returncode != 0
