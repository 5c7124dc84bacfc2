"""Bartlett-kernel long-run covariances and the two sandwich estimators.

All estimators are normalised by 1/T with no degrees-of-freedom correction,
and autocovariances are taken about zero (score rows are not demeaned).
"""
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .exceptions import BandwidthTooLarge, DimensionMismatch, InvalidParameter, RankDeficient


@dataclass(frozen=True)
class HacOptions:
    """Kernel choice and lag truncation.  ``bandwidth=None`` means the Newey-West rule."""

    kernel: str = "bartlett"
    bandwidth: Optional[int] = None

    def __post_init__(self):
        if self.kernel != "bartlett":
            raise InvalidParameter(f"only the Bartlett kernel is supported, got {self.kernel!r}")
        if self.bandwidth is not None and (int(self.bandwidth) != self.bandwidth
                                           or self.bandwidth < 0):
            raise InvalidParameter(f"bandwidth must be a nonnegative integer, got {self.bandwidth!r}")

    def lags_for(self, T):
        return newey_west_bandwidth(T) if self.bandwidth is None else int(self.bandwidth)


@dataclass(frozen=True)
class MomentEstimates:
    q_xx: np.ndarray
    q_zz: np.ndarray
    q_xz: np.ndarray
    omega_hat: np.ndarray
    sigma_zu_hat: np.ndarray


def newey_west_bandwidth(T):
    """``floor(4 (T/100)^(2/9))``."""
    if T < 1:
        raise InvalidParameter("T must be positive")
    return int(math.floor(4.0 * (T / 100.0) ** (2.0 / 9.0)))


def hac_long_run_cov(series, opts=None):
    """Bartlett-weighted long-run covariance of the rows of ``series``.

    Parameters
    ----------
    series : array_like, shape (T,) or (T, k)
        Score products, one row per period.
    opts : HacOptions, optional

    Returns
    -------
    ndarray, shape (k, k)
        ``G_0 + sum_l (1 - l/(L+1)) (G_l + G_l')`` with ``G_l`` the lag-l
        autocovariance about zero, divided by T.
    """
    opts = opts or HacOptions()
    s = np.asarray(series, dtype=np.float64)
    if s.ndim == 1:
        s = s[:, None]
    T = s.shape[0]
    lags = opts.lags_for(T)
    if lags >= T:
        raise BandwidthTooLarge(f"bandwidth {lags} must be smaller than T={T}")
    out = _kernels.bartlett_long_run(s, lags)
    return 0.5 * (out + out.T)


def _inv(mat, what):
    mat = np.asarray(mat, dtype=np.float64)
    d = np.sqrt(np.abs(np.diag(mat)))
    if np.any(d == 0.0):
        raise RankDeficient(f"{what} has a zero diagonal entry")
    # equilibrate so the check ignores the units of each variable
    scaled = mat / np.outer(d, d)
    if np.linalg.cond(scaled) > 1e12:
        raise RankDeficient(f"{what} is singular to working precision")
    return np.linalg.inv(scaled) / np.outer(d, d)


def sandwich(bread_inv, meat):
    out = bread_inv @ meat @ bread_inv
    return 0.5 * (out + out.T)


def null_ls_cov(xa_design, residuals, opts=None):
    """``Q_XX^{-1} Omega Q_XX^{-1}`` for the null least-squares fit.

    ``xa_design`` is the T x 2 matrix ``[1, x^A]`` and ``residuals`` the null
    residuals; Omega is the HAC long-run covariance of ``x_t^A u_t``.
    """
    x = np.asarray(xa_design, dtype=np.float64)
    u = np.asarray(residuals, dtype=np.float64)
    if x.shape[0] != u.shape[0]:
        raise DimensionMismatch("design and residuals differ in length")
    T = x.shape[0]
    q_inv = _inv(x.T @ x / T, "Q_XX")
    omega = hac_long_run_cov(x * u[:, None], opts)
    return sandwich(q_inv, omega)


def estimate_moments(xa_design, instruments, residuals, opts=None):
    """Sample moment matrices for the 2SLS sandwich, scores built from ``residuals``."""
    x = np.asarray(xa_design, dtype=np.float64)
    z = np.asarray(instruments, dtype=np.float64)
    u = np.asarray(residuals, dtype=np.float64)
    T = x.shape[0]
    if z.shape[0] != T or u.shape[0] != T:
        raise DimensionMismatch("design, instruments and residuals must share T")
    return MomentEstimates(
        q_xx=x.T @ x / T,
        q_zz=z.T @ z / T,
        q_xz=x.T @ z / T,
        omega_hat=hac_long_run_cov(x * u[:, None], opts),
        sigma_zu_hat=hac_long_run_cov(z * u[:, None], opts),
    )


def tsls_cov(moments):
    """Asymptotic 2SLS covariance, the three-factor sandwich in the Q matrices."""
    qzz_inv = _inv(moments.q_zz, "Q_ZZ")
    a = moments.q_xz @ qzz_inv
    bread_inv = _inv(a @ moments.q_xz.T, "Q_XZ Q_ZZ^-1 Q_XZ'")
    meat = a @ moments.sigma_zu_hat @ a.T
    return sandwich(bread_inv, meat)


def hac_coefficient_cov(design, residuals, opts=None):
    """Finite-sample HAC covariance of OLS coefficients (the sandwich divided by T)."""
    x = np.asarray(design, dtype=np.float64)
    T = x.shape[0]
    return null_ls_cov(x, residuals, opts) / T
