"""Dense least-squares machinery: fits, projections, annihilators and FWL.

Designs are plain 2-D float arrays (T rows, p columns).  Every solve goes
through a column-pivoted QR of the column-equilibrated design; a design whose
smallest squared pivot falls below ``RANK_TOL`` is reported as
:class:`RankDeficient` instead of being regularised.  T x T projection
matrices are never formed.
"""
from dataclasses import dataclass

import numpy as np
from scipy.linalg import qr, solve_triangular

from .exceptions import DimensionMismatch, RankDeficient

RANK_TOL = 1e-10


@dataclass(frozen=True)
class FitResult:
    coefficients: np.ndarray
    fitted: np.ndarray
    residuals: np.ndarray


def as_design(design):
    d = np.asarray(design, dtype=np.float64)
    if d.ndim == 1:
        d = d[:, None]
    if d.ndim != 2:
        raise DimensionMismatch(f"design must be 2-D, got shape {d.shape}")
    T, p = d.shape
    if p < 1 or T < p:
        raise DimensionMismatch(f"design needs T >= p >= 1, got T={T}, p={p}")
    return d


def _as_target(design, target):
    v = np.asarray(target, dtype=np.float64)
    if v.shape[0] != design.shape[0]:
        raise DimensionMismatch(
            f"target has {v.shape[0]} rows but design has {design.shape[0]}")
    return v


class LeastSquares:
    """A factorised design that can be reused against many responses.

    Columns are scaled to unit Euclidean norm before a pivoted QR, so the rank
    test is a check on ``1 - R^2`` of each column against the others and does
    not depend on the units of any column.
    """

    def __init__(self, design):
        d = as_design(design)
        norms = np.sqrt(np.einsum("ij,ij->j", d, d))
        if np.any(norms == 0.0):
            raise RankDeficient("design has an all-zero column")
        q, r, piv = qr(d / norms, mode="economic", pivoting=True)
        diag = np.abs(np.diag(r))
        if diag.min() ** 2 <= RANK_TOL * diag.max() ** 2:
            raise RankDeficient(
                f"design is rank deficient (smallest squared pivot {diag.min() ** 2:.3e})")
        self.design = d
        self._q = q
        self._r = r
        self._piv = piv
        self._scale = norms

    @property
    def shape(self):
        return self.design.shape

    def coefficients(self, target):
        v = _as_target(self.design, target)
        qtv = self._q.T @ v
        sol = solve_triangular(self._r, qtv)
        beta = np.empty_like(sol)
        beta[self._piv] = sol
        return beta / (self._scale if beta.ndim == 1 else self._scale[:, None])

    def project(self, target):
        v = _as_target(self.design, target)
        return self._q @ (self._q.T @ v)

    def annihilate(self, target):
        v = _as_target(self.design, target)
        return v - self._q @ (self._q.T @ v)

    def fit(self, response):
        y = _as_target(self.design, response)
        if y.ndim != 1:
            raise DimensionMismatch("response must be a vector")
        beta = self.coefficients(y)
        fitted = self.design @ beta
        return FitResult(beta, fitted, y - fitted)

    def gram_inverse(self):
        """``(D'D)^{-1}`` computed from the triangular factor."""
        rinv = solve_triangular(self._r, np.eye(self._r.shape[0]))
        inv_scaled = rinv @ rinv.T
        out = np.empty_like(inv_scaled)
        out[np.ix_(self._piv, self._piv)] = inv_scaled
        return out / np.outer(self._scale, self._scale)


def ols_fit(design, response):
    """Ordinary least squares of ``response`` on the columns of ``design``.

    Raises
    ------
    RankDeficient
        If the design is not of full column rank to within ``RANK_TOL``.
    DimensionMismatch
        If the response length differs from the number of design rows.
    """
    return LeastSquares(design).fit(response)


def project(design, target):
    """Orthogonal projection of ``target`` onto the column space of ``design``."""
    return LeastSquares(design).project(target)


def annihilate(design, target):
    """Residual of ``target`` after projecting on ``design`` (``M_D target``)."""
    return LeastSquares(design).annihilate(target)


def fwl_coefficient(full_design, focus_column_index, response):
    """Coefficient on one column of ``full_design`` by double residualisation.

    The focus column and the response are both residualised on the remaining
    columns and the slope of the residual-on-residual regression is returned.
    The full design is checked for rank first so that an exactly collinear
    focus column raises rather than returning a ratio of round-off.
    """
    d = as_design(full_design)
    LeastSquares(d)
    focus = d[:, focus_column_index]
    controls = np.delete(d, focus_column_index, axis=1)
    if controls.shape[1] == 0:
        focus_res = focus
        y_res = _as_target(d, response)
    else:
        ls = LeastSquares(controls)
        focus_res = ls.annihilate(focus)
        y_res = ls.annihilate(response)
    return float(focus_res @ y_res / (focus_res @ focus_res))
