"""Specification tests of a fixed aggregation weight against MIDAS weights.

Four tests share one setup:

``new``     DWH t-test on the first-stage residual, instruments built from the
            two decreasing weight sequences.
``agk``     the same procedure with the two most recent high-frequency lags
            as instruments.
``miller``  variable-addition Wald test of the two weighted aggregates.
``lambda``  the chi-square(1) Hausman statistic built from the 2SLS and null
            least-squares sandwich covariances.

:class:`PreparedTests` factors every design that does not depend on ``y``
so a Monte Carlo loop can reuse it across several responses.
"""
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .covariance import (HacOptions, MomentEstimates, hac_long_run_cov,
                         sandwich, tsls_cov)
from .exceptions import DegenerateInstruments, DimensionMismatch, RankDeficient
from .regression import LeastSquares
from .weights import MixedSample, WeightVector, build_instruments

METHODS = ("new", "agk", "miller", "lambda")
NOMINAL_LEVEL = 0.05
# first-stage residual counts as zero when ||M_Z x^A||^2 <= tol * ||x^A||^2
SPAN_TOL = 1e-10
# null residuals count as an exact fit below this fraction of ||y - mean(y)||
EXACT_FIT_TOL = 1e-10
WEAK_F = 10.0
INSTRUMENT_COND_LIMIT = 1e12


class Diagnostic(str, enum.Enum):
    NON_POSITIVE_HAUSMAN_VARIANCE = "NonPositiveHausmanVariance"
    WEAK_FIRST_STAGE = "WeakFirstStage"
    DEGENERATE_INSTRUMENTS = "DegenerateInstruments"


@dataclass(frozen=True)
class TestInputs:
    """A sample, the null weights and HAC options.

    ``instrument_intercept`` adds a constant column to the instrument matrix
    used by every first stage and projection.
    """

    __test__ = False

    sample: MixedSample
    null_weights: WeightVector
    hac: HacOptions = field(default_factory=HacOptions)
    instrument_intercept: bool = True

    def __post_init__(self):
        if self.null_weights.m != self.sample.m:
            raise DimensionMismatch(
                f"null weights have m={self.null_weights.m}, sample has m={self.sample.m}")


@dataclass(frozen=True)
class TestOutcome:
    __test__ = False

    method: str
    statistic: float
    df: int
    p_value: float
    estimate: float = math.nan
    diagnostics: frozenset = frozenset()

    @property
    def reject_at_05(self):
        return bool(self.p_value < NOMINAL_LEVEL)

    def rejects(self, level):
        return bool(self.p_value < level)


def upper_tail_p(statistic, distribution="normal", df=None):
    """Survival-function p-value.

    ``distribution="normal"`` gives the two-sided standard-normal p-value of a
    t ratio; ``distribution="chi2"`` with ``df`` 1 or 2 gives the upper tail of
    a chi-square.
    """
    x = float(statistic)
    if distribution == "normal":
        return math.erfc(abs(x) / math.sqrt(2.0))
    if distribution == "chi2":
        if x <= 0.0:
            return 1.0
        if df == 1:
            return math.erfc(math.sqrt(x / 2.0))
        if df == 2:
            return math.exp(-x / 2.0)
        raise ValueError(f"chi-square p-values implemented for df 1 and 2, got {df!r}")
    raise ValueError(f"unknown distribution {distribution!r}")


def _hac_cov_from_gram(gram_inv, design, residuals, hac):
    # finite-sample coefficient covariance: T * G^{-1} Omega G^{-1}
    T = design.shape[0]
    omega = hac_long_run_cov(design * residuals[:, None], hac)
    return T * sandwich(gram_inv, omega)


def _cond_equilibrated(mat):
    d = np.sqrt(np.einsum("ij,ij->j", mat, mat))
    if np.any(d == 0.0):
        return math.inf
    s = np.linalg.svd(mat / d, compute_uv=False)
    return (s[0] / s[-1]) ** 2 if s[-1] > 0 else math.inf


class _InstrumentSetup:
    """First stage and auxiliary regression for one instrument choice."""

    def __init__(self, xa, xa_ls, raw_instruments, intercept):
        T = xa.shape[0]
        ones = np.ones((T, 1))
        z = np.column_stack([ones, raw_instruments]) if intercept else raw_instruments
        if _cond_equilibrated(z) > INSTRUMENT_COND_LIMIT:
            raise DegenerateInstruments("instrument Gram matrix is numerically singular")
        try:
            self.z_ls = LeastSquares(z)
        except RankDeficient as exc:
            raise DegenerateInstruments(str(exc)) from exc
        self.z = z
        eps = self.z_ls.annihilate(xa)
        if eps @ eps <= SPAN_TOL * (xa @ xa):
            raise RankDeficient("x^A lies in the span of the instruments; first-stage residual is zero")
        self.eps = eps
        aux = np.column_stack([ones, xa, eps])
        self.aux_ls = LeastSquares(aux)
        self.aux_gram_inv = self.aux_ls.gram_inverse()
        # double-residualised first-stage residual M_{X^A} M_Z x^A
        self.eps_perp = xa_ls.annihilate(eps)

        restricted_ssr = T * np.var(xa) if intercept else xa @ xa
        q = raw_instruments.shape[1]
        dof = T - z.shape[1]
        ssr = eps @ eps
        self.first_stage_f = ((restricted_ssr - ssr) / q) / (ssr / dof) if dof > 0 else math.inf

    def diagnostics(self):
        if self.first_stage_f < WEAK_F:
            return frozenset({Diagnostic.WEAK_FIRST_STAGE})
        return frozenset()


class PreparedTests:
    """Everything the four tests need that depends only on the regressors.

    Parameters
    ----------
    x_high : ndarray, shape (T, m)
        High-frequency regressor block, most recent lag first.
    null_weights : WeightVector
    hac : HacOptions, optional
    instrument_intercept : bool
    """

    def __init__(self, x_high, null_weights, hac=None, instrument_intercept=True):
        x_high = np.asarray(x_high, dtype=np.float64)
        T, m = x_high.shape
        if null_weights.m != m:
            raise DimensionMismatch(f"null weights have m={null_weights.m}, data have m={m}")
        self.x_high = x_high
        self.hac = hac or HacOptions()
        self.intercept = instrument_intercept
        self.T = T
        self.m = m
        self.xa = x_high @ null_weights.weights
        self.xa_design = np.column_stack([np.ones(T), self.xa])
        self.xa_ls = LeastSquares(self.xa_design)
        self.xa_gram_inv = self.xa_ls.gram_inverse()
        self._setups = {}
        self._miller = None

    def _raw_instruments(self, kind):
        if self.m < 2:
            raise DegenerateInstruments("instruments need m >= 2")
        if kind == "proposed":
            return build_instruments(MixedSample(np.zeros(self.T), self.x_high))
        return self.x_high[:, :2]

    def setup(self, kind):
        if kind not in self._setups:
            self._setups[kind] = _InstrumentSetup(
                self.xa, self.xa_ls, self._raw_instruments(kind), self.intercept)
        return self._setups[kind]

    def _miller_setup(self):
        if self._miller is None:
            raw = self._raw_instruments("proposed")
            design = np.column_stack([self.xa_design, raw])
            ls = LeastSquares(design)
            self._miller = (ls, ls.gram_inverse())
        return self._miller

    def null_residuals(self, y):
        y = np.asarray(y, dtype=np.float64)
        if y.shape[0] != self.T:
            raise DimensionMismatch(f"y has {y.shape[0]} entries, expected {self.T}")
        return self.xa_ls.annihilate(y)

    def _exact_fit(self, y, u):
        centred = y - y.mean()
        return math.sqrt(u @ u) <= EXACT_FIT_TOL * max(math.sqrt(centred @ centred), 1e-300)

    def run(self, method, y):
        """Run one of ``METHODS`` against the response ``y``."""
        if method == "new":
            return self._dwh(y, "proposed", "new")
        if method == "agk":
            return self._dwh(y, "agk", "agk")
        if method == "miller":
            return self._miller_test(y)
        if method == "lambda":
            return self._lambda(y)
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")

    def _dwh(self, y, kind, label):
        setup = self.setup(kind)
        y = np.asarray(y, dtype=np.float64)
        u = self.null_residuals(y)
        diags = setup.diagnostics()
        if self._exact_fit(y, u):
            return TestOutcome(label, 0.0, self.T - 3, 1.0, 0.0, diags)
        fit = setup.aux_ls.fit(u)
        delta = fit.coefficients[2]
        cov = _hac_cov_from_gram(setup.aux_gram_inv, setup.aux_ls.design, fit.residuals, self.hac)
        se = math.sqrt(max(cov[2, 2], 0.0))
        if se == 0.0:
            return TestOutcome(label, math.nan, self.T - 3, 1.0, delta, diags)
        t = delta / se
        return TestOutcome(label, t, self.T - 3, upper_tail_p(t, "normal"), delta, diags)

    def _miller_test(self, y):
        ls, gram_inv = self._miller_setup()
        y = np.asarray(y, dtype=np.float64)
        u = self.null_residuals(y)
        if self._exact_fit(y, u):
            return TestOutcome("miller", 0.0, 2, 1.0)
        fit = ls.fit(u)
        phi = fit.coefficients[2:]
        cov = _hac_cov_from_gram(gram_inv, ls.design, fit.residuals, self.hac)[2:, 2:]
        try:
            wald = float(phi @ np.linalg.solve(cov, phi))
        except np.linalg.LinAlgError:
            return TestOutcome("miller", math.nan, 2, 1.0)
        return TestOutcome("miller", wald, 2, upper_tail_p(wald, "chi2", 2))

    def lambda_parts(self, y):
        """Intermediate quantities of the Hausman statistic, exposed for checking.

        ``b`` is the literal weight vector with ``delta = b' Delta``.  When
        the instruments contain a constant, ``j' X^A Delta = 0`` holds
        exactly, so adding any multiple of ``(1, mean(x^A))`` to ``b`` leaves
        that identity intact.  ``b_invariant`` is the member of this family
        with a zero intercept entry; it makes ``b'(V - V^A) b`` invariant to
        shifts of the regressor.  In that case ``v_tsls`` and ``v_null`` are
        evaluated on mean-centred regressor and instrument columns, which
        leaves their slope entries unchanged and avoids cancellation when the
        regressor has a large mean.
        """
        setup = self.setup("proposed")
        y = np.asarray(y, dtype=np.float64)
        u = self.null_residuals(y)
        e = setup.eps_perp
        ee = e @ e
        delta = (e @ u) / ee
        pz_xa = setup.z_ls.project(self.xa_design)
        b = -(pz_xa.T @ self.xa) / ee
        if self.intercept:
            xc = self.xa - self.xa.mean()
            pz_xc = setup.z_ls.project(xc)
            b_invariant = np.array([0.0, -(pz_xc @ pz_xc) / ee])
            x_design = np.column_stack([np.ones(self.T), xc])
            z = setup.z.copy()
            z[:, 1:] -= z[:, 1:].mean(axis=0)
        else:
            b_invariant = b
            x_design, z = self.xa_design, setup.z
        moments = MomentEstimates(
            q_xx=x_design.T @ x_design / self.T,
            q_zz=z.T @ z / self.T,
            q_xz=x_design.T @ z / self.T,
            omega_hat=hac_long_run_cov(x_design * u[:, None], self.hac),
            sigma_zu_hat=hac_long_run_cov(z * u[:, None], self.hac),
        )
        v_tsls = tsls_cov(moments)
        v_null = sandwich(np.linalg.inv(moments.q_xx), moments.omega_hat)
        return {"delta": delta, "b": b, "b_invariant": b_invariant, "v_tsls": v_tsls,
                "v_null": v_null, "null_residuals": u, "moments": moments}

    def _lambda(self, y):
        parts = self.lambda_parts(y)
        diags = set(self.setup("proposed").diagnostics())
        b = parts["b_invariant"]
        denom = float(b @ (parts["v_tsls"] - parts["v_null"]) @ b)
        delta = parts["delta"]
        if not denom > 0.0:
            diags.add(Diagnostic.NON_POSITIVE_HAUSMAN_VARIANCE)
            return TestOutcome("lambda", math.nan, 1, 1.0, delta, frozenset(diags))
        stat = self.T * delta * delta / denom
        return TestOutcome("lambda", stat, 1, upper_tail_p(stat, "chi2", 1), delta,
                           frozenset(diags))


def _prepared(inputs):
    return PreparedTests(inputs.sample.x_high, inputs.null_weights, inputs.hac,
                         inputs.instrument_intercept)


def dwh_new_test(inputs):
    """DWH t-test using the two decreasing-weight aggregates as instruments.

    Steps: aggregate with the null weights, regress ``y`` on ``[1, x^A]`` for
    the null residuals, regress ``x^A`` on the instruments for the first-stage
    residual, then regress the null residuals on ``[1, x^A, eps]`` and refer
    the HAC t ratio of the ``eps`` coefficient to the standard normal.
    """
    return _prepared(inputs).run("new", inputs.sample.y)


def agk_test(inputs):
    """DWH t-test with the two most recent high-frequency lags as instruments."""
    return _prepared(inputs).run("agk", inputs.sample.y)


def miller_vat_test(inputs):
    """HAC Wald test (chi-square, 2 df) that the two aggregates add nothing to the null fit."""
    return _prepared(inputs).run("miller", inputs.sample.y)


def lambda_t_test(inputs):
    """Hausman statistic ``T delta^2 / b'(V - V^A) b`` against chi-square(1).

    The variance uses the shift-invariant representative of ``b`` (see
    :meth:`PreparedTests.lambda_parts`).  A nonpositive denominator is reported through the
    ``NonPositiveHausmanVariance`` diagnostic with a NaN statistic and no
    rejection.
    """
    return _prepared(inputs).run("lambda", inputs.sample.y)


def run_tests(inputs, methods=METHODS):
    prepared = _prepared(inputs)
    return {m: prepared.run(m, inputs.sample.y) for m in methods}


def delta_identity_parts(inputs):
    """Return ``(delta, b, Delta)`` where ``Delta`` is the 2SLS minus null-LS estimate.

    Used to check ``delta == b' Delta`` numerically.
    """
    prepared = _prepared(inputs)
    parts = prepared.lambda_parts(inputs.sample.y)
    setup = prepared.setup("proposed")
    y = inputs.sample.y
    pz_xa = setup.z_ls.project(prepared.xa_design)
    beta_tsls = np.linalg.solve(pz_xa.T @ prepared.xa_design, pz_xa.T @ y)
    beta_null = prepared.xa_ls.coefficients(y)
    return parts["delta"], parts["b"], beta_tsls - beta_null
