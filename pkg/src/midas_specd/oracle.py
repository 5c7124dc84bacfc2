"""Population covariance between the instruments and the null-model error.

With a zero-mean high-frequency regressor whose within-period covariance is
``Phi[i, j] = d**|i-j| * sigma_x^2``, the population value of
``E(z_{r,t} u_t^A)`` under a MIDAS alternative is

    beta1 * U' (Phi pi(theta) - (pi0' Phi pi(theta) / pi0' Phi pi0) Phi pi0)

where ``U`` is the instrument weight vector.  It shrinks like 1/m for the
decreasing instrument weights.  A brute-force Monte Carlo estimate of the same
quantity is provided as an independent check.
"""
from dataclasses import dataclass, replace

import numpy as np

from .dgp import DgpSpec, cell_id, derive_replication_seed, simulate_blocks
from .exceptions import DegenerateNull, DimensionMismatch, InvalidParameter
from .weights import WeightVector, instrument_weights, midas_weights, parse_null

NULL_VAR_TOL = 1e-14


@dataclass(frozen=True)
class RegressorCovariance:
    d: float
    sigma_x_sq: float
    m: int

    def __post_init__(self):
        if not abs(self.d) < 1:
            raise InvalidParameter(f"|d| must be below 1, got {self.d}")
        if not self.sigma_x_sq > 0:
            raise InvalidParameter("sigma_x_sq must be positive")
        if self.m < 1:
            raise InvalidParameter("m must be positive")

    @classmethod
    def stationary_ar1(cls, d, m):
        """Covariance of a unit-innovation AR(1), variance ``1 / (1 - d^2)``."""
        return cls(d=d, sigma_x_sq=1.0 / (1.0 - d * d), m=m)


def phi_matrix(cov):
    idx = np.arange(cov.m)
    lags = np.abs(idx[:, None] - idx[None, :])
    # numpy evaluates 0.0 ** 0 as 1, which is the i.i.d. convention we want
    return cov.sigma_x_sq * np.power(float(cov.d), lags)


def _vec(w, m, name):
    v = w.weights if isinstance(w, WeightVector) else np.asarray(w, dtype=np.float64)
    if v.shape != (m,):
        raise DimensionMismatch(f"{name} must have length {m}, got {v.shape}")
    return v


def expected_instrument_score(beta1, theta, pi0, upsilon_r, cov):
    phi = phi_matrix(cov)
    p0 = _vec(pi0, cov.m, "pi0")
    ups = _vec(upsilon_r, cov.m, "upsilon_r")
    pt = midas_weights(theta, cov.m).weights
    null_var = p0 @ phi @ p0
    if null_var <= NULL_VAR_TOL:
        raise DegenerateNull("pi0' Phi pi0 is not positive")
    bracket = phi @ pt - (p0 @ phi @ pt) / null_var * (phi @ p0)
    return float(beta1 * (ups @ bracket))


def expected_instrument_score_iid(beta1, theta, pi0, upsilon_r, sigma_x_sq):
    """The same quantity specialised to an i.i.d. regressor (no covariance matrix)."""
    p0 = np.asarray(pi0.weights if isinstance(pi0, WeightVector) else pi0, dtype=np.float64)
    ups = np.asarray(upsilon_r.weights if isinstance(upsilon_r, WeightVector) else upsilon_r,
                     dtype=np.float64)
    pt = midas_weights(theta, p0.size).weights
    p0p0 = p0 @ p0
    if p0p0 <= NULL_VAR_TOL:
        raise DegenerateNull("pi0 has zero norm")
    return float(beta1 * sigma_x_sq * (ups @ pt - (p0 @ pt) / p0p0 * (ups @ p0)))


def population_null_coefficients(beta0, beta1, theta, pi0, cov):
    """Probability limit of the null least-squares coefficients under the alternative."""
    phi = phi_matrix(cov)
    p0 = _vec(pi0, cov.m, "pi0")
    pt = midas_weights(theta, cov.m).weights
    exx = np.array([[1.0, 0.0], [0.0, p0 @ phi @ p0]])
    ext = np.array([[1.0, 0.0], [0.0, p0 @ phi @ pt]])
    if exx[1, 1] <= NULL_VAR_TOL:
        raise DegenerateNull("pi0' Phi pi0 is not positive")
    return np.linalg.solve(exx, ext @ np.array([beta0, beta1], dtype=np.float64))


def monte_carlo_instrument_score(spec, pi0, upsilon_r, replications):
    """Simulated mean of ``z_{r,t} u_t^A`` and its standard error.

    Each replication draws a fresh sample from ``spec`` (seeds derived from
    ``spec.seed``), forms ``u_t^A`` with the population null coefficients and
    averages the product over t.  The standard error is the spread of the
    per-replication means divided by ``sqrt(replications)``.
    """
    if replications < 2:
        raise InvalidParameter("need at least two replications for a standard error")
    p0 = _vec(pi0, spec.m, "pi0")
    ups = _vec(upsilon_r, spec.m, "upsilon_r")
    cov = RegressorCovariance.stationary_ar1(spec.d, spec.m)
    b0, b1 = population_null_coefficients(0.0, spec.beta, spec.theta, p0, cov)
    cid = cell_id(spec.T, spec.m, spec.c, spec.d)
    means = np.empty(replications)
    for r in range(replications):
        rep = replace(spec, seed=derive_replication_seed(spec.seed, cid, r))
        blocks = simulate_blocks(rep)
        y = blocks.respond(spec.beta, spec.theta)
        xa = blocks.x_high @ p0
        z = blocks.x_high @ ups
        means[r] = np.mean(z * (y - b0 - b1 * xa))
    return float(means.mean()), float(means.std(ddof=1) / np.sqrt(replications))


def decay_rows(theta, d, beta1, null, m_list, replications=0, T=200, c=0.0, seed=0):
    """Rows of ``(m, instrument, analytic, mc_mean, mc_se, analytic*m)``.

    Monte Carlo columns are NaN when ``replications`` is 0.
    """
    rows = []
    for m in m_list:
        pi0 = parse_null(null, m)
        cov = RegressorCovariance.stationary_ar1(d, m)
        for r, ups in enumerate(instrument_weights(m), 1):
            value = expected_instrument_score(beta1, theta, pi0, ups, cov)
            if replications:
                spec = DgpSpec(T=T, m=m, c=c, d=d, beta=beta1, theta=theta, seed=seed)
                mc_mean, mc_se = monte_carlo_instrument_score(spec, pi0, ups, replications)
            else:
                mc_mean = mc_se = float("nan")
            rows.append((m, r, value, mc_mean, mc_se, value * m))
    return rows
