"""Logistic ridge regression via cyclic coordinate descent.

The solver maximizes the penalized log-likelihood

    sum_i [ Y_i log pi_i + (1 - Y_i) log(1 - pi_i) ] - k sum_j beta_j^2

with 0/1 labels recoded internally to -1/+1.  Each coordinate takes a
trust-region Newton step whose curvature term is an upper bound on the
logistic second derivative over the trust interval, so the objective never
decreases.  The intercept is updated by the same scheme with the penalty
terms dropped.  Coordinates are visited in ascending index order (intercept
first), making the solver fully deterministic.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (
    DegenerateWeights,
    DimensionMismatch,
    NonBinaryLabels,
    NonPositiveK,
)

__all__ = [
    "LogisticRidgeFit",
    "penalized_loglik",
    "curvature_bound",
    "clg_update_term",
    "clg_fit",
    "logistic_hat_df",
    "predict_proba",
]

PROB_CLAMP = 1e-12
DEFAULT_EPSILON = 5e-4
DEFAULT_MAX_SWEEPS = 1000


@dataclass(frozen=True)
class LogisticRidgeFit:
    """A fitted logistic ridge model.

    ``linear_scores`` holds r_i = (intercept + x_i'beta) * y_i with y_i in
    {-1, +1}; ``objective_history`` the penalized log-likelihood after each
    sweep.
    """

    k: float
    beta: np.ndarray
    intercept: float
    linear_scores: np.ndarray
    probabilities: np.ndarray
    iterations: int
    converged: bool
    objective_history: np.ndarray


def _check_labels(Y, n=None):
    Y = np.asarray(Y, dtype=np.float64)
    if n is not None and Y.shape != (n,):
        raise DimensionMismatch(f"Y has shape {Y.shape}, expected ({n},)")
    if not np.all((Y == 0.0) | (Y == 1.0)):
        raise NonBinaryLabels("labels must be 0 or 1")
    if Y.min() == Y.max():
        raise NonBinaryLabels("labels are all one class")
    return Y


def penalized_loglik(beta, X, Y, k, intercept=0.0):
    """Bernoulli log-likelihood minus k * sum(beta^2); intercept unpenalized.

    Probabilities are clamped away from 0/1 before taking logs.
    """
    X = np.asarray(X, dtype=np.float64)
    beta = np.asarray(beta, dtype=np.float64)
    Y = _check_labels(Y, X.shape[0])
    eta = intercept + X @ beta
    pi = np.clip(_sigmoid(eta), PROB_CLAMP, 1.0 - PROB_CLAMP)
    ll = float(Y @ np.log(pi) + (1.0 - Y) @ np.log1p(-pi))
    return ll - float(k) * float(beta @ beta)


def _sigmoid(eta):
    out = np.empty_like(eta)
    pos = eta >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-eta[pos]))
    e = np.exp(eta[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def curvature_bound(r, delta):
    """Upper bound F(r, delta) on the logistic second derivative.

    Equals 1/4 when the trust interval |s - r| <= delta contains 0 and
    1 / (2 + exp(|r| - delta) + exp(delta - |r|)) otherwise; tends to 0 as
    |r| grows at fixed delta.
    """
    a = abs(float(r))
    d = float(delta)
    if a <= d:
        return 0.25
    z = a - d
    if z > 500.0:
        return 0.0
    return 1.0 / (2.0 + np.exp(z) + np.exp(-z))


def clg_update_term(x_col, yy, scores, beta_j, delta_j, k):
    """Tentative coordinate step for one penalized coefficient.

    Evaluates [sum_i x_ij y_i / (1 + exp(r_i)) - 2 k beta_j] divided by
    [sum_i x_ij^2 F(r_i, delta_j |x_ij|) + 2 k]; the caller clips the result
    to the trust interval [-delta_j, delta_j].
    """
    tau = 1.0 / (2.0 * k)
    x = np.asarray(x_col, dtype=np.float64)
    r = np.asarray(scores, dtype=np.float64)
    yy = np.asarray(yy, dtype=np.float64)
    num = float(x @ (yy / (1.0 + np.exp(np.minimum(r, 500.0))))) - beta_j / tau
    den = float(
        (x * x) @ np.array([curvature_bound(ri, delta_j * abs(xi)) for ri, xi in zip(r, x)])
    ) + 1.0 / tau
    return num / den


def clg_fit(
    X,
    Y,
    k,
    epsilon=DEFAULT_EPSILON,
    max_sweeps=DEFAULT_MAX_SWEEPS,
    fit_intercept=True,
    beta0=None,
    intercept0=0.0,
):
    """Fit logistic ridge with shrinkage k > 0 by coordinate descent.

    Sweeps stop when the net relative change of the linear scores over one
    sweep, sum_i |dr_i| / (1 + sum_i |r_i|), falls below epsilon or after
    ``max_sweeps`` sweeps.  ``beta0``/``intercept0`` give an optional warm
    start (default: zeros, per-coordinate trust radii reset to 1).
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionMismatch(f"X must be 2-d, got shape {X.shape}")
    n, p = X.shape
    Y = _check_labels(Y, n)
    if k <= 0:
        raise NonPositiveK(f"logistic ridge needs k > 0, got {k}")
    yy = 2.0 * Y - 1.0
    if beta0 is None:
        beta0 = np.zeros(p)
    beta0 = np.asarray(beta0, dtype=np.float64)
    if beta0.shape != (p,):
        raise DimensionMismatch(f"beta0 has shape {beta0.shape}, expected ({p},)")
    beta, b0, scores, sweeps, converged, history = _kernels.clg_sweeps(
        X, yy, k, epsilon, max_sweeps, fit_intercept, beta0, intercept0
    )
    eta = scores * yy  # yy^2 = 1
    return LogisticRidgeFit(
        k=float(k),
        beta=beta,
        intercept=float(b0),
        linear_scores=scores,
        probabilities=_sigmoid(eta),
        iterations=int(sweeps),
        converged=bool(converged),
        objective_history=history,
    )


def logistic_hat_df(X, fit, k):
    """Variance degrees of freedom of a logistic ridge fit.

    Computes sum mu_j^2 / (mu_j + k)^2 over the nonzero eigenvalues mu of
    X'WX with W = diag(pi (1 - pi)) taken at the fitted probabilities.  The
    eigenvalues come from a thin SVD of sqrt(W) X; the p-by-p cross-product
    is never formed.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape != (fit.probabilities.shape[0], fit.beta.shape[0]):
        raise DimensionMismatch(
            f"X has shape {X.shape}, expected ({fit.probabilities.shape[0]}, {fit.beta.shape[0]})"
        )
    if k < 0:
        raise NonPositiveK(f"k must be >= 0, got {k}")
    pi = np.clip(fit.probabilities, PROB_CLAMP, 1.0 - PROB_CLAMP)
    if np.all((fit.probabilities <= PROB_CLAMP) | (fit.probabilities >= 1.0 - PROB_CLAMP)):
        raise DegenerateWeights("every fitted probability is 0 or 1")
    w = pi * (1.0 - pi)
    s = np.linalg.svd(np.sqrt(w)[:, None] * X, compute_uv=False)
    mu = s * s
    if mu.size == 0 or mu[0] == 0.0:
        raise DegenerateWeights("weighted design has rank zero")
    thr = mu[0] * max(X.shape) * np.finfo(np.float64).eps
    mu = mu[mu > thr]
    return float(np.sum((mu / (mu + k)) ** 2))


def logistic_df_triple(X, fit, k):
    """All three df measures evaluated on the eigenvalues of X'WX."""
    pi = np.clip(fit.probabilities, PROB_CLAMP, 1.0 - PROB_CLAMP)
    w = pi * (1.0 - pi)
    X = np.asarray(X, dtype=np.float64)
    s = np.linalg.svd(np.sqrt(w)[:, None] * X, compute_uv=False)
    mu = s * s
    thr = mu[0] * max(X.shape) * np.finfo(np.float64).eps if mu.size else 0.0
    mu = mu[mu > thr]
    from .linear import DfTriple

    shrink = mu / (mu + k)
    return DfTriple(
        trH=float(np.sum(shrink)),
        trHH=float(np.sum(shrink * shrink)),
        tr2HmHH=float(np.sum(mu * (mu + 2.0 * k) / (mu + k) ** 2)),
    )


def predict_proba(fit, X_new):
    """Class-1 probabilities for rows standardized with the training transform."""
    X_new = np.asarray(X_new, dtype=np.float64)
    if X_new.ndim != 2 or X_new.shape[1] != fit.beta.shape[0]:
        raise DimensionMismatch(
            f"X_new has shape {X_new.shape}, expected (*, {fit.beta.shape[0]})"
        )
    pi = _sigmoid(fit.intercept + X_new @ fit.beta)
    return np.clip(pi, PROB_CLAMP, 1.0 - PROB_CLAMP)
