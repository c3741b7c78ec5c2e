"""Baseline methods: principal component regression and univariate selection.

PCR/PCLR regress on the leading r component scores.  The univariate screen
ranks predictors by single-predictor test p-values; the follow-up multiple
regression keeps a top slice, prunes near-duplicate columns by squared
correlation and refits jointly.
"""

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import (
    DimensionMismatch,
    NonBinaryLabels,
    ROutOfRange,
    Separation,
    TooManySelected,
)
from .linalg import DesignMatrix

__all__ = [
    "PcrFit",
    "UnivariateScreen",
    "SelectedFit",
    "fit_pcr",
    "fit_pclr",
    "univariate_screen",
    "fit_selected_multiple",
]

_NEWTON_TOL = 1e-8
_NEWTON_MAX_ITER = 100
_NORM_BLOWUP = 1e8
# a gradient-stationary point with the log-likelihood this close to its
# supremum of 0 only happens under (quasi-)separation, where no MLE exists
_SEPARATION_NLL = 1e-3


@dataclass(frozen=True)
class PcrFit:
    """Regression on the leading r principal component scores.

    For the linear kind all three ridge df measures of this fit equal r.
    """

    r: int
    alpha_r: np.ndarray
    beta: np.ndarray
    intercept: float
    kind: str

    @property
    def df(self):
        return float(self.r)


def _values(X):
    return X.values if isinstance(X, DesignMatrix) else np.asarray(X, dtype=np.float64)


def _check_r(C, r):
    if not (1 <= r <= C.t):
        raise ROutOfRange(f"r={r} not in 1..{C.t}")


def fit_pcr(C, Y, r):
    """Least squares on the leading r component scores (linear response)."""
    _check_r(C, r)
    Y = np.asarray(Y, dtype=np.float64)
    if Y.shape != (C.n,):
        raise DimensionMismatch(f"Y has shape {Y.shape}, expected ({C.n},)")
    ybar = float(Y.mean())
    yc = Y - ybar
    alpha_r = (C.Z[:, :r].T @ yc) / C.eigen.eigenvalues[:r]
    return PcrFit(
        r=int(r),
        alpha_r=alpha_r,
        beta=C.eigen.Q[:, :r] @ alpha_r,
        intercept=ybar,
        kind="linear",
    )


def _binary(Y, n):
    Y = np.asarray(Y, dtype=np.float64)
    if Y.shape != (n,):
        raise DimensionMismatch(f"Y has shape {Y.shape}, expected ({n},)")
    if not np.all((Y == 0.0) | (Y == 1.0)):
        raise NonBinaryLabels("labels must be 0 or 1")
    if Y.min() == Y.max():
        raise NonBinaryLabels("labels are all one class")
    return Y


def _nll(eta, Y):
    # stable -loglik for labels in {0,1}
    return float(np.sum(np.logaddexp(0.0, eta)) - Y @ eta)


def _newton_logistic(D, Y):
    """Unpenalized logistic regression with an intercept via damped Newton.

    D holds the slope columns (no intercept column).  Raises Separation when
    the iteration diverges: singular information matrix, coefficient blowup,
    or no convergence within the iteration budget.
    """
    n, m = D.shape
    x = np.zeros(m + 1)
    x[0] = 0.0
    ones = np.ones((n, 1))
    A = np.hstack([ones, D])
    # line search resolves NLL changes down to roundoff, which scales with n
    tol = _NEWTON_TOL * n
    nll = _nll(A @ x, Y)
    for _ in range(_NEWTON_MAX_ITER):
        eta = A @ x
        pi = 1.0 / (1.0 + np.exp(-np.clip(eta, -500, 500)))
        grad = A.T @ (Y - pi)
        if float(np.linalg.norm(grad)) <= tol:
            if nll < _SEPARATION_NLL:
                raise Separation("fitted probabilities saturated; data are separable")
            return x[0], x[1:]
        w = pi * (1.0 - pi)
        H = (A * w[:, None]).T @ A
        try:
            step = np.linalg.solve(H, grad)
        except np.linalg.LinAlgError:
            raise Separation("singular information matrix") from None
        accepted = False
        for _ in range(31):
            cand = x + step
            nll_c = _nll(A @ cand, Y)
            if nll_c < nll:
                x, nll = cand, nll_c
                accepted = True
                break
            step = 0.5 * step
        if not accepted:
            break
        if float(np.linalg.norm(x)) > _NORM_BLOWUP:
            raise Separation("coefficient norm diverged")
    eta = A @ x
    pi = 1.0 / (1.0 + np.exp(-np.clip(eta, -500, 500)))
    if float(np.linalg.norm(A.T @ (Y - pi))) <= tol:
        if nll < _SEPARATION_NLL:
            raise Separation("fitted probabilities saturated; data are separable")
        return x[0], x[1:]
    raise Separation("logistic fit did not converge; data may be separable")


def fit_pclr(C, Y, r):
    """Unpenalized logistic regression on the leading r component scores."""
    _check_r(C, r)
    Y = _binary(Y, C.n)
    intercept, alpha_r = _newton_logistic(C.Z[:, :r], Y)
    return PcrFit(
        r=int(r),
        alpha_r=alpha_r,
        beta=C.eigen.Q[:, :r] @ alpha_r,
        intercept=float(intercept),
        kind="logistic",
    )


@dataclass(frozen=True)
class UnivariateScreen:
    """Per-predictor single-variable test results.

    ``selected`` orders predictor indices by ascending p-value (ties by
    index); ``threshold`` is filled by the follow-up selection step.
    """

    statistics: np.ndarray
    p_values: np.ndarray
    selected: np.ndarray
    kind: str
    threshold: float | None = None


def univariate_screen(X, Y, kind="linear"):
    """Test every standardized predictor alone against the response.

    Linear: t-test on the simple-regression slope (n - 2 df).  Logistic:
    Wald z-test from a per-column logistic fit with intercept.
    """
    V = _values(X)
    n, p = V.shape
    Y = np.asarray(Y, dtype=np.float64)
    if Y.shape != (n,):
        raise DimensionMismatch(f"Y has shape {Y.shape}, expected ({n},)")
    if kind == "linear":
        yc = Y - Y.mean()
        b = V.T @ yc  # columns have unit norm
        rss = np.maximum(float(yc @ yc) - b * b, 0.0)
        dof = n - 2
        se = np.sqrt(rss / dof)
        with np.errstate(divide="ignore"):
            stat = np.where(se > 0.0, b / np.where(se > 0.0, se, 1.0), np.inf * np.sign(b))
        pvals = 2.0 * stats.t.sf(np.abs(stat), dof)
    elif kind == "logistic":
        Y = _binary(Y, n)
        stat, pvals = _logistic_screen(V, Y)
    else:
        raise ValueError(f"unknown kind {kind!r}")
    order = np.lexsort((np.arange(p), pvals))
    return UnivariateScreen(
        statistics=stat,
        p_values=pvals,
        selected=order.astype(np.int64),
        kind=kind,
    )


def _logistic_screen(V, Y):
    """Wald statistics for per-column logistic fits, all columns at once."""
    n, p = V.shape
    ybar = float(Y.mean())
    a = np.full(p, np.log(ybar / (1.0 - ybar)))
    b = np.zeros(p)
    resp = Y[:, None]
    for _ in range(40):
        eta = a[None, :] + V * b[None, :]
        pi = 1.0 / (1.0 + np.exp(-np.clip(eta, -500, 500)))
        res = resp - pi
        ga = res.sum(axis=0)
        gb = (V * res).sum(axis=0)
        if max(np.abs(ga).max(), np.abs(gb).max()) < _NEWTON_TOL:
            break
        w = pi * (1.0 - pi)
        S0 = w.sum(axis=0)
        S1 = (w * V).sum(axis=0)
        S2 = (w * V * V).sum(axis=0)
        det = S0 * S2 - S1 * S1
        det = np.where(det <= 0.0, np.finfo(np.float64).tiny, det)
        a += (S2 * ga - S1 * gb) / det
        b += (S0 * gb - S1 * ga) / det
        # keep quasi-separated columns from running away
        np.clip(a, -50.0, 50.0, out=a)
        np.clip(b, -50.0, 50.0, out=b)
    eta = a[None, :] + V * b[None, :]
    pi = 1.0 / (1.0 + np.exp(-np.clip(eta, -500, 500)))
    w = pi * (1.0 - pi)
    S0 = w.sum(axis=0)
    S1 = (w * V).sum(axis=0)
    S2 = (w * V * V).sum(axis=0)
    det = np.maximum(S0 * S2 - S1 * S1, np.finfo(np.float64).tiny)
    se = np.sqrt(S0 / det)
    stat = b / se
    pvals = 2.0 * stats.norm.sf(np.abs(stat))
    return stat, pvals


@dataclass(frozen=True)
class SelectedFit:
    """Joint regression on screened, pruned predictor columns."""

    kind: str
    indices: np.ndarray
    coefficients: np.ndarray
    intercept: float
    threshold: float
    n_candidates: int

    def linear_predictor(self, X_new):
        V = _values(X_new)
        if V.ndim != 2:
            raise DimensionMismatch(f"X_new must be 2-d, got shape {V.shape}")
        if self.indices.size == 0:
            return np.full(V.shape[0], self.intercept)
        return self.intercept + V[:, self.indices] @ self.coefficients

    def predict(self, X_new):
        return self.linear_predictor(X_new)

    def predict_proba(self, X_new):
        eta = self.linear_predictor(X_new)
        return 1.0 / (1.0 + np.exp(-np.clip(eta, -500, 500)))


def fit_selected_multiple(
    X, Y, screen, proportion=None, cutoff=None, ld_prune_r2=0.9, kind=None
):
    """Refit jointly on the screen's top predictors after duplicate pruning.

    Give exactly one of ``proportion`` (top fraction of predictors by
    p-value) or ``cutoff`` (absolute p-value threshold; may admit none, in
    which case the fit is intercept-only).  Candidates are walked in
    significance order; a candidate is dropped when its squared correlation
    with any already-kept column exceeds ``ld_prune_r2``.  Raises
    TooManySelected when the kept count reaches n.
    """
    if (proportion is None) == (cutoff is None):
        raise ValueError("give exactly one of proportion or cutoff")
    kind = kind or screen.kind
    V = _values(X)
    n, p = V.shape
    Y = np.asarray(Y, dtype=np.float64)
    if p != screen.p_values.shape[0]:
        raise DimensionMismatch("screen built for a different predictor count")
    if proportion is not None:
        m = int(round(proportion * p))
        candidates = screen.selected[:m]
        threshold = float(proportion)
    else:
        keep = screen.p_values[screen.selected] <= cutoff
        candidates = screen.selected[keep]
        threshold = float(cutoff)
    kept = []
    for j in candidates:
        if kept:
            corr = V[:, kept].T @ V[:, j]
            if float(np.max(corr * corr)) > ld_prune_r2:
                continue
        kept.append(int(j))
    if len(kept) >= n:
        raise TooManySelected(f"{len(kept)} predictors kept with only n={n} rows")
    kept = np.asarray(kept, dtype=np.int64)
    if kind == "linear":
        ybar = float(Y.mean())
        if kept.size:
            coefs, *_ = np.linalg.lstsq(V[:, kept], Y - ybar, rcond=None)
        else:
            coefs = np.zeros(0)
        intercept = ybar
    elif kind == "logistic":
        Yb = _binary(Y, n)
        if kept.size:
            intercept, coefs = _newton_logistic(V[:, kept], Yb)
        else:
            ybar = float(Yb.mean())
            intercept = float(np.log(ybar / (1.0 - ybar)))
            coefs = np.zeros(0)
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return SelectedFit(
        kind=kind,
        indices=kept,
        coefficients=np.asarray(coefs, dtype=np.float64),
        intercept=float(intercept),
        threshold=threshold,
        n_candidates=int(len(candidates)),
    )
