"""Linear ridge regression in canonical (principal component) form.

All fits center the response internally; the intercept is the training mean
of Y and is never penalized.  Because standardized predictor columns have
mean zero, centering Y changes no slope estimate, only the intercept.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NegativeK, TargetOutOfRange
from .linalg import CanonicalModel, EigenSystem

__all__ = [
    "DfTriple",
    "RidgeFit",
    "PseParts",
    "ols_canonical",
    "fit_ridge",
    "df_triple",
    "solve_k_for_df",
    "pse_decomposition",
    "predict",
]

# bisection budget for solve_k_for_df
_BISECT_MAX_ITER = 200
_BISECT_WIDTH = 1e-12


@dataclass(frozen=True)
class DfTriple:
    """The three effective-degrees-of-freedom measures of a ridge fit.

    trH        sum lambda / (lambda + k)
    trHH       sum lambda^2 / (lambda + k)^2      (variance df)
    tr2HmHH    sum lambda (lambda + 2k) / (lambda + k)^2
    """

    trH: float
    trHH: float
    tr2HmHH: float


@dataclass(frozen=True)
class RidgeFit:
    """A fitted linear ridge model in canonical coordinates.

    ``alpha`` holds the shrunken canonical coefficients, ``beta`` their image
    Q alpha in standardized predictor space.  ``sigma2_hat`` is the residual
    variance of the unshrunken component fit with denominator n - p, present
    only when n > p.
    """

    k: float
    alpha: np.ndarray
    beta: np.ndarray
    intercept: float
    df_variance: float
    df_effective: float
    df_error_complement: float
    sigma2_hat: float | None

    @property
    def dfs(self):
        return DfTriple(self.df_effective, self.df_variance, self.df_error_complement)


@dataclass(frozen=True)
class PseParts:
    """Additive decomposition of expected squared prediction error."""

    noise: float
    variance: float
    bias2: float

    @property
    def total(self):
        return self.noise + self.variance + self.bias2


def _check_y(C, Y):
    Y = np.asarray(Y, dtype=np.float64)
    if Y.shape != (C.n,):
        raise DimensionMismatch(f"Y has shape {Y.shape}, expected ({C.n},)")
    return Y


def ols_canonical(C, Y):
    """Per-component least squares estimates alpha_j = z_j'Y / lambda_j.

    Y is used as given; callers wanting an intercept center it first.
    """
    Y = _check_y(C, Y)
    return (C.Z.T @ Y) / C.eigen.eigenvalues


def fit_ridge(C, Y, k):
    """Fit a ridge model with shrinkage k in canonical form.

    Shrinks each component estimate by lambda_j / (lambda_j + k) and maps the
    result back to predictor space.  k = 0 reproduces the component least
    squares fit (the minimum-norm solution when rank is deficient).
    """
    if k < 0:
        raise NegativeK(f"k must be >= 0, got {k}")
    k = float(k)
    Y = _check_y(C, Y)
    ybar = float(Y.mean())
    yc = Y - ybar
    lam = C.eigen.eigenvalues
    alpha_ls = (C.Z.T @ yc) / lam
    alpha = (lam / (lam + k)) * alpha_ls
    beta = C.eigen.Q @ alpha
    dfs = df_triple(C.eigen, k)
    n, p = C.n, C.p
    sigma2_hat = None
    if n > p:
        resid = yc - C.Z @ alpha_ls
        sigma2_hat = float(resid @ resid) / (n - p)
    return RidgeFit(
        k=k,
        alpha=alpha,
        beta=beta,
        intercept=ybar,
        df_variance=dfs.trHH,
        df_effective=dfs.trH,
        df_error_complement=dfs.tr2HmHH,
        sigma2_hat=sigma2_hat,
    )


def df_triple(eigen, k):
    """Evaluate all three df measures at shrinkage k (k >= 0)."""
    if k < 0:
        raise NegativeK(f"k must be >= 0, got {k}")
    lam = eigen.eigenvalues
    shrink = lam / (lam + k)
    trH = float(np.sum(shrink))
    trHH = float(np.sum(shrink * shrink))
    tr2HmHH = float(np.sum(lam * (lam + 2.0 * k) / (lam + k) ** 2))
    return DfTriple(trH=trH, trHH=trHH, tr2HmHH=tr2HmHH)


_DF_FUNCS = {
    "trH": lambda lam, k: np.sum(lam / (lam + k)),
    "trHH": lambda lam, k: np.sum((lam / (lam + k)) ** 2),
    "tr2HmHH": lambda lam, k: np.sum(lam * (lam + 2.0 * k) / (lam + k) ** 2),
}


def solve_k_for_df(eigen, which, target_r):
    """Invert a df measure: find k >= 0 with df(k) = target_r by bisection.

    ``which`` is one of "trH", "trHH", "tr2HmHH".  All three measures are
    strictly decreasing in k from t at k = 0, so a target of exactly t
    returns 0 and anything outside (0, t] is rejected.
    """
    if which not in _DF_FUNCS:
        raise ValueError(f"unknown df measure {which!r}")
    f = _DF_FUNCS[which]
    lam = eigen.eigenvalues
    t = eigen.t
    if not (0.0 < target_r <= t):
        raise TargetOutOfRange(f"target {target_r} outside (0, {t}]")
    if target_r == t:
        return 0.0
    lo, hi = 0.0, float(max(lam[0], 1.0))
    for _ in range(200):
        if f(lam, hi) < target_r:
            break
        hi *= 4.0
    else:  # pragma: no cover - df always drops below any target in (0, t)
        raise TargetOutOfRange("df did not drop below target; target too small")
    for _ in range(_BISECT_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if f(lam, mid) > target_r:
            lo = mid
        else:
            hi = mid
        if hi - lo < _BISECT_WIDTH:
            break
    return 0.5 * (lo + hi)


def pse_decomposition(eigen, beta_true, sigma2, n, k=None, r=None):
    """Noise/variance/squared-bias split of prediction error at the design.

    Exactly one of ``k`` (ridge) or ``r`` (principal component regression on
    the leading r components) must be given.  The bias term is the squared
    norm of [X - X G X'X] beta divided by n, evaluated through the
    eigensystem; variance is tr(HH') sigma^2 / n, which for PCR equals
    r sigma^2 / n.
    """
    if (k is None) == (r is None):
        raise ValueError("give exactly one of k (ridge) or r (PCR)")
    beta_true = np.asarray(beta_true, dtype=np.float64)
    if beta_true.shape != (eigen.p,):
        raise DimensionMismatch(
            f"beta_true has shape {beta_true.shape}, expected ({eigen.p},)"
        )
    lam = eigen.eigenvalues
    gamma = eigen.Q.T @ beta_true
    if k is not None:
        if k < 0:
            raise NegativeK(f"k must be >= 0, got {k}")
        variance = float(np.sum((lam / (lam + k)) ** 2)) * sigma2 / n
        damp = (k / (lam + k)) * gamma
        bias2 = float(np.sum(lam * damp * damp)) / n
    else:
        if not (1 <= r <= eigen.t):
            raise TargetOutOfRange(f"r={r} outside 1..{eigen.t}")
        variance = r * sigma2 / n
        tail = gamma[r:]
        bias2 = float(np.sum(lam[r:] * tail * tail)) / n
    return PseParts(noise=float(sigma2), variance=variance, bias2=bias2)


def predict(fit, X_new):
    """Predict responses for rows already standardized with the training transform."""
    X_new = np.asarray(X_new, dtype=np.float64)
    if X_new.ndim != 2 or X_new.shape[1] != fit.beta.shape[0]:
        raise DimensionMismatch(
            f"X_new has shape {X_new.shape}, expected (*, {fit.beta.shape[0]})"
        )
    return fit.intercept + X_new @ fit.beta
