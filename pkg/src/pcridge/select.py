"""Shrinkage-parameter estimators and component-count selection rules.

``k_r`` generalizes the classic variance-over-signal shrinkage estimate to
rank-deficient designs by using only the leading r principal components; at
r = p on full-rank data it reproduces the classic estimator exactly.  Two
rules pick r: a degrees-of-freedom fixed point (choose r where the variance
df of the implied ridge fit is closest to r) and cross-validated squared
prediction error.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    FoldTooSmall,
    ROutOfRange,
    Separation,
    UndefinedEstimator,
    ZeroNorm,
    ZeroSignalWarning,
)
from .logistic import clg_fit, logistic_hat_df

__all__ = [
    "ScanRow",
    "KSelection",
    "k_hkb",
    "k_r",
    "k_schaefer",
    "k_r_logistic",
    "choose_r_doff",
    "choose_r_press",
    "choose_r_doff_logistic",
    "choose_r_press_logistic",
]


@dataclass(frozen=True)
class ScanRow:
    """One evaluated candidate: component count, its k, variance df, criterion."""

    r: int
    k: float
    df_variance: float
    criterion: float


@dataclass(frozen=True)
class KSelection:
    """Outcome of a selection rule plus the per-candidate diagnostics table."""

    r_chosen: int
    k: float
    rule: str
    diagnostics: tuple


def _centered(C, Y):
    Y = np.asarray(Y, dtype=np.float64)
    if Y.shape != (C.n,):
        raise ROutOfRange(f"Y has shape {Y.shape}, expected ({C.n},)")
    return Y - Y.mean()


def k_r(C, Y, r):
    """Shrinkage estimate from the leading r components.

    k_r = r * sigma2_r / sum_{j<=r} alpha_j^2 with
    sigma2_r = ||Y - Z_r alpha_r||^2 / (n - r) on centered Y.  Returns +inf
    (with a ZeroSignalWarning) when the leading coefficients are all zero.
    """
    n, t = C.n, C.t
    if not (1 <= r <= t) or r >= n:
        raise ROutOfRange(f"r={r} not in 1..{t} with r < n={n}")
    yc = _centered(C, Y)
    Zr = C.Z[:, :r]
    alpha_r = (Zr.T @ yc) / C.eigen.eigenvalues[:r]
    denom = float(alpha_r @ alpha_r)
    if denom == 0.0:
        warnings.warn(
            "leading canonical coefficients are all zero; k_r is infinite",
            ZeroSignalWarning,
        )
        return float("inf")
    resid = yc - Zr @ alpha_r
    sigma2_r = float(resid @ resid) / (n - r)
    return r * sigma2_r / denom


def k_hkb(C, Y):
    """Classic shrinkage estimate p * sigma2 / (alpha'alpha); needs n > p full rank."""
    n, p, t = C.n, C.p, C.t
    if p >= n:
        raise UndefinedEstimator(f"needs n > p, got n={n}, p={p}")
    if t < p:
        raise UndefinedEstimator(f"needs full column rank, got rank {t} < p={p}")
    return k_r(C, Y, p)


def k_schaefer(beta_hat):
    """Logistic shrinkage estimate p / (beta'beta)."""
    beta_hat = np.asarray(beta_hat, dtype=np.float64)
    ss = float(beta_hat @ beta_hat)
    if ss == 0.0:
        raise ZeroNorm("beta has zero squared norm")
    return beta_hat.shape[0] / ss


def k_r_logistic(alpha_r):
    """Logistic analogue of k_r: r / (alpha_r'alpha_r) from an unpenalized
    logistic fit on the leading r component scores."""
    alpha_r = np.asarray(alpha_r, dtype=np.float64)
    ss = float(alpha_r @ alpha_r)
    if ss == 0.0:
        raise ZeroNorm("alpha_r has zero squared norm")
    return alpha_r.shape[0] / ss


def _df_variance(eigen, k):
    lam = eigen.eigenvalues
    return float(np.sum((lam / (lam + k)) ** 2))


def choose_r_doff(C, Y):
    """Degrees-of-freedom rule: scan r = 1..t-1, pick argmin |df(k_r) - r|.

    df is the variance degrees of freedom tr(HH') of the ridge fit with
    shrinkage k_r, summed over all t components.  Ties break toward smaller
    r; candidates with infinite k_r are recorded but never selected.
    """
    t = C.t
    if t < 2:
        raise ROutOfRange(f"need at least 2 components, got t={t}")
    rows = []
    best = None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ZeroSignalWarning)
        for r in range(1, t):
            k = k_r(C, Y, r)
            if np.isinf(k):
                rows.append(ScanRow(r, float("inf"), 0.0, float("inf")))
                continue
            df = _df_variance(C.eigen, k)
            crit = abs(df - r)
            row = ScanRow(r, k, df, crit)
            rows.append(row)
            if best is None or crit < best.criterion:
                best = row
    if best is None:
        raise ZeroNorm("every candidate r had zero leading signal")
    return KSelection(best.r, best.k, "doff", tuple(rows))


def _fold_indices(n, folds, rng=None):
    if folds < 2 or folds > n:
        raise FoldTooSmall(f"folds={folds} invalid for n={n}")
    order = np.arange(n) if rng is None else rng.permutation(n)
    parts = np.array_split(order, folds)
    largest = max(len(part) for part in parts)
    if n - largest < 2:
        raise FoldTooSmall(
            f"a training split would keep only {n - largest} rows"
        )
    return parts


def choose_r_press(C, Y, folds=10, rng=None):
    """Cross-validated squared-error rule over r = 1..t-1.

    For every candidate r the shrinkage k_r is computed once from the full
    data; each fold then refits the ridge smoother (its own thin SVD, the
    full-data centering and scaling) at that fixed k and predicts its
    held-out rows.  With folds = n this reproduces leave-one-out exactly.
    Ties break toward smaller r.  Pass a numpy Generator as ``rng`` to
    shuffle rows into folds; the default uses contiguous blocks.
    """
    t, n = C.t, C.n
    if t < 2:
        raise ROutOfRange(f"need at least 2 components, got t={t}")
    parts = _fold_indices(n, folds, rng)
    yc = _centered(C, Y)
    X = C.Z @ C.eigen.Q.T  # exact: Q spans the row space
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ZeroSignalWarning)
        ks = np.array([k_r(C, Y, r) for r in range(1, t)])
    press = np.zeros(t - 1)
    finite = np.isfinite(ks)
    eps = np.finfo(np.float64).eps
    for test_idx in parts:
        mask = np.ones(n, dtype=bool)
        mask[test_idx] = False
        Xtr = X[mask]
        _, s, Vt = np.linalg.svd(Xtr, full_matrices=False)
        ev = s * s
        keep = ev > (ev[0] * max(Xtr.shape) * eps if ev.size else 0.0)
        s, Vt, ev = s[keep], Vt[keep], ev[keep]
        uy = (Vt @ (Xtr.T @ yc[mask])) / s  # component least-squares * s
        Zte = X[test_idx] @ Vt.T
        yte = yc[test_idx]
        for i, k in enumerate(ks):
            if not finite[i]:
                continue
            alpha_k = (ev / (ev + k)) * uy / s
            resid = yte - Zte @ alpha_k
            press[i] += float(resid @ resid)
    rows = []
    best = None
    for i in range(t - 1):
        crit = press[i] if finite[i] else float("inf")
        df = _df_variance(C.eigen, ks[i]) if finite[i] else 0.0
        row = ScanRow(i + 1, float(ks[i]), df, float(crit))
        rows.append(row)
        if finite[i] and (best is None or crit < best.criterion):
            best = row
    if best is None:
        raise ZeroNorm("every candidate r had zero leading signal")
    return KSelection(best.r, best.k, "press", tuple(rows))


def _pclr_k(C, Y, r):
    # k from an unpenalized logistic fit on the leading r component scores
    from .baselines import fit_pclr

    pclr = fit_pclr(C, Y, r)
    return k_r_logistic(pclr.alpha_r)


def _candidate_grid(t, width=9):
    rs = np.unique(np.round(np.linspace(1, t - 1, width)).astype(int))
    return [int(r) for r in rs]


def choose_r_doff_logistic(
    X, Y, C, epsilon=None, max_sweeps=None, scan="auto"
):
    """Degrees-of-freedom rule for binary outcomes.

    For a candidate r, k comes from an unpenalized logistic fit on the
    leading r component scores; the criterion compares r against the
    variance df of the logistic ridge fit at that k (weights taken at the
    ridge solution).  ``scan="full"`` evaluates every r in 1..t-1;
    ``"auto"`` uses a coarse grid plus bisection on the sign change of
    df - r, which evaluates a few dozen candidates on large problems.

    Returns (selection, fit) where fit is the logistic ridge fit at the
    chosen k.
    """
    from .logistic import DEFAULT_EPSILON, DEFAULT_MAX_SWEEPS

    epsilon = DEFAULT_EPSILON if epsilon is None else epsilon
    max_sweeps = DEFAULT_MAX_SWEEPS if max_sweeps is None else max_sweeps
    t = C.t
    if t < 2:
        raise ROutOfRange(f"need at least 2 components, got t={t}")
    X = np.ascontiguousarray(X, dtype=np.float64)
    cache = {}
    warm = {"beta": None, "b0": 0.0}

    def evaluate(r):
        if r in cache:
            return cache[r]
        try:
            k = _pclr_k(C, Y, r)
        except (Separation, ZeroNorm):
            cache[r] = (float("inf"), 0.0, float("inf"), None)
            return cache[r]
        fit = clg_fit(
            X, Y, k, epsilon=epsilon, max_sweeps=max_sweeps,
            beta0=warm["beta"], intercept0=warm["b0"],
        )
        warm["beta"], warm["b0"] = fit.beta, fit.intercept
        df = logistic_hat_df(X, fit, k)
        cache[r] = (k, df, df - r, fit)
        return cache[r]

    if scan == "full" or t - 1 <= 13:
        for r in range(1, t):
            evaluate(r)
    else:
        grid = _candidate_grid(t)
        for r in grid:
            evaluate(r)
        bracket = None
        for a, b in zip(grid, grid[1:]):
            if cache[a][2] >= 0.0 >= cache[b][2]:
                bracket = (a, b)
                break
        if bracket is not None:
            a, b = bracket
            while b - a > 1:
                m = (a + b) // 2
                evaluate(m)
                if not np.isfinite(cache[m][2]):
                    break
                if cache[m][2] >= 0.0:
                    a = m
                else:
                    b = m
        # refine around the best point seen so far as well; the criterion
        # can have a second dip the bracket walk never visits
        finite = [r for r in cache if np.isfinite(cache[r][2])]
        if finite:
            center = min(finite, key=lambda r: (abs(cache[r][2]), r))
            for r in range(max(1, center - 2), min(t, center + 3)):
                evaluate(r)

    rows = []
    best_r = None
    best_crit = float("inf")
    for r in sorted(cache):
        k, df, g, _ = cache[r]
        crit = abs(g) if np.isfinite(g) else float("inf")
        rows.append(ScanRow(r, k, df, crit))
        if crit < best_crit:
            best_r, best_crit = r, crit
    if best_r is None or not np.isfinite(best_crit):
        raise Separation("no candidate r admitted a finite shrinkage estimate")
    selection = KSelection(best_r, cache[best_r][0], "doff", tuple(rows))
    return selection, cache[best_r][3]


def choose_r_press_logistic(
    X, Y, C, folds=10, epsilon=None, max_sweeps=None, rng=None, scan="auto"
):
    """Cross-validated squared-error rule for binary outcomes.

    The held-out criterion is the Brier sum, sum (pi_hat - y)^2, with each
    training fold refit at the candidate's full-data k.  Candidate coverage
    follows the same coarse scan as the logistic df rule unless
    ``scan="full"``.  Returns (selection, fit-at-chosen-k).
    """
    from .logistic import DEFAULT_EPSILON, DEFAULT_MAX_SWEEPS, predict_proba

    epsilon = DEFAULT_EPSILON if epsilon is None else epsilon
    max_sweeps = DEFAULT_MAX_SWEEPS if max_sweeps is None else max_sweeps
    t, n = C.t, C.n
    if t < 2:
        raise ROutOfRange(f"need at least 2 components, got t={t}")
    X = np.ascontiguousarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    parts = _fold_indices(n, folds, rng)
    cache = {}

    def evaluate(r):
        if r in cache:
            return cache[r]
        try:
            k = _pclr_k(C, Y, r)
        except (Separation, ZeroNorm):
            cache[r] = (float("inf"), float("inf"))
            return cache[r]
        total = 0.0
        warm = {"beta": None, "b0": 0.0}
        for test_idx in parts:
            mask = np.ones(n, dtype=bool)
            mask[test_idx] = False
            fit = clg_fit(
                X[mask], Y[mask], k, epsilon=epsilon, max_sweeps=max_sweeps,
                beta0=warm["beta"], intercept0=warm["b0"],
            )
            warm["beta"], warm["b0"] = fit.beta, fit.intercept
            pi = predict_proba(fit, X[test_idx])
            diff = pi - Y[test_idx]
            total += float(diff @ diff)
        cache[r] = (k, total)
        return cache[r]

    if scan == "full" or t - 1 <= 13:
        for r in range(1, t):
            evaluate(r)
    else:
        grid = _candidate_grid(t)
        for r in grid:
            evaluate(r)
        finite = [r for r in grid if np.isfinite(cache[r][1])]
        if finite:
            center = min(finite, key=lambda r: (cache[r][1], r))
            for r in range(max(1, center - 2), min(t, center + 3)):
                evaluate(r)

    rows = []
    best_r = None
    best_crit = float("inf")
    for r in sorted(cache):
        k, crit = cache[r]
        df = _df_variance(C.eigen, k) if np.isfinite(k) else 0.0
        rows.append(ScanRow(r, k, df, crit))
        if np.isfinite(crit) and crit < best_crit:
            best_r, best_crit = r, crit
    if best_r is None:
        raise Separation("no candidate r admitted a finite shrinkage estimate")
    selection = KSelection(best_r, cache[best_r][0], "press", tuple(rows))
    fit = clg_fit(X, Y, selection.k, epsilon=epsilon, max_sweeps=max_sweeps)
    return selection, fit
