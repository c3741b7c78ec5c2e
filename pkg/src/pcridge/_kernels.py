"""Hot numeric loops for the logistic ridge solver.

The cyclic coordinate-descent sweep is the runtime bottleneck of logistic
fits: it visits every (observation, predictor) pair once per sweep and cannot
be vectorized across predictors because each update feeds the next.  A
numba-compiled kernel runs by default; setting PCRIDGE_NO_NUMBA=1 (or any
value other than 0/false) selects a pure-numpy twin of the same algorithm.
Both paths are deterministic; they agree to floating-point roundoff.
"""

import os

import numpy as np

__all__ = ["clg_sweeps", "backend_name", "NUMBA_ENABLED"]


def _numba_wanted():
    flag = os.environ.get("PCRIDGE_NO_NUMBA", "0").strip().lower()
    return flag in ("", "0", "false", "no")


NUMBA_ENABLED = False
if _numba_wanted():
    try:
        from numba import njit

        NUMBA_ENABLED = True
    except ImportError:
        NUMBA_ENABLED = False


def _curv(r, d):
    # upper bound on the logistic second derivative over |s - r| <= d
    a = abs(r)
    if a <= d:
        return 0.25
    z = a - d
    return 1.0 / (2.0 + np.exp(z) + np.exp(-z))


def _clg_core(X, yy, k, epsilon, max_sweeps, fit_intercept, beta, b0):
    """Trust-region coordinate descent on the penalized logistic objective.

    X is n-by-p standardized data, yy the labels recoded to -1/+1, beta and
    b0 the starting point (mutated copy).  Scores r_i track
    (b0 + x_i'beta) * yy_i incrementally.  Returns the per-sweep objective
    history and the net-change convergence ratio of the last sweep.
    """
    n, p = X.shape
    tau = 1.0 / (2.0 * k)
    r = np.empty(n)
    for i in range(n):
        acc = b0
        for j in range(p):
            acc += X[i, j] * beta[j]
        r[i] = acc * yy[i]
    delta = np.ones(p)
    delta0 = 1.0
    r_prev = np.empty(n)
    obj = np.empty(max_sweeps)
    sweeps = 0
    converged = False
    for sweep in range(max_sweeps):
        for i in range(n):
            r_prev[i] = r[i]
        if fit_intercept:
            num = 0.0
            den = 0.0
            for i in range(n):
                num += yy[i] / (1.0 + np.exp(r[i]))
                den += _curv(r[i], delta0)
            dv = num / den if den > 0.0 else 0.0
            db = min(max(dv, -delta0), delta0)
            if db != 0.0:
                for i in range(n):
                    r[i] += db * yy[i]
                b0 += db
            delta0 = max(2.0 * abs(db), delta0 / 2.0)
        for j in range(p):
            num = 0.0
            den = 0.0
            dj = delta[j]
            for i in range(n):
                x = X[i, j]
                num += x * yy[i] / (1.0 + np.exp(r[i]))
                den += x * x * _curv(r[i], dj * abs(x))
            num -= beta[j] / tau
            den += 1.0 / tau
            dv = num / den
            db = min(max(dv, -dj), dj)
            if db != 0.0:
                for i in range(n):
                    r[i] += db * X[i, j] * yy[i]
                beta[j] += db
            delta[j] = max(2.0 * abs(db), dj / 2.0)
        total = 0.0
        for i in range(n):
            ri = r[i]
            if ri > 0.0:
                total += np.log1p(np.exp(-ri))
            else:
                total += -ri + np.log1p(np.exp(ri))
        pen = 0.0
        for j in range(p):
            pen += beta[j] * beta[j]
        obj[sweep] = -total - k * pen
        sweeps = sweep + 1
        num_c = 0.0
        den_c = 1.0
        for i in range(n):
            num_c += abs(r[i] - r_prev[i])
            den_c += abs(r[i])
        if num_c / den_c < epsilon:
            converged = True
            break
    return beta, b0, r, sweeps, converged, obj[:sweeps].copy()


if NUMBA_ENABLED:
    _curv = njit(cache=True)(_curv)
    _clg_numba = njit(cache=True)(_clg_core)
else:
    _clg_numba = None


def _curv_vec(r, d):
    # vectorized _curv; z is clipped only to dodge overflow where the bound
    # already underflows to zero
    a = np.abs(r)
    z = np.minimum(np.abs(a - d), 500.0)
    vals = 1.0 / (2.0 + np.exp(z) + np.exp(-z))
    return np.where(a <= d, 0.25, vals)


def _clg_numpy(X, yy, k, epsilon, max_sweeps, fit_intercept, beta, b0):
    """Pure-numpy twin of _clg_core: same sweep order, vector inner loops."""
    n, p = X.shape
    tau = 1.0 / (2.0 * k)
    r = (b0 + X @ beta) * yy
    delta = np.ones(p)
    delta0 = 1.0
    obj = np.empty(max_sweeps)
    sweeps = 0
    converged = False
    for sweep in range(max_sweeps):
        r_prev = r.copy()
        if fit_intercept:
            u = 1.0 / (1.0 + np.exp(np.minimum(r, 500.0)))
            num = float(yy @ u)
            den = float(np.sum(_curv_vec(r, delta0)))
            dv = num / den if den > 0.0 else 0.0
            db = min(max(dv, -delta0), delta0)
            if db != 0.0:
                r += db * yy
                b0 += db
            delta0 = max(2.0 * abs(db), delta0 / 2.0)
        for j in range(p):
            x = X[:, j]
            dj = delta[j]
            u = 1.0 / (1.0 + np.exp(np.minimum(r, 500.0)))
            num = float(x @ (yy * u)) - beta[j] / tau
            den = float((x * x) @ _curv_vec(r, dj * np.abs(x))) + 1.0 / tau
            dv = num / den
            db = min(max(dv, -dj), dj)
            if db != 0.0:
                r += db * x * yy
                beta[j] += db
            delta[j] = max(2.0 * abs(db), dj / 2.0)
        obj[sweep] = -float(np.sum(np.logaddexp(0.0, -r))) - k * float(beta @ beta)
        sweeps = sweep + 1
        ratio = float(np.sum(np.abs(r - r_prev))) / (1.0 + float(np.sum(np.abs(r))))
        if ratio < epsilon:
            converged = True
            break
    return beta, b0, r, sweeps, converged, obj[:sweeps].copy()


def clg_sweeps(X, yy, k, epsilon, max_sweeps, fit_intercept, beta0, intercept0):
    """Run coordinate-descent sweeps; dispatches to the active backend.

    Returns (beta, intercept, scores, sweeps, converged, objective_history).
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    yy = np.ascontiguousarray(yy, dtype=np.float64)
    beta = np.array(beta0, dtype=np.float64, copy=True)
    impl = _clg_numba if NUMBA_ENABLED else _clg_numpy
    return impl(
        X, yy, float(k), float(epsilon), int(max_sweeps),
        bool(fit_intercept), beta, float(intercept0),
    )


def backend_name():
    return "numba" if NUMBA_ENABLED else "numpy"
