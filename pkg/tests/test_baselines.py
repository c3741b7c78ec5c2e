"""Tests for PCR/PCLR and the univariate screen + joint refit pipeline.

Oracles: least squares via lstsq, per-column t-tests via scipy.stats
.linregress, logistic fits via scipy.optimize on the exact likelihood,
Wald standard errors from the dense information matrix.
"""

import numpy as np
import pytest
from scipy import optimize, stats

from pcridge.baselines import (
    PcrFit,
    SelectedFit,
    UnivariateScreen,
    fit_pclr,
    fit_pcr,
    fit_selected_multiple,
    univariate_screen,
)
from pcridge.errors import (
    DimensionMismatch,
    NonBinaryLabels,
    ROutOfRange,
    Separation,
    TooManySelected,
)
from pcridge.linalg import eigendecompose, standardize, to_canonical


def _canon(X):
    dm = standardize(X)
    eig = eigendecompose(dm)
    return dm, to_canonical(dm, eig)


def _make(n, p, seed, sigma=0.8):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, p))
    beta = rng.normal(size=p)
    y = X @ beta + sigma * rng.normal(size=n)
    return X, y


def _nll_pen(x, D, Y):
    eta = x[0] + D @ x[1:]
    return float(np.sum(np.logaddexp(0.0, eta)) - Y @ eta)


def _oracle_logistic(D, Y):
    x0 = np.zeros(D.shape[1] + 1)
    res = optimize.minimize(
        _nll_pen, x0, args=(D, Y), method="BFGS",
        options={"gtol": 1e-10, "maxiter": 500},
    )
    return res.x[0], res.x[1:]


class TestFitPcr:
    def test_matches_lstsq_on_scores(self):
        X, y = _make(30, 6, seed=0)
        _, C = _canon(X)
        for r in (1, 3, 6):
            fit = fit_pcr(C, y, r)
            yc = y - y.mean()
            alpha, *_ = np.linalg.lstsq(C.Z[:, :r], yc, rcond=None)
            np.testing.assert_allclose(fit.alpha_r, alpha, rtol=1e-10)
            np.testing.assert_allclose(
                fit.beta, C.eigen.Q[:, :r] @ alpha, rtol=1e-10
            )
            assert fit.intercept == pytest.approx(y.mean())
            assert fit.kind == "linear"

    def test_fitted_values_are_projection(self):
        X, y = _make(25, 5, seed=1)
        dm, C = _canon(X)
        r = 3
        fit = fit_pcr(C, y, r)
        yc = y - y.mean()
        Zr = C.Z[:, :r]
        H = Zr @ np.linalg.solve(Zr.T @ Zr, Zr.T)
        np.testing.assert_allclose(dm.values @ fit.beta, H @ yc, atol=1e-10)

    def test_df_equals_r(self):
        X, y = _make(25, 5, seed=2)
        _, C = _canon(X)
        assert fit_pcr(C, y, 4).df == 4.0

    def test_r_bounds(self):
        X, y = _make(20, 4, seed=3)
        _, C = _canon(X)
        with pytest.raises(ROutOfRange):
            fit_pcr(C, y, 0)
        with pytest.raises(ROutOfRange):
            fit_pcr(C, y, C.t + 1)

    def test_bad_y_shape(self):
        X, y = _make(20, 4, seed=4)
        _, C = _canon(X)
        with pytest.raises(DimensionMismatch):
            fit_pcr(C, y[:-1], 2)


class TestFitPclr:
    def test_matches_scipy_optimizer(self):
        rng = np.random.default_rng(10)
        X = rng.normal(size=(80, 5))
        _, C = _canon(X)
        eta = 1.2 * C.Z[:, 0] / np.std(C.Z[:, 0])
        y = (rng.uniform(size=80) < 1.0 / (1.0 + np.exp(-eta))).astype(float)
        for r in (1, 3, 5):
            fit = fit_pclr(C, y, r)
            b0, alpha = _oracle_logistic(C.Z[:, :r], y)
            assert fit.intercept == pytest.approx(b0, abs=2e-5)
            np.testing.assert_allclose(fit.alpha_r, alpha, atol=2e-5)
            assert fit.kind == "logistic"

    def test_separated_scores_raise(self):
        rng = np.random.default_rng(11)
        X = rng.normal(size=(30, 3))
        _, C = _canon(X)
        y = (C.Z[:, 0] > 0).astype(float)
        with pytest.raises(Separation):
            fit_pclr(C, y, 1)

    def test_label_validation(self):
        X, _ = _make(20, 3, seed=12)
        _, C = _canon(X)
        with pytest.raises(NonBinaryLabels):
            fit_pclr(C, np.arange(20, dtype=float), 1)
        with pytest.raises(NonBinaryLabels):
            fit_pclr(C, np.zeros(20), 1)


class TestUnivariateScreenLinear:
    def test_matches_linregress(self):
        X, y = _make(40, 6, seed=20)
        dm, _ = _canon(X)
        screen = univariate_screen(dm, y)
        for j in range(6):
            ref = stats.linregress(X[:, j], y)
            assert screen.p_values[j] == pytest.approx(ref.pvalue, rel=1e-9)
            assert abs(screen.statistics[j]) == pytest.approx(
                abs(ref.slope / ref.stderr), rel=1e-9
            )
            assert np.sign(screen.statistics[j]) == np.sign(ref.slope)

    def test_selected_orders_by_pvalue(self):
        X, y = _make(35, 8, seed=21)
        dm, _ = _canon(X)
        screen = univariate_screen(dm, y)
        pv = screen.p_values[screen.selected]
        assert np.all(np.diff(pv) >= 0)
        assert sorted(screen.selected.tolist()) == list(range(8))
        assert screen.kind == "linear"

    def test_null_pvalues_are_uniform(self):
        rng = np.random.default_rng(22)
        X = rng.normal(size=(100, 400))
        y = rng.normal(size=100)
        dm = standardize(X)
        screen = univariate_screen(dm, y)
        ks = stats.kstest(screen.p_values, "uniform")
        assert ks.pvalue > 0.05

    def test_raw_input_accepted(self):
        X, y = _make(30, 4, seed=23)
        dm, _ = _canon(X)
        a = univariate_screen(dm, y)
        b = univariate_screen(dm.values, y)
        np.testing.assert_allclose(a.p_values, b.p_values)

    def test_unknown_kind(self):
        X, y = _make(20, 3, seed=24)
        with pytest.raises(ValueError):
            univariate_screen(standardize(X), y, kind="poisson")


class TestUnivariateScreenLogistic:
    def test_matches_wald_oracle(self):
        rng = np.random.default_rng(30)
        X = rng.normal(size=(200, 6))
        dm = standardize(X)
        V = dm.values
        eta = 6.0 * V[:, 0] - 4.0 * V[:, 2]
        y = (rng.uniform(size=200) < 1.0 / (1.0 + np.exp(-eta))).astype(float)
        screen = univariate_screen(dm, y, kind="logistic")
        for j in range(6):
            b0, b = _oracle_logistic(V[:, [j]], y)
            pi = 1.0 / (1.0 + np.exp(-(b0 + V[:, j] * b[0])))
            w = pi * (1.0 - pi)
            info = np.array([
                [w.sum(), (w * V[:, j]).sum()],
                [(w * V[:, j]).sum(), (w * V[:, j] ** 2).sum()],
            ])
            se = np.sqrt(np.linalg.inv(info)[1, 1])
            assert screen.statistics[j] == pytest.approx(b[0] / se, rel=1e-4)
            assert screen.p_values[j] == pytest.approx(
                2.0 * stats.norm.sf(abs(b[0] / se)), rel=1e-3, abs=1e-12
            )
        assert screen.kind == "logistic"

    def test_label_validation(self):
        X, _ = _make(30, 3, seed=31)
        with pytest.raises(NonBinaryLabels):
            univariate_screen(standardize(X), np.full(30, 2.0), kind="logistic")


class TestFitSelectedMultiple:
    def _screened(self, n=50, p=10, seed=40, sigma=1.0):
        rng = np.random.default_rng(seed)
        X = rng.normal(size=(n, p))
        beta = np.zeros(p)
        beta[:3] = (2.0, -1.5, 1.0)
        y = X @ beta + sigma * rng.normal(size=n)
        dm = standardize(X)
        return dm, y, univariate_screen(dm, y)

    def test_proportion_joint_lstsq(self):
        dm, y, screen = self._screened()
        fit = fit_selected_multiple(dm, y, screen, proportion=0.3)
        assert fit.n_candidates == 3
        assert fit.threshold == 0.3
        assert set(fit.indices.tolist()) == set(screen.selected[:3].tolist())
        coefs, *_ = np.linalg.lstsq(
            dm.values[:, fit.indices], y - y.mean(), rcond=None
        )
        np.testing.assert_allclose(fit.coefficients, coefs, rtol=1e-9)
        assert fit.intercept == pytest.approx(y.mean())
        pred = fit.predict(dm.values)
        np.testing.assert_allclose(
            pred, y.mean() + dm.values[:, fit.indices] @ coefs, rtol=1e-9
        )

    def test_cutoff_admits_none(self):
        dm, y, screen = self._screened(seed=41)
        fit = fit_selected_multiple(dm, y, screen, cutoff=1e-30)
        assert fit.indices.size == 0
        assert fit.coefficients.size == 0
        assert fit.intercept == pytest.approx(y.mean())
        np.testing.assert_allclose(
            fit.predict(dm.values), np.full(50, y.mean())
        )

    def test_duplicate_column_is_pruned(self):
        rng = np.random.default_rng(42)
        n = 60
        X = rng.normal(size=(n, 6))
        X[:, 5] = X[:, 0] + 1e-4 * rng.normal(size=n)
        y = 3.0 * X[:, 0] + rng.normal(size=n)
        dm = standardize(X)
        screen = univariate_screen(dm, y)
        assert set(screen.selected[:2].tolist()) == {0, 5}
        fit = fit_selected_multiple(dm, y, screen, proportion=0.5)
        assert fit.n_candidates == 3
        kept = fit.indices.tolist()
        assert len({0, 5} & set(kept)) == 1
        assert len(kept) == 2

    def test_too_many_selected(self):
        rng = np.random.default_rng(43)
        X = rng.normal(size=(10, 14))
        y = rng.normal(size=10)
        dm = standardize(X)
        screen = univariate_screen(dm, y)
        with pytest.raises(TooManySelected):
            fit_selected_multiple(dm, y, screen, proportion=1.0)

    def test_exactly_one_of_proportion_cutoff(self):
        dm, y, screen = self._screened(seed=44)
        with pytest.raises(ValueError):
            fit_selected_multiple(dm, y, screen)
        with pytest.raises(ValueError):
            fit_selected_multiple(dm, y, screen, proportion=0.2, cutoff=0.05)

    def test_screen_size_mismatch(self):
        dm, y, screen = self._screened(seed=45)
        with pytest.raises(DimensionMismatch):
            fit_selected_multiple(dm.values[:, :4], y, screen, proportion=0.2)

    def test_logistic_joint_refit(self):
        rng = np.random.default_rng(46)
        n = 150
        X = rng.normal(size=(n, 6))
        dm = standardize(X)
        V = dm.values
        eta = 8.0 * V[:, 1] - 6.0 * V[:, 3]
        y = (rng.uniform(size=n) < 1.0 / (1.0 + np.exp(-eta))).astype(float)
        screen = univariate_screen(dm, y, kind="logistic")
        fit = fit_selected_multiple(dm, y, screen, proportion=2.0 / 6.0)
        assert fit.kind == "logistic"
        b0, coefs = _oracle_logistic(V[:, fit.indices], y)
        assert fit.intercept == pytest.approx(b0, abs=2e-5)
        np.testing.assert_allclose(fit.coefficients, coefs, atol=2e-5)
        pi = fit.predict_proba(V)
        assert np.all((pi > 0) & (pi < 1))

    def test_logistic_intercept_only(self):
        rng = np.random.default_rng(47)
        X = rng.normal(size=(40, 5))
        dm = standardize(X)
        y = (rng.uniform(size=40) < 0.3).astype(float)
        screen = univariate_screen(dm, y, kind="logistic")
        fit = fit_selected_multiple(dm, y, screen, cutoff=1e-30)
        ybar = y.mean()
        assert fit.intercept == pytest.approx(np.log(ybar / (1 - ybar)))
        np.testing.assert_allclose(fit.predict_proba(dm.values), np.full(40, ybar))
