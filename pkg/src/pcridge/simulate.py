"""Seeded data generators, method runners and comparison metrics.

Two generator families: small Gaussian scenarios with fixed coefficient
patterns, and SNP dosage data built from a haplotype pool with block-local
linkage.  ``run_comparison`` replays a list of named methods over seeded
replicates and reports held-out prediction error (continuous) or
classification error (binary).
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from . import baselines, linear, select
from .errors import (
    ConfigError,
    DimensionMismatch,
    InsufficientEligibleSnps,
    PcridgeError,
    QuotaUnreachable,
    UndefinedEstimator,
)
from .linalg import eigendecompose, standardize, to_canonical
from .logistic import clg_fit, predict_proba

__all__ = [
    "ScenarioSpec",
    "GenotypeSpec",
    "GenotypeData",
    "MetricReport",
    "scenario_table",
    "generate_scenario",
    "generate_genotypes",
    "simulate_binary_outcomes",
    "run_comparison",
    "run_hkb_comparison",
    "thin_predictors",
    "pse",
    "classification_error",
]

# latent AR coefficient of the within-block allele chain
_HAPLO_AR = 0.9
# sd of the per-variable noise around each latent factor
_FACTOR_NOISE_SD = 0.1


@dataclass(frozen=True)
class ScenarioSpec:
    """A Gaussian simulation scenario with a fixed coefficient pattern."""

    name: str
    n_train: int
    n_test: int
    p: int
    beta_pattern: tuple
    correlation_structure: str = "independent"
    noise_sigma: float = 1.0
    link: str = "identity"
    intercept: float = 0.0
    seed: int = 0

    @property
    def beta(self):
        return np.asarray(self.beta_pattern, dtype=np.float64)


def scenario_table(idx, n_test=1000, seed=0):
    """The four standard scenarios; idx in 1..4.

    (1) n=100, p=8, beta=(3,1.5,0,0,2,0,0,0), corr 0.5^|i-j|, sigma=3
    (2) same design, beta_j = 0.85 for all j
    (3) n=50, p=40, beta 1 on j in 11..20 and 31..40 else 0, corr 0.5, sigma=15
    (4) n=50, p=40, beta 0 on j<=15 else 1; x_j = Z_g + noise for three
        5-variable latent groups, remaining 25 variables independent, sigma=15
    """
    if idx == 1:
        beta = (3.0, 1.5, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0)
        return ScenarioSpec("scenario-1", 100, n_test, 8, beta, "ar1-0.5", 3.0,
                            "identity", 0.0, seed)
    if idx == 2:
        return ScenarioSpec("scenario-2", 100, n_test, 8, (0.85,) * 8, "ar1-0.5",
                            3.0, "identity", 0.0, seed)
    if idx == 3:
        beta = tuple([0.0] * 10 + [1.0] * 10 + [0.0] * 10 + [1.0] * 10)
        return ScenarioSpec("scenario-3", 50, n_test, 40, beta, "constant-0.5",
                            15.0, "identity", 0.0, seed)
    if idx == 4:
        beta = tuple([0.0] * 15 + [1.0] * 25)
        return ScenarioSpec("scenario-4", 50, n_test, 40, beta, "latent-factor",
                            15.0, "identity", 0.0, seed)
    raise ConfigError(f"unknown scenario preset {idx}")


def _draw_design(rng, n, spec):
    struct = spec.correlation_structure
    p = spec.p
    if struct == "independent":
        return rng.standard_normal((n, p))
    if struct.startswith("ar1-"):
        rho = float(struct[4:])
        idx = np.arange(p)
        cov = rho ** np.abs(idx[:, None] - idx[None, :])
        L = np.linalg.cholesky(cov)
        return rng.standard_normal((n, p)) @ L.T
    if struct.startswith("constant-"):
        rho = float(struct[9:])
        g = rng.standard_normal((n, 1))
        e = rng.standard_normal((n, p))
        return math.sqrt(rho) * g + math.sqrt(1.0 - rho) * e
    if struct == "latent-factor":
        if p < 15:
            raise ConfigError("latent-factor structure needs p >= 15")
        X = np.empty((n, p))
        for g in range(3):
            z = rng.standard_normal(n)
            X[:, 5 * g:5 * g + 5] = (
                z[:, None] + _FACTOR_NOISE_SD * rng.standard_normal((n, 5))
            )
        X[:, 15:] = rng.standard_normal((n, p - 15))
        return X
    raise ConfigError(f"unknown correlation structure {struct!r}")


def generate_scenario(spec, rng=None):
    """Draw one train/test realization of a Gaussian scenario.

    Returns (X_train, y_train, X_test, y_test) with raw (unstandardized)
    predictors.  A "logit" link draws Bernoulli labels at the model
    probabilities; "identity" adds N(0, sigma^2) noise.
    """
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    beta = spec.beta
    if beta.shape != (spec.p,):
        raise ConfigError(
            f"beta pattern has {beta.shape[0]} entries, expected p={spec.p}"
        )
    X = _draw_design(rng, spec.n_train + spec.n_test, spec)
    eta = spec.intercept + X @ beta
    if spec.link == "identity":
        y = eta + spec.noise_sigma * rng.standard_normal(eta.shape[0])
    elif spec.link == "logit":
        pi = 1.0 / (1.0 + np.exp(-eta))
        y = (rng.random(eta.shape[0]) < pi).astype(np.float64)
    else:
        raise ConfigError(f"unknown link {spec.link!r}")
    ntr = spec.n_train
    return X[:ntr], y[:ntr], X[ntr:], y[ntr:]


@dataclass(frozen=True)
class GenotypeSpec:
    """SNP dosage simulation built from a haplotype pool with block LD.

    Default sizes keep p much larger than n at desk cost.  Note that the
    summed signal scales with ``n_causal`` (each causal SNP adds roughly
    effect^2 * dosage variance to Var(x'beta)), so studies that need the
    shrinkage-rule orderings to be resolvable should raise ``n_causal``
    toward the count of eligible SNPs rather than keep the causal fraction.
    """

    p: int = 2000
    n_train: int = 400
    n_test: int = 200
    n_causal: int = 20
    maf_range: tuple = (0.10, 0.15)
    effect_range: tuple = (0.05, 0.10)
    haplotype_pool_size: int = 1000
    ld_block_length: int = 10
    link: str = "identity"
    noise_sigma: float = 1.0
    intercept: float = -5.0
    seed: int = 0


@dataclass(frozen=True)
class GenotypeData:
    """One realized genotype dataset plus its generating pool."""

    X_train: np.ndarray
    X_test: np.ndarray
    beta: np.ndarray
    causal_indices: np.ndarray
    pool: np.ndarray


def _haplotype_pool(rng, size, p, block_length):
    """0/1 haplotypes whose alleles follow a latent AR chain within blocks."""
    freq = rng.uniform(0.05, 0.5, size=p)
    cut = ndtri(freq)  # latent threshold giving allele frequency freq
    pool = np.empty((size, p), dtype=np.float64)
    u = np.empty(size)
    carry = math.sqrt(1.0 - _HAPLO_AR * _HAPLO_AR)
    for j in range(p):
        fresh = rng.standard_normal(size)
        if j % block_length == 0:
            u = fresh
        else:
            u = _HAPLO_AR * u + carry * fresh
        pool[:, j] = (u < cut[j]).astype(np.float64)
    # guarantee two carriers of each allele so no SNP is monomorphic in the pool
    counts = pool.sum(axis=0)
    for j in np.flatnonzero(counts < 2):
        idx = rng.choice(size, size=2, replace=False)
        pool[idx, j] = 1.0
    for j in np.flatnonzero(counts > size - 2):
        idx = rng.choice(size, size=2, replace=False)
        pool[idx, j] = 0.0
    return pool


def _draw_dosages(pool, m, rng):
    a = rng.integers(0, pool.shape[0], size=m)
    b = rng.integers(0, pool.shape[0], size=m)
    return pool[a] + pool[b]


def generate_genotypes(spec, rng=None):
    """Build a haplotype pool, pick causal SNPs and draw train/test dosages.

    Each individual sums two pool haplotypes, giving dosages in {0, 1, 2}.
    Causal SNPs are drawn uniformly among pool SNPs whose minor allele
    frequency falls in ``maf_range``; effects are uniform on
    ``effect_range``.  Raises InsufficientEligibleSnps when the frequency
    window holds fewer SNPs than ``n_causal``.
    """
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    pool = _haplotype_pool(rng, spec.haplotype_pool_size, spec.p,
                           spec.ld_block_length)
    pf = pool.mean(axis=0)
    maf = np.minimum(pf, 1.0 - pf)
    lo, hi = spec.maf_range
    eligible = np.flatnonzero((maf >= lo) & (maf <= hi))
    if eligible.size < spec.n_causal:
        raise InsufficientEligibleSnps(
            f"{eligible.size} SNPs with MAF in [{lo}, {hi}], need {spec.n_causal}"
        )
    causal = np.sort(rng.choice(eligible, size=spec.n_causal, replace=False))
    elo, ehi = spec.effect_range
    beta = np.zeros(spec.p)
    beta[causal] = rng.uniform(elo, ehi, size=spec.n_causal)
    X_train = _draw_dosages(pool, spec.n_train, rng)
    X_test = _draw_dosages(pool, spec.n_test, rng)
    return GenotypeData(X_train, X_test, beta, causal, pool)


@dataclass(frozen=True)
class BinarySample:
    """Quota-sampled case/control data plus draw accounting."""

    X: np.ndarray
    y: np.ndarray
    draws: int
    cases_seen: int


def simulate_binary_outcomes(
    source, beta, n_cases, n_controls, intercept=-5.0, rng=None,
    max_draws=5_000_000, batch=4096,
):
    """Draw individuals until case and control quotas are both met.

    ``source`` is either a callable (m, rng) -> m-by-p rows producing fresh
    individuals, or a finite matrix consumed in row order.  Each drawn
    individual becomes a case with probability
    exp(intercept + x'beta) / (1 + exp(intercept + x'beta)); surplus draws
    beyond a filled quota are discarded.  Raises QuotaUnreachable when the
    budget (or a finite source) is exhausted first.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    beta = np.asarray(beta, dtype=np.float64)
    finite_pool = None
    offset = 0
    if not callable(source):
        finite_pool = np.asarray(source, dtype=np.float64)
        max_draws = min(max_draws, finite_pool.shape[0])
    cases, controls = [], []
    draws = 0
    cases_seen = 0
    while len(cases) < n_cases or len(controls) < n_controls:
        if draws >= max_draws:
            raise QuotaUnreachable(
                f"{len(cases)}/{n_cases} cases, {len(controls)}/{n_controls} "
                f"controls after {draws} draws"
            )
        m = min(batch, max_draws - draws)
        if finite_pool is not None:
            rows = finite_pool[offset:offset + m]
            offset += m
        else:
            rows = source(m, rng)
        draws += rows.shape[0]
        eta = intercept + rows @ beta
        pi = 1.0 / (1.0 + np.exp(-eta))
        is_case = rng.random(rows.shape[0]) < pi
        cases_seen += int(is_case.sum())
        for accept, bucket, quota in (
            (is_case, cases, n_cases),
            (~is_case, controls, n_controls),
        ):
            room = quota - len(bucket)
            if room > 0:
                picked = rows[accept][:room]
                bucket.extend(picked)
    X = np.vstack([np.asarray(v) for v in cases + controls])
    y = np.concatenate([np.ones(n_cases), np.zeros(n_controls)])
    return BinarySample(X=X, y=y, draws=draws, cases_seen=cases_seen)


def pse(y_true, y_pred):
    """Mean squared prediction error."""
    y_true = np.asarray(y_true, dtype=np.float64)
    y_pred = np.asarray(y_pred, dtype=np.float64)
    if y_true.shape != y_pred.shape:
        raise DimensionMismatch("prediction/truth length mismatch")
    d = y_true - y_pred
    return float(d @ d) / d.shape[0]


def classification_error(y_true, prob):
    """Mean 0/1 loss at the 0.5 rule; a probability of exactly 0.5 counts 1/2."""
    y_true = np.asarray(y_true, dtype=np.float64)
    prob = np.asarray(prob, dtype=np.float64)
    if y_true.shape != prob.shape:
        raise DimensionMismatch("prediction/truth length mismatch")
    pred = np.where(prob > 0.5, 1.0, 0.0)
    terms = np.where(prob == 0.5, 0.5, (pred != y_true).astype(np.float64))
    return float(terms.mean())


@dataclass(frozen=True)
class MetricReport:
    """Per-method summary over replicates; failed replicates carry NaN."""

    method: str
    metric: str
    values: tuple
    mean: float
    stderr: float
    n_replicates: int
    n_failed: int

    @classmethod
    def from_values(cls, method, metric, values):
        arr = np.asarray(values, dtype=np.float64)
        ok = arr[np.isfinite(arr)]
        mean = float(ok.mean()) if ok.size else float("nan")
        stderr = float(ok.std(ddof=1) / math.sqrt(ok.size)) if ok.size > 1 else float("nan")
        return cls(
            method=method,
            metric=metric,
            values=tuple(float(v) for v in arr),
            mean=mean,
            stderr=stderr,
            n_replicates=int(arr.size),
            n_failed=int(arr.size - ok.size),
        )


@dataclass
class ReplicateData:
    """Standardized train/test data shared by every method in a replicate."""

    dm: object
    eigen: object
    C: object
    X_test_std: np.ndarray
    y_train: np.ndarray
    y_test: np.ndarray
    kind: str
    rng: np.random.Generator


def generate_dataset(spec, rng=None):
    """Raw train/test draw for either spec family.

    Returns (X_train, y_train, X_test, y_test, beta_true, meta).  Binary
    genotype data is quota-sampled with equal cases and controls in each of
    the train and test sets (n_train and n_test must be even).
    """
    if not isinstance(spec, (ScenarioSpec, GenotypeSpec)):
        raise ConfigError(f"unknown spec type {type(spec).__name__}")
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    if isinstance(spec, ScenarioSpec):
        Xtr, ytr, Xte, yte = generate_scenario(spec, rng)
        return Xtr, ytr, Xte, yte, spec.beta, {"family": "scenario", "name": spec.name}
    data = generate_genotypes(spec, rng)
    meta = {
        "family": "genotype",
        "causal_indices": data.causal_indices.tolist(),
    }
    if spec.link == "identity":
        ytr = data.X_train @ data.beta + spec.noise_sigma * rng.standard_normal(spec.n_train)
        yte = data.X_test @ data.beta + spec.noise_sigma * rng.standard_normal(spec.n_test)
        return data.X_train, ytr, data.X_test, yte, data.beta, meta
    if spec.link != "logit":
        raise ConfigError(f"unknown link {spec.link!r}")
    if spec.n_train % 2 or spec.n_test % 2:
        raise ConfigError("binary sampling needs even n_train and n_test")

    def draw(m, r):
        return _draw_dosages(data.pool, m, r)

    train = simulate_binary_outcomes(
        draw, data.beta, spec.n_train // 2, spec.n_train // 2,
        intercept=spec.intercept, rng=rng,
    )
    test = simulate_binary_outcomes(
        draw, data.beta, spec.n_test // 2, spec.n_test // 2,
        intercept=spec.intercept, rng=rng,
    )
    meta["train_draws"] = train.draws
    meta["test_draws"] = test.draws
    return train.X, train.y, test.X, test.y, data.beta, meta


def _drop_constant_columns(Xtr, Xte):
    keep = Xtr.min(axis=0) < Xtr.max(axis=0)
    return Xtr[:, keep], Xte[:, keep], np.flatnonzero(keep)


def prepare_replicate(spec, rng):
    """Generate, clean and standardize one replicate for the method runners."""
    Xtr, ytr, Xte, yte, beta, _meta = generate_dataset(spec, rng)
    Xtr, Xte, _kept = _drop_constant_columns(Xtr, Xte)
    dm = standardize(Xtr)
    eigen = eigendecompose(dm)
    C = to_canonical(dm, eigen)
    kind = "logistic" if spec.link == "logit" else "linear"
    return ReplicateData(
        dm=dm, eigen=eigen, C=C, X_test_std=dm.transform(Xte),
        y_train=ytr, y_test=yte, kind=kind, rng=rng,
    )


def _ridge_linear_predict(ctx, k):
    fit = linear.fit_ridge(ctx.C, ctx.y_train, k)
    return linear.predict(fit, ctx.X_test_std)


def _method_runner(name):
    """Map a method string to a callable(ctx) -> test predictions."""
    base, _, arg = name.partition(":")
    if base == "ridge-doff":
        def run(ctx):
            if ctx.kind == "linear":
                sel = select.choose_r_doff(ctx.C, ctx.y_train)
                return _ridge_linear_predict(ctx, sel.k)
            _sel, fit = select.choose_r_doff_logistic(
                ctx.dm.values, ctx.y_train, ctx.C
            )
            return predict_proba(fit, ctx.X_test_std)
        return run
    if base == "ridge-press":
        folds = int(arg) if arg else 10
        def run(ctx):
            if ctx.kind == "linear":
                sel = select.choose_r_press(ctx.C, ctx.y_train, folds=folds)
                return _ridge_linear_predict(ctx, sel.k)
            _sel, fit = select.choose_r_press_logistic(
                ctx.dm.values, ctx.y_train, ctx.C, folds=folds
            )
            return predict_proba(fit, ctx.X_test_std)
        return run
    if base == "ridge-max":
        def run(ctx):
            t = ctx.C.t
            if ctx.kind == "linear":
                k = select.k_r(ctx.C, ctx.y_train, t)
                return _ridge_linear_predict(ctx, k)
            k = select._pclr_k(ctx.C, ctx.y_train, t)
            fit = clg_fit(ctx.dm.values, ctx.y_train, k)
            return predict_proba(fit, ctx.X_test_std)
        return run
    if base == "ridge-r":
        r = int(arg)
        def run(ctx):
            if ctx.kind == "linear":
                k = select.k_r(ctx.C, ctx.y_train, r)
                return _ridge_linear_predict(ctx, k)
            k = select._pclr_k(ctx.C, ctx.y_train, r)
            fit = clg_fit(ctx.dm.values, ctx.y_train, k)
            return predict_proba(fit, ctx.X_test_std)
        return run
    if base == "ridge-k":
        k = float(arg)
        def run(ctx):
            if ctx.kind == "linear":
                return _ridge_linear_predict(ctx, k)
            fit = clg_fit(ctx.dm.values, ctx.y_train, k)
            return predict_proba(fit, ctx.X_test_std)
        return run
    if base == "pcr":
        r = int(arg)
        def run(ctx):
            if ctx.kind == "linear":
                fit = baselines.fit_pcr(ctx.C, ctx.y_train, r)
                return fit.intercept + ctx.X_test_std @ fit.beta
            fit = baselines.fit_pclr(ctx.C, ctx.y_train, r)
            eta = fit.intercept + ctx.X_test_std @ fit.beta
            return 1.0 / (1.0 + np.exp(-np.clip(eta, -500, 500)))
        return run
    if base == "univariate":
        proportion = float(arg)
        def run(ctx):
            screen = baselines.univariate_screen(ctx.dm, ctx.y_train, kind=ctx.kind)
            fit = baselines.fit_selected_multiple(
                ctx.dm, ctx.y_train, screen, proportion=proportion
            )
            if ctx.kind == "linear":
                return fit.predict(ctx.X_test_std)
            return fit.predict_proba(ctx.X_test_std)
        return run
    if base == "mean":
        def run(ctx):
            const = float(np.mean(ctx.y_train))
            return np.full(ctx.y_test.shape[0], const)
        return run
    raise ConfigError(f"unknown method {name!r}")


def run_comparison(methods, spec, replicates=10, master_seed=None):
    """Replay every method over seeded replicates of one spec.

    Per-replicate seeds are spawned deterministically from the master seed
    (default: spec.seed).  A method failure inside a replicate is recorded
    as NaN for that method, never fatal.
    """
    runners = [(name, _method_runner(name)) for name in methods]
    seed = spec.seed if master_seed is None else master_seed
    children = np.random.SeedSequence(seed).spawn(replicates)
    values = {name: [] for name, _ in runners}
    for child in children:
        ctx = prepare_replicate(spec, np.random.default_rng(child))
        for name, run in runners:
            try:
                pred = run(ctx)
                if ctx.kind == "linear":
                    score = pse(ctx.y_test, pred)
                else:
                    score = classification_error(ctx.y_test, pred)
            except PcridgeError:
                score = float("nan")
            values[name].append(score)
    metric = "ce" if spec.link == "logit" else "pse"
    return [
        MetricReport.from_values(name, metric, values[name])
        for name, _ in runners
    ]


def run_hkb_comparison(X, snr_grid, replicates=1000, beta_norm2=None, seed=0):
    """Coefficient-error contest between k_r (each r) and the classic estimate.

    On a fixed full-rank design, replicates draw a coefficient vector of
    fixed squared length (default p) uniformly over directions, set the
    noise variance from the target signal-to-noise ratio
    ||X beta||^2 / (n sigma^2), and fit ridge at k_r for every r and at the
    classic k.  Returns {snr: win fraction array over r = 1..p} where a win
    is a strictly smaller squared coefficient error and exact ties count
    one half (at r = p the two estimators coincide, giving 0.5).
    """
    dm = standardize(np.asarray(X, dtype=np.float64))
    eigen = eigendecompose(dm)
    C = to_canonical(dm, eigen)
    n, p = dm.n, dm.p
    if p >= n or eigen.t < p:
        raise UndefinedEstimator("needs a full-rank design with n > p")
    L = float(p) if beta_norm2 is None else float(beta_norm2)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    lam = eigen.eigenvalues
    out = {}
    for snr in snr_grid:
        wins = np.zeros(p)
        for _ in range(replicates):
            b = rng.standard_normal(p)
            b *= math.sqrt(L / float(b @ b))
            signal = dm.values @ b
            sigma = math.sqrt(float(signal @ signal) / (n * snr))
            y = signal + sigma * rng.standard_normal(n)
            yc = y - y.mean()
            alpha = (C.Z.T @ yc) / lam
            fit_err = yc - C.Z @ alpha
            rss_left = float(fit_err @ fit_err)
            # exact k_r for every r via suffix residuals
            mses = np.empty(p)
            k_vals = np.empty(p)
            for r in range(1, p + 1):
                ar = alpha[:r]
                tail = alpha[r:]
                rss = rss_left + float(np.sum(lam[r:] * tail * tail))
                k = r * (rss / (n - r)) / float(ar @ ar)
                k_vals[r - 1] = k
                bh = eigen.Q @ ((lam / (lam + k)) * alpha)
                d = bh - b
                mses[r - 1] = float(d @ d)
            mse_classic = mses[p - 1]  # k_p equals the classic estimate
            wins += np.where(
                mses < mse_classic, 1.0, np.where(mses == mse_classic, 0.5, 0.0)
            )
        out[snr] = wins / replicates
    return out


def thin_predictors(X, stride_or_indices):
    """Keep every stride-th column (or an explicit index list).

    Returns (X_thin, indices); the index map lets a final fit use every
    column after the shrinkage parameter was chosen on the thinned set.
    """
    X = np.asarray(X)
    if X.ndim != 2:
        raise DimensionMismatch(f"X must be 2-d, got shape {X.shape}")
    if np.isscalar(stride_or_indices):
        stride = int(stride_or_indices)
        if stride < 1:
            raise ConfigError(f"stride must be >= 1, got {stride}")
        idx = np.arange(0, X.shape[1], stride)
    else:
        idx = np.asarray(stride_or_indices, dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= X.shape[1]):
            raise DimensionMismatch("column index out of range")
    return X[:, idx], idx
