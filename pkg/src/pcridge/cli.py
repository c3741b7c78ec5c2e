"""Command line entry point.

Five subcommands: ``fit`` estimates a ridge (or logistic ridge) model with
an automatically chosen shrinkage parameter and writes a JSON artifact;
``predict`` applies an artifact to new rows; ``trace`` tabulates the full
candidate scan behind the selection rule; ``simulate`` materializes a
seeded dataset from a config; ``compare`` replays several methods over
replicates and reports held-out error.

Results go to files, progress notes to stderr.  Exit codes: 0 success,
2 usage/config, 3 unreadable input or artifact, 4 shape mismatch,
6 degenerate data (separation, unreachable quotas, ...), 5 other domain
errors.
"""

import argparse
import json
import os
import sys
import warnings

import numpy as np

from . import io as pio
from . import linear, select
from . import simulate as sim
from .errors import (
    ArtifactError,
    ConfigError,
    DegenerateWeights,
    DimensionMismatch,
    EmptyFile,
    InsufficientEligibleSnps,
    ParseError,
    PcridgeError,
    QuotaUnreachable,
    RaggedRows,
    Separation,
    TooManySelected,
    ZeroNorm,
    ZeroSignalWarning,
)
from .linalg import eigendecompose, standardize, to_canonical
from .logistic import (
    DEFAULT_EPSILON,
    DEFAULT_MAX_SWEEPS,
    clg_fit,
    logistic_df_triple,
    predict_proba,
)

_DEGENERATE = (
    Separation,
    DegenerateWeights,
    TooManySelected,
    InsufficientEligibleSnps,
    QuotaUnreachable,
)
_UNREADABLE = (ParseError, RaggedRows, EmptyFile, ArtifactError)


def _exit_code(exc):
    if isinstance(exc, ConfigError):
        return 2
    if isinstance(exc, (_UNREADABLE, OSError)):
        return 3
    if isinstance(exc, DimensionMismatch):
        return 4
    if isinstance(exc, _DEGENERATE):
        return 6
    return 5


def _note(msg):
    print(msg, file=sys.stderr)


def _load_xy(args):
    X = pio.load_matrix(args.x, args.format)
    y = pio.load_vector(args.y, args.format)
    if X.shape[0] != y.shape[0]:
        raise DimensionMismatch(
            f"X has {X.shape[0]} rows but y has {y.shape[0]}"
        )
    return X, y


def _infer_kind(args, y):
    if getattr(args, "linear", False):
        return "linear"
    if getattr(args, "logistic", False):
        return "logistic"
    return "logistic" if np.isin(y, (0.0, 1.0)).all() else "linear"


def _sweep_params(args):
    eps = DEFAULT_EPSILON if args.epsilon is None else args.epsilon
    ms = DEFAULT_MAX_SWEEPS if args.max_sweeps is None else args.max_sweeps
    return eps, ms


def _selection_rows(diagnostics):
    return [
        {"r": row.r, "k": row.k, "df_variance": row.df_variance,
         "criterion": row.criterion}
        for row in diagnostics
    ]


def cmd_fit(args):
    X, y = _load_xy(args)
    kind = _infer_kind(args, y)
    eps, ms = _sweep_params(args)
    rng = np.random.default_rng(args.seed)

    if args.stride > 1:
        X_sel, _ = sim.thin_predictors(X, args.stride)
        _note(f"selection on {X_sel.shape[1]} of {X.shape[1]} columns "
              f"(stride {args.stride})")
    else:
        X_sel = X
    dm_sel = standardize(X_sel)
    eig_sel = eigendecompose(dm_sel)
    C_sel = to_canonical(dm_sel, eig_sel)

    warm_fit = None
    diagnostics = ()
    if args.k is not None:
        rule, r_chosen, k = "fixed-k", None, float(args.k)
    elif args.r is not None:
        rule, r_chosen = "fixed-r", int(args.r)
        if kind == "linear":
            k = select.k_r(C_sel, y, r_chosen)
        else:
            k = select._pclr_k(C_sel, y, r_chosen)
    elif kind == "linear":
        if args.rule == "doff":
            sel = select.choose_r_doff(C_sel, y)
        else:
            sel = select.choose_r_press(C_sel, y, folds=args.folds, rng=rng)
        rule, r_chosen, k = sel.rule, sel.r_chosen, sel.k
        diagnostics = sel.diagnostics
    else:
        if args.rule == "doff":
            sel, warm_fit = select.choose_r_doff_logistic(
                dm_sel.values, y, C_sel, epsilon=eps, max_sweeps=ms
            )
        else:
            sel, warm_fit = select.choose_r_press_logistic(
                dm_sel.values, y, C_sel, folds=args.folds,
                epsilon=eps, max_sweeps=ms, rng=rng,
            )
        rule, r_chosen, k = sel.rule, sel.r_chosen, sel.k
        diagnostics = sel.diagnostics

    if args.stride > 1:
        dm = standardize(X)
        eig = eigendecompose(dm)
        C = to_canonical(dm, eig)
        warm_fit = None
    else:
        dm, eig, C = dm_sel, eig_sel, C_sel

    payload = {
        "kind": kind,
        "rule": rule,
        "k": k,
        "r_chosen": r_chosen,
        "n": dm.n,
        "p": dm.p,
        "rank": eig.t,
        "stride": args.stride,
        "folds": args.folds if rule == "press" else None,
        "seed": args.seed,
        "column_means": [float(v) for v in dm.column_means],
        "column_scales": [float(v) for v in dm.column_scales],
        "selection": _selection_rows(diagnostics),
    }
    if kind == "linear":
        fit = linear.fit_ridge(C, y, k)
        dfs = linear.df_triple(eig, k)
        beta_std, intercept_std = fit.beta, fit.intercept
        payload["sigma2_hat"] = fit.sigma2_hat
    else:
        fit = warm_fit if warm_fit is not None else clg_fit(
            dm.values, y, k, epsilon=eps, max_sweeps=ms
        )
        dfs = logistic_df_triple(dm.values, fit, k)
        beta_std, intercept_std = fit.beta, fit.intercept
        payload.update(
            iterations=fit.iterations,
            converged=bool(fit.converged),
            objective=float(fit.objective_history[-1]),
            epsilon=eps,
            max_sweeps=ms,
        )
    beta_orig = beta_std / dm.column_scales
    payload.update(
        beta_standardized=[float(v) for v in beta_std],
        beta=[float(v) for v in beta_orig],
        intercept=float(intercept_std - dm.column_means @ beta_orig),
        intercept_standardized=float(intercept_std),
        df={"trH": dfs.trH, "trHH": dfs.trHH, "tr2HmHH": dfs.tr2HmHH},
    )
    pio.write_artifact(args.output, payload)
    _note(f"{kind} fit: rule={rule} r={r_chosen} k={k:.6g} "
          f"df_variance={dfs.trHH:.3f} -> {args.output}")
    return 0


def cmd_predict(args):
    art = pio.read_artifact(args.artifact)
    for key in ("kind", "beta", "intercept"):
        if key not in art:
            raise ArtifactError(f"artifact lacks required field {key!r}")
    X = pio.load_matrix(args.x, args.format)
    beta = np.asarray(art["beta"], dtype=np.float64)
    if X.shape[1] != beta.shape[0]:
        raise DimensionMismatch(
            f"X has {X.shape[1]} columns but the fit used {beta.shape[0]}"
        )
    eta = art["intercept"] + X @ beta
    if art["kind"] == "logistic":
        prob = 1.0 / (1.0 + np.exp(-np.clip(eta, -500.0, 500.0)))
        labels = (prob > 0.5).astype(np.float64)
        pio.save_matrix(args.output, np.column_stack([prob, labels]),
                        header=["prob", "label"])
    else:
        pio.save_vector(args.output, eta, header="pred")
    if args.truth is not None:
        y = pio.load_vector(args.truth, args.format)
        if art["kind"] == "logistic":
            name, value = "ce", sim.classification_error(y, prob)
        else:
            name, value = "pse", sim.pse(y, eta)
        stem, _ = os.path.splitext(args.output)
        with open(stem + ".metrics.json", "w") as fh:
            json.dump({"metric": name, "value": value, "n": int(y.shape[0])},
                      fh, indent=2, sort_keys=True)
            fh.write("\n")
        print(f"{name} {value:.10g}")
    return 0


def _write_trace(path, rows, chosen_r):
    header = ["r", "k", "df_variance", "df_effective", "criterion", "chosen"]
    table = [
        [row["r"], row["k"], row["df_variance"], row["df_effective"],
         row["criterion"], 1.0 if row["r"] == chosen_r else 0.0]
        for row in rows
    ]
    pio.save_matrix(path, np.asarray(table, dtype=np.float64), header=header)


def cmd_trace(args):
    X, y = _load_xy(args)
    kind = _infer_kind(args, y)
    eps, ms = _sweep_params(args)
    dm = standardize(X)
    eig = eigendecompose(dm)
    C = to_canonical(dm, eig)
    m = min(args.snapshot_cols, dm.p)
    rows, snaps = [], []
    if kind == "linear":
        sel = select.choose_r_doff(C, y)
        for row in sel.diagnostics:
            if np.isfinite(row.k):
                dfs = linear.df_triple(eig, row.k)
                fit = linear.fit_ridge(C, y, row.k)
                trH = dfs.trH
                snaps.append([row.r] + [float(v) for v in fit.beta[:m]])
            else:
                trH = 0.0
            rows.append({"r": row.r, "k": row.k, "df_variance": row.df_variance,
                         "df_effective": trH, "criterion": row.criterion})
        chosen = sel.r_chosen
    else:
        best_r, best_crit = None, float("inf")
        warm_beta, warm_b0 = None, 0.0
        for r in range(1, C.t):
            try:
                k = select._pclr_k(C, y, r)
            except (Separation, ZeroNorm):
                rows.append({"r": r, "k": float("inf"), "df_variance": 0.0,
                             "df_effective": 0.0, "criterion": float("inf")})
                continue
            fit = clg_fit(dm.values, y, k, epsilon=eps, max_sweeps=ms,
                          beta0=warm_beta, intercept0=warm_b0)
            warm_beta, warm_b0 = fit.beta, fit.intercept
            dfs = logistic_df_triple(dm.values, fit, k)
            crit = abs(dfs.trHH - r)
            rows.append({"r": r, "k": k, "df_variance": dfs.trHH,
                         "df_effective": dfs.trH, "criterion": crit})
            snaps.append([r] + [float(v) for v in fit.beta[:m]])
            if crit < best_crit:
                best_r, best_crit = r, crit
        if best_r is None:
            raise Separation("no candidate r admitted a finite shrinkage estimate")
        chosen = best_r
    _write_trace(args.output, rows, chosen)
    stem, ext = os.path.splitext(args.output)
    coef_path = stem + "_coefs" + (ext or ".csv")
    pio.save_matrix(coef_path, np.asarray(snaps, dtype=np.float64),
                    header=["r"] + [f"c{j + 1}" for j in range(m)])
    _note(f"{len(rows)} candidates, chose r={chosen} -> {args.output}, {coef_path}")
    return 0


def cmd_simulate(args):
    spec = pio.spec_from_config(pio.parse_config(args.config))
    if args.seed is not None:
        spec = spec.__class__(**{**spec.__dict__, "seed": args.seed})
    os.makedirs(args.out_dir, exist_ok=True)
    Xtr, ytr, Xte, yte, beta, meta = sim.generate_dataset(spec)
    paths = {}
    for name, arr in (
        ("X_train", Xtr), ("y_train", ytr), ("X_test", Xte),
        ("y_test", yte), ("beta_true", beta),
    ):
        path = os.path.join(args.out_dir, name + ".csv")
        if arr.ndim == 1:
            pio.save_vector(path, arr)
        else:
            pio.save_matrix(path, arr)
        paths[name] = path
    meta.update(
        spec={**spec.__dict__},
        n_train=int(Xtr.shape[0]),
        n_test=int(Xte.shape[0]),
        p=int(Xtr.shape[1]),
    )
    with open(os.path.join(args.out_dir, "meta.json"), "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True, default=list)
        fh.write("\n")
    _note(f"wrote {', '.join(sorted(paths))} and meta.json -> {args.out_dir}")
    return 0


def cmd_compare(args):
    spec = pio.spec_from_config(pio.parse_config(args.config))
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    if not methods:
        raise ConfigError("no methods given")
    reports = sim.run_comparison(
        methods, spec, replicates=args.replicates, master_seed=args.seed
    )
    with open(args.output, "w") as fh:
        fh.write("method,metric,mean,stderr,replicates,failed,values\n")
        for rep in reports:
            vals = "|".join(f"{v:.10g}" for v in rep.values)
            fh.write(
                f"{rep.method},{rep.metric},{rep.mean:.10g},{rep.stderr:.10g},"
                f"{rep.n_replicates},{rep.n_failed},{vals}\n"
            )
    for rep in reports:
        _note(f"{rep.method}: {rep.metric}={rep.mean:.6g} (se {rep.stderr:.2g},"
              f" {rep.n_failed} failed)")
    _note(f"-> {args.output}")
    return 0


def _add_common_fit_args(p):
    p.add_argument("x", help="predictor matrix (csv or whitespace table)")
    p.add_argument("y", help="response vector")
    kind = p.add_mutually_exclusive_group()
    kind.add_argument("--linear", action="store_true",
                      help="force a continuous-response model")
    kind.add_argument("--logistic", action="store_true",
                      help="force a binary-response model")
    p.add_argument("--format", choices=("auto", "csv", "ws"), default="auto")
    p.add_argument("--epsilon", type=float, default=None,
                   help="logistic sweep convergence tolerance")
    p.add_argument("--max-sweeps", type=int, default=None,
                   help="logistic sweep budget")
    p.add_argument("--seed", type=int, default=0)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pcridge",
        description="principal-component guided ridge regression",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a model with data-chosen shrinkage")
    _add_common_fit_args(p)
    p.add_argument("--rule", choices=("doff", "press"), default="doff",
                   help="selection rule for the component count")
    p.add_argument("--r", type=int, default=None,
                   help="fix the component count instead of selecting it")
    p.add_argument("--k", type=float, default=None,
                   help="fix the shrinkage parameter directly")
    p.add_argument("--folds", type=int, default=10,
                   help="cross-validation folds for the press rule")
    p.add_argument("--stride", type=int, default=1,
                   help="choose k on every stride-th column, then fit on all")
    p.add_argument("-o", "--output", default="fit.json")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("predict", help="apply a fit artifact to new rows")
    p.add_argument("artifact", help="fit artifact from the fit command")
    p.add_argument("x", help="predictor matrix")
    p.add_argument("--truth", default=None,
                   help="response vector; writes <output stem>.metrics.json")
    p.add_argument("--format", choices=("auto", "csv", "ws"), default="auto")
    p.add_argument("-o", "--output", default="predictions.csv")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("trace", help="tabulate the full candidate scan")
    _add_common_fit_args(p)
    p.add_argument("--snapshot-cols", type=int, default=100,
                   help="coefficients per row in the snapshot table")
    p.add_argument("-o", "--output", default="trace.csv")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("simulate", help="materialize a dataset from a config")
    p.add_argument("config", help="key=value config file")
    p.add_argument("--seed", type=int, default=None,
                   help="override the config seed")
    p.add_argument("-o", "--out-dir", default="simdata")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="replay methods over seeded replicates")
    p.add_argument("config", help="key=value config file")
    p.add_argument("--methods",
                   default="ridge-doff,ridge-press,ridge-max",
                   help="comma-separated method names")
    p.add_argument("--replicates", type=int, default=10)
    p.add_argument("--seed", type=int, default=None,
                   help="master seed (default: the config seed)")
    p.add_argument("-o", "--output", default="report.csv")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ZeroSignalWarning)
            return args.func(args)
    except (PcridgeError, OSError) as exc:
        _note(f"error: {exc}")
        return _exit_code(exc)


if __name__ == "__main__":
    sys.exit(main())
