"""Principal-component guided ridge regression.

Shrinkage estimation for linear and logistic ridge models where the ridge
parameter k is derived from the leading principal components of the
standardized design, with data-driven rules for how many components to
trust, exact degrees-of-freedom accounting, baseline estimators and a
seeded simulation harness.
"""

from . import errors
from ._kernels import NUMBA_ENABLED, backend_name
from .baselines import (
    PcrFit,
    SelectedFit,
    UnivariateScreen,
    fit_pclr,
    fit_pcr,
    fit_selected_multiple,
    univariate_screen,
)
from .errors import PcridgeError, ZeroSignalWarning
from .linalg import (
    CanonicalModel,
    DesignMatrix,
    EigenSystem,
    back_transform,
    eigendecompose,
    standardize,
    to_canonical,
)
from .linear import (
    DfTriple,
    PseParts,
    RidgeFit,
    df_triple,
    fit_ridge,
    ols_canonical,
    predict,
    pse_decomposition,
    solve_k_for_df,
)
from .logistic import (
    LogisticRidgeFit,
    clg_fit,
    curvature_bound,
    logistic_df_triple,
    logistic_hat_df,
    penalized_loglik,
    predict_proba,
)
from .select import (
    KSelection,
    ScanRow,
    choose_r_doff,
    choose_r_doff_logistic,
    choose_r_press,
    choose_r_press_logistic,
    k_hkb,
    k_r,
    k_r_logistic,
    k_schaefer,
)
from .simulate import (
    GenotypeSpec,
    MetricReport,
    ScenarioSpec,
    classification_error,
    generate_dataset,
    generate_genotypes,
    generate_scenario,
    pse,
    run_comparison,
    run_hkb_comparison,
    scenario_table,
    simulate_binary_outcomes,
    thin_predictors,
)

__version__ = "0.1.0"

__all__ = [
    "errors",
    "PcridgeError",
    "ZeroSignalWarning",
    "NUMBA_ENABLED",
    "backend_name",
    "DesignMatrix",
    "EigenSystem",
    "CanonicalModel",
    "standardize",
    "eigendecompose",
    "to_canonical",
    "back_transform",
    "DfTriple",
    "RidgeFit",
    "PseParts",
    "ols_canonical",
    "fit_ridge",
    "df_triple",
    "solve_k_for_df",
    "pse_decomposition",
    "predict",
    "LogisticRidgeFit",
    "clg_fit",
    "curvature_bound",
    "penalized_loglik",
    "logistic_hat_df",
    "logistic_df_triple",
    "predict_proba",
    "ScanRow",
    "KSelection",
    "k_r",
    "k_hkb",
    "k_schaefer",
    "k_r_logistic",
    "choose_r_doff",
    "choose_r_press",
    "choose_r_doff_logistic",
    "choose_r_press_logistic",
    "PcrFit",
    "fit_pcr",
    "fit_pclr",
    "UnivariateScreen",
    "univariate_screen",
    "SelectedFit",
    "fit_selected_multiple",
    "ScenarioSpec",
    "GenotypeSpec",
    "scenario_table",
    "generate_scenario",
    "generate_genotypes",
    "generate_dataset",
    "simulate_binary_outcomes",
    "run_comparison",
    "run_hkb_comparison",
    "thin_predictors",
    "pse",
    "classification_error",
    "MetricReport",
    "__version__",
]
