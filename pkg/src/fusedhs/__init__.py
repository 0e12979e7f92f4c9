"""Gibbs samplers for Bayesian sparse-and-fused linear regression.

Four samplers over the same Gaussian linear model: the Bayesian lasso
(``blasso``), the Bayesian fused lasso (``bfl``), and two fusion samplers
that place horseshoe shrinkage on coefficient differences — successive
differences (``bfh``) or all pairwise differences with a fixed global scale
selected by WAIC (``bhh``). Includes posterior summaries, WAIC, LOOCV, a
synthetic replication benchmark, and a CLI (``fusedhs``).
"""

from .data import (
    Dataset,
    StandardizedDataset,
    destandardize_coefficients,
    load_csv,
    predict,
    standardize,
    write_dataset_csv,
)
from .errors import (
    ConfigError,
    DataError,
    FusedhsError,
    InsufficientDrawsError,
    NumericalSingularityError,
    ParameterError,
)
from .inference import (
    Estimate,
    LoocvResult,
    ModelScore,
    compute_waic,
    default_tuning_grid,
    loocv,
    select_tuning,
    summarize,
)
from .models import (
    MODELS,
    BaselineChainState,
    FusedChainState,
    HorsesChainState,
    PosteriorDraws,
    SamplerConfig,
    bfh_step,
    bfl_step,
    bhh_step,
    blasso_step,
    init_state,
    run_chain,
    sigma2_shape_count,
)
from .rng import RngStream
from .simulation import (
    MetricsReport,
    SimulationCaseSpec,
    generate_case,
    make_case,
    mse,
    mse_diff,
    nonzero_difference_pairs,
    pse,
    run_benchmark,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "MODELS",
    "RngStream",
    "Dataset",
    "StandardizedDataset",
    "load_csv",
    "write_dataset_csv",
    "standardize",
    "predict",
    "destandardize_coefficients",
    "SamplerConfig",
    "BaselineChainState",
    "FusedChainState",
    "HorsesChainState",
    "PosteriorDraws",
    "init_state",
    "blasso_step",
    "bfl_step",
    "bfh_step",
    "bhh_step",
    "sigma2_shape_count",
    "run_chain",
    "Estimate",
    "ModelScore",
    "LoocvResult",
    "summarize",
    "compute_waic",
    "default_tuning_grid",
    "select_tuning",
    "loocv",
    "SimulationCaseSpec",
    "make_case",
    "generate_case",
    "nonzero_difference_pairs",
    "mse",
    "mse_diff",
    "pse",
    "MetricsReport",
    "run_benchmark",
    "FusedhsError",
    "ParameterError",
    "ConfigError",
    "DataError",
    "InsufficientDrawsError",
    "NumericalSingularityError",
]
