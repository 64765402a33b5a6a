"""Copula algebra, stationary chain sampling, mixing bounds, and a robust
mean study driven by those chains."""

from .chains import (
    ChainSample,
    Marginal,
    Normal,
    Uniform01,
    apply_marginal,
    chain_to_csv,
    sample_chain,
    sample_iid_normal,
    uniform_chain_matrix,
)
from .config import (
    ExperimentConfig,
    Perturbation,
    default_study_config,
    load_config,
    parse_config,
)
from .copulas import (
    PI,
    M,
    W,
    Amh,
    AxiomReport,
    Comonotone,
    Convex,
    Copula,
    Countermonotone,
    DensityGrid,
    Fgm,
    Frechet,
    Gaussian,
    Independence,
    Mardia,
    NumericFold,
    cdf,
    check_copula_axioms,
    conditional_cdf,
    density,
    density_grid,
    fold,
    from_dict,
    n_fold,
    perturb_m,
    perturb_pi,
    Rect,
    rectangle_probability,
    reflect_u,
    reflect_v,
    to_dict,
)
from .errors import (
    ConfigError,
    CopulamixError,
    DegenerateSampleError,
    DensityUnavailableError,
    DomainError,
    EvaluationError,
    FoldDepthError,
    UnsupportedCopulaError,
)
from .mixing import (
    EpsDecomposition,
    Finding,
    MixingReport,
    MixingVerdict,
    classify,
    corner_divergence_scan,
    density_extrema,
    fgm_psi_bounds,
    lag_report,
    psi_prime_lower_bound,
    verify_eps_decomposition,
)
from .robust import (
    RobustMeanResult,
    VarianceDiagnostic,
    bandwidth,
    coverage_experiment,
    marginal_mean,
    population_bandwidth,
    replicate_robust_means,
    results_to_csv,
    robust_mean,
    variance_diagnostic,
)
from .rng import derive_seed, open_uniform, stream

__version__ = "0.1.0"

__all__ = [
    "Amh",
    "AxiomReport",
    "ChainSample",
    "Comonotone",
    "ConfigError",
    "Convex",
    "Copula",
    "CopulamixError",
    "Countermonotone",
    "DegenerateSampleError",
    "DensityGrid",
    "DensityUnavailableError",
    "DomainError",
    "EpsDecomposition",
    "EvaluationError",
    "ExperimentConfig",
    "Fgm",
    "Finding",
    "FoldDepthError",
    "Frechet",
    "Gaussian",
    "Independence",
    "M",
    "Mardia",
    "Marginal",
    "MixingReport",
    "MixingVerdict",
    "Normal",
    "NumericFold",
    "PI",
    "Perturbation",
    "Rect",
    "RobustMeanResult",
    "Uniform01",
    "UnsupportedCopulaError",
    "VarianceDiagnostic",
    "W",
    "apply_marginal",
    "bandwidth",
    "cdf",
    "chain_to_csv",
    "check_copula_axioms",
    "classify",
    "conditional_cdf",
    "corner_divergence_scan",
    "coverage_experiment",
    "default_study_config",
    "density",
    "density_extrema",
    "density_grid",
    "derive_seed",
    "fgm_psi_bounds",
    "fold",
    "from_dict",
    "lag_report",
    "load_config",
    "marginal_mean",
    "n_fold",
    "open_uniform",
    "parse_config",
    "perturb_m",
    "perturb_pi",
    "population_bandwidth",
    "psi_prime_lower_bound",
    "rectangle_probability",
    "results_to_csv",
    "reflect_u",
    "reflect_v",
    "replicate_robust_means",
    "robust_mean",
    "sample_chain",
    "sample_iid_normal",
    "stream",
    "to_dict",
    "uniform_chain_matrix",
    "variance_diagnostic",
]
