"""Posterior projection onto control subsets for linear exposure models.

Fits a flat-prior or shrinkage-prior posterior for an exposure effect with
many controls, then summarizes what happens to that posterior when controls
are removed: draw-wise projection, refit comparison, backward elimination
paths, and an HTTP service over a saved draw artifact.
"""
from .analytic import (
    fit_flat_posterior,
    project_gaussian,
    refit_gaussian,
    refit_sigma,
    sample_flat_posterior,
    tau_marginal_original,
    tau_marginal_projected,
    variance_difference,
    verify_appendix_identities,
)
from .artifact import Artifact, load_artifact, save_artifact
from .data import ControlSubset, Dataset, GaussianPosterior, PosteriorDraws, load_dataset
from .errors import (
    ConfigError,
    DivergenceError,
    InsufficientDrawsError,
    NumericalError,
    ParseError,
    PathError,
    ProjpostError,
    RankError,
    SchemaError,
)
from .projector import (
    ProjectionOperator,
    StepwisePath,
    TauSummary,
    backward_stepwise,
    build_operator,
    diff_mean,
    project_draws,
)
from .sampler import (
    RicDraws,
    SamplerConfig,
    geweke_zscores,
    gibbs_ric,
    ric_to_standard,
    summarize_draws,
)
from .simgen import PopulationSpec, gen_sim, gen_toy, population_lambda, population_projection

__version__ = "0.1.0"

__all__ = [
    "Artifact",
    "ConfigError",
    "ControlSubset",
    "Dataset",
    "DivergenceError",
    "GaussianPosterior",
    "InsufficientDrawsError",
    "NumericalError",
    "ParseError",
    "PathError",
    "PopulationSpec",
    "PosteriorDraws",
    "ProjectionOperator",
    "ProjpostError",
    "RankError",
    "RicDraws",
    "SamplerConfig",
    "SchemaError",
    "StepwisePath",
    "TauSummary",
    "backward_stepwise",
    "build_operator",
    "diff_mean",
    "fit_flat_posterior",
    "gen_sim",
    "gen_toy",
    "geweke_zscores",
    "gibbs_ric",
    "load_artifact",
    "load_dataset",
    "population_lambda",
    "population_projection",
    "project_draws",
    "project_gaussian",
    "refit_gaussian",
    "refit_sigma",
    "ric_to_standard",
    "sample_flat_posterior",
    "save_artifact",
    "summarize_draws",
    "tau_marginal_original",
    "tau_marginal_projected",
    "variance_difference",
    "verify_appendix_identities",
]
