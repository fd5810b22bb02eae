"""Power-index divergences and Tweedie dispersion models.

One real number p ties together a variance function mu**p, a pair of
divergences (beta via the Bregman construction, alpha via the Csiszar f
construction, both from the same convex generator), a density whose
log-likelihood kernel is the beta divergence itself, and therefore a way
to pick the divergence that best matches data: fit p by maximum likelihood.
"""

from .divergences import (
    CORRESPONDENCE_TABLE,
    ConvexGenerator,
    CorrespondenceRow,
    ModelClass,
    PowerIndex,
    alpha_divergence,
    alpha_dual_index,
    beta_divergence,
    beta_divergence_mu_gradient,
    beta_from_alpha,
    bregman,
    classify,
    dual_cumulant,
    f_divergence,
    power_generator,
    q_convention,
)
from .errors import DataFormatError, DomainError, SeriesError

__version__ = "0.1.0"

from .tweedie import (  # noqa: E402  (errors/divergences must load first)
    CanonicalPair,
    DensityEval,
    DensityMethod,
    TweedieParams,
    canonical_pair,
    cumulant,
    cumulant_at_mu,
    log_densities,
    log_density,
    mu_of_theta,
    scale_transform,
    theta_of_mu,
    unit_deviance,
    variance_function,
)
from .sampling import SamplerConfig, compound_poisson_zero_mass, sample, sample_scaled_pair
from .estimation import (
    Dataset,
    FitResult,
    ProfilePoint,
    default_p_grid,
    deviance_profile,
    feasible_p,
    fit,
    fit_mu,
    log_likelihood,
)

__all__ = [
    "CORRESPONDENCE_TABLE",
    "ConvexGenerator",
    "CorrespondenceRow",
    "ModelClass",
    "PowerIndex",
    "alpha_divergence",
    "alpha_dual_index",
    "beta_divergence",
    "beta_divergence_mu_gradient",
    "beta_from_alpha",
    "bregman",
    "classify",
    "dual_cumulant",
    "f_divergence",
    "power_generator",
    "q_convention",
    "DataFormatError",
    "DomainError",
    "SeriesError",
    "CanonicalPair",
    "DensityEval",
    "DensityMethod",
    "TweedieParams",
    "canonical_pair",
    "cumulant",
    "cumulant_at_mu",
    "log_densities",
    "log_density",
    "mu_of_theta",
    "scale_transform",
    "theta_of_mu",
    "unit_deviance",
    "variance_function",
    "SamplerConfig",
    "compound_poisson_zero_mass",
    "sample",
    "sample_scaled_pair",
    "Dataset",
    "FitResult",
    "ProfilePoint",
    "default_p_grid",
    "deviance_profile",
    "feasible_p",
    "fit",
    "fit_mu",
    "log_likelihood",
    "__version__",
]
