"""Fisher information, Cramer-Rao experiments and the root density estimator."""

from .families import (
    FAMILY_IDS,
    FisherMatrix,
    InadmissibleTheta,
    NonIntegrableScore,
    ParametricFamily,
    ZeroFisher,
    biased_bound,
    fisher_theta,
    gaussian_location,
    gaussian_location_scale,
    make_family,
    root_family,
)
from .montecarlo import (
    ESTIMATOR_IDS,
    BiasedEstimatorForUnbiasedBound,
    CRReport,
    cramer_rao_experiment,
    statistical_tolerance,
)
from .root import (
    DegenerateDensity,
    DidNotConverge,
    FitDiagnostics,
    RootModel,
    SampleOutOfSupport,
    fit_root,
    root_covariance,
    root_fisher,
    root_log_likelihood,
)
from .sampling import EstimationError, Sample, rng_for, sample_from_state

__all__ = [
    "FAMILY_IDS",
    "ESTIMATOR_IDS",
    "BiasedEstimatorForUnbiasedBound",
    "CRReport",
    "DegenerateDensity",
    "DidNotConverge",
    "EstimationError",
    "FisherMatrix",
    "FitDiagnostics",
    "InadmissibleTheta",
    "NonIntegrableScore",
    "ParametricFamily",
    "RootModel",
    "Sample",
    "SampleOutOfSupport",
    "ZeroFisher",
    "biased_bound",
    "cramer_rao_experiment",
    "fisher_theta",
    "fit_root",
    "gaussian_location",
    "gaussian_location_scale",
    "make_family",
    "rng_for",
    "root_covariance",
    "root_family",
    "root_fisher",
    "root_log_likelihood",
    "sample_from_state",
    "statistical_tolerance",
]
