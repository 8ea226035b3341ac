"""Estimation of k-component Gaussian location mixtures.

The package provides the two-stage mixing-distribution estimator (PCA reduction
plus denoised method of moments), moment-tensor diagnostics, proper density
estimators, an EM baseline, and a seeded benchmark harness with a CLI.
"""

from .distributions import (DiscreteDistribution, GaussianMixture, sample,
                            sliced_w1, w1_1d, w1_exact, w2_exact)
from .moments import MomentSpaceError, MomentVector, dmm_1d, project_to_moment_space
from .mixing import estimate, estimate_low_dim
from .density import density_estimate_2gm, density_estimate_kgm, evaluate_density
from .em import em_fit, log_likelihood
from .tensors import (MomentTensor, frob_dist_max, hellinger_mc, moment_tensor,
                      moment_hellinger_report, operator_norm)
from .bench import ExperimentConfig, ResultRecord, run_experiment, summarize

__all__ = [
    "DiscreteDistribution", "GaussianMixture", "MomentVector", "MomentTensor",
    "MomentSpaceError", "ExperimentConfig", "ResultRecord",
    "sample", "w1_1d", "w1_exact", "w2_exact", "sliced_w1",
    "dmm_1d", "project_to_moment_space",
    "estimate", "estimate_low_dim",
    "density_estimate_2gm", "density_estimate_kgm", "evaluate_density",
    "em_fit", "log_likelihood",
    "moment_tensor", "frob_dist_max", "operator_norm", "hellinger_mc",
    "moment_hellinger_report",
    "run_experiment", "summarize",
]

__version__ = "0.1.0"
