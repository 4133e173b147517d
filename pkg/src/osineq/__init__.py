"""Linear order-statistic inequality indices.

Population indices of the form ``sum_k a_k E[X_{k:m}] / (m * mean)``, their
exact and approximate sample estimators, rank-level finite-sample bias
analysis via Monte Carlo and Laplace-transform integration, and a
reproducible simulation harness for bias/RMSE tables.
"""

from .distributions import (Degenerate, Distribution, Exponential, Gamma,
                            LogNormal, Lomax, Uniform, Weibull,
                            order_stat_mean, order_stat_mean_mc,
                            parse_distribution)
from .weights import (WeightScheme, custom, extended_lower_upper,
                      extended_mth_gini, gini, mth_gini, parse_weights,
                      s_gini_orderstat, s_gini_published)
from .index_core import (IndexValue, UnsupportedMethodError,
                         index_via_covariance_mc, index_via_lorenz,
                         index_via_max_representation,
                         index_via_order_stat_means,
                         index_via_quantile_integral, lorenz_moment,
                         max_rep_coefficients, transform_checks)
from .estimator import (EstimateValue, estimate_enumerate, estimate_fast,
                        estimate_subsample, scale_invariance_check)
from .bias_lab import (BiasResult, DeltaResult, bias_from_deltas,
                       consistency_check, delta_laplace, delta_mc,
                       delta_mc_batch, empirical_bias,
                       expectation_identity_check)
from .mc_harness import (ExperimentConfig, ExperimentTable, load_config,
                         render_table, run_experiment)
from .quadrature import QuadConfig, QuadratureError, integrate
from .seeding import substream

__version__ = "0.1.0"
