"""Spearman's rho for bivariate zero-inflated count data.

Exact population values, the zero/positive decomposition, a plug-in
estimator, attainable bounds and a reproducible simulation harness.
"""

from .bounds import (BoundsResult, bounds_closed_form, bounds_oracle, empirical_bounds,
                     locate_points, rho11_extremes)
from .copulas import CopulaSpec, JointPmf, PairedSample, copula_cdf, joint_pmf, sample_pairs
from .estimator import (EstimateResult, estimate_p_star_dagger, estimate_rho_A, estimate_rho_ab,
                        mid_ranks, spearman_midrank, split_by_zero)
from .exact import (DecompositionSummary, condition_positive, decompose, spearman_exact,
                    theorem1_eval)
from .margins import (DiscretePmf, PoissonSpec, ZeroInflatedMarginSpec, build_margin, cdf,
                      quantile, zip_margin)

__version__ = "0.1.0"
