"""Joint (epsilon, delta)-DP and eta-TV privacy accounting.

Tracking a mechanism's total variation alongside its DP parameters gives
strictly tighter composition: this package provides the tradeoff-curve
algebra, exact and approximate k-fold composition with brute-force
oracles, subsampling amplification, Gaussian-limit diagnostics, a
local-privacy channel toolkit, and a noisy-SGD accounting pipeline.
"""

from .amplification import (
    erase_pair,
    subsample,
    subsample_region_gap,
    subsample_tightness_pair,
)
from .asymptotics import clt_gap, clt_mu, g_mu, kappa2, kappa3, kl_functional
from .composition import (
    CompositionLedger,
    LedgerEntry,
    compose_exact,
    compose_kairouz,
    compose_types_approx,
    composed_tv,
    ledger_to_curve,
    oracle_compose,
)
from .curves import (
    PrivacyBudget,
    TradeoffCurve,
    check_budget,
    curve_from_budget,
    curve_from_pair,
    delta_at_epsilon,
    intersect,
    max_gap,
    min_gap,
    strict_improvement,
    sup_norm,
    tv_feasibility_cap,
    tv_of_curve,
)
from .divergences import (
    DiscretePair,
    DivergenceSpec,
    chi_squared,
    f_divergence,
    kl_divergence,
    le_cam,
    total_variation,
)
from .dpsgd import SgdConfig, sgd_compare, sgd_region, sgd_region_baseline, step_budget
from .errors import CapacityError, ValidationError
from .localdp import (
    Channel,
    be_ratio_lower_bound,
    binary_erasure_mechanism,
    chi2_output_bound,
    dobrushin,
    erase_channel,
    eta_kl_estimate,
    kl_contraction_bound,
    ldp_epsilon,
    max_fdiv,
    opt_conversion_factor,
    push_forward,
    q_star,
    randomized_response,
    random_joint_member,
    random_ldp_channel,
)
from .mechanisms import (
    DominatingSpec,
    GaussianParams,
    StaircaseSpec,
    alpha_from_budget,
    dominating_approx,
    dominating_pure,
    gaussian_delta,
    gaussian_tv,
    laplace_tv,
    staircase_curve,
    staircase_gamma_for_alpha,
    staircase_tv,
)

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "Channel",
    "CompositionLedger",
    "DiscretePair",
    "DivergenceSpec",
    "DominatingSpec",
    "GaussianParams",
    "LedgerEntry",
    "PrivacyBudget",
    "SgdConfig",
    "StaircaseSpec",
    "TradeoffCurve",
    "ValidationError",
    "alpha_from_budget",
    "be_ratio_lower_bound",
    "binary_erasure_mechanism",
    "check_budget",
    "chi2_output_bound",
    "chi_squared",
    "clt_gap",
    "clt_mu",
    "compose_exact",
    "compose_kairouz",
    "compose_types_approx",
    "composed_tv",
    "curve_from_budget",
    "curve_from_pair",
    "delta_at_epsilon",
    "dobrushin",
    "dominating_approx",
    "dominating_pure",
    "erase_channel",
    "erase_pair",
    "eta_kl_estimate",
    "f_divergence",
    "g_mu",
    "gaussian_delta",
    "gaussian_tv",
    "intersect",
    "kappa2",
    "kappa3",
    "kl_contraction_bound",
    "kl_divergence",
    "kl_functional",
    "laplace_tv",
    "ldp_epsilon",
    "le_cam",
    "ledger_to_curve",
    "max_fdiv",
    "max_gap",
    "min_gap",
    "opt_conversion_factor",
    "oracle_compose",
    "push_forward",
    "q_star",
    "random_joint_member",
    "random_ldp_channel",
    "randomized_response",
    "sgd_compare",
    "sgd_region",
    "sgd_region_baseline",
    "staircase_curve",
    "staircase_gamma_for_alpha",
    "staircase_tv",
    "step_budget",
    "strict_improvement",
    "subsample",
    "subsample_region_gap",
    "subsample_tightness_pair",
    "sup_norm",
    "total_variation",
    "tv_feasibility_cap",
    "tv_of_curve",
]
