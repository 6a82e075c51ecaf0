"""Sample-based third-degree price discrimination.

Pieces: joint value/covariate distributions on the unit square
(families), empirical revenue maximization under uniform and K-markets
pricing (pricing), quadrature oracles for true revenue and welfare
(oracle), lower-bound constructions and divergence checks (adversarial),
and a reproducible Monte Carlo engine (experiment).
"""

from .adversarial import (
    Codebook,
    DivergenceReport,
    LemmaC3Result,
    SupportViolationError,
    concavity_margin,
    gilbert_varshamov,
    hellinger_sq,
    kl_divergence,
    lemma_c3_check,
    marginal_perturbation_report,
    packing_price_separation,
)
from .experiment import (
    CrossingResult,
    DeficiencyPoint,
    RateFit,
    Strategy,
    crossing_point,
    crossing_scan,
    deficiency_curve,
    fit_rate,
    kmarkets_strategy,
    pointwise_deficiency,
    revenue_deficiency,
    uniform_strategy,
    welfare_deficiency,
)
from .families import (
    Dataset,
    DensityReport,
    EmptyDataError,
    Packing,
    ParameterDomainError,
    PerturbedConditional,
    PerturbedUniform,
    PowerSimulated,
    UniformJoint,
    UnitPoint,
    conditional_cdf,
    conditional_density,
    marginal_x_density,
    phi_x,
    phi_y,
    sample,
    validate_density,
)
from .ingest import BidRecord, IngestError, IngestReport, ingest
from .oracle import (
    DEFAULT_QUAD,
    QuadratureConfig,
    TabulatedPolicy,
    expected_revenue,
    marginal_y_cdf,
    optimal_3pd_policy,
    optimal_uniform_price,
    partial_expectation,
    pointwise_revenue,
    welfare,
)
from .pricing import (
    Constant,
    KMarkets,
    MarketPartition,
    empirical_demand,
    k_markets_erm,
    k_schedule,
    price_at,
    uniform_erm,
)

__version__ = "0.1.0"

__all__ = [
    "BidRecord",
    "Codebook",
    "Constant",
    "CrossingResult",
    "DEFAULT_QUAD",
    "Dataset",
    "DeficiencyPoint",
    "DensityReport",
    "DivergenceReport",
    "EmptyDataError",
    "IngestError",
    "IngestReport",
    "KMarkets",
    "LemmaC3Result",
    "MarketPartition",
    "Packing",
    "ParameterDomainError",
    "PerturbedConditional",
    "PerturbedUniform",
    "PowerSimulated",
    "QuadratureConfig",
    "RateFit",
    "Strategy",
    "SupportViolationError",
    "TabulatedPolicy",
    "UniformJoint",
    "UnitPoint",
    "concavity_margin",
    "conditional_cdf",
    "conditional_density",
    "crossing_point",
    "crossing_scan",
    "deficiency_curve",
    "empirical_demand",
    "expected_revenue",
    "fit_rate",
    "gilbert_varshamov",
    "hellinger_sq",
    "ingest",
    "k_markets_erm",
    "k_schedule",
    "kl_divergence",
    "kmarkets_strategy",
    "lemma_c3_check",
    "marginal_perturbation_report",
    "marginal_x_density",
    "marginal_y_cdf",
    "optimal_3pd_policy",
    "optimal_uniform_price",
    "packing_price_separation",
    "partial_expectation",
    "phi_x",
    "phi_y",
    "pointwise_deficiency",
    "pointwise_revenue",
    "price_at",
    "revenue_deficiency",
    "sample",
    "uniform_erm",
    "uniform_strategy",
    "validate_density",
    "welfare",
    "welfare_deficiency",
]
