"""Likelihood-free inference with bandit-selected summary statistics."""

from .bandit import (
    ArmRank,
    BanditConfig,
    RewardLedger,
    exploration_budget,
    rank_arms,
    select_arm,
    select_with_phase,
)
from .engine import (
    AcceptedSample,
    GridPrior,
    InferenceRun,
    Prior,
    RunConfig,
    calibrate,
    mae,
    make_simulator,
    posterior_estimate,
    run_dynamic,
    run_static,
    sample_prior,
)
from .errors import (
    BanditAbcError,
    ConfigError,
    ContractViolationError,
    EstimationError,
    ModelDefinitionError,
    SelectionError,
    StateError,
)
from .metric import (
    NormalizationState,
    ObservedSummary,
    combined_distance,
    normalize,
    observed_summary,
    raw_distance,
    reward,
)
from .simulation import (
    ReactionNetwork,
    SimulationRequest,
    Trajectory,
    builtin_model,
    simulate,
)
from .summaries import (
    StatisticPool,
    SummaryStatistic,
    evaluate,
    evaluate_pool,
    full_catalog,
    standard_pool,
)

__version__ = "0.1.0"
