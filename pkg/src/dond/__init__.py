"""Deal or No Deal decision engine.

Exact Q-values and optimal stopping policies by backward induction,
risk-aversion bounds inverted from observed choices, and end-to-end
replication of the bundled Suzanne and Frank case studies.
"""

from .banker import (
    BankerModel,
    ExpectedValueBanker,
    Extrapolation,
    MultiplierSchedule,
    OnlineRule,
    banker_offer,
    implied_multiplier,
)
from .core import (
    Action,
    CRRAUtility,
    ExpPowerUtility,
    GameState,
    LogUtility,
    PrizeLadder,
    RoundSchedule,
    UtilitySpec,
    certainty_equivalent,
    successor_states,
    utility_value,
)
from .errors import BudgetError, DomainError, EngineError, RangeError, ValidationError
from .inversion import (
    BoundsReport,
    GammaPolicy,
    decision_thresholds,
    enjoyment_benefit,
    infer_gamma_bounds,
)
from .replication import (
    calibrate_multipliers,
    list_datasets,
    load_dataset,
    replicate_case_study,
)
from .solver import (
    GameSpec,
    QResult,
    SolverGuard,
    action_value_series,
    optimal_policy,
    q_values,
)
from .trajectory import Trajectory, TrajectoryRound, load_trajectory, parse_trajectory

__version__ = "0.1.0"

__all__ = [
    "Action",
    "BankerModel",
    "BoundsReport",
    "BudgetError",
    "CRRAUtility",
    "DomainError",
    "EngineError",
    "ExpPowerUtility",
    "ExpectedValueBanker",
    "Extrapolation",
    "GameSpec",
    "GameState",
    "GammaPolicy",
    "LogUtility",
    "MultiplierSchedule",
    "OnlineRule",
    "PrizeLadder",
    "QResult",
    "RangeError",
    "RoundSchedule",
    "SolverGuard",
    "Trajectory",
    "TrajectoryRound",
    "UtilitySpec",
    "ValidationError",
    "action_value_series",
    "banker_offer",
    "calibrate_multipliers",
    "certainty_equivalent",
    "decision_thresholds",
    "enjoyment_benefit",
    "implied_multiplier",
    "infer_gamma_bounds",
    "list_datasets",
    "load_dataset",
    "optimal_policy",
    "parse_trajectory",
    "load_trajectory",
    "q_values",
    "replicate_case_study",
    "successor_states",
    "utility_value",
]
