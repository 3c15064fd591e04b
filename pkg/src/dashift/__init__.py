"""Exact risk decompositions and bound checks for finite domain-adaptation instances."""

__version__ = "0.1.0"

from .measure import (  # noqa: E402
    UNIFORM,
    Environment,
    Predictor,
    Representation,
    SingularExtension,
    conditional_label,
    get_log_base,
    log_base,
    pushforward,
    set_log_base,
)
from .risk import CE, ZERO_ONE, Loss, bayes_predictor, risk  # noqa: E402
from .decomposition import decompose, verify_theorem1  # noqa: E402
from .fairness import GroupPartition, fairness_bounds  # noqa: E402
from .multisource import SourceSet, class_gap, eci_bound_report, theorem2_report  # noqa: E402
from .invariance import HypothesisClass, check_eci, erm_eci_solve, irm_solve  # noqa: E402
from .divergence import (  # noqa: E402
    FinitePredictorSet,
    connect_bound,
    dann_terms,
    hdh_divergence,
    multisource_div_bound,
    single_source_div_bound,
)
from .scenarios import ScenarioSpec, gen, random_instance  # noqa: E402

__all__ = [
    "CE", "UNIFORM", "ZERO_ONE", "Environment", "FinitePredictorSet", "GroupPartition", "HypothesisClass",
    "Loss", "Predictor", "Representation", "ScenarioSpec", "SingularExtension", "SourceSet",
    "bayes_predictor", "check_eci", "class_gap", "conditional_label", "connect_bound", "dann_terms",
    "decompose", "eci_bound_report", "erm_eci_solve", "fairness_bounds", "gen", "get_log_base",
    "hdh_divergence", "irm_solve", "log_base", "multisource_div_bound", "pushforward", "random_instance",
    "risk", "set_log_base", "single_source_div_bound", "theorem2_report", "verify_theorem1",
]
