"""Factor-argument explanations for discrete Bayesian networks.

Load a network, run loopy message passing for beliefs, extract ranked
independent factor arguments for a query, and render them as natural
language.  See the README for the CLI and HTTP surfaces.
"""

from .arguments import (
    EffectEngine,
    FactorArgument,
    FAParams,
    RankedFA,
    StepTrace,
    approximate_posterior,
    check_dependence,
    compose_fas,
    fa_distance,
    fa_effect,
    fa_strength,
    find_maximal_proper_fas,
    single_path_arguments,
    step_effect,
)
from .bif import parse_bif, serialize_bif
from .errors import (
    BifParseError,
    CapacityError,
    FactorArgsError,
    NumericError,
    ValidationError,
)
from .factors import ATOL, BeliefUpdate, Factor, Variable, logodds, obs
from .inference import (
    LoopyResult,
    Schedule,
    exact_posterior,
    loopy_posterior,
    prior_marginal,
)
from .kernels import BACKEND
from .network import (
    BayesianNetwork,
    Evidence,
    FactorGraph,
    FGNode,
    build_factor_graph,
    d_separated,
    network_to_json,
    simple_paths,
)
from .nlg import (
    Explanation,
    classify_step,
    counterfactual_effect,
    qualifier,
    render,
    render_baseline_summary,
)

__version__ = "0.1.0"

__all__ = [
    "ATOL",
    "BACKEND",
    "BayesianNetwork",
    "BeliefUpdate",
    "BifParseError",
    "CapacityError",
    "EffectEngine",
    "Evidence",
    "Explanation",
    "FAParams",
    "FGNode",
    "Factor",
    "FactorArgsError",
    "FactorArgument",
    "FactorGraph",
    "LoopyResult",
    "NumericError",
    "RankedFA",
    "Schedule",
    "StepTrace",
    "ValidationError",
    "Variable",
    "approximate_posterior",
    "build_factor_graph",
    "check_dependence",
    "classify_step",
    "compose_fas",
    "counterfactual_effect",
    "d_separated",
    "exact_posterior",
    "fa_distance",
    "fa_effect",
    "fa_strength",
    "find_maximal_proper_fas",
    "logodds",
    "loopy_posterior",
    "network_to_json",
    "obs",
    "parse_bif",
    "prior_marginal",
    "qualifier",
    "render",
    "render_baseline_summary",
    "serialize_bif",
    "simple_paths",
    "single_path_arguments",
    "step_effect",
]
