"""Group equilibrium stable strategies (GESS) for N-group evolutionary games."""

from .game import (
    GroupGame,
    GroupProfile,
    GroupWeights,
    MixedStrategy,
    PayoffMatrix,
    PayoffMatrix2,
    group_utility,
    omega,
    pairwise_payoff,
    post_mutation_utility,
)
from .ess import EssReport, ess_candidates_2x2, is_ess, is_nash_symmetric, symmetric_ess
from .solver import (
    GessResult,
    Kind,
    Label,
    bracket,
    find_all_gess,
    fully_mixed_gess,
    mixed_support_solve,
    strong_gess_all,
)
from .oracle import (
    InvasionGrid,
    Verdict,
    grid_search_equilibria,
    strict_group_nash_check,
    verify_conditions,
    verify_gess_definition,
)

__version__ = "0.1.0"
