"""Average Forest leadership measure for organisational situations.

An organisational situation pairs a circuit-free digraph of agents with a TU
game.  The Average Forest (AF) measure averages each agent's marginal
contribution over every maximal spanning forest of the digraph.
"""

from .digraph import OrgStructure, build_org_structure
from .documents import load_situation, loads_situation, situation_to_dict, dumps_situation
from .errors import AFForestError
from .forests import (
    MaximalSpanningForest,
    count_maximal_forests,
    enumerate_maximal_forests,
    sample_maximal_forest,
    sample_maximal_forests,
)
from .games import (
    AdditiveGame,
    AttachmentGame,
    SymmetricGame,
    TableGame,
    check_convex,
    check_superadditive,
    example_convexity_game,
)
from .kernels import backend, use_backend
from .measures import (
    AFReport,
    OrganisationalSituation,
    af_exact,
    component_feasibility,
    efficiency_check,
    is_situation_dummy,
    marginal_contribution_vector,
    productivity,
)
from .montecarlo import EstimationPlan, af_estimate, probably_dummy
from .sensitivity import ArcEdit, classify_nodes, sensitivity_report

__version__ = "0.1.0"

__all__ = [
    "AFForestError",
    "AFReport",
    "AdditiveGame",
    "ArcEdit",
    "AttachmentGame",
    "EstimationPlan",
    "MaximalSpanningForest",
    "OrgStructure",
    "OrganisationalSituation",
    "SymmetricGame",
    "TableGame",
    "af_estimate",
    "af_exact",
    "backend",
    "build_org_structure",
    "check_convex",
    "check_superadditive",
    "classify_nodes",
    "component_feasibility",
    "count_maximal_forests",
    "dumps_situation",
    "efficiency_check",
    "enumerate_maximal_forests",
    "example_convexity_game",
    "is_situation_dummy",
    "load_situation",
    "loads_situation",
    "marginal_contribution_vector",
    "probably_dummy",
    "productivity",
    "sample_maximal_forest",
    "sample_maximal_forests",
    "sensitivity_report",
    "situation_to_dict",
    "use_backend",
]
