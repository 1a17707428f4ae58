from .network import (
    HillTerm,
    Reaction,
    ReactionNetwork,
    SimulationRequest,
    Species,
    Trajectory,
    propensities,
)
from .gillespie import simulate, simulate_states
from .models import builtin_model, model_names, parameter_bounds, reference_parameters
from .modelfile import (
    load_network,
    load_trajectory,
    save_network,
    save_trajectory,
)

__all__ = [
    "HillTerm",
    "Reaction",
    "ReactionNetwork",
    "SimulationRequest",
    "Species",
    "Trajectory",
    "propensities",
    "simulate",
    "simulate_states",
    "builtin_model",
    "model_names",
    "parameter_bounds",
    "reference_parameters",
    "load_network",
    "load_trajectory",
    "save_network",
    "save_trajectory",
]
