"""Fairness-aware allocation of contested railway infrastructure capacity."""
from .allocator import RepairTrace, fitness, resolve_conflicts, revenue
from .fairness import (
    FairnessConfig,
    IndexKind,
    alpha_transform,
    assigned_capacity_percent,
    assigned_importance_percent,
    atkinson_fairness,
    gini_fairness,
    inequity_percent,
    jain,
)
from .ga import EpochHistory, GaConfig, evaluate, run
from .infrastructure import ConflictGraph, LineTopology, build_conflict_graph, occupancy
from .model import (
    Allocation,
    RailwayUndertaking,
    RequestSet,
    Scenario,
    ServiceRequest,
    granted_importance_sums,
    validate_scenario,
)
from .records import RunRecord
from .scenarios import ScenarioKind, make_scenario

__version__ = "0.1.0"
