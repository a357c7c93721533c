"""Exact Nash flows over time with spillback."""
from .dynamics import EquilibriumTrajectory, PhaseProfile, reconstruct_arc_flows
from .engine import TerminationPolicy, compute_nash_flow
from .lp import BACKEND
from .network import make_network, validate_network
from .thinflow import ThinFlowInstance, solve_thin_flow, verify_thin_flow
from .validator import validate_trajectory

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "EquilibriumTrajectory", "PhaseProfile", "TerminationPolicy", "ThinFlowInstance",
    "compute_nash_flow", "make_network", "reconstruct_arc_flows", "solve_thin_flow",
    "validate_network", "validate_trajectory", "verify_thin_flow",
]
