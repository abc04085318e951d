"""Delayed-feedback control of the open Dicke model.

Simulation and stability analysis for the mean-field Dicke equations under
time-delayed feedback of the cavity photon number: DDE integration by the
method of steps, rightmost characteristic roots, analytic Hopf boundaries,
two-parameter phase diagrams and limit-cycle continuation scans.
"""

from .model import (
    Branch,
    FeedbackMode,
    FixedPoint,
    ModelParams,
    State,
    coupling_strength,
    critical_coupling,
    fixed_points,
    rhs,
)

__version__ = "0.1.0"

__all__ = [
    "Branch",
    "FeedbackMode",
    "FixedPoint",
    "ModelParams",
    "State",
    "coupling_strength",
    "critical_coupling",
    "fixed_points",
    "rhs",
    "__version__",
]
