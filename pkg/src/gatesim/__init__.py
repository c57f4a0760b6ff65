"""gatesim: design and simulation lab for squeezed-cavity qutrit phase gates."""

__version__ = "0.1.0"

from .design import (
    DesignDiscrepancyWarning,
    GateDesign,
    InfeasibleDesignError,
    logical_gate_matrix,
    solve_shaped,
    solve_unshaped,
)
from .hilbert import DensityMatrix, Operator, SpaceLayout, StateVector
from .model import LabFrameParams, PulseShape, SystemParams

__all__ = [
    "DensityMatrix",
    "DesignDiscrepancyWarning",
    "GateDesign",
    "InfeasibleDesignError",
    "LabFrameParams",
    "Operator",
    "PulseShape",
    "SpaceLayout",
    "StateVector",
    "SystemParams",
    "__version__",
    "logical_gate_matrix",
    "solve_shaped",
    "solve_unshaped",
]
