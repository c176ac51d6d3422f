"""Well-balanced global-flux WENO finite-volume schemes for shallow water moment equations."""

from .mesh import Mesh, StateField, BoundarySpec, SideCondition, fill_ghosts, l2_error, estimated_order
from .models import PhysicalParams, PrimitiveState, MODEL_IDS
from .weno import WenoConfig
from .solver import SchemeConfig, RunResult, advance, semidiscrete_residual

__all__ = [
    "Mesh", "StateField", "BoundarySpec", "SideCondition", "fill_ghosts",
    "l2_error", "estimated_order", "PhysicalParams", "PrimitiveState",
    "MODEL_IDS", "WenoConfig", "SchemeConfig", "RunResult", "advance",
    "semidiscrete_residual",
]

__version__ = "0.1.0"
