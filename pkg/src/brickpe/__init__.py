"""Projected-ensemble frame potentials of brick-wall random unitary circuits."""

from .engine import Geometry, Statevector, product_state
from .ensemble import FrameResult, delta_squared, ensemble_frame_potentials, frame_potential
from .haar import HaarParams, haar_frame_potential, haar_state_projected_fp
from .perms import Permutation, ReplicaSplit

__all__ = [
    "FrameResult",
    "Geometry",
    "HaarParams",
    "Permutation",
    "ReplicaSplit",
    "Statevector",
    "delta_squared",
    "ensemble_frame_potentials",
    "frame_potential",
    "haar_frame_potential",
    "haar_state_projected_fp",
    "product_state",
]

__version__ = "0.1.0"
