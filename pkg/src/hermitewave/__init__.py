"""Hermite interpolation methods for linear hyperbolic PDEs on periodic grids.

Four 1D and 2D schemes (Dual, Virtual, Central, Upwind), Bloch/Floquet
dispersion analysis and a small experiment harness.
"""
from .analysis import (UpdateBlocks, algebraic_blocks, assemble_global, bloch_symbol,
                       dispersion_curve, drp_optimize, floquet_error, probe_update_blocks,
                       spectral_radius, spectrum)
from .harness import ExperimentConfig, ErrorReport, converge, l2_error, project_initial_condition, simulate
from .interpolation import (InterpolationOperator, central_reconstruct, dual_reconstruct,
                            extended_reconstruct, hermite_matrix, upwind_reconstruct,
                            virtual_reconstruct)
from .jets import Jet, TensorJet2D, taylor_evolve, taylor_evolve_2d
from .schemes1d import Grid1D, GridState1D, Pde1D, SchemeConfig
from .schemes2d import Grid2D, GridState2D, Pde2D, reconstruct_2d, step_2d

__version__ = "0.1.0"

__all__ = [
    "ErrorReport",
    "ExperimentConfig",
    "Grid1D",
    "Grid2D",
    "GridState1D",
    "GridState2D",
    "InterpolationOperator",
    "Jet",
    "Pde1D",
    "Pde2D",
    "SchemeConfig",
    "TensorJet2D",
    "UpdateBlocks",
    "algebraic_blocks",
    "assemble_global",
    "bloch_symbol",
    "central_reconstruct",
    "converge",
    "dispersion_curve",
    "drp_optimize",
    "dual_reconstruct",
    "extended_reconstruct",
    "floquet_error",
    "hermite_matrix",
    "l2_error",
    "probe_update_blocks",
    "project_initial_condition",
    "reconstruct_2d",
    "simulate",
    "spectral_radius",
    "spectrum",
    "step_2d",
    "taylor_evolve",
    "taylor_evolve_2d",
    "upwind_reconstruct",
    "virtual_reconstruct",
]
