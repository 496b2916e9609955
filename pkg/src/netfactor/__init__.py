"""Identifiability of LTI networks driven by intrinsic noise.

Given a stable system ``(A, B, [I 0], 0)`` whose noise enters each
manifest state through its own channel, enumerate every network
(dynamical structure function with diagonal P) that produces the same
output spectral density.
"""

from .config import DEFAULT_TOLERANCES, Tolerances
from .dsf import Dsf, compute_dsf, dsf_equal, is_v_diagonal, to_pdiag_form1, to_pdiag_form2
from .errors import AssumptionViolation, NetfactorError, NumericalError
from .numerics import AreProblem, SolutionKind, enumerate_are_solutions, solve_lyapunov
from .reconstruct import (
    classify_minimum_phase_solution,
    enumerate_equivalent_networks,
    full_noise_scalar_family,
    reconstruct_from_phi,
)
from .spectral import phi_equal, positive_real_realization, spectral_density_of, verify_glover_willems
from .statespace import PartitionedSystem, StateSpace, validate_assumptions

__all__ = [
    "DEFAULT_TOLERANCES",
    "Tolerances",
    "Dsf",
    "compute_dsf",
    "dsf_equal",
    "is_v_diagonal",
    "to_pdiag_form1",
    "to_pdiag_form2",
    "AssumptionViolation",
    "NetfactorError",
    "NumericalError",
    "AreProblem",
    "SolutionKind",
    "enumerate_are_solutions",
    "solve_lyapunov",
    "classify_minimum_phase_solution",
    "enumerate_equivalent_networks",
    "full_noise_scalar_family",
    "reconstruct_from_phi",
    "phi_equal",
    "positive_real_realization",
    "spectral_density_of",
    "verify_glover_willems",
    "PartitionedSystem",
    "StateSpace",
    "validate_assumptions",
]

__version__ = "0.1.0"
