"""
Reduced dynamics: energy, vector field, integrators and Hamiltonisation.
"""

from chaplygin_kit.dynamics.hamiltonian import (
    almost_symplectic_matrix,
    energy_differential,
    energy_gradient,
    hamiltonian,
    phase_field,
    vector_field,
)
from chaplygin_kit.dynamics.hamiltonisation import (
    HamiltonisedSystem,
    darboux_defect,
    hamiltonise,
    integrate_symplectic,
)
from chaplygin_kit.dynamics.integrators import build_trajectory, integrate, integrate_batch

__all__ = [
    "HamiltonisedSystem",
    "almost_symplectic_matrix",
    "build_trajectory",
    "darboux_defect",
    "energy_differential",
    "energy_gradient",
    "hamiltonian",
    "hamiltonise",
    "integrate",
    "integrate_batch",
    "integrate_symplectic",
    "phase_field",
    "vector_field",
]
