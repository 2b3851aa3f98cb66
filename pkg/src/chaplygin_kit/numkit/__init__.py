"""
Numerical differential-geometry substrate.

Finite differences, Jacobi-Lie brackets on Euclidean charts and on SO(n) in
the left trivialization, so(n) utilities, the Killing pairing and SPD solves.
"""

from chaplygin_kit.numkit.differences import (
    EuclideanVectorField,
    bracket_field,
    default_step,
    fd_gradient,
    fd_jacobian,
    lie_bracket_euclidean,
)
from chaplygin_kit.numkit.lie import (
    LeftTrivializedField,
    SkewBasis,
    check_group_element,
    expm_skew,
    killing_pairing,
    lie_bracket_left_trivialized,
    orthonormalize,
    wedge,
)
from chaplygin_kit.numkit.linalg import spd_inverse, spd_solve

__all__ = [
    "EuclideanVectorField",
    "LeftTrivializedField",
    "SkewBasis",
    "bracket_field",
    "check_group_element",
    "default_step",
    "expm_skew",
    "fd_gradient",
    "fd_jacobian",
    "killing_pairing",
    "lie_bracket_euclidean",
    "lie_bracket_left_trivialized",
    "orthonormalize",
    "spd_inverse",
    "spd_solve",
    "wedge",
]
