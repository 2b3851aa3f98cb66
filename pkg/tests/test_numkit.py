"""
Tests for the numerical kit: finite differences, Lie brackets and SPD solves.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chaplygin_kit.core.exceptions import (
    DimensionMismatch,
    InvalidGroupElement,
    NonFiniteEvaluation,
    NotPositiveDefinite,
)
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
    directional_derivative,
    expm_skew,
    killing_pairing,
    lie_bracket_left_trivialized,
    orthogonality_defect,
    orthonormalize,
    wedge,
)
from chaplygin_kit.numkit.linalg import spd_inverse, spd_solve

E = np.eye(3)
coordinate = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False)


def random_rotation(seed: int, n: int = 3) -> np.ndarray:
    rng = np.random.default_rng(seed)
    xi = SkewBasis(n).unflatten(rng.uniform(-1.0, 1.0, SkewBasis(n).dim))
    return expm_skew(xi)


class TestFiniteDifferences:
    """Tests for fd_jacobian and fd_gradient."""

    def test_quadratic_map(self):
        """Central differences are exact on quadratics."""
        J = fd_jacobian(lambda x: np.array([x[0] * x[1], x[1] ** 2]), [1.0, 2.0], h=1e-5)
        np.testing.assert_allclose(J, [[2.0, 1.0], [0.0, 4.0]], atol=1e-9)

    def test_particle_lift_jacobian(self):
        """Jacobian of the lift (1, 0, y) has a single 1 at (2, 1)."""
        J = fd_jacobian(lambda q: np.array([1.0, 0.0, q[1]]), [0.3, -0.7, 2.0])
        expected = np.zeros((3, 3))
        expected[2, 1] = 1.0
        np.testing.assert_allclose(J, expected, atol=1e-10)

    def test_fourth_order_stencil(self):
        """The 5-point stencil differentiates a cubic to roundoff."""
        grad = fd_gradient(lambda x: x[0] ** 3 + x[0] * x[1], [0.5, 1.5], h=1e-2, order=4)
        np.testing.assert_allclose(grad, [0.75 + 1.5, 0.5], atol=1e-10)

    def test_unsupported_order(self):
        """Only orders 2 and 4 exist."""
        with pytest.raises(ValueError):
            fd_jacobian(lambda x: x, [1.0], order=3)

    def test_nonfinite_evaluation(self):
        """A blow-up at a stencil point is reported with its coordinate."""

        def f(x: np.ndarray) -> np.ndarray:
            return np.array([1.0 if x[1] >= 0 else math.inf])

        with pytest.raises(NonFiniteEvaluation) as exc_info:
            fd_jacobian(f, [1.0, 0.0], h=1e-3)
        assert "coordinate 1" in str(exc_info.value)

    def test_default_step_scales(self):
        """The default step grows with |x| beyond 1."""
        assert default_step([0.1]) == pytest.approx(default_step([1.0]))
        assert default_step([10.0]) == pytest.approx(10.0 * default_step([1.0]))


class TestEuclideanBracket:
    """Tests for the Jacobi-Lie bracket on R^n."""

    def test_particle_bracket(self):
        """[d_x + y d_z, d_y] = -d_z everywhere."""
        X = EuclideanVectorField(lambda q: np.array([1.0, 0.0, q[1]]), 3)
        Y = EuclideanVectorField(lambda q: np.array([0.0, 1.0, 0.0]), 3)
        for q in ([0.0, 0.0, 0.0], [1.0, -2.0, 3.0]):
            np.testing.assert_allclose(lie_bracket_euclidean(X, Y, q), [0.0, 0.0, -1.0], atol=1e-8)

    def test_self_bracket_vanishes(self):
        """[X, X] = 0."""
        X = EuclideanVectorField(lambda q: np.array([q[1] ** 2, q[0], 1.0]), 3)
        np.testing.assert_allclose(lie_bracket_euclidean(X, X, [0.5, 1.0, -1.0]), 0.0, atol=1e-12)

    def test_disk_lifts(self, disk):
        """The disk lifts of d_phi and d_theta bracket to (-1, 0, 0, 0) at phi = pi/2."""
        lift_phi, lift_theta = disk.horizontal_frame
        q = [0.0, 0.0, math.pi / 2, 0.0]
        np.testing.assert_allclose(
            lie_bracket_euclidean(lift_phi, lift_theta, q), [-1.0, 0.0, 0.0, 0.0], atol=1e-8
        )

    def test_dimension_mismatch(self):
        """Fields on different spaces cannot be bracketed."""
        X = EuclideanVectorField(lambda q: np.zeros(2), 2)
        Y = EuclideanVectorField(lambda q: np.zeros(3), 3)
        with pytest.raises(DimensionMismatch):
            lie_bracket_euclidean(X, Y, [0.0, 0.0])

    @given(x=coordinate, y=coordinate, z=coordinate)
    @settings(max_examples=25, deadline=None)
    def test_antisymmetry(self, x, y, z):
        """[X, Y] + [Y, X] = 0 at every point."""
        X = EuclideanVectorField(lambda q: np.array([q[1] * q[2], q[0] ** 2, 1.0]), 3)
        Y = EuclideanVectorField(lambda q: np.array([1.0, q[2], q[0] * q[1]]), 3)
        total = lie_bracket_euclidean(X, Y, [x, y, z]) + lie_bracket_euclidean(Y, X, [x, y, z])
        np.testing.assert_allclose(total, 0.0, atol=1e-8)

    def test_jacobi_identity(self):
        """Cyclic sum of nested brackets of quadratic fields vanishes."""
        h = 1e-3
        X = EuclideanVectorField(lambda q: np.array([1.0, 0.0, q[1]]), 3)
        Y = EuclideanVectorField(lambda q: np.array([0.0, 1.0, q[0] ** 2]), 3)
        Z = EuclideanVectorField(lambda q: np.array([q[2], q[0], 0.0]), 3)
        q = [0.2, -0.4, 0.6]
        total = (
            lie_bracket_euclidean(bracket_field(X, Y, h), Z, q, h)
            + lie_bracket_euclidean(bracket_field(Y, Z, h), X, q, h)
            + lie_bracket_euclidean(bracket_field(Z, X, h), Y, q, h)
        )
        assert np.max(np.abs(total)) <= 1e-5


class TestLeftTrivializedBracket:
    """Tests for brackets of vector fields on SO(n)."""

    def test_constant_fields_commutator(self):
        """Left-invariant fields bracket to the matrix commutator."""
        X = LeftTrivializedField(lambda g: wedge(E[0], E[1]), 3)
        Y = LeftTrivializedField(lambda g: wedge(E[1], E[2]), 3)
        bracket = lie_bracket_left_trivialized(X, Y, random_rotation(0))
        np.testing.assert_allclose(bracket, wedge(E[0], E[2]), atol=1e-8)

    @pytest.mark.parametrize("seed", [1, 2, 3])
    def test_gamma_wedge_fields(self, seed):
        """[gamma ^ e_1, gamma ^ e_2] = e_1 ^ e_2 with gamma = g^T e_3."""
        X = LeftTrivializedField(lambda g: wedge(g[2], E[0]), 3)
        Y = LeftTrivializedField(lambda g: wedge(g[2], E[1]), 3)
        bracket = lie_bracket_left_trivialized(X, Y, random_rotation(seed))
        np.testing.assert_allclose(bracket, wedge(E[0], E[1]), atol=1e-6)

    def test_self_bracket_vanishes(self):
        """[X, X] = 0."""
        X = LeftTrivializedField(lambda g: wedge(g[2], E[0]), 3)
        np.testing.assert_allclose(
            lie_bracket_left_trivialized(X, X, random_rotation(4)), 0.0, atol=1e-10
        )

    def test_directional_derivative_large_direction(self):
        """The step shrinks with |xi| so the stencil stays local on the group."""
        B = wedge(E[0], E[1])
        Y = LeftTrivializedField(lambda g: g.T @ B @ g, 3)
        xi = 1000.0 * wedge(E[0], E[2]) + 700.0 * wedge(E[1], E[2])
        g = random_rotation(5)
        value = Y(g)
        expected = value @ xi - xi @ value
        derivative = directional_derivative(Y, xi, g)
        np.testing.assert_allclose(derivative, expected, atol=1e-6 * np.linalg.norm(expected))

    def test_rejects_non_orthogonal(self):
        """Brackets are only taken at group elements."""
        X = LeftTrivializedField(lambda g: wedge(E[0], E[1]), 3)
        with pytest.raises(InvalidGroupElement):
            lie_bracket_left_trivialized(X, X, 1.1 * np.eye(3))

    def test_rejects_reflection(self):
        """det = -1 is outside SO(n)."""
        with pytest.raises(InvalidGroupElement):
            check_group_element(np.diag([-1.0, 1.0, 1.0]))


class TestKillingPairing:
    """Tests for the Killing pairing and the wedge basis."""

    def test_unit_wedge(self):
        """e_1 ^ e_2 has unit length."""
        assert killing_pairing(wedge(E[0], E[1]), wedge(E[0], E[1])) == pytest.approx(1.0)

    def test_orthogonal_wedges(self):
        """(e_1 ^ e_2, e_2 ^ e_3) = 0."""
        assert killing_pairing(wedge(E[0], E[1]), wedge(E[1], E[2])) == pytest.approx(0.0)

    def test_bilinear(self):
        """Scaling one argument scales the pairing."""
        xi = wedge(E[0], E[1])
        assert killing_pairing(2.0 * xi, xi) == pytest.approx(2.0)

    def test_dimension_mismatch(self):
        """Both arguments must have the same size."""
        with pytest.raises(DimensionMismatch):
            killing_pairing(np.zeros((3, 3)), np.zeros((4, 4)))

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_basis_is_orthonormal(self, n):
        """The wedge basis has identity Gram matrix."""
        basis = SkewBasis(n)
        assert basis.dim == n * (n - 1) // 2
        np.testing.assert_allclose(basis.gram(lambda xi: xi), np.eye(basis.dim), atol=1e-14)

    @given(coords=st.lists(coordinate, min_size=6, max_size=6))
    def test_flatten_inverts_unflatten(self, coords):
        """Coordinates survive a trip through the skew matrix."""
        basis = SkewBasis(4)
        xi = basis.unflatten(coords)
        assert np.max(np.abs(xi + xi.T)) == 0.0
        np.testing.assert_array_equal(basis.flatten(xi), coords)


class TestGroupHelpers:
    """Tests for the SO(n) helpers."""

    def test_exponential_is_rotation(self):
        """exp of a skew matrix is orthogonal with det 1."""
        g = random_rotation(5, n=4)
        assert orthogonality_defect(g) < 1e-12
        assert np.linalg.det(g) == pytest.approx(1.0)

    def test_orthonormalize_repairs_drift(self):
        """A drifted rotation is projected back onto SO(n)."""
        g = random_rotation(6)
        drifted = g + 1e-6 * np.ones((3, 3))
        repaired = orthonormalize(drifted)
        assert orthogonality_defect(repaired) < 1e-12
        np.testing.assert_allclose(repaired, g, atol=1e-5)

    def test_orthonormalize_keeps_clean_element(self):
        """Elements within tolerance are returned unchanged."""
        g = random_rotation(7)
        assert orthonormalize(g) is g


class TestSpdSolve:
    """Tests for the Cholesky-based solves."""

    def test_identity(self):
        """Identity returns the right-hand side."""
        b = np.array([1.5, -2.0, 3.0])
        np.testing.assert_allclose(spd_solve(np.eye(3), b), b)

    def test_diagonal(self):
        """diag(3, 6) x = (3, 12) gives (1, 2)."""
        np.testing.assert_allclose(spd_solve(np.diag([3.0, 6.0]), [3.0, 12.0]), [1.0, 2.0])

    def test_inverse(self):
        """The Veselova pole metric inverts to diag(1/3, 1/6)."""
        np.testing.assert_allclose(spd_inverse(np.diag([3.0, 6.0])), np.diag([1 / 3, 1 / 6]))

    def test_indefinite_reports_pivot(self):
        """A failing leading minor is reported by its order."""
        with pytest.raises(NotPositiveDefinite) as exc_info:
            spd_solve(np.diag([1.0, -1.0]), [1.0, 1.0])
        assert "leading minor 2" in str(exc_info.value)

    def test_asymmetric(self):
        """Asymmetric matrices are rejected before factorization."""
        with pytest.raises(NotPositiveDefinite):
            spd_solve(np.array([[2.0, 1.0], [0.0, 2.0]]), [1.0, 1.0])
