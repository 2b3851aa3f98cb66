"""
Tests for system definitions, the reduced metric and the gyroscopic tensor.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chaplygin_kit.core.exceptions import DegenerateFrame, DimensionMismatch
from chaplygin_kit.core.gyroscopic import (
    bracket_pairings,
    gyro_two_form,
    gyroscopic_coefficients,
    gyroscopic_coefficients_by_projection,
    reduced_metric,
    theta,
)
from chaplygin_kit.core.models import ReducedState
from chaplygin_kit.core.system import (
    EuclideanChart,
    SystemDefinition,
    check_frame,
    frame_from_constraints,
    make_system,
)
from chaplygin_kit.numkit.differences import fd_gradient
from chaplygin_kit.systems import (
    oracle_bracket_pairing,
    particle_gyro_oracle,
    particle_metric_oracle,
    particle_theta_oracle,
    veselova_frame_bracket_oracle,
    veselova_gyro_oracle,
    veselova_metric_oracle,
    veselova_section,
)
from chaplygin_kit.systems.veselova import gamma_from_shape

A3 = (1.0, 2.0, 3.0)


class TestSystemDefinition:
    """Tests for building and checking system definitions."""

    def test_particle_shape(self, particle):
        """The particle has two shape degrees of freedom on R^3."""
        assert particle.r == 2
        assert particle.config_model.ambient_dim == 3
        assert particle.contains([0.0, 5.0])
        assert not particle.contains([0.0, math.nan])

    def test_veselova_domain(self, veselova):
        """The chart floor gamma_n >= delta bounds the domain."""
        assert veselova.contains([0.5, 0.5])
        assert not veselova.contains([0.8, 0.6])

    def test_single_field_rejected(self):
        """Shape space needs at least two dimensions."""
        with pytest.raises(DimensionMismatch):
            make_system(
                label="line",
                config_model=EuclideanChart(2),
                frame=[lambda q: np.array([1.0, 0.0])],
                section=lambda s: np.array([s[0], 0.0]),
                metric=lambda q: np.eye(2),
            )

    @pytest.mark.parametrize("s", [[0.0, 0.0], [0.3, -1.2]])
    def test_check_frame_particle(self, particle, s):
        """Lifts project back to the coordinate directions."""
        assert check_frame(particle, s) < 1e-8

    def test_check_frame_disk(self, disk):
        """Constraint-derived lifts project back to d_phi and d_theta."""
        assert check_frame(disk, [0.7, 1.3]) < 1e-8

    def test_check_frame_veselova_group(self, veselova_group):
        """The SO(3) frame projects onto the sphere chart."""
        assert check_frame(veselova_group, [0.4, -0.3]) < 1e-6

    def test_degenerate_constraints(self):
        """Constraints that pin the shape directions cannot give a frame."""
        frame = frame_from_constraints(
            lambda q: np.array([[0.0, 1.0, 0.0]]), shape_indices=[1, 2], dimension=3
        )
        with pytest.raises(DegenerateFrame):
            frame[0](np.zeros(3))


class TestReducedMetric:
    """Tests for the reduced metric K."""

    @pytest.mark.parametrize("y", [0.0, 1.0, -2.5])
    def test_particle(self, coupled_particle, y):
        """K = [[1 + y^2, a y], [a y, 1]]."""
        metric = reduced_metric(coupled_particle, [0.4, y])
        np.testing.assert_allclose(metric.K, particle_metric_oracle(0.5, y), atol=1e-12)
        assert metric.inverse_defect() < 1e-12

    def test_particle_at_origin(self, particle):
        """K is the identity on the line y = 0."""
        np.testing.assert_allclose(reduced_metric(particle, [3.0, 0.0]).K, np.eye(2))

    @pytest.mark.parametrize("s", [[0.0, 0.0], [1.0, 2.0]])
    def test_disk(self, disk, s):
        """K = diag(I, J + m R^2) everywhere."""
        np.testing.assert_allclose(reduced_metric(disk, s).K, np.diag([1.0, 1.5]), atol=1e-12)

    def test_veselova_pole(self, veselova, veselova_group):
        """K = diag(3, 6) at the north pole for A = diag(1, 2, 3)."""
        np.testing.assert_allclose(reduced_metric(veselova, [0.0, 0.0]).K, np.diag([3.0, 6.0]))
        np.testing.assert_allclose(
            reduced_metric(veselova_group, [0.0, 0.0]).K, np.diag([3.0, 6.0]), atol=1e-12
        )

    @pytest.mark.parametrize("s", [[0.6, 0.0], [0.3, -0.5], [-0.2, 0.7]])
    def test_veselova_closed_form(self, veselova_group, s):
        """The SO(3) pipeline reproduces the closed-form metric."""
        expected = veselova_metric_oracle(A3, gamma_from_shape(s))
        np.testing.assert_allclose(reduced_metric(veselova_group, s).K, expected, atol=1e-10)


class TestGyroscopicCoefficients:
    """Tests for the coefficients C[i, j, k]."""

    def test_particle_at_unit_height(self, particle):
        """C[0, 1, 0] = -1/2 and C[0, 1, 1] = 0 at y = 1, a = 0."""
        C = gyroscopic_coefficients(particle, [0.0, 1.0]).C
        assert C[0, 1, 0] == pytest.approx(-0.5, abs=1e-7)
        assert C[0, 1, 1] == pytest.approx(0.0, abs=1e-7)

    @pytest.mark.parametrize("y", [-1.5, 0.0, 0.8])
    def test_particle_closed_form(self, coupled_particle, y):
        """Numeric coefficients match the closed form for a = 0.5."""
        C = gyroscopic_coefficients(coupled_particle, [0.2, y]).C
        np.testing.assert_allclose(C, particle_gyro_oracle(0.5, y), atol=1e-7)

    def test_antisymmetry_defect(self, coupled_particle):
        """The raw pairing solve is antisymmetric up to differencing error."""
        coefficients = gyroscopic_coefficients(coupled_particle, [0.0, 1.0])
        assert coefficients.antisymmetry_defect <= 1e-6
        np.testing.assert_array_equal(coefficients.C, -coefficients.C.transpose(1, 0, 2))

    @pytest.mark.parametrize("s", [[0.0, 0.0], [math.pi / 3, 2.0]])
    def test_disk_vanishes(self, disk, s):
        """The disk has no gyroscopic tensor."""
        np.testing.assert_allclose(gyroscopic_coefficients(disk, s).C, 0.0, atol=1e-7)

    def test_veselova_closed_form(self, veselova):
        """C[0, 1, 1] = 0.6 (1 - 3) / 2.28 at gamma = (0.6, 0, 0.8)."""
        C = gyroscopic_coefficients(veselova, [0.6, 0.0]).C
        assert C[0, 1, 1] == pytest.approx(-1.2 / 2.28, abs=1e-12)
        assert C[0, 1, 0] == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("s", [[0.6, 0.0], [0.3, -0.5], [-0.4, 0.4]])
    def test_veselova_group_pipeline(self, veselova_group, s):
        """The numeric SO(3) pipeline reproduces the closed form."""
        expected = veselova_gyro_oracle(A3, gamma_from_shape(s))
        np.testing.assert_allclose(
            gyroscopic_coefficients(veselova_group, s).C, expected, atol=1e-6
        )

    def test_veselova_pole_vanishes(self, veselova):
        """Every term carries a factor gamma_i with i < n."""
        np.testing.assert_allclose(gyroscopic_coefficients(veselova, [0.0, 0.0]).C, 0.0)

    def test_section_independence_particle(self, particle):
        """Any point over s gives the same coefficients."""
        s = [0.5, 1.0]
        reference = gyroscopic_coefficients(particle, s).C
        shifted = gyroscopic_coefficients(particle, s, q=[0.5, 1.0, 7.0]).C
        np.testing.assert_allclose(shifted, reference, atol=1e-7)

    def test_section_independence_veselova(self, veselova_group):
        """Rotating the section within the fiber leaves C unchanged."""
        s = [0.3, -0.5]
        g = veselova_section(gamma_from_shape(s))
        angle = 0.9
        fiber = np.eye(3)
        fiber[:2, :2] = [[math.cos(angle), -math.sin(angle)], [math.sin(angle), math.cos(angle)]]
        reference = gyroscopic_coefficients(veselova_group, s).C
        moved = gyroscopic_coefficients(veselova_group, s, q=fiber @ g).C
        np.testing.assert_allclose(moved, reference, atol=1e-6)

    def test_projection_cross_check(self, coupled_particle):
        """The explicit horizontal projector agrees with the pairing solve."""
        s = [0.1, 0.7]
        np.testing.assert_allclose(
            gyroscopic_coefficients_by_projection(coupled_particle, s).C,
            gyroscopic_coefficients(coupled_particle, s).C,
            atol=1e-7,
        )

    def test_bracket_pairings_particle(self, particle):
        """<[hor_x, hor_y], hor_x> = -y at a = 0."""
        P = bracket_pairings(particle, [0.0, 2.0])
        assert P[0, 1, 0] == pytest.approx(-2.0, abs=1e-7)
        assert P[0, 0, 0] == 0.0


def interior_points(r: int, count: int = 3, seed: int = 7) -> list[np.ndarray]:
    rng = np.random.default_rng(seed)
    return [rng.uniform(-0.4, 0.4, size=r) for _ in range(count)]


@pytest.mark.parametrize("name", ["veselova", "veselova_4d"])
class TestVeselovaFrameBrackets:
    """The numeric SO(n) pipeline against the Veselova closed forms."""

    def test_frame_bracket(self, request, name):
        """[X_i, X_j] computed on the group is u_i ^ u_j."""
        sys = request.getfixturevalue(name)
        model = sys.config_model
        for s in interior_points(sys.r):
            g = sys.point_over(s)
            gamma = gamma_from_shape(s)
            for i in range(sys.r):
                for j in range(sys.r):
                    X_i, X_j = sys.horizontal_frame[i], sys.horizontal_frame[j]
                    np.testing.assert_allclose(
                        model.bracket(X_i, X_j, g),
                        veselova_frame_bracket_oracle(gamma, i, j),
                        atol=1e-7,
                    )

    def test_bracket_pairings(self, request, name):
        """bracket_pairings matches the closed form of <[X_i, X_j], X_l>."""
        sys = request.getfixturevalue(name)
        A = sys.params["A"]
        for s in interior_points(sys.r):
            gamma = gamma_from_shape(s)
            P = bracket_pairings(sys, s)
            expected = np.array(
                [
                    [
                        [oracle_bracket_pairing(A, gamma, i, j, l) for l in range(sys.r)]
                        for j in range(sys.r)
                    ]
                    for i in range(sys.r)
                ]
            )
            np.testing.assert_allclose(P, expected, atol=1e-6)

    def test_coefficients_pipeline(self, request, name):
        """The Gram solve on the group gives the closed-form C."""
        sys = request.getfixturevalue(name)
        for s in interior_points(sys.r):
            expected = veselova_gyro_oracle(sys.params["A"], gamma_from_shape(s))
            numeric = gyroscopic_coefficients(sys, s, use_override=False).C
            np.testing.assert_allclose(numeric, expected, atol=1e-6)


class TestTensoriality:
    """C depends on the constraint distribution, not on how it is written."""

    @given(
        scale=st.floats(min_value=0.2, max_value=5.0),
        y=st.floats(min_value=-1.5, max_value=1.5),
    )
    @settings(max_examples=15, deadline=None)
    def test_constraint_rescaling(self, scale, y):
        """Multiplying the particle constraint by a positive function leaves C unchanged."""
        a = 0.5
        gram = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, a], [0.0, a, 1.0]])

        def constraints(q):
            return (scale + q[0] ** 2) * np.array([[-q[1], 0.0, 1.0]])

        frame = frame_from_constraints(constraints, shape_indices=[0, 1], dimension=3)
        sys = SystemDefinition(
            label="rescaled particle",
            config_model=EuclideanChart(3),
            shape_dim=2,
            horizontal_frame=tuple(frame),
            section=lambda s: np.array([s[0], s[1], 0.0]),
            metric=lambda q: gram,
            projection=lambda q: np.asarray(q, dtype=float)[:2],
        )
        C = gyroscopic_coefficients(sys, [0.3, y]).C
        np.testing.assert_allclose(C, particle_gyro_oracle(a, y), atol=1e-6)


class TestTheta:
    """Tests for the 1-form Theta."""

    def test_particle(self, coupled_particle):
        """Theta = (2/7, -3/7) at (0, 1) for a = 0.5."""
        np.testing.assert_allclose(
            theta(coupled_particle, [0.0, 1.0]), [2.0 / 7.0, -3.0 / 7.0], atol=1e-8
        )
        np.testing.assert_allclose(particle_theta_oracle(0.5, 1.0), [2.0 / 7.0, -3.0 / 7.0])

    def test_disk(self, disk):
        """Theta vanishes on the disk."""
        np.testing.assert_allclose(theta(disk, [0.2, 0.4]), 0.0, atol=1e-7)

    @pytest.mark.parametrize("s", [[0.1, 0.2, 0.3], [-0.4, 0.0, 0.5]])
    def test_phi_simple_relation(self, veselova_4d, s):
        """Theta = (r - 1) d phi for a phi-simple system."""
        grad = fd_gradient(veselova_4d.phi, s, order=4)
        np.testing.assert_allclose(theta(veselova_4d, s), 2.0 * grad, atol=1e-6)


class TestGyroTwoForm:
    """Tests for the matrix of Omega_T."""

    @pytest.mark.parametrize("y,px,py", [(1.0, 1.0, 0.0), (0.5, -2.0, 1.5)])
    def test_particle(self, coupled_particle, y, px, py):
        """(Omega_T)_01 = -((1 - a^2) y p_x + a p_y) / (1 + (1 - a^2) y^2)."""
        a = 0.5
        expected = -((1 - a * a) * y * px + a * py) / (1 + (1 - a * a) * y * y)
        B = gyro_two_form(coupled_particle, ReducedState([0.0, y], [px, py]))
        assert B[0, 1] == pytest.approx(expected, abs=1e-7)
        assert B[1, 0] == pytest.approx(-expected, abs=1e-7)

    def test_zero_momentum(self, coupled_particle):
        """Omega_T is linear in p."""
        B = gyro_two_form(coupled_particle, ReducedState([0.0, 1.0], [0.0, 0.0]))
        np.testing.assert_array_equal(B, np.zeros((2, 2)))

    def test_disk(self, disk):
        """The disk has no gyroscopic two-form."""
        B = gyro_two_form(disk, ReducedState([0.3, 0.1], [1.0, -1.0]))
        np.testing.assert_allclose(B, 0.0, atol=1e-7)
