"""
Tests for the built-in systems and their closed forms.
"""

import math

import numpy as np
import pytest

from chaplygin_kit.core.exceptions import ChartFloorViolation, InvalidParams
from chaplygin_kit.core.models import ReducedState
from chaplygin_kit.dynamics import integrate
from chaplygin_kit.systems import (
    DiskParams,
    ParticleParams,
    VeselovaParams,
    build_system,
    disk_metric_oracle,
    gamma_from_shape,
    make_nonholonomic_particle,
    make_veselova,
    make_vertical_disk,
    oracle_bracket_pairing,
    particle_first_integral,
    particle_potential_Ua,
    veselova_frame_bracket_oracle,
    veselova_phi,
    veselova_section,
)

GAMMA = (0.6, 0.0, 0.8)
A3 = (1.0, 2.0, 3.0)


class TestParams:
    """Tests for parameter validation."""

    @pytest.mark.parametrize("a", [1.0, -1.0, 2.5, math.nan])
    def test_particle_coupling(self, a):
        """|a| < 1 keeps the kinetic energy positive definite."""
        with pytest.raises(InvalidParams) as exc_info:
            make_nonholonomic_particle(ParticleParams(a=a))
        assert exc_info.value.field == "a"

    def test_particle_potential_name(self):
        """Only known potential names are accepted."""
        with pytest.raises(InvalidParams):
            make_nonholonomic_particle(ParticleParams(potential="gravity"))

    def test_particle_potential_type(self):
        """A potential is a known name or a callable."""
        with pytest.raises(InvalidParams) as exc_info:
            make_nonholonomic_particle(ParticleParams(potential=5))  # type: ignore[arg-type]
        assert exc_info.value.field == "potential"

    def test_particle_custom_potential(self):
        """A callable potential enters the Hamiltonian."""
        sys = make_nonholonomic_particle(ParticleParams(potential=lambda s: float(s[0])))
        assert sys.potential(np.array([2.0, 0.0])) == 2.0
        assert sys.params["potential"] == "custom"

    @pytest.mark.parametrize("name", ["m", "I", "J", "R"])
    def test_disk_positive(self, name):
        """Every disk parameter is positive."""
        with pytest.raises(InvalidParams):
            make_vertical_disk(DiskParams(**{name: 0.0}))

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"A": (1.0, 2.0)},
            {"A": (1.0, -2.0, 3.0)},
            {"delta": 0.0},
            {"delta": 1.0},
            {"realization": "matrix"},
        ],
    )
    def test_veselova(self, kwargs):
        """Out-of-range Veselova parameters are rejected."""
        with pytest.raises(InvalidParams):
            make_veselova(VeselovaParams(**kwargs))


class TestBuildSystem:
    """Tests for building systems by name."""

    def test_particle(self):
        """Plain mappings become parameter records."""
        sys = build_system("particle", {"a": 0.3, "potential": "U_a"})
        assert sys.params == {"a": 0.3, "potential": "U_a"}
        assert sys.phi is None

    def test_veselova_list(self):
        """A given as a list fixes the dimension."""
        sys = build_system("veselova", {"A": [1, 2, 3, 4]})
        assert sys.r == 3
        assert sys.params["A"] == [1.0, 2.0, 3.0, 4.0]

    def test_params_untouched(self):
        """The caller's mapping is left as given."""
        params = {"A": [1, 2, 3], "delta": 0.2}
        build_system("veselova", params)
        assert params == {"A": [1, 2, 3], "delta": 0.2}
        assert isinstance(params["A"], list)

    def test_veselova_coerced(self):
        """Validation returns float entries of A."""
        params = VeselovaParams(A=[1, 2, 3]).validate()  # type: ignore[arg-type]
        assert params.A == (1.0, 2.0, 3.0)
        assert all(isinstance(a, float) for a in params.A)

    def test_defaults(self):
        """Missing parameters take their defaults."""
        assert build_system("disk").r == 2

    def test_unknown_name(self):
        """Unknown systems are rejected with the list of names."""
        with pytest.raises(InvalidParams) as exc_info:
            build_system("rattleback")
        assert "particle" in exc_info.value.reason


class TestParticleClosedForms:
    """Tests for the particle closed forms."""

    def test_potential(self):
        """U_a = 1/4 ln(1 + (1 - a^2) y^2)."""
        assert particle_potential_Ua(0.5)(np.array([3.0, 1.0])) == pytest.approx(
            0.25 * math.log(1.75)
        )

    def test_first_integral_value(self):
        """F = exp(p_y^2) sqrt(1 + y^2)."""
        state = ReducedState([0.0, 1.0], [5.0, 1.0])
        assert particle_first_integral(state) == pytest.approx(math.e * math.sqrt(2.0))

    def test_first_integral_conserved(self):
        """F is constant along the a = 0 flow with potential U_0."""
        sys = make_nonholonomic_particle(ParticleParams(a=0.0, potential="U_a"))
        trajectory = integrate(sys, ReducedState([0.0, 0.5], [1.0, 0.3]), 5.0, tol=1e-11)
        values = [
            particle_first_integral(ReducedState(s, p))
            for s, p in zip(trajectory.s, trajectory.p)
        ]
        np.testing.assert_allclose(values, values[0], rtol=1e-7)


class TestDisk:
    """Tests for the vertical disk."""

    def test_metric_oracle(self):
        """K = diag(I, J + m R^2)."""
        params = DiskParams(m=2.0, I=1.0, J=0.5, R=3.0)
        np.testing.assert_allclose(disk_metric_oracle(params), np.diag([1.0, 18.5]))

    def test_section(self, disk):
        """The section sits at the origin of the plane."""
        np.testing.assert_allclose(disk.section(np.array([0.3, 0.4])), [0.0, 0.0, 0.3, 0.4])


class TestVeselovaClosedForms:
    """Tests for the Veselova closed forms."""

    def test_bracket_pairing(self):
        """<[X_0, X_1], X_1> = -2.4 at gamma = (0.6, 0, 0.8), A = diag(1, 2, 3)."""
        assert oracle_bracket_pairing(A3, GAMMA, 0, 1, 1) == pytest.approx(-2.4)

    def test_bracket_pairing_diagonal(self):
        """[X_i, X_i] = 0."""
        assert oracle_bracket_pairing(A3, (0.3, 0.4, math.sqrt(0.75)), 1, 1, 1) == 0.0

    def test_bracket_pairing_isotropic(self):
        """Every pairing vanishes for A proportional to the identity."""
        gamma = (0.3, 0.4, math.sqrt(0.75))
        for i in range(2):
            for j in range(2):
                for l in range(2):  # noqa: E741
                    assert oracle_bracket_pairing((2.0, 2.0, 2.0), gamma, i, j, l) == 0.0

    def test_bracket_pairing_index(self):
        """Indices run below n - 1."""
        with pytest.raises(InvalidParams) as exc_info:
            oracle_bracket_pairing(A3, GAMMA, 0, 2, 1)
        assert exc_info.value.field == "j"

    def test_frame_bracket(self):
        """[X_0, X_1] = u_0 ^ u_1 with u_i = e_i - (gamma_i / gamma_n) e_n."""
        expected = np.array([[0.0, 1.0, 0.0], [-1.0, 0.0, 0.75], [0.0, -0.75, 0.0]])
        np.testing.assert_allclose(veselova_frame_bracket_oracle(GAMMA, 0, 1), expected)
        np.testing.assert_array_equal(veselova_frame_bracket_oracle(GAMMA, 1, 1), np.zeros((3, 3)))

    def test_gamma_from_shape(self):
        """gamma lies on the unit sphere."""
        gamma = gamma_from_shape([0.6, 0.0])
        np.testing.assert_allclose(gamma, GAMMA)

    @pytest.mark.parametrize("s,delta", [([0.8, 0.6], 0.1), ([0.99, 0.0], 0.2), ([1.5, 0.0], 0.0)])
    def test_chart_floor(self, s, delta):
        """Points below the floor are rejected."""
        with pytest.raises(ChartFloorViolation):
            gamma_from_shape(s, delta)

    @pytest.mark.parametrize("gamma", [GAMMA, (0.0, 0.0, 1.0), (-0.2, 0.5, math.sqrt(0.71))])
    def test_section(self, gamma):
        """g is a rotation with g^T e_n = gamma."""
        g = veselova_section(gamma)
        np.testing.assert_allclose(g @ g.T, np.eye(3), atol=1e-14)
        assert np.linalg.det(g) == pytest.approx(1.0)
        np.testing.assert_allclose(g[-1], gamma, atol=1e-14)

    def test_phi(self):
        """phi = -1/2 ln(A gamma, gamma)."""
        phi = veselova_phi(A3)
        assert phi(np.zeros(2)) == pytest.approx(-0.5 * math.log(3.0))
        assert phi(np.array([0.6, 0.0])) == pytest.approx(-0.5 * math.log(2.28))
