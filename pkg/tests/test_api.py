"""
Tests for the programmatic API.
"""

import numpy as np
import pytest

from chaplygin_kit import NotPhiSimple, build_system, diagnose, hamiltonise_run, simulate


class TestSimulate:
    """Tests for simulate."""

    def test_free_disk(self):
        """Momenta of the free disk are constant."""
        trajectory = simulate(build_system("disk"), s0=[0.0, 0.0], p0=[1.0, 2.0], t_end=1.0)
        np.testing.assert_allclose(trajectory.p[-1], [1.0, 2.0], atol=1e-9)
        assert "liouville_residual" in trajectory.channels

    def test_without_channel(self):
        """The Liouville channel is optional."""
        trajectory = simulate(
            build_system("particle"), [0.0, 0.5], [1.0, 0.2], 0.1, with_liouville=False
        )
        assert trajectory.channels == {}


class TestDiagnose:
    """Tests for diagnose."""

    def test_grid_tuples(self):
        """Grids can be given as (min, max, num) per axis."""
        report = diagnose(build_system("particle"), [(-1.0, 1.0, 5), (-1.0, 1.0, 5)], samples=4)
        assert report.exactness.is_exact
        assert report.liouville_residual_stats.count == 4


class TestHamiltoniseRun:
    """Tests for hamiltonise_run."""

    def test_builtin_phi(self):
        """Systems with a known phi need no grid."""
        trajectory = hamiltonise_run(
            build_system("particle"), [0.0, 0.5], [1.0, 0.2], 0.1, dtau=0.01
        )
        assert trajectory.tau[-1] == pytest.approx(0.1)
        assert trajectory.metadata.integrator == "implicit-midpoint"

    def test_detected_phi(self):
        """Without a known phi the grid is used to detect it."""
        sys = build_system("particle", {"a": 0.5})
        with pytest.raises(NotPhiSimple):
            hamiltonise_run(sys, [0.0, 0.5], [1.0, 0.2], 0.1, grid=[(-1, 1, 5), (-1, 1, 5)])

    def test_grid_required(self):
        """A system without phi needs a grid or an explicit phi."""
        with pytest.raises(ValueError):
            hamiltonise_run(build_system("particle", {"a": 0.5}), [0.0, 0.5], [1.0, 0.2], 0.1)
