"""Unit tests for the RK4 reference integrator."""

import numpy as np
import pytest

from nskq.core.config import ModelParams, SolverConfig
from nskq.core.errors import QuadratureToleranceError, StabilityError
from nskq.core.initial_data import generate_initial_data
from nskq.core.lattice import FrequencyLattice
from nskq.core.reference import RK4_STABILITY_LIMIT, reference_integrate, stiffness_bound
from nskq.core.symbol import propagate


class TestReferenceIntegrator:
    """Tests for step control and accuracy."""

    def test_too_few_steps_raise_error(self) -> None:
        """Test that a step beyond the stability interval is refused."""
        lattice = FrequencyLattice(d=2, N=16)
        data = generate_initial_data({"kind": "gaussian"}, lattice)

        with pytest.raises(StabilityError, match="exceeds"):
            reference_integrate(data, ModelParams(), T=1.0, fine_steps=1)

    def test_stiffness_grows_with_lattice(self) -> None:
        """Test that finer lattices need smaller steps."""
        params = ModelParams()

        coarse = stiffness_bound(FrequencyLattice(d=2, N=8), params)
        fine = stiffness_bound(FrequencyLattice(d=2, N=16), params)

        assert fine > coarse > RK4_STABILITY_LIMIT

    def test_linear_run_matches_semigroup(self) -> None:
        """Test that without forcing the integrator reproduces exp(-tA)."""
        lattice = FrequencyLattice(d=2, N=8)
        params = ModelParams()
        data = generate_initial_data({"kind": "gaussian"}, lattice)
        cfg = SolverConfig(T=0.1, terms=())

        traj = reference_integrate(data, params, T=0.1, fine_steps=20, cfg=cfg)

        expected = propagate(0.1, data.as_array(), lattice, params)
        np.testing.assert_allclose(traj.data[-1], expected, atol=1e-7 * np.abs(expected).max())

    def test_output_times(self) -> None:
        """Test that intermediate output times are hit exactly."""
        lattice = FrequencyLattice(d=2, N=8)
        data = generate_initial_data({"kind": "gaussian", "amplitude": 0.1}, lattice)

        traj = reference_integrate(
            data, ModelParams(), T=0.1, fine_steps=20, output_times=np.array([0.03, 0.1])
        )

        np.testing.assert_array_equal(traj.times, [0.03, 0.1])

    def test_no_refinement_raises_error(self) -> None:
        """Test that a certificate needs at least one step doubling."""
        lattice = FrequencyLattice(d=2, N=8)
        data = generate_initial_data({"kind": "gaussian"}, lattice)

        with pytest.raises(QuadratureToleranceError, match="did not reach"):
            reference_integrate(data, ModelParams(), T=0.1, fine_steps=20, max_refinements=0)

    def test_nonpositive_horizon_raises_error(self) -> None:
        """Test that T must be positive."""
        data = generate_initial_data({"kind": "zero"}, FrequencyLattice(d=2, N=8))

        with pytest.raises(ValueError, match="T must be positive"):
            reference_integrate(data, ModelParams(), T=0.0, fine_steps=10)
