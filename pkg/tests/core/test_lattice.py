"""Unit tests for the frequency lattice, spectral fields and trajectories."""

import math

import numpy as np
import pytest

from nskq.core.errors import EmptyTrajectoryError, InvalidFieldError, LatticeMismatchError
from nskq.core.fields import FlowState, SpectralField
from nskq.core.lattice import FrequencyLattice
from nskq.core.trajectory import Trajectory, time_grid


class TestFrequencyLattice:
    """Tests for lattice geometry and coefficient layout."""

    def test_odd_modes_raise_error(self) -> None:
        """Test that N must be even."""
        with pytest.raises(ValueError, match="N must be an even integer"):
            FrequencyLattice(d=2, N=7)

    def test_mode_index_uses_fft_order(self) -> None:
        """Test that negative modes wrap to the end of each axis."""
        lattice = FrequencyLattice(d=2, N=8)

        assert lattice.mode_index((1, 0)) == (1, 0)
        assert lattice.mode_index((-1, 2)) == (7, 2)
        assert lattice.mode_index((-4, 0)) == (4, 0)

    def test_mode_outside_lattice_raises_error(self) -> None:
        """Test that |k_j| >= N/2 on the positive side is rejected."""
        lattice = FrequencyLattice(d=2, N=8)

        with pytest.raises(ValueError, match="outside the lattice"):
            lattice.mode_index((4, 0))

    def test_norm_mask_excludes_unpaired_modes(self) -> None:
        """Test that every mode with a -N/2 component is excluded."""
        lattice = FrequencyLattice(d=3, N=8)

        assert int(lattice.norm_mask.sum()) == 7**3
        assert not lattice.norm_mask[lattice.mode_index((-4, 1, 0))]

    def test_dealias_band(self) -> None:
        """Test the 2/3-rule cutoff (N - 1) // 3."""
        lattice = FrequencyLattice(d=2, N=16)

        assert lattice.dealias_cutoff == 5
        assert int(lattice.dealias_mask.sum()) == 11**2

    def test_single_mode_is_cosine(self) -> None:
        """Test that c(+-1) = 1/2 is cos(x) on the grid."""
        lattice = FrequencyLattice(d=2, N=16)
        coeffs = lattice.zeros()
        coeffs[lattice.mode_index((1, 0))] = 0.5
        coeffs[lattice.mode_index((-1, 0))] = 0.5

        values = lattice.to_physical(coeffs)

        x = 2.0 * math.pi * np.arange(16) / 16
        expected = np.cos(x)[:, None] * np.ones(16)[None, :]
        np.testing.assert_allclose(values, expected, atol=1e-13)
        np.testing.assert_allclose(lattice.from_physical(values), coeffs, atol=1e-14)

    def test_reflect(self) -> None:
        """Test that reflect maps c(k) to c(-k)."""
        lattice = FrequencyLattice(d=2, N=8)
        coeffs = lattice.zeros()
        coeffs[lattice.mode_index((2, -1))] = 3.0 + 1.0j

        reflected = lattice.reflect(coeffs)

        assert reflected[lattice.mode_index((-2, 1))] == 3.0 + 1.0j
        assert np.count_nonzero(reflected) == 1

    def test_embed_keeps_modes(self) -> None:
        """Test that embedding keeps every integer mode."""
        coarse = FrequencyLattice(d=2, N=8)
        fine = coarse.refine(16)
        coeffs = coarse.zeros()
        coeffs[coarse.mode_index((-3, 2))] = 1.5

        embedded = coarse.embed(coeffs, fine)

        assert embedded[fine.mode_index((-3, 2))] == 1.5
        assert np.count_nonzero(embedded) == 1

    def test_relabel_doubles_modes(self) -> None:
        """Test that relabel moves mode k to 2k."""
        lattice = FrequencyLattice(d=2, N=16)
        coeffs = lattice.zeros()
        coeffs[lattice.mode_index((1, -2))] = 2.0

        moved = lattice.relabel(coeffs, 2)

        assert moved[lattice.mode_index((2, -4))] == 2.0
        assert np.count_nonzero(moved) == 1

    def test_dilate_scales_spacing(self) -> None:
        """Test that dilation multiplies the frequency spacing."""
        lattice = FrequencyLattice(d=2, N=8)

        assert lattice.dilate(2.0).spacing == pytest.approx(2.0 * lattice.spacing)


class TestSpectralField:
    """Tests for coefficient validation."""

    def test_wrong_shape_raises_error(self) -> None:
        """Test that the coefficient shape must match the lattice."""
        lattice = FrequencyLattice(d=2, N=8)

        with pytest.raises(InvalidFieldError, match="expected"):
            SpectralField(lattice, np.zeros((8, 4)))

    def test_nan_raises_error(self) -> None:
        """Test that NaN coefficients are rejected."""
        lattice = FrequencyLattice(d=2, N=8)
        coeffs = lattice.zeros()
        coeffs[0, 1] = np.nan

        with pytest.raises(InvalidFieldError, match="NaN or Inf"):
            SpectralField(lattice, coeffs)

    def test_broken_symmetry_raises_error(self) -> None:
        """Test that real-flagged fields must be conjugate symmetric."""
        lattice = FrequencyLattice(d=2, N=8)
        coeffs = lattice.zeros()
        coeffs[lattice.mode_index((1, 0))] = 1.0

        with pytest.raises(InvalidFieldError, match="violates"):
            SpectralField(lattice, coeffs, real=True)

        assert SpectralField(lattice, coeffs, real=False).real is False

    def test_coefficients_are_read_only(self) -> None:
        """Test that stored coefficients cannot be mutated."""
        lattice = FrequencyLattice(d=2, N=8)
        field = SpectralField.zeros(lattice)

        with pytest.raises(ValueError):
            field.coeffs[0, 0] = 1.0

    def test_lattice_mismatch_raises_error(self) -> None:
        """Test that fields on different lattices cannot be added."""
        a = SpectralField.zeros(FrequencyLattice(d=2, N=8))
        b = SpectralField.zeros(FrequencyLattice(d=2, N=16))

        with pytest.raises(LatticeMismatchError):
            _ = a + b


class TestFlowState:
    """Tests for flow state construction."""

    def test_component_count_must_match_dimension(self) -> None:
        """Test that u has d components."""
        lattice = FrequencyLattice(d=3, N=4)
        zero = SpectralField.zeros(lattice)

        with pytest.raises(InvalidFieldError, match="Velocity has 2 components"):
            FlowState(a=zero, u=(zero, zero))

    def test_negative_time_raises_error(self) -> None:
        """Test that time stamps are nonnegative."""
        lattice = FrequencyLattice(d=2, N=4)

        with pytest.raises(InvalidFieldError, match="nonnegative"):
            FlowState.zeros(lattice, t=-1.0)

    def test_array_layout(self) -> None:
        """Test that the stacked array is (a, u_1, ..., u_d)."""
        lattice = FrequencyLattice(d=2, N=8)
        arr = lattice.zeros(3)
        arr[2, 0, 0] = 4.0

        state = FlowState.from_array(lattice, arr, t=0.5)

        assert state.as_array().shape == (3, 8, 8)
        assert state.u[1].coeffs[0, 0] == 4.0
        assert state.t == 0.5


class TestTrajectory:
    """Tests for time grids and trajectories."""

    def test_graded_grid(self) -> None:
        """Test uniform plus geometric nodes, with extra nodes merged."""
        grid = time_grid(1.0, 4, n_geometric=2, ratio=0.5, extra_nodes=(0.5, 0.3, 2.0))

        np.testing.assert_allclose(grid, [0.0625, 0.125, 0.25, 0.3, 0.5, 0.75, 1.0])

    def test_empty_trajectory_raises_error(self) -> None:
        """Test that a trajectory needs at least one node."""
        lattice = FrequencyLattice(d=2, N=4)

        with pytest.raises(EmptyTrajectoryError):
            Trajectory(lattice, np.array([]), np.zeros((0, 3, 4, 4)))

    def test_non_increasing_times_raise_error(self) -> None:
        """Test that times must increase strictly."""
        lattice = FrequencyLattice(d=2, N=4)

        with pytest.raises(InvalidFieldError, match="strictly increasing"):
            Trajectory(lattice, np.array([0.5, 0.5]), np.zeros((2, 3, 4, 4)))

    def test_restrict_and_lookup(self) -> None:
        """Test restriction to a horizon and nearest-node lookup."""
        lattice = FrequencyLattice(d=2, N=4)
        times = np.array([0.25, 0.5, 0.75, 1.0])
        traj = Trajectory(lattice, times, np.zeros((4, 3, 4, 4)))

        assert len(traj.restrict(0.5)) == 2
        assert traj.index_at(0.7) == 2
        assert traj.T == 1.0
        with pytest.raises(EmptyTrajectoryError):
            traj.restrict(0.1)
