"""Unit tests for the initial-data factory."""

from pathlib import Path

import numpy as np
import pytest

from nskq.core.config import InitialDataSpec
from nskq.core.errors import LatticeMismatchError, UnknownGeneratorError
from nskq.core.fields import conjugate_symmetry_defect
from nskq.core.initial_data import generate_initial_data
from nskq.core.lattice import FrequencyLattice
from nskq.core.norms import pm_norm
from nskq.core.snapshot import save_snapshot


class TestGeneratorDispatch:
    """Tests for kind dispatch and error messages."""

    def test_unsupported_kind_raises_error(self) -> None:
        """Test that unknown generator names are rejected."""
        lattice = FrequencyLattice(d=2, N=8)

        with pytest.raises(UnknownGeneratorError, match="Unsupported initial-data kind: vortex"):
            generate_initial_data({"kind": "vortex"}, lattice)

    def test_missing_kind_raises_error(self) -> None:
        """Test that a dictionary spec needs a kind."""
        lattice = FrequencyLattice(d=2, N=8)

        with pytest.raises(UnknownGeneratorError, match="must include 'kind'"):
            generate_initial_data({"amplitude": 1.0}, lattice)

    def test_error_is_a_value_error(self) -> None:
        """Test that generator errors are caught as ValueError."""
        lattice = FrequencyLattice(d=2, N=8)

        with pytest.raises(ValueError, match="Supported kinds"):
            generate_initial_data({"kind": "vortex"}, lattice)

    def test_zero_data(self) -> None:
        """Test the zero generator."""
        lattice = FrequencyLattice(d=3, N=4)

        state = generate_initial_data(InitialDataSpec(kind="zero"), lattice)

        assert not np.any(state.as_array())
        assert state.t == 0.0


class TestGenerators:
    """Tests for the norms and symmetry of generated data."""

    def test_power_law_norm_is_amplitude(self) -> None:
        """Test that A |xi|^-(d-1) has PM^(d-1) norm A."""
        lattice = FrequencyLattice(d=3, N=8)

        state = generate_initial_data({"kind": "power_law", "amplitude": 2.5}, lattice)

        assert pm_norm(state.a, 2.0) == pytest.approx(2.5)
        assert max(pm_norm(c, 2.0) for c in state.u) == pytest.approx(2.5)

    @pytest.mark.parametrize("r", [0.0, 1.0, 3.0])
    def test_single_mode_norm_is_amplitude(self, r: float) -> None:
        """Test that a unit-frequency pair has PM^r norm A for every r."""
        lattice = FrequencyLattice(d=2, N=8)

        state = generate_initial_data(
            {"kind": "single_mode", "amplitude": 0.7, "mode": [1, 0]}, lattice
        )

        assert pm_norm(state.a, r) == pytest.approx(0.7)
        assert pm_norm(state.u[0], r) == pytest.approx(0.7)
        assert pm_norm(state.u[1], r) == 0.0

    def test_single_mode_needs_matching_dimension(self) -> None:
        """Test that the mode length must equal d."""
        lattice = FrequencyLattice(d=3, N=8)

        with pytest.raises(ValueError, match="3-component mode"):
            generate_initial_data({"kind": "single_mode", "mode": [1, 0]}, lattice)

    def test_random_phase_is_real_and_seeded(self) -> None:
        """Test Hermitian phases and reproducibility."""
        lattice = FrequencyLattice(d=2, N=16)
        spec = InitialDataSpec(kind="power_law", random_phase=True)

        first = generate_initial_data(spec, lattice, seed=11)
        again = generate_initial_data(spec, lattice, seed=11)
        other = generate_initial_data(spec, lattice, seed=12)

        assert first.real is True
        assert conjugate_symmetry_defect(first.as_array(), lattice) < 1e-12
        np.testing.assert_array_equal(first.as_array(), again.as_array())
        assert not np.allclose(first.as_array(), other.as_array())
        assert pm_norm(first.a, 1.0) == pytest.approx(1.0)

    def test_transverse_velocity_is_divergence_free(self) -> None:
        """Test that transverse polarization gives xi . u = 0."""
        lattice = FrequencyLattice(d=2, N=16)

        state = generate_initial_data(
            {"kind": "exponential_tail", "polarization": "transverse"}, lattice
        )

        div = np.sum(lattice.wavevectors * state.as_array()[1:], axis=0)
        assert np.abs(div).max() < 1e-12

    def test_dealias_restricts_band(self) -> None:
        """Test that dealiased data vanishes outside the 2/3 band."""
        lattice = FrequencyLattice(d=2, N=16)

        state = generate_initial_data({"kind": "gaussian", "dealias": True}, lattice)

        outside = ~lattice.dealias_mask
        assert not np.any(state.as_array()[:, outside])

    def test_component_scales(self) -> None:
        """Test that a_scale and u_scale act per component."""
        lattice = FrequencyLattice(d=2, N=8)

        state = generate_initial_data(
            {"kind": "exponential_tail", "a_scale": 0.0, "u_scale": 2.0}, lattice
        )

        assert pm_norm(state.a, 0.0) == 0.0
        assert max(pm_norm(c, 0.0) for c in state.u) > 0.0

    def test_cutoff(self) -> None:
        """Test the radial cutoff."""
        lattice = FrequencyLattice(d=2, N=16)

        state = generate_initial_data({"kind": "power_law", "cutoff": 2.0}, lattice)

        outside = lattice.magnitude > 2.0
        assert not np.any(state.a.coeffs[outside])


class TestSnapshotGenerator:
    """Tests for snapshot-backed initial data."""

    def test_snapshot_round_trip(self, tmp_path: Path) -> None:
        """Test that snapshot data is read back at t = 0."""
        lattice = FrequencyLattice(d=2, N=8)
        source = generate_initial_data({"kind": "power_law"}, lattice).with_time(0.5)
        path = save_snapshot(source, tmp_path / "data.nskq")

        state = generate_initial_data({"kind": "snapshot", "path": str(path)}, lattice)

        assert state.t == 0.0
        np.testing.assert_array_equal(state.as_array(), source.as_array())

    def test_snapshot_lattice_mismatch(self, tmp_path: Path) -> None:
        """Test that snapshots on another lattice are rejected."""
        source = generate_initial_data({"kind": "power_law"}, FrequencyLattice(d=2, N=8))
        path = save_snapshot(source, tmp_path / "data.nskq")

        with pytest.raises(LatticeMismatchError):
            generate_initial_data(
                {"kind": "snapshot", "path": str(path)}, FrequencyLattice(d=2, N=16)
            )
