"""Unit tests for pseudo-measure, Kato and X_T / Y_T norms."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nskq.core.config import SolverConfig
from nskq.core.errors import InvalidFieldError, SaturationError
from nskq.core.fields import SpectralField
from nskq.core.lattice import FrequencyLattice
from nskq.core.norms import kato_norm, norm_report, pm_norm, x_norm, y_norm
from nskq.core.trajectory import ComponentSeries, Trajectory

seeds = st.integers(min_value=0, max_value=2**32 - 1)
exponents = st.floats(min_value=0.0, max_value=4.0)
scalars = st.floats(min_value=-1e3, max_value=1e3)


def _single_mode(lattice: FrequencyLattice, k: tuple[int, ...], value: complex) -> np.ndarray:
    coeffs = lattice.zeros()
    coeffs[lattice.mode_index(k)] = value
    return coeffs


def _power_law(lattice: FrequencyLattice, s: float) -> np.ndarray:
    mag = lattice.magnitude
    safe = np.where(mag > 0.0, mag, 1.0)
    return np.where(lattice.norm_mask & (mag > 0.0), safe ** (-s), 0.0).astype(complex)


class TestPseudoMeasureNorm:
    """Tests for the discrete PM^r norm."""

    def test_weight_cancellation(self) -> None:
        """Test that |xi|^-2 has PM^2 norm 1."""
        lattice = FrequencyLattice(d=2, N=16)

        assert pm_norm(SpectralField(lattice, _power_law(lattice, 2.0)), 2.0) == pytest.approx(1.0)

    def test_zero_field(self) -> None:
        """Test that the zero field has norm 0 for every r."""
        zero = SpectralField.zeros(FrequencyLattice(d=2, N=8))

        assert pm_norm(zero, 0.0) == 0.0
        assert pm_norm(zero, 3.5) == 0.0

    def test_single_mode(self) -> None:
        """Test the one-term supremum."""
        lattice = FrequencyLattice(d=2, N=8)

        assert pm_norm(SpectralField(lattice, _single_mode(lattice, (1, 0), 3.0)), 1.0) == 3.0

    def test_unpaired_mode_ignored(self) -> None:
        """Test that the -N/2 mode never enters a norm."""
        lattice = FrequencyLattice(d=2, N=8)
        field = SpectralField(lattice, _single_mode(lattice, (-4, 0), 5.0))

        assert pm_norm(field, 0.0) == 0.0

    def test_negative_exponent_raises_error(self) -> None:
        """Test that r < 0 is rejected."""
        lattice = FrequencyLattice(d=2, N=8)

        with pytest.raises(ValueError, match="nonnegative"):
            pm_norm(SpectralField.zeros(lattice), -1.0)

    def test_nan_coefficients_raise_error(self) -> None:
        """Test that NaN coefficients are rejected by the array form."""
        from nskq.core.norms import pm_norm_array

        lattice = FrequencyLattice(d=2, N=8)
        coeffs = lattice.zeros()
        coeffs[1, 1] = np.nan

        with pytest.raises(InvalidFieldError):
            pm_norm_array(coeffs, lattice, 0.0)


class TestPseudoMeasureProperties:
    """Property tests for the PM^r norm."""

    lattice = FrequencyLattice(d=2, N=8)

    def _field(self, seed: int) -> SpectralField:
        rng = np.random.default_rng(seed)
        coeffs = rng.normal(size=self.lattice.shape) + 1j * rng.normal(size=self.lattice.shape)
        return SpectralField(self.lattice, coeffs)

    @given(seed=seeds, r=exponents, re=scalars, im=scalars)
    def test_homogeneity(self, seed: int, r: float, re: float, im: float) -> None:
        """Test pm(lam f) = |lam| pm(f) for complex lam."""
        field = self._field(seed)
        lam = complex(re, im)

        scaled = pm_norm(SpectralField(self.lattice, lam * field.coeffs), r)

        assert scaled == pytest.approx(abs(lam) * pm_norm(field, r), rel=1e-12, abs=1e-300)

    @given(first=seeds, second=seeds, r=exponents)
    @settings(max_examples=50)
    def test_triangle_inequality(self, first: int, second: int, r: float) -> None:
        """Test pm(f + g) <= pm(f) + pm(g)."""
        f = self._field(first)
        g = self._field(second)

        total = pm_norm(SpectralField(self.lattice, f.coeffs + g.coeffs), r)

        assert total <= (pm_norm(f, r) + pm_norm(g, r)) * (1.0 + 1e-12)

    @given(seed=seeds, r=exponents, N=st.sampled_from([8, 10, 16]))
    @settings(max_examples=50)
    def test_refinement_never_decreases(self, seed: int, r: float, N: int) -> None:
        """Test that embedding into a finer lattice at fixed L keeps or raises the norm."""
        field = self._field(seed)
        finer = self.lattice.refine(N)

        refined = pm_norm(SpectralField(finer, self.lattice.embed(field.coeffs, finer)), r)

        assert refined >= pm_norm(field, r)


class TestKatoNorm:
    """Tests for the discrete Kato norm."""

    def test_heat_evolution_of_critical_data(self) -> None:
        """Test sup_y y^(1/3) exp(-y) for heat-evolved |xi|^-(d-1) data."""
        lattice = FrequencyLattice(d=2, N=16)
        u0 = _power_law(lattice, 1.0)
        times = np.unique(np.concatenate([np.geomspace(1e-3, 1.0, 200), [1.0 / 3.0]]))
        fields = [np.exp(-t * lattice.magnitude**2) * u0 for t in times]
        series = ComponentSeries.from_fields(lattice, times, fields)

        value = kato_norm(series, p=3.0, r=1.0)

        expected = (1.0 / 3.0) ** (1.0 / 3.0) * math.exp(-1.0 / 3.0)
        assert value == pytest.approx(expected, rel=1e-12)
        assert value == pytest.approx(0.4968, abs=1e-4)

    def test_zero_trajectory(self) -> None:
        """Test that the zero series has norm 0."""
        lattice = FrequencyLattice(d=2, N=8)
        series = ComponentSeries.from_fields(lattice, [0.5, 1.0], [lattice.zeros()] * 2)

        assert kato_norm(series, p=3.0, r=1.0) == 0.0

    def test_constant_single_mode(self) -> None:
        """Test that a stationary unit mode peaks at t = T."""
        lattice = FrequencyLattice(d=2, N=8)
        mode = _single_mode(lattice, (1, 0), 1.0)
        series = ComponentSeries.from_fields(lattice, [0.25, 0.5, 1.0], [mode] * 3)

        assert kato_norm(series, p=3.0, r=0.0) == pytest.approx(1.0)
        assert kato_norm(series, p=3.0, r=0.0, T=0.5) == pytest.approx(0.5 ** (1.0 / 3.0))


class TestTrajectoryNorms:
    """Tests for the X_T and Y_T norms."""

    def _stationary_velocity(self, t: float = 1.0) -> Trajectory:
        lattice = FrequencyLattice(d=2, N=8)
        data = lattice.zeros(3)
        data[1] = _single_mode(lattice, (1, 0), 1.0)
        return Trajectory(lattice, np.array([t]), data[None], real=False)

    def test_zero_trajectory(self) -> None:
        """Test that the zero trajectory has zero X and Y norms."""
        lattice = FrequencyLattice(d=2, N=8)
        traj = Trajectory(lattice, np.array([0.5, 1.0]), np.zeros((2, 3, 8, 8)))
        cfg = SolverConfig(p=3.0)

        assert x_norm(traj, cfg) == 0.0
        assert y_norm(traj, cfg, c0=0.5) == 0.0

    def test_velocity_only_equals_kato_norm(self) -> None:
        """Test that with a = 0 the X norm is the velocity Kato norm."""
        traj = self._stationary_velocity()
        cfg = SolverConfig(p=3.0)

        expected = kato_norm(traj.component("u"), 3.0, 1.0)

        assert x_norm(traj, cfg) == pytest.approx(expected)
        assert expected == pytest.approx(1.0)

    def test_unit_weight(self) -> None:
        """Test that c0 = 0 gives the X norm."""
        traj = self._stationary_velocity()
        cfg = SolverConfig(p=3.0)

        assert y_norm(traj, cfg, c0=0.0) == x_norm(traj, cfg)

    def test_scalar_analytic_weight(self) -> None:
        """Test that |xi| = 1 at t = 1 with c0 = 1 multiplies by e."""
        traj = self._stationary_velocity()
        cfg = SolverConfig(p=3.0)

        assert y_norm(traj, cfg, c0=1.0) == pytest.approx(math.e * x_norm(traj, cfg))

    def test_weight_saturation_raises_error(self) -> None:
        """Test that an overflowing weight is flagged."""
        traj = self._stationary_velocity()

        with pytest.raises(SaturationError, match="lattice edge"):
            y_norm(traj, SolverConfig(p=3.0), c0=1000.0)

    def test_norm_report_rows(self) -> None:
        """Test that the report has one row per node and a running X norm."""
        lattice = FrequencyLattice(d=2, N=8)
        data = np.zeros((2, 3, 8, 8), dtype=complex)
        data[0, 1] = _single_mode(lattice, (1, 0), 1.0)
        traj = Trajectory(lattice, np.array([0.5, 1.0]), data, real=False)

        rows = norm_report(traj, SolverConfig(p=3.0), c0=0.5).rows()

        assert len(rows) == 2
        assert rows[0][0] == 0.5
        assert rows[1][4] == rows[0][4]
