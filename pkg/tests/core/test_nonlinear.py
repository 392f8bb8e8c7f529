"""Unit tests for the quadratic nonlinearities."""

import numpy as np
import pytest

from nskq.core.config import ModelParams
from nskq.core.errors import LatticeMismatchError
from nskq.core.fields import FlowState, SpectralField
from nskq.core.initial_data import generate_initial_data
from nskq.core.lattice import FrequencyLattice
from nskq.core.nonlinear import (
    bilinear_forcing,
    compare_product_paths,
    compute_f,
    compute_g1,
    compute_g2,
    compute_g3,
    forcing_array,
    nonlinearity,
)


@pytest.fixture
def params() -> ModelParams:
    """Unit physical constants."""
    return ModelParams(mu=1.0, nu=1.0, kappa=1.0, alpha=1.0)


def _mode(lattice: FrequencyLattice, k: tuple[int, ...], value: complex) -> SpectralField:
    coeffs = lattice.zeros()
    coeffs[lattice.mode_index(k)] = value
    return SpectralField(lattice, coeffs)


def _two_mode_state(
    lattice: FrequencyLattice, a_mode: tuple[int, int], u_mode: tuple[int, int]
) -> FlowState:
    """Density 1 at ``a_mode``, velocity (1, 0) at ``u_mode``."""
    return FlowState(
        a=_mode(lattice, a_mode, 1.0),
        u=(_mode(lattice, u_mode, 1.0), SpectralField(lattice, lattice.zeros())),
    )


def _low_band_state(lattice: FrequencyLattice, band: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    coeffs = lattice.from_physical(rng.standard_normal((lattice.d + 1, *lattice.shape)))
    keep = np.all(np.abs(lattice.integer_modes) <= band, axis=0)
    return coeffs * keep


class TestHandConvolutions:
    """Tests against two-mode convolutions worked by hand."""

    @pytest.mark.parametrize("method", ["fast", "oracle"])
    def test_orthogonal_wavevectors(self, method: str) -> None:
        """Test that u along x does not transport a varying along y."""
        lattice = FrequencyLattice(d=2, N=16)
        state = _two_mode_state(lattice, a_mode=(0, 1), u_mode=(1, 0))

        f = compute_f(state, method)

        assert f.coeffs[lattice.mode_index((1, 1))] == pytest.approx(0.0)

    @pytest.mark.parametrize("method", ["fast", "oracle"])
    def test_single_term_transport(self, method: str) -> None:
        """Test f(2, 0) = -(1, 0) . i(1, 0) = -i."""
        lattice = FrequencyLattice(d=2, N=16)
        state = _two_mode_state(lattice, a_mode=(1, 0), u_mode=(1, 0))

        f = compute_f(state, method)

        assert complex(f.coeffs[lattice.mode_index((2, 0))]) == pytest.approx(-1j, abs=1e-14)
        assert np.count_nonzero(np.abs(f.coeffs) > 1e-14) == 1

    @pytest.mark.parametrize("method", ["fast", "oracle"])
    def test_viscous_coupling_transpose(self, params: ModelParams, method: str) -> None:
        """Test g2(1, 1) = (0, -(mu + nu)) when Du is the transposed gradient."""
        lattice = FrequencyLattice(d=2, N=16)
        state = _two_mode_state(lattice, a_mode=(1, 0), u_mode=(0, 1))

        g2 = compute_g2(state, params, method, "transpose")

        idx = lattice.mode_index((1, 1))
        assert complex(g2[0].coeffs[idx]) == pytest.approx(0.0, abs=1e-14)
        assert complex(g2[1].coeffs[idx]) == pytest.approx(-2.0, abs=1e-13)

    def test_viscous_coupling_gradient(self, params: ModelParams) -> None:
        """Test that the gradient reading of Du gives g2(1, 1) = 0 for the same modes."""
        lattice = FrequencyLattice(d=2, N=16)
        state = _two_mode_state(lattice, a_mode=(1, 0), u_mode=(0, 1))

        g2 = compute_g2(state, params, "fast", "gradient")

        assert np.abs(g2[0].coeffs).max() < 1e-14
        assert np.abs(g2[1].coeffs).max() < 1e-14

    def test_transverse_mode_has_no_self_transport(self) -> None:
        """Test that a divergence-free single mode has g1 = 0."""
        lattice = FrequencyLattice(d=2, N=16)
        state = generate_initial_data(
            {"kind": "single_mode", "mode": [1, 2], "polarization": "transverse"}, lattice
        )

        g1 = compute_g1(state)

        assert max(float(np.abs(c.coeffs).max()) for c in g1) < 1e-13

    def test_zero_density_kills_density_terms(self, params: ModelParams) -> None:
        """Test that a = 0 gives g2 = g3 = 0."""
        lattice = FrequencyLattice(d=2, N=16)
        state = generate_initial_data({"kind": "power_law", "a_scale": 0.0}, lattice)

        g2 = compute_g2(state, params)
        g3 = compute_g3(state, params)

        assert all(not np.any(c.coeffs) for c in (*g2, *g3))


class TestProductPaths:
    """Tests for fast versus oracle agreement."""

    def test_paths_agree_in_two_dimensions(self, params: ModelParams) -> None:
        """Test every term on random real data at N=8."""
        report = compare_product_paths(FrequencyLattice(d=2, N=8), params, seeds=3)

        assert report.passes
        assert set(report.per_term) == {"f", "g1", "g2", "g3"}

    def test_paths_agree_in_three_dimensions(self, params: ModelParams) -> None:
        """Test every term on random real data at N=8, d=3."""
        report = compare_product_paths(FrequencyLattice(d=3, N=8), params, seeds=1)

        assert report.max_relative_error <= 1e-12

    def test_nonlinearity_reports_method(self, params: ModelParams) -> None:
        """Test that the output records the product path."""
        lattice = FrequencyLattice(d=2, N=8)
        state = generate_initial_data({"kind": "power_law"}, lattice)

        out = nonlinearity(state, params, method="oracle")

        assert out.method == "oracle"
        assert len(out.g_hat) == 2


class TestStructure:
    """Tests for bilinearity and the scaling law."""

    def test_bilinearity(self, params: ModelParams) -> None:
        """Test linearity of each slot of every term."""
        lattice = FrequencyLattice(d=2, N=16)
        x = FlowState.from_array(lattice, _low_band_state(lattice, 4, 0))
        y = FlowState.from_array(lattice, _low_band_state(lattice, 4, 1))
        z = FlowState.from_array(lattice, _low_band_state(lattice, 4, 2))
        yz = FlowState.from_array(lattice, y.as_array() + z.as_array())

        for term in ("f", "g1", "g2", "g3"):
            lhs = bilinear_forcing(x.scale(2.0), yz, term, params).as_array()
            rhs = 2.0 * (
                bilinear_forcing(x, y, term, params).as_array()
                + bilinear_forcing(x, z, term, params).as_array()
            )
            np.testing.assert_allclose(lhs, rhs, atol=1e-12 * np.abs(rhs).max())

    def test_bilinear_lattice_mismatch(self, params: ModelParams) -> None:
        """Test that slots must share a lattice."""
        x = FlowState.zeros(FrequencyLattice(d=2, N=8))
        y = FlowState.zeros(FrequencyLattice(d=2, N=16))

        with pytest.raises(LatticeMismatchError):
            bilinear_forcing(x, y, "f", params)

    def test_frequency_dilation_scaling(self, params: ModelParams) -> None:
        """Test f -> 4 f and g -> 8 g under a -> a(2x), u -> 2 u(2x)."""
        lattice = FrequencyLattice(d=2, N=32)
        U = _low_band_state(lattice, 2, 7)
        dilated = lattice.relabel(U, 2)
        dilated[1:] *= 2.0

        base = lattice.relabel(forcing_array(U, lattice, params, real=True), 2)
        scaled = forcing_array(dilated, lattice, params, real=True)

        scale = np.abs(scaled).max()
        np.testing.assert_allclose(scaled[0], 4.0 * base[0], atol=1e-11 * scale)
        np.testing.assert_allclose(scaled[1:], 8.0 * base[1:], atol=1e-11 * scale)
