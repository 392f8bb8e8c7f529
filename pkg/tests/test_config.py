"""Unit tests for run configuration models."""

import math

import pytest

from nskq.core.config import (
    BootstrapConfig,
    InitialDataSpec,
    LatticeSpec,
    ModelParams,
    RunConfig,
    SolverConfig,
)


class TestModelParams:
    """Tests for physical constants validation."""

    def test_default_decay_constant(self) -> None:
        """Test that c0 defaults to the closed-form spectral rate."""
        params = ModelParams()

        assert params.decay == pytest.approx((3.0 - math.sqrt(5.0)) / 2.0)

    def test_explicit_decay_constant_is_kept(self) -> None:
        """Test that a supplied c0 overrides the prediction."""
        params = ModelParams(c0=0.25)

        assert params.decay == 0.25

    def test_viscosity_capped_by_mu(self) -> None:
        """Test that the transverse rate mu caps c0."""
        params = ModelParams(mu=0.1, nu=10.0, kappa=1.0)

        assert params.decay == pytest.approx(0.1)

    def test_nonpositive_mu_raises_error(self) -> None:
        """Test that mu <= 0 is rejected."""
        with pytest.raises(ValueError, match="must be positive and finite"):
            ModelParams(mu=0.0)

    def test_nonpositive_kappa_raises_error(self) -> None:
        """Test that kappa <= 0 is rejected."""
        with pytest.raises(ValueError, match="must be positive and finite"):
            ModelParams(kappa=-1.0)

    def test_negative_viscosity_sum_raises_error(self) -> None:
        """Test that mu + nu <= 0 is rejected."""
        with pytest.raises(ValueError, match="mu \\+ nu must be positive"):
            ModelParams(mu=1.0, nu=-1.0)

    def test_negative_nu_allowed_when_sum_positive(self) -> None:
        """Test that a negative bulk viscosity is fine while mu + nu > 0."""
        params = ModelParams(mu=1.0, nu=-0.5)

        assert params.nu == -0.5
        assert params.decay > 0.0

    def test_invalid_c0_raises_error(self) -> None:
        """Test that a nonpositive c0 is rejected."""
        with pytest.raises(ValueError, match="c0 must be positive"):
            ModelParams(c0=0.0)


class TestLatticeSpec:
    """Tests for lattice shape validation."""

    def test_odd_modes_raise_error(self) -> None:
        """Test that odd N is rejected."""
        with pytest.raises(ValueError, match="N must be an even integer"):
            LatticeSpec(N=15)

    def test_dimension_one_raises_error(self) -> None:
        """Test that d < 2 is rejected."""
        with pytest.raises(ValueError, match="d must be at least 2"):
            LatticeSpec(d=1)

    def test_high_dimension_warns(self) -> None:
        """Test that d > 3 is legal but warns."""
        with pytest.warns(UserWarning, match="only d = 2 and d = 3 are tuned"):
            spec = LatticeSpec(d=4, N=4)

        assert spec.d == 4

    def test_build_lattice(self) -> None:
        """Test that LatticeSpec builds the matching lattice."""
        lattice = LatticeSpec(d=3, N=8, L=4.0).build()

        assert lattice.shape == (8, 8, 8)
        assert lattice.spacing == pytest.approx(2.0 * math.pi / 4.0)


class TestSolverConfig:
    """Tests for Duhamel solver settings."""

    def test_default_shift_is_two_over_p(self) -> None:
        """Test that delta defaults to 2/p."""
        cfg = SolverConfig(p=4.0)

        assert cfg.shift == pytest.approx(0.5)

    def test_kato_exponent_must_exceed_two(self) -> None:
        """Test that p <= 2 is rejected."""
        with pytest.raises(ValueError, match="p > 2"):
            SolverConfig(p=2.0)

    def test_shift_out_of_range_raises_error(self) -> None:
        """Test that delta above 2/p is rejected."""
        with pytest.raises(ValueError, match="delta must lie in"):
            SolverConfig(p=3.0, delta=1.0)

    def test_ratio_out_of_range_raises_error(self) -> None:
        """Test that the geometric ratio must lie in (0, 1)."""
        with pytest.raises(ValueError, match="grid_ratio must lie in"):
            SolverConfig(grid_ratio=1.0)

    def test_large_grid_warns(self) -> None:
        """Test that an expensive uniform grid warns."""
        with pytest.warns(UserWarning, match="very expensive"):
            SolverConfig(n_uniform=5000)

    def test_dimension_hypothesis(self) -> None:
        """Test the d - 3 + 4/p > 0 check."""
        SolverConfig(p=3.0).check_dimension(2)

        with pytest.raises(ValueError, match="d - 3 \\+ 4/p must be positive"):
            SolverConfig(p=4.0).check_dimension(2)

    def test_unknown_term_raises_error(self) -> None:
        """Test that only f, g1, g2 and g3 are accepted."""
        with pytest.raises(ValueError):
            SolverConfig(terms=("f", "g4"))  # type: ignore[arg-type]


class TestBootstrapConfig:
    """Tests for bootstrap constants."""

    def test_lambda_alias(self) -> None:
        """Test that the weight amplitude is read from the 'lambda' key."""
        cfg = BootstrapConfig.model_validate({"lambda": 2.5})

        assert cfg.lam == 2.5
        assert cfg.model_dump(by_alias=True)["lambda"] == 2.5

    def test_derived_constants(self) -> None:
        """Test mu and D_eps for C = C_eps = 1."""
        cfg = BootstrapConfig()

        assert cfg.mu_boot == pytest.approx(1.0 / 12.0)
        assert cfg.D_eps == pytest.approx(3.0)

    def test_dyadic_horizons(self) -> None:
        """Test the horizon list 2^-k."""
        cfg = BootstrapConfig(k_min=2, k_max=4)

        assert cfg.horizons == [0.25, 0.125, 0.0625]

    def test_resolved_eta_from_heat_constant(self) -> None:
        """Test eta_eps = (D_eps / (2 D_p_eps))^p."""
        cfg = BootstrapConfig(D_p_eps=1.5)

        assert cfg.resolved_eta(3.0) == pytest.approx(1.0)

    def test_resolved_eta_override(self) -> None:
        """Test that an explicit eta_eps wins."""
        cfg = BootstrapConfig(D_p_eps=1.5, eta_eps=0.3)

        assert cfg.resolved_eta(3.0) == 0.3

    def test_resolved_eta_without_constants_raises_error(self) -> None:
        """Test that eta_eps cannot be formed without D_p_eps."""
        with pytest.raises(ValueError, match="eta_eps needs"):
            BootstrapConfig().resolved_eta(3.0)

    def test_epsilon_range(self) -> None:
        """Test that epsilon must lie in (0, 1)."""
        with pytest.raises(ValueError, match="epsilon must lie in"):
            BootstrapConfig(epsilon=1.0)

    def test_horizon_range(self) -> None:
        """Test that k_max >= k_min."""
        with pytest.raises(ValueError, match="k_min <= k_max"):
            BootstrapConfig(k_min=5, k_max=3)


class TestInitialDataSpec:
    """Tests for initial-data generator specs."""

    def test_unsupported_kind_raises_error(self) -> None:
        """Test that unknown generator names are rejected."""
        with pytest.raises(ValueError, match="Unsupported initial-data kind: bogus"):
            InitialDataSpec(kind="bogus")

    def test_snapshot_requires_path(self) -> None:
        """Test that snapshot data needs a path."""
        with pytest.raises(ValueError, match="requires 'path'"):
            InitialDataSpec(kind="snapshot")

    def test_negative_rate_raises_error(self) -> None:
        """Test that sigma0 must be nonnegative."""
        with pytest.raises(ValueError, match="sigma0 must be a nonnegative rate"):
            InitialDataSpec(kind="exponential_tail", sigma0=-1.0)


class TestRunConfig:
    """Tests for the top-level run configuration."""

    def test_defaults(self) -> None:
        """Test default run configuration."""
        config = RunConfig()

        assert config.mode == "simulate"
        assert config.seed == 0
        assert config.lattice.N == 128

    def test_verify_requires_check(self) -> None:
        """Test that verify mode needs a check name."""
        with pytest.raises(ValueError, match="requires 'check'"):
            RunConfig(mode="verify")

    def test_unknown_check_raises_error(self) -> None:
        """Test that unknown check names are rejected."""
        with pytest.raises(ValueError, match="Unknown check: lemma-foo"):
            RunConfig(mode="verify", check="lemma-foo")

    def test_dimension_hypothesis_enforced(self) -> None:
        """Test that d=2 with p=4 fails the standing hypothesis."""
        with pytest.raises(ValueError, match="d - 3 \\+ 4/p must be positive"):
            RunConfig(lattice={"d": 2, "N": 8}, solver={"p": 4.0})

    def test_json_round_trip(self) -> None:
        """Test that a dumped config validates back to the same values."""
        config = RunConfig(
            mode="bootstrap",
            lattice={"d": 3, "N": 16},
            bootstrap={"lambda": 1.5, "k_min": 3},
            seed=42,
        )

        restored = RunConfig.model_validate_json(config.model_dump_json(by_alias=True))

        assert restored == config
        assert restored.bootstrap.lam == 1.5
