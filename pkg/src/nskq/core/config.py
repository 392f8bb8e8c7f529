"""Configuration models for simulations and verification runs.

This module provides Pydantic models for validating every knob of a run:
physical constants, the frequency lattice, the Duhamel solver, the bootstrap
constants of the radius estimate and the initial-data generator. Validators
reject out-of-range values with messages that name the valid range, and warn
about legal values that are likely to make a desk-scale run impractical.
"""

import math
import warnings
from typing import TYPE_CHECKING, Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

if TYPE_CHECKING:
    from nskq.core.lattice import FrequencyLattice

NonlinearTerm = Literal["f", "g1", "g2", "g3"]
ALL_TERMS: tuple[NonlinearTerm, ...] = ("f", "g1", "g2", "g3")

GENERATOR_KINDS = {
    "zero",
    "single_mode",
    "power_law",
    "exponential_tail",
    "gaussian",
    "snapshot",
}

VERIFY_CHECKS = {
    "lemma-decay",
    "semigroup",
    "lemma-conv",
    "beta",
    "nonlinear",
    "small-data",
    "solver-reference",
    "radius-growth",
    "local-existence",
    "inequalities",
}


class ModelParams(BaseModel):
    """Physical constants of the quantum Navier-Stokes-Korteweg system.

    Attributes:
        mu: Shear viscosity, must be positive
        nu: Bulk viscosity, with mu + nu > 0
        kappa: Capillarity coefficient, must be positive
        alpha: Pressure constant, must be positive
        c0: Parabolic decay constant of the linear semigroup. When omitted it
            is filled with the closed-form spectral rate
            (see :func:`nskq.core.symbol.spectral_decay_rate`).

    Example:
        >>> params = ModelParams(mu=1.0, nu=1.0, kappa=1.0, alpha=1.0)
        >>> round(params.decay, 4)
        0.382

    """

    mu: float = 1.0
    nu: float = 1.0
    kappa: float = 1.0
    alpha: float = 1.0
    c0: float | None = None

    @field_validator("mu", "kappa", "alpha")
    @classmethod
    def validate_positive(cls, v: float) -> float:
        """Validate strictly positive physical constants.

        Args:
            v: Constant value

        Returns:
            Validated value

        Raises:
            ValueError: If the value is not a positive finite number

        """
        if not math.isfinite(v) or v <= 0.0:
            raise ValueError(
                f"Physical constant must be positive and finite, got {v}. "
                "The linear symbol only decays for mu > 0, kappa > 0, alpha > 0."
            )
        return v

    @field_validator("c0")
    @classmethod
    def validate_c0(cls, v: float | None) -> float | None:
        """Validate an explicitly supplied decay constant."""
        if v is not None and (not math.isfinite(v) or v <= 0.0):
            raise ValueError(
                f"c0 must be positive, got {v}. Omit it to use the spectral prediction."
            )
        return v

    @model_validator(mode="after")
    def validate_viscosity_pair(self) -> "ModelParams":
        """Check mu + nu > 0 and fill in c0.

        Returns:
            Validated ModelParams instance

        Raises:
            ValueError: If mu + nu is not positive

        """
        if not math.isfinite(self.nu) or self.mu + self.nu <= 0.0:
            raise ValueError(
                f"mu + nu must be positive, got mu={self.mu}, nu={self.nu}. "
                "The compressible block loses its damping otherwise."
            )
        if self.c0 is None:
            from nskq.core.symbol import decay_rate_from_coefficients

            self.c0 = decay_rate_from_coefficients(self.mu, self.nu, self.kappa)
        return self

    @property
    def decay(self) -> float:
        """Decay constant c0 as a plain float."""
        assert self.c0 is not None
        return self.c0


class LatticeSpec(BaseModel):
    """Shape of the truncated frequency lattice.

    Attributes:
        d: Spatial dimension (2 or 3 in practice)
        N: Modes per axis, even
        L: Period of the torus approximating the whole space

    """

    d: int = 2
    N: int = 128
    L: float = 2.0 * math.pi

    @field_validator("d")
    @classmethod
    def validate_dimension(cls, v: int) -> int:
        """Validate spatial dimension."""
        if v < 2:
            raise ValueError(f"d must be at least 2, got {v}.")
        if v > 3:
            warnings.warn(
                f"d={v} lattices grow like N^{v}; only d = 2 and d = 3 are tuned.",
                UserWarning,
                stacklevel=2,
            )
        return v

    @field_validator("N")
    @classmethod
    def validate_modes(cls, v: int) -> int:
        """Validate number of modes per axis."""
        if v < 4 or v % 2:
            raise ValueError(f"N must be an even integer >= 4, got {v}.")
        return v

    @field_validator("L")
    @classmethod
    def validate_period(cls, v: float) -> float:
        """Validate torus period."""
        if not math.isfinite(v) or v <= 0.0:
            raise ValueError(f"L must be a positive period, got {v}.")
        return v

    def build(self) -> "FrequencyLattice":
        """Create the lattice described by this spec."""
        from nskq.core.lattice import FrequencyLattice

        return FrequencyLattice(d=self.d, N=self.N, L=self.L)


class SolverConfig(BaseModel):
    """Kato exponents, horizon and numerical tolerances of the Duhamel solver.

    Attributes:
        p: Kato exponent, p > 2 and d - 3 + 4/p > 0
        delta: Supercritical shift in (0, 2/p]; defaults to 2/p
        T: Time horizon
        n_uniform: Uniform nodes on ]0, T]
        n_geometric: Extra geometric nodes inside the first uniform step
        grid_ratio: Ratio of consecutive geometric nodes
        picard_tol: Fixed-point residual tolerance (relative to max(1, |x|))
        max_iterations: Picard iteration cap
        divergence_window: Consecutive residual or iterate-norm increases that mark divergence
        quadrature_tol: Relative tolerance of adaptive quadratures
        terms: Nonlinear terms included in the forcing
        du_contraction: Reading of the ``Du`` contraction in g2
        method: Product evaluation path for the nonlinearity

    """

    p: float = 3.0
    delta: float | None = None
    T: float = 1.0
    n_uniform: int = 32
    n_geometric: int = 12
    grid_ratio: float = 0.5
    picard_tol: float = 1e-10
    max_iterations: int = 60
    divergence_window: int = 5
    quadrature_tol: float = 1e-10
    terms: tuple[NonlinearTerm, ...] = ALL_TERMS
    du_contraction: Literal["transpose", "gradient"] = "transpose"
    method: Literal["fast", "oracle"] = "fast"

    @field_validator("p")
    @classmethod
    def validate_kato_exponent(cls, v: float) -> float:
        """Validate p > 2."""
        if not math.isfinite(v) or v <= 2.0:
            raise ValueError(f"Kato exponent p must satisfy p > 2, got {v}.")
        return v

    @field_validator("T")
    @classmethod
    def validate_horizon(cls, v: float) -> float:
        """Validate positive horizon."""
        if not math.isfinite(v) or v <= 0.0:
            raise ValueError(f"Horizon T must be positive, got {v}.")
        return v

    @field_validator("n_uniform")
    @classmethod
    def validate_uniform_nodes(cls, v: int) -> int:
        """Validate uniform node count."""
        if v < 1:
            raise ValueError(f"n_uniform must be at least 1, got {v}.")
        if v > 2000:
            warnings.warn(
                f"n_uniform={v} makes every Picard sweep very expensive. "
                "Values between 16 and 128 are usually enough.",
                UserWarning,
                stacklevel=2,
            )
        return v

    @field_validator("grid_ratio")
    @classmethod
    def validate_ratio(cls, v: float) -> float:
        """Validate geometric ratio."""
        if not 0.0 < v < 1.0:
            raise ValueError(f"grid_ratio must lie in (0, 1), got {v}.")
        return v

    @field_validator("picard_tol", "quadrature_tol")
    @classmethod
    def validate_tolerance(cls, v: float) -> float:
        """Validate tolerances."""
        if not 0.0 < v < 1.0:
            raise ValueError(f"Tolerances must lie in (0, 1), got {v}.")
        return v

    @field_validator("max_iterations", "divergence_window")
    @classmethod
    def validate_counts(cls, v: int) -> int:
        """Validate iteration counters."""
        if v < 1:
            raise ValueError(f"Iteration counts must be positive, got {v}.")
        return v

    @model_validator(mode="after")
    def validate_shift(self) -> "SolverConfig":
        """Check 0 < delta <= 2/p and fill the default.

        Returns:
            Validated SolverConfig instance

        Raises:
            ValueError: If delta is out of range

        """
        upper = 2.0 / self.p
        if self.delta is None:
            self.delta = upper
        elif not 0.0 < self.delta <= upper * (1.0 + 1e-12):
            raise ValueError(
                f"delta must lie in (0, 2/p] = (0, {upper:.6g}], got {self.delta}."
            )
        return self

    @property
    def shift(self) -> float:
        """Supercritical shift delta as a plain float."""
        assert self.delta is not None
        return self.delta

    def check_dimension(self, d: int) -> None:
        """Check the standing hypothesis d - 3 + 4/p > 0.

        Args:
            d: Spatial dimension

        Raises:
            ValueError: If the hypothesis fails

        """
        if d - 3.0 + 4.0 / self.p <= 0.0:
            raise ValueError(
                f"d - 3 + 4/p must be positive, got d={d}, p={self.p}. "
                f"Choose p < {4.0 / max(3.0 - d, 1e-12):.6g} for d={d}."
            )


class BootstrapConfig(BaseModel):
    """Constants of the bootstrap argument for the radius of analyticity.

    Attributes:
        epsilon: Loss parameter in (0, 1)
        lam: Weight amplitude lambda of theta(t, D, epsilon)
        C: Linear constant of the weighted a priori estimate
        C_eps: Nonlinear constant of the weighted a priori estimate
        D_p_eps: Measured constant of the heat bound
            ||e^{eps c0 t Laplace}(a0, u0)||_X <= D_p_eps T^{1/p} ||(a0,|D|a0,u0)||
        eta_eps: Override for (D_eps / (2 D_p_eps))^p
        k_min: Smallest dyadic exponent of the horizons 2^-k
        k_max: Largest dyadic exponent of the horizons 2^-k

    """

    model_config = ConfigDict(populate_by_name=True)

    epsilon: float = 0.1
    lam: float = Field(default=1.0, alias="lambda")
    C: float = 1.0
    C_eps: float = 1.0
    D_p_eps: float | None = None
    eta_eps: float | None = None
    k_min: int = 4
    k_max: int = 10

    @field_validator("epsilon")
    @classmethod
    def validate_epsilon(cls, v: float) -> float:
        """Validate epsilon in (0, 1)."""
        if not 0.0 < v < 1.0:
            raise ValueError(f"epsilon must lie in (0, 1), got {v}.")
        return v

    @field_validator("C", "C_eps")
    @classmethod
    def validate_constants(cls, v: float) -> float:
        """Validate positive constants."""
        if not math.isfinite(v) or v <= 0.0:
            raise ValueError(f"Bootstrap constants must be positive, got {v}.")
        return v

    @model_validator(mode="after")
    def validate_horizons(self) -> "BootstrapConfig":
        """Check the dyadic horizon range."""
        if self.k_min < 0 or self.k_max < self.k_min:
            raise ValueError(
                f"Need 0 <= k_min <= k_max, got k_min={self.k_min}, k_max={self.k_max}."
            )
        return self

    @property
    def mu_boot(self) -> float:
        """Bootstrap ratio mu = (1/2) / (2C + 4)."""
        return 0.5 / (2.0 * self.C + 4.0)

    @property
    def D_eps(self) -> float:
        """Threshold constant D_eps = 1 / (C_eps 4 mu C)."""
        return 1.0 / (self.C_eps * 4.0 * self.mu_boot * self.C)

    def resolved_eta(self, p: float) -> float:
        """Return eta_eps, computing (D_eps / (2 D_p_eps))^p when not overridden.

        Args:
            p: Kato exponent

        Returns:
            eta_eps

        Raises:
            ValueError: If neither eta_eps nor D_p_eps is available

        """
        if self.eta_eps is not None:
            return self.eta_eps
        if self.D_p_eps is None or self.D_p_eps <= 0.0:
            raise ValueError(
                "eta_eps needs either an explicit value or a measured D_p_eps > 0."
            )
        return float((self.D_eps / (2.0 * self.D_p_eps)) ** p)

    @property
    def horizons(self) -> list[float]:
        """Dyadic horizons 2^-k for k_min <= k <= k_max."""
        return [2.0 ** (-k) for k in range(self.k_min, self.k_max + 1)]


class InitialDataSpec(BaseModel):
    """Named initial-data generator and its parameters.

    Attributes:
        kind: Generator name (zero, single_mode, power_law, exponential_tail,
            gaussian, snapshot)
        amplitude: Overall amplitude A
        exponent: Power-law exponent s of A |xi|^-s (defaults to d - 1)
        sigma0: Exponential-tail rate of A exp(-sigma0 |xi|)
        cutoff: Optional radial cutoff |xi| <= cutoff
        mode: Integer wavevector of the single-mode generator
        polarization: Velocity direction relative to the wavevector
        random_phase: Multiply by a seeded Hermitian random phase
        a_scale: Factor applied to the density perturbation a
        u_scale: Factor applied to the velocity u
        dealias: Restrict the data to the 2/3-rule band
        path: Snapshot file for kind="snapshot"

    """

    kind: str = "power_law"
    amplitude: float = 1.0
    exponent: float | None = None
    sigma0: float = 0.5
    cutoff: float | None = None
    mode: list[int] = Field(default_factory=lambda: [1, 0])
    polarization: Literal["longitudinal", "transverse"] = "longitudinal"
    random_phase: bool = False
    a_scale: float = 1.0
    u_scale: float = 1.0
    dealias: bool = False
    path: str | None = None

    @field_validator("kind")
    @classmethod
    def validate_kind(cls, v: str) -> str:
        """Validate generator name."""
        if v not in GENERATOR_KINDS:
            raise ValueError(
                f"Unsupported initial-data kind: {v}. "
                f"Supported kinds: {', '.join(sorted(GENERATOR_KINDS))}"
            )
        return v

    @field_validator("amplitude", "a_scale", "u_scale")
    @classmethod
    def validate_finite(cls, v: float) -> float:
        """Validate finite amplitudes."""
        if not math.isfinite(v):
            raise ValueError(f"Amplitudes must be finite, got {v}.")
        return v

    @field_validator("sigma0")
    @classmethod
    def validate_rate(cls, v: float) -> float:
        """Validate exponential-tail rate."""
        if not math.isfinite(v) or v < 0.0:
            raise ValueError(f"sigma0 must be a nonnegative rate, got {v}.")
        return v

    @model_validator(mode="after")
    def validate_snapshot_path(self) -> "InitialDataSpec":
        """Require a path for snapshot data."""
        if self.kind == "snapshot" and not self.path:
            raise ValueError(
                "kind='snapshot' requires 'path' pointing to a .nskq or .json snapshot."
            )
        return self


class RunConfig(BaseModel):
    """Top-level configuration of one ``nskq`` invocation.

    Attributes:
        model: Physical constants
        lattice: Frequency lattice shape
        solver: Duhamel solver settings
        initial_data: Initial-data generator
        bootstrap: Bootstrap constants (used by the bootstrap mode)
        mode: simulate, radius, bootstrap or verify
        check: Check name for mode="verify"
        analytic: Iterate in the analytic Y_T norm
        samples: Random samples for statistical measurements
        seed: Seed of every random generator used by the run
        output_dir: Directory receiving run.json, CSV files and snapshots

    Example:
        >>> config = RunConfig.model_validate_json(
        ...     '{"mode": "verify", "check": "beta", "seed": 7}'
        ... )
        >>> config.check
        'beta'

    """

    model: ModelParams = Field(default_factory=ModelParams)
    lattice: LatticeSpec = Field(default_factory=LatticeSpec)
    solver: SolverConfig = Field(default_factory=SolverConfig)
    initial_data: InitialDataSpec = Field(default_factory=InitialDataSpec)
    bootstrap: BootstrapConfig = Field(default_factory=BootstrapConfig)
    mode: Literal["simulate", "radius", "bootstrap", "verify"] = "simulate"
    check: str | None = None
    analytic: bool = False
    samples: int = 20
    seed: int = 0
    output_dir: str = "runs/latest"

    @field_validator("samples")
    @classmethod
    def validate_samples(cls, v: int) -> int:
        """Validate sample count."""
        if v < 1:
            raise ValueError(f"samples must be at least 1, got {v}.")
        return v

    @model_validator(mode="after")
    def validate_mode(self) -> "RunConfig":
        """Check the verify target and the dimension hypothesis.

        Returns:
            Validated RunConfig instance

        Raises:
            ValueError: If the check is missing or unknown

        """
        if self.mode == "verify":
            if not self.check:
                raise ValueError(
                    "mode='verify' requires 'check'. "
                    f"Available checks: {', '.join(sorted(VERIFY_CHECKS))}"
                )
            if self.check not in VERIFY_CHECKS:
                raise ValueError(
                    f"Unknown check: {self.check}. "
                    f"Available checks: {', '.join(sorted(VERIFY_CHECKS))}"
                )
        self.solver.check_dimension(self.lattice.d)
        return self
