"""nskq: pseudo-spectral lab for the quantum Navier-Stokes-Korteweg system.

nskq solves the compressible Navier-Stokes-Korteweg system with quantum
pressure in frequency space and measures the constants of its well-posedness
theory: the parabolic decay of the linear semigroup, the bilinear Duhamel
bounds, the radius of analyticity of solutions and its small-time growth.

Key Features:
- Exact exponential propagators for the linearised system
- Dealiased pseudo-spectral nonlinearity with a convolution oracle
- Picard iteration of the Duhamel map with a constants ledger
- Radius-of-analyticity estimation and the bootstrap check
- Quadrature oracles for the convolution and beta-function estimates
- Declarative, seeded runs with JSON/CSV reports
"""

from nskq.core.analyticity import (
    bootstrap_lambda,
    check_bootstrap,
    estimate_radius,
    estimate_state_radius,
    theta_weight,
)
from nskq.core.config import (
    BootstrapConfig,
    InitialDataSpec,
    LatticeSpec,
    ModelParams,
    RunConfig,
    SolverConfig,
)
from nskq.core.duhamel import apply_phi, picard_solve
from nskq.core.fields import FlowState, SpectralField
from nskq.core.initial_data import generate_initial_data
from nskq.core.lattice import FrequencyLattice
from nskq.core.nonlinear import nonlinearity
from nskq.core.norms import kato_norm, pm_norm, x_norm, y_norm
from nskq.core.oracles import (
    QuadratureSpec,
    beta_time_integral,
    riesz_convolution,
    verify_convolution_constancy,
)
from nskq.core.runner import RunReport, run
from nskq.core.symbol import build_symbol, decay_constant, semigroup_apply
from nskq.core.trajectory import Trajectory

__version__ = "0.1.0"
__all__ = [
    "__version__",
    "BootstrapConfig",
    "FlowState",
    "FrequencyLattice",
    "InitialDataSpec",
    "LatticeSpec",
    "ModelParams",
    "QuadratureSpec",
    "RunConfig",
    "RunReport",
    "SolverConfig",
    "SpectralField",
    "Trajectory",
    "apply_phi",
    "beta_time_integral",
    "bootstrap_lambda",
    "build_symbol",
    "check_bootstrap",
    "decay_constant",
    "estimate_radius",
    "estimate_state_radius",
    "generate_initial_data",
    "kato_norm",
    "nonlinearity",
    "picard_solve",
    "pm_norm",
    "riesz_convolution",
    "run",
    "semigroup_apply",
    "theta_weight",
    "verify_convolution_constancy",
    "x_norm",
    "y_norm",
]
