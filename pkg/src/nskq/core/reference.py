"""Fine-step explicit reference integrator for the frequency-space ODE.

Integrates ``dU/dt = -A(xi) U + N(U)`` with the classical fourth-order
Runge-Kutta method. The linear part is applied through :func:`apply_symbol`,
independently of the semigroup code, so the integrator is a genuine oracle
for the Duhamel solver. Accuracy is certified by step halving: the Richardson
estimate ``|U_2n - U_n| / 15`` must fall below the tolerance, otherwise the
step count keeps doubling.
"""

import logging

import numpy as np

from nskq.core.config import ModelParams, SolverConfig
from nskq.core.errors import QuadratureToleranceError, StabilityError
from nskq.core.fields import FlowState
from nskq.core.lattice import FrequencyLattice
from nskq.core.nonlinear import forcing_array
from nskq.core.symbol import apply_symbol, block_eigenvalues
from nskq.core.trajectory import Trajectory

logger = logging.getLogger(__name__)

# RK4 stability interval on the negative real axis is about [-2.785, 0]
RK4_STABILITY_LIMIT = 2.78


def stiffness_bound(lattice: FrequencyLattice, params: ModelParams) -> float:
    """Largest ``|lambda|`` of ``A(xi)`` over the lattice."""
    mag = lattice.magnitude
    _, lam_p = block_eigenvalues(mag, params)
    return float(max(np.abs(lam_p).max(), params.mu * (mag**2).max()))


def _rhs(
    U: np.ndarray, lattice: FrequencyLattice, params: ModelParams, cfg: SolverConfig, real: bool
) -> np.ndarray:
    out = -apply_symbol(U, lattice, params)
    if cfg.terms:
        out = out + forcing_array(
            U, lattice, params, cfg.terms, cfg.method, cfg.du_contraction, real
        )
    return out


def _integrate(
    U0: np.ndarray,
    outputs: np.ndarray,
    steps: int,
    lattice: FrequencyLattice,
    params: ModelParams,
    cfg: SolverConfig,
    real: bool,
) -> np.ndarray:
    """RK4 with ``steps`` uniform steps on ``[0, outputs[-1]]``, landing on every output time."""
    T = float(outputs[-1])
    dt = T / steps
    rho = stiffness_bound(lattice, params)
    if dt * rho > RK4_STABILITY_LIMIT:
        raise StabilityError(
            f"RK4 step dt={dt:.3e} times stiffness {rho:.3e} = {dt * rho:.3f} exceeds "
            f"{RK4_STABILITY_LIMIT}. Use at least {int(np.ceil(T * rho / RK4_STABILITY_LIMIT))} "
            "steps or a smaller lattice."
        )
    out = np.empty((outputs.size, *U0.shape), dtype=complex)
    U = U0.astype(complex)
    t = 0.0
    k = 0
    for target_index, target in enumerate(outputs):
        while t < target * (1.0 - 1e-13):
            h = min(dt, float(target) - t)
            k1 = _rhs(U, lattice, params, cfg, real)
            k2 = _rhs(U + 0.5 * h * k1, lattice, params, cfg, real)
            k3 = _rhs(U + 0.5 * h * k2, lattice, params, cfg, real)
            k4 = _rhs(U + h * k3, lattice, params, cfg, real)
            U = U + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            t += h
            k += 1
        out[target_index] = U
    logger.debug(f"RK4 reference: {k} steps to T={T:.4g}")
    return out


def reference_integrate(
    data: FlowState,
    params: ModelParams,
    T: float,
    fine_steps: int,
    output_times: np.ndarray | None = None,
    cfg: SolverConfig | None = None,
    tol: float = 1e-8,
    max_refinements: int = 6,
) -> Trajectory:
    """Integrate the full system with RK4 and certify it by step halving.

    Args:
        data: Initial state (should be analytic so the stiffness is controlled)
        params: Physical constants
        T: Final time
        fine_steps: Initial number of uniform steps on ``[0, T]``
        output_times: Times to report (default: ``[T]``)
        cfg: Enabled terms and product path (default: all terms, fast path)
        tol: Bound on the relative Richardson error estimate
        max_refinements: Number of step doublings before giving up

    Returns:
        Trajectory at ``output_times`` from the finest run

    Raises:
        StabilityError: If the initial step violates the RK4 stability limit
        QuadratureToleranceError: If the error estimate stays above ``tol``

    """
    if T <= 0.0:
        raise ValueError(f"T must be positive, got {T}.")
    if fine_steps < 1:
        raise ValueError(f"fine_steps must be at least 1, got {fine_steps}.")
    cfg = cfg or SolverConfig(T=T)
    lattice = data.lattice
    outputs = np.array([T]) if output_times is None else np.asarray(output_times, dtype=float)
    U0 = data.as_array()
    steps = fine_steps
    coarse = _integrate(U0, outputs, steps, lattice, params, cfg, data.real)
    error = float("inf")
    for _ in range(max_refinements):
        steps *= 2
        fine = _integrate(U0, outputs, steps, lattice, params, cfg, data.real)
        scale = max(float(np.abs(fine).max()), 1e-300)
        error = float(np.abs(fine - coarse).max()) / 15.0 / scale
        logger.debug(f"Reference integrator: {steps} steps, Richardson error {error:.3e}")
        if error <= tol:
            logger.info(f"Reference integration certified with {steps} steps (error {error:.2e})")
            return Trajectory(lattice, outputs, fine, data.real, data)
        coarse = fine
    raise QuadratureToleranceError(
        f"Reference integrator did not reach tol={tol} after {max_refinements} step "
        f"doublings ({steps} steps); last error estimate {error:.3e}."
    )
