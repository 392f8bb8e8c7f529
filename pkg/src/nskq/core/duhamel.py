"""Duhamel map, Picard iteration in X_T / Y_T and the constants ledger.

The Duhamel map is

    Phi(x)(t) = W(t) x0 + int_0^t W(t - s) N(x(s)) ds

with ``W(t) = exp(-tA)`` and ``N`` the quadratic forcing. On the time grid
``0 = t_0 < t_1 < ... < t_n`` the forcing is interpolated linearly on each
interval and integrated against the exact exponential weights:

    J_m = h_m [phi_2(-h_m A) N_m + (phi_1 - phi_2)(-h_m A) N_{m-1}]
    D_m = W(h_m) D_{m-1} + J_m

The geometric nodes of :func:`nskq.core.trajectory.time_grid` resolve the
``s^(-2/p)`` growth of the forcing of rough data near ``s = 0``.
"""

import logging
import math
from collections.abc import Callable, Iterator, Sequence
from dataclasses import dataclass, field
from enum import Enum
from typing import Literal

import numpy as np
from pydantic import BaseModel, Field

from nskq.core.config import InitialDataSpec, ModelParams, NonlinearTerm, SolverConfig
from nskq.core.divergence import DivergenceMonitor
from nskq.core.errors import InvalidFieldError, SaturationError
from nskq.core.fields import FlowState
from nskq.core.initial_data import generate_initial_data
from nskq.core.lattice import FrequencyLattice
from nskq.core.nonlinear import bilinear_forcing_array, forcing_array
from nskq.core.norms import data_norm, x_norm, y_norm
from nskq.core.symbol import BlockOperator, exponential_operator, phi_operator
from nskq.core.trajectory import Trajectory, time_grid

logger = logging.getLogger(__name__)

SolveMode = Literal["plain", "analytic"]
NormFunction = Callable[[Trajectory], float]


class DuhamelOperator:
    """Precomputed propagators of one time grid.

    Args:
        lattice: Frequency lattice
        times: Grid nodes ``t_1 < ... < t_n`` in ``]0, T]``
        params: Physical constants

    """

    def __init__(self, lattice: FrequencyLattice, times: np.ndarray, params: ModelParams) -> None:
        """Build the per-interval exponential and phi-function blocks."""
        self.lattice = lattice
        self.times = np.asarray(times, dtype=float)
        self.params = params
        self.steps = np.diff(np.concatenate([[0.0], self.times]))
        cache: dict[float, tuple[BlockOperator, BlockOperator, BlockOperator]] = {}
        self._intervals: list[tuple[BlockOperator, BlockOperator, BlockOperator]] = []
        for h in self.steps:
            key = float(f"{h:.12e}")
            if key not in cache:
                cache[key] = (
                    exponential_operator(float(h), lattice, params),
                    phi_operator(1, float(h), lattice, params),
                    phi_operator(2, float(h), lattice, params),
                )
            self._intervals.append(cache[key])
        self._linear = exponential_operator(self.times, lattice, params)
        logger.debug(
            f"Duhamel operator: {self.times.size} nodes, {len(cache)} distinct steps, "
            f"N={lattice.N}, d={lattice.d}"
        )

    def linear(self, U0: np.ndarray) -> np.ndarray:
        """``W(t_m) U0`` at every node, shape ``(n, d + 1, *grid)``."""
        return self._linear.apply(U0)

    def integrate(self, forcing: np.ndarray) -> np.ndarray:
        """Duhamel integral of forcing samples at ``t_0 = 0, t_1, ..., t_n``.

        Args:
            forcing: Shape ``(n + 1, d + 1, *grid)``

        Returns:
            Integral at ``t_1..t_n``, shape ``(n, d + 1, *grid)``

        """
        if forcing.shape[0] != self.times.size + 1:
            raise ValueError(
                f"Need forcing at {self.times.size + 1} nodes (including t=0), "
                f"got {forcing.shape[0]}."
            )
        acc = np.zeros_like(forcing[0], dtype=complex)
        out = np.empty((self.times.size, *forcing.shape[1:]), dtype=complex)
        for m, (h, (expo, phi1, phi2)) in enumerate(
            zip(self.steps, self._intervals, strict=True), start=1
        ):
            increment = phi1.apply(forcing[m - 1]) + phi2.apply(forcing[m] - forcing[m - 1])
            acc = expo.apply(acc) + h * increment
            out[m - 1] = acc
        return out


def _state_stack(traj: Trajectory, initial: FlowState) -> np.ndarray:
    return np.concatenate([initial.as_array()[None], traj.data])


def _forcing(states: np.ndarray, traj: Trajectory, params: ModelParams, cfg: SolverConfig) -> np.ndarray:
    return np.stack(
        [
            forcing_array(
                U, traj.lattice, params, cfg.terms, cfg.method, cfg.du_contraction, traj.real
            )
            for U in states
        ]
    )


def apply_phi(
    traj: Trajectory,
    data: FlowState,
    params: ModelParams,
    cfg: SolverConfig,
    operator: DuhamelOperator | None = None,
) -> Trajectory:
    """Evaluate the Duhamel map at every node of ``traj``.

    Args:
        traj: Input trajectory on the solver grid
        data: Initial state ``(a0, u0)``
        params: Physical constants
        cfg: Solver settings (enabled terms, product path, Du reading)
        operator: Precomputed propagators for ``traj.times``

    Returns:
        ``Phi(traj)`` on the same grid

    """
    op = operator or DuhamelOperator(traj.lattice, traj.times, params)
    U0 = data.as_array()
    out = op.linear(U0)
    if cfg.terms:
        out = out + op.integrate(_forcing(_state_stack(traj, data), traj, params, cfg))
    return Trajectory(traj.lattice, traj.times, out, traj.real and data.real, data)


class PicardStatus(str, Enum):
    """Outcome of a Picard iteration."""

    CONVERGED = "converged"
    DIVERGED = "diverged"
    MAX_ITERATIONS = "max_iterations"


class ConstantsLedger(BaseModel):
    """Measured constants of the fixed-point argument.

    ``R = 1 / (32 K_Phi)`` makes ``16 R K_Phi = 1/2 < 1``; ``rho = R / (2 C_tilde)``.
    Values that cannot be formed (zero data, zero bilinear constant) are ``None``.
    """

    K_Phi: float | None = None
    K_Phi_source: Literal["measured", "per-run", "none"] = "none"
    R: float | None = None
    rho: float | None = None
    C_tilde: float | None = None
    C_tilde_delta: float | None = None
    c_delta: float | None = None
    T_guaranteed: float | None = None
    data_norm: float = 0.0
    data_norm_delta: float = 0.0
    linear_norm: float = 0.0
    solution_norm: float = 0.0
    contraction: float = 0.0
    contraction_factors: list[float] = Field(default_factory=list)
    small_data_claimed: bool = False
    a_priori_checks: dict[str, float] = Field(default_factory=dict)


@dataclass
class PicardResult:
    """Trajectory, ledger and iteration history of a Picard solve.

    Unpacks as ``(trajectory, ledger)``.
    """

    trajectory: Trajectory
    ledger: ConstantsLedger
    status: PicardStatus
    mode: SolveMode
    iterations: int
    residuals: list[float] = field(default_factory=list)
    iterate_norms: list[float] = field(default_factory=list)
    y_norm: float | None = None
    radius_checks: list[tuple[float, float | None, bool]] = field(default_factory=list)

    def __iter__(self) -> Iterator[Trajectory | ConstantsLedger]:
        yield self.trajectory
        yield self.ledger

    @property
    def converged(self) -> bool:
        """Whether the residual reached the tolerance."""
        return self.status is PicardStatus.CONVERGED


def _norm_function(
    mode: SolveMode, cfg: SolverConfig, params: ModelParams, sample: Trajectory
) -> tuple[SolveMode, NormFunction]:
    if mode == "analytic":
        try:
            y_norm(sample, cfg, params.decay)
        except SaturationError as e:
            logger.warning(f"Analytic weights saturate ({e}); measuring residuals in X_T instead.")
            return "plain", lambda tr: x_norm(tr, cfg)
        return "analytic", lambda tr: y_norm(tr, cfg, params.decay)
    return "plain", lambda tr: x_norm(tr, cfg)


def solver_grid(cfg: SolverConfig, extra_nodes: Sequence[float] = ()) -> np.ndarray:
    """Time grid configured by ``cfg``."""
    return time_grid(cfg.T, cfg.n_uniform, cfg.n_geometric, cfg.grid_ratio, extra_nodes)


def picard_solve(
    data: FlowState,
    params: ModelParams,
    cfg: SolverConfig,
    mode: SolveMode = "plain",
    times: np.ndarray | None = None,
    bilinear_constant: float | None = None,
    operator: DuhamelOperator | None = None,
) -> PicardResult:
    """Iterate the Duhamel map from ``x^0 = W(t) x0`` until the residual is below tolerance.

    The residual ``|Phi(x) - x|`` is measured in ``X_T`` (plain mode) or
    ``Y_T`` (analytic mode) relative to ``max(1, |x|)``. Divergence is
    reported through ``status`` when the residual grows
    ``cfg.divergence_window`` times in a row, or when the iterate norm does so
    while outside ``2 |W(t) x0|``, or when an iterate is no longer finite. The
    iteration cap is reported the same way. The last finite iterate is returned
    in every case.

    Args:
        data: Initial state
        params: Physical constants
        cfg: Solver settings
        mode: ``"plain"`` or ``"analytic"``
        times: Grid override; defaults to :func:`solver_grid`
        bilinear_constant: Measured ``K_Phi``; estimated from the run when omitted
        operator: Precomputed propagators for ``times``

    Returns:
        PicardResult (unpacks as ``(trajectory, ledger)``)

    """
    lattice = data.lattice
    cfg.check_dimension(lattice.d)
    grid = solver_grid(cfg) if times is None else np.asarray(times, dtype=float)
    op = operator or DuhamelOperator(lattice, grid, params)
    linear = Trajectory(lattice, grid, op.linear(data.as_array()), data.real, data)
    effective_mode, norm = _norm_function(mode, cfg, params, linear)
    monitor = DivergenceMonitor(consecutive_threshold=cfg.divergence_window)
    norm_monitor = DivergenceMonitor(consecutive_threshold=cfg.divergence_window)
    ball = 2.0 * norm(linear)

    logger.info(
        f"Picard solve: mode={effective_mode}, T={grid[-1]:.4g}, nodes={grid.size}, "
        f"N={lattice.N}, d={lattice.d}, terms={','.join(cfg.terms) or 'none'}"
    )
    x = linear
    residuals: list[float] = []
    iterate_norms: list[float] = []
    drifts: list[float] = []
    status = PicardStatus.MAX_ITERATIONS
    iterations = 0
    for iterations in range(1, cfg.max_iterations + 1):
        try:
            nxt = apply_phi(x, data, params, cfg, op)
        except InvalidFieldError as e:
            logger.warning(f"Picard iterate {iterations} is not finite ({e}); keeping the previous one")
            status = PicardStatus.DIVERGED
            break
        residual = norm(nxt - x)
        size = norm(nxt)
        residuals.append(residual)
        iterate_norms.append(size)
        drifts.append(x_norm(nxt - linear, cfg))
        logger.debug(f"Picard iteration {iterations}: residual={residual:.3e}, norm={size:.3e}")
        x = nxt
        if residual <= cfg.picard_tol * max(1.0, size):
            status = PicardStatus.CONVERGED
            break
        if monitor.record(residual):
            status = PicardStatus.DIVERGED
            break
        # norm growth only counts outside the ball of radius 2 |W(t) x0|
        if size > ball:
            if norm_monitor.record(size):
                status = PicardStatus.DIVERGED
                break
        else:
            norm_monitor.reset()

    if status is PicardStatus.CONVERGED:
        logger.info(f"Picard converged in {iterations} iterations (residual {residuals[-1]:.3e})")
    else:
        logger.warning(
            f"Picard did not converge: status={status.value}, iterations={iterations}, "
            f"last residual={residuals[-1] if residuals else math.nan:.3e}"
        )

    ledger = _build_ledger(data, linear, x, residuals, drifts, cfg, bilinear_constant)
    result = PicardResult(
        trajectory=x,
        ledger=ledger,
        status=status,
        mode=effective_mode,
        iterations=iterations,
        residuals=residuals,
        iterate_norms=iterate_norms,
    )
    if effective_mode == "analytic":
        result.y_norm = y_norm(x, cfg, params.decay)
        result.radius_checks = _radius_checks(x, params)
    return result


def _radius_checks(traj: Trajectory, params: ModelParams) -> list[tuple[float, float | None, bool]]:
    """Per-node comparison of the measured radius with ``c0 sqrt(t)``."""
    from nskq.core.analyticity import estimate_state_radius

    rows: list[tuple[float, float | None, bool]] = []
    for state in traj.states():
        estimate = estimate_state_radius(state, 0.0)
        bound = params.decay * math.sqrt(state.t)
        sigma = estimate.sigma_hat if estimate.defined else None
        rows.append((state.t, sigma, sigma is not None and sigma >= bound))
    return rows


def _build_ledger(
    data: FlowState,
    linear: Trajectory,
    solution: Trajectory,
    residuals: list[float],
    drifts: list[float],
    cfg: SolverConfig,
    bilinear_constant: float | None,
) -> ConstantsLedger:
    d = data.lattice.d
    delta = cfg.shift
    dn = data_norm(data, d - 1.0)
    dn_delta = data_norm(data, d - 1.0 + delta)
    lin = x_norm(linear, cfg)
    sol = x_norm(solution, cfg)
    factors = [
        residuals[i] / residuals[i - 1] for i in range(1, len(residuals)) if residuals[i - 1] > 0.0
    ]
    ledger = ConstantsLedger(
        data_norm=dn,
        data_norm_delta=dn_delta,
        linear_norm=lin,
        solution_norm=sol,
        contraction_factors=factors,
        contraction=max(factors) if factors else 0.0,
    )
    if dn > 0.0:
        ledger.C_tilde = lin / dn
    if dn_delta > 0.0:
        ledger.C_tilde_delta = lin / (linear.T ** (0.5 * delta) * dn_delta)

    if bilinear_constant is not None and bilinear_constant > 0.0:
        ledger.K_Phi = bilinear_constant
        ledger.K_Phi_source = "measured"
    elif sol > 0.0:
        quadratic = x_norm(solution - linear, cfg)
        estimate = quadratic / (sol * sol) if quadratic > 0.0 else 0.0
        if estimate > 0.0 and math.isfinite(estimate):
            ledger.K_Phi = estimate
            ledger.K_Phi_source = "per-run"

    if ledger.K_Phi is not None:
        K = ledger.K_Phi
        R = 1.0 / (32.0 * K)
        ledger.R = R
        if ledger.C_tilde:
            ledger.rho = R / (2.0 * ledger.C_tilde)
            ledger.small_data_claimed = 16.0 * R * K < 1.0 and dn <= ledger.rho
        if ledger.C_tilde_delta:
            ledger.c_delta = (R / (2.0 * ledger.C_tilde_delta)) ** (2.0 / delta)
            if dn_delta > 0.0:
                ledger.T_guaranteed = ledger.c_delta * dn_delta ** (-2.0 / delta)
        ledger.a_priori_checks = {
            "ball_ratio": max(drifts) / (5.0 * K * R * R) if drifts else 0.0,
            "lipschitz_ratio": ledger.contraction / (16.0 * K * R),
            "radius_ratio": sol / R,
        }
    return ledger


# ---------------------------------------------------------------------------
# bilinear constants


class BilinearConstants(BaseModel):
    """Empirical constants of the bilinear Duhamel estimates."""

    samples: int
    per_term: dict[str, float]
    per_term_analytic: dict[str, float]
    K_Phi: float
    K_Phi_analytic: float
    analytic_factor: float
    analytic_bound_holds: bool


def _with_initial(traj: Trajectory) -> np.ndarray:
    first = traj.initial.as_array() if traj.initial is not None else traj.data[0]
    return np.concatenate([first[None], traj.data])


def bilinear_duhamel(
    x: Trajectory,
    y: Trajectory,
    terms: Sequence[NonlinearTerm],
    params: ModelParams,
    cfg: SolverConfig,
    operator: DuhamelOperator | None = None,
) -> Trajectory:
    """``int_0^t W(t - s) B(x(s), y(s)) ds`` for the given bilinear terms."""
    op = operator or DuhamelOperator(x.lattice, x.times, params)
    X = _with_initial(x)
    Y = _with_initial(y)
    forcing = np.stack(
        [
            bilinear_forcing_array(
                X[i], Y[i], x.lattice, params, terms, cfg.method, cfg.du_contraction
            )
            for i in range(X.shape[0])
        ]
    )
    return Trajectory(x.lattice, x.times, op.integrate(forcing), real=False)


def bilinear_norm(
    x: Trajectory,
    y: Trajectory,
    terms: Sequence[NonlinearTerm],
    params: ModelParams,
    cfg: SolverConfig,
    analytic: bool = False,
    operator: DuhamelOperator | None = None,
) -> float:
    """``X_T`` (or ``Y_T``) norm of the bilinear Duhamel term."""
    out = bilinear_duhamel(x, y, terms, params, cfg, operator)
    return y_norm(out, cfg, params.decay) if analytic else x_norm(out, cfg)


def rough_sample(lattice: FrequencyLattice, seed: int) -> FlowState:
    """Random-phase ``|xi|^-(d-1)`` data restricted to the dealiased band."""
    spec = InitialDataSpec(kind="power_law", random_phase=True, dealias=True)
    return generate_initial_data(spec, lattice, seed=seed)


def measure_bilinear_constants(
    params: ModelParams,
    cfg: SolverConfig,
    lattice: FrequencyLattice,
    samples: int,
    seed: int = 0,
) -> BilinearConstants:
    """Largest observed ``|B(x, y)| / (|x| |y|)`` over random linear evolutions.

    Each sample pair evolves two random rough data under the semigroup,
    normalises them to unit ``X_T`` (and separately unit ``Y_T``) norm and
    records the norm of the Duhamel term of every bilinear piece.

    Args:
        params: Physical constants
        cfg: Solver settings (grid, enabled terms)
        lattice: Frequency lattice
        samples: Number of random pairs, at least 1
        seed: Base seed

    Returns:
        BilinearConstants with per-term plain and analytic maxima

    """
    if samples < 1:
        raise ValueError(f"samples must be at least 1, got {samples}.")
    grid = solver_grid(cfg)
    op = DuhamelOperator(lattice, grid, params)
    terms = list(cfg.terms)
    per_term = dict.fromkeys(terms, 0.0)
    per_term_analytic = dict.fromkeys(terms, 0.0)
    total = 0.0
    total_analytic = 0.0
    for i in range(samples):
        pair = []
        for j in range(2):
            state = rough_sample(lattice, seed + 2 * i + j)
            pair.append(Trajectory(lattice, grid, op.linear(state.as_array()), True, state))
        x, y = pair
        nx, ny = x_norm(x, cfg), x_norm(y, cfg)
        ax, ay = y_norm(x, cfg, params.decay), y_norm(y, cfg, params.decay)
        for term in terms:
            value = bilinear_norm(x, y, (term,), params, cfg, False, op) / (nx * ny)
            per_term[term] = max(per_term[term], value)
            analytic = bilinear_norm(x, y, (term,), params, cfg, True, op) / (ax * ay)
            per_term_analytic[term] = max(per_term_analytic[term], analytic)
        total = max(total, bilinear_norm(x, y, terms, params, cfg, False, op) / (nx * ny))
        total_analytic = max(
            total_analytic, bilinear_norm(x, y, terms, params, cfg, True, op) / (ax * ay)
        )
        logger.debug(f"Bilinear sample {i}: K={total:.4g}, K_analytic={total_analytic:.4g}")
    factor = 2.0 ** (1.0 - 1.0 / cfg.p) * math.exp(2.0 * params.decay)
    logger.info(f"Bilinear constants over {samples} pairs: K_Phi={total:.4g}, analytic={total_analytic:.4g}")
    return BilinearConstants(
        samples=samples,
        per_term=per_term,
        per_term_analytic=per_term_analytic,
        K_Phi=total,
        K_Phi_analytic=total_analytic,
        analytic_factor=factor,
        analytic_bound_holds=total_analytic <= factor * total * (1.0 + 1e-6),
    )


class ResolutionCheck(BaseModel):
    """``K_Phi`` measured on two lattices with the same period."""

    coarse_N: int
    fine_N: int
    K_coarse: float
    K_fine: float
    ratio: float
    tolerance: float
    stable: bool


def bilinear_resolution_check(
    params: ModelParams,
    cfg: SolverConfig,
    lattice: FrequencyLattice,
    fine_N: int,
    samples: int,
    seed: int = 0,
    tolerance: float = 0.1,
    coarse: BilinearConstants | None = None,
) -> ResolutionCheck:
    """Compare ``K_Phi`` on ``lattice`` with ``K_Phi`` on ``lattice.refine(fine_N)``.

    Args:
        params: Physical constants
        cfg: Solver settings
        lattice: Coarse lattice
        fine_N: Modes per axis of the fine lattice, at least ``lattice.N``
        samples: Random pairs per lattice
        seed: Base seed, shared by both lattices
        tolerance: Allowed relative change of ``K_Phi``
        coarse: Constants already measured on ``lattice``

    Returns:
        ResolutionCheck; ``stable`` when both values are finite and agree
        within ``tolerance``

    """
    if fine_N < lattice.N:
        raise ValueError(f"fine_N must be at least {lattice.N}, got {fine_N}.")
    if coarse is None:
        coarse = measure_bilinear_constants(params, cfg, lattice, samples, seed)
    fine = measure_bilinear_constants(params, cfg, lattice.refine(fine_N), samples, seed)
    if coarse.K_Phi == 0.0 and fine.K_Phi == 0.0:
        ratio = 1.0
    elif coarse.K_Phi == 0.0:
        ratio = math.inf
    else:
        ratio = fine.K_Phi / coarse.K_Phi
    stable = (
        math.isfinite(coarse.K_Phi) and math.isfinite(fine.K_Phi) and abs(ratio - 1.0) <= tolerance
    )
    logger.info(
        f"K_Phi at N={lattice.N}: {coarse.K_Phi:.4g}, at N={fine_N}: {fine.K_Phi:.4g} "
        f"(ratio {ratio:.4f}, stable={stable})"
    )
    return ResolutionCheck(
        coarse_N=lattice.N,
        fine_N=fine_N,
        K_coarse=coarse.K_Phi,
        K_fine=fine.K_Phi,
        ratio=ratio,
        tolerance=tolerance,
        stable=stable,
    )


# ---------------------------------------------------------------------------
# local existence


class ScalingRow(BaseModel):
    """Largest converging horizon at one amplitude."""

    amplitude: float
    horizon: float
    scaled: float


class ScalingReport(BaseModel):
    """Time-scaling experiment for supercritical data."""

    delta: float
    rows: list[ScalingRow]
    spread: float
    passes: bool


def largest_converging_horizon(
    data: FlowState,
    params: ModelParams,
    cfg: SolverConfig,
    t_lo: float,
    t_hi: float,
    steps: int = 10,
) -> float:
    """Largest ``T`` in ``[t_lo, t_hi]`` for which Picard iteration converges.

    Bisection in ``log T``; returns 0 when even ``t_lo`` fails.
    """

    def converges(T: float) -> bool:
        run = picard_solve(data, params, cfg.model_copy(update={"T": T}))
        logger.debug(f"Horizon trial T={T:.4g}: {run.status.value}")
        return run.converged

    if not converges(t_lo):
        return 0.0
    if converges(t_hi):
        return t_hi
    lo, hi = math.log(t_lo), math.log(t_hi)
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if converges(math.exp(mid)):
            lo = mid
        else:
            hi = mid
    return math.exp(lo)


def local_existence_scaling(
    shape: InitialDataSpec,
    lattice: FrequencyLattice,
    params: ModelParams,
    cfg: SolverConfig,
    amplitudes: Sequence[float] = (1.0, 2.0, 4.0, 8.0),
    t_bounds: tuple[float, float] = (1e-6, 10.0),
    steps: int = 10,
    seed: int = 0,
) -> ScalingReport:
    """Check ``T(A) A^(2/delta)`` is constant within a factor of 2.

    Args:
        shape: Data shape, rescaled by each amplitude
        lattice: Frequency lattice
        params: Physical constants
        cfg: Solver settings; ``cfg.delta`` sets the expected exponent
        amplitudes: Amplitude factors
        t_bounds: Search interval for the horizon
        steps: Bisection steps per amplitude
        seed: Seed for random phases

    """
    delta = cfg.shift
    base = generate_initial_data(shape, lattice, seed=seed)
    rows = []
    for A in amplitudes:
        T = largest_converging_horizon(base.scale(A), params, cfg, *t_bounds, steps=steps)
        rows.append(ScalingRow(amplitude=A, horizon=T, scaled=T * A ** (2.0 / delta)))
        logger.info(f"Amplitude {A}: largest converging horizon {T:.4g}")
    scaled = [r.scaled for r in rows if r.scaled > 0.0]
    spread = max(scaled) / min(scaled) if len(scaled) == len(rows) else math.inf
    return ScalingReport(delta=delta, rows=rows, spread=spread, passes=spread <= 2.0)
