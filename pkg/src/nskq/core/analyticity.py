"""Radius of analyticity, the theta(t, D, eps) weight and the bootstrap check.

The radius is estimated from the exponential decay rate of the spectrum: on
shells of width ``spacing / 2`` the largest ``|xi|^r |c(xi)|`` is recorded,
shells below the noise floor ``1e-14 * max`` are dropped, and
``ln(value)`` is fitted against ``|xi|`` and ``ln |xi|`` over the top half of
the resolved band. The ``ln |xi|`` term takes up polynomial prefactors and
the fitted ``-slope`` in ``|xi|`` is the radius estimate.
"""

import logging
import math
from typing import Literal

import numpy as np
from pydantic import BaseModel

from nskq.core.config import BootstrapConfig, ModelParams, SolverConfig
from nskq.core.errors import SaturationError
from nskq.core.fields import FlowState, SpectralField
from nskq.core.lattice import FrequencyLattice
from nskq.core.norms import WeightExponent, data_norm, weighted_trajectory, x_norm
from nskq.core.symbol import heat_propagate
from nskq.core.trajectory import Trajectory

logger = logging.getLogger(__name__)

NOISE_FLOOR = 1e-14
MIN_SHELLS = 4
SUPER_EXPONENTIAL_RATIO = 1.2

RadiusStatus = Literal["ok", "undefined", "super_exponential"]


class RadiusEstimate(BaseModel):
    """Fitted exponential decay rate of a spectrum.

    Attributes:
        t: Time of the sampled state
        sigma_hat: Fitted decay rate (0 when undefined)
        residual: Standard error of the fitted slope
        window: Magnitude range of the fitted shells
        shells: Number of fitted shells
        noise_floor: Absolute noise floor used
        status: ``ok``, ``undefined`` (too few shells) or ``super_exponential``

    """

    t: float = 0.0
    sigma_hat: float = 0.0
    residual: float = 0.0
    window: tuple[float, float] = (0.0, 0.0)
    shells: int = 0
    noise_floor: float = 0.0
    status: RadiusStatus = "undefined"

    @property
    def defined(self) -> bool:
        """Whether a rate could be fitted."""
        return self.status != "undefined"


def _shell_maxima(
    coeffs: np.ndarray, lattice: FrequencyLattice, r: float
) -> tuple[np.ndarray, np.ndarray]:
    """Per-shell maximum of ``|xi|^r |c|`` and the magnitude where it is attained."""
    mag = lattice.magnitude
    keep = lattice.norm_mask & (mag > 0.0) & (mag <= lattice.max_inscribed * (1.0 + 1e-12))
    mags = mag[keep]
    values = mags**r * np.abs(coeffs[keep])
    width = 0.5 * lattice.spacing
    shells = np.floor(mags / width).astype(int)
    order = np.lexsort((values, shells))
    sorted_shells = shells[order]
    last = np.concatenate([np.nonzero(np.diff(sorted_shells))[0], [sorted_shells.size - 1]])
    picked = order[last]
    return values[picked], mags[picked]


def _fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Least-squares slope and its standard error."""
    if x.size > 3:
        coef, cov = np.polyfit(x, y, 1, cov=True)
        return float(coef[0]), float(math.sqrt(max(cov[0, 0], 0.0)))
    coef = np.polyfit(x, y, 1)
    return float(coef[0]), 0.0


def _fit_with_prefactor(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Slope of ``y = c + slope x + b ln x`` and its standard error.

    The ``ln x`` column absorbs a polynomial prefactor ``|xi|^b``. Columns are
    centred and scaled before the solve.
    """
    lx = np.log(x)
    x_scale = float(np.ptp(x)) or 1.0
    lx_scale = float(np.ptp(lx)) or 1.0
    design = np.column_stack(
        [np.ones_like(x), (x - x.mean()) / x_scale, (lx - lx.mean()) / lx_scale]
    )
    coef, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < 3:
        return _fit(x, y)
    slope = float(coef[1]) / x_scale
    dof = x.size - 3
    if dof <= 0:
        return slope, 0.0
    rss = float(np.sum((y - design @ coef) ** 2))
    cov = rss / dof * np.linalg.inv(design.T @ design)
    return slope, float(math.sqrt(max(cov[1, 1], 0.0))) / x_scale


def estimate_radius(
    field: SpectralField | FlowState, r: float = 0.0, t: float | None = None
) -> RadiusEstimate:
    """Estimate the radius of analyticity of a field or a flow state.

    For a flow state the result is the smallest defined radius over the
    density and velocity components.

    Args:
        field: Spectral field or flow state
        r: Polynomial weight exponent of ``PM^r``
        t: Time stamp recorded in the result (defaults to the state time, else 0)

    Returns:
        RadiusEstimate; ``status="undefined"`` when fewer than four shells lie
        above the noise floor

    """
    if isinstance(field, FlowState):
        return estimate_state_radius(field, r)
    t = 0.0 if t is None else t
    values, mags = _shell_maxima(field.coeffs, field.lattice, r)
    peak = float(values.max()) if values.size else 0.0
    floor = NOISE_FLOOR * peak
    if peak == 0.0:
        return RadiusEstimate(t=t, noise_floor=floor)
    above = values > floor
    resolved = float(mags[above].max())
    window = above & (mags >= 0.5 * resolved)
    if int(window.sum()) < MIN_SHELLS:
        logger.debug(f"Radius undefined at t={t}: {int(window.sum())} shells above the floor")
        return RadiusEstimate(t=t, noise_floor=floor, shells=int(window.sum()))
    x = mags[window]
    y = np.log(values[window])
    slope, stderr = _fit_with_prefactor(x, y)
    status: RadiusStatus = "ok"
    half = x.size // 2
    order = np.argsort(x)
    inner_slope, _ = _fit(x[order[:half]], y[order[:half]])
    outer_slope, _ = _fit(x[order[half:]], y[order[half:]])
    if inner_slope < 0.0 and outer_slope / inner_slope > SUPER_EXPONENTIAL_RATIO:
        status = "super_exponential"
    return RadiusEstimate(
        t=t,
        sigma_hat=max(-slope, 0.0),
        residual=stderr,
        window=(float(x.min()), float(x.max())),
        shells=int(x.size),
        noise_floor=floor,
        status=status,
    )


def estimate_state_radius(state: FlowState, r: float = 0.0) -> RadiusEstimate:
    """Radius of a flow state: the smallest radius over its components."""
    estimates = [
        estimate_radius(component, r, state.t) for component in (state.a, *state.u)
    ]
    defined = [e for e in estimates if e.defined]
    if not defined:
        return RadiusEstimate(t=state.t, noise_floor=estimates[0].noise_floor)
    return min(defined, key=lambda e: e.sigma_hat)


def radius_series(traj: Trajectory, r: float = 0.0) -> list[RadiusEstimate]:
    """Radius estimate at every node."""
    return [estimate_state_radius(state, r) for state in traj.states()]


class RadiusGrowthRow(BaseModel):
    """Measured radius against the growth bound at one time."""

    t: float
    sigma_hat: float | None
    residual: float
    bound: float
    holds: bool


class RadiusGrowthReport(BaseModel):
    """Growth of the radius along a trajectory."""

    sigma0: float
    c0: float
    slack: float
    rows: list[RadiusGrowthRow]
    monotone: bool
    passes: bool


def radius_growth_check(
    traj: Trajectory, sigma0: float, c0: float, slack: float = 0.8, r: float = 0.0
) -> RadiusGrowthReport:
    """Check ``r(t) >= sigma0 + slack c0 sqrt(t)`` and monotonicity within the fit residual."""
    rows = []
    for estimate in radius_series(traj, r):
        bound = sigma0 + slack * c0 * math.sqrt(estimate.t)
        sigma = estimate.sigma_hat if estimate.defined else None
        rows.append(
            RadiusGrowthRow(
                t=estimate.t,
                sigma_hat=sigma,
                residual=estimate.residual,
                bound=bound,
                holds=sigma is not None and sigma >= bound,
            )
        )
    monotone = all(
        later.sigma_hat is not None
        and earlier.sigma_hat is not None
        and later.sigma_hat >= earlier.sigma_hat - (earlier.residual + later.residual)
        for earlier, later in zip(rows[:-1], rows[1:], strict=True)
    )
    passes = monotone and all(row.holds for row in rows)
    return RadiusGrowthReport(
        sigma0=sigma0, c0=c0, slack=slack, rows=rows, monotone=monotone, passes=passes
    )


# ---------------------------------------------------------------------------
# theta weight and pointwise inequalities


def theta_weight(
    t: np.ndarray | float,
    xi_mag: np.ndarray | float,
    eps: np.ndarray | float,
    lam: np.ndarray | float,
    T: np.ndarray | float,
    c0: float,
) -> np.ndarray:
    """``theta = -lam^2 t / (4 (1 - eps) c0 T) + lam t |xi| / sqrt(T)``."""
    t = np.asarray(t, dtype=float)
    xi_mag = np.asarray(xi_mag, dtype=float)
    return np.asarray(
        -(lam**2) * t / (4.0 * (1.0 - eps) * c0 * T) + lam * t * xi_mag / np.sqrt(T)
    )


def theta_exponent(eps: float, lam: float, T: float, c0: float) -> WeightExponent:
    """Weight exponent ``theta(t, |xi|)`` for :func:`weighted_trajectory`."""

    def exponent(t: np.ndarray, mag: np.ndarray) -> np.ndarray:
        return theta_weight(t, mag, eps, lam, T, c0)

    return exponent


def weight_gap(t: np.ndarray, s: np.ndarray, xi_mag: np.ndarray) -> np.ndarray:
    """``(sqrt t - sqrt s) |xi| (1 - (sqrt t + sqrt s) |xi| / 2)``, bounded by 2 for ``s <= t``."""
    rt = np.sqrt(np.asarray(t, dtype=float))
    rs = np.sqrt(np.asarray(s, dtype=float))
    xi_mag = np.asarray(xi_mag, dtype=float)
    return np.asarray((rt - rs) * xi_mag * (1.0 - (rt + rs) * xi_mag / 2.0))


class InequalityReport(BaseModel):
    """Violation count of a sampled pointwise inequality."""

    name: str
    samples: int
    violations: int
    worst_margin: float

    @property
    def passes(self) -> bool:
        """No violations."""
        return self.violations == 0


def _report(name: str, margin: np.ndarray, tol: np.ndarray | float) -> InequalityReport:
    """Margins are ``rhs - lhs``; a violation is ``margin < -tol``."""
    return InequalityReport(
        name=name,
        samples=int(margin.size),
        violations=int(np.sum(margin < -np.asarray(tol))),
        worst_margin=float(margin.min()),
    )


def check_weight_inequality(samples: int = 100_000, seed: int = 0) -> InequalityReport:
    """Sample ``0 <= s <= t`` and ``|xi|`` and count violations of ``weight_gap <= 2``."""
    rng = np.random.default_rng(seed)
    t = 10.0 ** rng.uniform(-4.0, 2.0, samples)
    s = t * rng.uniform(0.0, 1.0, samples)
    xi = 10.0 ** rng.uniform(-3.0, 3.0, samples)
    return _report("weight_gap", 2.0 - weight_gap(t, s, xi), 1e-12)


def check_theta_properties(
    samples: int = 100_000,
    seed: int = 0,
    c0: float = 0.38196601125010515,
) -> list[InequalityReport]:
    """Sampled checks of the three theta properties.

    - ``theta - c0 t |xi|^2 <= -eps c0 t |xi|^2``, which implies
      ``theta - c0 t |xi|^2 <= eps c0 t |xi|^2`` for ``eps >= 0``
    - ``theta(t, xi) <= theta(t, xi - eta) + theta(t, eta) + lam^2 t / (4 (1 - eps) c0 T)``
    - ``theta(t) = theta(t - s) + theta(s)`` at fixed ``xi``
    """
    rng = np.random.default_rng(seed)
    d = 3
    T = 10.0 ** rng.uniform(-3.0, 1.0, samples)
    t = T * rng.uniform(0.0, 1.0, samples)
    s = t * rng.uniform(0.0, 1.0, samples)
    eps = rng.uniform(0.01, 0.99, samples)
    lam = 10.0 ** rng.uniform(-2.0, 1.5, samples)
    xi = rng.normal(size=(samples, d)) * 10.0 ** rng.uniform(-2.0, 2.0, (samples, 1))
    eta = rng.normal(size=(samples, d)) * 10.0 ** rng.uniform(-2.0, 2.0, (samples, 1))
    xi_mag = np.linalg.norm(xi, axis=1)

    theta = theta_weight(t, xi_mag, eps, lam, T, c0)
    scale = np.abs(theta) + c0 * t * xi_mag**2 + lam**2 * t / (c0 * T) + 1.0
    square = _report(
        "theta_square",
        -eps * c0 * t * xi_mag**2 - (theta - c0 * t * xi_mag**2),
        1e-12 * scale,
    )

    shift = lam**2 * t / (4.0 * (1.0 - eps) * c0 * T)
    split = theta_weight(t, np.linalg.norm(xi - eta, axis=1), eps, lam, T, c0)
    rest = theta_weight(t, np.linalg.norm(eta, axis=1), eps, lam, T, c0)
    subadditive = _report(
        "theta_subadditive",
        split + rest + shift - theta,
        1e-12 * (np.abs(split) + np.abs(rest) + shift + np.abs(theta) + 1.0),
    )

    later = theta_weight(t - s, xi_mag, eps, lam, T, c0)
    earlier = theta_weight(s, xi_mag, eps, lam, T, c0)
    residual = np.abs(later + earlier - theta)
    additive = _report(
        "theta_additive",
        -residual,
        1e-12 * (np.abs(later) + np.abs(earlier) + np.abs(theta) + 1.0),
    )
    return [square, subadditive, additive]


# ---------------------------------------------------------------------------
# bootstrap


def bootstrap_lambda(T: float, p: float, eps: float, eta_eps: float, norm: float) -> float:
    """``lambda_T = sqrt(4 (1 - eps) / p |ln(eta_eps / (T norm^(1/p)))|)``.

    Raises:
        ValueError: If ``T`` or ``norm`` is not positive

    """
    if T <= 0.0 or norm <= 0.0:
        raise ValueError(f"bootstrap_lambda needs T > 0 and a positive data norm, got T={T}, norm={norm}.")
    argument = eta_eps / (T * norm ** (1.0 / p))
    return math.sqrt(4.0 * (1.0 - eps) / p * abs(math.log(argument)))


class BootstrapRow(BaseModel):
    """Bootstrap quantities at one dyadic horizon."""

    T: float
    lambda_T: float
    weighted_norm: float | None
    threshold: float
    H_holds: bool
    saturated: bool
    outside_window: bool
    radius: float | None
    residual: float
    ratio: float | None
    estimate_lhs: float | None
    estimate_rhs: float | None
    estimate_holds: bool | None


class BootstrapReport(BaseModel):
    """Bootstrap check over dyadic horizons."""

    rows: list[BootstrapRow]
    target: float
    data_norm: float
    D_p_eps: float
    eta_eps: float
    T_eps: float | None
    mu_boot: float
    D_eps: float
    min_ratio: float | None
    ratio_trend: float | None
    passes: bool


def measure_heat_constant(
    data: FlowState, times: np.ndarray, cfg: BootstrapConfig, solver: SolverConfig, c0: float
) -> float:
    """Largest ``|exp(eps c0 t Laplace) x0|_{X_T} / (T^(1/p) |x0|)`` over the horizons."""
    lattice = data.lattice
    dn = data_norm(data, lattice.d - 1.0 + 2.0 / solver.p)
    if dn == 0.0:
        return 0.0
    heat = Trajectory(
        lattice,
        times,
        heat_propagate(cfg.epsilon * c0, times, data.as_array(), lattice),
        data.real,
        data,
    )
    ratios = [
        x_norm(heat, solver, T) / (T ** (1.0 / solver.p) * dn)
        for T in cfg.horizons
        if T <= times[-1] * (1.0 + 1e-12)
    ]
    return max(ratios, default=0.0)


def quadratic_estimate(
    weighted_solution: Trajectory,
    weighted_linear: Trajectory,
    lam: float,
    cfg: BootstrapConfig,
    solver: SolverConfig,
    c0: float,
) -> tuple[float, float]:
    """Both sides of ``|x|_X <= C |x_lin|_X + C C_eps exp(lam^2 / (4 (1 - eps) c0)) |x|_X^2``."""
    lhs = x_norm(weighted_solution, solver)
    gain = math.exp(lam**2 / (4.0 * (1.0 - cfg.epsilon) * c0))
    rhs = cfg.C * x_norm(weighted_linear, solver) + cfg.C * cfg.C_eps * gain * lhs**2
    return lhs, rhs


def check_bootstrap(
    traj: Trajectory,
    data: FlowState,
    cfg: BootstrapConfig,
    solver: SolverConfig,
    params: ModelParams,
) -> BootstrapReport:
    """Evaluate the bootstrap hypothesis and the radius ratio on dyadic horizons.

    For every horizon ``T = 2^-k`` in ``cfg``: the theta-weighted ``X_T`` norm
    with amplitude ``lambda_T``, the threshold
    ``D_eps exp(-lambda_T^2 / (4 (1 - eps) c0))``, the radius at the node
    nearest ``T`` and the ratio ``R(T) / sqrt(T |ln(T norm^(1/p))|)``.
    Horizons whose weights saturate are flagged and excluded from the verdict.

    Args:
        traj: Solution trajectory whose grid contains the horizons
        data: Initial state
        cfg: Bootstrap constants
        solver: Kato exponent and norm settings
        params: Physical constants (c0)

    Returns:
        BootstrapReport

    """
    c0 = params.decay
    p = solver.p
    lattice = traj.lattice
    dn = data_norm(data, lattice.d - 1.0 + 2.0 / p)
    D_p_eps = cfg.D_p_eps if cfg.D_p_eps is not None else measure_heat_constant(
        data, traj.times, cfg, solver, c0
    )
    if cfg.eta_eps is not None:
        eta = cfg.eta_eps
    elif D_p_eps > 0.0:
        eta = (cfg.D_eps / (2.0 * D_p_eps)) ** p
    else:
        eta = 1.0
    T_eps = eta * dn ** (-p) if dn > 0.0 else None
    heat = heat_propagate(cfg.epsilon * c0, traj.times, data.as_array(), lattice)
    linear = Trajectory(lattice, traj.times, heat, traj.real, data)

    rows: list[BootstrapRow] = []
    for T in cfg.horizons:
        if T > traj.T * (1.0 + 1e-12):
            logger.warning(f"Horizon {T:.4g} exceeds the trajectory end {traj.T:.4g}; skipped")
            continue
        lam_T = bootstrap_lambda(T, p, cfg.epsilon, eta, dn) if dn > 0.0 else cfg.lam
        threshold = cfg.D_eps * math.exp(-(lam_T**2) / (4.0 * (1.0 - cfg.epsilon) * c0))
        exponent = theta_exponent(cfg.epsilon, lam_T, T, c0)
        weighted_norm: float | None
        estimate_lhs: float | None = None
        estimate_rhs: float | None = None
        try:
            weighted = weighted_trajectory(traj.restrict(T), exponent)
            weighted_norm = x_norm(weighted, solver)
            weighted_lin = weighted_trajectory(linear.restrict(T), exponent)
            estimate_lhs, estimate_rhs = quadratic_estimate(weighted, weighted_lin, lam_T, cfg, solver, c0)
            saturated = False
        except SaturationError as e:
            logger.warning(f"Horizon {T:.4g} excluded: {e}")
            weighted_norm = None
            saturated = True
        estimate = estimate_state_radius(traj.state(traj.index_at(T)), lattice.d - 1.0)
        radius = estimate.sigma_hat if estimate.defined else None
        ratio = None
        if radius is not None and dn > 0.0:
            denom = math.sqrt(T * abs(math.log(T * dn ** (1.0 / p))))
            ratio = radius / denom if denom > 0.0 else None
        rows.append(
            BootstrapRow(
                T=T,
                lambda_T=lam_T,
                weighted_norm=weighted_norm,
                threshold=threshold,
                H_holds=weighted_norm is not None and weighted_norm <= threshold,
                saturated=saturated,
                outside_window=T_eps is not None and T > T_eps,
                radius=radius,
                residual=estimate.residual,
                ratio=ratio,
                estimate_lhs=estimate_lhs,
                estimate_rhs=estimate_rhs,
                estimate_holds=None if estimate_lhs is None or estimate_rhs is None else estimate_lhs <= estimate_rhs,
            )
        )
        logger.debug(f"Bootstrap T={T:.4g}: lambda_T={lam_T:.4g}, radius={radius}, ratio={ratio}")

    target = math.sqrt(4.0 / p)
    ratios = [row.ratio for row in rows if row.ratio is not None]
    min_ratio = min(ratios) if ratios else None
    trend = None
    if len(ratios) >= 2:
        ks = [-math.log2(row.T) for row in rows if row.ratio is not None]
        trend = float(np.polyfit(ks, ratios, 1)[0])
    usable = [row for row in rows if not row.saturated]
    all_defined = bool(usable) and all(row.ratio is not None for row in usable)
    passes = dn == 0.0 or (
        all_defined and min_ratio is not None and min_ratio >= 0.1 * target
    )
    logger.info(
        f"Bootstrap: {len(rows)} horizons, min ratio {min_ratio}, target {target:.4f}, "
        f"passes={passes}"
    )
    return BootstrapReport(
        rows=rows,
        target=target,
        data_norm=dn,
        D_p_eps=D_p_eps,
        eta_eps=eta,
        T_eps=T_eps,
        mu_boot=cfg.mu_boot,
        D_eps=cfg.D_eps,
        min_ratio=min_ratio,
        ratio_trend=trend,
        passes=passes,
    )
