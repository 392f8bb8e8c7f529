"""Pseudo-measure, Kato and X_T / Y_T norms on the frequency lattice.

All suprema over frequencies become maxima over the norm-visible lattice
modes. The zero mode is excluded when ``r > 0`` and included when ``r == 0``.
"""

import logging
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from nskq.core.config import SolverConfig
from nskq.core.errors import InvalidFieldError, LatticeMismatchError, SaturationError
from nskq.core.fields import FlowState, SpectralField
from nskq.core.lattice import FrequencyLattice
from nskq.core.trajectory import ComponentSeries, Trajectory

logger = logging.getLogger(__name__)

# exp(709.78) is the largest finite double
MAX_WEIGHT_EXPONENT = 700.0

WeightExponent = Callable[[np.ndarray, np.ndarray], np.ndarray]


def frequency_weight(lattice: FrequencyLattice, r: float) -> np.ndarray:
    """``|xi|^r`` on the norm-visible modes, zero elsewhere.

    Raises:
        ValueError: If ``r < 0``

    """
    if r < 0.0:
        raise ValueError(f"PM exponent r must be nonnegative, got {r}.")
    mask = lattice.norm_mask
    if r == 0.0:
        return mask.astype(float)
    return np.where(mask, lattice.magnitude**r, 0.0)


def pm_norm_array(coeffs: np.ndarray, lattice: FrequencyLattice, r: float) -> np.ndarray:
    """``PM^r`` norm of every scalar field in an array, reducing the trailing grid axes.

    Raises:
        InvalidFieldError: If the coefficients contain NaN or Inf

    """
    if not np.all(np.isfinite(coeffs)):
        raise InvalidFieldError("Cannot take a PM norm of coefficients containing NaN or Inf.")
    weighted = frequency_weight(lattice, r) * np.abs(coeffs)
    return np.max(weighted, axis=lattice.axes)


def pm_norm(field: SpectralField, r: float) -> float:
    """Maximum over the lattice of ``|xi|^r |c(xi)|``.

    Args:
        field: Spectral field
        r: Nonnegative exponent

    Returns:
        The discrete ``PM^r`` norm; 0 for the zero field

    Example:
        >>> lattice = FrequencyLattice(d=2, N=8)
        >>> coeffs = lattice.zeros()
        >>> coeffs[lattice.mode_index((1, 0))] = 3.0
        >>> pm_norm(SpectralField(lattice, coeffs), 1.0)
        3.0

    """
    return float(pm_norm_array(field.coeffs, field.lattice, r))


def data_norm(state: FlowState, s: float) -> float:
    """Norm of the triple ``(a0, |D| a0, u0)`` in ``PM^s``."""
    lattice = state.lattice
    arr = state.as_array()
    return float(
        max(
            pm_norm_array(arr[0], lattice, s),
            pm_norm_array(arr[0], lattice, s + 1.0),
            pm_norm_array(arr[1:], lattice, s).max(),
        )
    )


def kato_terms(series: ComponentSeries, p: float, r: float) -> np.ndarray:
    """Per-node values ``t^(1/p) PM^(r + 2/p)``, maximised over components."""
    if p <= 2.0:
        raise ValueError(f"Kato exponent p must satisfy p > 2, got {p}.")
    pm = pm_norm_array(series.coeffs, series.lattice, r + 2.0 / p)
    return np.asarray(series.times ** (1.0 / p) * pm.max(axis=1))


def _restricted(times: np.ndarray, values: np.ndarray, T: float | None) -> np.ndarray:
    if T is None:
        return values
    keep = times <= T * (1.0 + 1e-12)
    return values[keep]


def kato_norm(series: ComponentSeries, p: float, r: float, T: float | None = None) -> float:
    """Discrete ``K^{p,r}_T`` norm: max over nodes of ``t^(1/p) PM^(r + 2/p)``.

    Args:
        series: Time-indexed component (scalar or vector)
        p: Kato exponent, p > 2
        r: Base regularity
        T: Horizon; defaults to the last node

    Returns:
        The norm value

    """
    values = _restricted(series.times, kato_terms(series, p, r), T)
    return float(values.max()) if values.size else 0.0


def x_norm_terms(traj: Trajectory, cfg: SolverConfig) -> np.ndarray:
    """Running ``X_t`` norm at every node of the trajectory."""
    d = traj.lattice.d
    a = traj.component("a")
    u = traj.component("u")
    low = np.maximum.accumulate(kato_terms(a, cfg.p, d - 1.0))
    high = np.maximum.accumulate(kato_terms(a, cfg.p, float(d)))
    vel = np.maximum.accumulate(kato_terms(u, cfg.p, d - 1.0))
    return np.asarray(np.maximum(low, high) + vel)


def x_norm(traj: Trajectory, cfg: SolverConfig, T: float | None = None) -> float:
    """``X_T`` norm ``max(|a|_{K^{p,d-1}}, |a|_{K^{p,d}}) + |u|_{K^{p,d-1}}``."""
    values = _restricted(traj.times, x_norm_terms(traj, cfg), T)
    return float(values[-1]) if values.size else 0.0


def weighted_trajectory(traj: Trajectory, exponent: WeightExponent) -> Trajectory:
    """Multiply each coefficient by ``exp(exponent(t, |xi|))``.

    Args:
        traj: Trajectory to weight
        exponent: Function of ``t`` (shape ``(n, 1, ..., 1)``) and ``|xi|`` (grid)

    Returns:
        Weighted trajectory on the same grid

    Raises:
        SaturationError: If the exponent exceeds the floating-point range on a
            norm-visible mode

    """
    lattice = traj.lattice
    t = traj.times.reshape((-1,) + (1,) * lattice.d)
    expo = np.broadcast_to(exponent(t, lattice.magnitude), (len(traj), *lattice.shape))
    expo = np.where(lattice.norm_mask, expo, 0.0)
    peak = float(expo.max())
    if peak > MAX_WEIGHT_EXPONENT:
        raise SaturationError(
            f"Exponential weight exponent reaches {peak:.1f} > {MAX_WEIGHT_EXPONENT} at the "
            "lattice edge. Reduce N, the horizon or the weight amplitude."
        )
    weights = np.exp(expo)
    return traj.with_data(traj.data * weights[:, None])


def analytic_weight(c0: float) -> WeightExponent:
    """Exponent ``c0 sqrt(t) |xi|`` of the Y_T norm."""

    def exponent(t: np.ndarray, mag: np.ndarray) -> np.ndarray:
        return np.asarray(c0 * np.sqrt(t) * mag)

    return exponent


def y_norm(traj: Trajectory, cfg: SolverConfig, c0: float, T: float | None = None) -> float:
    """``X_T`` norm after multiplying each coefficient by ``exp(c0 sqrt(t) |xi|)``.

    Raises:
        ValueError: If ``c0 < 0``
        SaturationError: If the weight overflows at the lattice edge

    """
    if c0 < 0.0:
        raise ValueError(f"c0 must be nonnegative, got {c0}.")
    if c0 == 0.0:
        return x_norm(traj, cfg, T)
    return x_norm(weighted_trajectory(traj, analytic_weight(c0)), cfg, T)


@dataclass(frozen=True)
class NormReport:
    """Per-node norm values of a trajectory.

    ``y_running`` is ``None`` when the analytic weight saturates.
    """

    times: np.ndarray
    pm_a_low: np.ndarray
    pm_a_high: np.ndarray
    pm_u: np.ndarray
    x_running: np.ndarray
    y_running: np.ndarray | None

    def rows(self) -> list[tuple[float, ...]]:
        """Rows ``(t, pm_a_low, pm_a_high, pm_u, x, y)`` with NaN for missing Y."""
        y = self.y_running if self.y_running is not None else np.full_like(self.times, np.nan)
        return [
            (
                float(self.times[i]),
                float(self.pm_a_low[i]),
                float(self.pm_a_high[i]),
                float(self.pm_u[i]),
                float(self.x_running[i]),
                float(y[i]),
            )
            for i in range(self.times.size)
        ]


def norm_report(traj: Trajectory, cfg: SolverConfig, c0: float) -> NormReport:
    """PM values per node and running X/Y norms.

    The PM columns use the Kato regularities ``d - 1 + 2/p`` and ``d + 2/p``.
    """
    d = traj.lattice.d
    shift = 2.0 / cfg.p
    lattice = traj.lattice
    y_running: np.ndarray | None
    try:
        y_running = x_norm_terms(weighted_trajectory(traj, analytic_weight(c0)), cfg)
    except SaturationError as e:
        logger.warning(f"Y norm unavailable for this trajectory: {e}")
        y_running = None
    return NormReport(
        times=traj.times.copy(),
        pm_a_low=pm_norm_array(traj.data[:, 0], lattice, d - 1.0 + shift),
        pm_a_high=pm_norm_array(traj.data[:, 0], lattice, d + shift),
        pm_u=pm_norm_array(traj.data[:, 1:], lattice, d - 1.0 + shift).max(axis=1),
        x_running=x_norm_terms(traj, cfg),
        y_running=y_running,
    )


def check_same_lattice(*items: Trajectory | FlowState) -> FrequencyLattice:
    """Return the shared lattice or raise ``LatticeMismatchError``."""
    lattice = items[0].lattice
    for item in items[1:]:
        if item.lattice != lattice:
            raise LatticeMismatchError(f"Expected lattice {lattice}, got {item.lattice}.")
    return lattice
