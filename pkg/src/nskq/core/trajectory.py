"""Time-indexed flow states on a graded time grid."""

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from nskq.core.errors import EmptyTrajectoryError, InvalidFieldError, LatticeMismatchError
from nskq.core.fields import FlowState, conjugate_symmetry_defect
from nskq.core.lattice import FrequencyLattice


def time_grid(
    T: float,
    n_uniform: int,
    n_geometric: int = 0,
    ratio: float = 0.5,
    extra_nodes: Sequence[float] = (),
) -> np.ndarray:
    """Graded time grid on ``]0, T]``.

    The grid is the union of ``T k / n_uniform`` for ``k = 1..n_uniform``,
    the geometric nodes ``h ratio^j`` (``h = T / n_uniform``, ``j = 1..n_geometric``)
    that resolve the ``s^(-2/p)`` behaviour of the Kato weights near zero, and
    any extra nodes inside ``]0, T]``.

    Args:
        T: Horizon
        n_uniform: Number of uniform nodes
        n_geometric: Number of geometric nodes below the first uniform node
        ratio: Ratio of consecutive geometric nodes
        extra_nodes: Additional nodes such as dyadic horizons

    Returns:
        Strictly increasing node array ending at ``T``

    """
    if T <= 0.0:
        raise ValueError(f"Horizon must be positive, got {T}.")
    if n_uniform < 1:
        raise ValueError(f"n_uniform must be at least 1, got {n_uniform}.")
    h = T / n_uniform
    nodes = [T * np.arange(1, n_uniform + 1) / n_uniform]
    nodes.append(h * ratio ** np.arange(1, n_geometric + 1))
    extra = np.asarray(list(extra_nodes), dtype=float)
    nodes.append(extra[(extra > 0.0) & (extra <= T)])
    merged = np.unique(np.concatenate(nodes))
    # drop near-duplicates left by floating point
    keep = np.concatenate([[True], np.diff(merged) > 1e-14 * T])
    merged = merged[keep]
    merged[-1] = T
    return merged


@dataclass(frozen=True)
class ComponentSeries:
    """One component group of a trajectory, e.g. the density or the velocity.

    Attributes:
        lattice: Frequency lattice
        times: Sample times, shape ``(n,)``
        coeffs: Coefficients, shape ``(n, m, *grid)`` with ``m`` components

    """

    lattice: FrequencyLattice
    times: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        """Check sample count and shapes."""
        if len(self.times) == 0:
            raise EmptyTrajectoryError("Component series has no samples.")
        if self.coeffs.shape[0] != len(self.times) or self.coeffs.shape[2:] != self.lattice.shape:
            raise InvalidFieldError(
                f"Series coefficients have shape {self.coeffs.shape} for "
                f"{len(self.times)} times on a lattice of shape {self.lattice.shape}."
            )

    @classmethod
    def from_fields(
        cls, lattice: FrequencyLattice, times: Sequence[float], fields: Sequence[np.ndarray]
    ) -> "ComponentSeries":
        """Series of scalar coefficient arrays."""
        if len(fields) == 0:
            raise EmptyTrajectoryError("Component series has no samples.")
        stacked = np.stack([np.asarray(f, dtype=complex) for f in fields])[:, None]
        return cls(lattice, np.asarray(times, dtype=float), stacked)


class Trajectory:
    """Flow states at the nodes of a time grid, plus the initial state.

    Attributes:
        lattice: Frequency lattice
        times: Strictly increasing positive times, shape ``(n,)``
        data: Stacked states, shape ``(n, d + 1, *grid)``
        real: The states are transforms of real fields
        initial: State at ``t = 0`` when known

    """

    def __init__(
        self,
        lattice: FrequencyLattice,
        times: np.ndarray,
        data: np.ndarray,
        real: bool = True,
        initial: FlowState | None = None,
    ) -> None:
        """Validate grid and data.

        Raises:
            EmptyTrajectoryError: If there are no nodes
            InvalidFieldError: If shapes, times or values are invalid

        """
        times = np.asarray(times, dtype=float)
        if times.size == 0:
            raise EmptyTrajectoryError("Trajectory has no time nodes.")
        if times[0] <= 0.0 or np.any(np.diff(times) <= 0.0):
            raise InvalidFieldError("Trajectory times must be positive and strictly increasing.")
        data = np.array(data, dtype=complex)
        expected = (times.size, lattice.d + 1, *lattice.shape)
        if data.shape != expected:
            raise InvalidFieldError(f"Trajectory data has shape {data.shape}, expected {expected}.")
        if not np.all(np.isfinite(data)):
            raise InvalidFieldError("Trajectory data contains NaN or Inf entries.")
        if initial is not None and initial.lattice != lattice:
            raise LatticeMismatchError(f"Initial state on {initial.lattice}, trajectory on {lattice}.")
        times.setflags(write=False)
        data.setflags(write=False)
        self.lattice = lattice
        self.times = times
        self.data = data
        self.real = real
        self.initial = initial

    def __len__(self) -> int:
        return int(self.times.size)

    @property
    def T(self) -> float:
        """Last node."""
        return float(self.times[-1])

    def __sub__(self, other: "Trajectory") -> "Trajectory":
        self._check_compatible(other)
        return Trajectory(self.lattice, self.times, self.data - other.data, self.real and other.real)

    def __add__(self, other: "Trajectory") -> "Trajectory":
        self._check_compatible(other)
        return Trajectory(self.lattice, self.times, self.data + other.data, self.real and other.real)

    def _check_compatible(self, other: "Trajectory") -> None:
        if other.lattice != self.lattice:
            raise LatticeMismatchError(f"Trajectories on {self.lattice} and {other.lattice}.")
        if other.times.shape != self.times.shape or not np.allclose(other.times, self.times):
            raise InvalidFieldError("Trajectories are sampled on different time grids.")

    def scale(self, factor: float) -> "Trajectory":
        """Multiply every state by ``factor``."""
        return Trajectory(self.lattice, self.times, factor * self.data, self.real, self.initial)

    def with_data(self, data: np.ndarray) -> "Trajectory":
        """Same grid with new states."""
        return Trajectory(self.lattice, self.times, data, self.real, self.initial)

    def state(self, index: int) -> FlowState:
        """State at node ``index``."""
        return FlowState.from_array(
            self.lattice, self.data[index], float(self.times[index]), self.real
        )

    def states(self) -> list[FlowState]:
        """All node states."""
        return [self.state(i) for i in range(len(self))]

    def index_at(self, t: float) -> int:
        """Index of the node closest to ``t``."""
        return int(np.argmin(np.abs(self.times - t)))

    def restrict(self, T: float) -> "Trajectory":
        """Nodes with ``t <= T``."""
        keep = self.times <= T * (1.0 + 1e-12)
        if not np.any(keep):
            raise EmptyTrajectoryError(f"No trajectory nodes in ]0, {T}].")
        return Trajectory(self.lattice, self.times[keep], self.data[keep], self.real, self.initial)

    def component(self, name: str) -> ComponentSeries:
        """Density (``"a"``) or velocity (``"u"``) part."""
        if name == "a":
            return ComponentSeries(self.lattice, self.times, self.data[:, :1])
        if name == "u":
            return ComponentSeries(self.lattice, self.times, self.data[:, 1:])
        raise ValueError(f"Unknown component {name!r}; expected 'a' or 'u'.")

    def symmetry_defect(self) -> float:
        """Largest conjugate-symmetry defect over all nodes and components."""
        return conjugate_symmetry_defect(self.data, self.lattice)

    @classmethod
    def from_states(
        cls, states: Sequence[FlowState], initial: FlowState | None = None
    ) -> "Trajectory":
        """Stack states with positive increasing time stamps.

        Raises:
            EmptyTrajectoryError: If ``states`` is empty

        """
        if len(states) == 0:
            raise EmptyTrajectoryError("Cannot build a trajectory from zero states.")
        lattice = states[0].lattice
        for s in states:
            if s.lattice != lattice:
                raise LatticeMismatchError(f"State on {s.lattice}, expected {lattice}.")
        return cls(
            lattice,
            np.array([s.t for s in states]),
            np.stack([s.as_array() for s in states]),
            all(s.real for s in states),
            initial,
        )
