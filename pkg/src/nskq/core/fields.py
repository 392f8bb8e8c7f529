"""Spectral fields and flow states on a frequency lattice."""

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from nskq.core.errors import InvalidFieldError, LatticeMismatchError
from nskq.core.lattice import FrequencyLattice

SYMMETRY_TOLERANCE = 1e-9


def conjugate_symmetry_defect(coeffs: np.ndarray, lattice: FrequencyLattice) -> float:
    """Largest ``|c(-k) - conj(c(k))|`` over the norm-visible modes."""
    defect = np.abs(lattice.reflect(coeffs) - np.conj(coeffs))
    defect = np.where(lattice.norm_mask, defect, 0.0)
    return float(defect.max()) if defect.size else 0.0


def _checked_coefficients(
    coeffs: np.ndarray, lattice: FrequencyLattice, real: bool, components: int | None = None
) -> np.ndarray:
    arr = np.array(coeffs, dtype=complex)
    expected = lattice.shape if components is None else (components, *lattice.shape)
    if arr.shape != expected:
        raise InvalidFieldError(f"Coefficient array has shape {arr.shape}, expected {expected}.")
    if not np.all(np.isfinite(arr)):
        raise InvalidFieldError("Coefficient array contains NaN or Inf entries.")
    if real:
        scale = max(1.0, float(np.abs(arr).max()))
        defect = conjugate_symmetry_defect(arr, lattice)
        if defect > SYMMETRY_TOLERANCE * scale:
            raise InvalidFieldError(
                f"Field flagged real violates c(-k) = conj(c(k)) by {defect:.3e}."
            )
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Complex Fourier coefficients of one scalar field.

    Attributes:
        lattice: Frequency lattice
        coeffs: Coefficients in FFT order, shape ``lattice.shape``
        real: The field is the transform of a real function

    """

    lattice: FrequencyLattice
    coeffs: np.ndarray
    real: bool = False

    def __post_init__(self) -> None:
        """Validate coefficients and freeze the array."""
        object.__setattr__(
            self, "coeffs", _checked_coefficients(self.coeffs, self.lattice, self.real)
        )

    @classmethod
    def zeros(cls, lattice: FrequencyLattice, real: bool = True) -> "SpectralField":
        """Identically zero field."""
        return cls(lattice, lattice.zeros(), real)

    def _check_same(self, other: "SpectralField") -> None:
        if other.lattice != self.lattice:
            raise LatticeMismatchError(f"Fields live on {self.lattice} and {other.lattice}.")

    def __add__(self, other: "SpectralField") -> "SpectralField":
        self._check_same(other)
        return SpectralField(self.lattice, self.coeffs + other.coeffs, self.real and other.real)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        self._check_same(other)
        return SpectralField(self.lattice, self.coeffs - other.coeffs, self.real and other.real)

    def scale(self, factor: float) -> "SpectralField":
        """Multiply by a real scalar."""
        return SpectralField(self.lattice, factor * self.coeffs, self.real)

    def relabel(self, factor: int) -> "SpectralField":
        """Dilate in frequency: the coefficient of ``k`` moves to ``factor * k``."""
        return SpectralField(self.lattice, self.lattice.relabel(self.coeffs, factor), self.real)

    def embed(self, finer: FrequencyLattice) -> "SpectralField":
        """Same field on a lattice with more modes."""
        return SpectralField(finer, self.lattice.embed(self.coeffs, finer), self.real)

    def dilate(self, factor: float) -> "SpectralField":
        """Same coefficients read on a lattice with spacing times ``factor``."""
        return SpectralField(self.lattice.dilate(factor), self.coeffs, self.real)


@dataclass(frozen=True, eq=False)
class FlowState:
    """Density perturbation ``a`` and velocity ``u`` at one time.

    Attributes:
        a: Density perturbation
        u: Velocity components, one per spatial dimension
        t: Time stamp shared by all components

    """

    a: SpectralField
    u: tuple[SpectralField, ...]
    t: float = 0.0
    _array: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        """Check component count, shared lattice and time."""
        object.__setattr__(self, "u", tuple(self.u))
        lattice = self.a.lattice
        if len(self.u) != lattice.d:
            raise InvalidFieldError(
                f"Velocity has {len(self.u)} components, lattice dimension is {lattice.d}."
            )
        for component in self.u:
            if component.lattice != lattice:
                raise LatticeMismatchError(
                    f"Velocity component on {component.lattice}, density on {lattice}."
                )
        if not np.isfinite(self.t) or self.t < 0.0:
            raise InvalidFieldError(f"Time stamp must be finite and nonnegative, got {self.t}.")
        arr = np.stack([self.a.coeffs, *(c.coeffs for c in self.u)])
        arr.setflags(write=False)
        object.__setattr__(self, "_array", arr)

    @property
    def lattice(self) -> FrequencyLattice:
        """Lattice shared by all components."""
        return self.a.lattice

    @property
    def real(self) -> bool:
        """All components are transforms of real functions."""
        return self.a.real and all(c.real for c in self.u)

    def as_array(self) -> np.ndarray:
        """Stacked coefficients ``(a, u_1, ..., u_d)``, shape ``(d + 1, *grid)``."""
        return self._array

    @classmethod
    def from_array(
        cls, lattice: FrequencyLattice, arr: np.ndarray, t: float = 0.0, real: bool = True
    ) -> "FlowState":
        """Build a state from stacked coefficients."""
        arr = np.asarray(arr)
        if arr.shape != (lattice.d + 1, *lattice.shape):
            raise InvalidFieldError(
                f"State array has shape {arr.shape}, expected {(lattice.d + 1, *lattice.shape)}."
            )
        return cls(
            a=SpectralField(lattice, arr[0], real),
            u=tuple(SpectralField(lattice, arr[j], real) for j in range(1, lattice.d + 1)),
            t=t,
        )

    @classmethod
    def zeros(cls, lattice: FrequencyLattice, t: float = 0.0) -> "FlowState":
        """State with every component zero."""
        return cls.from_array(lattice, lattice.zeros(lattice.d + 1), t)

    @classmethod
    def from_components(
        cls, a: SpectralField, u: Sequence[SpectralField], t: float = 0.0
    ) -> "FlowState":
        """Build a state from separate fields."""
        return cls(a=a, u=tuple(u), t=t)

    def with_time(self, t: float) -> "FlowState":
        """Same coefficients with another time stamp."""
        return FlowState(self.a, self.u, t)

    def scale(self, factor: float) -> "FlowState":
        """Multiply every component by ``factor``."""
        return FlowState(self.a.scale(factor), tuple(c.scale(factor) for c in self.u), self.t)

    def relabel(self, factor: int) -> "FlowState":
        """Frequency dilation of every component."""
        return FlowState(
            self.a.relabel(factor), tuple(c.relabel(factor) for c in self.u), self.t
        )

    def embed(self, finer: FrequencyLattice) -> "FlowState":
        """Same state on a lattice with more modes."""
        return FlowState(self.a.embed(finer), tuple(c.embed(finer) for c in self.u), self.t)
