"""Truncated frequency lattice approximating the whole-space Fourier variable.

Coefficients are stored in numpy FFT order: index ``i`` along an axis holds
the integer mode ``k = fftfreq(N, 1/N)[i]`` and the wavevector is
``xi = (2 pi / L) k``. The physical field is ``ifftn(c) * N**d``.

The extreme mode ``k_j = -N/2`` has no symmetric partner on the lattice and
is excluded from every norm. Products are dealiased with the 2/3 rule, which
keeps ``|k_j| <= (N - 1) // 3``.
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np


@dataclass(frozen=True)
class FrequencyLattice:
    """Cubic lattice of ``N**d`` frequencies with spacing ``2 pi / L``.

    Attributes:
        d: Spatial dimension
        N: Modes per axis (even)
        L: Period of the approximating torus

    """

    d: int
    N: int
    L: float = 2.0 * math.pi

    def __post_init__(self) -> None:
        """Validate lattice parameters."""
        if self.d < 2:
            raise ValueError(f"Lattice dimension must be at least 2, got {self.d}.")
        if self.N < 4 or self.N % 2:
            raise ValueError(f"N must be an even integer >= 4, got {self.N}.")
        if not math.isfinite(self.L) or self.L <= 0.0:
            raise ValueError(f"Period L must be positive, got {self.L}.")

    @property
    def shape(self) -> tuple[int, ...]:
        """Array shape of one scalar field."""
        return (self.N,) * self.d

    @property
    def axes(self) -> tuple[int, ...]:
        """Trailing axes holding the frequency grid."""
        return tuple(range(-self.d, 0))

    @property
    def spacing(self) -> float:
        """Frequency spacing ``2 pi / L``."""
        return 2.0 * math.pi / self.L

    @property
    def dealias_cutoff(self) -> int:
        """Largest integer mode kept by the 2/3 rule."""
        return (self.N - 1) // 3

    @property
    def max_inscribed(self) -> float:
        """Radius of the largest ball inside the norm-visible lattice."""
        return (self.N // 2 - 1) * self.spacing

    @cached_property
    def integer_modes(self) -> np.ndarray:
        """Integer modes, shape ``(d, N, ..., N)``."""
        k = np.fft.fftfreq(self.N, 1.0 / self.N).round().astype(int)
        return np.stack(np.meshgrid(*([k] * self.d), indexing="ij"))

    @cached_property
    def wavevectors(self) -> np.ndarray:
        """Wavevectors ``xi``, shape ``(d, N, ..., N)``."""
        return self.spacing * self.integer_modes.astype(float)

    @cached_property
    def magnitude(self) -> np.ndarray:
        """``|xi|`` on the grid."""
        return np.sqrt(np.sum(self.wavevectors**2, axis=0))

    @cached_property
    def unit_wavevectors(self) -> np.ndarray:
        """``xi / |xi|`` with zero at the origin."""
        safe = np.where(self.magnitude > 0.0, self.magnitude, 1.0)
        return np.where(self.magnitude > 0.0, self.wavevectors / safe, 0.0)

    @cached_property
    def norm_mask(self) -> np.ndarray:
        """Modes that enter norms (every component different from ``-N/2``)."""
        return np.all(self.integer_modes != -(self.N // 2), axis=0)

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        """Modes kept by the 2/3 rule."""
        return np.all(np.abs(self.integer_modes) <= self.dealias_cutoff, axis=0)

    def zeros(self, components: int | None = None) -> np.ndarray:
        """Zero coefficient array, optionally with a leading component axis."""
        shape = self.shape if components is None else (components, *self.shape)
        return np.zeros(shape, dtype=complex)

    def mode_index(self, k: Sequence[int]) -> tuple[int, ...]:
        """Array index of the integer mode ``k``.

        Args:
            k: Integer mode with ``-N/2 <= k_j < N/2``

        Returns:
            Index tuple into a coefficient array

        Raises:
            ValueError: If the mode is outside the lattice

        """
        if len(k) != self.d:
            raise ValueError(f"Mode {list(k)} has {len(k)} components, lattice has d={self.d}.")
        half = self.N // 2
        for kj in k:
            if not -half <= kj < half:
                raise ValueError(f"Mode {list(k)} is outside the lattice range [-{half}, {half}).")
        return tuple(int(kj) % self.N for kj in k)

    def reflect(self, coeffs: np.ndarray) -> np.ndarray:
        """Return ``c(-k)`` for every ``k``, acting on the trailing grid axes."""
        flipped = np.flip(coeffs, axis=self.axes)
        return np.roll(flipped, 1, axis=self.axes)

    def dealias(self, coeffs: np.ndarray) -> np.ndarray:
        """Zero every mode outside the 2/3-rule band."""
        return coeffs * self.dealias_mask

    def to_physical(self, coeffs: np.ndarray) -> np.ndarray:
        """Grid values of the trigonometric polynomial with these coefficients."""
        return np.fft.ifftn(coeffs, axes=self.axes) * (self.N**self.d)

    def from_physical(self, values: np.ndarray) -> np.ndarray:
        """Fourier coefficients of grid values."""
        return np.fft.fftn(values, axes=self.axes) / (self.N**self.d)

    def refine(self, N: int) -> "FrequencyLattice":
        """Same period with ``N`` modes per axis."""
        return FrequencyLattice(d=self.d, N=N, L=self.L)

    def dilate(self, factor: float) -> "FrequencyLattice":
        """Lattice whose spacing is multiplied by ``factor``."""
        if factor <= 0.0:
            raise ValueError(f"Dilation factor must be positive, got {factor}.")
        return FrequencyLattice(d=self.d, N=self.N, L=self.L / factor)

    def embed(self, coeffs: np.ndarray, finer: "FrequencyLattice") -> np.ndarray:
        """Copy coefficients into a lattice with the same period and more modes.

        Args:
            coeffs: Coefficients on this lattice (leading axes are carried along)
            finer: Target lattice with ``finer.N >= self.N``

        Returns:
            Coefficients on ``finer``, zero on the new modes

        """
        if finer.d != self.d or not math.isclose(finer.L, self.L) or finer.N < self.N:
            raise ValueError(
                f"Cannot embed N={self.N}, L={self.L} into N={finer.N}, L={finer.L}."
            )
        k = np.fft.fftfreq(self.N, 1.0 / self.N).round().astype(int)
        target = np.mod(k, finer.N)
        lead = coeffs.shape[: coeffs.ndim - self.d]
        out = np.zeros((*lead, *finer.shape), dtype=complex)
        out[(Ellipsis, *np.ix_(*([target] * self.d)))] = coeffs
        return out

    def relabel(self, coeffs: np.ndarray, factor: int) -> np.ndarray:
        """Move the coefficient of mode ``k`` to mode ``factor * k``.

        Modes whose image leaves the lattice are dropped, so the result is
        exact only for data supported in ``|k_j| < N / (2 factor)``.
        """
        if factor < 1:
            raise ValueError(f"Relabel factor must be a positive integer, got {factor}.")
        k = np.fft.fftfreq(self.N, 1.0 / self.N).round().astype(int)
        half = self.N // 2
        keep = (factor * k >= -half) & (factor * k < half)
        source = np.nonzero(keep)[0]
        target = np.mod(factor * k[keep], self.N)
        lead = coeffs.shape[: coeffs.ndim - self.d]
        out = np.zeros((*lead, *self.shape), dtype=complex)
        out[(Ellipsis, *np.ix_(*([target] * self.d)))] = coeffs[
            (Ellipsis, *np.ix_(*([source] * self.d)))
        ]
        return out
