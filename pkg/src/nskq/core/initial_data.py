"""Initial-data factory for declarative run configuration.

This module creates flow states from named generators, following the same
dispatch-on-a-kind pattern as the rest of the configuration layer. Every
generator produces real-flagged data (conjugate-symmetric coefficients) with
an analytically known pseudo-measure norm.

Random phases come from ``numpy.random.default_rng(seed)`` (PCG64): the
phase of mode ``k`` is the argument of the ``k``-th Fourier coefficient of a
real standard-normal grid sample, which makes it Hermitian by construction.
"""

import logging
from typing import Any

import numpy as np

from nskq.core.config import InitialDataSpec
from nskq.core.errors import LatticeMismatchError, UnknownGeneratorError
from nskq.core.fields import FlowState
from nskq.core.lattice import FrequencyLattice

logger = logging.getLogger(__name__)

SUPPORTED = "zero, single_mode, power_law, exponential_tail, gaussian, snapshot"


def hermitian_phase(lattice: FrequencyLattice, rng: np.random.Generator) -> np.ndarray:
    """Unit-modulus phases with ``phase(-k) = conj(phase(k))``."""
    noise = rng.standard_normal(lattice.shape)
    coeffs = np.fft.fftn(noise)
    magnitude = np.abs(coeffs)
    return np.where(magnitude > 0.0, coeffs / np.where(magnitude > 0.0, magnitude, 1.0), 1.0)


def _radial_profile(spec: InitialDataSpec, lattice: FrequencyLattice) -> np.ndarray:
    mag = lattice.magnitude
    if spec.kind == "power_law":
        exponent = lattice.d - 1.0 if spec.exponent is None else spec.exponent
        safe = np.where(mag > 0.0, mag, 1.0)
        profile = np.where(mag > 0.0, spec.amplitude * safe ** (-exponent), 0.0)
    elif spec.kind == "exponential_tail":
        profile = spec.amplitude * np.exp(-spec.sigma0 * mag)
    else:  # gaussian
        profile = spec.amplitude * np.exp(-spec.sigma0 * mag**2)
    if spec.cutoff is not None:
        profile = np.where(mag <= spec.cutoff, profile, 0.0)
    return np.asarray(profile)


def _transverse_direction(lattice: FrequencyLattice) -> np.ndarray:
    """Unit vector field ``(-xi_2, xi_1, 0, ...) / |xi|``, orthogonal to ``xi``."""
    khat = lattice.unit_wavevectors
    out = np.zeros_like(khat)
    out[0] = -khat[1]
    out[1] = khat[0]
    return out


def _single_mode(spec: InitialDataSpec, lattice: FrequencyLattice) -> np.ndarray:
    if len(spec.mode) != lattice.d:
        raise ValueError(
            f"single_mode needs a {lattice.d}-component mode, got {spec.mode}."
        )
    k = np.asarray(spec.mode, dtype=int)
    if not np.any(k):
        raise ValueError("single_mode needs a nonzero mode.")
    xi = lattice.spacing * k.astype(float)
    khat = xi / np.linalg.norm(xi)
    if spec.polarization == "longitudinal":
        u_plus = 1j * khat
    else:
        perp = np.zeros(lattice.d)
        perp[0], perp[1] = -khat[1], khat[0]
        u_plus = perp.astype(complex)
    U = lattice.zeros(lattice.d + 1)
    for sign in (1, -1):
        idx = lattice.mode_index(tuple(int(sign * kj) for kj in k))
        U[(0, *idx)] = spec.a_scale * spec.amplitude
        vec = u_plus if sign == 1 else np.conj(u_plus)
        for j in range(lattice.d):
            U[(j + 1, *idx)] = spec.u_scale * spec.amplitude * vec[j]
    return U


def _profile_state(
    spec: InitialDataSpec, lattice: FrequencyLattice, rng: np.random.Generator
) -> np.ndarray:
    profile = _radial_profile(spec, lattice)
    phase_a = hermitian_phase(lattice, rng) if spec.random_phase else 1.0
    phase_u = hermitian_phase(lattice, rng) if spec.random_phase else 1.0
    direction = (
        lattice.unit_wavevectors
        if spec.polarization == "longitudinal"
        else _transverse_direction(lattice)
    )
    U = lattice.zeros(lattice.d + 1)
    U[0] = spec.a_scale * profile * phase_a
    U[1:] = spec.u_scale * 1j * direction * profile * phase_u
    return U


def generate_initial_data(
    spec: InitialDataSpec | dict[str, Any],
    lattice: FrequencyLattice,
    seed: int = 0,
) -> FlowState:
    """Create initial data from a named generator.

    Args:
        spec: Generator spec (or a dictionary with a ``kind`` key). Supported kinds:
            - 'zero': identically zero data
            - 'single_mode': one conjugate pair at ``+-mode`` with amplitude A,
              so every ``PM^r`` norm at ``|xi| = 1`` equals A
            - 'power_law': ``A |xi|^-s`` (``s`` defaults to ``d - 1``)
            - 'exponential_tail': ``A exp(-sigma0 |xi|)`` (radius sigma0)
            - 'gaussian': ``A exp(-sigma0 |xi|^2)`` (super-exponential decay)
            - 'snapshot': state read from ``path``
        lattice: Target lattice
        seed: Seed of the random-phase generator

    Returns:
        Real-flagged flow state at ``t = 0``. The density carries the radial
        profile, the velocity ``i xi/|xi|`` (longitudinal) or ``i xi_perp/|xi|``
        (transverse) times the profile.

    Raises:
        UnknownGeneratorError: If the kind is missing or unsupported
        LatticeMismatchError: If a snapshot lives on another lattice

    Example:
        >>> from nskq.core.norms import pm_norm
        >>> lattice = FrequencyLattice(d=2, N=16)
        >>> state = generate_initial_data({"kind": "power_law", "amplitude": 2.0}, lattice)
        >>> round(pm_norm(state.a, 1.0), 12)
        2.0

    """
    if isinstance(spec, dict):
        kind = spec.get("kind")
        if not kind:
            raise UnknownGeneratorError(
                f"Initial-data spec must include 'kind'. Supported kinds: {SUPPORTED}"
            )
        if kind not in SUPPORTED.split(", "):
            raise UnknownGeneratorError(
                f"Unsupported initial-data kind: {kind}. Supported kinds: {SUPPORTED}"
            )
        spec = InitialDataSpec.model_validate(spec)

    rng = np.random.default_rng(seed)
    if spec.kind == "zero":
        U = lattice.zeros(lattice.d + 1)
    elif spec.kind == "single_mode":
        U = _single_mode(spec, lattice)
    elif spec.kind in ("power_law", "exponential_tail", "gaussian"):
        U = _profile_state(spec, lattice, rng)
    elif spec.kind == "snapshot":
        from nskq.core.snapshot import load_snapshot

        assert spec.path is not None
        state = load_snapshot(spec.path)
        if state.lattice != lattice:
            raise LatticeMismatchError(
                f"Snapshot {spec.path} lives on {state.lattice}, run lattice is {lattice}."
            )
        return state.with_time(0.0)
    else:
        raise UnknownGeneratorError(
            f"Unsupported initial-data kind: {spec.kind}. Supported kinds: {SUPPORTED}"
        )

    if spec.dealias:
        U = lattice.dealias(U)
    U = U * lattice.norm_mask
    logger.debug(f"Generated {spec.kind} initial data on d={lattice.d}, N={lattice.N}")
    return FlowState.from_array(lattice, U, t=0.0, real=True)
