"""Linear symbol A(xi), its decaying semigroup and the parabolic constant c0.

The linearised system reads ``dU/dt = -A(xi) U + forcing`` with
``U = (a, u_1, ..., u_d)``. Splitting ``u`` into ``v = (xi/|xi|) . u`` and the
transverse part ``w = u - (xi/|xi|) v`` decouples ``A`` into a heat factor
``mu |xi|^2`` on ``w`` and the 2x2 compressible block

    B(xi) = [[0, i|xi|], [i|xi|(alpha + kappa |xi|^2), (2 mu + nu) |xi|^2]]

on ``(a, v)``. Functions of ``-hB`` are evaluated in the symmetric Newton form
``f(M) = avg I + dd (M - s I)`` where ``s`` is the mean eigenvalue, ``avg``
the mean of ``f`` at the two eigenvalues and ``dd`` their divided difference.
Divided differences of nearby eigenvalues go through a contour mean, which
also covers the Jordan case ``lambda_+ = lambda_-``.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel
from scipy.linalg import expm

from nskq.core.config import ModelParams
from nskq.core.errors import ModelParameterError, QuadratureToleranceError
from nskq.core.lattice import FrequencyLattice

logger = logging.getLogger(__name__)

SERIES_SWITCH = 1e-2
COLLISION_TOL = 1e-8
CONTOUR_POINTS = 32
PHI_SERIES_RADIUS = 0.5
PHI_SERIES_TERMS = 24
NEAR_DIVIDED = 0.5


@dataclass(frozen=True, eq=False)
class SymbolMatrix:
    """Dense ``(d+1) x (d+1)`` symbol at one frequency."""

    xi: np.ndarray
    entries: np.ndarray


@dataclass(frozen=True, eq=False)
class SemigroupBlock:
    """Transverse rate and compressible block at one frequency."""

    xi: np.ndarray
    transverse_rate: float
    block: np.ndarray
    eigenvalues: tuple[complex, complex]


def build_symbol(xi: np.ndarray, params: ModelParams) -> SymbolMatrix:
    """Assemble ``A(xi)``.

    Args:
        xi: Frequency vector of length d
        params: Physical constants

    Returns:
        Symbol with ``A[0, j] = i xi_j``, ``A[j, 0] = i (alpha + kappa |xi|^2) xi_j``
        and ``A[j, k] = mu |xi|^2 delta_jk + (mu + nu) xi_j xi_k``

    """
    xi = np.asarray(xi, dtype=float)
    d = xi.size
    k2 = float(xi @ xi)
    A = np.zeros((d + 1, d + 1), dtype=complex)
    A[0, 1:] = 1j * xi
    A[1:, 0] = 1j * (params.alpha + params.kappa * k2) * xi
    A[1:, 1:] = params.mu * k2 * np.eye(d) + (params.mu + params.nu) * np.outer(xi, xi)
    return SymbolMatrix(xi=xi, entries=A)


def symbol_spectrum(xi: np.ndarray, params: ModelParams) -> np.ndarray:
    """Eigenvalues of ``A(xi)`` sorted by real then imaginary part."""
    eig = np.linalg.eigvals(build_symbol(xi, params).entries)
    return eig[np.lexsort((eig.imag, eig.real))]


def block_eigenvalues(
    kmag: np.ndarray | float, params: ModelParams
) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues ``(lambda_-, lambda_+)`` of the compressible block with ``Re lambda_- <= Re lambda_+``."""
    k2 = np.asarray(kmag, dtype=float) ** 2
    half = 0.5 * (2.0 * params.mu + params.nu) * k2
    q = np.sqrt(half**2 - k2 * (params.alpha + params.kappa * k2) + 0j)
    return half - q, half + q


def semigroup_block(xi: np.ndarray, params: ModelParams) -> SemigroupBlock:
    """Decompose ``A(xi)`` into its transverse rate and compressible block."""
    xi = np.asarray(xi, dtype=float)
    k = float(np.linalg.norm(xi))
    block = np.array(
        [
            [0.0, 1j * k],
            [1j * k * (params.alpha + params.kappa * k * k), (2.0 * params.mu + params.nu) * k * k],
        ],
        dtype=complex,
    )
    lam_m, lam_p = block_eigenvalues(k, params)
    return SemigroupBlock(
        xi=xi,
        transverse_rate=params.mu * k * k,
        block=block,
        eigenvalues=(complex(lam_m), complex(lam_p)),
    )


def decay_rate_from_coefficients(mu: float, nu: float, kappa: float) -> float:
    """Infimum over frequencies of ``Re lambda_-(xi) / |xi|^2``, capped by ``mu``.

    For ``mu = nu = kappa = 1`` this is ``(3 - sqrt(5)) / 2``.
    """
    viscous = 2.0 * mu + nu
    compressible = 0.5 * (viscous - math.sqrt(max(viscous * viscous - 4.0 * kappa, 0.0)))
    return min(mu, compressible)


def spectral_decay_rate(params: ModelParams) -> float:
    """Closed-form parabolic decay rate of the linear semigroup."""
    return decay_rate_from_coefficients(params.mu, params.nu, params.kappa)


def lattice_decay_rate(lattice: FrequencyLattice, params: ModelParams) -> float:
    """``min(mu, min Re lambda_- / |xi|^2)`` over the nonzero norm-visible modes."""
    mag = lattice.magnitude[lattice.norm_mask & (lattice.magnitude > 0.0)]
    lam_m, _ = block_eigenvalues(mag, params)
    return float(min(params.mu, np.min(lam_m.real / mag**2)))


# ---------------------------------------------------------------------------
# scalar phi-functions and divided differences


def phi(order: int, z: np.ndarray) -> np.ndarray:
    """``phi_k(z) = sum_j z^j / (j + k)!`` with ``phi_0 = exp``.

    Uses the Taylor series for ``|z| < 0.5`` and the recursion
    ``phi_{k+1}(z) = (phi_k(z) - 1/k!) / z`` elsewhere.
    """
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < PHI_SERIES_RADIUS
    # Horner on the truncated series
    series = np.full(z.shape, 1.0 / math.factorial(PHI_SERIES_TERMS + order), dtype=complex)
    for j in range(PHI_SERIES_TERMS - 1, -1, -1):
        series = series * z + 1.0 / math.factorial(j + order)
    safe = np.where(small, 1.0, z)
    direct = np.exp(safe)
    for k in range(order):
        direct = (direct - 1.0 / math.factorial(k)) / safe
    return np.where(small, series, direct)


def divided_difference(order: int, m1: np.ndarray, m2: np.ndarray) -> np.ndarray:
    """``(phi_k(m2) - phi_k(m1)) / (m2 - m1)``, its derivative when ``m1 = m2``."""
    m1 = np.asarray(m1, dtype=complex)
    m2 = np.asarray(m2, dtype=complex)
    delta = m2 - m1
    near = np.abs(delta) < NEAR_DIVIDED
    direct = (phi(order, m2) - phi(order, m1)) / np.where(near, 1.0, delta)
    if not np.any(near):
        return direct
    centre = 0.5 * (m1[near] + m2[near])
    theta = 2.0 * np.pi * (np.arange(CONTOUR_POINTS) + 0.5) / CONTOUR_POINTS
    ring = np.exp(1j * theta)
    points = centre[..., None] + ring
    poles = (points - m1[near][..., None]) * (points - m2[near][..., None])
    integrand = phi(order, points) * ring / poles
    out = direct.copy()
    out[near] = integrand.mean(axis=-1)
    return out


# ---------------------------------------------------------------------------
# block operators on the lattice


@dataclass(frozen=True, eq=False)
class BlockOperator:
    """A function of ``-hA`` diagonalised per frequency.

    Attributes:
        lattice: Lattice the entries live on
        f00, f01, f10, f11: Entries of the 2x2 action on ``(a, v)``
        transverse: Scalar factor on the transverse velocity

    Leading axes of the entries (e.g. a time axis) broadcast against the
    leading axes of the state arrays passed to :meth:`apply`.
    """

    lattice: FrequencyLattice
    f00: np.ndarray
    f01: np.ndarray
    f10: np.ndarray
    f11: np.ndarray
    transverse: np.ndarray

    def apply(self, U: np.ndarray) -> np.ndarray:
        """Apply to stacked states of shape ``(..., d + 1, *grid)``."""
        axis = -self.lattice.d - 1
        khat = self.lattice.unit_wavevectors
        a = np.take(U, 0, axis=axis)
        u = np.take(U, np.arange(1, self.lattice.d + 1), axis=axis)
        v = np.sum(khat * u, axis=axis)
        w = u - khat * np.expand_dims(v, axis)
        a_new = self.f00 * a + self.f01 * v
        v_new = self.f10 * a + self.f11 * v
        u_new = np.expand_dims(self.transverse, axis) * w + khat * np.expand_dims(v_new, axis)
        return np.concatenate([np.expand_dims(a_new, axis), u_new], axis=axis)


def _block_exponential(
    t: np.ndarray, kmag: np.ndarray, params: ModelParams
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Entries of ``exp(-tB)`` and the transverse factor ``exp(-mu |xi|^2 t)``."""
    k2 = kmag**2
    half = 0.5 * (2.0 * params.mu + params.nu) * k2
    stiffness = params.alpha + params.kappa * k2
    q = np.sqrt(half**2 - k2 * stiffness + 0j)
    tq = t * q
    small = (np.abs(tq) < SERIES_SWITCH) | (np.abs(q) < COLLISION_TOL * np.maximum(half, 1e-300))
    damp = np.exp(-t * half)
    with np.errstate(over="ignore", invalid="ignore"):
        ep = np.exp(-t * (half - q))
        em = np.exp(-t * (half + q))
        sinhc_direct = (ep - em) / (2.0 * np.where(small, 1.0, q))
    z2 = tq**2
    sinhc_series = t * damp * (1.0 + z2 / 6.0 + z2**2 / 120.0 + z2**3 / 5040.0)
    cosh_series = damp * (1.0 + z2 / 2.0 + z2**2 / 24.0 + z2**3 / 720.0)
    sinhc = np.where(small, sinhc_series, sinhc_direct)
    cosh_part = np.where(small, cosh_series, 0.5 * (ep + em))
    f00 = cosh_part + half * sinhc
    f01 = -1j * kmag * sinhc
    f10 = -1j * kmag * stiffness * sinhc
    f11 = cosh_part - half * sinhc
    transverse = np.exp(-params.mu * k2 * t) + 0j
    return f00, f01, f10, f11, transverse


def _time_axis(t: np.ndarray | float, d: int) -> tuple[np.ndarray, bool]:
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0.0):
        raise ValueError(f"Semigroup time must be nonnegative, got {arr.min()}.")
    scalar = arr.ndim == 0
    return arr.reshape((-1,) + (1,) * d), scalar


def exponential_operator(
    t: np.ndarray | float, lattice: FrequencyLattice, params: ModelParams
) -> BlockOperator:
    """``exp(-tA)`` on the lattice, with a leading axis when ``t`` is an array."""
    tt, scalar = _time_axis(t, lattice.d)
    entries = _block_exponential(tt, lattice.magnitude, params)
    if scalar:
        entries = tuple(e[0] for e in entries)  # type: ignore[assignment]
    return BlockOperator(lattice, *entries)


def phi_operator(
    order: int, h: float, lattice: FrequencyLattice, params: ModelParams
) -> BlockOperator:
    """``phi_order(-hA)`` on the lattice."""
    mag = lattice.magnitude
    k2 = mag**2
    lam_m, lam_p = block_eigenvalues(mag, params)
    m1 = -h * lam_m
    m2 = -h * lam_p
    avg = 0.5 * (phi(order, m1) + phi(order, m2))
    dd = divided_difference(order, m1, m2)
    half = 0.5 * (2.0 * params.mu + params.nu) * k2
    stiffness = params.alpha + params.kappa * k2
    return BlockOperator(
        lattice,
        f00=avg + h * half * dd,
        f01=-1j * h * mag * dd,
        f10=-1j * h * mag * stiffness * dd,
        f11=avg - h * half * dd,
        transverse=phi(order, -h * params.mu * k2 + 0j),
    )


def propagate(
    t: np.ndarray | float, U: np.ndarray, lattice: FrequencyLattice, params: ModelParams
) -> np.ndarray:
    """Apply ``exp(-tA)`` to a stacked state ``(d + 1, *grid)``.

    Returns shape ``(d + 1, *grid)`` for scalar ``t`` and ``(n, d + 1, *grid)``
    for an array of ``n`` times.
    """
    return exponential_operator(t, lattice, params).apply(U)


def semigroup_apply(t: float, xi: np.ndarray, v: np.ndarray, params: ModelParams) -> np.ndarray:
    """``exp(-tA(xi)) v`` at a single frequency via the block decomposition.

    Args:
        t: Nonnegative time
        xi: Frequency vector
        v: Vector ``(a, u_1, ..., u_d)``
        params: Physical constants

    Returns:
        The propagated vector

    Raises:
        ValueError: If ``t < 0``

    """
    if t < 0.0:
        raise ValueError(f"Semigroup time must be nonnegative, got {t}.")
    xi = np.asarray(xi, dtype=float)
    v = np.asarray(v, dtype=complex)
    k = float(np.linalg.norm(xi))
    khat = xi / k if k > 0.0 else np.zeros_like(xi)
    f00, f01, f10, f11, tr = (
        complex(e) for e in _block_exponential(np.asarray(t), np.asarray(k), params)
    )
    a, u = v[0], v[1:]
    vl = khat @ u
    w = u - khat * vl
    out = np.empty_like(v)
    out[0] = f00 * a + f01 * vl
    out[1:] = tr * w + khat * (f10 * a + f11 * vl)
    return out


def dense_semigroup(t: float, xi: np.ndarray, params: ModelParams) -> np.ndarray:
    """Dense ``expm(-tA(xi))`` (scaling and squaring), the cross-check oracle."""
    return np.asarray(expm(-t * build_symbol(xi, params).entries))


def apply_symbol(U: np.ndarray, lattice: FrequencyLattice, params: ModelParams) -> np.ndarray:
    """``A(xi) U`` for a stacked state, computed directly from the matrix entries."""
    xi = lattice.wavevectors
    k2 = lattice.magnitude**2
    a = U[0]
    u = U[1:]
    div = np.sum(xi * u, axis=0)
    out = np.empty_like(U, dtype=complex)
    out[0] = 1j * div
    out[1:] = (
        1j * (params.alpha + params.kappa * k2) * xi * a
        + params.mu * k2 * u
        + (params.mu + params.nu) * xi * div
    )
    return out


def heat_propagate(rate: float, times: np.ndarray, U: np.ndarray, lattice: FrequencyLattice) -> np.ndarray:
    """``exp(rate t Laplace) U`` at every time, shape ``(n, d + 1, *grid)``."""
    t = np.asarray(times, dtype=float).reshape((-1,) + (1,) * lattice.d)
    factor = np.exp(-rate * t * lattice.magnitude**2)
    return factor[:, None] * U[None]


# ---------------------------------------------------------------------------
# decay constant


class DecayReport(BaseModel):
    """Measured constants of the weighted decay estimate."""

    c0_spectral: float
    c0_asymptotic: float
    c0_measured: float
    C_measured: float
    worst_t: float
    worst_xi: list[float]
    samples: int
    s_max: float


def weighted_amplification(
    t: np.ndarray, kmag: np.ndarray, params: ModelParams
) -> np.ndarray:
    """Operator norm of ``exp(-tA)`` in the weighted norm ``|(a, |xi| a, u)|``.

    In the variables ``(sqrt(1 + |xi|^2) a, v)`` the weighted norm is Euclidean,
    so the amplification is the largest singular value of the rescaled block,
    maximised with the transverse factor.
    """
    f00, f01, f10, f11, tr = _block_exponential(t, kmag, params)
    scale = np.sqrt(1.0 + kmag**2) * np.ones_like(f00.real)
    M = np.empty((*f00.shape, 2, 2), dtype=complex)
    M[..., 0, 0] = f00
    M[..., 0, 1] = f01 * scale
    M[..., 1, 0] = f10 / scale
    M[..., 1, 1] = f11
    sigma = np.linalg.norm(M, ord=2, axis=(-2, -1))
    return np.asarray(np.maximum(sigma, np.abs(tr)))


def decay_constant(
    params: ModelParams,
    lattice: FrequencyLattice,
    t_grid: np.ndarray,
    s_max: float = 100.0,
    candidate_ratio: float = 1.001,
) -> DecayReport:
    """Largest ``c0`` and smallest ``C`` with ``G(t, xi) <= C exp(-c0 t |xi|^2)``.

    ``G`` is the weighted amplification factor sampled at every lattice
    magnitude and grid time with ``t |xi|^2 <= s_max``. A candidate ``c0`` is
    accepted when, at every sampled magnitude, ``G exp(c0 s)`` over the upper
    half of the ``s`` range stays below its maximum over the lower half; the
    accepted candidates are located by binary search on a log-spaced grid with
    relative resolution ``candidate_ratio - 1``.

    Args:
        params: Physical constants
        lattice: Frequency lattice
        t_grid: Sample times
        s_max: Largest sampled ``t |xi|^2``
        candidate_ratio: Ratio of consecutive candidate values

    Returns:
        DecayReport with spectral prediction, measured c0 and C and the worst sample

    Raises:
        ModelParameterError: If some block eigenvalue has nonpositive real part
        ValueError: If no sample lies in the ``s`` range

    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.size == 0:
        raise ValueError("decay_constant needs a nonempty time grid.")
    visible = lattice.norm_mask & (lattice.magnitude > 0.0)
    mags = np.unique(np.round(lattice.magnitude[visible], 12))
    lam_m, _ = block_eigenvalues(mags, params)
    if np.any(lam_m.real <= 0.0):
        bad = float(mags[np.argmin(lam_m.real)])
        raise ModelParameterError(
            f"Linear block does not decay at |xi|={bad:.6g} (Re lambda <= 0). "
            "Check that mu, kappa, alpha and mu + nu are positive."
        )

    t = t_grid[:, None]
    s = t * mags[None, :] ** 2
    valid = s <= s_max
    if not np.any(valid):
        raise ValueError(f"No sample with t |xi|^2 <= {s_max}; extend the time grid.")
    G = weighted_amplification(t, mags[None, :], params)
    late = valid & (s >= 0.5 * s_max)
    early = valid & ~late
    checked = np.any(late, axis=0) & np.any(early, axis=0)

    def accepted(c0: float) -> bool:
        P = G * np.exp(np.where(valid, c0 * s, 0.0))
        late_max = np.where(late, P, -np.inf).max(axis=0)
        early_max = np.where(early, P, -np.inf).max(axis=0)
        return bool(np.all(late_max[checked] <= early_max[checked] * (1.0 + 1e-9)))

    c0_spectral = lattice_decay_rate(lattice, params)
    upper = 4.0 * max(c0_spectral, params.mu)
    n = int(math.ceil(math.log(upper / 1e-3) / math.log(candidate_ratio))) + 1
    candidates = 1e-3 * candidate_ratio ** np.arange(n)
    lo, hi = 0, n - 1
    if not accepted(float(candidates[lo])):
        logger.warning("No decay candidate accepted; reporting the smallest candidate.")
        hi = lo
    elif accepted(float(candidates[hi])):
        lo = hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if accepted(float(candidates[mid])):
            lo = mid
        else:
            hi = mid
    c0 = float(candidates[lo])

    P = np.where(valid, G * np.exp(np.where(valid, c0 * s, 0.0)), -np.inf)
    i, j = np.unravel_index(int(np.argmax(P)), P.shape)
    worst_mag = float(mags[j])
    match = np.argwhere(visible & np.isclose(lattice.magnitude, worst_mag))[0]
    worst_xi = [float(lattice.wavevectors[(axis, *match)]) for axis in range(lattice.d)]
    logger.info(
        f"Measured decay c0={c0:.4f} (spectral {c0_spectral:.4f}), C={float(P[i, j]):.4f}"
    )
    return DecayReport(
        c0_spectral=c0_spectral,
        c0_asymptotic=spectral_decay_rate(params),
        c0_measured=c0,
        C_measured=float(P[i, j]),
        worst_t=float(t_grid[i]),
        worst_xi=worst_xi,
        samples=int(valid.sum()),
        s_max=s_max,
    )


# ---------------------------------------------------------------------------
# inhomogeneous estimate


class DuhamelBoundCheck(BaseModel):
    """Inhomogeneous decay estimate at one frequency."""

    t: float
    lhs: float
    rhs_integral: float
    ratio: float
    C: float
    holds: bool
    nodes: int


def _weighted_norm(vectors: np.ndarray, k: float) -> np.ndarray:
    a = vectors[..., 0]
    u = vectors[..., 1:]
    return np.asarray(np.sqrt((1.0 + k * k) * np.abs(a) ** 2 + np.sum(np.abs(u) ** 2, axis=-1)))


def duhamel_bound_check(
    t: float,
    xi: np.ndarray,
    forcing: np.ndarray,
    params: ModelParams,
    C: float,
    c0: float | None = None,
    tol: float = 1e-10,
    max_nodes: int = 1024,
) -> DuhamelBoundCheck:
    """Compare ``|int_0^t W(t-s) F(s) ds|`` with ``int_0^t exp(-c0 |xi|^2 (t-s)) |F(s)| ds``.

    Norms are the weighted ``|(a, |xi| a, u)|``. The forcing is either a
    constant vector of length ``d + 1`` or a sample array of
    shape ``(m, d + 1)`` on a uniform grid of ``[0, t]``, linearly
    interpolated. Gauss-Legendre quadrature is doubled until two successive
    rules agree to ``tol``.

    Raises:
        QuadratureToleranceError: If ``max_nodes`` is reached without agreement

    """
    if t < 0.0:
        raise ValueError(f"t must be nonnegative, got {t}.")
    rate = params.decay if c0 is None else c0
    xi = np.asarray(xi, dtype=float)
    k = float(np.linalg.norm(xi))
    samples = np.atleast_2d(np.asarray(forcing, dtype=complex))
    if t == 0.0:
        return DuhamelBoundCheck(t=0.0, lhs=0.0, rhs_integral=0.0, ratio=0.0, C=C, holds=True, nodes=0)

    grid = np.linspace(0.0, t, samples.shape[0])

    def forcing_at(s: float) -> np.ndarray:
        if samples.shape[0] == 1:
            return samples[0]
        return np.array(
            [np.interp(s, grid, col.real) + 1j * np.interp(s, grid, col.imag) for col in samples.T]
        )

    def rules(n: int) -> tuple[np.ndarray, float]:
        x, w = np.polynomial.legendre.leggauss(n)
        s_nodes = 0.5 * t * (x + 1.0)
        weights = 0.5 * t * w
        vec = np.zeros(samples.shape[1], dtype=complex)
        scalar = 0.0
        for s, wt in zip(s_nodes, weights, strict=True):
            F = forcing_at(float(s))
            vec += wt * semigroup_apply(t - float(s), xi, F, params)
            scalar += wt * math.exp(-rate * k * k * (t - float(s))) * float(_weighted_norm(F, k))
        return vec, scalar

    n = 16
    prev_vec, prev_scalar = rules(n)
    while True:
        n *= 2
        vec, scalar = rules(n)
        scale = max(float(_weighted_norm(vec, k)), scalar, 1e-300)
        converged = (
            float(_weighted_norm(vec - prev_vec, k)) <= tol * scale
            and abs(scalar - prev_scalar) <= tol * scale
        )
        if converged:
            break
        if n >= max_nodes:
            raise QuadratureToleranceError(
                f"Duhamel quadrature at t={t}, |xi|={k:.4g} did not reach tol={tol} "
                f"with {n} Gauss-Legendre nodes."
            )
        prev_vec, prev_scalar = vec, scalar
    lhs = float(_weighted_norm(vec, k))
    ratio = lhs / scalar if scalar > 0.0 else 0.0
    return DuhamelBoundCheck(
        t=t,
        lhs=lhs,
        rhs_integral=scalar,
        ratio=ratio,
        C=C,
        holds=ratio <= C * (1.0 + 10.0 * tol),
        nodes=n,
    )


class SemigroupCheck(BaseModel):
    """Semigroup property and block-versus-dense agreement on random samples."""

    samples: int
    max_composition_error: float
    max_dense_error: float
    composition_tol: float
    dense_tol: float
    passes: bool


def check_semigroup(
    params: ModelParams,
    d: int = 2,
    samples: int = 1000,
    seed: int = 0,
    s_max: float = 10.0,
    composition_tol: float = 1e-12,
    dense_tol: float = 1e-10,
) -> SemigroupCheck:
    """Compare ``W(t) W(s) v`` with ``W(t + s) v`` and the block exponential with ``expm``.

    Frequencies are log-uniform in ``[1e-2, 1e2]`` with uniform directions;
    times are drawn so that ``(t + s) |xi|^2 <= s_max``. Errors are relative
    to the norm of the propagated vector.
    """
    rng = np.random.default_rng(seed)
    worst_composition = 0.0
    worst_dense = 0.0
    for _ in range(samples):
        direction = rng.standard_normal(d)
        xi = direction / np.linalg.norm(direction) * 10.0 ** rng.uniform(-2.0, 2.0)
        k2 = float(xi @ xi)
        total = rng.uniform(0.0, s_max) / k2
        t = total * rng.uniform(0.0, 1.0)
        s = total - t
        v = rng.standard_normal(d + 1) + 1j * rng.standard_normal(d + 1)
        whole = semigroup_apply(t + s, xi, v, params)
        scale = max(float(np.linalg.norm(whole)), 1e-300)
        composed = semigroup_apply(t, xi, semigroup_apply(s, xi, v, params), params)
        dense = dense_semigroup(t + s, xi, params) @ v
        worst_composition = max(worst_composition, float(np.linalg.norm(composed - whole)) / scale)
        worst_dense = max(worst_dense, float(np.linalg.norm(dense - whole)) / scale)
    logger.info(
        f"Semigroup check over {samples} samples: composition {worst_composition:.2e}, "
        f"dense {worst_dense:.2e}"
    )
    return SemigroupCheck(
        samples=samples,
        max_composition_error=worst_composition,
        max_dense_error=worst_dense,
        composition_tol=composition_tol,
        dense_tol=dense_tol,
        passes=worst_composition <= composition_tol and worst_dense <= dense_tol,
    )
