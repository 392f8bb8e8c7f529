"""Nonlinearities f, g1, g2 and g3 of the quantum Navier-Stokes-Korteweg system.

With ``U = (a, u)`` the forcing is ``f = -u . grad a`` for the density and
``g = g1 + g2 + g3`` for the velocity:

    (g1)_j = -sum_k u_k d_k u_j
    (g2)_j = mu sum_k d_k a d_k u_j + (mu + nu) sum_k d_k a (Du)_{jk}
    (g3)_j = (kappa / 2) d_j sum_k (d_k a)^2

``(Du)_{jk}`` is ``d_j u_k`` for the transpose contraction (default) and
``d_k u_j`` for the gradient contraction.

Every quadratic product is taken between dealiased factors and dealiased
again, so the fast path (pseudo-spectral products) and the oracle path
(truncated convolution) compute the same band-limited quantity.
"""

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from enum import Enum

import numpy as np
from pydantic import BaseModel

from nskq.core.config import ALL_TERMS, ModelParams, NonlinearTerm
from nskq.core.errors import LatticeMismatchError
from nskq.core.fields import FlowState, SpectralField
from nskq.core.lattice import FrequencyLattice

logger = logging.getLogger(__name__)


class DuContraction(str, Enum):
    """Reading of the ``grad a . Du`` contraction in g2."""

    TRANSPOSE = "transpose"
    GRADIENT = "gradient"


class ProductMethod(str, Enum):
    """Evaluation path of quadratic products."""

    FAST = "fast"
    ORACLE = "oracle"


Product = Callable[[np.ndarray, np.ndarray], np.ndarray]


def fast_product(lattice: FrequencyLattice, real: bool = False) -> Product:
    """Pseudo-spectral product with 2/3-rule dealiasing."""

    def product(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        values = lattice.to_physical(lattice.dealias(x)) * lattice.to_physical(lattice.dealias(y))
        if real:
            values = values.real
        return lattice.dealias(lattice.from_physical(values))

    return product


def _shift(src: np.ndarray, offset: Sequence[int]) -> np.ndarray:
    """``dst[c] = src[c - offset]`` without wrap-around."""
    dst = np.zeros_like(src)
    target: list[slice] = []
    source: list[slice] = []
    for m, n in zip(offset, src.shape, strict=True):
        if m >= 0:
            target.append(slice(m, n))
            source.append(slice(0, n - m))
        else:
            target.append(slice(0, n + m))
            source.append(slice(-m, n))
    dst[tuple(target)] = src[tuple(source)]
    return dst


def convolution_product(lattice: FrequencyLattice) -> Product:
    """Exact truncated convolution ``sum_eta x(xi - eta) y(eta)`` over the lattice.

    Costs ``O(N^(2d))``; meant for lattices with ``N <= 32``.
    """
    half = lattice.N // 2

    def product(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        xs = np.fft.fftshift(lattice.dealias(x))
        ys = np.fft.fftshift(lattice.dealias(y))
        out = np.zeros_like(xs)
        for idx in np.argwhere(ys != 0):
            offset = [int(i) - half for i in idx]
            out += ys[tuple(idx)] * _shift(xs, offset)
        return lattice.dealias(np.fft.ifftshift(out))

    return product


def _product_for(lattice: FrequencyLattice, method: ProductMethod | str, real: bool) -> Product:
    if ProductMethod(method) is ProductMethod.ORACLE:
        return convolution_product(lattice)
    return fast_product(lattice, real)


def _grad(coeffs: np.ndarray, lattice: FrequencyLattice) -> list[np.ndarray]:
    return [1j * lattice.wavevectors[k] * coeffs for k in range(lattice.d)]


def f_form(u: np.ndarray, a: np.ndarray, lattice: FrequencyLattice, product: Product) -> np.ndarray:
    """``-sum_k u_k d_k a``."""
    da = _grad(a, lattice)
    return -sum((product(u[k], da[k]) for k in range(lattice.d)), lattice.zeros())


def g1_form(u: np.ndarray, v: np.ndarray, lattice: FrequencyLattice, product: Product) -> np.ndarray:
    """``(-sum_k u_k d_k v_j)_j``."""
    dv = [_grad(v[j], lattice) for j in range(lattice.d)]
    return np.stack(
        [
            -sum((product(u[k], dv[j][k]) for k in range(lattice.d)), lattice.zeros())
            for j in range(lattice.d)
        ]
    )


def g2_form(
    a: np.ndarray,
    u: np.ndarray,
    lattice: FrequencyLattice,
    product: Product,
    params: ModelParams,
    contraction: DuContraction | str = DuContraction.TRANSPOSE,
) -> np.ndarray:
    """``mu grad a . grad u + (mu + nu) grad a . Du``."""
    transpose = DuContraction(contraction) is DuContraction.TRANSPOSE
    da = _grad(a, lattice)
    du = [_grad(u[j], lattice) for j in range(lattice.d)]  # du[j][k] = d_k u_j
    rows = []
    for j in range(lattice.d):
        row = lattice.zeros()
        for k in range(lattice.d):
            row = row + params.mu * product(da[k], du[j][k])
            mixed = du[k][j] if transpose else du[j][k]
            row = row + (params.mu + params.nu) * product(da[k], mixed)
        rows.append(row)
    return np.stack(rows)


def g3_form(
    a: np.ndarray, b: np.ndarray, lattice: FrequencyLattice, product: Product, params: ModelParams
) -> np.ndarray:
    """``(kappa / 2) grad (grad a . grad b)``."""
    da = _grad(a, lattice)
    db = _grad(b, lattice)
    q = sum((product(da[k], db[k]) for k in range(lattice.d)), lattice.zeros())
    return np.stack(
        [0.5 * params.kappa * 1j * lattice.wavevectors[j] * q for j in range(lattice.d)]
    )


def bilinear_forcing_array(
    X: np.ndarray,
    Y: np.ndarray,
    lattice: FrequencyLattice,
    params: ModelParams,
    terms: Sequence[NonlinearTerm] = ALL_TERMS,
    method: ProductMethod | str = ProductMethod.FAST,
    contraction: DuContraction | str = DuContraction.TRANSPOSE,
    real: bool = False,
) -> np.ndarray:
    """Bilinear forcing with slots taken from two stacked states.

    The slots are ``f(u_X, a_Y)``, ``g1(u_X, u_Y)``, ``g2(a_X, u_Y)`` and
    ``g3(a_X, a_Y)``, so ``X = Y = U`` gives the forcing of ``U``.

    Returns:
        Stacked ``(f, g)`` of shape ``(d + 1, *grid)``

    """
    product = _product_for(lattice, method, real)
    out = lattice.zeros(lattice.d + 1)
    if "f" in terms:
        out[0] += f_form(X[1:], Y[0], lattice, product)
    if "g1" in terms:
        out[1:] += g1_form(X[1:], Y[1:], lattice, product)
    if "g2" in terms:
        out[1:] += g2_form(X[0], Y[1:], lattice, product, params, contraction)
    if "g3" in terms:
        out[1:] += g3_form(X[0], Y[0], lattice, product, params)
    return out


def forcing_array(
    U: np.ndarray,
    lattice: FrequencyLattice,
    params: ModelParams,
    terms: Sequence[NonlinearTerm] = ALL_TERMS,
    method: ProductMethod | str = ProductMethod.FAST,
    contraction: DuContraction | str = DuContraction.TRANSPOSE,
    real: bool = False,
) -> np.ndarray:
    """Full forcing ``(f, g1 + g2 + g3)`` of a stacked state."""
    return bilinear_forcing_array(U, U, lattice, params, terms, method, contraction, real)


@dataclass(frozen=True, eq=False)
class NonlinearOutput:
    """Density and velocity forcing with the product path used."""

    f_hat: SpectralField
    g_hat: tuple[SpectralField, ...]
    method: str


def _as_fields(lattice: FrequencyLattice, rows: np.ndarray, real: bool) -> tuple[SpectralField, ...]:
    return tuple(SpectralField(lattice, row, real) for row in rows)


def compute_f(state: FlowState, method: ProductMethod | str = ProductMethod.FAST) -> SpectralField:
    """``f = -u . grad a``."""
    lattice = state.lattice
    U = state.as_array()
    product = _product_for(lattice, method, state.real)
    return SpectralField(lattice, f_form(U[1:], U[0], lattice, product), state.real)


def compute_g1(
    state: FlowState, method: ProductMethod | str = ProductMethod.FAST
) -> tuple[SpectralField, ...]:
    """``g1 = -u . grad u``."""
    lattice = state.lattice
    U = state.as_array()
    product = _product_for(lattice, method, state.real)
    return _as_fields(lattice, g1_form(U[1:], U[1:], lattice, product), state.real)


def compute_g2(
    state: FlowState,
    params: ModelParams,
    method: ProductMethod | str = ProductMethod.FAST,
    contraction: DuContraction | str = DuContraction.TRANSPOSE,
) -> tuple[SpectralField, ...]:
    """``g2 = mu grad a . grad u + (mu + nu) grad a . Du``."""
    lattice = state.lattice
    U = state.as_array()
    product = _product_for(lattice, method, state.real)
    rows = g2_form(U[0], U[1:], lattice, product, params, contraction)
    return _as_fields(lattice, rows, state.real)


def compute_g3(
    state: FlowState, params: ModelParams, method: ProductMethod | str = ProductMethod.FAST
) -> tuple[SpectralField, ...]:
    """``g3 = (kappa / 2) grad |grad a|^2``."""
    lattice = state.lattice
    U = state.as_array()
    product = _product_for(lattice, method, state.real)
    return _as_fields(lattice, g3_form(U[0], U[0], lattice, product, params), state.real)


def nonlinearity(
    state: FlowState,
    params: ModelParams,
    terms: Sequence[NonlinearTerm] = ALL_TERMS,
    method: ProductMethod | str = ProductMethod.FAST,
    contraction: DuContraction | str = DuContraction.TRANSPOSE,
) -> NonlinearOutput:
    """Forcing ``(f, g1 + g2 + g3)`` of a flow state."""
    lattice = state.lattice
    out = forcing_array(
        state.as_array(), lattice, params, terms, method, contraction, state.real
    )
    return NonlinearOutput(
        f_hat=SpectralField(lattice, out[0], state.real),
        g_hat=_as_fields(lattice, out[1:], state.real),
        method=ProductMethod(method).value,
    )


def bilinear_forcing(
    x: FlowState,
    y: FlowState,
    term: NonlinearTerm,
    params: ModelParams,
    method: ProductMethod | str = ProductMethod.FAST,
    contraction: DuContraction | str = DuContraction.TRANSPOSE,
) -> FlowState:
    """One bilinear term evaluated on two states.

    Raises:
        LatticeMismatchError: If the states live on different lattices

    """
    if x.lattice != y.lattice:
        raise LatticeMismatchError(f"States live on {x.lattice} and {y.lattice}.")
    out = bilinear_forcing_array(
        x.as_array(), y.as_array(), x.lattice, params, (term,), method, contraction
    )
    return FlowState.from_array(x.lattice, out, t=x.t, real=False)


class PathAgreement(BaseModel):
    """Largest relative gap between the fast and oracle product paths."""

    N: int
    d: int
    seeds: int
    per_term: dict[str, float]
    max_relative_error: float
    tolerance: float
    passes: bool


def compare_product_paths(
    lattice: FrequencyLattice,
    params: ModelParams,
    seeds: int = 100,
    contraction: DuContraction | str = DuContraction.TRANSPOSE,
    tolerance: float = 1e-12,
) -> PathAgreement:
    """Evaluate every term on random real states with both paths.

    Each state is the transform of standard-normal grid samples (seeded
    PCG64); the error of a term is ``max|fast - oracle| / max|oracle|``.
    """
    per_term = dict.fromkeys(ALL_TERMS, 0.0)
    for seed in range(seeds):
        rng = np.random.default_rng(seed)
        values = rng.standard_normal((lattice.d + 1, *lattice.shape))
        U = lattice.from_physical(values) * lattice.norm_mask
        for term in ALL_TERMS:
            fast = forcing_array(U, lattice, params, (term,), ProductMethod.FAST, contraction, True)
            oracle = forcing_array(U, lattice, params, (term,), ProductMethod.ORACLE, contraction)
            scale = float(np.abs(oracle).max())
            if scale > 0.0:
                per_term[term] = max(per_term[term], float(np.abs(fast - oracle).max()) / scale)
    worst = max(per_term.values())
    logger.info(f"Product paths agree to {worst:.2e} over {seeds} seeds (N={lattice.N})")
    return PathAgreement(
        N=lattice.N,
        d=lattice.d,
        seeds=seeds,
        per_term=dict(per_term),
        max_relative_error=worst,
        tolerance=tolerance,
        passes=worst <= tolerance,
    )
