"""Quadrature oracles for the convolution and time-integral estimates.

``I(xi) = int dEta / (|xi - eta|^alpha |eta|^beta)`` is evaluated with
scipy's adaptive QUADPACK rules after splitting the domain into a ball
around the origin, a ball around ``xi`` and the exterior. The two balls are
integrated in polar coordinates centred on their singularity with the
algebraic endpoint weight of ``quad(weight="alg")``; the far exterior is
mapped onto ``[0, 1]`` with ``x = (cutoff / r)^(alpha + beta - d)``, which
removes the truncation error entirely. In three dimensions the polar-angle
integral is done in closed form.
"""

import logging
import math
import warnings
from collections.abc import Callable, Sequence

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator
from scipy import integrate, special

from nskq.core.errors import DivergentIntegralError, QuadratureToleranceError

logger = logging.getLogger(__name__)

# Taylor switch of the closed-form polar integral (d = 3)
SMALL_OFFSET = 1e-6
# QUADPACK rejects relative tolerances near machine precision
MIN_TOL = 1e-13


class QuadratureSpec(BaseModel):
    """Integrand exponents, evaluation point and tolerances of one Riesz integral.

    Attributes:
        d: Dimension (2 or 3)
        alpha: Exponent of ``|xi - eta|``
        beta: Exponent of ``|eta|``
        xi: Evaluation point
        cutoff: Radius where the mapped tail starts (default ``2 |xi|``)
        tol: Relative tolerance of each quadrature
        split: Ball radius around each singularity as a fraction of ``|xi|``
        limit: Subinterval limit passed to ``quad``

    """

    d: int = 2
    alpha: float
    beta: float
    xi: list[float] = Field(default_factory=lambda: [1.0, 0.0])
    cutoff: float | None = None
    tol: float = 1e-8
    split: float = 0.5
    limit: int = 200

    @field_validator("d")
    @classmethod
    def validate_dimension(cls, v: int) -> int:
        """Only planar and spatial integrals are supported."""
        if v not in (2, 3):
            raise ValueError(f"Riesz quadrature supports d=2 or d=3, got d={v}.")
        return v

    @field_validator("tol")
    @classmethod
    def validate_tol(cls, v: float) -> float:
        """Validate relative tolerance."""
        if not 1e-12 <= v < 1.0:
            raise ValueError(f"tol must lie in [1e-12, 1), got {v}.")
        return v

    @field_validator("split")
    @classmethod
    def validate_split(cls, v: float) -> float:
        """The two singular balls must stay disjoint."""
        if not 0.0 < v <= 0.5:
            raise ValueError(f"split must lie in (0, 1/2] so the balls are disjoint, got {v}.")
        return v

    @model_validator(mode="after")
    def validate_point(self) -> "QuadratureSpec":
        """Check the evaluation point."""
        if len(self.xi) != self.d:
            raise ValueError(f"xi must have {self.d} components, got {len(self.xi)}.")
        if self.xi_mag == 0.0:
            raise ValueError("xi must be nonzero: I(0) diverges.")
        if self.cutoff is not None and self.cutoff < (1.0 + self.split) * self.xi_mag:
            raise ValueError(
                f"cutoff {self.cutoff} must exceed (1 + split) |xi| = "
                f"{(1.0 + self.split) * self.xi_mag}."
            )
        return self

    @property
    def xi_mag(self) -> float:
        """``|xi|``."""
        return float(np.linalg.norm(self.xi))

    @property
    def excess(self) -> float:
        """``alpha + beta - d``, the decay exponent of the exterior."""
        return self.alpha + self.beta - self.d

    def require_convergent(self) -> None:
        """Raise unless ``alpha < d``, ``beta < d`` and ``alpha + beta > d``.

        Raises:
            DivergentIntegralError: If any hypothesis fails

        """
        problems = []
        if self.alpha >= self.d:
            problems.append(f"alpha={self.alpha} >= d={self.d} (not integrable at eta=xi)")
        if self.beta >= self.d:
            problems.append(f"beta={self.beta} >= d={self.d} (not integrable at eta=0)")
        if self.excess <= 0.0:
            problems.append(
                f"alpha + beta = {self.alpha + self.beta} <= d (not integrable at infinity)"
            )
        if problems:
            raise DivergentIntegralError("divergent integral: " + "; ".join(problems))


class RieszResult(BaseModel):
    """Value and region breakdown of a Riesz integral."""

    value: float
    ball_origin: float
    ball_point: float
    exterior: float
    error_estimate: float
    slow_convergence: bool

    def __float__(self) -> float:
        return self.value


def _sphere_integral(d: int, xi_mag: float, r: float, e: float, c_hi: float, tol: float) -> float:
    """``int |xi - r w|^-e dw`` over unit vectors with ``cos(w, xi) <= c_hi``."""
    A = xi_mag**2 + r**2
    B = 2.0 * xi_mag * r
    c_hi = min(max(c_hi, -1.0), 1.0)
    if d == 3:
        if B <= SMALL_OFFSET * A:
            return 2.0 * math.pi * A ** (-0.5 * e) * (
                (c_hi + 1.0) + 0.25 * e * (B / A) * (c_hi**2 - 1.0)
            )
        if e == 2.0:
            return 2.0 * math.pi * (math.log(A + B) - math.log(A - B * c_hi)) / B
        k = 1.0 - 0.5 * e
        return 2.0 * math.pi * ((A + B) ** k - (A - B * c_hi) ** k) / (B * k)
    phi_lo = math.acos(c_hi)
    value, _ = integrate.quad(
        lambda phi: (A - B * math.cos(phi)) ** (-0.5 * e), phi_lo, math.pi, epsabs=0.0, epsrel=tol
    )
    return 2.0 * value


def _quad(
    f: Callable[[float], float], a: float, b: float, tol: float, limit: int, **kwargs: object
) -> float:
    if b <= a:
        return 0.0
    value, _ = integrate.quad(
        f, a, b, epsabs=0.0, epsrel=tol, limit=limit, **kwargs  # type: ignore[arg-type]
    )
    return float(value)


def _regions(spec: QuadratureSpec, tol: float) -> tuple[float, float, float]:
    d, alpha, beta = spec.d, spec.alpha, spec.beta
    xi = spec.xi_mag
    rho = spec.split * xi
    inner_tol = max(tol / 10.0, MIN_TOL)

    def around_origin(r: float) -> float:
        return _sphere_integral(d, xi, r, alpha, 1.0, inner_tol)

    def around_point(r: float) -> float:
        return _sphere_integral(d, xi, r, beta, 1.0, inner_tol)

    ball_origin = _quad(
        around_origin, 0.0, rho, tol, spec.limit, weight="alg", wvar=(d - 1.0 - beta, 0.0)
    )
    ball_point = _quad(
        around_point, 0.0, rho, tol, spec.limit, weight="alg", wvar=(d - 1.0 - alpha, 0.0)
    )

    def shell(r: float) -> float:
        # exclude the ball around xi from the sphere of radius r
        c_hi = (r**2 + xi**2 - rho**2) / (2.0 * r * xi)
        return r ** (d - 1.0 - beta) * _sphere_integral(d, xi, r, alpha, c_hi, inner_tol)

    cutoff = spec.cutoff if spec.cutoff is not None else 2.0 * xi
    exterior = _quad(shell, rho, xi - rho, tol, spec.limit)
    exterior += _quad(shell, xi - rho, xi, tol, spec.limit)
    exterior += _quad(shell, xi, xi + rho, tol, spec.limit)
    exterior += _quad(shell, xi + rho, cutoff, tol, spec.limit)

    gamma = spec.excess

    def tail(x: float) -> float:
        # G(u) = r^alpha S(r) with u = |xi| / r
        u = (xi / cutoff) * x ** (1.0 / gamma)
        return _sphere_integral(d, u, 1.0, alpha, 1.0, inner_tol)

    exterior += cutoff ** (-gamma) / gamma * _quad(tail, 0.0, 1.0, tol, spec.limit)
    return ball_origin, ball_point, exterior


def riesz_convolution(spec: QuadratureSpec) -> RieszResult:
    """Evaluate ``I(xi)`` by three-region adaptive quadrature.

    The integral is computed at ``tol`` and at ``tol / 10``; their difference
    is the reported error estimate. Results whose estimate exceeds ``tol``
    or whose quadratures emitted scipy integration warnings are flagged as
    slowly converging rather than rejected.

    Args:
        spec: Exponents, point and tolerances

    Returns:
        RieszResult from the finer run

    Raises:
        DivergentIntegralError: If the exponents violate the integrability hypotheses

    Example:
        >>> spec = QuadratureSpec(d=2, alpha=1.5, beta=1.5, xi=[1.0, 0.0])
        >>> round(riesz_convolution(spec).value, 2)
        27.5

    """
    spec.require_convergent()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", integrate.IntegrationWarning)
        coarse = sum(_regions(spec, spec.tol))
        fine_regions = _regions(spec, max(spec.tol / 10.0, MIN_TOL))
    fine = sum(fine_regions)
    error = abs(fine - coarse)
    quadpack_warnings = [w for w in caught if issubclass(w.category, integrate.IntegrationWarning)]
    slow = error > spec.tol * abs(fine) or bool(quadpack_warnings)
    if slow:
        logger.warning(
            f"Riesz integral converges slowly at |xi|={spec.xi_mag:.4g} "
            f"(alpha={spec.alpha:.4g}, beta={spec.beta:.4g}): error estimate {error:.2e}, "
            f"{len(quadpack_warnings)} quadrature warnings"
        )
    return RieszResult(
        value=fine,
        ball_origin=fine_regions[0],
        ball_point=fine_regions[1],
        exterior=fine_regions[2],
        error_estimate=error,
        slow_convergence=slow,
    )


def riesz_closed_form(d: int, alpha: float, beta: float, xi_mag: float) -> float:
    """Riesz composition formula for ``I(xi)``.

    ``pi^(d/2) G((d-a)/2) G((d-b)/2) G((a+b-d)/2) / (G(a/2) G(b/2) G(d-(a+b)/2)) |xi|^(d-a-b)``

    Raises:
        DivergentIntegralError: If the integral diverges
        ValueError: If an exponent is not positive

    """
    QuadratureSpec(d=d, alpha=alpha, beta=beta, xi=[xi_mag] + [0.0] * (d - 1)).require_convergent()
    if alpha <= 0.0 or beta <= 0.0:
        raise ValueError(f"The composition formula needs positive exponents, got {alpha}, {beta}.")
    g = special.gamma
    constant = (
        math.pi ** (d / 2.0)
        * g((d - alpha) / 2.0)
        * g((d - beta) / 2.0)
        * g((alpha + beta - d) / 2.0)
        / (g(alpha / 2.0) * g(beta / 2.0) * g(d - (alpha + beta) / 2.0))
    )
    return float(constant * xi_mag ** (d - alpha - beta))


class SplitCheck(BaseModel):
    """Region split at two ratios: the totals must agree."""

    half: RieszResult
    third: RieszResult
    relative_difference: float
    passes: bool


def split_independence(spec: QuadratureSpec) -> SplitCheck:
    """Compare the three-region total at split ratios 1/2 and 1/3."""
    half = riesz_convolution(spec.model_copy(update={"split": 0.5}))
    third = riesz_convolution(spec.model_copy(update={"split": 1.0 / 3.0}))
    diff = abs(half.value - third.value) / abs(half.value)
    return SplitCheck(
        half=half,
        third=third,
        relative_difference=diff,
        passes=diff <= 10.0 * spec.tol,
    )


class ConstancyRow(BaseModel):
    """Scaled convolution value at one ``|xi|``."""

    xi_mag: float
    value: float
    scaled: float
    error_estimate: float
    slow_convergence: bool


class ConstancyReport(BaseModel):
    """``I(xi) |xi|^(alpha + beta - d)`` over sample magnitudes."""

    d: int
    alpha: float
    beta: float
    rows: list[ConstancyRow]
    constant: float
    closed_form: float | None
    max_deviation: float
    monotone: bool
    tolerance: float
    passes: bool


def convolution_exponents(d: int, p: float) -> tuple[float, float]:
    """Exponent pair ``(d - 1 + 2/p, d - 2 + 2/p)`` of the velocity-gradient products."""
    return d - 1.0 + 2.0 / p, d - 2.0 + 2.0 / p


def verify_convolution_constancy(
    d: int,
    p: float,
    xi_samples: Sequence[float] = (0.5, 1.0, 2.0, 4.0, 8.0),
    alpha: float | None = None,
    beta: float | None = None,
    tol: float = 1e-8,
    tolerance: float = 0.02,
) -> ConstancyReport:
    """Check that ``I(xi) |xi|^(alpha + beta - d)`` does not depend on ``|xi|``.

    Args:
        d: Dimension
        p: Kato exponent; sets the default exponents
            ``alpha = d - 1 + 2/p`` and ``beta = d - 2 + 2/p``
        xi_samples: Magnitudes ``|xi|``, evaluated along the first axis
        alpha: Override for ``alpha``
        beta: Override for ``beta``
        tol: Quadrature tolerance
        tolerance: Allowed relative spread of the scaled values

    Returns:
        ConstancyReport with the scaled values, their spread and monotonicity

    Raises:
        DivergentIntegralError: If ``d - 3 + 4/p <= 0`` or the overrides diverge

    """
    default_alpha, default_beta = convolution_exponents(d, p)
    alpha = default_alpha if alpha is None else alpha
    beta = default_beta if beta is None else beta
    rows = []
    for xi_mag in xi_samples:
        spec = QuadratureSpec(d=d, alpha=alpha, beta=beta, xi=[xi_mag] + [0.0] * (d - 1), tol=tol)
        result = riesz_convolution(spec)
        scaled = result.value * xi_mag ** spec.excess
        rows.append(
            ConstancyRow(
                xi_mag=xi_mag,
                value=result.value,
                scaled=scaled,
                error_estimate=result.error_estimate,
                slow_convergence=result.slow_convergence,
            )
        )
        logger.debug(f"|xi|={xi_mag}: I={result.value:.10g}, scaled={scaled:.10g}")
    scaled_values = np.array([row.scaled for row in rows])
    constant = float(np.mean(scaled_values))
    deviation = float(np.max(np.abs(scaled_values / constant - 1.0)))
    ordered = sorted(rows, key=lambda row: row.xi_mag)
    monotone = all(b.value < a.value for a, b in zip(ordered[:-1], ordered[1:], strict=True))
    closed_form = None
    if alpha > 0.0 and beta > 0.0:
        closed_form = riesz_closed_form(d, alpha, beta, 1.0)
    logger.info(
        f"Convolution constancy d={d}, alpha={alpha:.4g}, beta={beta:.4g}: constant "
        f"{constant:.6g}, max deviation {deviation:.2e}"
    )
    return ConstancyReport(
        d=d,
        alpha=alpha,
        beta=beta,
        rows=rows,
        constant=constant,
        closed_form=closed_form,
        max_deviation=deviation,
        monotone=monotone,
        tolerance=tolerance,
        passes=deviation <= tolerance and monotone,
    )


# ---------------------------------------------------------------------------
# beta integral


def beta_constant(p: float) -> float:
    """``B(1 - 2/p, 1/p) = G(1/p) G(1 - 2/p) / G(1 - 1/p)``."""
    if p <= 2.0:
        raise ValueError(f"beta_constant needs p > 2, got {p}.")
    return float(special.gamma(1.0 / p) * special.gamma(1.0 - 2.0 / p) / special.gamma(1.0 - 1.0 / p))


def normalized_beta_integral(p: float, tol: float = 1e-12) -> float:
    """``int_0^1 (1 - s)^-(1 - 1/p) s^(-2/p) ds`` by QUADPACK's algebraic-weight rule."""
    if p <= 2.0:
        raise ValueError(f"The beta integral needs p > 2, got {p}.")
    value, _ = integrate.quad(
        lambda s: 1.0, 0.0, 1.0, weight="alg", wvar=(-2.0 / p, -(1.0 - 1.0 / p)), epsabs=0.0, epsrel=tol
    )
    return float(value)


class BetaIntegral(BaseModel):
    """Time integral of the heat factor against ``s^(-2/p)`` and its bound."""

    p: float
    t: float
    delta_coef: float
    xi_mag: float
    value: float
    bound: float
    holds: bool


def beta_time_integral(
    p: float, t: float, delta_coef: float, xi_mag: float, tol: float = 1e-10
) -> BetaIntegral:
    """``int_0^t exp(-delta (t - s) |xi|^2) s^(-2/p) ds`` and its beta-function bound.

    The bound is ``t^(-1/p) delta^-(1 - 1/p) |xi|^-(2 - 2/p) B(1 - 2/p, 1/p)``;
    it is infinite when ``delta |xi|^2 = 0``, where the integral equals
    ``t^(1 - 2/p) p / (p - 2)`` exactly.

    Raises:
        ValueError: If ``p <= 2``, ``t < 0`` or ``delta_coef < 0``
        QuadratureToleranceError: If QUADPACK reports failure

    """
    if p <= 2.0:
        raise ValueError(f"beta_time_integral needs p > 2, got {p}.")
    if t < 0.0 or delta_coef < 0.0:
        raise ValueError(f"t and delta_coef must be nonnegative, got t={t}, delta={delta_coef}.")
    rate = delta_coef * xi_mag**2
    if t == 0.0:
        value = 0.0
    elif rate == 0.0:
        value = t ** (1.0 - 2.0 / p) * p / (p - 2.0)
    else:
        with warnings.catch_warnings():
            warnings.simplefilter("error", integrate.IntegrationWarning)
            try:
                raw, _ = integrate.quad(
                    lambda s: math.exp(-rate * (t - s)),
                    0.0,
                    t,
                    weight="alg",
                    wvar=(-2.0 / p, 0.0),
                    epsabs=0.0,
                    epsrel=tol,
                    limit=200,
                )
            except integrate.IntegrationWarning as e:
                raise QuadratureToleranceError(
                    f"Beta time integral failed for p={p}, t={t}, rate={rate}: {e}"
                ) from e
        value = float(raw)
    if rate == 0.0:
        bound = math.inf
    else:
        bound = (
            t ** (-1.0 / p)
            * delta_coef ** (-(1.0 - 1.0 / p))
            * xi_mag ** (-(2.0 - 2.0 / p))
            * beta_constant(p)
        )
    return BetaIntegral(
        p=p,
        t=t,
        delta_coef=delta_coef,
        xi_mag=xi_mag,
        value=value,
        bound=bound,
        holds=value <= bound * (1.0 + tol),
    )


class BetaReport(BaseModel):
    """Beta-constant identity and sampled time-integral bounds."""

    p: float
    constant: float
    quadrature: float
    relative_error: float
    samples: list[BetaIntegral]
    passes: bool


def verify_beta(p: float = 3.0, samples: int = 20, seed: int = 0) -> BetaReport:
    """Check the Gamma identity to 1e-6 and the time-integral bound on random samples."""
    constant = beta_constant(p)
    quadrature = normalized_beta_integral(p)
    rel = abs(quadrature - constant) / constant
    rng = np.random.default_rng(seed)
    rows = [
        beta_time_integral(
            p,
            float(10.0 ** rng.uniform(-3.0, 1.0)),
            float(10.0 ** rng.uniform(-2.0, 1.0)),
            float(10.0 ** rng.uniform(-1.0, 2.0)),
        )
        for _ in range(samples)
    ]
    passes = rel <= 1e-6 and all(row.holds for row in rows)
    logger.info(f"Beta constant p={p}: {constant:.10g} vs quadrature {quadrature:.10g}")
    return BetaReport(
        p=p,
        constant=constant,
        quadrature=quadrature,
        relative_error=rel,
        samples=rows,
        passes=passes,
    )
