"""Experiment orchestration: checks, runs and artifacts.

A run is fully described by a :class:`RunConfig`. ``run`` dispatches on the
mode, evaluates the enabled checks, writes the artifacts into the output
directory and returns a :class:`RunReport`. A check that raises is recorded
as a failed verdict carrying the error message; it never aborts the run.
"""

import logging
import math
import time
from collections.abc import Callable
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel, Field

from nskq.core.analyticity import (
    BootstrapReport,
    RadiusEstimate,
    check_bootstrap,
    check_theta_properties,
    check_weight_inequality,
    estimate_state_radius,
    radius_growth_check,
    radius_series,
)
from nskq.core.config import InitialDataSpec, RunConfig
from nskq.core.duhamel import (
    ConstantsLedger,
    DuhamelOperator,
    PicardResult,
    bilinear_resolution_check,
    local_existence_scaling,
    measure_bilinear_constants,
    picard_solve,
    solver_grid,
)
from nskq.core.fields import FlowState
from nskq.core.initial_data import generate_initial_data
from nskq.core.lattice import FrequencyLattice
from nskq.core.nonlinear import compare_product_paths
from nskq.core.norms import NormReport, norm_report, x_norm
from nskq.core.oracles import (
    QuadratureSpec,
    riesz_closed_form,
    riesz_convolution,
    split_independence,
    verify_beta,
    verify_convolution_constancy,
)
from nskq.core.reference import RK4_STABILITY_LIMIT, reference_integrate, stiffness_bound
from nskq.core.snapshot import save_snapshot
from nskq.core.symbol import check_semigroup, decay_constant, duhamel_bound_check
from nskq.core.trajectory import Trajectory
from nskq.utils.reporting import (
    NORMS_COLUMNS,
    write_bootstrap_csv,
    write_bootstrap_radius_csv,
    write_norms_csv,
    write_radius_csv,
)

logger = logging.getLogger(__name__)

NONLINEAR_SEEDS = 100
WEIGHT_SAMPLES = 100_000
REFERENCE_TIME = 0.1
REFERENCE_TOL = 1e-4
SMALL_DATA_FRACTION = 0.01
SMALL_DATA_N = 32
RESOLUTION_N = 64
RESOLUTION_TOL = 0.1
RADIUS_SAMPLES = 10


class CheckVerdict(BaseModel):
    """Outcome of one check."""

    name: str
    passed: bool
    details: dict[str, Any] = Field(default_factory=dict)
    error: str | None = None
    seconds: float = 0.0


class RunReport(BaseModel):
    """Everything a run produced, serialised to ``run.json``."""

    config: dict[str, Any]
    mode: str
    passed: bool
    checks: list[CheckVerdict]
    ledger: ConstantsLedger | None = None
    picard: dict[str, Any] | None = None
    norms: list[dict[str, float | None]] = Field(default_factory=list)
    radius: list[RadiusEstimate] = Field(default_factory=list)
    bootstrap: BootstrapReport | None = None
    timings: dict[str, float] = Field(default_factory=dict)
    artifacts: list[str] = Field(default_factory=list)


class CheckOutcome(BaseModel):
    """Return value of a check function."""

    passed: bool
    details: dict[str, Any] = Field(default_factory=dict)


CheckFunction = Callable[[RunConfig], CheckOutcome]


def _lattice(config: RunConfig, N: int | None = None) -> FrequencyLattice:
    spec = config.lattice
    return FrequencyLattice(d=spec.d, N=N or spec.N, L=spec.L)


def _sub_trajectory(traj: Trajectory, indices: list[int]) -> Trajectory:
    return Trajectory(
        traj.lattice, traj.times[indices], traj.data[indices], traj.real, traj.initial
    )


# ---------------------------------------------------------------------------
# checks


def check_decay(config: RunConfig) -> CheckOutcome:
    """Weighted semigroup decay: measured c0 within 5% of the lattice prediction.

    The inhomogeneous estimate is spot-checked with the measured constants at
    random frequencies and constant forcings.
    """
    params = config.model
    lattice = _lattice(config)
    k_min = lattice.spacing
    t_grid = np.concatenate([[0.0], np.geomspace(1e-6, 100.0 / k_min**2, 400)])
    report = decay_constant(params, lattice, t_grid)
    rel = abs(report.c0_measured - report.c0_spectral) / report.c0_spectral
    k_span = math.log10(min(lattice.max_inscribed, 10.0 * k_min) / k_min)
    rng = np.random.default_rng(config.seed)
    inhomogeneous = []
    for _ in range(config.samples):
        xi = rng.standard_normal(lattice.d)
        xi *= k_min * 10.0 ** rng.uniform(0.0, k_span) / np.linalg.norm(xi)
        t = float(rng.uniform(0.0, 100.0) / float(xi @ xi))
        forcing = rng.standard_normal(lattice.d + 1) + 1j * rng.standard_normal(lattice.d + 1)
        inhomogeneous.append(
            duhamel_bound_check(
                t, xi, forcing, params, 1.01 * report.C_measured, c0=report.c0_measured
            )
        )
    passes = (
        rel <= 0.05
        and math.isfinite(report.C_measured)
        and all(row.holds for row in inhomogeneous)
    )
    return CheckOutcome(
        passed=passes,
        details={
            "decay": report.model_dump(),
            "relative_c0_gap": rel,
            "worst_inhomogeneous_ratio": max((r.ratio for r in inhomogeneous), default=0.0),
        },
    )


def check_semigroup_property(config: RunConfig) -> CheckOutcome:
    """Semigroup composition to 1e-12 and dense agreement to 1e-10."""
    report = check_semigroup(config.model, config.lattice.d, 1000, config.seed)
    return CheckOutcome(passed=report.passes, details=report.model_dump())


def check_convolution(config: RunConfig) -> CheckOutcome:
    """Convolution constancy, closed-form spot value and split independence."""
    d = config.lattice.d if config.lattice.d in (2, 3) else 2
    constancy = verify_convolution_constancy(d, config.solver.p)
    spot_spec = QuadratureSpec(d=2, alpha=1.5, beta=1.5, xi=[1.0, 0.0])
    spot = riesz_convolution(spot_spec)
    reference = riesz_closed_form(2, 1.5, 1.5, 1.0)
    spot_error = abs(spot.value - reference) / reference
    split = split_independence(spot_spec)
    return CheckOutcome(
        passed=constancy.passes and spot_error <= 0.01 and split.passes,
        details={
            "constancy": constancy.model_dump(),
            "spot_value": spot.value,
            "spot_reference": reference,
            "spot_relative_error": spot_error,
            "split": split.model_dump(),
        },
    )


def check_beta(config: RunConfig) -> CheckOutcome:
    """Gamma identity of the normalized beta integral and the time-integral bound."""
    report = verify_beta(config.solver.p, config.samples, config.seed)
    return CheckOutcome(passed=report.passes, details=report.model_dump())


def check_nonlinear(config: RunConfig) -> CheckOutcome:
    """Fast and oracle product paths agree on N=16 for every term."""
    report = compare_product_paths(
        _lattice(config, N=16),
        config.model,
        NONLINEAR_SEEDS,
        config.solver.du_contraction,
    )
    return CheckOutcome(passed=report.passes, details=report.model_dump())


def check_small_data(config: RunConfig) -> CheckOutcome:
    """Picard contraction for data whose linear part has X norm ``0.01 R`` on N=32.

    ``K_Phi`` is also measured on N=64 and must agree within 10%.
    """
    params = config.model
    solver = config.solver
    lattice = _lattice(config, N=SMALL_DATA_N)
    constants = measure_bilinear_constants(params, solver, lattice, config.samples, config.seed)
    resolution = bilinear_resolution_check(
        params,
        solver,
        lattice,
        RESOLUTION_N,
        config.samples,
        config.seed,
        RESOLUTION_TOL,
        coarse=constants,
    )
    R = 1.0 / (32.0 * constants.K_Phi)
    base = generate_initial_data(config.initial_data, lattice, seed=config.seed)
    grid = solver_grid(solver)
    op = DuhamelOperator(lattice, grid, params)
    base_linear = x_norm(Trajectory(lattice, grid, op.linear(base.as_array()), True, base), solver)
    if base_linear == 0.0:
        raise ValueError("small-data check needs nonzero initial data.")
    data = base.scale(SMALL_DATA_FRACTION * R / base_linear)
    result = picard_solve(data, params, solver, bilinear_constant=constants.K_Phi, operator=op)
    ledger = result.ledger
    bound = 2.0 * (ledger.C_tilde or 0.0) * ledger.data_norm
    passes = (
        result.converged
        and ledger.contraction < 1.0
        and ledger.solution_norm <= bound
        and resolution.stable
    )
    return CheckOutcome(
        passed=passes,
        details={
            "bilinear": constants.model_dump(),
            "resolution": resolution.model_dump(),
            "ledger": ledger.model_dump(),
            "status": result.status.value,
            "iterations": result.iterations,
            "solution_bound": bound,
        },
    )


def check_solver_reference(config: RunConfig) -> CheckOutcome:
    """Picard solution against the RK4 reference at ``t = 0.1`` on N=16."""
    params = config.model
    lattice = _lattice(config, N=16)
    spec = InitialDataSpec(kind="exponential_tail", sigma0=0.5, amplitude=0.1)
    data = generate_initial_data(spec, lattice, seed=config.seed)
    solver = config.solver.model_copy(update={"T": REFERENCE_TIME, "picard_tol": 1e-12})
    result = picard_solve(data, params, solver)
    rho = stiffness_bound(lattice, params)
    steps = int(math.ceil(1.25 * REFERENCE_TIME * rho / RK4_STABILITY_LIMIT)) + 1
    reference = reference_integrate(data, params, REFERENCE_TIME, steps, cfg=solver)
    ours = result.trajectory.data[-1]
    theirs = reference.data[-1]
    error = float(np.abs(ours - theirs).max() / np.abs(theirs).max())
    return CheckOutcome(
        passed=result.converged and error <= REFERENCE_TOL,
        details={"relative_error": error, "iterations": result.iterations, "rk4_steps": steps},
    )


def check_radius_growth(config: RunConfig) -> CheckOutcome:
    """Radius of small exponential-tail data grows at least like ``sigma0 + 0.8 c0 sqrt(t)``."""
    params = config.model
    lattice = _lattice(config)
    spec = config.initial_data
    if spec.kind != "exponential_tail":
        spec = InitialDataSpec(kind="exponential_tail", sigma0=0.5, amplitude=0.01)
    data = generate_initial_data(spec, lattice, seed=config.seed)
    T = config.solver.T
    samples = np.linspace(T / RADIUS_SAMPLES, T, RADIUS_SAMPLES)
    grid = solver_grid(config.solver, extra_nodes=samples)
    result = picard_solve(data, params, config.solver, times=grid)
    picked = [result.trajectory.index_at(float(t)) for t in samples]
    k_min = lattice.spacing
    t_grid = np.concatenate([[0.0], np.geomspace(1e-6, 100.0 / k_min**2, 400)])
    c0 = decay_constant(params, lattice, t_grid).c0_measured
    growth = radius_growth_check(_sub_trajectory(result.trajectory, picked), spec.sigma0, c0)
    return CheckOutcome(
        passed=result.converged and growth.passes,
        details={"growth": growth.model_dump(), "status": result.status.value, "c0_measured": c0},
    )


def check_local_existence(config: RunConfig) -> CheckOutcome:
    """Largest converging horizon scales like ``A^(-2/delta)``."""
    lattice = _lattice(config)
    shape = config.initial_data
    if shape.kind != "power_law":
        shape = InitialDataSpec(
            kind="power_law",
            exponent=lattice.d - 1.0 + config.solver.shift,
            random_phase=True,
            dealias=True,
        )
    report = local_existence_scaling(shape, lattice, config.model, config.solver, seed=config.seed)
    return CheckOutcome(passed=report.passes, details=report.model_dump())


def check_inequalities(config: RunConfig) -> CheckOutcome:
    """Weight-gap inequality and the three theta properties on random samples."""
    reports = [check_weight_inequality(WEIGHT_SAMPLES, config.seed)]
    reports += check_theta_properties(WEIGHT_SAMPLES, config.seed, config.model.decay)
    return CheckOutcome(
        passed=all(r.passes for r in reports),
        details={r.name: r.model_dump() for r in reports},
    )


CHECKS: dict[str, CheckFunction] = {
    "lemma-decay": check_decay,
    "semigroup": check_semigroup_property,
    "lemma-conv": check_convolution,
    "beta": check_beta,
    "nonlinear": check_nonlinear,
    "small-data": check_small_data,
    "solver-reference": check_solver_reference,
    "radius-growth": check_radius_growth,
    "local-existence": check_local_existence,
    "inequalities": check_inequalities,
}


def run_check(name: str, config: RunConfig) -> CheckVerdict:
    """Run one registered check and turn any exception into a failed verdict.

    Raises:
        ValueError: If the check name is not registered

    """
    if name not in CHECKS:
        raise ValueError(f"Unknown check: {name}. Available checks: {', '.join(sorted(CHECKS))}")
    start = time.perf_counter()
    try:
        outcome = CHECKS[name](config)
    except Exception as e:
        seconds = time.perf_counter() - start
        logger.error(f"Check {name} raised {type(e).__name__}: {e}")
        return CheckVerdict(name=name, passed=False, error=f"{type(e).__name__}: {e}", seconds=seconds)
    seconds = time.perf_counter() - start
    logger.info(f"Check {name}: {'pass' if outcome.passed else 'FAIL'} ({seconds:.2f}s)")
    return CheckVerdict(name=name, passed=outcome.passed, details=outcome.details, seconds=seconds)


# ---------------------------------------------------------------------------
# modes


def _picard_summary(result: PicardResult) -> dict[str, Any]:
    return {
        "status": result.status.value,
        "mode": result.mode,
        "iterations": result.iterations,
        "residuals": result.residuals,
        "iterate_norms": result.iterate_norms,
        "y_norm": result.y_norm,
        "radius_checks": result.radius_checks,
    }


def _norm_rows(report: NormReport) -> list[dict[str, float | None]]:
    return [
        {c: (None if math.isnan(v) else v) for c, v in zip(NORMS_COLUMNS, row, strict=True)}
        for row in report.rows()
    ]


def _solve(config: RunConfig, data: FlowState, extra_nodes: list[float] | None = None) -> PicardResult:
    grid = solver_grid(config.solver, extra_nodes or ())
    mode = "analytic" if config.analytic else "plain"
    return picard_solve(data, config.model, config.solver, mode=mode, times=grid)


class _Writer:
    """Collects artifact paths and wraps I/O failures with context."""

    def __init__(self, out: Path) -> None:
        self.out = out
        self.paths: list[str] = []

    def __call__(self, name: str, write: Callable[[Path], Path]) -> None:
        path = self.out / name
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            write(path)
        except OSError as e:
            raise RuntimeError(f"Failed to write {path}: {e}") from e
        self.paths.append(name)
        logger.info(f"Wrote {path}")


def run(config: RunConfig) -> RunReport:
    """Execute a run and write its artifacts.

    Modes:
        - simulate: Picard solve; ``norms.csv``, ``radius.csv`` and snapshots
        - radius: Picard solve and the radius-growth verdict; ``radius.csv``
        - bootstrap: Picard solve on the dyadic horizons and the bootstrap
          verdict; ``bootstrap.csv`` and ``radius.csv``
        - verify: the configured check only

    Args:
        config: Validated run configuration

    Returns:
        RunReport (also written to ``run.json``)

    Raises:
        RuntimeError: If an artifact cannot be written

    """
    out = Path(config.output_dir)
    write = _Writer(out)
    timings: dict[str, float] = {}
    checks: list[CheckVerdict] = []
    report_fields: dict[str, Any] = {}
    logger.info(f"Run mode={config.mode} seed={config.seed} output={out}")
    start = time.perf_counter()

    if config.mode == "verify":
        assert config.check is not None
        checks.append(run_check(config.check, config))
        timings[config.check] = checks[-1].seconds
    else:
        lattice = config.lattice.build()
        t0 = time.perf_counter()
        data = generate_initial_data(config.initial_data, lattice, seed=config.seed)
        T = config.solver.T
        samples = [float(t) for t in np.linspace(T / RADIUS_SAMPLES, T, RADIUS_SAMPLES)]
        extra = {"bootstrap": config.bootstrap.horizons, "radius": samples}.get(config.mode, [])
        result = _solve(config, data, extra)
        traj = result.trajectory
        timings["solve"] = time.perf_counter() - t0
        report_fields["ledger"] = result.ledger
        report_fields["picard"] = _picard_summary(result)
        checks.append(
            CheckVerdict(
                name="picard",
                passed=result.converged,
                details={"status": result.status.value, "iterations": result.iterations},
                seconds=timings["solve"],
            )
        )
        c0 = config.model.decay

        t0 = time.perf_counter()
        if config.mode == "simulate":
            norms = norm_report(traj, config.solver, c0)
            report_fields["norms"] = _norm_rows(norms)
            estimates = radius_series(traj)
            report_fields["radius"] = estimates
            write("norms.csv", lambda p: write_norms_csv(p, norms))
            write("radius.csv", lambda p: write_radius_csv(p, estimates))
            write("snapshots/initial.nskq", lambda p: save_snapshot(data, p))
            write("snapshots/final.nskq", lambda p: save_snapshot(traj.state(len(traj) - 1), p))
        elif config.mode == "radius":
            estimates = radius_series(traj)
            report_fields["radius"] = estimates
            initial = estimate_state_radius(data)
            sigma0 = initial.sigma_hat if initial.defined else 0.0
            picked = [traj.index_at(float(t)) for t in samples]
            growth = radius_growth_check(_sub_trajectory(traj, picked), sigma0, c0)
            checks.append(
                CheckVerdict(name="radius-growth", passed=growth.passes, details=growth.model_dump())
            )
            write("radius.csv", lambda p: write_radius_csv(p, estimates))
        else:
            boot = check_bootstrap(traj, data, config.bootstrap, config.solver, config.model)
            report_fields["bootstrap"] = boot
            checks.append(
                CheckVerdict(
                    name="bootstrap-ratio",
                    passed=boot.passes,
                    details={"min_ratio": boot.min_ratio, "target": boot.target},
                )
            )
            write("bootstrap.csv", lambda p: write_bootstrap_csv(p, boot))
            write("radius.csv", lambda p: write_bootstrap_radius_csv(p, boot))
        timings["analysis"] = time.perf_counter() - t0

    timings["total"] = time.perf_counter() - start
    passed = all(check.passed for check in checks)
    report = RunReport(
        config=config.model_dump(mode="json", by_alias=True),
        mode=config.mode,
        passed=passed,
        checks=checks,
        timings=timings,
        artifacts=write.paths + ["run.json"],
        **report_fields,
    )
    write("run.json", lambda p: _write_text(p, report.model_dump_json(indent=2)))
    logger.info(f"Run finished: {'pass' if passed else 'FAIL'} in {timings['total']:.2f}s")
    return report


def _write_text(path: Path, text: str) -> Path:
    path.write_text(text + "\n", encoding="utf-8")
    return path
