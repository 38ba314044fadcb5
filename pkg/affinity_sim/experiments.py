"""
Experiment Harness
Replications, one-parameter sweeps, sensitivity analysis and the
extreme-scenario battery. Every table is reproducible from the base
Params seed: replication r of cell c always runs with derive_seed(seed, c, r).
"""

import logging
import math
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import pandas as pd
from joblib import Parallel, delayed
from pydantic import ValidationError

from .config import get_settings
from .dynamics import StepEvents, initialize, step
from .metrics import collect_metrics
from .models import (
    INTEGER_FIELDS,
    MODEL_FIELDS,
    SUMMARY_OUTPUTS,
    BatteryReport,
    OutputAggregate,
    Params,
    ReplicationResult,
    RunSummary,
    ScenarioCheck,
    ScenarioOutcome,
    SensitivityCell,
    SweepResult,
    SweepRow,
    violations_from_error,
    with_overrides,
)
from .network import Network
from .rng import derive_seed, make_streams

logger = logging.getLogger(__name__)

Observer = Callable[[Network, StepEvents], None]

SWEEPABLE_FIELDS: Tuple[str, ...] = MODEL_FIELDS
SWEEP_OUTPUTS: Tuple[str, ...] = ("clustering", "std_affinity", "density")

SENSITIVITY_FIELDS: Tuple[str, ...] = ("max_network", "distortion", "max_change", "aff_radius", "people_dead")
SENSITIVITY_OUTPUTS: Tuple[str, ...] = ("clustering", "std_affinity")
DEFAULT_DELTAS: Tuple[float, ...] = (-0.10, -0.05, 0.05, 0.10)

# Published default-run outputs, logged next to the computed baseline
REFERENCE_BASELINE: Dict[str, float] = {"clustering": 0.4928, "std_affinity": 0.3151}

# Standard deviation of U[0, 1]
UNIFORM_STD = math.sqrt(1 / 12)


class SweepError(ValueError):
    """Sweep request rejected before any simulation ran"""


class SensitivityUndefinedError(ArithmeticError):
    """Sensitivity coefficient has a zero denominator"""


# ============== SINGLE RUNS ==============

def simulate(params: Params, observer: Optional[Observer] = None) -> Tuple[Network, RunSummary]:
    """Run one seeded simulation; returns the final network and its summary"""
    streams = make_streams(params.seed)
    net = initialize(params, streams)
    initial_row = collect_metrics(net, params.max_network)

    rows = []
    deaths = []
    for _ in range(params.steps):
        net, events = step(net, params, streams)
        rows.append(collect_metrics(net, params.max_network))
        deaths.append(len(events.deaths))
        if observer is not None:
            observer(net, events)
        if net.step_index % 100 == 0:
            logger.debug(f"seed {params.seed}: step {net.step_index}/{params.steps}, {net.link_count()} links")

    summary = RunSummary(
        params=params,
        seed=params.seed,
        initial_row=initial_row,
        final_row=rows[-1] if rows else initial_row,
        time_series=rows,
        deaths_per_step=deaths,
    )
    return net, summary


def run_simulation(params: Params, observer: Optional[Observer] = None) -> RunSummary:
    return simulate(params, observer)[1]


def _run_all(jobs: Sequence[Params], n_jobs: Optional[int] = None) -> List[RunSummary]:
    """Run independent simulations, results in job order"""
    if not jobs:
        return []
    n_jobs = n_jobs if n_jobs is not None else get_settings().n_jobs
    logger.info(f"Running {len(jobs)} simulation(s) with n_jobs={n_jobs}")
    if n_jobs == 1:
        return [run_simulation(params) for params in jobs]
    return Parallel(n_jobs=n_jobs)(delayed(run_simulation)(params) for params in jobs)


def aggregate_final(runs: Sequence[RunSummary], outputs: Sequence[str] = SUMMARY_OUTPUTS) -> Dict[str, OutputAggregate]:
    """Mean and sample std (0 for a single run) of final-row outputs"""
    frame = pd.DataFrame([run.final_row.model_dump() for run in runs], columns=list(outputs))
    means = frame.mean()
    stds = frame.std(ddof=1) if len(frame) > 1 else pd.Series(0.0, index=frame.columns)
    return {name: OutputAggregate(mean=float(means[name]), std=float(stds[name])) for name in outputs}


def run_replications(
    params: Params,
    seeds: Sequence[int],
    steps: Optional[int] = None,
    n_jobs: Optional[int] = None,
) -> ReplicationResult:
    """One full simulation per seed plus aggregates of the final rows"""
    if not seeds:
        raise ValueError("run_replications needs at least one seed")
    horizon = params.steps if steps is None else steps
    jobs = [with_overrides(params, seed=seed, steps=horizon) for seed in seeds]
    runs = _run_all(jobs, n_jobs)
    return ReplicationResult(runs=runs, aggregates=aggregate_final(runs))


# ============== SWEEPS ==============

def sweep_values(start: float, stop: float, step_size: float) -> List[float]:
    """Inclusive arithmetic grid from start to stop, cleaned of float drift"""
    if step_size <= 0:
        raise SweepError(f"step must be positive, got {step_size}")
    if stop < start:
        raise SweepError(f"stop ({stop}) is below start ({start})")
    count = int(math.floor((stop - start) / step_size + 1e-9)) + 1
    return [round(start + i * step_size, 10) for i in range(count)]


def _field_name(param_name: str) -> str:
    return param_name.replace("-", "_")


def _coerce(field: str, value: float):
    if field in INTEGER_FIELDS:
        if float(value) != int(value):
            raise SweepError(f"{field.replace('_', '-')} needs integer values, got {value}")
        return int(value)
    return float(value)


def sweep(
    base: Params,
    param_name: str,
    values: Sequence[float],
    reps: int,
    n_jobs: Optional[int] = None,
) -> SweepResult:
    """Replicate the base parameters with one field set to each value in turn"""
    field = _field_name(param_name)
    if field not in SWEEPABLE_FIELDS:
        raise SweepError(f"'{param_name}' is not a sweepable model parameter")
    if reps < 1:
        raise SweepError(f"reps must be >= 1, got {reps}")

    # Validate every cell before running anything
    cells: List[Params] = []
    for value in values:
        coerced = _coerce(field, value)
        try:
            cells.append(with_overrides(base, **{field: coerced}))
        except ValidationError as e:
            reasons = "; ".join(str(v) for v in violations_from_error(e))
            raise SweepError(f"{param_name}={value} is not legal: {reasons}") from e

    jobs = [
        with_overrides(cell, seed=derive_seed(base.seed, c, r))
        for c, cell in enumerate(cells)
        for r in range(reps)
    ]
    runs = _run_all(jobs, n_jobs)

    rows = []
    for c, cell in enumerate(cells):
        aggregates = aggregate_final(runs[c * reps:(c + 1) * reps], SWEEP_OUTPUTS)
        rows.append(SweepRow(
            value=float(getattr(cell, field)),
            replications=reps,
            clustering_mean=aggregates["clustering"].mean,
            clustering_std=aggregates["clustering"].std,
            std_affinity_mean=aggregates["std_affinity"].mean,
            std_affinity_std=aggregates["std_affinity"].std,
            density_mean=aggregates["density"].mean,
            density_std=aggregates["density"].std,
        ))
        logger.info(f"Sweep {param_name}={rows[-1].value}: clustering {rows[-1].clustering_mean:.4f}")

    return SweepResult(param_name=field, values=[row.value for row in rows], replications=reps, rows=rows)


# ============== SENSITIVITY ==============

def sensitivity_coefficient(base_out: float, new_out: float, base_param: float, new_param: float) -> float:
    """Relative output change divided by relative parameter change"""
    if base_out == 0:
        raise SensitivityUndefinedError("baseline output is zero")
    if base_param == 0:
        raise SensitivityUndefinedError("baseline parameter is zero")
    if new_param == base_param:
        raise SensitivityUndefinedError("parameter did not change")
    return ((new_out - base_out) / base_out) / ((new_param - base_param) / base_param)


def perturb(value: float, delta: float, integral: bool = False) -> float:
    """
    Apply a relative change; integer values round to nearest, and an exact
    half resolves away from the baseline so -10% of 5 is 4 and +10% is 6
    """
    raw = value * (1 + delta)
    if not integral:
        return raw
    lower = math.floor(raw)
    if abs(raw - lower - 0.5) < 1e-9:
        return lower if raw < value else lower + 1
    return math.floor(raw + 0.5)


def sensitivity_suite(
    base: Params,
    deltas: Sequence[float] = DEFAULT_DELTAS,
    reps: Optional[int] = None,
    baseline_reps: Optional[int] = None,
    fields: Sequence[str] = SENSITIVITY_FIELDS,
    n_jobs: Optional[int] = None,
) -> List[SensitivityCell]:
    """Sensitivity coefficient per (param, delta, output) against a replicated baseline"""
    settings = get_settings()
    reps = settings.replications if reps is None else reps
    baseline_reps = settings.baseline_replications if baseline_reps is None else baseline_reps
    deltas = [d for d in deltas if d != 0]
    if not deltas:
        return []

    # Cell 0 is the baseline; perturbed cells are numbered from 1
    jobs = [with_overrides(base, seed=derive_seed(base.seed, 0, r)) for r in range(baseline_reps)]
    plan = []
    cell_index = 0
    for field in fields:
        field = _field_name(field)
        base_value = getattr(base, field)
        for delta in deltas:
            cell_index += 1
            new_value = perturb(base_value, delta, integral=field in INTEGER_FIELDS)
            entry = {"field": field, "delta": delta, "base_value": base_value, "new_value": new_value}
            if new_value == base_value:
                plan.append({**entry, "status": "no-op", "note": "rounds to the baseline value"})
                continue
            try:
                cell = with_overrides(base, **{field: new_value})
            except ValidationError as e:
                note = "; ".join(str(v) for v in violations_from_error(e))
                plan.append({**entry, "status": "invalid", "note": note})
                continue
            start = len(jobs)
            jobs.extend(with_overrides(cell, seed=derive_seed(base.seed, cell_index, r)) for r in range(reps))
            plan.append({**entry, "status": "ok", "note": "", "runs": (start, len(jobs))})

    runs = _run_all(jobs, n_jobs)
    baseline = aggregate_final(runs[:baseline_reps], SENSITIVITY_OUTPUTS)
    for output, reference in REFERENCE_BASELINE.items():
        logger.info(f"Baseline {output}: {baseline[output].mean:.4f} (published {reference:.4f})")

    cells = []
    for entry in plan:
        perturbed = None
        if "runs" in entry:
            start, stop = entry["runs"]
            perturbed = aggregate_final(runs[start:stop], SENSITIVITY_OUTPUTS)
        for output in SENSITIVITY_OUTPUTS:
            base_out = baseline[output].mean
            cell = SensitivityCell(
                param=entry["field"],
                delta=entry["delta"],
                output=output,
                base_value=entry["base_value"],
                new_value=entry["new_value"],
                base_output=base_out,
                status=entry["status"],
                note=entry["note"],
            )
            if perturbed is not None:
                new_out = perturbed[output].mean
                cell.new_output = new_out
                cell.replications = reps
                try:
                    cell.coefficient = sensitivity_coefficient(base_out, new_out, entry["base_value"], entry["new_value"])
                except SensitivityUndefinedError as e:
                    cell.status = "undefined"
                    cell.note = str(e)
            if cell.status != "ok":
                logger.warning(f"Sensitivity {entry['field']} {entry['delta']:+.0%} {output}: {cell.status} ({cell.note})")
            cells.append(cell)
    return cells


# ============== EXTREME SCENARIOS ==============

def battery_scenarios(base: Params) -> List[Tuple[str, Dict[str, float]]]:
    """Named parameter overrides of the extreme-value battery"""
    return [
        ("default", {}),
        ("zero-radius", {"aff_radius": 0.0}),
        ("full-radius", {"aff_radius": 1.0}),
        ("frozen-affinity", {"max_change": 0.0}),
        ("frozen-closed", {"max_change": 0.0, "people_dead": 0}),
        ("max-network", {"max_network": base.max_profiles - 1}),
        ("noiseless", {"distortion": 0.0}),
        ("noiseless-frozen", {"distortion": 0.0, "people_dead": 0, "max_change": 0.0}),
        ("high-distortion", {"distortion": 1.0}),
    ]


def _check(description: str, passed: bool, detail: str = "") -> ScenarioCheck:
    return ScenarioCheck(description=description, passed=bool(passed), detail=detail)


def affinity_constant_between_deaths(run: RunSummary, tolerance: float = 1e-12) -> bool:
    """Mean and std of affinity unchanged across every step without a death"""
    rows = [run.initial_row, *run.time_series]
    for i, deaths in enumerate(run.deaths_per_step):
        if deaths:
            continue
        before, after = rows[i], rows[i + 1]
        if abs(after.mean_affinity - before.mean_affinity) > tolerance:
            return False
        if abs(after.std_affinity - before.std_affinity) > tolerance:
            return False
    return True


def _uniform_spread_check(means: Dict[str, float]) -> ScenarioCheck:
    return _check(
        "final affinity std stays near the uniform generator",
        abs(means["std_affinity"] - UNIFORM_STD) <= 0.03,
        f"std={means['std_affinity']:.4f}",
    )


def _scenario_checks(
    name: str,
    runs: Sequence[RunSummary],
    means: Dict[str, float],
    default_means: Dict[str, float],
) -> List[ScenarioCheck]:
    if name == "default":
        return [_check(
            "mean final clustering in [0.25, 0.70]",
            0.25 <= means["clustering"] <= 0.70,
            f"clustering={means['clustering']:.4f}",
        )]
    if name == "zero-radius":
        return [_check(
            "no link exists at any step",
            all(row.total_links == 0 for run in runs for row in run.time_series),
            f"density={means['density']:.4f}",
        )]
    if name == "full-radius":
        return [
            _check("mean final density > 0.40", means["density"] > 0.40, f"density={means['density']:.4f}"),
            _check(
                "mean final density above the default run",
                means["density"] > default_means["density"],
                f"{means['density']:.4f} vs {default_means['density']:.4f}",
            ),
        ]
    if name == "frozen-affinity":
        return [_uniform_spread_check(means)]
    if name in ("frozen-closed", "noiseless-frozen"):
        return [
            _check(
                "affinity mean and std constant across death-free steps",
                all(affinity_constant_between_deaths(run) for run in runs),
            ),
            _uniform_spread_check(means),
        ]
    return []


def extreme_battery(
    reps: int,
    base: Optional[Params] = None,
    n_jobs: Optional[int] = None,
) -> BatteryReport:
    """Run every extreme scenario for the full horizon and evaluate its assertions"""
    base = base or Params()
    scenarios = battery_scenarios(base)
    jobs = [
        with_overrides(base, **overrides, seed=derive_seed(base.seed, s, r))
        for s, (_, overrides) in enumerate(scenarios)
        for r in range(reps)
    ]
    runs = _run_all(jobs, n_jobs)

    grouped = {name: runs[s * reps:(s + 1) * reps] for s, (name, _) in enumerate(scenarios)}
    means = {
        name: {output: agg.mean for output, agg in aggregate_final(group).items()}
        for name, group in grouped.items()
    }

    outcomes = []
    for name, overrides in scenarios:
        outcome = ScenarioOutcome(
            name=name,
            overrides={key: float(value) for key, value in overrides.items()},
            replications=reps,
            final_means=means[name],
            checks=_scenario_checks(name, grouped[name], means[name], means["default"]),
        )
        logger.info(f"Scenario {name}: {'PASS' if outcome.passed else 'FAIL'}")
        outcomes.append(outcome)
    return BatteryReport(scenarios=outcomes)
