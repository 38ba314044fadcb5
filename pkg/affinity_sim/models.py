"""
Pydantic Models for Parameters and Results
Model parameters with their defaults, validation, and the result records
produced by runs, sweeps, sensitivity analysis and the scenario battery
"""

from pydantic import BaseModel, ConfigDict, Field, ValidationError, ValidationInfo, field_validator, model_validator
from typing import Any, Dict, List, Literal, Mapping, Optional, Tuple, Union


def _hyphenate(field_name: str) -> str:
    return field_name.replace("_", "-")


class Params(BaseModel):
    """All model parameters; the single configuration record of a run"""

    model_config = ConfigDict(
        frozen=True,
        extra="forbid",
        alias_generator=_hyphenate,
        populate_by_name=True,
    )

    max_profiles: int = Field(default=100, ge=1, description="Population size")
    max_network: int = Field(default=50, ge=1, description="Maximum out-links per profile")
    distortion: float = Field(default=0.05, ge=0.0, description="Perception noise sd for Strongest links")
    max_change: float = Field(default=0.15, ge=0.0, le=1.0, description="Maximum affinity change per step")
    aff_radius: float = Field(default=0.2, ge=0.0, le=1.0, description="Tolerated affinity difference")
    people_dead: int = Field(default=5, ge=0, description="Maximum stochastic deaths per step")
    steps: int = Field(default=1000, ge=0, description="Run horizon in 10-day steps")
    seed: int = Field(default=42, ge=0, lt=2**64, description="Master seed")
    initial_affinity: Optional[float] = Field(
        default=None,
        ge=0.0,
        le=1.0,
        description="Common starting affinity for the initial population (uniform draws when unset)",
    )

    @field_validator("max_network")
    @classmethod
    def network_fits_population(cls, v: int, info: ValidationInfo) -> int:
        max_profiles = info.data.get("max_profiles")
        # A single profile can never link, so any limit is acceptable there
        if max_profiles is not None and max_profiles >= 2 and v > max_profiles - 1:
            raise ValueError(f"must be at most max-profiles - 1 ({max_profiles - 1})")
        return v

    @field_validator("people_dead")
    @classmethod
    def deaths_fit_population(cls, v: int, info: ValidationInfo) -> int:
        max_profiles = info.data.get("max_profiles")
        if max_profiles is not None and v > max_profiles:
            raise ValueError(f"must be at most max-profiles ({max_profiles})")
        return v


# Fields of Params that describe the model (everything except run plumbing)
MODEL_FIELDS: Tuple[str, ...] = (
    "max_profiles", "max_network", "distortion", "max_change", "aff_radius", "people_dead",
)
INTEGER_FIELDS = frozenset({"max_profiles", "max_network", "people_dead", "steps", "seed"})


class ParamViolation(BaseModel):
    """One violated parameter invariant"""

    field: str
    reason: str

    def __str__(self) -> str:
        return f"{_hyphenate(self.field)}: {self.reason}"


def violations_from_error(error: ValidationError) -> List[ParamViolation]:
    """Flatten a pydantic error into per-field violations"""
    violations = []
    for detail in error.errors():
        loc = detail.get("loc") or ("<params>",)
        field = str(loc[0]).replace("-", "_")
        violations.append(ParamViolation(field=field, reason=detail["msg"]))
    return violations


def validate_params(params: Union[Params, Mapping[str, Any]]) -> List[ParamViolation]:
    """
    Check every Params invariant

    Accepts a Params (possibly built with model_construct) or a plain mapping.
    Returns an empty list when the parameters are valid.
    """
    data = params.model_dump() if isinstance(params, Params) else dict(params)
    try:
        Params.model_validate(data)
    except ValidationError as e:
        return violations_from_error(e)
    return []


def with_overrides(base: Params, **changes: Any) -> Params:
    """Validated copy of base with some fields replaced"""
    return Params.model_validate({**base.model_dump(), **changes})


class ConfigFile(BaseModel):
    """Strict key set of a model configuration file; every key is optional"""

    model_config = ConfigDict(extra="forbid", alias_generator=_hyphenate, populate_by_name=False)

    max_profiles: Optional[int] = None
    max_network: Optional[int] = None
    distortion: Optional[float] = None
    max_change: Optional[float] = None
    aff_radius: Optional[float] = None
    people_dead: Optional[int] = None
    steps: Optional[int] = None
    seed: Optional[int] = None
    initial_affinity: Optional[float] = None


class MetricsRow(BaseModel):
    """Network and population statistics at one step boundary"""

    step: int = Field(..., ge=0)
    density: float = Field(..., ge=0.0, le=1.0, description="Directed links over N(N-1)")
    mean_net_size: float = Field(..., ge=0.0, description="Mean out-degree")
    clustering: float = Field(..., ge=0.0, le=1.0, description="Mean local clustering of the undirected projection")
    mean_affinity: float
    std_affinity: float = Field(..., ge=0.0)
    low_outliers: int = Field(..., ge=0)
    high_outliers: int = Field(..., ge=0)
    links_strongest: int = Field(..., ge=0)
    links_strong: int = Field(..., ge=0)
    links_medium: int = Field(..., ge=0)
    links_weak: int = Field(..., ge=0)
    links_weakest: int = Field(..., ge=0)

    @property
    def tier_counts(self) -> Tuple[int, int, int, int, int]:
        return (
            self.links_strongest, self.links_strong, self.links_medium,
            self.links_weak, self.links_weakest,
        )

    @property
    def total_links(self) -> int:
        return sum(self.tier_counts)


# Final-row outputs aggregated across replications
SUMMARY_OUTPUTS: Tuple[str, ...] = (
    "density", "mean_net_size", "clustering", "mean_affinity", "std_affinity",
)


class RunSummary(BaseModel):
    """Outcome of one seeded simulation"""

    params: Params
    seed: int
    initial_row: MetricsRow
    final_row: MetricsRow
    time_series: List[MetricsRow]
    deaths_per_step: List[int]

    @model_validator(mode="after")
    def series_matches_horizon(self) -> "RunSummary":
        if len(self.time_series) != self.params.steps:
            raise ValueError(f"expected {self.params.steps} rows, got {len(self.time_series)}")
        if len(self.deaths_per_step) != len(self.time_series):
            raise ValueError("deaths_per_step must have one entry per step")
        expected_final = self.time_series[-1] if self.time_series else self.initial_row
        if self.final_row != expected_final:
            raise ValueError("final_row must be the last row of the time series")
        return self


class OutputAggregate(BaseModel):
    mean: float
    std: float


class ReplicationResult(BaseModel):
    """Runs of one parameter set over several seeds"""

    runs: List[RunSummary]
    aggregates: Dict[str, OutputAggregate]

    @property
    def replications(self) -> int:
        return len(self.runs)


class SweepRow(BaseModel):
    value: float
    replications: int = Field(..., ge=1)
    clustering_mean: float
    clustering_std: float
    std_affinity_mean: float
    std_affinity_std: float
    density_mean: float
    density_std: float


class SweepResult(BaseModel):
    """Aggregates of a one-parameter sweep, one row per value"""

    param_name: str
    values: List[float]
    replications: int = Field(..., ge=1)
    rows: List[SweepRow]


CellStatus = Literal["ok", "no-op", "invalid", "undefined"]


class SensitivityCell(BaseModel):
    """Sensitivity of one output to one relative parameter change"""

    param: str
    delta: float
    output: str
    base_value: float
    new_value: float
    base_output: float
    new_output: Optional[float] = None
    coefficient: Optional[float] = None
    replications: int = 0
    status: CellStatus
    note: str = ""


class ScenarioCheck(BaseModel):
    description: str
    passed: bool
    detail: str = ""


class ScenarioOutcome(BaseModel):
    """Mean final metrics and assertion results of one extreme scenario"""

    name: str
    overrides: Dict[str, float]
    replications: int
    final_means: Dict[str, float]
    checks: List[ScenarioCheck]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)


class BatteryReport(BaseModel):
    scenarios: List[ScenarioOutcome]

    @property
    def passed(self) -> bool:
        return all(scenario.passed for scenario in self.scenarios)
