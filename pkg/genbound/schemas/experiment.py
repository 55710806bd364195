from pydantic import BaseModel, Field, field_validator, model_validator
from typing import Dict, List, Union
import enum


class ExperimentName(str, enum.Enum):
    BOUNDS_EVAL = "bounds_eval"
    COVERING_VERIFY = "covering_verify"
    MAUREY_VERIFY = "maurey_verify"
    RADEMACHER_VERIFY = "rademacher_verify"
    DECAY_STUDY = "decay_study"
    COMPARE_TRAUGER = "compare_trauger"
    GAP_STUDY = "gap_study"


class OutputFormat(str, enum.Enum):
    CSV = "csv"
    JSON = "json"


GridValue = Union[int, float, str]


class ExperimentConfig(BaseModel):
    experiment: ExperimentName
    grid: Dict[str, List[GridValue]]
    seeds: List[int] = Field(default_factory=lambda: [0])
    output_path: str = "results.csv"
    format: OutputFormat = OutputFormat.CSV

    @field_validator('grid')
    @classmethod
    def grid_nonempty(cls, v):
        if not v:
            raise ValueError('grid must name at least one parameter')
        empty = [key for key, values in v.items() if not values]
        if empty:
            raise ValueError(f'grid lists are empty for: {", ".join(empty)}')
        return v

    @field_validator('seeds')
    @classmethod
    def seeds_nonempty(cls, v):
        if not v:
            raise ValueError('seeds must be nonempty')
        return v


class ResultRow(BaseModel):
    experiment: str
    params: Dict[str, GridValue] = Field(default_factory=dict)
    measured: float
    theoretical: float
    passed: bool
    runtime_ms: float = 0.0

    @model_validator(mode='after')
    def pass_flag_consistent(self):
        if self.passed != (self.measured <= self.theoretical):
            raise ValueError('passed must equal measured <= theoretical')
        return self

    @classmethod
    def compare(cls, experiment: str, params: Dict[str, GridValue], measured: float,
                theoretical: float, runtime_ms: float = 0.0) -> "ResultRow":
        return cls(
            experiment=experiment,
            params=params,
            measured=measured,
            theoretical=theoretical,
            passed=bool(measured <= theoretical),
            runtime_ms=runtime_ms,
        )
