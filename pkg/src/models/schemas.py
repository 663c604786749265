import hashlib
import json
from fractions import Fraction
from typing import Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator, model_validator

from .. import config
from ..exact.interval_set import format_rational


def _as_fraction(value):
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"invalid rational {value!r}") from e
    raise ValueError(f"expected a rational, got {type(value).__name__}")


class ExactModel(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)


class TheoryResult(ExactModel):
    map_id: str
    level: int = Field(ge=0)
    q: int = Field(ge=0)
    theta_exact: Fraction
    mu_u: Fraction
    mu_a: Fraction
    components: int = Field(ge=0)

    @field_validator('theta_exact', 'mu_u', 'mu_a', mode='before')
    @classmethod
    def _rational(cls, value):
        return _as_fraction(value)

    @model_validator(mode='after')
    def _check_ratio(self):
        if not (0 <= self.theta_exact <= 1):
            raise ValueError("theta must lie in [0,1]")
        return self

    @property
    def theta(self) -> float:
        return float(self.theta_exact)

    @field_serializer('theta_exact', 'mu_u', 'mu_a')
    def _dump_rational(self, value: Fraction) -> str:
        return format_rational(value)


class Schedule(ExactModel):
    n: int = Field(ge=1)
    level: int = Field(ge=0)
    q_n: int = Field(ge=0)
    w_n: int = Field(ge=1)
    tau: Fraction

    @field_validator('tau', mode='before')
    @classmethod
    def _rational(cls, value):
        return _as_fraction(value)


class EstimateRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    u: int
    q: int = Field(ge=0)
    numerator: int = Field(ge=0)
    denominator: int = Field(ge=0)
    theta_hat: Optional[float] = None
    defined: bool = True


class SweepRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    u: int
    q: int
    mean_theta: Optional[float] = None
    sd_theta: Optional[float] = None
    defined_count: int = 0
    undefined_count: int = 0


class Plateau(BaseModel):
    model_config = ConfigDict(frozen=True)

    u_lo: int
    u_hi: int
    value: float


class SweepTable(BaseModel):
    rows: List[SweepRow]
    metadata: Dict[str, str] = Field(default_factory=dict)

    def u_values(self) -> List[int]:
        return sorted({row.u for row in self.rows})

    def q_values(self) -> List[int]:
        return sorted({row.q for row in self.rows})

    def row(self, u: int, q: int) -> Optional[SweepRow]:
        for row in self.rows:
            if row.u == u and row.q == q:
                return row
        return None


class CountsRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int
    depth: int
    n_star: int
    n_refined: int


Command = Literal["simulate", "sweep", "theta-exact", "digraph", "ifs-theta", "counts", "repro"]

# Fields that never change output bytes
NON_DATA_FIELDS = {'threads', 'quiet', 'log_level', 'output', 'config_file', 'dump_dir'}


class RunConfig(BaseModel):
    """Every input of one CLI run"""
    model_config = ConfigDict(extra='forbid', arbitrary_types_allowed=True)

    command: Command
    map_id: Optional[str] = None
    observable: Literal["ladder", "escape"] = "ladder"
    n: Optional[int] = Field(default=None, ge=1)
    ell: Optional[int] = Field(default=None, ge=1)
    seed: int = Field(default=0, ge=0)
    burn_in: Optional[int] = Field(default=None, ge=0)
    cap: int = Field(default=config.DEFAULT_LADDER_CAP, ge=1, le=10_000)

    u_min: int = Field(default=5, ge=0)
    u_max: int = Field(default=20, ge=0)
    q_list: List[int] = Field(default_factory=lambda: [1, 5, 10])
    plateau_window: int = Field(default=3, ge=1)
    plateau_eps: float = Field(default=0.03, gt=0)

    level: Optional[int] = Field(default=None, ge=0)
    level_max: Optional[int] = Field(default=None, ge=0)
    gaps: Union[int, Literal["auto"]] = "auto"
    tau: Fraction = Fraction(1)

    m: Optional[int] = Field(default=None, ge=2)
    q: Optional[int] = Field(default=None, ge=0)
    k: Optional[int] = Field(default=None, ge=-1)
    depth: Optional[int] = Field(default=None, ge=0)
    n_min: int = Field(default=1, ge=1)
    n_max: Optional[int] = Field(default=None, ge=1)
    refine: int = Field(default=4, ge=0)

    spec_path: Optional[str] = None
    figure: Optional[str] = None
    scale: float = Field(default=1.0, gt=0)

    max_depth: Optional[int] = Field(default=None, ge=0)
    max_denominator_bits: Optional[int] = Field(default=None, ge=1)
    max_matrix_rows: Optional[int] = Field(default=None, ge=1)
    max_operations: Optional[int] = Field(default=None, ge=1)

    dump_matrix: bool = False
    dump_set: Optional[str] = None
    dump_dir: Optional[str] = None
    output: Optional[str] = None
    threads: int = Field(default=config.DEFAULT_THREADS, ge=1, le=1024)
    quiet: bool = False
    log_level: str = "INFO"
    config_file: Optional[str] = None

    @field_validator('q_list', mode='before')
    @classmethod
    def _split_q_list(cls, value):
        if isinstance(value, str):
            return [int(part) for part in value.replace(' ', '').split(',') if part]
        return value

    @field_validator('q_list')
    @classmethod
    def _check_q_list(cls, value):
        if not value or any(q < 0 for q in value):
            raise ValueError("q list must hold nonnegative integers")
        return sorted(set(value))

    @field_validator('gaps', mode='before')
    @classmethod
    def _parse_gaps(cls, value):
        if isinstance(value, str) and value != "auto":
            return int(value)
        return value

    @field_validator('tau', mode='before')
    @classmethod
    def _parse_tau(cls, value):
        return _as_fraction(value)

    @field_validator('tau')
    @classmethod
    def _positive_tau(cls, value):
        if value <= 0:
            raise ValueError("tau must be positive")
        return value

    @field_serializer('tau')
    def _dump_tau(self, value: Fraction) -> str:
        return format_rational(value)

    @model_validator(mode='after')
    def _check_ranges(self):
        if self.u_min > self.u_max:
            raise ValueError(f"u_min ({self.u_min}) exceeds u_max ({self.u_max})")
        if self.level is not None and self.level_max is not None and self.level_max < self.level:
            raise ValueError("level_max must not be below level")
        if self.n_max is not None and self.n_max < self.n_min:
            raise ValueError("n_max must not be below n_min")
        return self

    def config_hash(self) -> str:
        """SHA-256 of the data-affecting fields"""
        payload = self.model_dump(mode='json', exclude=NON_DATA_FIELDS)
        canonical = json.dumps(payload, sort_keys=True, separators=(',', ':'))
        return hashlib.sha256(canonical.encode('utf-8')).hexdigest()
