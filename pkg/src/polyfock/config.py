"""Experiment configuration schema (YAML files, validated strictly)."""
from typing import Literal, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .symbols import SymbolExpr, parse_symbol

EXPERIMENTS = (
    "kernel-check",
    "reproduce",
    "estimates",
    "berezin-identity",
    "sarason-field",
    "norm-scan",
    "s-growth",
    "majoration",
    "classify",
    "adjoint-check",
)


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class Orders(_Strict):
    m: int = Field(1, ge=1)
    p: int = Field(1, ge=1)
    n: int = Field(1, ge=1)


class GridSpec(_Strict):
    extent: float = Field(2.0, gt=0)
    spacing: float = Field(0.25, gt=0)
    radius: Optional[float] = Field(None, gt=0)
    ray_min: float = 2.0
    ray_max: float = 8.0
    ray_points: int = Field(25, ge=8)


class Tolerances(_Strict):
    quadrature: float = Field(1e-10, gt=0)
    plateau: float = Field(0.02, gt=0)


class Params(_Strict):
    """Experiment-specific knobs; each experiment reads only what it needs."""

    n_values: list[int] = [1, 2, 3]
    m_values: list[int] = [1, 2, 3]
    p_values: list[int] = [1, 2, 3, 4]
    samples: int = Field(50, ge=1)
    sample_radius: float = Field(2.0, gt=0)
    c_values: list[list[float]] = [[0.0, 0.0], [1.0, 0.0], [0.0, 2.0]]
    N_max: int = Field(9, ge=0)
    a_max: float = Field(20.0, ge=0)
    a_step: float = Field(0.5, gt=0)
    a2: list[float] = [0.25, 0.0]
    guard: Optional[int] = Field(None, ge=0)
    random_symbols: int = Field(0, ge=0)
    growth_points: list[float] = [1.0, 4.0]


class Expect(_Strict):
    """Declared thresholds; every field that is set becomes a pass/fail check."""

    verdict: Optional[Literal["bounded", "unbounded", "outside-hypotheses"]] = None
    reason: Optional[str] = None
    q_linear: Optional[list[list[float]]] = None
    c: Optional[list[float]] = None
    max_error: Optional[float] = None
    max_spread: Optional[float] = None
    min_growth_ratio: Optional[float] = None
    rate: Optional[float] = None
    rate_rtol: Optional[float] = None
    rate_atol: Optional[float] = None
    min_slack: Optional[float] = None
    max_ratio: Optional[float] = None
    bound_slack: Optional[float] = None
    exact_value: Optional[float] = None
    exact_tol: Optional[float] = None


class OutputSpec(_Strict):
    dir: str = "runs"


class ExperimentConfig(_Strict):
    experiment: Literal[EXPERIMENTS]  # type: ignore[valid-type]
    description: str = ""
    orders: Orders = Orders()
    degrees: list[int] = [40]
    grid: GridSpec = GridSpec()
    symbols: dict[str, dict] = {}
    tolerances: Tolerances = Tolerances()
    params: Params = Params()
    expect: Expect = Expect()
    output: OutputSpec = OutputSpec()
    seed: int = 0

    @field_validator("symbols")
    @classmethod
    def _check_symbols(cls, v):
        for name, rec in v.items():
            if name not in ("f", "g", "h"):
                raise ValueError(f"unknown symbol name {name!r} (allowed: f, g, h)")
            parse_symbol(rec)
        return v

    @field_validator("degrees")
    @classmethod
    def _check_degrees(cls, v):
        if not v or any(d < 0 for d in v) or any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("degrees must be a nonempty ascending list of nonnegative integers")
        return v

    def symbol(self, name: str) -> SymbolExpr:
        if name not in self.symbols:
            raise KeyError(f"experiment {self.experiment!r} needs symbol {name!r}")
        return parse_symbol(self.symbols[name])


def load_config(path) -> ExperimentConfig:
    with open(path) as fh:
        data = yaml.safe_load(fh)
    if not isinstance(data, dict):
        raise ValueError(f"{path}: top level must be a mapping")
    return ExperimentConfig.model_validate(data)
