"""Request/response models shared by the service, the CLI and the tests."""

from __future__ import annotations

import json
from typing import Any, Optional

import numpy as np
from pydantic import BaseModel, Field, field_validator


class HGrid(BaseModel):
    """Geometric grid h_m = h0 * ratio^m, m = 0..count-1."""

    h0: float = Field(default=0.1, gt=0)
    ratio: float = Field(default=0.5)
    count: int = Field(default=13, ge=3)

    @field_validator("ratio")
    @classmethod
    def _ratio_open_unit(cls, v):
        if not 0 < v < 1:
            raise ValueError("ratio must lie in (0, 1)")
        return v

    def values(self) -> list[float]:
        return [self.h0 * self.ratio ** m for m in range(self.count)]


class ExperimentConfig(BaseModel):
    experiment: str = ""
    N: int = Field(default=2, ge=1, le=4)
    grid: HGrid = Field(default_factory=HGrid)
    samples: int = Field(default=100_000, ge=0)
    seed: int = Field(default=0, ge=0, lt=2 ** 64)
    cutoff: int = Field(default=40, ge=1, le=200)
    strict: bool = False
    out: Optional[str] = None
    jobs: int = Field(default=1, ge=1, le=64)

    def override(self, **kwargs) -> "ExperimentConfig":
        data = self.model_dump()
        grid = data.pop("grid")
        for key in ("h0", "ratio", "count"):
            if key in kwargs and kwargs[key] is not None:
                grid[key] = kwargs.pop(key)
        data.update({k: v for k, v in kwargs.items() if v is not None})
        data["grid"] = grid
        return ExperimentConfig(**data)


class Assertion(BaseModel):
    name: str
    status: str  # "pass" | "fail" | "inconclusive"
    detail: str = ""
    observed: Optional[float] = None
    bound: Optional[float] = None


class FitReport(BaseModel):
    slope: float
    coefficient: float
    r_squared: float


class ExperimentResult(BaseModel):
    experiment: str
    config: ExperimentConfig
    values: dict[str, Any] = Field(default_factory=dict)
    exponents: dict[str, FitReport] = Field(default_factory=dict)
    assertions: list[Assertion] = Field(default_factory=list)
    verdict: str = "pass"
    wall_clock_s: Optional[float] = None

    def finalize(self) -> "ExperimentResult":
        statuses = {a.status for a in self.assertions}
        if "fail" in statuses:
            self.verdict = "fail"
        elif "inconclusive" in statuses:
            self.verdict = "inconclusive"
        else:
            self.verdict = "pass"
        return self

    def canonical_json(self, include_timing: bool = False) -> str:
        """Deterministic serialization; timing is excluded by default so
        that identical configs produce byte-identical files."""
        data = self.model_dump()
        if not include_timing:
            data.pop("wall_clock_s", None)
        else:
            data["wall_clock_s"] = self.wall_clock_s
        return json.dumps(_canon(data), sort_keys=True, indent=1)


def _canon(obj):
    if isinstance(obj, dict):
        return {k: _canon(v) for k, v in sorted(obj.items())}
    if isinstance(obj, (list, tuple)):
        return [_canon(x) for x in obj]
    if isinstance(obj, float):
        return float(repr(obj))
    return obj


def cnum(z) -> list[float]:
    """Complex scalar as an [re, im] pair."""
    z = complex(z)
    return [z.real, z.imag]


def cmat(M) -> list:
    """Complex matrix as nested [re, im] pairs."""
    M = np.asarray(M, dtype=complex)
    return [[cnum(x) for x in row] for row in M]


def cseries(hp) -> list:
    """HPolynomial with scalar or matrix coefficients as a list by power."""
    out = []
    for c in hp.coeffs:
        if c is None:
            out.append(None)
        elif isinstance(c, np.ndarray):
            out.append(cmat(np.asarray(
                [[complex(x) for x in row] for row in c])))
        else:
            out.append(cnum(c))
    return out
