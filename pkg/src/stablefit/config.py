"""Run configuration with layered overrides.

Precedence, highest first: explicit overrides (CLI flags), environment
variables ``STABLEFIT_<FIELD>``, a JSON config file, dataclass defaults.
"""
from __future__ import annotations

import dataclasses
import json
import os
import typing
from dataclasses import dataclass, field

from .errors import DomainError
from .stable_core import WavenumberGrid

ENV_PREFIX = "STABLEFIT_"

DEFAULT_INTERVALS = (300, 900, 1800, 3600, 7200, 14400, 28800, 86400)
DEFAULT_PORTIONS = ("xmin", 0.05, 0.15, 0.30, 0.45)


@dataclass(frozen=True)
class AnalysisConfig:
    # estimation
    reg_k_min: float = 0.2
    reg_k_max: float = 1.0
    reg_k_step: float = 0.01
    epsilon: float = 0.01
    max_iter: int = 10
    min_fit_size: int = 1000
    # distance
    distance_points: int = 100
    # returns
    intervals: tuple = DEFAULT_INTERVALS
    detail_intervals: tuple = (3600, 7200)
    align_tolerance: float = 0.01
    # tails and comparison
    gof_replicates: int = 1000
    tail_min_positive: int = 50
    tail_min_size: int = 10
    tail_max_candidates: int = 500
    portions: tuple = DEFAULT_PORTIONS
    alternatives: tuple = ("power_law", "exponential")
    density_mode: str = "conditioned"
    # regime flags
    ratio_threshold: float = 20.0
    gaussian_alpha_threshold: float = 1.9
    # plot data
    hist_bins: int = 100
    hist_range: tuple = (-10.0, 10.0)
    # execution
    seed: int = 0
    threads: int = field(default=1, compare=False)

    def __post_init__(self):
        if not (0 < self.reg_k_min < self.reg_k_max) or self.reg_k_step <= 0:
            raise DomainError("regression grid needs 0 < k_min < k_max and step > 0")
        if self.epsilon <= 0 or self.max_iter < 1:
            raise DomainError("epsilon must be > 0 and max_iter >= 1")
        if self.distance_points < 2 or self.gof_replicates < 1 or self.threads < 1:
            raise DomainError("distance_points, gof_replicates and threads must be positive")
        if self.density_mode not in ("conditioned", "raw"):
            raise DomainError(f"density_mode must be conditioned or raw, not {self.density_mode!r}")
        for p in self.portions:
            if p != "xmin" and not (isinstance(p, float) and 0 < p < 1):
                raise DomainError(f"portion {p!r} must be 'xmin' or a fraction in (0, 1)")

    def regression_grid(self) -> WavenumberGrid:
        return WavenumberGrid.regression(self.reg_k_min, self.reg_k_max, self.reg_k_step)

    def distance_grid(self) -> WavenumberGrid:
        return WavenumberGrid.distance(self.distance_points)

    def fit_kwargs(self) -> dict:
        return dict(epsilon=self.epsilon, max_iter=self.max_iter, grid=self.regression_grid(),
                    min_size=self.min_fit_size)

    def scan_kwargs(self) -> dict:
        return dict(min_positive=self.tail_min_positive, min_tail=self.tail_min_size,
                    max_candidates=self.tail_max_candidates)

    def to_dict(self, include_runtime=False) -> dict:
        d = {f.name: getattr(self, f.name) for f in dataclasses.fields(self)}
        if not include_runtime:
            d.pop("threads")
        return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}


_HINTS = typing.get_type_hints(AnalysisConfig)
FIELD_NAMES = tuple(f.name for f in dataclasses.fields(AnalysisConfig))


def _portion(v):
    if isinstance(v, str) and v.strip().lower() == "xmin":
        return "xmin"
    return float(v)


def _coerce(name, value):
    """Convert file/env/flag values to the field's type."""
    hint = _HINTS[name]
    if hint is tuple:
        if isinstance(value, str):
            s = value.strip()
            items = json.loads(s) if s.startswith("[") else [p for p in s.split(",") if p.strip()]
        else:
            items = list(value)
        if name == "portions":
            return tuple(_portion(v) for v in items)
        if name in ("intervals", "detail_intervals"):
            return tuple(int(float(v)) for v in items)
        if name == "hist_range":
            return tuple(float(v) for v in items)
        return tuple(str(v).strip() for v in items)
    if hint is int:
        return int(value)
    if hint is float:
        return float(value)
    return str(value)


def _validate_keys(d, source):
    unknown = sorted(set(d) - set(FIELD_NAMES))
    if unknown:
        raise DomainError(f"unknown config keys in {source}: {', '.join(unknown)}")


def read_config_file(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise DomainError("config file must hold a JSON object")
    data = {k.replace("-", "_"): v for k, v in data.items()}
    _validate_keys(data, path)
    return data


def env_overrides(environ=None) -> dict:
    environ = os.environ if environ is None else environ
    out = {}
    for name in FIELD_NAMES:
        key = ENV_PREFIX + name.upper()
        if key in environ:
            out[name] = environ[key]
    return out


def load_config(path=None, overrides: dict | None = None, environ=None) -> AnalysisConfig:
    """Merge defaults < config file < environment < ``overrides`` (None values ignored)."""
    merged = {}
    if path:
        merged.update(read_config_file(path))
    merged.update(env_overrides(environ))
    if overrides:
        extra = {k: v for k, v in overrides.items() if v is not None}
        _validate_keys(extra, "overrides")
        merged.update(extra)
    try:
        values = {k: _coerce(k, v) for k, v in merged.items()}
    except (TypeError, ValueError) as exc:
        raise DomainError(f"bad config value: {exc}") from exc
    return AnalysisConfig(**values)
