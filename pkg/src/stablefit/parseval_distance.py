"""Parseval distance between an empirical CF and a stable CF on k in [-pi, pi].

    D = (dk / 2 pi) sum_i |phi_hat(k_i) - phi_N(k_i)|^2

By the Parseval relation this is the squared L2 distance between the
(discretized) densities.  For i.i.d. data from the model itself,
E|phi - phi_N|^2 = (1 - |phi|^2) / N, which gives the ideal baseline.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cf_estimation import EmpiricalCF, fit
from .errors import GridMismatch
from .stable_core import StableParams, WavenumberGrid, cf

_COVER_TOL = 1e-9


def _check_grid(grid: WavenumberGrid):
    k = grid.points
    if k[0] > -math.pi + _COVER_TOL or k[-1] < math.pi - _COVER_TOL:
        raise GridMismatch(f"grid [{k[0]:.6g}, {k[-1]:.6g}] does not cover [-pi, pi]")


def _weight(grid: WavenumberGrid) -> float:
    return grid.spacing / (2 * math.pi)


def _ecf_values(ecf, k):
    return ecf(k) if callable(ecf) else np.asarray(ecf, dtype=complex)


def distance(ecf, params: StableParams, grid: WavenumberGrid | None = None) -> float:
    """Riemann sum of |phi_hat - phi_N|^2 with weight dk / 2 pi.

    ``ecf`` is an EmpiricalCF or any callable k -> complex.
    """
    grid = grid or WavenumberGrid.distance()
    _check_grid(grid)
    diff = cf(params, grid.points) - _ecf_values(ecf, grid.points)
    return float(_weight(grid) * np.sum(diff.real ** 2 + diff.imag ** 2))


def ideal_expectation(params: StableParams, grid: WavenumberGrid | None = None, n: int = 1) -> float:
    """(1/n)(1 - (dk/2 pi) sum |phi(k_i)|^2)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    grid = grid or WavenumberGrid.distance()
    mod2 = np.abs(cf(params, grid.points)) ** 2
    return float((1.0 - _weight(grid) * np.sum(mod2)) / n)


def gaussian_params(params: StableParams) -> StableParams:
    """alpha forced to 2 with the fitted gamma and delta; beta has no effect at alpha = 2."""
    return StableParams(2.0, 0.0, params.gamma, params.delta)


@dataclass(frozen=True)
class DistanceReport:
    distance: float
    grid: WavenumberGrid
    sample_size: int
    ideal_expectation: float
    ratio_to_ideal: float
    params: StableParams


def distance_report(ecf: EmpiricalCF, params: StableParams,
                    grid: WavenumberGrid | None = None) -> DistanceReport:
    grid = grid or WavenumberGrid.distance()
    d = distance(ecf, params, grid)
    ideal = ideal_expectation(params, grid, ecf.source_size)
    ratio = d / ideal if ideal > 0 else math.inf
    return DistanceReport(d, grid, ecf.source_size, ideal, ratio, params)


@dataclass(frozen=True)
class ScalingDiagnostic:
    sizes: np.ndarray
    distances: np.ndarray
    slope: float
    intercept: float

    def rows(self):
        return list(zip(self.sizes.tolist(), self.distances.tolist()))


def loglog_slope(sizes, values) -> tuple[float, float]:
    slope, intercept = np.polyfit(np.log(np.asarray(sizes, float)), np.log(np.asarray(values, float)), 1)
    return float(slope), float(intercept)


def scaling_diagnostic(data_by_n, params_per_n=None, grid: WavenumberGrid | None = None,
                       **fit_kwargs) -> ScalingDiagnostic:
    """Distance against sample size, with the fitted log-log slope.

    ``data_by_n`` is a sequence of (n, series).  ``params_per_n`` is a single
    StableParams applied to every series, a sequence aligned with
    ``data_by_n``, or None to fit each series.  Repeated n values are
    averaged before the slope fit.
    """
    items = list(data_by_n)
    if isinstance(params_per_n, StableParams) or params_per_n is None:
        plist = [params_per_n] * len(items)
    else:
        plist = list(params_per_n)
        if len(plist) != len(items):
            raise ValueError("params_per_n must align with data_by_n")
    grid = grid or WavenumberGrid.distance()
    by_n: dict[int, list[float]] = {}
    for (n, series), p in zip(items, plist):
        if p is None:
            p = fit(series, **fit_kwargs).params
        by_n.setdefault(int(n), []).append(distance(EmpiricalCF(series), p, grid))
    if len(by_n) < 3:
        raise ValueError("scaling diagnostic needs at least 3 distinct n values")
    sizes = np.array(sorted(by_n))
    dists = np.array([np.mean(by_n[n]) for n in sizes])
    slope, intercept = loglog_slope(sizes, dists)
    return ScalingDiagnostic(sizes, dists, slope, intercept)
