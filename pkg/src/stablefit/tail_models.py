"""One-sided tail models: Hill power law and shifted exponential.

The lower bound x_min is the candidate that minimizes the KS distance between
the tail sample and the fitted model.  Goodness of fit uses the
semi-parametric bootstrap: synthetic sets keep the empirical body below x_min,
draw the tail from the fitted model, and go through the same x_min scan.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (DegenerateTail, EmptyTail, InsufficientData, InsufficientTail,
                     NonPositive)
from .sampler import make_rng

POWER_LAW = "power_law"
EXPONENTIAL = "exponential"
FAMILIES = (POWER_LAW, EXPONENTIAL)


@dataclass(frozen=True)
class TailFit:
    family: str
    x_min: float
    parameter: float
    n_tail: int
    ks_distance: float
    std_error: float
    n_total: int = 0

    def cdf(self, x):
        return model_cdf(self.family, self.parameter, self.x_min)(x)

    def logpdf(self, x):
        """One-sided log-density; -inf below x_min."""
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.family == POWER_LAW:
                a = self.parameter
                out = math.log(a / self.x_min) - (a + 1) * np.log(x / self.x_min)
            else:
                lam = self.parameter
                out = math.log(lam) - lam * (x - self.x_min)
        return np.where(x >= self.x_min, out, -np.inf)


@dataclass(frozen=True)
class GofResult:
    p_value: float
    replicates: int
    empirical_ks: float
    synthetic_ks: np.ndarray

    @property
    def plausible(self) -> bool:
        return self.p_value >= 0.1


def _tail_array(tail_data, x_min, min_n=2):
    x = np.asarray(tail_data, dtype=float).ravel()
    if x.size < min_n:
        raise InsufficientTail(f"need at least {min_n} tail points, got {x.size}")
    if np.any(x < x_min):
        raise ValueError("tail data must be >= x_min")
    return x


def hill_alpha(tail_data, x_min: float) -> tuple[float, float]:
    """alpha_hat = n / sum ln(x_i / x_min), std error alpha_hat / sqrt(n)."""
    if not x_min > 0:
        raise NonPositive("x_min must be positive")
    x = _tail_array(tail_data, x_min)
    s = np.sum(np.log(x / x_min))
    if s <= 0:
        raise DegenerateTail("all tail values equal x_min")
    a = x.size / s
    return float(a), float(a / math.sqrt(x.size))


def fit_exponential_tail(tail_data, x_min: float) -> float:
    """lambda_hat = 1 / (mean - x_min) for the density lambda exp(-lambda (x - x_min))."""
    x = _tail_array(tail_data, x_min)
    excess = x.mean() - x_min
    if excess <= 0:
        raise DegenerateTail("tail mean equals x_min")
    return float(1.0 / excess)


def model_cdf(family: str, parameter: float, x_min: float) -> Callable:
    if family == POWER_LAW:
        return lambda x: 1.0 - (np.asarray(x, dtype=float) / x_min) ** (-parameter)
    if family == EXPONENTIAL:
        return lambda x: -np.expm1(-parameter * (np.asarray(x, dtype=float) - x_min))
    raise ValueError(f"unknown family {family!r}")


def _ks_sorted(xs, f):
    n = xs.size
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))


def ks_statistic(tail_data, model_cdf: Callable, x_min: float) -> float:
    """sup |F_emp - Q| over the tail, checking both sides of each empirical step."""
    x = np.asarray(tail_data, dtype=float).ravel()
    if x.size == 0:
        raise EmptyTail("no tail data")
    if np.any(x < x_min):
        raise ValueError("tail data must be >= x_min")
    xs = np.sort(x)
    return _ks_sorted(xs, np.asarray(model_cdf(xs), dtype=float))


def _fit_family(family, tail, x_min):
    if family == POWER_LAW:
        a, se = hill_alpha(tail, x_min)
        return a, se
    lam = fit_exponential_tail(tail, x_min)
    return lam, lam / math.sqrt(tail.size)


def candidate_starts(xs, min_tail=10, max_candidates=500):
    """Start indices (into sorted ``xs``) of unique values leaving >= min_tail points."""
    starts = np.flatnonzero(np.r_[True, xs[1:] != xs[:-1]])
    starts = starts[xs.size - starts >= min_tail]
    # the largest value can never be a valid bound (log terms vanish)
    starts = starts[xs[starts] < xs[-1]]
    if starts.size > max_candidates:
        pick = np.unique(np.round(np.linspace(0, starts.size - 1, max_candidates)).astype(int))
        starts = starts[pick]
    return starts


def scan_xmin(data, family: str = POWER_LAW, min_positive: int = 50, min_tail: int = 10,
              max_candidates: int = 500):
    """Every scanned candidate as (x_min, parameter, ks_distance, n_tail) arrays."""
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    x = np.asarray(data, dtype=float).ravel()
    xs = np.sort(x[x > 0])
    if xs.size < min_positive:
        raise InsufficientData(f"need at least {min_positive} positive values, got {xs.size}")
    starts = candidate_starts(xs, min_tail, max_candidates)
    if starts.size == 0:
        raise InsufficientData("no candidate x_min leaves enough tail points")
    n = xs.size
    logs = np.log(xs)
    # suffix sums give every candidate's MLE without re-summing
    suffix_log = np.cumsum(logs[::-1])[::-1]
    suffix_x = np.cumsum(xs[::-1])[::-1]
    xmins = xs[starts]
    n_tail = n - starts
    if family == POWER_LAW:
        params = n_tail / (suffix_log[starts] - n_tail * np.log(xmins))
    else:
        params = 1.0 / (suffix_x[starts] / n_tail - xmins)
    ks = np.empty(starts.size)
    for j, s in enumerate(starts):
        tail = xs[s:]
        if family == POWER_LAW:
            f = -np.expm1(-params[j] * (logs[s:] - logs[s]))
        else:
            f = -np.expm1(-params[j] * (tail - xmins[j]))
        ks[j] = _ks_sorted(tail, f)
    return xmins, params, ks, n_tail


def select_xmin(data, family: str = POWER_LAW, min_positive: int = 50, min_tail: int = 10,
                max_candidates: int = 500) -> TailFit:
    """Fit ``family`` above the x_min that minimizes the KS distance.

    Only positive values enter the scan.  Ties in D go to the smaller x_min.
    """
    xmins, params, ks, n_tail = scan_xmin(data, family, min_positive, min_tail, max_candidates)
    j = int(np.argmin(ks))
    n_pos = int(np.count_nonzero(np.asarray(data, dtype=float) > 0))
    return TailFit(family, float(xmins[j]), float(params[j]), int(n_tail[j]), float(ks[j]),
                   float(params[j] / math.sqrt(n_tail[j])), n_pos)


def fit_at(data, x_min: float, family: str = POWER_LAW) -> TailFit:
    """Fit ``family`` to the values >= x_min with x_min held fixed."""
    x = np.asarray(data, dtype=float).ravel()
    tail = x[x >= x_min]
    if tail.size == 0:
        raise EmptyTail(f"no data at or above {x_min}")
    param, se = _fit_family(family, tail, x_min)
    d = ks_statistic(tail, model_cdf(family, param, x_min), x_min)
    return TailFit(family, float(x_min), float(param), int(tail.size), d, float(se),
                   int(np.count_nonzero(x > 0)))


def draw_tail(fit: TailFit, size: int, rng: np.random.Generator) -> np.ndarray:
    u = 1.0 - rng.random(size)  # (0, 1]
    if fit.family == POWER_LAW:
        return fit.x_min * u ** (-1.0 / fit.parameter)
    return fit.x_min - np.log(u) / fit.parameter


def synthetic_dataset(data, fit: TailFit, rng: np.random.Generator) -> np.ndarray:
    """Empirical body below x_min plus a fitted-model tail, same total size."""
    x = np.asarray(data, dtype=float).ravel()
    x = x[x > 0]
    body = x[x < fit.x_min]
    n = x.size
    n_tail = int(rng.binomial(n, fit.n_tail / n)) if body.size else n
    out = np.empty(n)
    out[:n - n_tail] = body[rng.integers(0, body.size, n - n_tail)] if n_tail < n else []
    out[n - n_tail:] = draw_tail(fit, n_tail, rng)
    return out


def goodness_of_fit(data, fit: TailFit, replicates: int = 1000, seed: int = 0,
                    threads: int = 1, min_positive: int = 50, min_tail: int = 10,
                    max_candidates: int = 500) -> GofResult:
    """Bootstrap p-value: fraction of synthetic KS distances >= the observed one.

    Replicate r uses the stream ``make_rng(seed, r)``, so the result does not
    depend on ``threads``.
    """
    if replicates < 1:
        raise ValueError("replicates must be >= 1")

    def one(r):
        syn = synthetic_dataset(data, fit, make_rng(seed, r))
        return select_xmin(syn, fit.family, min_positive, min_tail, max_candidates).ks_distance

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            d = np.fromiter(pool.map(one, range(replicates)), float, replicates)
    else:
        d = np.fromiter(map(one, range(replicates)), float, replicates)
    p = float(np.mean(d >= fit.ks_distance))
    return GofResult(p, replicates, fit.ks_distance, d)


def split_tails(data):
    """(positive values, absolute values of the negative ones)."""
    x = np.asarray(data, dtype=float).ravel()
    return x[x > 0], -x[x < 0]
