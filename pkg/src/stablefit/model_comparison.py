"""Vuong-style likelihood-ratio test between two densities on a shared sample.

    R = sum_i [ln p1(x_i) - ln p2(x_i)],   p = erfc(|R| / (sqrt(2n) sigma))

with sigma the (1/n-normalized) standard deviation of the per-point terms.
A positive R favors the first model; the verdict is conclusive when p < 0.1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyTail, NonFiniteDensity, SupportMismatch
from .stable_core import StableParams, StableTable
from .tail_models import POWER_LAW, TailFit, fit_at, select_xmin

SIGNIFICANCE = 0.1
LOG_TINY = math.log(np.finfo(float).tiny)
FAVORS_FIRST = "favors_first"
FAVORS_SECOND = "favors_second"
INCONCLUSIVE = "inconclusive"
CONDITIONED = "conditioned"
RAW = "raw"


@dataclass(frozen=True)
class LrtResult:
    ratio: float
    sigma: float
    n: int
    p_value: float
    verdict: str
    bound: float = math.nan
    portion: object = None
    alt: TailFit | None = None
    floored: int = 0
    density_mode: str = CONDITIONED


def _terms(data, logpdf1, logpdf2):
    x = np.asarray(data, dtype=float).ravel()
    if x.size < 2:
        raise ValueError("need at least two observations")
    l1 = np.asarray(logpdf1(x), dtype=float)
    l2 = np.asarray(logpdf2(x), dtype=float)
    bad = ~(np.isfinite(l1) & np.isfinite(l2))
    if np.any(bad):
        raise NonFiniteDensity(f"non-finite log-density at {int(bad.sum())} point(s), first x={x[bad][0]!r}")
    return l1 - l2


def ratio_sigma(terms) -> tuple[float, float]:
    t = np.asarray(terms, dtype=float)
    return float(np.sum(t)), float(np.sqrt(np.mean((t - t.mean()) ** 2)))


def log_likelihood_ratio(data, logpdf1, logpdf2) -> tuple[float, float]:
    """(R, sigma) for the per-point log-density differences."""
    return ratio_sigma(_terms(data, logpdf1, logpdf2))


def lrt_p_value(ratio: float, sigma: float, n: int) -> float:
    if sigma < 0 or n < 1:
        raise ValueError("need sigma >= 0 and n >= 1")
    if ratio == 0:
        return 1.0
    if sigma == 0:
        return 0.0
    return math.erfc(abs(ratio) / (math.sqrt(2 * n) * sigma))


def verdict(ratio: float, p_value: float) -> str:
    if p_value >= SIGNIFICANCE:
        return INCONCLUSIVE
    return FAVORS_FIRST if ratio > 0 else FAVORS_SECOND


def compare(data, logpdf1, logpdf2) -> LrtResult:
    terms = _terms(data, logpdf1, logpdf2)
    r, s = ratio_sigma(terms)
    p = lrt_p_value(r, s, terms.size)
    return LrtResult(r, s, terms.size, p, verdict(r, p))


def portion_bound(values, portion, family: str = POWER_LAW, n_total: int | None = None, **scan) -> float:
    """Lower bound of a one-sided tail portion of ``values``.

    ``portion`` is "xmin" (KS-selected bound for ``family``) or a fraction q in
    (0, 1): the bound is the smallest of the ceil(q * n_total) largest values.
    """
    v = np.asarray(values, dtype=float).ravel()
    if portion == "xmin":
        return select_xmin(v, family, **scan).x_min
    q = float(portion)
    if not 0 < q < 1:
        raise ValueError("portion fraction must be in (0, 1)")
    n_total = v.size if n_total is None else n_total
    m = int(math.ceil(q * n_total))
    if m > v.size or m < 1:
        raise EmptyTail(f"portion {q} needs {m} values, side has {v.size}")
    return float(np.sort(v)[-m])


def compare_on_tail(data, stable: StableParams, alt, portion, side: int = 1,
                    density_mode: str = CONDITIONED, table: StableTable | None = None,
                    **scan) -> LrtResult:
    """Stable law (first model) against a one-sided alternative (second) on one tail.

    ``data`` is the full signed sample; ``side`` = +1 uses the right tail and
    -1 the left tail in absolute value.  ``alt`` is a family name or a TailFit
    whose family is re-fitted by MLE at the portion's bound.  The stable
    log-density is evaluated at the signed values; in "conditioned" mode it is
    divided by the stable probability of exceeding the bound.  Stable
    log-densities below log(tiny) are floored there and counted.
    """
    if side not in (1, -1):
        raise ValueError("side must be +1 or -1")
    if density_mode not in (CONDITIONED, RAW):
        raise ValueError(f"unknown density mode {density_mode!r}")
    family = alt.family if isinstance(alt, TailFit) else str(alt)
    x = np.asarray(data, dtype=float).ravel()
    y = side * x
    pos = y[y > 0]
    bound = portion_bound(pos, portion, family, n_total=x.size, **scan)
    if not bound > 0:
        raise EmptyTail("tail bound must be positive")
    alt_fit = fit_at(pos, bound, family)
    tail = pos[pos >= bound]
    table = table or StableTable(stable)
    log_stable = table.logpdf(side * tail)
    if np.any(np.isnan(log_stable)):
        raise SupportMismatch("stable log-density is undefined on the tail")
    floored = int(np.count_nonzero(log_stable <= LOG_TINY))
    log_stable = np.maximum(log_stable, LOG_TINY)
    if density_mode == CONDITIONED:
        log_exceed = table.logsf(bound) if side > 0 else table.logcdf(-bound)
        log_stable = log_stable - float(log_exceed)
    log_alt = alt_fit.logpdf(tail)
    terms = log_stable - log_alt
    if not np.all(np.isfinite(terms)):
        raise NonFiniteDensity("non-finite log-density on the tail")
    r, s = ratio_sigma(terms)
    p = lrt_p_value(r, s, terms.size)
    return LrtResult(r, s, terms.size, p, verdict(r, p), bound, portion, alt_fit, floored, density_mode)
