"""Levy alpha-stable laws in the 1-parameterization S(alpha, beta, gamma, delta; 1).

The characteristic function is

    phi(k) = exp(i*delta*k - gamma**alpha * |k|**alpha * (1 - i*beta*sgn(k)*omega(k, alpha)))

with omega = tan(pi*alpha/2) for alpha != 1 and omega = -(2/pi) log|k| for alpha = 1.
Densities and distribution functions are obtained by numerical Fourier inversion.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, interpolate, stats

from .errors import DomainError, IntegrationFailure

# |phi(k)| = exp(-(gamma*k)**alpha) drops below this past the truncation point.
CF_FLOOR = 1e-16
DEFAULT_RTOL = 1e-9
DEFAULT_ATOL = 1e-9

_LOG_CF_FLOOR = -math.log(CF_FLOOR)
# Values of (gamma*k)**alpha used as quadrature breakpoints.
_BREAKS = (0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0)
# Number of half-periods of e^{-iku} handled by plain quadrature before
# switching to the Fourier-weighted (QAWO) rule.
_OSC_HALF_PERIODS = 20


@dataclass(frozen=True)
class StableParams:
    alpha: float
    beta: float = 0.0
    gamma: float = 1.0
    delta: float = 0.0

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "delta"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not (0.0 < self.alpha <= 2.0):
            raise DomainError(f"alpha must lie in (0, 2], got {self.alpha}")
        if not (-1.0 <= self.beta <= 1.0):
            raise DomainError(f"beta must lie in [-1, 1], got {self.beta}")
        if not (self.gamma > 0.0 and math.isfinite(self.gamma)):
            raise DomainError(f"gamma must be positive and finite, got {self.gamma}")
        if not math.isfinite(self.delta):
            raise DomainError(f"delta must be finite, got {self.delta}")

    def replace(self, **changes) -> "StableParams":
        fields = dict(alpha=self.alpha, beta=self.beta, gamma=self.gamma, delta=self.delta)
        fields.update(changes)
        return StableParams(**fields)

    def as_tuple(self):
        return (self.alpha, self.beta, self.gamma, self.delta)


@dataclass(frozen=True, eq=False)
class WavenumberGrid:
    """Uniform wavenumber grid plus the Riemann weight ``spacing`` (Delta k).

    ``spacing`` is normally the step between points.  The distance grid is the
    exception: 100 points span [-pi, pi] inclusive (step 2*pi/99) while every
    point carries the weight 2*pi/100.
    """

    points: np.ndarray
    spacing: float

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size < 2:
            raise DomainError("a grid needs at least two points")
        steps = np.diff(pts)
        if np.any(steps <= 0):
            raise DomainError("grid points must be strictly increasing")
        step = steps.mean()
        if np.max(np.abs(steps - step)) > 1e-12 * max(1.0, np.max(np.abs(pts))):
            raise DomainError("grid points must be uniformly spaced")
        if not (self.spacing > 0):
            raise DomainError("grid spacing must be positive")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "spacing", float(self.spacing))

    def __len__(self):
        return self.points.size

    @classmethod
    def regression(cls, k_min=0.2, k_max=1.0, step=0.01) -> "WavenumberGrid":
        n = int(round((k_max - k_min) / step)) + 1
        return cls(np.linspace(k_min, k_max, n), step)

    @classmethod
    def distance(cls, n_points=100) -> "WavenumberGrid":
        pts = np.linspace(-math.pi, math.pi, n_points)
        # mirror so that k and -k are bitwise negatives of each other
        half = n_points // 2
        pts[:half] = -pts[::-1][:half]
        if n_points % 2:
            pts[half] = 0.0
        return cls(pts, 2 * math.pi / n_points)


def _omega(alpha, absk):
    if alpha != 1.0:
        return math.tan(math.pi * alpha / 2)
    with np.errstate(divide="ignore"):
        return np.where(absk > 0, -(2 / math.pi) * np.log(np.where(absk > 0, absk, 1.0)), 0.0)


def cf(params: StableParams, k):
    """Theoretical characteristic function; exact 1 at k = 0."""
    a, b, g, d = params.as_tuple()
    k = np.asarray(k, dtype=float)
    absk = np.abs(k)
    scale_term = (g * absk) ** a
    log_phi = 1j * d * k - scale_term * (1 - 1j * b * np.sign(k) * _omega(a, absk))
    out = np.exp(log_phi)
    out = np.where(k == 0, 1.0 + 0j, out)
    return out[()] if out.ndim == 0 else out


def _phase(params: StableParams):
    """theta(k) with phi(k) e^{-iku} = exp(-(gamma k)^alpha) exp(i(theta(k) - k u)), k > 0."""
    a, b, g, _ = params.as_tuple()
    if b == 0.0:
        return lambda k: 0.0 * k
    if a != 1.0:
        c = b * math.tan(math.pi * a / 2)
        return lambda k: c * (g * k) ** a
    c = -(2 / math.pi) * b * g
    return lambda k: c * k * np.log(np.where(k > 0, k, 1.0))


def truncation_point(params: StableParams) -> float:
    """Wavenumber past which |phi(k)| < CF_FLOOR."""
    return _LOG_CF_FLOOR ** (1 / params.alpha) / params.gamma


def _quad(f, lo, hi, rtol, atol, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        return integrate.quad(f, lo, hi, epsabs=atol * 1e-2, epsrel=rtol, limit=1000, **kw)


def _inversion_integral(params: StableParams, u: float, kind: str, rtol: float, atol: float) -> float:
    """Integral over k in (0, K] of A(k) cos(theta - k u)  (kind='pdf')
    or of A(k) sin(theta - k u) / k  (kind='cdf')."""
    a, _, g, _ = params.as_tuple()
    big_k = truncation_point(params)
    if not math.isfinite(big_k) or big_k > 1e12:
        raise IntegrationFailure(f"CF decays too slowly to invert (alpha={a})")
    amp = lambda k: np.exp(-((g * k) ** a))
    theta = _phase(params)

    k_split = big_k if u == 0 else min(big_k, _OSC_HALF_PERIODS * math.pi / abs(u))
    points = [p for p in (t ** (1 / a) / g for t in _BREAKS) if p < k_split] or None
    if kind == "pdf":
        head = lambda k: amp(k) * np.cos(theta(k) - k * u)
    else:
        head = lambda k: amp(k) * np.sin(theta(k) - k * u) / k
    total, err = _quad(head, 0.0, k_split, rtol, atol, points=points)

    if k_split < big_k:
        # e^{-iku} split into cos/sin weights for the QAWO rule
        if kind == "pdf":
            f_cos = lambda k: amp(k) * np.cos(theta(k))
            f_sin = lambda k: amp(k) * np.sin(theta(k))
        else:
            f_cos = lambda k: amp(k) * np.sin(theta(k)) / k
            f_sin = lambda k: -amp(k) * np.cos(theta(k)) / k
        # decade-wide pieces: the amplitude varies on the scale of k itself
        edges = [k_split]
        while edges[-1] * 10 < big_k:
            edges.append(edges[-1] * 10)
        edges.append(big_k)
        for lo, hi in zip(edges[:-1], edges[1:]):
            v1, e1 = _quad(f_cos, lo, hi, rtol, atol, weight="cos", wvar=u)
            v2, e2 = _quad(f_sin, lo, hi, rtol, atol, weight="sin", wvar=u)
            total += v1 + v2
            err += e1 + e2

    if not math.isfinite(total) or err > max(rtol * abs(total), atol):
        raise IntegrationFailure(
            f"{kind} inversion at u={u:g} for {params} did not converge (error estimate {err:.3g})"
        )
    return total


def _scalar_pdf(params, x, rtol, atol):
    u = float(x) - params.delta
    val = _inversion_integral(params, u, "pdf", rtol, atol * math.pi) / math.pi
    return max(val, 0.0)


def _scalar_cdf(params, x, rtol, atol):
    u = float(x) - params.delta
    if u == 0.0 and params.beta == 0.0:
        return 0.5
    val = 0.5 - _inversion_integral(params, u, "cdf", rtol, atol * math.pi) / math.pi
    return min(max(val, 0.0), 1.0)


def _apply(fn, params, x, rtol, atol):
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        return fn(params, float(arr), rtol, atol)
    out = np.empty(arr.shape)
    for idx, xi in np.ndenumerate(arr):
        out[idx] = fn(params, xi, rtol, atol)
    return out


def pdf(params: StableParams, x, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL):
    """Density by f(x) = (1/pi) int_0^inf Re[e^{-ikx} phi(k)] dk.

    Raises IntegrationFailure when the quadrature error estimate exceeds
    ``max(rtol*|f|, atol)``.
    """
    return _apply(_scalar_pdf, params, x, rtol, atol)


def cdf(params: StableParams, x, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL):
    """Distribution function by the Gil-Pelaez inversion
    F(x) = 1/2 - (1/pi) int_0^inf Im[e^{-ikx} phi(k)] / k dk."""
    return _apply(_scalar_cdf, params, x, rtol, atol)


def tail_asymptote_constant(params: StableParams) -> float:
    """c in P(X > x) ~ c x^-alpha for the standard (gamma = 1) law."""
    a, b = params.alpha, params.beta
    if a >= 2.0:
        raise DomainError("alpha = 2 has no power-law tail")
    return math.gamma(a) * math.sin(math.pi * a / 2) * (1 + b) / math.pi


class StableTable:
    """Interpolated pdf/cdf for bulk evaluation.

    Nodes are uniform in t = asinh((x - delta)/gamma), so they are dense in the
    body and logarithmic in the tails.  Each node is computed with :func:`pdf`
    and :func:`cdf`; between nodes log-pdf, log-cdf and log-survival are
    interpolated by PCHIP, and past the outermost nodes the tails continue as
    power laws with exponents alpha + 1 (density) and alpha (cdf/survival).
    At alpha = 2 the closed-form normal law with variance 2 gamma^2 is used.
    """

    def __init__(self, params: StableParams, lo=None, hi=None, step=0.04, span=1e6,
                 rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL):
        self.params = params
        g, d = params.gamma, params.delta
        self._normal = stats.norm(d, math.sqrt(2) * g) if params.alpha == 2.0 else None
        if self._normal is not None:
            return
        t_lo = -math.asinh(span) if lo is None else math.asinh((lo - d) / g)
        t_hi = math.asinh(span) if hi is None else math.asinh((hi - d) / g)
        t_lo, t_hi = min(t_lo, t_hi), max(t_lo, t_hi)
        n = max(int(math.ceil((t_hi - t_lo) / step)) + 1, 4)
        self._t = np.linspace(t_lo, t_hi, n)
        x = d + g * np.sinh(self._t)
        dens = pdf(params, x, rtol, atol)
        cum = cdf(params, x, rtol, atol)
        tiny = np.finfo(float).tiny
        self._logf = np.log(np.maximum(dens, tiny))
        self._logF = np.log(np.maximum(cum, tiny))
        self._logS = np.log(np.maximum(1.0 - cum, tiny))
        self._i_logf = interpolate.PchipInterpolator(self._t, self._logf)
        self._i_logF = interpolate.PchipInterpolator(self._t, self._logF)
        self._i_logS = interpolate.PchipInterpolator(self._t, self._logS)

    def _to_t(self, x):
        return np.arcsinh((np.asarray(x, dtype=float) - self.params.delta) / self.params.gamma)

    def _eval(self, interp, values, x, tail_power):
        t = self._to_t(x)
        tc = np.clip(t, self._t[0], self._t[-1])
        out = np.asarray(interp(tc), dtype=float)
        # power-law continuation: log|u| ~ t - log 2 for large |t|
        lo, hi = t < self._t[0], t > self._t[-1]
        if np.any(lo):
            out = np.where(lo, values[0] - tail_power * (np.abs(t) - abs(self._t[0])), out)
        if np.any(hi):
            out = np.where(hi, values[-1] - tail_power * (t - self._t[-1]), out)
        return out

    def logpdf(self, x):
        if self._normal is not None:
            return self._normal.logpdf(np.asarray(x, dtype=float))
        return self._eval(self._i_logf, self._logf, x, self.params.alpha + 1)

    def pdf(self, x):
        return np.exp(self.logpdf(x))

    def _log_cdf(self, x):
        if self._normal is not None:
            return self._normal.logcdf(np.asarray(x, dtype=float))
        # left tail of F decays like |x|^-alpha; right end of F saturates at 0
        t = self._to_t(x)
        out = self._eval(self._i_logF, self._logF, x, self.params.alpha)
        return np.where(t > self._t[-1], 0.0, out)

    def _log_sf(self, x):
        if self._normal is not None:
            return self._normal.logsf(np.asarray(x, dtype=float))
        t = self._to_t(x)
        out = self._eval(self._i_logS, self._logS, x, self.params.alpha)
        return np.where(t < self._t[0], 0.0, out)

    def cdf(self, x):
        logF, logS = self._log_cdf(x), self._log_sf(x)
        return np.where(logF < logS, np.exp(logF), -np.expm1(logS))

    def sf(self, x):
        logF, logS = self._log_cdf(x), self._log_sf(x)
        return np.where(logS < logF, np.exp(logS), -np.expm1(logF))

    def logsf(self, x):
        return self._log_sf(x)

    def logcdf(self, x):
        return self._log_cdf(x)
