"""Stable random variates by the Chambers-Mallows-Stuck construction (Weron's form).

Each draw consumes one uniform V on (-pi/2, pi/2) and one unit-mean exponential
W = -log(U), U uniform on (0, 1], from a numpy ``Generator``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .stable_core import StableParams

_HALF_ULP = 2.0 ** -54


@dataclass(frozen=True)
class SamplerConfig:
    params: StableParams
    seed: int
    count: int

    def __post_init__(self):
        if self.count < 1:
            raise DomainError("count must be >= 1")
        if not (0 <= self.seed < 2 ** 64):
            raise DomainError("seed must be a 64-bit unsigned integer")


def make_rng(seed, *key) -> np.random.Generator:
    """PCG64 stream for ``seed``; ``key`` selects an independent child stream.

    Tasks are keyed by index: ``make_rng(master, i)`` is the stream for task i,
    so results do not depend on scheduling order.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def _check(alpha, beta):
    if not (0.0 < alpha <= 2.0) or not (-1.0 <= beta <= 1.0):
        raise DomainError(f"invalid stable parameters alpha={alpha}, beta={beta}")


def _transform(alpha, beta, u_v, u_w):
    """Map uniforms on [0, 1) to S(alpha, beta, 1, 0) draws."""
    v = math.pi * (u_v + _HALF_ULP - 0.5)  # open interval (-pi/2, pi/2)
    w = -np.log1p(-u_w)  # 1 - u in (0, 1]
    if alpha == 1.0:
        if beta == 0.0:
            return np.tan(v)
        hb = math.pi / 2 + beta * v
        return (2 / math.pi) * (hb * np.tan(v) - beta * np.log((math.pi / 2) * w * np.cos(v) / hb))
    if beta == 0.0:
        b_ab, s_ab = 0.0, 1.0
    else:
        t = beta * math.tan(math.pi * alpha / 2)
        b_ab = math.atan(t) / alpha
        s_ab = (1 + t * t) ** (1 / (2 * alpha))
    shifted = alpha * (v + b_ab)
    return (s_ab * np.sin(shifted) / np.cos(v) ** (1 / alpha)
            * (np.cos(v - shifted) / w) ** ((1 - alpha) / alpha))


def sample_standard(alpha: float, beta: float, rng: np.random.Generator) -> float:
    """One draw from S(alpha, beta, 1, 0)."""
    _check(alpha, beta)
    u = rng.random(2)
    return float(_transform(alpha, beta, u[0], u[1]))


def sample_standard_array(alpha, beta, rng, size) -> np.ndarray:
    """``size`` draws; the stream is consumed as (V, W) pairs, as in :func:`sample_standard`."""
    _check(alpha, beta)
    u = rng.random((int(size), 2))
    return _transform(alpha, beta, u[:, 0], u[:, 1])


def scale_location(params: StableParams, x):
    """Map S(alpha, beta, 1, 0) draws to S(alpha, beta, gamma, delta).

    For alpha = 1 the log|k| term of the CF is not scale invariant, so the
    location picks up +(2/pi) beta gamma log(gamma).
    """
    a, b, g, d = params.as_tuple()
    y = g * np.asarray(x) + d
    if a == 1.0 and b != 0.0:
        y = y + (2 / math.pi) * b * g * math.log(g)
    return y


def sample(params: StableParams, size, rng) -> np.ndarray:
    return scale_location(params, sample_standard_array(params.alpha, params.beta, rng, size))


def sample_series(config: SamplerConfig) -> np.ndarray:
    """Deterministic series of ``config.count`` draws for ``config.seed``."""
    return sample(config.params, config.count, make_rng(config.seed))
