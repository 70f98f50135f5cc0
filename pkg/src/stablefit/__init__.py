"""Lévy stable distributions for return series: fitting, CF distance, tails, model comparison."""
from .stable_core import StableParams, StableTable, WavenumberGrid, cf, cdf, pdf
from .sampler import SamplerConfig, make_rng, sample, sample_series, sample_standard
from .cf_estimation import EmpiricalCF, FitResult, empirical_cf, fit

__version__ = "0.1.0"
