"""Price ingestion, multi-interval returns, and the full analysis bundle.

Randomness: every stochastic task draws from ``make_rng(seed, *key)`` with a
key built from task indices (interval, side, family, replicate), so results do
not depend on thread count or scheduling.
"""
from __future__ import annotations

import csv
import hashlib
import json
import math
import platform
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .cf_estimation import FitResult, fit
from .config import AnalysisConfig
from .errors import (EmptyFile, NoAlignedPairs, ParseError, SchemaError, StableFitError)
from .model_comparison import compare_on_tail
from .parseval_distance import EmpiricalCF, distance, gaussian_params, ideal_expectation
from .sampler import make_rng, sample
from .stable_core import StableParams, StableTable
from .tail_models import EXPONENTIAL, POWER_LAW, goodness_of_fit, select_xmin, split_tails

SIDES = (("pos", 1), ("neg", -1))


# --------------------------------------------------------------------------- input

@dataclass(frozen=True, eq=False)
class PriceSeries:
    symbol: str
    timestamps: np.ndarray
    prices: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.timestamps, dtype=np.int64)
        p = np.asarray(self.prices, dtype=float)
        if t.shape != p.shape or t.ndim != 1:
            raise SchemaError("timestamps and prices must be 1-d and the same length")
        if t.size and np.any(np.diff(t) <= 0):
            raise SchemaError("timestamps must be strictly increasing")
        if np.any(~(p > 0)) or not np.all(np.isfinite(p)):
            raise SchemaError("prices must be positive and finite")
        object.__setattr__(self, "timestamps", t)
        object.__setattr__(self, "prices", p)

    def __len__(self):
        return int(self.timestamps.size)

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(self.timestamps.tobytes())
        h.update(self.prices.tobytes())
        return h.hexdigest()


@dataclass(frozen=True)
class ReturnSeries:
    symbol: str
    interval: int
    returns: np.ndarray
    gap_count: int
    start_times: np.ndarray = field(default=None, repr=False)

    def __len__(self):
        return int(self.returns.size)


def _read_rows(path):
    try:
        with open(path, encoding="utf-8-sig", newline="") as fh:
            rows = list(csv.reader(fh))
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path}: not UTF-8 text ({exc.reason})") from exc
    rows = [(i + 1, r) for i, r in enumerate(rows) if r and any(c.strip() for c in r)]
    if not rows:
        raise EmptyFile(f"{path}: empty input file")
    return rows


def load_prices(path, symbol: str | None = None) -> PriceSeries:
    """Read a ``timestamp,price`` CSV with line-numbered diagnostics."""
    rows = _read_rows(path)
    header = [c.strip().lower() for c in rows[0][1]]
    if header != ["timestamp", "price"]:
        raise SchemaError(f"{path}: line {rows[0][0]}: header must be 'timestamp,price', got {','.join(header)!r}")
    if len(rows) == 1:
        raise EmptyFile(f"{path}: empty input file (header only)")
    ts, ps = [], []
    prev = None
    for line, r in rows[1:]:
        if len(r) != 2:
            raise ParseError(f"{path}: line {line}: expected 2 fields, got {len(r)}")
        try:
            t = int(r[0].strip())
            p = float(r[1].strip())
        except ValueError as exc:
            raise ParseError(f"{path}: line {line}: {exc}") from exc
        if not (p > 0 and math.isfinite(p)):
            raise SchemaError(f"{path}: line {line}: price must be positive, got {r[1].strip()}")
        if prev is not None and t <= prev:
            raise SchemaError(f"{path}: line {line}: timestamp {t} not after {prev}")
        ts.append(t)
        ps.append(p)
        prev = t
    return PriceSeries(symbol or Path(path).stem, np.array(ts, dtype=np.int64), np.array(ps))


def load_values(path) -> np.ndarray:
    """Read a single-column CSV with header ``value``."""
    rows = _read_rows(path)
    header = [c.strip().lower() for c in rows[0][1]]
    if header != ["value"]:
        raise SchemaError(f"{path}: line {rows[0][0]}: header must be 'value'")
    if len(rows) == 1:
        raise EmptyFile(f"{path}: empty input file (header only)")
    out = np.empty(len(rows) - 1)
    for i, (line, r) in enumerate(rows[1:]):
        try:
            out[i] = float(r[0])
        except (ValueError, IndexError) as exc:
            raise ParseError(f"{path}: line {line}: {exc}") from exc
        if not math.isfinite(out[i]):
            raise ParseError(f"{path}: line {line}: non-finite value")
    return out


def sniff_header(path) -> list[str]:
    return [c.strip().lower() for c in _read_rows(path)[0][1]]


def compute_returns(prices: PriceSeries, interval: int, tolerance: float = 0.01) -> ReturnSeries:
    """Log-returns over consecutive anchors t0, t0 + dt, t0 + 2 dt, ...

    Each anchor takes the observation nearest to it within ``tolerance * dt``.
    A pair with a missing anchor is skipped and counted in ``gap_count``;
    nothing is interpolated.
    """
    interval = int(interval)
    if interval <= 0:
        raise ValueError("interval must be positive")
    t = prices.timestamps
    if t.size < 2:
        raise NoAlignedPairs("need at least two observations")
    n_anchor = int((t[-1] - t[0]) // interval) + 1
    anchors = t[0] + interval * np.arange(n_anchor, dtype=np.int64)
    pos = np.searchsorted(t, anchors)
    left = np.clip(pos - 1, 0, t.size - 1)
    right = np.clip(pos, 0, t.size - 1)
    pick = np.where(np.abs(t[right] - anchors) <= np.abs(t[left] - anchors), right, left)
    ok = np.abs(t[pick] - anchors) <= tolerance * interval
    logp = np.log(prices.prices)
    both = ok[:-1] & ok[1:]
    idx = np.flatnonzero(both)
    if idx.size == 0:
        raise NoAlignedPairs(f"no observation pairs {interval}s apart")
    r = logp[pick[idx + 1]] - logp[pick[idx]]
    return ReturnSeries(prices.symbol, interval, r, int(both.size - idx.size), anchors[idx])


def synthetic_prices(params: StableParams, n: int, seed: int, interval: int = 3600,
                     start: int = 1_500_000_000, price0: float = 100.0, symbol: str = "SYN") -> PriceSeries:
    """n prices whose consecutive log-returns are i.i.d. draws of ``params``."""
    r = sample(params, n - 1, make_rng(seed))
    prices = price0 * np.exp(np.r_[0.0, np.cumsum(r)])
    return PriceSeries(symbol, start + interval * np.arange(n, dtype=np.int64), prices)


# --------------------------------------------------------------------------- output

def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def write_csv(path, header, rows):
    """Rows are dicts keyed by ``header`` (missing keys left blank) or sequences."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            values = [row.get(h) for h in header] if isinstance(row, dict) else row
            w.writerow([fmt(v) for v in values])


def _map(fn, items, threads):
    items = list(items)
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(fn, items))
    return [fn(i) for i in items]


# --------------------------------------------------------------------------- scaling

@dataclass
class ScalingRow:
    interval: int
    n: int = 0
    gap_count: int = 0
    alpha: float = math.nan
    beta: float = math.nan
    gamma: float = math.nan
    delta: float = math.nan
    stable_distance: float = math.nan
    gaussian_distance: float = math.nan
    ideal_expectation: float = math.nan
    ratio: float = math.nan
    iterations: int = 0
    converged: bool = False
    beta_unreliable: bool = False
    alpha_at_bound: bool = False
    flags: tuple = ()
    status: str = "ok"
    fit: FitResult | None = field(default=None, repr=False)
    standardized: np.ndarray | None = field(default=None, repr=False)


@dataclass
class ScalingStudyReport:
    symbol: str
    rows: list

    def ok_rows(self):
        return [r for r in self.rows if r.status == "ok"]

    def row(self, interval):
        return next(r for r in self.rows if r.interval == interval)


def analyze_interval(prices: PriceSeries, interval: int, config: AnalysisConfig) -> ScalingRow:
    """Returns, standardize-and-fit, stable and Gaussian distances for one interval."""
    row = ScalingRow(int(interval))
    try:
        rs = compute_returns(prices, interval, config.align_tolerance)
        row.n, row.gap_count = len(rs), rs.gap_count
        res = fit(rs.returns, **config.fit_kwargs())
    except StableFitError as exc:
        row.status = f"failed: {type(exc).__name__}: {exc}"
        return row
    p, sp = res.params, res.standardized_params
    z = res.standardize(rs.returns)
    grid = config.distance_grid()
    ecf = EmpiricalCF(z)
    row.alpha, row.beta, row.gamma, row.delta = p.alpha, p.beta, p.gamma, p.delta
    row.stable_distance = distance(ecf, sp, grid)
    row.gaussian_distance = distance(ecf, gaussian_params(sp), grid)
    row.ideal_expectation = ideal_expectation(sp, grid, z.size)
    row.ratio = row.stable_distance / row.ideal_expectation if row.ideal_expectation > 0 else math.inf
    row.iterations, row.converged = res.iterations, res.converged
    row.beta_unreliable = res.beta_unreliable
    row.alpha_at_bound = bool(res.regression_diagnostics.get("alpha_at_bound", False))
    flags = []
    if row.ratio > config.ratio_threshold:
        flags.append("high_frequency")
    if row.alpha > config.gaussian_alpha_threshold:
        flags.append("gaussian_regime")
    if not res.converged:
        flags.append("not_converged")
    row.flags = tuple(flags)
    row.fit, row.standardized = res, z
    return row


def scaling_study(prices: PriceSeries, intervals=None, config: AnalysisConfig | None = None) -> ScalingStudyReport:
    config = config or AnalysisConfig()
    intervals = list(config.intervals if intervals is None else intervals)
    if len(intervals) < 2:
        raise ValueError("scaling study needs at least two intervals")
    rows = _map(lambda dt: analyze_interval(prices, dt, config), intervals, config.threads)
    return ScalingStudyReport(prices.symbol, rows)


# --------------------------------------------------------------------------- benchmark

BENCH_HEADER = ("alpha", "n", "replicates", "alpha_hat_mean", "alpha_hat_lo", "alpha_hat_hi",
                "n_tail_mean", "n_tail_lo", "n_tail_hi", "failures")


def hill_benchmark(alphas, sizes, replicates: int, seed: int = 0, threads: int = 1,
                   min_tail: int = 10, max_candidates: int = 500, fold: str = "abs") -> list[dict]:
    """Hill estimates on |S(alpha, 0, 1, 0)| samples with KS-selected x_min.

    ``fold="positive"`` keeps only the positive draws instead of taking
    absolute values.  Replicate r of cell (i, j) uses ``make_rng(seed, i, j, r)``.
    """
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    if fold not in ("abs", "positive"):
        raise ValueError(f"fold must be abs or positive, not {fold!r}")
    rows = []
    for i, a in enumerate(alphas):
        for j, n in enumerate(sizes):
            def one(r, a=a, n=n, i=i, j=j):
                x = sample(StableParams(float(a)), int(n), make_rng(seed, i, j, r))
                x = np.abs(x) if fold == "abs" else x[x > 0]
                try:
                    f = select_xmin(x, POWER_LAW, min_tail=min_tail, max_candidates=max_candidates)
                except StableFitError:
                    return math.nan, math.nan
                return f.parameter, f.n_tail
            res = np.array(_map(one, range(replicates), threads), dtype=float)
            good = res[np.isfinite(res[:, 0])]
            rows.append(dict(
                alpha=float(a), n=int(n), replicates=int(replicates),
                alpha_hat_mean=float(good[:, 0].mean()) if good.size else math.nan,
                alpha_hat_lo=float(np.percentile(good[:, 0], 2.5)) if good.size else math.nan,
                alpha_hat_hi=float(np.percentile(good[:, 0], 97.5)) if good.size else math.nan,
                n_tail_mean=float(good[:, 1].mean()) if good.size else math.nan,
                n_tail_lo=float(np.percentile(good[:, 1], 2.5)) if good.size else math.nan,
                n_tail_hi=float(np.percentile(good[:, 1], 97.5)) if good.size else math.nan,
                failures=int(replicates - good.shape[0])))
    return rows


# --------------------------------------------------------------------------- tails

TAIL_HEADER = ("symbol", "interval", "side", "family", "x_min", "parameter", "std_error", "n_tail",
               "n_side", "ks_distance", "gof_p_value", "gof_replicates", "status")
LRT_HEADER = ("symbol", "interval", "side", "alternative", "portion", "bound", "n", "ratio", "sigma",
              "p_value", "verdict", "floored", "density_mode", "status")


def tail_rows(symbol, interval, z, config: AnalysisConfig, key=()) -> dict:
    """Power-law and exponential fits (with bootstrap p-values) for each sign."""
    out = {"pos": [], "neg": []}
    halves = dict(zip(("pos", "neg"), split_tails(z)))
    for s, (side, _) in enumerate(SIDES):
        for f, family in enumerate((POWER_LAW, EXPONENTIAL)):
            row = dict(symbol=symbol, interval=interval, side=side, family=family,
                       n_side=int(halves[side].size), gof_replicates=config.gof_replicates)
            try:
                tf = select_xmin(halves[side], family, **config.scan_kwargs())
                gof = goodness_of_fit(halves[side], tf, config.gof_replicates,
                                      seed=_task_seed(config.seed, *key, s, f), threads=config.threads,
                                      **config.scan_kwargs())
                row.update(x_min=tf.x_min, parameter=tf.parameter, std_error=tf.std_error,
                           n_tail=tf.n_tail, ks_distance=tf.ks_distance, gof_p_value=gof.p_value,
                           status="ok")
            except StableFitError as exc:
                row.update(n_tail=0, status=f"empty: {type(exc).__name__}: {exc}")
            out[side].append(row)
    return out


def _task_seed(seed, *key) -> int:
    # 64-bit child seed drawn from the keyed stream
    return int(make_rng(seed, *key).integers(0, 2 ** 63))


def portion_label(portion) -> str:
    return "xmin" if portion == "xmin" else repr(float(portion))


def lrt_rows(symbol, interval, z, params: StableParams, table: StableTable, config: AnalysisConfig):
    rows = []
    for side, sign in SIDES:
        for alt in config.alternatives:
            for portion in config.portions:
                row = dict(symbol=symbol, interval=interval, side=side, alternative=alt,
                           portion=portion_label(portion), density_mode=config.density_mode)
                try:
                    r = compare_on_tail(z, params, alt, portion, sign, config.density_mode, table,
                                        **config.scan_kwargs())
                    row.update(bound=r.bound, n=r.n, ratio=r.ratio, sigma=r.sigma, p_value=r.p_value,
                               verdict=r.verdict, floored=r.floored, status="ok")
                except StableFitError as exc:
                    row.update(n=0, status=f"failed: {type(exc).__name__}: {exc}")
                rows.append(row)
    return rows


def histogram_rows(z, params: StableParams, table: StableTable, config: AnalysisConfig):
    lo, hi = config.hist_range
    counts, edges = np.histogram(z, bins=config.hist_bins, range=(lo, hi))
    centers = 0.5 * (edges[1:] + edges[:-1])
    emp = counts / (z.size * np.diff(edges))
    gauss = StableTable(gaussian_params(params)).pdf(centers)
    return [dict(bin_center=c, empirical_density=e, stable_density=s, gaussian_density=g)
            for c, e, s, g in zip(centers, emp, table.pdf(centers), gauss)]


# --------------------------------------------------------------------------- report

FIT_HEADER = ("symbol", "interval", "n", "gap_count", "alpha", "beta", "gamma", "delta", "iterations",
              "converged", "beta_unreliable", "alpha_at_bound", "status")
SCALING_HEADER = ("symbol", "interval", "n", "alpha", "beta", "stable_distance", "gaussian_distance",
                  "ideal_expectation", "ratio", "flags", "status")
HIST_HEADER = ("bin_center", "empirical_density", "stable_density", "gaussian_density")


@dataclass
class ReportBundle:
    out_dir: Path
    files: list
    scaling: ScalingStudyReport
    tails: dict
    lrt: list


def _row_dict(symbol, r: ScalingRow):
    d = {k: getattr(r, k) for k in ("interval", "n", "gap_count", "alpha", "beta", "gamma", "delta",
                                    "iterations", "converged", "beta_unreliable", "alpha_at_bound",
                                    "stable_distance", "gaussian_distance", "ideal_expectation",
                                    "ratio", "status")}
    d["symbol"] = symbol
    d["flags"] = ";".join(r.flags)
    return d


def full_report(prices: PriceSeries, config: AnalysisConfig, out_dir) -> ReportBundle:
    """Write the analysis bundle for one price series and return its contents.

    Standardized returns (the fit's frame, gamma ~ 1 and delta ~ 0) feed the
    distance, tail and comparison stages.  Failed rows are kept and flagged.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    sym = prices.symbol
    study = scaling_study(prices, config.intervals, config) if len(config.intervals) >= 2 else \
        ScalingStudyReport(sym, [analyze_interval(prices, dt, config) for dt in config.intervals])
    rows = [_row_dict(sym, r) for r in study.rows]
    files = []

    def emit(name, header, data):
        write_csv(out / name, header, data)
        files.append(name)

    emit("fit.csv", FIT_HEADER, rows)
    emit("scaling.csv", SCALING_HEADER, rows)
    emit("distance_vs_dt.csv", ("interval", "n", "stable_distance", "gaussian_distance",
                                "ideal_expectation", "ratio"), rows)
    emit("alpha_vs_dt.csv", ("interval", "alpha", "beta", "flags"), rows)

    detail = [(i, r) for i, r in enumerate(study.rows)
              if r.interval in config.detail_intervals and r.status == "ok"]

    def detail_work(item):
        i, r = item
        sp = r.fit.standardized_params
        table = StableTable(sp)
        tails = tail_rows(sym, r.interval, r.standardized, config, key=(i,))
        lrt = lrt_rows(sym, r.interval, r.standardized, sp, table, config)
        hist = histogram_rows(r.standardized, sp, table, config)
        return r.interval, tails, lrt, hist

    results = _map(detail_work, detail, config.threads)
    tails = {"pos": [], "neg": []}
    lrt = []
    for dt, t, l, h in results:
        tails["pos"] += t["pos"]
        tails["neg"] += t["neg"]
        lrt += l
        emit(f"hist_{sym}_{dt}.csv", HIST_HEADER, h)
    if not detail:
        for side in ("pos", "neg"):
            tails[side].append(dict(symbol=sym, side=side, n_tail=0, status="empty: no detail interval"))
    emit("tails_pos.csv", TAIL_HEADER, tails["pos"])
    emit("tails_neg.csv", TAIL_HEADER, tails["neg"])
    emit("lrt.csv", LRT_HEADER, lrt)

    manifest = {
        "config": config.to_dict(),
        "input": {"symbol": sym, "observations": len(prices), "sha256": prices.digest()},
        "seeds": {"master": config.seed,
                  "scheme": "numpy SeedSequence(entropy=master, spawn_key=task indices); "
                            "GOF for (interval i, side s, family f) seeds replicates from "
                            "stream (i, s, f)"},
        "versions": {"stablefit": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
                     "python": platform.python_version()},
        "files": sorted(files),
    }
    with open(out / "manifest.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return ReportBundle(out, sorted(files + ["manifest.json"]), study, tails, lrt)


def bundle_digest(out_dir) -> dict:
    """sha256 of every file in a bundle directory."""
    out = Path(out_dir)
    return {p.name: hashlib.sha256(p.read_bytes()).hexdigest() for p in sorted(out.iterdir()) if p.is_file()}
