"""Command-line front end.

Exit codes: 0 success, 1 data error (one JSON line on stderr), 2 usage error.
Every verb accepts ``--config``, ``--seed`` and ``--threads``; flags override
``STABLEFIT_*`` environment variables, which override the config file.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys

from .cf_estimation import fit
from .config import ENV_PREFIX, load_config
from .errors import DomainError, StableFitError
from .model_comparison import compare_on_tail
from .parseval_distance import EmpiricalCF, distance, gaussian_params, ideal_expectation
from .pipeline import (BENCH_HEADER, LRT_HEADER, SCALING_HEADER, TAIL_HEADER, _row_dict,
                       compute_returns, fmt, full_report, hill_benchmark, load_prices, load_values,
                       portion_label, scaling_study, sniff_header, synthetic_prices, tail_rows, write_csv)
from .sampler import make_rng, sample
from .stable_core import StableParams, StableTable

VERBS = ("fit", "distance", "scaling", "tails", "compare", "simulate", "hill-bench", "report")


def _csv_list(conv):
    def parse(s):
        try:
            return [conv(v) for v in s.split(",") if v.strip()]
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from exc
    return parse


def _portion(v):
    return "xmin" if v.strip().lower() == "xmin" else float(v)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument("--threads", type=int, help="worker threads (output does not depend on it)")

    est = argparse.ArgumentParser(add_help=False)
    est.add_argument("--epsilon", type=float, help="standardization tolerance")
    est.add_argument("--max-iter", type=int, help="standardization iteration cap")
    est.add_argument("--min-fit-size", type=int, help="smallest sample accepted by the fit")

    series = argparse.ArgumentParser(add_help=False)
    series.add_argument("--in", dest="input", required=True,
                        help="CSV with header 'value', or 'timestamp,price' plus --interval")
    series.add_argument("--interval", type=int, default=3600,
                        help="return interval in seconds for price input (default 3600)")

    p = argparse.ArgumentParser(prog="stablefit", description="Stable-law analysis of return series.")
    sub = p.add_subparsers(dest="verb", required=True, metavar="VERB")

    s = sub.add_parser("fit", parents=[common, est, series], help="estimate (alpha, beta, gamma, delta)")

    s = sub.add_parser("distance", parents=[common, est, series],
                       help="Parseval distance to the fitted stable and Gaussian laws")
    s.add_argument("--distance-points", type=int, help="grid size on [-pi, pi]")

    s = sub.add_parser("scaling", parents=[common, est], help="fit and distances across intervals")
    s.add_argument("--in", dest="input", required=True, help="price CSV")
    s.add_argument("--intervals", type=_csv_list(int), help="comma-separated seconds")
    s.add_argument("--out", help="output CSV (default stdout)")

    s = sub.add_parser("tails", parents=[common, est, series], help="power-law and exponential tail fits")
    s.add_argument("--gof-replicates", type=int, help="bootstrap replicates L")
    s.add_argument("--out", help="output CSV (default stdout)")

    s = sub.add_parser("compare", parents=[common, est, series], help="likelihood-ratio tests on tails")
    s.add_argument("--portions", type=_csv_list(_portion), help="e.g. xmin,0.05,0.15")
    s.add_argument("--alternatives", type=_csv_list(str), help="power_law,exponential")
    s.add_argument("--density-mode", choices=("conditioned", "raw"),
                   help="divide the stable density by its tail mass (default) or not")
    s.add_argument("--out", help="output CSV (default stdout)")

    s = sub.add_parser("simulate", parents=[common], help="draw stable variates")
    s.add_argument("--alpha", type=float, required=True)
    s.add_argument("--beta", type=float, default=0.0)
    s.add_argument("--gamma", type=float, default=1.0)
    s.add_argument("--delta", type=float, default=0.0)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--out", required=True, help="output CSV")
    s.add_argument("--as-prices", action="store_true", help="write timestamp,price with these log-returns")
    s.add_argument("--interval", type=int, default=3600, help="price spacing in seconds")

    s = sub.add_parser("hill-bench", parents=[common], help="Hill tail-index benchmark on stable samples")
    s.add_argument("--alphas", type=_csv_list(float), required=True)
    s.add_argument("--sizes", type=_csv_list(int), required=True)
    s.add_argument("--reps", type=int, default=1000)
    s.add_argument("--out", help="output CSV (default stdout)")

    s = sub.add_parser("report", parents=[common, est], help="full analysis bundle")
    s.add_argument("--in", dest="input", required=True, help="price CSV")
    s.add_argument("--out", required=True, help="output directory")
    s.add_argument("--intervals", type=_csv_list(int), help="comma-separated seconds")
    s.add_argument("--detail-intervals", type=_csv_list(int),
                   help="intervals that also get tail, LRT and histogram outputs")
    s.add_argument("--gof-replicates", type=int, help="bootstrap replicates L")
    s.add_argument("--portions", type=_csv_list(_portion), help="e.g. xmin,0.05,0.15")
    s.add_argument("--density-mode", choices=("conditioned", "raw"))
    s.add_argument("--ratio-threshold", type=float, help="distance/ideal ratio that flags a row")
    s.add_argument("--gaussian-alpha-threshold", type=float, help="alpha_hat above which a row is Gaussian")
    p.epilog = f"Environment overrides: {ENV_PREFIX}<FIELD>, e.g. {ENV_PREFIX}GOF_REPLICATES=200."
    return p


_CONFIG_FLAGS = ("seed", "threads", "epsilon", "max_iter", "min_fit_size", "distance_points", "intervals",
                 "detail_intervals", "gof_replicates", "portions", "alternatives", "density_mode",
                 "ratio_threshold", "gaussian_alpha_threshold")


def _config(args):
    overrides = {k: getattr(args, k) for k in _CONFIG_FLAGS if getattr(args, k, None) is not None}
    return load_config(args.config, overrides)


def _series(args, config):
    """Values from a 'value' CSV, or log-returns at --interval from a price CSV."""
    if sniff_header(args.input) == ["value"]:
        return load_values(args.input)
    prices = load_prices(args.input)
    return compute_returns(prices, args.interval, config.align_tolerance).returns


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def _print_json(obj):
    print(json.dumps({k: _jsonable(v) for k, v in obj.items()}, sort_keys=True))


def _out_csv(path, header, rows):
    if path:
        write_csv(path, header, rows)
        return
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(row.get(h)) for h in header])


def cmd_fit(args, config):
    x = _series(args, config)
    res = fit(x, **config.fit_kwargs())
    p = res.params
    _print_json(dict(alpha=p.alpha, beta=p.beta, gamma=p.gamma, delta=p.delta, n=int(x.size),
                     iterations=res.iterations, converged=res.converged,
                     beta_unreliable=res.beta_unreliable,
                     alpha_at_bound=bool(res.regression_diagnostics["alpha_at_bound"])))


def cmd_distance(args, config):
    x = _series(args, config)
    res = fit(x, **config.fit_kwargs())
    z, sp, grid = res.standardize(x), res.standardized_params, config.distance_grid()
    ecf = EmpiricalCF(z)
    d, dg = distance(ecf, sp, grid), distance(ecf, gaussian_params(sp), grid)
    ideal = ideal_expectation(sp, grid, z.size)
    _print_json(dict(stable_distance=d, gaussian_distance=dg, ideal_expectation=ideal,
                     ratio_to_ideal=d / ideal, n=int(z.size), alpha=sp.alpha, beta=sp.beta))


def cmd_scaling(args, config):
    prices = load_prices(args.input)
    study = scaling_study(prices, config.intervals, config)
    _out_csv(args.out, SCALING_HEADER, [_row_dict(prices.symbol, r) for r in study.rows])


def cmd_tails(args, config):
    x = _series(args, config)
    z = fit(x, **config.fit_kwargs()).standardize(x)
    rows = tail_rows("input", args.interval, z, config)
    _out_csv(args.out, TAIL_HEADER, rows["pos"] + rows["neg"])


def cmd_compare(args, config):
    x = _series(args, config)
    res = fit(x, **config.fit_kwargs())
    z, sp = res.standardize(x), res.standardized_params
    table = StableTable(sp)
    rows = []
    for side, sign in (("pos", 1), ("neg", -1)):
        for alt in config.alternatives:
            for portion in config.portions:
                row = dict(symbol="input", interval=args.interval, side=side, alternative=alt,
                           portion=portion_label(portion), density_mode=config.density_mode)
                try:
                    r = compare_on_tail(z, sp, alt, portion, sign, config.density_mode, table,
                                        **config.scan_kwargs())
                    row.update(bound=r.bound, n=r.n, ratio=r.ratio, sigma=r.sigma, p_value=r.p_value,
                               verdict=r.verdict, floored=r.floored, status="ok")
                except StableFitError as exc:
                    row.update(n=0, status=f"failed: {type(exc).__name__}: {exc}")
                rows.append(row)
    _out_csv(args.out, LRT_HEADER, rows)


def cmd_simulate(args, config):
    params = StableParams(args.alpha, args.beta, args.gamma, args.delta)
    if args.n < 1:
        raise DomainError("--n must be >= 1")
    if args.as_prices:
        ps = synthetic_prices(params, args.n + 1, config.seed, interval=args.interval)
        write_csv(args.out, ("timestamp", "price"), zip(ps.timestamps.tolist(), ps.prices.tolist()))
    else:
        x = sample(params, args.n, make_rng(config.seed))
        write_csv(args.out, ("value",), ((v,) for v in x.tolist()))


def cmd_hill_bench(args, config):
    rows = hill_benchmark(args.alphas, args.sizes, args.reps, config.seed, config.threads,
                          config.tail_min_size, config.tail_max_candidates)
    _out_csv(args.out, BENCH_HEADER, rows)


def cmd_report(args, config):
    bundle = full_report(load_prices(args.input), config, args.out)
    _print_json(dict(out_dir=str(bundle.out_dir), files=len(bundle.files)))


COMMANDS = {"fit": cmd_fit, "distance": cmd_distance, "scaling": cmd_scaling, "tails": cmd_tails,
            "compare": cmd_compare, "simulate": cmd_simulate, "hill-bench": cmd_hill_bench,
            "report": cmd_report}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config(args)
        COMMANDS[args.verb](args, config)
    except (StableFitError, OSError, ValueError) as exc:
        msg = {"error": type(exc).__name__, "message": str(exc), "verb": args.verb}
        print(json.dumps(msg), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
