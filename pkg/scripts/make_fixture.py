"""Regenerate the bundled hourly price fixture.

Two years of hourly prices whose 1h log-returns are i.i.d. S(1.4, 0, 0.005, 0).
"""
import argparse
from pathlib import Path

from stablefit.pipeline import synthetic_prices, write_csv
from stablefit.stable_core import StableParams

DEFAULT_OUT = Path(__file__).resolve().parents[1] / "tests" / "data" / "stable_hourly.csv"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(DEFAULT_OUT))
    ap.add_argument("--rows", type=int, default=17520)
    ap.add_argument("--seed", type=int, default=20180101)
    args = ap.parse_args()
    ps = synthetic_prices(StableParams(1.4, 0.0, 0.005, 0.0), args.rows, args.seed, symbol="STABLE")
    write_csv(args.out, ("timestamp", "price"), zip(ps.timestamps.tolist(), ps.prices.tolist()))
    print(f"wrote {args.rows} rows to {args.out}")


if __name__ == "__main__":
    main()
