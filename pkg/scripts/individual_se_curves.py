#!/usr/bin/env python3
"""Standard errors of naive and shrunken individual-effect estimates for all
power-passing designs: vs measurements per participant at a fixed participant
total, and vs treatment periods at a further-fixed measurement count."""

import argparse
from pathlib import Path

from nof1design import (
    AXIS_MEASUREMENTS,
    FIXED_RANDOM,
    PowerRequirement,
    RandomEffectsSpec,
    RandomizationScheme,
    ResidualSpec,
    enumerate_feasible_designs,
    individual_se_curve,
)
from nof1design.serialize import CURVE_COLUMNS, csv_text, curve_row


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out")
    parser.add_argument("--participants", type=int, default=32)
    parser.add_argument("--measurements", type=int, default=24,
                        help="fixed K*L for the by-periods panel")
    parser.add_argument("--max-measurements", type=int, default=48)
    args = parser.parse_args()

    residual = ResidualSpec(4.0, "ar1", 0.4)
    random_effects = RandomEffectsSpec(4.0, 1.0, 1.0)
    requirement = PowerRequirement(0.05, 0.2, 1.0)
    scheme = RandomizationScheme("pairwise")

    records = []
    for m in range(2, args.max_measurements + 1):
        records.extend(
            enumerate_feasible_designs(
                args.participants, m, scheme, FIXED_RANDOM, random_effects,
                residual, requirement,
            )
        )

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    rows = []
    for series, points in individual_se_curve(records, AXIS_MEASUREMENTS).items():
        rows.extend(curve_row(p, series) for p in points)
    path = out / f"individual_se_vs_measurements_ij{args.participants}.csv"
    path.write_text(csv_text(CURVE_COLUMNS, rows))
    print(f"wrote {path} ({len(rows)} rows)")

    at_m = [
        r for r in records
        if r.design.measurements_per_participant == args.measurements
    ]
    rows = []
    for series, points in individual_se_curve(at_m, "periods").items():
        rows.extend(curve_row(p, series) for p in points)
    path = out / f"individual_se_vs_periods_kl{args.measurements}.csv"
    path.write_text(csv_text(CURVE_COLUMNS, rows))
    print(f"wrote {path} ({len(rows)} rows)")


if __name__ == "__main__":
    main()
