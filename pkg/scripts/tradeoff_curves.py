#!/usr/bin/env python3
"""Required total measurements vs measurements-per-participant and vs
participants, for common and random slopes (fixed intercepts), with the
worked-example parameter set.  Writes curve CSVs ready for plotting."""

import argparse
from pathlib import Path

from nof1design import (
    AXIS_MEASUREMENTS,
    AXIS_PARTICIPANTS,
    FIXED_COMMON,
    FIXED_RANDOM,
    PowerRequirement,
    RandomEffectsSpec,
    RandomizationScheme,
    ResidualSpec,
    optimize_total_measurements_curve,
)
from nof1design.serialize import CURVE_COLUMNS, csv_text, curve_row


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument("--max-measurements", type=int, default=24)
    parser.add_argument("--max-participants", type=int, default=48)
    parser.add_argument("--all-feasible", action="store_true",
                        help="skip the optimality filter (y-scale only)")
    args = parser.parse_args()

    residual = ResidualSpec(4.0, "ar1", 0.4)
    random_effects = RandomEffectsSpec(4.0, 1.0, 1.0)
    requirement = PowerRequirement(0.05, 0.2, 1.0)
    scheme = RandomizationScheme("pairwise")

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for axis, grid, name in (
        (AXIS_MEASUREMENTS, range(2, args.max_measurements + 1), "vs_measurements"),
        (AXIS_PARTICIPANTS, range(2, args.max_participants + 1), "vs_participants"),
    ):
        rows = []
        for form, label in ((FIXED_COMMON, "common_slope"), (FIXED_RANDOM, "random_slopes")):
            curve = optimize_total_measurements_curve(
                axis, grid, form, random_effects, residual, requirement, scheme,
                optimize_y_only=args.all_feasible,
            )
            rows.extend(curve_row(p, label) for p in curve)
        path = out / f"total_{name}.csv"
        path.write_text(csv_text(CURVE_COLUMNS, rows))
        print(f"wrote {path} ({len(rows)} rows)")


if __name__ == "__main__":
    main()
