#!/usr/bin/env python3
"""Sensitivity sweeps over type I/II errors, residual parameters, random-effect
variances and the minimal detectable effect, one CSV per swept parameter."""

import argparse
from pathlib import Path

from nof1design import (
    AXIS_MEASUREMENTS,
    FIXED_COMMON,
    FIXED_RANDOM,
    RANDOM_RANDOM,
    PowerRequirement,
    RandomEffectsSpec,
    RandomizationScheme,
    ResidualSpec,
    parameter_sweep,
)
from nof1design.serialize import CURVE_COLUMNS, csv_text, curve_row

SWEEPS = {
    "alpha": ([0.01, 0.05, 0.1], (FIXED_COMMON, FIXED_RANDOM)),
    "beta": ([0.1, 0.2, 0.3], (FIXED_COMMON, FIXED_RANDOM)),
    "delta_min": ([0.5, 1.0, 2.0], (FIXED_COMMON, FIXED_RANDOM)),
    "sigma2": ([2.0, 4.0, 8.0], (FIXED_COMMON, FIXED_RANDOM)),
    "rho": ([0.0, 0.2, 0.4, 0.6], (FIXED_COMMON, FIXED_RANDOM)),
    "structure": (["independent", "exchangeable", "ar1"], (FIXED_COMMON, FIXED_RANDOM)),
    "var_slope": ([0.5, 1.0, 2.0], (FIXED_RANDOM,)),
    "var_intercept": ([0.0, 2.0, 4.0, 8.0], (RANDOM_RANDOM,)),
    "cov_intercept_slope": ([-1.0, 0.0, 1.0], (RANDOM_RANDOM,)),
}


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out")
    parser.add_argument("--range", type=int, nargs=2, default=(2, 24))
    parser.add_argument("--parameters", nargs="+", choices=sorted(SWEEPS),
                        default=sorted(SWEEPS))
    args = parser.parse_args()

    residual = ResidualSpec(4.0, "ar1", 0.4)
    # covariance at 0 keeps var_intercept=0 inside the PSD domain
    random_effects = RandomEffectsSpec(4.0, 1.0, 0.0)
    requirement = PowerRequirement(0.05, 0.2, 1.0)
    scheme = RandomizationScheme("pairwise")
    lo, hi = args.range

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for parameter in args.parameters:
        values, forms = SWEEPS[parameter]
        rows = []
        for form in forms:
            results = parameter_sweep(
                parameter, values, AXIS_MEASUREMENTS, range(lo, hi + 1),
                form, random_effects, residual, requirement, scheme,
            )
            for result in results:
                series = f"{form.label}:{parameter}={result.value}"
                rows.extend(curve_row(p, series) for p in result.curve)
        path = out / f"sweep_{parameter}.csv"
        path.write_text(csv_text(CURVE_COLUMNS, rows))
        print(f"wrote {path} ({len(rows)} rows)")


if __name__ == "__main__":
    main()
