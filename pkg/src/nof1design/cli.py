"""Batch front door: evaluate | search | sweep | sequences.

Reads a JSON config file, applies flag overrides (flags > file > defaults),
runs the requested operation and writes tabular/curve outputs.  Outputs are
byte-identical across repeated runs with the same config.

Exit codes: 0 ok, 2 config/validation error, 3 inestimable design,
4 nothing feasible anywhere.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .designs import BalancedDesign
from .engine import PowerRequirement, evaluate_design
from .errors import EstimabilityError, Nof1DesignError, ParameterError
from .model import ModelForm, RandomEffectsSpec, ResidualSpec
from .search import (
    AXES,
    AXIS_MEASUREMENTS,
    SWEEPABLE_PARAMETERS,
    DesignRecord,
    SearchConstraint,
    enumerate_designs_fixed_product,
    enumerate_feasible_designs,
    parameter_sweep,
)
from .sequences import (
    SCHEME_KINDS,
    RandomizationScheme,
    enumerate_sequences,
    parse_sequence_file,
)
from .serialize import (
    CURVE_COLUMNS,
    DESIGN_COLUMNS,
    csv_text,
    curve_row,
    design_row,
    json_text,
    parameters_echo,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_INESTIMABLE = 3
EXIT_INFEASIBLE = 4

# worked-example defaults; every field can be overridden by config file or flags
DEFAULTS = {
    "model": {"intercepts": "fixed", "slopes": "random"},
    "residual": {"variance": 4.0, "structure": "ar1", "correlation": 0.4},
    "random_effects": {"var_intercept": 4.0, "var_slope": 1.0, "cov_intercept_slope": 1.0},
    "requirement": {"alpha": 0.05, "beta": 0.2, "delta_min": 1.0},
    "scheme": {"kind": "pairwise"},
    "include_individual": True,
}


def _merge(base: dict, override: dict) -> dict:
    out = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


def _load_config(path: str | None) -> dict:
    config = json.loads(json.dumps(DEFAULTS))
    if path:
        p = Path(path)
        if not p.exists():
            raise ParameterError(f"config file not found: {path}", field="config")
        try:
            loaded = json.loads(p.read_text())
        except json.JSONDecodeError as exc:
            raise ParameterError(f"config file is not valid JSON: {exc}", field="config")
        if not isinstance(loaded, dict):
            raise ParameterError("config root must be a JSON object", field="config")
        config = _merge(config, loaded)
    return config


def _apply_flag_overrides(config: dict, args: argparse.Namespace) -> dict:
    flag_map = {
        "alpha": ("requirement", "alpha"),
        "beta": ("requirement", "beta"),
        "delta": ("requirement", "delta_min"),
        "intercepts": ("model", "intercepts"),
        "slopes": ("model", "slopes"),
        "variance": ("residual", "variance"),
        "structure": ("residual", "structure"),
        "correlation": ("residual", "correlation"),
        "var_intercept": ("random_effects", "var_intercept"),
        "var_slope": ("random_effects", "var_slope"),
        "cov_intercept_slope": ("random_effects", "cov_intercept_slope"),
        "scheme": ("scheme", "kind"),
    }
    for flag, (section, key) in flag_map.items():
        value = getattr(args, flag, None)
        if value is not None:
            config.setdefault(section, {})[key] = value
    if getattr(args, "sequence_file", None) is not None:
        config["scheme"]["kind"] = "manual"
        config["scheme"]["sequence_file"] = args.sequence_file
    return config


def _build_scheme(config: dict) -> RandomizationScheme:
    section = config.get("scheme", {})
    kind = section.get("kind", "pairwise")
    if kind not in SCHEME_KINDS:
        raise ParameterError(
            f"scheme kind must be one of {SCHEME_KINDS}, got {kind!r}", field="scheme.kind"
        )
    if kind != "manual":
        return RandomizationScheme(kind)
    if "sequence_file" in section:
        path = Path(section["sequence_file"])
        if not path.exists():
            raise ParameterError(
                f"sequence file not found: {path}", field="scheme.sequence_file"
            )
        seqs = parse_sequence_file(path.read_text())
    elif "sequences" in section:
        seqs = [tuple(s) for s in section["sequences"]]
    else:
        raise ParameterError(
            "manual scheme needs 'sequence_file' or 'sequences'", field="scheme"
        )
    return RandomizationScheme("manual", manual_sequences=tuple(seqs))


def _build_parts(config: dict):
    model = ModelForm(**config["model"])
    residual = ResidualSpec(**config["residual"])
    random_effects = RandomEffectsSpec(**config["random_effects"])
    requirement = PowerRequirement(**config["requirement"])
    scheme = _build_scheme(config)
    return model, random_effects, residual, requirement, scheme


def _write(out_dir: Path, name: str, fmt: str, csv_payload: str, json_payload) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if fmt in ("csv", "both"):
        path = out_dir / f"{name}.csv"
        path.write_text(csv_payload)
        written.append(path)
    if fmt in ("json", "both"):
        path = out_dir / f"{name}.json"
        path.write_text(json_text(json_payload))
        written.append(path)
    return written


def cmd_evaluate(config: dict, args: argparse.Namespace) -> int:
    model, random_effects, residual, requirement, scheme = _build_parts(config)
    section = dict(config.get("evaluate", {}))
    for key in ("k", "l", "j"):
        value = getattr(args, key, None)
        if value is not None:
            section[key] = value
    missing = [key for key in ("k", "l", "j") if key not in section]
    if missing:
        raise ParameterError(
            f"evaluate needs K, L and J (missing {missing})", field="evaluate"
        )
    design = BalancedDesign.from_scheme(
        scheme, int(section["k"]), int(section["j"]), int(section["l"])
    )
    evaluation = evaluate_design(
        design, model, random_effects, residual, requirement,
        include_individual=bool(config.get("include_individual", True)),
    )
    record = DesignRecord(design=design, evaluation=evaluation, optimized=False, solved="none")
    row = design_row(record)
    payload = {
        "parameters": parameters_echo(model, random_effects, residual, requirement, scheme),
        "design": row,
        "per_sequence": {
            "naive_se": list(evaluation.naive_se),
            "shrunken_fixed_se": list(evaluation.shrunken_fixed_se or []) or None,
            "shrunken_random_se": list(evaluation.shrunken_random_se or []) or None,
        },
    }
    _write(Path(args.out), "evaluation", args.format, csv_text(DESIGN_COLUMNS, [row]), payload)
    return EXIT_OK


def _search_records(config: dict, args: argparse.Namespace):
    model, random_effects, residual, requirement, scheme = _build_parts(config)
    section = dict(config.get("search", {}))
    for key in ("fix", "value", "participants", "measurements"):
        value = getattr(args, key, None)
        if value is not None:
            section[key] = value
    if getattr(args, "optimize_y_only", False):
        section["optimize_y_only"] = True
    include_individual = bool(config.get("include_individual", True))

    participants = section.get("participants")
    measurements = section.get("measurements")
    if participants is not None and measurements is not None:
        records = enumerate_feasible_designs(
            int(participants), int(measurements), scheme, model, random_effects,
            residual, requirement, include_individual=include_individual,
        )
        return records, (model, random_effects, residual, requirement, scheme), section
    if "fix" not in section or "value" not in section:
        if participants is not None:
            section["fix"], section["value"] = "participants", participants
        elif measurements is not None:
            section["fix"], section["value"] = AXIS_MEASUREMENTS, measurements
        else:
            raise ParameterError(
                "search needs either fix+value, or participants and/or measurements",
                field="search",
            )
    constraint = SearchConstraint(
        fix=str(section["fix"]),
        value=int(section["value"]),
        model=model,
        random_effects=random_effects,
        residual=residual,
        requirement=requirement,
        max_participants_per_sequence=int(section.get("max_j", 1000)),
        max_per_period=int(section.get("max_l", 1000)),
        max_periods=int(section.get("max_k", 12)),
    )
    records = enumerate_designs_fixed_product(
        constraint, scheme, include_individual=include_individual
    )
    if not section.get("optimize_y_only", False):
        records = [r for r in records if r.optimized]
    return records, (model, random_effects, residual, requirement, scheme), section


def cmd_search(config: dict, args: argparse.Namespace) -> int:
    records, parts, section = _search_records(config, args)
    model, random_effects, residual, requirement, scheme = parts
    rows = [design_row(r) for r in records]
    payload = {
        "parameters": parameters_echo(model, random_effects, residual, requirement, scheme),
        "search": {k: section[k] for k in sorted(section)},
        "designs": rows,
    }
    _write(Path(args.out), "designs", args.format, csv_text(DESIGN_COLUMNS, rows), payload)
    if not rows:
        print("no feasible design anywhere in the searched range", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_sweep(config: dict, args: argparse.Namespace) -> int:
    model, random_effects, residual, requirement, scheme = _build_parts(config)
    section = dict(config.get("sweep", {}))
    if getattr(args, "parameter", None) is not None:
        section["parameter"] = args.parameter
    if getattr(args, "values", None) is not None:
        section["values"] = args.values
    if getattr(args, "axis", None) is not None:
        section["axis"] = args.axis
    if getattr(args, "range", None) is not None:
        section["range"] = args.range
    for key in ("parameter", "values", "range"):
        if key not in section:
            raise ParameterError(f"sweep needs '{key}'", field=f"sweep.{key}")
    parameter = section["parameter"]
    if parameter not in SWEEPABLE_PARAMETERS:
        raise ParameterError(
            f"parameter must be one of {SWEEPABLE_PARAMETERS}, got {parameter!r}",
            field="sweep.parameter",
        )
    if parameter != "structure":
        section["values"] = [float(v) for v in section["values"]]
    lo, hi = (int(v) for v in section["range"])
    axis = section.get("axis", AXIS_MEASUREMENTS)
    if axis not in AXES:
        raise ParameterError(f"axis must be one of {AXES}", field="sweep.axis")
    results = parameter_sweep(
        parameter, section["values"], axis, range(lo, hi + 1),
        model, random_effects, residual, requirement, scheme,
        optimize_y_only=bool(section.get("optimize_y_only", False)),
    )
    rows = []
    for result in results:
        series = f"{parameter}={result.value}"
        rows.extend(curve_row(p, series) for p in result.curve)
    payload = {
        "parameters": parameters_echo(model, random_effects, residual, requirement, scheme),
        "sweep": {
            "parameter": parameter,
            "values": list(section["values"]),
            "axis": axis,
            "range": [lo, hi],
        },
        "curves": rows,
    }
    _write(Path(args.out), "sweep", args.format, csv_text(CURVE_COLUMNS, rows), payload)
    if not rows:
        print("every sweep cell was infeasible", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_sequences(config: dict, args: argparse.Namespace) -> int:
    _, _, _, _, scheme = _build_parts(config)
    section = dict(config.get("sequences", {}))
    if getattr(args, "k", None) is not None:
        section["k"] = args.k
    if "k" not in section:
        if scheme.kind == "manual":
            section["k"] = scheme.manual_length
        else:
            raise ParameterError("sequences needs K", field="sequences.k")
    seqs = enumerate_sequences(scheme, int(section["k"]))
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    # canonical upload format: one sequence per line, comma-separated 0/1
    text = "\n".join(",".join(str(a) for a in s.assignments) for s in seqs) + "\n"
    (out_dir / "sequences.txt").write_text(text)
    rows = [
        {"index": idx, "sequence": ",".join(str(a) for a in s.assignments)}
        for idx, s in enumerate(seqs)
    ]
    payload = {
        "scheme": scheme.kind,
        "k": int(section["k"]),
        "count": len(seqs),
        "sequences": [list(s.assignments) for s in seqs],
    }
    _write(out_dir, "sequences", args.format, csv_text(("index", "sequence"), rows), payload)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nof1design",
        description="Design engine for series of n-of-1 trials",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", default=".", help="output directory (default: .)")
        p.add_argument(
            "--format", choices=("csv", "json", "both"), default="both",
            help="output format (default: both)",
        )
        p.add_argument(
            "--seed", type=int, default=None,
            help="RNG seed (reserved for Monte-Carlo oracle tests; "
            "deterministic commands ignore it)",
        )
        p.add_argument("--alpha", type=float)
        p.add_argument("--beta", type=float)
        p.add_argument("--delta", type=float, help="minimal clinically important effect")
        p.add_argument("--intercepts", choices=("fixed", "random"))
        p.add_argument("--slopes", choices=("common", "random"))
        p.add_argument("--variance", type=float, help="residual variance")
        p.add_argument("--structure", choices=("independent", "exchangeable", "ar1"))
        p.add_argument("--correlation", type=float)
        p.add_argument("--var-intercept", dest="var_intercept", type=float)
        p.add_argument("--var-slope", dest="var_slope", type=float)
        p.add_argument(
            "--cov-intercept-slope", dest="cov_intercept_slope", type=float
        )
        p.add_argument("--scheme", choices=SCHEME_KINDS)
        p.add_argument(
            "--sequence-file", dest="sequence_file",
            help="manual sequences file (switches scheme to manual)",
        )

    p_eval = sub.add_parser("evaluate", help="evaluate one balanced design")
    add_common(p_eval)
    p_eval.add_argument("--k", type=int, help="periods per sequence")
    p_eval.add_argument("--l", type=int, help="measurements per period")
    p_eval.add_argument("--j", type=int, help="participants per sequence")

    p_search = sub.add_parser("search", help="search designs under a fixed product")
    add_common(p_search)
    p_search.add_argument("--fix", choices=AXES)
    p_search.add_argument("--value", type=int)
    p_search.add_argument(
        "--participants", type=int, help="fix total participants I*J"
    )
    p_search.add_argument(
        "--measurements", type=int, help="fix measurements per participant K*L"
    )
    p_search.add_argument(
        "--optimize-y-only", dest="optimize_y_only", action="store_true",
        help="keep all feasible designs (skip the optimality filter)",
    )

    p_sweep = sub.add_parser("sweep", help="parameter sweep over trade-off curves")
    add_common(p_sweep)
    p_sweep.add_argument("--parameter", choices=SWEEPABLE_PARAMETERS)
    p_sweep.add_argument("--values", type=str, nargs="+")
    p_sweep.add_argument("--axis", choices=AXES)
    p_sweep.add_argument("--range", type=int, nargs=2, metavar=("LO", "HI"))

    p_seq = sub.add_parser("sequences", help="enumerate sequences for a scheme")
    add_common(p_seq)
    p_seq.add_argument("--k", type=int, help="periods per sequence")

    return parser


COMMANDS = {
    "evaluate": cmd_evaluate,
    "search": cmd_search,
    "sweep": cmd_sweep,
    "sequences": cmd_sequences,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config(args.config)
        config = _apply_flag_overrides(config, args)
        return COMMANDS[args.command](config, args)
    except ParameterError as exc:
        field = f" (field: {exc.field})" if exc.field else ""
        print(f"validation error: {exc}{field}", file=sys.stderr)
        return EXIT_VALIDATION
    except EstimabilityError as exc:
        print(f"inestimable: {exc}", file=sys.stderr)
        return EXIT_INESTIMABLE
    except Nof1DesignError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (TypeError, ValueError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
