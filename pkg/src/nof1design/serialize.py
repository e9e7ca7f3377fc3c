"""Row/file serialization shared by the CLI and the HTTP service.

CSV carries 6 significant digits; JSON carries full double precision.  All
writers are deterministic: fixed column order, LF newlines, no timestamps.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Iterable

from .engine import Band, PowerRequirement
from .model import ModelForm, RandomEffectsSpec, ResidualSpec
from .search import CurvePoint, DesignRecord
from .sequences import RandomizationScheme

DESIGN_COLUMNS = (
    "I", "J", "K", "L", "total", "se_pop", "power",
    "naive_min", "naive_mean", "naive_max", "shrunk_fixed", "shrunk_random",
)

CURVE_COLUMNS = ("x", "series", "y_min", "y_mean", "y_max")


def design_row(record: DesignRecord) -> dict:
    """Design-table row (documented schema) with full-precision values."""
    design, ev = record.design, record.evaluation
    i, j, k, n_per_period = design.ijkl()
    naive = ev.naive_band

    def band_mean(band: Band | None):
        return band.mean if band is not None else None

    return {
        "I": i,
        "J": j,
        "K": k,
        "L": n_per_period,
        "total": design.total_measurements,
        "se_pop": ev.se_population,
        "power": ev.power,
        "naive_min": naive.min if naive else None,
        "naive_mean": naive.mean if naive else None,
        "naive_max": naive.max if naive else None,
        "shrunk_fixed": band_mean(ev.shrunken_fixed_band),
        "shrunk_random": band_mean(ev.shrunken_random_band),
    }


def curve_row(point: CurvePoint, series: str) -> dict:
    return {
        "x": point.x,
        "series": series,
        "y_min": point.y_min,
        "y_mean": point.y_mean,
        "y_max": point.y_max,
    }


def parameters_echo(
    model: ModelForm,
    random_effects: RandomEffectsSpec,
    residual: ResidualSpec,
    requirement: PowerRequirement,
    scheme: RandomizationScheme,
) -> dict:
    """Resolved parameter set, echoed into every output."""
    return {
        "model": {"intercepts": model.intercepts, "slopes": model.slopes},
        "residual": {
            "variance": residual.variance,
            "structure": residual.structure,
            "correlation": residual.correlation,
        },
        "random_effects": {
            "var_intercept": random_effects.var_intercept,
            "var_slope": random_effects.var_slope,
            "cov_intercept_slope": random_effects.cov_intercept_slope,
        },
        "requirement": {
            "alpha": requirement.alpha,
            "beta": requirement.beta,
            "delta_min": requirement.delta_min,
        },
        "scheme": {
            "kind": scheme.kind,
            **(
                {"sequences": [list(s.assignments) for s in scheme.manual_sequences]}
                if scheme.manual_sequences
                else {}
            ),
        },
    }


def csv_value(v) -> str:
    """6 significant digits for floats, empty string for missing."""
    if v is None:
        return ""
    if isinstance(v, float):
        return format(v, ".6g")
    return str(v)


def csv_text(columns: Iterable[str], rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    columns = list(columns)
    writer.writerow(columns)
    for row in rows:
        writer.writerow([csv_value(row.get(c)) for c in columns])
    return buf.getvalue()


def json_text(payload) -> str:
    return json.dumps(payload, indent=2, allow_nan=False) + "\n"
