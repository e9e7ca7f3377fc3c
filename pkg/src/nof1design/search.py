"""Two-step design search over balanced series of n-of-1 trials.

Step one fixes either the measurements per participant (K*L) or the number of
participants (I*J) and solves the remaining integer component against the
power requirement; step two attaches individual-effect standard errors so a
design can be finalized against precision requirements.

A solver result is *optimized* when neither free component can be reduced:
the solved component is minimal by construction and the record is flagged
optimized iff decrementing the other one (J when L was solved, L when J was
solved; going below 1 counts as failure) breaks the power requirement.  The
trade-off curves keep only optimized rows unless ``optimize_y_only`` is set,
which mirrors the explorer option of presenting every feasible design in the
x-range, optimized on the y scale alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence as SequenceOf

import numpy as np

from .designs import BalancedDesign
from .engine import (
    DesignEvaluation,
    PowerRequirement,
    evaluate_design,
    power,
    sequence_blocks,
    variance_from_blocks,
)
from .errors import EstimabilityError, ParameterError
from .model import ModelForm, RandomEffectsSpec, ResidualSpec, Sequence
from .sequences import (
    ALTERNATING,
    EVEN_K_SCHEMES,
    MANUAL,
    RandomizationScheme,
    count_sequences,
    enumerate_sequences,
)

AXIS_MEASUREMENTS = "measurements_per_participant"
AXIS_PARTICIPANTS = "participants"
AXES = (AXIS_MEASUREMENTS, AXIS_PARTICIPANTS)

SWEEPABLE_PARAMETERS = (
    "alpha",
    "beta",
    "delta_min",
    "sigma2",
    "rho",
    "structure",
    "var_slope",
    "var_intercept",
    "cov_intercept_slope",
)


@dataclass(frozen=True)
class SearchConstraint:
    """One fixed product plus the model/power context for the integer search.

    ``max_periods`` only binds where the scheme leaves K unbounded under the
    fixed product (alternating under fixed participants); other schemes are
    self-bounding because their sequence count grows with K.
    """

    fix: str
    value: int
    model: ModelForm
    random_effects: RandomEffectsSpec
    residual: ResidualSpec
    requirement: PowerRequirement
    max_participants_per_sequence: int = 1000
    max_per_period: int = 1000
    max_periods: int = 12
    max_sequences: int = 4096

    def __post_init__(self):
        if self.fix not in AXES:
            raise ParameterError(
                f"fix must be one of {AXES}, got {self.fix!r}", field="fix"
            )
        if self.value < 1:
            raise ParameterError(f"fixed value must be >= 1, got {self.value}", field="value")
        for name in (
            "max_participants_per_sequence",
            "max_per_period",
            "max_periods",
            "max_sequences",
        ):
            if getattr(self, name) < 1:
                raise ParameterError(f"{name} must be >= 1", field=name)


@dataclass(frozen=True)
class DesignRecord:
    """A solved design plus its evaluation and optimality flag."""

    design: BalancedDesign
    evaluation: DesignEvaluation
    optimized: bool
    solved: str  # which component the solver determined: "J" or "L"


@dataclass(frozen=True)
class CurvePoint:
    x: int
    y_min: float
    y_mean: float
    y_max: float
    records: tuple[DesignRecord, ...] = field(default=(), repr=False)


def _variance_at(
    sequences: SequenceOf[Sequence],
    n_per_period: int,
    form: ModelForm,
    random_effects: RandomEffectsSpec,
    residual: ResidualSpec,
    n_participants_per_sequence: int,
) -> float:
    blocks = [
        sequence_blocks(s, n_per_period, form, random_effects, residual)
        for s in sequences
    ]
    return variance_from_blocks(
        ((b, n_participants_per_sequence) for b in blocks), form
    )


def _passes(
    sequences: SequenceOf[Sequence],
    n_per_period: int,
    form: ModelForm,
    random_effects: RandomEffectsSpec,
    residual: ResidualSpec,
    n_participants_per_sequence: int,
    requirement: PowerRequirement,
) -> bool:
    """Power check; estimability does not depend on J or L, so an
    EstimabilityError here propagates (the whole combo is inestimable)."""
    var = _variance_at(
        sequences, n_per_period, form, random_effects, residual,
        n_participants_per_sequence,
    )
    return power(float(np.sqrt(var)), requirement) >= requirement.target_power


def solve_min_participants(
    scheme: RandomizationScheme,
    n_periods: int,
    n_per_period: int,
    form: ModelForm,
    random_effects: RandomEffectsSpec,
    residual: ResidualSpec,
    requirement: PowerRequirement,
    max_participants_per_sequence: int = 1000,
    strategy: str = "linear",
) -> int | None:
    """Smallest J per sequence meeting the power requirement, or None.

    The information matrix scales linearly in J, so the variance at J is
    exactly (variance at 1)/J and the power objective is monotone; linear
    scan and binary search must agree.
    """
    sequences = enumerate_sequences(scheme, n_periods)
    var1 = _variance_at(
        sequences, n_per_period, form, random_effects, residual, 1
    )
    target = requirement.target_power

    def passes(j: int) -> bool:
        return power(float(np.sqrt(var1 / j)), requirement) >= target

    if strategy == "linear":
        for j in range(1, max_participants_per_sequence + 1):
            if passes(j):
                return j
        return None
    if strategy != "binary":
        raise ParameterError(f"unknown strategy {strategy!r}", field="strategy")
    lo, hi = 1, max_participants_per_sequence
    if not passes(hi):
        return None
    while lo < hi:
        mid = (lo + hi) // 2
        if passes(mid):
            hi = mid
        else:
            lo = mid + 1
    return lo


def solve_min_measurements(
    scheme: RandomizationScheme,
    n_periods: int,
    n_participants_per_sequence: int,
    form: ModelForm,
    random_effects: RandomEffectsSpec,
    residual: ResidualSpec,
    requirement: PowerRequirement,
    max_per_period: int = 1000,
    strategy: str = "linear",
) -> int | None:
    """Smallest L per period meeting the power requirement, or None.

    Random-slope models have a variance floor of var_slope/(I*J) that no
    amount of within-participant measurement removes; the analytic floor
    check returns infeasible immediately when even that floor fails.
    """
    sequences = enumerate_sequences(scheme, n_periods)
    n_total = len(sequences) * n_participants_per_sequence
    if form.random_slopes and random_effects.var_slope > 0:
        floor_se = float(np.sqrt(random_effects.var_slope / n_total))
        if power(floor_se, requirement) < requirement.target_power:
            return None

    def passes(n_per_period: int) -> bool:
        return _passes(
            sequences, n_per_period, form, random_effects, residual,
            n_participants_per_sequence, requirement,
        )

    if strategy == "linear":
        for n_per_period in range(1, max_per_period + 1):
            if passes(n_per_period):
                return n_per_period
        return None
    if strategy != "binary":
        raise ParameterError(f"unknown strategy {strategy!r}", field="strategy")
    lo, hi = 1, max_per_period
    if not passes(hi):
        return None
    while lo < hi:
        mid = (lo + hi) // 2
        if passes(mid):
            hi = mid
        else:
            lo = mid + 1
    return lo


def _admissible_period_divisors(
    scheme: RandomizationScheme, measurements: int
) -> list[int]:
    """K values compatible with the scheme whose product with some L gives the
    fixed per-participant measurement count."""
    divisors = [k for k in range(1, measurements + 1) if measurements % k == 0]
    if scheme.kind == MANUAL:
        k = scheme.manual_length
        return [k] if k in divisors else []
    if scheme.kind in EVEN_K_SCHEMES:
        return [k for k in divisors if k % 2 == 0]
    return divisors


def _admissible_periods_for_participants(
    scheme: RandomizationScheme, participants: int, max_periods: int
) -> list[int]:
    """K values whose sequence count divides the fixed participant total."""
    if scheme.kind == MANUAL:
        return [scheme.manual_length]
    ks = []
    k = 1
    while True:
        if scheme.kind in EVEN_K_SCHEMES and k % 2 == 1:
            k += 1
            continue
        count = count_sequences(scheme, k)
        if count > participants:
            break
        ks.append(k)
        k += 1
        # alternating keeps I=2 forever; cap its K explicitly
        if scheme.kind == ALTERNATING and k > max_periods:
            break
        if k > max(2 * max_periods, 64):  # safety net; other schemes self-bound
            break
    return ks


def _record(
    scheme,
    sequences,
    n_periods,
    j,
    n_per_period,
    constraint: SearchConstraint,
    solved: str,
    include_individual: bool,
) -> DesignRecord:
    design = BalancedDesign(
        sequences=tuple(sequences),
        n_participants_per_sequence=j,
        n_per_period=n_per_period,
        scheme=scheme,
    )
    evaluation = evaluate_design(
        design,
        constraint.model,
        constraint.random_effects,
        constraint.residual,
        constraint.requirement,
        include_individual=include_individual,
    )
    if solved == "J":
        slack_free = n_per_period == 1 or not _passes(
            sequences, n_per_period - 1, constraint.model, constraint.random_effects,
            constraint.residual, j, constraint.requirement,
        )
    else:
        slack_free = j == 1 or not _passes(
            sequences, n_per_period, constraint.model, constraint.random_effects,
            constraint.residual, j - 1, constraint.requirement,
        )
    return DesignRecord(
        design=design, evaluation=evaluation, optimized=slack_free, solved=solved
    )


def enumerate_designs_fixed_product(
    constraint: SearchConstraint,
    scheme: RandomizationScheme,
    include_individual: bool = True,
) -> list[DesignRecord]:
    """All solver-minimal designs at the fixed product.

    Fixed measurements M: every factorization K*L = M with K admissible, I
    from the scheme, minimal J solved.  Fixed participants P: every admissible
    K whose sequence count I divides P, J = P/I, minimal L solved.  Empty
    output is a legal result (nothing feasible), not an error.
    """
    records: list[DesignRecord] = []
    if constraint.fix == AXIS_MEASUREMENTS:
        for k in _admissible_period_divisors(scheme, constraint.value):
            # combos beyond the enumeration cap are manual-upload territory
            if count_sequences(scheme, k) > constraint.max_sequences:
                continue
            n_per_period = constraint.value // k
            sequences = enumerate_sequences(scheme, k)
            try:
                j = solve_min_participants(
                    scheme, k, n_per_period, constraint.model, constraint.random_effects,
                    constraint.residual, constraint.requirement,
                    constraint.max_participants_per_sequence,
                )
            except EstimabilityError:
                # e.g. unrestricted K=1 under fixed intercepts: no combo can
                # ever pass, so it simply yields no row
                continue
            if j is None:
                continue
            records.append(
                _record(
                    scheme, sequences, k, j, n_per_period, constraint, "J",
                    include_individual,
                )
            )
    else:
        for k in _admissible_periods_for_participants(
            scheme, constraint.value, constraint.max_periods
        ):
            count = count_sequences(scheme, k)
            if count > constraint.value or constraint.value % count:
                continue
            if count > constraint.max_sequences:
                continue
            j = constraint.value // count
            sequences = enumerate_sequences(scheme, k)
            try:
                n_per_period = solve_min_measurements(
                    scheme, k, j, constraint.model, constraint.random_effects,
                    constraint.residual, constraint.requirement, constraint.max_per_period,
                )
            except EstimabilityError:
                continue
            if n_per_period is None:
                continue
            records.append(
                _record(
                    scheme, sequences, k, j, n_per_period, constraint, "L",
                    include_individual,
                )
            )
    return records


def enumerate_feasible_designs(
    participants: int,
    measurements: int,
    scheme: RandomizationScheme,
    model: ModelForm,
    random_effects: RandomEffectsSpec,
    residual: ResidualSpec,
    requirement: PowerRequirement,
    include_individual: bool = True,
    max_sequences: int = 4096,
) -> list[DesignRecord]:
    """Drill-down listing with both products fixed: every (I,J,K,L) with
    I*J = participants and K*L = measurements that meets the power target."""
    if participants < 1 or measurements < 1:
        raise ParameterError("fixed products must be >= 1", field="value")
    records = []
    for k in _admissible_period_divisors(scheme, measurements):
        count = count_sequences(scheme, k)
        if count > participants or participants % count:
            continue
        if count > max_sequences:
            continue
        j = participants // count
        n_per_period = measurements // k
        sequences = enumerate_sequences(scheme, k)
        try:
            if not _passes(
                sequences, n_per_period, model, random_effects, residual, j, requirement
            ):
                continue
        except EstimabilityError:
            continue
        design = BalancedDesign(
            sequences=tuple(sequences),
            n_participants_per_sequence=j,
            n_per_period=n_per_period,
            scheme=scheme,
        )
        evaluation = evaluate_design(
            design, model, random_effects, residual, requirement,
            include_individual=include_individual,
        )
        j_tight = j == 1 or not _passes(
            sequences, n_per_period, model, random_effects, residual, j - 1, requirement
        )
        l_tight = n_per_period == 1 or not _passes(
            sequences, n_per_period - 1, model, random_effects, residual, j, requirement
        )
        records.append(
            DesignRecord(
                design=design,
                evaluation=evaluation,
                optimized=j_tight and l_tight,
                solved="none",
            )
        )
    return records


def optimize_total_measurements_curve(
    axis: str,
    x_values: Iterable[int],
    model: ModelForm,
    random_effects: RandomEffectsSpec,
    residual: ResidualSpec,
    requirement: PowerRequirement,
    scheme: RandomizationScheme,
    optimize_y_only: bool = False,
    include_individual: bool = False,
    max_participants_per_sequence: int = 1000,
    max_per_period: int = 1000,
    max_periods: int = 12,
) -> list[CurvePoint]:
    """Required total measurements (I*J*K*L) versus the chosen axis.

    Each x aggregates the distinct combinations that share the product; the
    band is their min/max and the dot the average.  Infeasible x values are
    gaps, not errors.
    """
    if axis not in AXES:
        raise ParameterError(f"axis must be one of {AXES}, got {axis!r}", field="axis")
    points = []
    for x in x_values:
        constraint = SearchConstraint(
            fix=axis,
            value=x,
            model=model,
            random_effects=random_effects,
            residual=residual,
            requirement=requirement,
            max_participants_per_sequence=max_participants_per_sequence,
            max_per_period=max_per_period,
            max_periods=max_periods,
        )
        records = enumerate_designs_fixed_product(
            constraint, scheme, include_individual=include_individual
        )
        if not optimize_y_only:
            records = [r for r in records if r.optimized]
        if not records:
            continue
        totals = [r.design.total_measurements for r in records]
        points.append(
            CurvePoint(
                x=x,
                y_min=float(min(totals)),
                y_mean=float(np.mean(totals)),
                y_max=float(max(totals)),
                records=tuple(records),
            )
        )
    return points


INDIVIDUAL_SERIES = ("naive", "shrunken_fixed", "shrunken_random")

GROUPINGS = (AXIS_MEASUREMENTS, "periods", AXIS_PARTICIPANTS)


def individual_se_curve(
    records: SequenceOf[DesignRecord],
    grouping: str = AXIS_MEASUREMENTS,
) -> dict[str, list[CurvePoint]]:
    """Aggregate per-design individual-effect SE bands along an axis.

    Grouping by measurements per participant pools the (K,L) combinations at
    each product; grouping by periods pools sequences within each K (the
    participants grouping serves the swapped design option).  Bands take the
    min of mins / max of maxes and the dot averages the per-design means.
    """
    if grouping not in GROUPINGS:
        raise ParameterError(
            f"grouping must be one of {GROUPINGS}, got {grouping!r}",
            field="grouping",
        )
    if not records:
        raise ParameterError("individual_se_curve needs at least one design", field="designs")

    def x_of(record: DesignRecord) -> int:
        if grouping == AXIS_MEASUREMENTS:
            return record.design.measurements_per_participant
        if grouping == "periods":
            return record.design.n_periods
        return record.design.n_participants

    def band_of(record: DesignRecord, series: str):
        return {
            "naive": record.evaluation.naive_band,
            "shrunken_fixed": record.evaluation.shrunken_fixed_band,
            "shrunken_random": record.evaluation.shrunken_random_band,
        }[series]

    curves: dict[str, list[CurvePoint]] = {}
    xs = sorted({x_of(r) for r in records})
    for series in INDIVIDUAL_SERIES:
        points = []
        for x in xs:
            group = [r for r in records if x_of(r) == x]
            bands = [band_of(r, series) for r in group]
            bands = [b for b in bands if b is not None]
            if not bands:
                continue
            points.append(
                CurvePoint(
                    x=x,
                    y_min=float(min(b.min for b in bands)),
                    y_mean=float(np.mean([b.mean for b in bands])),
                    y_max=float(max(b.max for b in bands)),
                    records=tuple(group),
                )
            )
        if points:
            curves[series] = points
    return curves


@dataclass(frozen=True)
class SweepResult:
    parameter: str
    value: object
    curve: tuple[CurvePoint, ...]


def _apply_parameter(
    parameter: str,
    value,
    model: ModelForm,
    random_effects: RandomEffectsSpec,
    residual: ResidualSpec,
    requirement: PowerRequirement,
):
    if parameter == "alpha":
        return model, random_effects, residual, replace(requirement, alpha=value)
    if parameter == "beta":
        return model, random_effects, residual, replace(requirement, beta=value)
    if parameter == "delta_min":
        return model, random_effects, residual, replace(requirement, delta_min=value)
    if parameter == "sigma2":
        return model, random_effects, replace(residual, variance=value), requirement
    if parameter == "rho":
        return model, random_effects, replace(residual, correlation=value), requirement
    if parameter == "structure":
        return model, random_effects, replace(residual, structure=value), requirement
    if parameter == "var_slope":
        return model, replace(random_effects, var_slope=value), residual, requirement
    if parameter == "var_intercept":
        return model, replace(random_effects, var_intercept=value), residual, requirement
    if parameter == "cov_intercept_slope":
        return (
            model,
            replace(random_effects, cov_intercept_slope=value),
            residual,
            requirement,
        )
    raise ParameterError(
        f"parameter must be one of {SWEEPABLE_PARAMETERS}, got {parameter!r}",
        field="parameter",
    )


def parameter_sweep(
    parameter: str,
    values: SequenceOf,
    axis: str,
    x_values: Iterable[int],
    model: ModelForm,
    random_effects: RandomEffectsSpec,
    residual: ResidualSpec,
    requirement: PowerRequirement,
    scheme: RandomizationScheme,
    optimize_y_only: bool = False,
    **bounds,
) -> list[SweepResult]:
    """Re-run the trade-off curve once per parameter value."""
    x_values = list(x_values)
    results = []
    for value in values:
        m, re_, res, req = _apply_parameter(
            parameter, value, model, random_effects, residual, requirement
        )
        curve = optimize_total_measurements_curve(
            axis, x_values, m, re_, res, req, scheme,
            optimize_y_only=optimize_y_only, **bounds,
        )
        results.append(SweepResult(parameter=parameter, value=value, curve=tuple(curve)))
    return results
