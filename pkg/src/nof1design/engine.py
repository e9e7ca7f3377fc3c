"""Design-stage standard errors and power under known variance components.

Population-average treatment effect: the GLS estimator's variance is

    Var(d) = C ( sum_ij X_ij' Sigma_ij^-1 X_ij )^-1 C'

summed over all participants.  For fixed-intercept forms the information
matrix has arrow structure (one intercept per participant plus the shared
treatment column), so the variance reduces to a sum of per-participant
Schur complements; that profiled path is the default and the literal
full-matrix construction is kept as the reference (see ``method``).

Power keeps both normal tail terms; the far tail is tiny in practice but
costs nothing to retain.

Individual-specific effects: the naive estimate uses one participant's data
under the two-column intercept+treatment model; the shrunken estimate is the
population estimate plus the predicted random-slope deviation (BLUP), whose
error variance has the three-term form

    Var(d_ij - delta_ij) = C A C' - 2 C A X*' S*^-1 Z* D Cb'
        + Cb [D - D Z*' S*^-1 Z* D + D Z*' S*^-1 X* A X*' S*^-1 Z* D] Cb'

with A the inverse total information and * the target participant.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from scipy.stats import norm

from .designs import BalancedDesign
from .errors import EstimabilityError, ParameterError, UnsupportedModelError
from .model import (
    FIXED_RANDOM,
    RANDOM_RANDOM,
    ModelForm,
    RandomEffectsSpec,
    ResidualSpec,
    Sequence,
    assemble_participant,
    build_residual_covariance,
)

SOLVE_RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class PowerRequirement:
    """Type I/II error targets and the minimal clinically important effect."""

    alpha: float = 0.05
    beta: float = 0.2
    delta_min: float = 1.0

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ParameterError(
                f"alpha must be in (0,1), got {self.alpha}", field="requirement.alpha"
            )
        if not 0 < self.beta < 1:
            raise ParameterError(
                f"beta must be in (0,1), got {self.beta}", field="requirement.beta"
            )
        if self.alpha + self.beta >= 1:
            raise ParameterError(
                f"alpha + beta must be < 1 (got {self.alpha} + {self.beta}); "
                "otherwise any design passes trivially",
                field="requirement.alpha",
            )
        if self.delta_min == 0:
            raise ParameterError(
                "delta_min must be nonzero", field="requirement.delta_min"
            )

    @property
    def target_power(self) -> float:
        return 1.0 - self.beta


@dataclass(frozen=True)
class Band:
    """min/mean/max aggregate over sequence combinations."""

    min: float
    mean: float
    max: float

    @classmethod
    def from_values(cls, values: Iterable[float | None]) -> "Band | None":
        vals = [v for v in values if v is not None]
        if not vals:
            return None
        return cls(min=min(vals), mean=float(np.mean(vals)), max=max(vals))


@dataclass(frozen=True)
class DesignEvaluation:
    """Population SE + power and per-sequence individual-effect SEs.

    ``naive_se`` has one entry per sequence (None marks a single-treatment,
    non-estimable sequence).  Shrunken entries exist only when the evaluated
    model has random slopes and are reported under both intercept forms.
    """

    se_population: float
    power: float | None
    naive_se: tuple[float | None, ...]
    naive_band: Band | None
    shrunken_fixed_se: tuple[float, ...] | None = None
    shrunken_fixed_band: Band | None = None
    shrunken_random_se: tuple[float, ...] | None = None
    shrunken_random_band: Band | None = None


def _spd_solve(a: np.ndarray, b: np.ndarray, coordinate: str = "treatment") -> np.ndarray:
    """Solve a x = b with a symmetric positive definite, or raise.

    Factorization failure or relative residual above SOLVE_RESIDUAL_TOL means
    the information matrix is singular for some coordinate.
    """
    try:
        factor = cho_factor(a, lower=True)
    except LinAlgError as exc:
        raise EstimabilityError(
            f"information matrix is singular; the {coordinate} coordinate is "
            "not estimable for this design",
            coordinate=coordinate,
        ) from exc
    x = cho_solve(factor, b)
    resid = np.linalg.norm(a @ x - b)
    if resid > SOLVE_RESIDUAL_TOL * max(np.linalg.norm(b), 1e-300):
        raise EstimabilityError(
            f"information solve failed (relative residual {resid:.2e}); the "
            f"{coordinate} coordinate is not estimable for this design",
            coordinate=coordinate,
        )
    return x


@dataclass(frozen=True)
class SequenceBlocks:
    """GLS inner products for one sequence under its marginal covariance.

    u = 1'S^-1 1,  v = 1'S^-1 a,  w = a'S^-1 a  with a the treatment column.
    ``h`` is the information for the treatment effect after profiling out a
    participant-specific intercept.
    """

    u: float
    v: float
    w: float

    @property
    def h(self) -> float:
        return max(self.w - self.v * self.v / self.u, 0.0)

    @property
    def m(self) -> np.ndarray:
        return np.array([[self.u, self.v], [self.v, self.w]])


def _residual_inner_products(a: np.ndarray, residual: ResidualSpec) -> tuple[float, float, float]:
    """(1'W1, 1'Wa, a'Wa) with W the residual precision, in O(n).

    Uses the Sherman-Morrison form of the exchangeable precision and the
    tridiagonal AR-1 precision; ``a`` is a 0/1 vector.
    """
    n = a.shape[0]
    s2 = residual.variance
    n1 = float(a.sum())
    if residual.structure == "independent" or n == 1:
        return n / s2, n1 / s2, n1 / s2
    if residual.structure == "exchangeable":
        rho = residual.correlation
        denom = 1.0 - rho + n * rho
        u = n / (s2 * denom)
        v = n1 / (s2 * denom)
        w = (n1 - rho * n1 * n1 / denom) / (s2 * (1.0 - rho))
        return u, v, w
    rho = residual.correlation
    scale = s2 * (1.0 - rho * rho)
    diag = np.full(n, 1.0 + rho * rho)
    diag[0] = diag[-1] = 1.0
    pair_sum = float(a[:-1].sum() + a[1:].sum())
    u = (diag.sum() - 2.0 * rho * (n - 1)) / scale
    v = (float(diag @ a) - rho * pair_sum) / scale
    w = (float(diag @ a) - 2.0 * rho * float(a[:-1] @ a[1:])) / scale
    return u, v, w


def sequence_blocks(
    seq: Sequence,
    n_per_period: int,
    form: ModelForm,
    random_effects: RandomEffectsSpec,
    residual: ResidualSpec,
) -> SequenceBlocks:
    """Inner products of (ones, treatment) under the sequence's marginal Sigma.

    The random-effects contribution enters through a rank-q downdate of the
    residual-precision inner products: with M = X'W X and Z = X S,

        X' Sigma^-1 X = M - M S D (I + S'M S D)^-1 S' M,

    which is the Woodbury identity and stays valid for singular D.  The dense
    full-matrix path (``method="full"`` on the public operations) is the
    reference this is tested against.
    """
    a = seq.treatment_column(n_per_period)
    u, v, w = _residual_inner_products(a, residual)
    m_eps = np.array([[u, v], [v, w]])
    d = random_effects.d_matrix(form)
    if d is None:
        m = m_eps
    else:
        if form == FIXED_RANDOM:
            s = np.array([[0.0], [1.0]])
        elif form == RANDOM_RANDOM:
            s = np.eye(2)
        else:  # random-common
            s = np.array([[1.0], [0.0]])
        ms = m_eps @ s
        core = np.eye(s.shape[1]) + s.T @ ms @ d
        m = m_eps - ms @ d @ np.linalg.solve(core, ms.T)
    return SequenceBlocks(u=float(m[0, 0]), v=float(m[0, 1]), w=float(m[1, 1]))


def variance_from_blocks(
    blocks_and_counts: Iterable[tuple[SequenceBlocks, int]], form: ModelForm
) -> float:
    """Var(population-average effect) from per-sequence blocks and participant
    counts.  Accepts unbalanced counts; a balanced design passes J per sequence."""
    if form.random_intercepts:
        info = np.zeros((2, 2))
        for blocks, count in blocks_and_counts:
            info += count * blocks.m
        x = _spd_solve(info, np.array([0.0, 1.0]))
        return float(x[1])
    phi = 0.0
    for blocks, count in blocks_and_counts:
        phi += count * blocks.h
    if phi <= 0.0:
        raise EstimabilityError(
            "no information for the treatment coordinate: every participant "
            "receives a single treatment",
            coordinate="treatment",
        )
    return 1.0 / phi


def _design_blocks(
    design: BalancedDesign,
    form: ModelForm,
    random_effects: RandomEffectsSpec,
    residual: ResidualSpec,
) -> list[SequenceBlocks]:
    return [
        sequence_blocks(seq, design.n_per_period, form, random_effects, residual)
        for seq in design.sequences
    ]


def _var_population_full(
    design: BalancedDesign,
    form: ModelForm,
    random_effects: RandomEffectsSpec,
    residual: ResidualSpec,
) -> float:
    """Reference path: literal summed information over all I*J participants."""
    n_participants = design.n_participants
    info = None
    c_theta = None
    for i, seq in enumerate(design.sequences):
        for j in range(design.n_participants_per_sequence):
            slot = i * design.n_participants_per_sequence + j
            pm = assemble_participant(
                seq,
                design.n_per_period,
                form,
                random_effects,
                residual,
                intercept_slot=slot,
                n_intercept_slots=n_participants,
            )
            factor = cho_factor(pm.sigma_marginal, lower=True)
            contrib = pm.x.T @ cho_solve(factor, pm.x)
            info = contrib if info is None else info + contrib
            c_theta = pm.c_theta
    x = _spd_solve(info, c_theta)
    return float(c_theta @ x)


def se_population(
    design: BalancedDesign,
    form: ModelForm,
    random_effects: RandomEffectsSpec,
    residual: ResidualSpec,
    method: str = "profiled",
) -> float:
    """Standard error of the GLS population-average treatment effect estimate."""
    if method == "full":
        var = _var_population_full(design, form, random_effects, residual)
    elif method == "profiled":
        blocks = _design_blocks(design, form, random_effects, residual)
        var = variance_from_blocks(
            ((b, design.n_participants_per_sequence) for b in blocks), form
        )
    else:
        raise ParameterError(f"unknown method {method!r}", field="method")
    return float(np.sqrt(var))


def power(
    se: float, requirement: PowerRequirement, drop_minor_term: bool = False
) -> float:
    """Power to detect delta_min at the given standard error.

    Both normal terms are kept by default; ``drop_minor_term`` removes the
    far tail for cross-checks against tools that ignore it.
    """
    if not se > 0:
        raise ParameterError(f"se must be > 0, got {se}", field="se")
    z = norm.ppf(1.0 - requirement.alpha / 2.0)
    lam = requirement.delta_min / se
    main = norm.cdf(-z + lam) if lam > 0 else norm.cdf(-z - lam)
    minor = norm.cdf(-z - lam) if lam > 0 else norm.cdf(-z + lam)
    return float(main if drop_minor_term else main + minor)


def se_naive(seq: Sequence, n_per_period: int, residual: ResidualSpec) -> float | None:
    """Standard error of the single-participant (naive) effect estimate.

    Returns None for single-treatment sequences, which are non-estimable but
    legal under unrestricted randomization; the design search tolerates them.
    """
    if not seq.has_both_treatments():
        return None
    n = seq.n_periods * n_per_period
    a = seq.treatment_column(n_per_period)
    ones = np.ones(n)
    sigma_eps = build_residual_covariance(residual, n)
    factor = cho_factor(sigma_eps, lower=True)
    sol = cho_solve(factor, np.column_stack([ones, a]))
    u, v, w = float(ones @ sol[:, 0]), float(ones @ sol[:, 1]), float(a @ sol[:, 1])
    h = w - v * v / u
    if h <= 0:
        return None
    return float(np.sqrt(1.0 / h))


def _shrunken_values(
    blocks: list[SequenceBlocks],
    n_participants_per_sequence: int,
    form: ModelForm,
    random_effects: RandomEffectsSpec,
) -> list[float]:
    """Shrunken-estimate variances for a target on each sequence, sharing the
    aggregate information across targets."""
    j = n_participants_per_sequence
    d = random_effects.d_matrix(form)
    values = []

    if form == FIXED_RANDOM:
        sd2 = d[0, 0]
        phi = j * sum(b.h for b in blocks)
        if phi <= 0:
            raise EstimabilityError(
                "no information for the treatment coordinate", coordinate="treatment"
            )
        for b in blocks:
            h = b.h
            term1 = 1.0 / phi
            term2 = -2.0 * sd2 * h / phi
            term3 = sd2 * (1.0 - sd2 * h + sd2 * h * h / phi)
            values.append(term1 + term2 + term3)
    else:  # random-random
        info = j * sum((b.m for b in blocks), start=np.zeros((2, 2)))
        a_cols = _spd_solve(info, np.eye(2))
        c_b = np.array([0.0, 1.0])
        for b in blocks:
            m = b.m
            term1 = a_cols[1, 1]
            term2 = -2.0 * float((a_cols @ m @ d)[1] @ c_b)
            term3 = float(c_b @ (d - d @ m @ d + d @ m @ a_cols @ m @ d) @ c_b)
            values.append(term1 + term2 + term3)

    out = []
    for var in values:
        if var < -1e-10:
            raise EstimabilityError(
                f"shrunken variance came out negative ({var:.3e}); numerical failure"
            )
        out.append(max(float(var), 0.0))
    return out


def _var_shrunken_profiled(
    target_sequence: int,
    design: BalancedDesign,
    form: ModelForm,
    random_effects: RandomEffectsSpec,
    residual: ResidualSpec,
) -> float:
    blocks = _design_blocks(design, form, random_effects, residual)
    return _shrunken_values(
        blocks, design.n_participants_per_sequence, form, random_effects
    )[target_sequence]


def _var_shrunken_full(
    target_sequence: int,
    target_participant: int,
    design: BalancedDesign,
    form: ModelForm,
    random_effects: RandomEffectsSpec,
    residual: ResidualSpec,
) -> float:
    """Reference path: evaluate the three-term expression with full matrices."""
    n_participants = design.n_participants
    j = design.n_participants_per_sequence
    info = None
    target = None
    for i, seq in enumerate(design.sequences):
        for jj in range(j):
            slot = i * j + jj
            pm = assemble_participant(
                seq,
                design.n_per_period,
                form,
                random_effects,
                residual,
                intercept_slot=slot,
                n_intercept_slots=n_participants,
            )
            factor = cho_factor(pm.sigma_marginal, lower=True)
            contrib = pm.x.T @ cho_solve(factor, pm.x)
            info = contrib if info is None else info + contrib
            if i == target_sequence and jj == target_participant:
                target = (pm, factor)
    pm, factor = target
    d = random_effects.d_matrix(form)
    c_b = pm.c_b
    a_inv = _spd_solve(info, np.eye(info.shape[0]))
    si_z = cho_solve(factor, pm.z)
    si_x = cho_solve(factor, pm.x)
    term1 = float(pm.c_theta @ a_inv @ pm.c_theta)
    term2 = -2.0 * float(pm.c_theta @ a_inv @ pm.x.T @ si_z @ d @ c_b)
    mid = d - d @ pm.z.T @ si_z @ d + d @ pm.z.T @ si_x @ a_inv @ pm.x.T @ si_z @ d
    term3 = float(c_b @ mid @ c_b)
    return term1 + term2 + term3


def var_shrunken(
    target_sequence: int,
    design: BalancedDesign,
    form: ModelForm,
    random_effects: RandomEffectsSpec,
    residual: ResidualSpec,
    method: str = "profiled",
    target_participant: int = 0,
) -> float:
    """Variance of (shrunken estimate - true individual effect) for a
    participant on the given sequence.

    Defined only for random-slope forms; in a balanced design the value does
    not depend on which of the J participants within the sequence is targeted.
    """
    if not form.random_slopes:
        raise UnsupportedModelError(
            "shrunken estimates are undefined for common-slope models "
            f"(got {form.label})"
        )
    if not 0 <= target_sequence < design.n_sequences:
        raise ParameterError(
            f"target sequence {target_sequence} out of range", field="target"
        )
    if method == "full":
        return _var_shrunken_full(
            target_sequence, target_participant, design, form, random_effects, residual
        )
    if method != "profiled":
        raise ParameterError(f"unknown method {method!r}", field="method")
    return _var_shrunken_profiled(
        target_sequence, design, form, random_effects, residual
    )


def _naive_all(design: BalancedDesign, residual: ResidualSpec) -> tuple[float | None, ...]:
    """Naive SE per sequence, factoring the shared residual covariance once."""
    n = design.measurements_per_participant
    sigma_eps = build_residual_covariance(residual, n)
    factor = cho_factor(sigma_eps, lower=True)
    ones = np.ones(n)
    cols = np.column_stack(
        [ones] + [seq.treatment_column(design.n_per_period) for seq in design.sequences]
    )
    sol = cho_solve(factor, cols)
    u = float(ones @ sol[:, 0])
    out = []
    for idx, seq in enumerate(design.sequences):
        if not seq.has_both_treatments():
            out.append(None)
            continue
        a = cols[:, idx + 1]
        v = float(ones @ sol[:, idx + 1])
        w = float(a @ sol[:, idx + 1])
        h = w - v * v / u
        out.append(float(np.sqrt(1.0 / h)) if h > 0 else None)
    return tuple(out)


def evaluate_design(
    design: BalancedDesign,
    form: ModelForm,
    random_effects: RandomEffectsSpec,
    residual: ResidualSpec,
    requirement: PowerRequirement | None = None,
    include_individual: bool = True,
) -> DesignEvaluation:
    """Full design evaluation: population SE/power plus individual-effect SEs.

    Shrunken SEs are reported under both intercept forms (the model catalogue
    only defines them for random slopes, so they are absent when the evaluated
    model pools slopes).
    """
    se_pop = se_population(design, form, random_effects, residual)
    pw = power(se_pop, requirement) if requirement is not None else None

    naive = _naive_all(design, residual)
    shrunk_f = shrunk_r = None
    if include_individual and form.random_slopes:
        j = design.n_participants_per_sequence
        blocks_f = _design_blocks(design, FIXED_RANDOM, random_effects, residual)
        shrunk_f = tuple(
            float(np.sqrt(v))
            for v in _shrunken_values(blocks_f, j, FIXED_RANDOM, random_effects)
        )
        blocks_r = _design_blocks(design, RANDOM_RANDOM, random_effects, residual)
        shrunk_r = tuple(
            float(np.sqrt(v))
            for v in _shrunken_values(blocks_r, j, RANDOM_RANDOM, random_effects)
        )
    return DesignEvaluation(
        se_population=se_pop,
        power=pw,
        naive_se=naive,
        naive_band=Band.from_values(naive),
        shrunken_fixed_se=shrunk_f,
        shrunken_fixed_band=Band.from_values(shrunk_f) if shrunk_f else None,
        shrunken_random_se=shrunk_r,
        shrunken_random_band=Band.from_values(shrunk_r) if shrunk_r else None,
    )
