"""Per-participant model assembly for the four intercept/slope variants.

A participant's outcome vector follows the general linear mixed model

    Y = X theta + Z b + eps,   Var(b) = D,   Var(eps) = Sigma_eps,

where the shapes of X, Z, D and the contrast rows depend on whether
intercepts are fixed or random and slopes are common or random.  This module
builds those matrices plus the marginal covariance Sigma = Z D Z' + Sigma_eps
for a single participant; the estimation engine sums information across
participants.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError

FIXED = "fixed"
RANDOM = "random"
COMMON = "common"

INDEPENDENT = "independent"
EXCHANGEABLE = "exchangeable"
AR1 = "ar1"

RESIDUAL_STRUCTURES = (INDEPENDENT, EXCHANGEABLE, AR1)


@dataclass(frozen=True)
class Sequence:
    """Ordered treatment assignments over the K periods of one trial.

    Entries are 0 (reference) or 1 (intervention); within a period all L
    measurements share the period's assignment.
    """

    assignments: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "assignments", tuple(int(a) for a in self.assignments))
        if len(self.assignments) < 1:
            raise ParameterError("sequence must have at least one period", field="sequence")
        if any(a not in (0, 1) for a in self.assignments):
            raise ParameterError(
                f"sequence entries must be 0 or 1, got {self.assignments}", field="sequence"
            )

    @property
    def n_periods(self) -> int:
        return len(self.assignments)

    @property
    def n_intervention(self) -> int:
        return sum(self.assignments)

    def treatment_column(self, n_per_period: int) -> np.ndarray:
        """Treatment indicator repeated L times per period (length K*L)."""
        return np.repeat(np.asarray(self.assignments, dtype=float), n_per_period)

    def has_both_treatments(self) -> bool:
        return 0 < self.n_intervention < self.n_periods


@dataclass(frozen=True)
class ModelForm:
    """Intercept/slope pooling choice: four combinations span the catalogue."""

    intercepts: str = FIXED
    slopes: str = RANDOM

    def __post_init__(self):
        if self.intercepts not in (FIXED, RANDOM):
            raise ParameterError(
                f"intercepts must be '{FIXED}' or '{RANDOM}', got {self.intercepts!r}",
                field="model.intercepts",
            )
        if self.slopes not in (COMMON, RANDOM):
            raise ParameterError(
                f"slopes must be '{COMMON}' or '{RANDOM}', got {self.slopes!r}",
                field="model.slopes",
            )

    @property
    def random_intercepts(self) -> bool:
        return self.intercepts == RANDOM

    @property
    def random_slopes(self) -> bool:
        return self.slopes == RANDOM

    @property
    def has_random_effects(self) -> bool:
        return self.random_intercepts or self.random_slopes

    @property
    def label(self) -> str:
        return f"{self.intercepts}-{self.slopes}"


FIXED_COMMON = ModelForm(FIXED, COMMON)
FIXED_RANDOM = ModelForm(FIXED, RANDOM)
RANDOM_COMMON = ModelForm(RANDOM, COMMON)
RANDOM_RANDOM = ModelForm(RANDOM, RANDOM)
ALL_FORMS = (FIXED_COMMON, FIXED_RANDOM, RANDOM_COMMON, RANDOM_RANDOM)


@dataclass(frozen=True)
class ResidualSpec:
    """Within-participant error model: variance and correlation structure.

    The correlation applies across the whole K*L measurement vector; for
    ``ar1`` the lag is the measurement index, running through period
    boundaries (measurements are treated as equally spaced).
    """

    variance: float = 4.0
    structure: str = AR1
    correlation: float = 0.0

    def __post_init__(self):
        if not self.variance > 0:
            raise ParameterError(
                f"residual variance must be > 0, got {self.variance}",
                field="residual.variance",
            )
        if self.structure not in RESIDUAL_STRUCTURES:
            raise ParameterError(
                f"residual structure must be one of {RESIDUAL_STRUCTURES}, got {self.structure!r}",
                field="residual.structure",
            )
        if not abs(self.correlation) < 1:
            raise ParameterError(
                f"|correlation| must be < 1, got {self.correlation}",
                field="residual.correlation",
            )
        # nonnegative rho keeps the exchangeable matrix positive definite at
        # every size, so validity does not depend on K*L
        if self.structure == EXCHANGEABLE and self.correlation < 0:
            raise ParameterError(
                f"exchangeable correlation must be >= 0, got {self.correlation}",
                field="residual.correlation",
            )


@dataclass(frozen=True)
class RandomEffectsSpec:
    """Between-participant variance components for the random effects."""

    var_intercept: float = 0.0
    var_slope: float = 0.0
    cov_intercept_slope: float = 0.0

    def __post_init__(self):
        if self.var_intercept < 0:
            raise ParameterError(
                f"var_intercept must be >= 0, got {self.var_intercept}",
                field="random_effects.var_intercept",
            )
        if self.var_slope < 0:
            raise ParameterError(
                f"var_slope must be >= 0, got {self.var_slope}",
                field="random_effects.var_slope",
            )
        if self.cov_intercept_slope**2 > self.var_intercept * self.var_slope:
            raise ParameterError(
                "cov_intercept_slope^2 exceeds var_intercept*var_slope "
                f"({self.cov_intercept_slope}^2 > {self.var_intercept}*{self.var_slope}); "
                "the random-effects matrix must be positive semidefinite",
                field="random_effects.cov_intercept_slope",
            )

    def d_matrix(self, form: ModelForm) -> np.ndarray | None:
        """Random-effects covariance D for the given model form (None if no
        random effects)."""
        if form == FIXED_RANDOM:
            return np.array([[self.var_slope]])
        if form == RANDOM_COMMON:
            return np.array([[self.var_intercept]])
        if form == RANDOM_RANDOM:
            return np.array(
                [
                    [self.var_intercept, self.cov_intercept_slope],
                    [self.cov_intercept_slope, self.var_slope],
                ]
            )
        return None


@dataclass(frozen=True)
class ParticipantMatrices:
    """Assembled matrices for one participant.

    ``x`` has K*L rows; for fixed-intercept forms it carries one indicator
    column per participant in the series plus the shared treatment column,
    for random-intercept forms it is the two-column (ones, treatment) matrix.
    ``c_theta`` pulls the treatment coefficient off the fixed effects;
    ``c_b`` pulls the slope deviation off the random effects (random-slope
    forms only).
    """

    x: np.ndarray
    z: np.ndarray | None
    sigma_marginal: np.ndarray
    c_theta: np.ndarray
    c_b: np.ndarray | None = field(default=None)


def build_residual_covariance(spec: ResidualSpec, n: int) -> np.ndarray:
    """sigma^2 * R for n measurements under the requested correlation structure."""
    if n < 1:
        raise ParameterError(f"measurement count must be >= 1, got {n}", field="n")
    if spec.structure == INDEPENDENT:
        r = np.eye(n)
    elif spec.structure == EXCHANGEABLE:
        r = np.full((n, n), spec.correlation)
        np.fill_diagonal(r, 1.0)
    else:
        idx = np.arange(n)
        r = spec.correlation ** np.abs(idx[:, None] - idx[None, :])
    return spec.variance * r


def assemble_participant(
    seq: Sequence,
    n_per_period: int,
    form: ModelForm,
    random_effects: RandomEffectsSpec,
    residual: ResidualSpec,
    intercept_slot: int = 0,
    n_intercept_slots: int = 1,
) -> ParticipantMatrices:
    """Build X, Z, the marginal covariance and contrast rows for one participant.

    ``intercept_slot``/``n_intercept_slots`` place the participant's own
    intercept indicator inside the series-wide fixed-effects vector; both are
    ignored for random-intercept forms, whose X is always two columns.
    """
    if n_per_period < 1:
        raise ParameterError(
            f"measurements per period must be >= 1, got {n_per_period}", field="L"
        )
    n = seq.n_periods * n_per_period
    a = seq.treatment_column(n_per_period)
    ones = np.ones(n)

    if form.random_intercepts:
        x = np.column_stack([ones, a])
        c_theta = np.array([0.0, 1.0])
    else:
        if not 0 <= intercept_slot < n_intercept_slots:
            raise ParameterError(
                f"intercept_slot {intercept_slot} out of range for "
                f"{n_intercept_slots} slots",
                field="intercept_slot",
            )
        x = np.zeros((n, n_intercept_slots + 1))
        x[:, intercept_slot] = 1.0
        x[:, -1] = a
        c_theta = np.zeros(n_intercept_slots + 1)
        c_theta[-1] = 1.0

    sigma_eps = build_residual_covariance(residual, n)
    d = random_effects.d_matrix(form)

    if form == FIXED_COMMON:
        z, c_b = None, None
        sigma = sigma_eps
    elif form == FIXED_RANDOM:
        z = a[:, None]
        c_b = np.array([1.0])
        sigma = z @ d @ z.T + sigma_eps
    elif form == RANDOM_COMMON:
        z = ones[:, None]
        c_b = None
        sigma = z @ d @ z.T + sigma_eps
    else:  # random-random: Z is X
        z = x
        c_b = np.array([0.0, 1.0])
        sigma = z @ d @ z.T + sigma_eps

    return ParticipantMatrices(x=x, z=z, sigma_marginal=sigma, c_theta=c_theta, c_b=c_b)
