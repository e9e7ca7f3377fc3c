"""Independent oracles the main code paths are checked against.

The closed-form population SE applies to fixed-intercept common-slope designs
with independent or exchangeable residuals: after profiling out the
participant intercept, the per-participant contrast variance is
sigma^2 (1/n1 + 1/n0) (independent) or sigma^2 (1-rho) (1/n1 + 1/n0)
(exchangeable), and participants' informations add.

The Monte-Carlo oracle simulates outcome vectors from the generating model
with known variance components, computes the GLS estimator and the BLUP with
known covariances via literal full design matrices, and reports empirical
SDs.  It shares no code with the profiled engine path.
"""

from __future__ import annotations

import numpy as np

from nof1design import BalancedDesign, ModelForm, RandomEffectsSpec, ResidualSpec
from nof1design.model import build_residual_covariance


def closed_form_se_fixed_common(
    design: BalancedDesign, residual: ResidualSpec
) -> float:
    """Analytic crossover SE for Fixed-Common designs.

    Valid for independent and exchangeable structures only; every sequence
    must contain both treatments.
    """
    n = design.measurements_per_participant
    scale = residual.variance
    if residual.structure == "exchangeable":
        scale = residual.variance * (1.0 - residual.correlation)
    elif residual.structure != "independent":
        raise ValueError("closed form covers independent/exchangeable only")
    info = 0.0
    for seq in design.sequences:
        n1 = seq.n_intervention * design.n_per_period
        n0 = n - n1
        if n1 == 0 or n0 == 0:
            continue
        per_participant_var = scale * (1.0 / n1 + 1.0 / n0)
        info += design.n_participants_per_sequence / per_participant_var
    return float(np.sqrt(1.0 / info))


def _participant_matrices(design, form, random_effects, residual):
    """Literal per-participant X, Z, D, Sigma_eps for the generating model."""
    n = design.measurements_per_participant
    n_participants = design.n_participants
    sigma_eps = build_residual_covariance(residual, n)
    out = []
    for i, seq in enumerate(design.sequences):
        a = seq.treatment_column(design.n_per_period)
        ones = np.ones(n)
        for j in range(design.n_participants_per_sequence):
            slot = i * design.n_participants_per_sequence + j
            if form.random_intercepts:
                x = np.column_stack([ones, a])
            else:
                x = np.zeros((n, n_participants + 1))
                x[:, slot] = 1.0
                x[:, -1] = a
            if form == ModelForm("fixed", "random"):
                z = a[:, None]
                d = np.array([[random_effects.var_slope]])
            elif form == ModelForm("random", "common"):
                z = ones[:, None]
                d = np.array([[random_effects.var_intercept]])
            elif form == ModelForm("random", "random"):
                z = np.column_stack([ones, a])
                d = np.array(
                    [
                        [random_effects.var_intercept, random_effects.cov_intercept_slope],
                        [random_effects.cov_intercept_slope, random_effects.var_slope],
                    ]
                )
            else:
                z, d = None, None
            out.append((i, x, z, d, sigma_eps))
    return out


def simulate_gls_sds(
    design: BalancedDesign,
    form: ModelForm,
    random_effects: RandomEffectsSpec,
    residual: ResidualSpec,
    n_replicates: int = 20000,
    seed: int = 0,
) -> dict:
    """Empirical SDs of the GLS population estimate and, for random-slope
    forms, of (shrunken estimate - true individual slope) for a participant
    on the first sequence.

    Returns {"sd_population": float, "sd_shrunken": float | None}.
    """
    rng = np.random.default_rng(seed)
    parts = _participant_matrices(design, form, random_effects, residual)
    n = design.measurements_per_participant
    p_fixed = parts[0][1].shape[1]
    delta_idx = p_fixed - 1

    # true fixed effects: varied intercepts, treatment effect 1
    theta = np.zeros(p_fixed)
    if form.random_intercepts:
        theta[0] = 2.0
    else:
        theta[:-1] = 0.5 + 0.1 * np.arange(p_fixed - 1)
    theta[delta_idx] = 1.0

    info = np.zeros((p_fixed, p_fixed))
    solved = []
    for _, x, z, d, sigma_eps in parts:
        sigma = sigma_eps if z is None else z @ d @ z.T + sigma_eps
        sinv_x = np.linalg.solve(sigma, x)
        info += x.T @ sinv_x
        solved.append(sinv_x)
    h_mats = [np.linalg.solve(info, sx.T) for sx in solved]  # A^-1 X' S^-1

    chol_eps = np.linalg.cholesky(build_residual_covariance(residual, n))
    theta_hat = np.zeros((p_fixed, n_replicates))
    target_y = None
    target_gamma = None
    for idx, (i, x, z, d, sigma_eps) in enumerate(parts):
        y = (x @ theta)[:, None] + chol_eps @ rng.standard_normal((n, n_replicates))
        gamma = None
        if z is not None:
            q = z.shape[1]
            w, v = np.linalg.eigh(d)  # PSD square root; d may be singular
            sqrt_d = v @ np.diag(np.sqrt(np.clip(w, 0.0, None))) @ v.T
            gamma = sqrt_d @ rng.standard_normal((q, n_replicates))
            y = y + z @ gamma
        theta_hat += h_mats[idx] @ y
        if idx == 0:
            target_y, target_gamma = y, gamma

    delta_hat = theta_hat[delta_idx]
    out = {"sd_population": float(delta_hat.std(ddof=1)), "sd_shrunken": None}

    if form.random_slopes:
        i, x, z, d, sigma_eps = parts[0]
        sigma = z @ d @ z.T + sigma_eps
        resid_y = target_y - x @ theta_hat
        b_hat = d @ z.T @ np.linalg.solve(sigma, resid_y)
        slope_hat = b_hat[-1]  # slope deviation is the last random effect
        true_slope_dev = target_gamma[-1]
        err = (delta_hat + slope_hat) - (theta[delta_idx] + true_slope_dev)
        out["sd_shrunken"] = float(err.std(ddof=1))
    return out
