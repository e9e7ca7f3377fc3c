import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nof1design import (
    ALL_FORMS,
    FIXED_COMMON,
    FIXED_RANDOM,
    RANDOM_COMMON,
    RANDOM_RANDOM,
    ModelForm,
    ParameterError,
    RandomEffectsSpec,
    ResidualSpec,
    Sequence,
    assemble_participant,
    build_residual_covariance,
)


class TestResidualCovariance:
    def test_independent_scales_identity(self):
        got = build_residual_covariance(ResidualSpec(4.0, "independent"), 2)
        np.testing.assert_array_equal(got, [[4.0, 0.0], [0.0, 4.0]])

    def test_ar1_hand_values(self):
        got = build_residual_covariance(ResidualSpec(4.0, "ar1", 0.4), 3)
        expected = [[4.0, 1.6, 0.64], [1.6, 4.0, 1.6], [0.64, 1.6, 4.0]]
        np.testing.assert_allclose(got, expected, rtol=1e-15)

    def test_exchangeable_hand_values(self):
        got = build_residual_covariance(ResidualSpec(4.0, "exchangeable", 0.5), 2)
        np.testing.assert_allclose(got, [[4.0, 2.0], [2.0, 4.0]], rtol=1e-15)

    def test_exchangeable_rho_zero_equals_independent(self):
        a = build_residual_covariance(ResidualSpec(2.5, "exchangeable", 0.0), 7)
        b = build_residual_covariance(ResidualSpec(2.5, "independent"), 7)
        np.testing.assert_array_equal(a, b)

    @given(
        variance=st.floats(0.01, 100),
        structure=st.sampled_from(["independent", "exchangeable", "ar1"]),
        correlation=st.floats(0.0, 0.95),
        n=st.integers(1, 30),
    )
    @settings(max_examples=60, deadline=None)
    def test_symmetric_positive_definite(self, variance, structure, correlation, n):
        spec = ResidualSpec(variance, structure, correlation)
        cov = build_residual_covariance(spec, n)
        np.testing.assert_array_equal(cov, cov.T)
        assert np.linalg.eigvalsh(cov).min() > 0

    def test_ar1_negative_rho_still_pd(self):
        cov = build_residual_covariance(ResidualSpec(1.0, "ar1", -0.8), 12)
        assert np.linalg.eigvalsh(cov).min() > 0

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(variance=0.0),
            dict(variance=-1.0),
            dict(variance=1.0, structure="toeplitz"),
            dict(variance=1.0, structure="ar1", correlation=1.0),
            dict(variance=1.0, structure="ar1", correlation=-1.2),
            dict(variance=1.0, structure="exchangeable", correlation=-0.1),
        ],
    )
    def test_invalid_specs_rejected(self, kwargs):
        with pytest.raises(ParameterError):
            ResidualSpec(**kwargs)


class TestSequenceType:
    def test_validation(self):
        with pytest.raises(ParameterError):
            Sequence(())
        with pytest.raises(ParameterError):
            Sequence((0, 2))

    def test_treatment_column_repeats_periods(self):
        np.testing.assert_array_equal(
            Sequence((1, 0)).treatment_column(3), [1, 1, 1, 0, 0, 0]
        )


class TestRandomEffectsSpec:
    def test_psd_violation_names_field(self):
        with pytest.raises(ParameterError) as err:
            RandomEffectsSpec(var_intercept=1.0, var_slope=1.0, cov_intercept_slope=1.5)
        assert err.value.field == "random_effects.cov_intercept_slope"

    def test_d_matrix_per_form(self):
        spec = RandomEffectsSpec(4.0, 1.0, 1.0)
        assert spec.d_matrix(FIXED_COMMON) is None
        np.testing.assert_array_equal(spec.d_matrix(FIXED_RANDOM), [[1.0]])
        np.testing.assert_array_equal(spec.d_matrix(RANDOM_COMMON), [[4.0]])
        np.testing.assert_array_equal(
            spec.d_matrix(RANDOM_RANDOM), [[4.0, 1.0], [1.0, 1.0]]
        )


class TestAssembleParticipant:
    def test_fixed_common_table_row(self):
        pm = assemble_participant(
            Sequence((1, 0)), 1, FIXED_COMMON, RandomEffectsSpec(), ResidualSpec(4.0, "independent"),
            intercept_slot=0, n_intercept_slots=3,
        )
        assert pm.x.shape == (2, 4)
        np.testing.assert_array_equal(pm.x[:, -1], [1, 0])
        np.testing.assert_array_equal(pm.x[:, 0], [1, 1])
        assert pm.z is None and pm.c_b is None
        np.testing.assert_array_equal(pm.sigma_marginal, 4.0 * np.eye(2))
        np.testing.assert_array_equal(pm.c_theta, [0, 0, 0, 1])

    def test_random_random_marginal_covariance(self):
        # seq (1,0), L=2: Z = [[1,1],[1,1],[1,0],[1,0]], Sigma = Z D Z' + 4I
        re = RandomEffectsSpec(var_intercept=4.0, var_slope=1.0, cov_intercept_slope=1.0)
        pm = assemble_participant(
            Sequence((1, 0)), 2, RANDOM_RANDOM, re, ResidualSpec(4.0, "independent")
        )
        z = np.array([[1, 1], [1, 1], [1, 0], [1, 0]], dtype=float)
        np.testing.assert_array_equal(pm.z, z)
        d = np.array([[4.0, 1.0], [1.0, 1.0]])
        np.testing.assert_allclose(pm.sigma_marginal, z @ d @ z.T + 4.0 * np.eye(4))
        np.testing.assert_array_equal(pm.c_theta, [0, 1])
        np.testing.assert_array_equal(pm.c_b, [0, 1])

    def test_fixed_random_z_is_treatment_column(self):
        pm = assemble_participant(
            Sequence((1, 0, 1)), 2, FIXED_RANDOM, RandomEffectsSpec(var_slope=2.0),
            ResidualSpec(1.0, "independent"), intercept_slot=0, n_intercept_slots=1,
        )
        np.testing.assert_array_equal(pm.z[:, 0], [1, 1, 0, 0, 1, 1])
        np.testing.assert_array_equal(pm.c_b, [1.0])

    def test_random_common_z_is_ones(self):
        pm = assemble_participant(
            Sequence((1, 0)), 1, RANDOM_COMMON, RandomEffectsSpec(var_intercept=3.0),
            ResidualSpec(1.0, "independent"),
        )
        np.testing.assert_array_equal(pm.z[:, 0], [1, 1])
        assert pm.c_b is None

    def test_all_reference_sequence_is_well_formed(self):
        pm = assemble_participant(
            Sequence((0, 0)), 1, FIXED_COMMON, RandomEffectsSpec(), ResidualSpec(1.0, "independent"),
        )
        np.testing.assert_array_equal(pm.x[:, -1], [0, 0])

    @pytest.mark.parametrize("form", ALL_FORMS)
    def test_marginal_covariance_positive_definite(self, form, reference_re, reference_residual):
        pm = assemble_participant(Sequence((1, 0, 0, 1)), 3, form, reference_re, reference_residual)
        sigma = pm.sigma_marginal
        np.testing.assert_allclose(sigma, sigma.T, rtol=1e-15)
        assert np.linalg.eigvalsh(sigma).min() > 0

    @pytest.mark.parametrize(
        "form_a,form_b",
        [(FIXED_COMMON, RANDOM_COMMON), (FIXED_RANDOM, RANDOM_RANDOM)],
    )
    def test_intercept_form_shares_treatment_column(self, form_a, form_b, reference_re, reference_residual):
        seq = Sequence((1, 0, 1, 0))
        a = assemble_participant(seq, 2, form_a, reference_re, reference_residual)
        b = assemble_participant(seq, 2, form_b, reference_re, reference_residual)
        np.testing.assert_array_equal(a.x[:, -1], b.x[:, -1])

    @pytest.mark.parametrize("form", [FIXED_RANDOM, RANDOM_COMMON, RANDOM_RANDOM])
    def test_zero_variance_collapses_to_residual(self, form, reference_residual):
        re = RandomEffectsSpec(0.0, 0.0, 0.0)
        pm = assemble_participant(Sequence((1, 0)), 2, form, re, reference_residual)
        np.testing.assert_allclose(
            pm.sigma_marginal, build_residual_covariance(reference_residual, 4), atol=1e-15
        )

    def test_intercept_slot_bounds_checked(self):
        with pytest.raises(ParameterError):
            assemble_participant(
                Sequence((1, 0)), 1, FIXED_COMMON, RandomEffectsSpec(), ResidualSpec(1.0, "independent"),
                intercept_slot=4, n_intercept_slots=2,
            )

    def test_c_theta_has_single_unit_entry(self, reference_re, reference_residual):
        for form in ALL_FORMS:
            pm = assemble_participant(
                Sequence((0, 1)), 1, form, reference_re, reference_residual,
                intercept_slot=1, n_intercept_slots=5,
            )
            assert pm.c_theta.sum() == 1.0
            assert (pm.c_theta == 1.0).sum() == 1
            assert pm.c_theta[-1] == 1.0
            assert pm.x.shape[0] == 2


class TestModelForm:
    def test_invalid_choices(self):
        with pytest.raises(ParameterError):
            ModelForm("pooled", "random")
        with pytest.raises(ParameterError):
            ModelForm("fixed", "none")
