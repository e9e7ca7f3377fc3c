import pytest

from nof1design import PowerRequirement, RandomEffectsSpec, ResidualSpec


@pytest.fixture
def reference_residual():
    return ResidualSpec(variance=4.0, structure="ar1", correlation=0.4)


@pytest.fixture
def reference_re():
    return RandomEffectsSpec(var_intercept=4.0, var_slope=1.0, cov_intercept_slope=1.0)


@pytest.fixture
def reference_req():
    return PowerRequirement(alpha=0.05, beta=0.2, delta_min=1.0)
