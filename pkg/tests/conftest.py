import pytest

from hybridqkd import lambda_coeffs


@pytest.fixture(scope="session")
def tau1():
    """Lambda table at the canonical threshold tau = 1."""
    return lambda_coeffs(1.0, 24)
