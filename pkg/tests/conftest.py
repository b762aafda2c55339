import pytest

from pskrate import make_params

# The three parameter points every oracle-equivalence check runs on.
STANDARD_POINTS = [(0.1, 0.5, 2.0), (0.3, 0.2, 1.0), (0.05, 1.0, 4.0)]


@pytest.fixture(params=STANDARD_POINTS, ids=lambda p: f"eta{p[0]}_ns{p[1]}_nb{p[2]}")
def standard_params(request):
    return make_params(*request.param)


@pytest.fixture
def workhorse():
    """The single point used whenever one representative set of params suffices."""
    return make_params(0.1, 0.5, 2.0)
