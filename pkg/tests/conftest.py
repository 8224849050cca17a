import pytest

from bcforest._kernels import warm_up


@pytest.fixture(scope="session", autouse=True)
def compiled_kernels():
    # one-time numba compilation so individual tests measure their own work
    warm_up()
