import pytest

from bogoflow import _kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # compile the numba kernels once so timed tests measure the algorithms
    _kernels.warmup()
