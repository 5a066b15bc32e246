import numpy as np
import pytest

from hqcqp import _kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # JIT-compile (or load the cached) kernels before anything is timed
    _kernels.warmup()


def random_hermitian(rng, n):
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (g + g.conj().T) / 2.0


def random_unit(rng, n):
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return z / np.linalg.norm(z)
