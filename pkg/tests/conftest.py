import numpy as np
import pytest

from uniequiv import density_operator, full_algebra
from uniequiv.oracle import haar_unitary_in_algebra


def ginibre(d1, d2, rng):
    return (rng.standard_normal((d1, d2)) + 1j * rng.standard_normal((d1, d2))) / np.sqrt(2.0)


def haar(n, rng):
    return haar_unitary_in_algebra(full_algebra(n), rng)


def random_density(d1, d2, rng, min_gap=None):
    """Random full-rank density operator; optionally with all eigenvalue gaps
    at least min_gap (relative to the normalized spectrum)."""
    d = d1 * d2
    if min_gap is None:
        G = ginibre(d, d, rng)
        M = G @ G.conj().T + 0.05 * np.eye(d)
    else:
        c = np.arange(d, 0, -1) + rng.uniform(0.0, 0.4, size=d)
        c = np.sort(c)[::-1]
        Q = haar(d, rng)
        M = (Q * c) @ Q.conj().T
    M = (M + M.conj().T) / 2.0
    M = M / np.trace(M).real
    M = (M + M.conj().T) / 2.0
    return density_operator(d1, d2, M)


@pytest.fixture
def rng():
    return np.random.default_rng(20260823)
