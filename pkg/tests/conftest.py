import numpy as np
import pytest


@pytest.fixture
def seeded_rng():
    return np.random.default_rng(20240811)


def random_distribution(m, rng):
    p = rng.random(m) + 1e-3
    return p / p.sum()


def random_metric(m, rng, scale=10.0):
    """Shortest-path closure of a random symmetric nonnegative matrix."""
    a = rng.random((m, m)) * scale
    a = (a + a.T) / 2.0
    np.fill_diagonal(a, 0.0)
    for k in range(m):
        a = np.minimum(a, a[:, k : k + 1] + a[k : k + 1, :])
    return a


def relative_error(got, want):
    got = np.asarray(got, dtype=np.float64)
    want = np.asarray(want, dtype=np.float64)
    denom = max(float(np.linalg.norm(want.ravel())), 1e-12)
    return float(np.linalg.norm((got - want).ravel())) / denom
