import numpy as np
import pytest

from kicked_ising.states import SymmetricState

# 30 reduced fractions with h <= 12, mixed parities of r and h
FRACTION_GRID = [(1, 2), (1, 3), (2, 3), (1, 4), (3, 4), (1, 5), (2, 5), (3, 5),
                 (4, 5), (1, 6), (5, 6), (1, 7), (3, 7), (5, 7), (6, 7), (1, 8),
                 (3, 8), (5, 8), (7, 8), (1, 9), (2, 9), (4, 9), (7, 9), (1, 10),
                 (3, 10), (7, 10), (1, 11), (5, 11), (7, 12), (11, 12)]


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_symmetric(rng, n: int) -> SymmetricState:
    c = rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1)
    return SymmetricState(n, c / np.linalg.norm(c))


def poisson_circle(rng, count: int) -> np.ndarray:
    """iid uniform phases = Poisson point process on the circle."""
    return np.sort(rng.uniform(0.0, 2.0 * np.pi, count))
