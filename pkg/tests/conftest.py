import numpy as np
import pytest

# Offset for the near-boundary q in the exponent grids (q = p - 0.5 + QEPS).
QEPS = 0.1

N_GRID = (2, 3, 5)
P_GRID = (1.5, 2.0, 3.0)
B_GRID = (0.5, 1.0, 2.0)
R_GRID = (0.5, 1.0, 5.0)


def q_grid(p: float):
    return (p - 0.5 + QEPS, p, p + 1.0)


def npq_grid():
    for n in N_GRID:
        for p in P_GRID:
            for q in q_grid(p):
                yield n, p, q


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
