"""Shared fixture grids.

The n=3 fixtures keep every N*t_j at least 0.04 away from a half-integer so
that rounding the truncated sample never lands on a different grid index
than rounding the exact one; the scalar error bounds assume the two agree.
"""

import numpy as np
import pytest

from nuqft import chebfact


def boundary_margin(grid) -> float:
    v = grid.N * grid.t
    return float(np.min(np.abs(v - (np.floor(v) + 0.5))))


def fixture_grids_n3():
    grids = [
        chebfact.jitter_grid(3, 0.10, 21),
        chebfact.jitter_grid(3, 0.25, 22),
        chebfact.jitter_grid(3, 0.30, 23),
        chebfact.jitter_grid(3, 0.45, 24),
        chebfact.random_grid(3, 28),
    ]
    for g in grids:
        assert boundary_margin(g) > 0.04
    return grids


@pytest.fixture(scope="session")
def grids_n3():
    return fixture_grids_n3()


@pytest.fixture(scope="session")
def grid_jitter3():
    return chebfact.jitter_grid(3, 0.30, 23)


@pytest.fixture(scope="session")
def grid_n2():
    return chebfact.random_grid(2, 4)
