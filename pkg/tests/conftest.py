import cmath
import math

import numpy as np
import pytest
from hypothesis import strategies as st

from invmetrics.domains import Annulus, grid_from_predicate


def polar_points(max_radius, min_radius=0.0):
    return st.builds(
        cmath.rect,
        st.floats(min_radius, max_radius, allow_nan=False),
        st.floats(0.0, 2 * math.pi, allow_nan=False),
    )


def disk_points(max_radius=0.9):
    return polar_points(max_radius)


def annulus_points(r=0.1, margin=0.02):
    return polar_points(1.0 - margin, r * (1 + margin))


def bounded_complex(bound=10.0):
    part = st.floats(-bound, bound, allow_nan=False)
    return st.builds(complex, part, part)


@pytest.fixture(scope="session")
def square_with_hole_grid():
    def pred(z):
        return ((np.abs(z.real) < 0.9) & (np.abs(z.imag) < 0.9)
                & ~((np.abs(z.real) < 0.35) & (np.abs(z.imag) < 0.35)))

    return grid_from_predicate(pred, 0.9, 0.06)


@pytest.fixture(scope="session")
def pants_grid():
    def pred(z):
        return ((np.abs(z) < 1.0) & (np.abs(z - 0.45) > 0.25)
                & (np.abs(z + 0.45) > 0.25))

    return grid_from_predicate(pred, 1.0, 0.02)


@pytest.fixture(scope="session")
def annulus_domain():
    return Annulus(0.1)
