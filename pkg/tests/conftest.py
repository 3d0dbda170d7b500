import numpy as np
import pytest

from aggdiff import (
    ModelParams,
    RadialGrid,
    build_kernel,
    derived_constants,
    find_critical_mass,
)

# The working point for everything numerical: smallest dimension with
# 2 < 2s < d, and alpha = 0.5 keeps the radial kernel in closed form.
D, S = 3, 1.25


@pytest.fixture(scope="session")
def params():
    return ModelParams(d=D, s=S)


@pytest.fixture(scope="session")
def consts(params):
    return derived_constants(params)


@pytest.fixture(scope="session")
def grid96():
    return RadialGrid.uniform(96, 3.0, d=D)


@pytest.fixture(scope="session")
def kernel96(grid96):
    return build_kernel(grid96, S)


@pytest.fixture(scope="session")
def grid256():
    return RadialGrid.uniform(256, 4.0, d=D)


@pytest.fixture(scope="session")
def kernel256(grid256):
    return build_kernel(grid256, S)


@pytest.fixture(scope="session")
def grid512():
    return RadialGrid.uniform(512, 4.0, d=D)


@pytest.fixture(scope="session")
def kernel512(grid512):
    return build_kernel(grid512, S)


@pytest.fixture(scope="session")
def critical256(params, consts, grid256, kernel256):
    """Measured critical mass and steady profile on the 256-cell grid."""
    return find_critical_mass(grid256, kernel256, params, consts.M_star,
                              1.08 * consts.M_star, rel_tol=1e-6,
                              support_radius_init=1.0)


@pytest.fixture(scope="session")
def critical512(params, consts, grid512, kernel512):
    """Measured critical mass and steady profile at desk resolution."""
    return find_critical_mass(grid512, kernel512, params, consts.M_star,
                              1.08 * consts.M_star, rel_tol=1e-6,
                              support_radius_init=1.0)


def random_bump_field(rng, grid, allow_slab=True):
    """Seeded non-negative test field: Gaussian bumps plus optional slab."""
    centers = grid.centers
    vals = np.zeros_like(centers)
    for _ in range(rng.integers(1, 4)):
        c = rng.uniform(0.0, 0.6 * grid.r_max)
        w = rng.uniform(0.05, 0.3) * grid.r_max
        vals += rng.uniform(0.1, 1.0) * np.exp(-0.5 * ((centers - c) / w) ** 2)
    if allow_slab and rng.random() < 0.3:
        vals += rng.uniform(0.2, 1.0) * (centers < rng.uniform(0.2, 0.5) * grid.r_max)
    return vals
