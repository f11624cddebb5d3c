import numpy as np
import pytest

from scott.numerics import default_grid
from scott.tf import TFConfig, tf_solve_atom, tf_universal


@pytest.fixture(scope="session")
def grid():
    return default_grid()


@pytest.fixture(scope="session")
def universal():
    return tf_universal()


@pytest.fixture(scope="session")
def tf_hydrogen_q1():
    return tf_solve_atom(1.0, 1.0, TFConfig(q=1))


@pytest.fixture(scope="session")
def tf_hydrogen_q2():
    return tf_solve_atom(1.0, 1.0, TFConfig(q=2))


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture(scope="session")
def heilmann_density():
    # shared by the module test and the acceptance suite (expensive build)
    from scott.hydrogenic import rho_total_H

    phase = np.linspace(np.sqrt(32.0 * 400.0), np.sqrt(32.0 * 4000.0), 520)
    radii = phase**2 / 32.0
    return rho_total_H(radii, q=1)
