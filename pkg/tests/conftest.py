import math
import warnings

import pytest

from gatesim.design import solve_shaped, solve_unshaped


@pytest.fixture(scope="session")
def unshaped_design():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return solve_unshaped(1, 0, 0, math.pi, g_m=1.0, r_p=2.5)


@pytest.fixture(scope="session")
def shaped_k1_design():
    return solve_shaped(1, 3.28, g_m=1.0)


@pytest.fixture(scope="session")
def shaped_k19_design():
    return solve_shaped(19, 4.49, g_m=1.0)
