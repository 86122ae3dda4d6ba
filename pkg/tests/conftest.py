import pytest

from burgerslab import fixtures as F
from burgerslab.lagrangian import build_epigraph_rep, build_hypograph_rep


@pytest.fixture(scope="session")
def step_reps():
    sol = F.step()
    return sol, build_hypograph_rep(sol, 200, 200), build_epigraph_rep(sol, 200, 200)


@pytest.fixture(scope="session")
def merging_reps():
    sol = F.merging()
    return sol, build_hypograph_rep(sol, 200, 200), build_epigraph_rep(sol, 200, 200)


@pytest.fixture(scope="session")
def shock_reps():
    sol = F.shock()
    return sol, build_hypograph_rep(sol, 200, 200), build_epigraph_rep(sol, 200, 200)
