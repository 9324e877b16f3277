"""Shared network fixtures for the solver and harness tests."""

import numpy as np
import pytest

from dcnetsim.assembly import assemble
from dcnetsim.graphs import NetworkTopology
from dcnetsim.scenario import StateVector, generate_initial_state, generate_parameters

# small reference grids, edges oriented high-to-low node index
CASE4GS = NetworkTopology(
    n=4,
    edges=((2, 1), (3, 1), (4, 2), (4, 3)),
    generators=(4,),
    name="case4gs",
)

CASE9 = NetworkTopology(
    n=9,
    edges=(
        (4, 1), (5, 4), (6, 5), (6, 3), (7, 6),
        (8, 7), (8, 2), (9, 8), (9, 4),
    ),
    generators=(2, 3),
    name="case9",
)


@pytest.fixture(scope="session")
def scn4():
    return generate_parameters(CASE4GS, seed=1001)


@pytest.fixture(scope="session")
def sys4(scn4):
    return assemble(scn4)


@pytest.fixture(scope="session")
def x0_4(scn4):
    return generate_initial_state(scn4, seed=1002)


@pytest.fixture(scope="session")
def scn9():
    return generate_parameters(CASE9, seed=1009)


@pytest.fixture(scope="session")
def sys9(scn9):
    return assemble(scn9)


@pytest.fixture(scope="session")
def x0_9(scn9):
    return generate_initial_state(scn9, seed=1010)


def equilibrium_state(scn) -> np.ndarray:
    """Exact fixed point: I = loads, V = references, f = 0, phi = I.

    Generator loads are zero, so the communication coupling term
    vanishes and every right-hand-side row is exactly zero there.
    """
    return StateVector.pack(
        current=scn.i_load,
        voltage=scn.v_star,
        flow=np.zeros(scn.m),
        theta=np.zeros(scn.n),
        phi=scn.i_load,
    ).x
