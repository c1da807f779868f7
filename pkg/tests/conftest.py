import numpy as np
import pytest

from geomotion import Configuration, TangentVector, load_bundled, load_model

from oracles import pendulum_oracle, planar2_oracle

GANTRY_YAML = """
name: gantry
joints:
  - kind: prismatic
    axis: [1.0, 0.0, 0.0]
    origin: {xyz: [0.0, 0.0, 0.0], rpy: [0.0, 0.0, 0.0]}
  - kind: prismatic
    axis: [0.0, 1.0, 0.0]
    origin: {xyz: [0.0, 0.0, 0.0], rpy: [0.0, 0.0, 0.0]}
links:
  - mass: 2.0
    com: [0.0, 0.0, 0.0]
    inertia: [0.1, 0.1, 0.1, 0.0, 0.0, 0.0]
  - mass: 1.0
    com: [0.0, 0.0, 0.0]
    inertia: [0.05, 0.05, 0.05, 0.0, 0.0, 0.0]
"""


@pytest.fixture(scope="session")
def pendulum():
    return load_bundled("pendulum")


@pytest.fixture(scope="session")
def planar2():
    return load_bundled("planar2")


@pytest.fixture(scope="session")
def arm7():
    return load_bundled("arm7")


@pytest.fixture(scope="session")
def gantry():
    """2-DoF prismatic stage: exactly constant metric diag(3, 1)."""
    return load_model(GANTRY_YAML)


@pytest.fixture(scope="session")
def pend_oracle():
    return pendulum_oracle()


@pytest.fixture(scope="session")
def p2_oracle():
    return planar2_oracle()


@pytest.fixture
def rng():
    return np.random.default_rng(0)


def cfg(*values):
    return Configuration(np.asarray(values, dtype=float))


def tangent(base, *values):
    return TangentVector(base, np.asarray(values, dtype=float))


@pytest.fixture(scope="session")
def q_ref():
    return cfg(0.0, np.pi / 2)
