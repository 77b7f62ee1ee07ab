"""Shared fixtures.

The default-grid sweeps cost ~30 s each on a single core, so each is
built at most once per session and shared between the sweep tests and
the acceptance suite.
"""

import pytest

from hftkyle.sweeps import SweepSpec, run_sweep


@pytest.fixture(scope="session")
def sweep_theta1_tiny():
    return run_sweep(SweepSpec(theta1=1e-4))


@pytest.fixture(scope="session")
def sweep_theta1_tenth():
    return run_sweep(SweepSpec(theta1=0.1))


@pytest.fixture(scope="session")
def sweep_theta1_one():
    return run_sweep(SweepSpec(theta1=1.0))


@pytest.fixture(scope="session")
def default_sweeps(sweep_theta1_tiny, sweep_theta1_tenth, sweep_theta1_one):
    """Default-grid sweep rows keyed by theta1."""
    return {1e-4: sweep_theta1_tiny, 0.1: sweep_theta1_tenth,
            1.0: sweep_theta1_one}
