import math

import numpy as np
import pytest
from hypothesis import settings

from nonrecip import CyclicAtomParams

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

FLUXES = (math.pi / 2, 0.0, -math.pi / 2)


@pytest.fixture
def ref_atom():
    """Reference drive and decay parameters at zero flux."""
    return CyclicAtomParams(
        omega_ab=1.0, omega_ca=10.0, omega_cb=10.0,
        gamma_a=0.1, gamma_b=0.1, gamma_c=100.0,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion."""

    def record(label, passed, detail):
        line = f"{'PASS' if passed else 'FAIL'}  {label}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
