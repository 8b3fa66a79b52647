import warnings

import numpy as np
import pytest

from bnsf_shock import (
    GasConstants,
    State,
    builtin_models,
    make_field,
    normalize_phase,
    shoot,
    verify_profile,
)

EPS_GRID = (0.1, 0.05, 0.025, 0.0125)
MODELS = ("constant", "eek")

# one "[PASS]/[FAIL] n. ..." line per acceptance criterion, echoed after the
# run so they survive pytest's output capture
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def gas():
    return GasConstants(R=1.0, gamma=1.4)


@pytest.fixture(scope="session")
def left_unit():
    return State(1.0, 0.0, 1.0)


@pytest.fixture(scope="session")
def profile_db(gas, left_unit):
    """All (model, eps) profiles of the construction suite, shot once.

    Values are (profile, shoot_seconds) pairs; profiles are phase-normalized.
    """
    import time

    db = {}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for model in MODELS:
            coeffs = builtin_models(model)
            for eps in EPS_GRID:
                field = make_field(left_unit, eps, 3, gas, coeffs)
                t0 = time.perf_counter()
                prof = shoot(field)
                dt = time.perf_counter() - t0
                db[(model, eps)] = (normalize_phase(prof), dt)
    return db


@pytest.fixture(scope="session")
def report_db(profile_db, gas):
    """Estimate reports for every profile of the construction suite."""
    return {
        key: verify_profile(prof, prof.shock.A, gas)
        for key, (prof, _) in profile_db.items()
    }
