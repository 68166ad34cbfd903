from __future__ import annotations

import pytest

from shelldecay import PotentialSpec, build_modes, find_poles
from shelldecay._jit import HAVE_NUMBA, use_backend

# filled by tests/test_acceptance.py: criterion -> list of (label, passed, detail)
ACCEPTANCE: dict[int, list[tuple[str, bool, str]]] = {}


@pytest.fixture(scope="session")
def spec12():
    return PotentialSpec(12.0, 1.0)


@pytest.fixture(scope="session")
def poles12(spec12):
    return find_poles(spec12, 400)


@pytest.fixture(scope="session")
def modes12(spec12, poles12):
    return build_modes(spec12, poles12)


@pytest.fixture(scope="session")
def tau12(poles12):
    return poles12[0].lifetime


BACKENDS = ["numba", "numpy"] if HAVE_NUMBA else ["numpy"]


@pytest.fixture(params=BACKENDS)
def backend(request):
    with use_backend(request.param):
        yield request.param


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        checks = ACCEPTANCE[number]
        ok = all(passed for _, passed, _ in checks)
        detail = "; ".join(f"{label}: {'ok' if passed else 'FAIL'} ({info})" for label, passed, info in checks)
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'} -- {detail}")
