import warnings

import pytest

from artifact.cartan import AlgebraKind
from artifact.clifford import CliffordType, build_fock

warnings.filterwarnings("ignore", message="D_3 is isomorphic")

B2, B3 = AlgebraKind("B", 2), AlgebraKind("B", 3)
D3, D4 = AlgebraKind("D", 3), AlgebraKind("D", 4)
ALL_KINDS = [B2, B3, D3, D4]

# criterion number -> (passed, detail); filled by test_acceptance, printed at the end
ACCEPTANCE: dict = {}


@pytest.fixture(scope="session")
def d3_half():
    return build_fock(CliffordType(D3, "Z+1/2"), "7/2", trials=2)


@pytest.fixture(scope="session")
def b2_z():
    return build_fock(CliffordType(B2, "Z"), 3, trials=2)


@pytest.fixture(scope="session")
def d3_half_small():
    return build_fock(CliffordType(D3, "Z+1/2"), 2, trials=1)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})")
