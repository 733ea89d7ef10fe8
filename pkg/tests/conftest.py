"""Shared fixtures: the published coefficient rows and small built bases."""

from __future__ import annotations

import pytest


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo the one-line-per-criterion acceptance results at the end."""
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)

from cssldpc.base import TwoBranchCoefficients, build_base, census
from cssldpc.certify import code_params
from cssldpc.gf import make_field

# (label, p, e, m, a0, b0, a1, b1, n, k, n_xz2, n6)
TABLE_ROWS = {
    "f7_36": ("(3,6) F7", 7, 1, 3, (0, 1, 3), (2, 4, 5), (0, 3, 1), (4, 2, 5),
              42, 10, 189, (168, 168)),
    "f9_38": ("(3,8) F9", 3, 2, 4, (0, 1, 4), (2, 7, 5), (0, 4, 2), (3, 5, 8),
              72, 22, 324, (432, 432)),
    "f11_310": ("(3,10) F11", 11, 1, 5, (0, 1, 2), (3, 4, 5), (0, 2, 1), (4, 3, 5),
                110, 48, 495, (880, 880)),
    "f13_312": ("(3,12) F13", 13, 1, 6, (11, 6, 5), (12, 1, 9), (1, 4, 10), (2, 11, 7),
                156, 82, 702, (1560, 1560)),
    "f17_316": ("(3,16) F17", 17, 1, 8, (0, 1, 2), (3, 4, 5), (0, 3, 6), (5, 8, 11),
                272, 174, 1224, (3808, 3808)),
    "f13_48": ("(4,8) F13", 13, 1, 4, (0, 1, 6, 5), (12, 9, 10, 7), (0, 10, 12, 2), (8, 9, 3, 4),
               104, 6, 832, (1456, 1456)),
    "f16_310": ("(3,10) F16", 2, 4, 5, (0, 1, 2), (7, 3, 6), (8, 13, 2), (11, 10, 6),
                160, 76, 720, (800, 800)),
    "f11_510": ("(5,10) F11", 11, 1, 5, (4, 3, 9, 6, 2), (1, 0, 10, 8, 5),
                (8, 6, 10, 2, 7), (4, 5, 3, 9, 1), 110, 8, 1375, (8800, 8800)),
    "f17_416": ("(4,16) F17", 17, 1, 8, (0, 1, 14, 10), (11, 13, 5, 9), (0, 6, 16, 13), (11, 1, 7, 4),
                272, 142, 2176, (15232, 15232)),
    "f31_330": ("(3,30) F31", 31, 1, 15, (0, 1, 2), (3, 4, 5), (0, 3, 6), (11, 14, 4),
                930, 748, 4185, (26040, 26040)),
}


def coefficients_for(key: str) -> TwoBranchCoefficients:
    _, p, e, m, a0, b0, a1, b1, *_ = TABLE_ROWS[key]
    return TwoBranchCoefficients(make_field(p, e), m, a0, b0, a1, b1)


@pytest.fixture(scope="session")
def f7_coeffs():
    return coefficients_for("f7_36")


@pytest.fixture(scope="session")
def f7_pair(f7_coeffs):
    return build_base(f7_coeffs)


@pytest.fixture(scope="session")
def f7_census(f7_pair):
    return census(f7_pair)


@pytest.fixture(scope="session")
def f7_code(f7_pair):
    return code_params(f7_pair)


@pytest.fixture(scope="session")
def f9_pair():
    return build_base(coefficients_for("f9_38"))


@pytest.fixture(scope="session")
def f11_pair():
    return build_base(coefficients_for("f11_310"))


@pytest.fixture(scope="session")
def f16_coeffs():
    return coefficients_for("f16_310")


@pytest.fixture(scope="session")
def f16_pair(f16_coeffs):
    return build_base(f16_coeffs)
