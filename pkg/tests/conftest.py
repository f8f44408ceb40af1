import re

import pytest

from rankone import CFSequence, IntegerLine, from_cutting_stacking, odometer

Z = IntegerLine()


def dyadic(depth):
    return odometer([1] + [2] * depth)


def triadic(depth):
    return odometer([1] + [3] * depth)


def chacon(depth):
    """h1 = 1, three copies per stage, one spacer on the middle copy."""
    return from_cutting_stacking([3] * (depth - 1), [[0, 1, 0]] * (depth - 1), 1)


def digit_chain(a_sizes, b_sizes):
    """Two integer sequences chain equivalent by construction.

    Digits alternate B_1, A_1, B_2, A_2, ... in a mixed radix; C_n = A_{n-1} + B_n
    and C'_n = B_n + A_n with F and F' the matching initial segments.
    """
    N = len(b_sizes)
    assert len(a_sizes) == N
    A, B = [[0]], []
    place = 1
    F, F2 = [[0]], [[0]]
    for n in range(N):
        B.append([place * j for j in range(b_sizes[n])])
        place *= b_sizes[n]
        F.append(range(place))
        A.append([place * j for j in range(a_sizes[n])])
        place *= a_sizes[n]
        F2.append(range(place))
    C = [sorted({a + b for a in A[n] for b in B[n]}) for n in range(N)]
    C2 = [sorted({b + a for b in B[n] for a in A[n + 1]}) for n in range(N)]
    return CFSequence(Z, F, C), CFSequence(Z, F2, C2), A, B


@pytest.fixture
def Zgroup():
    return Z


# one line per acceptance criterion at the end of the run ------------------------

_CRITERIA = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)", report.nodeid)
    if not m:
        return
    key = (int(m.group(1)), m.group(2))
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _CRITERIA[key] = "PASS" if report.outcome == "passed" else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for (num, name), verdict in sorted(_CRITERIA.items()):
        terminalreporter.write_line(f"criterion {num:2d} {name.replace('_', ' ')}: {verdict}")
