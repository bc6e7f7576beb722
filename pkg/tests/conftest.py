import pytest

from rewritelen.automorphisms import automorphism_set
from rewritelen.groups import build_group_from_generators, builtin_group

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def a5():
    return builtin_group("alternating", 5)


@pytest.fixture(scope="session")
def a5_aut(a5):
    return automorphism_set(a5)


@pytest.fixture(scope="session")
def s3():
    return builtin_group("symmetric", 3)


@pytest.fixture(scope="session")
def d4():
    return builtin_group("dihedral", 4)


@pytest.fixture(scope="session")
def q8():
    return builtin_group("quaternion", 8)


@pytest.fixture(scope="session")
def klein():
    return build_group_from_generators(["(1,2)(3,4)", "(1,3)(2,4)"])


SMALL_GROUPS = [
    ("symmetric", 3),
    ("dihedral", 4),
    ("quaternion", 8),
    ("alternating", 4),
    ("cyclic", 6),
    ("dihedral", 5),
]


@pytest.fixture(scope="session", params=SMALL_GROUPS, ids=lambda p: f"{p[0]}{p[1]}")
def small_group(request):
    table = builtin_group(*request.param)
    return table, automorphism_set(table)
