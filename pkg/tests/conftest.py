import pytest

from cuntzkrieger.matrix_graph import validate

FIB = [[1, 1], [1, 0]]
FULL2 = [[1, 1], [1, 1]]
PERM2 = [[0, 1], [1, 0]]
IDENT2 = [[1, 0], [0, 1]]
FULL3 = [[1] * 3 for _ in range(3)]
FULL4 = [[1] * 4 for _ in range(4)]
# three letters, columns 1 and 2 equal: two minimal diagonal projections
MIXED3 = [[1, 1, 0], [1, 1, 1], [0, 0, 1]]


@pytest.fixture
def fib():
    return validate(FIB)


@pytest.fixture
def full2():
    return validate(FULL2)


@pytest.fixture
def perm2():
    return validate(PERM2)


@pytest.fixture
def full3():
    return validate(FULL3)


@pytest.fixture
def mixed3():
    return validate(MIXED3)


@pytest.fixture(params=["fib", "full2", "perm2"])
def corpus(request):
    return validate({"fib": FIB, "full2": FULL2, "perm2": PERM2}[request.param])


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[number])
