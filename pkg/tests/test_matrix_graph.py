import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cuntzkrieger.errors import ParseError, TooSmall, ZeroRowOrColumn
from cuntzkrieger.literals import parse_graph
from cuntzkrieger.matrix_graph import (
    admissible_words,
    brute_force_words,
    count_words,
    edge_matrix,
    is_aperiodic,
    is_permutation,
    is_strongly_connected_aperiodic,
    validate,
)

from conftest import FIB, FULL2, FULL4, IDENT2, PERM2


def _numpy_exponent(rows):
    M = np.array(rows, dtype=np.int64)
    n = len(rows)
    P = M.copy()
    for m in range(1, (n - 1) ** 2 + 2):
        if (P > 0).all():
            return m
        P = np.minimum(P @ M, 1)
    return None


def test_aperiodicity_frozen():
    assert is_aperiodic(validate(FIB)) == 2
    assert is_aperiodic(validate(IDENT2)) is None
    assert is_aperiodic(validate(PERM2)) is None
    assert is_aperiodic(validate(FULL2)) == 1
    assert is_aperiodic(validate(FULL4)) == 1
    # Wielandt's extremal matrix attains (n-1)^2 + 1
    wielandt = [[0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1], [1, 1, 0, 0]]
    assert is_aperiodic(validate(wielandt)) == 10


def test_validation_errors():
    with pytest.raises(TooSmall):
        validate([[1]])
    with pytest.raises(ParseError):
        validate([[1, 2], [1, 0]])
    with pytest.raises(ParseError):
        validate([[1, 1], [1]])
    with pytest.raises(ZeroRowOrColumn) as info:
        validate([[1, 0], [1, 0]])
    assert info.value.kind == "column" and info.value.index == 2


def test_words_frozen(fib):
    assert admissible_words(fib, 2) == [(1, 1), (1, 2), (2, 1)]
    assert admissible_words(fib, 3, end=[2]) == [(1, 1, 2), (2, 1, 2)]
    assert admissible_words(fib, 0) == [()]
    # Fibonacci counts
    assert [count_words(fib, k) for k in range(1, 8)] == [2, 3, 5, 8, 13, 21, 34]


def test_permutation_flag():
    assert is_permutation(validate(PERM2))
    assert is_permutation(validate(IDENT2))
    assert not is_permutation(validate(FIB))


square01 = st.integers(2, 4).flatmap(
    lambda n: st.lists(st.lists(st.integers(0, 1), min_size=n, max_size=n), min_size=n, max_size=n)
)


def _valid(rows):
    n = len(rows)
    return all(any(r) for r in rows) and all(any(rows[i][j] for i in range(n)) for j in range(n))


@settings(max_examples=120, deadline=None)
@given(square01.filter(_valid), st.integers(0, 5))
def test_words_against_brute_force(rows, k):
    A = validate(rows)
    words = admissible_words(A, k)
    assert words == sorted(words)
    if k:
        assert words == brute_force_words(A, k)
    assert len(words) == count_words(A, k)


@settings(max_examples=120, deadline=None)
@given(square01.filter(_valid))
def test_aperiodicity_against_numpy(rows):
    assert is_aperiodic(validate(rows)) == _numpy_exponent(rows)


def test_graph_edge_matrix():
    E = parse_graph("vertices: v w\nedge a v v\nedge b v w\nedge c w v\n")
    A = edge_matrix(E)
    assert A.tolist() == [[1, 1, 0], [0, 0, 1], [1, 1, 0]]
    assert is_strongly_connected_aperiodic(E)
    cycle = parse_graph("vertices: v w\nedge a v w\nedge b w v\n")
    assert not is_strongly_connected_aperiodic(cycle)
    with pytest.raises(TooSmall):
        parse_graph("vertices: v\nedge a v v\n")
