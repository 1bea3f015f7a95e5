import pytest

from cuntzkrieger.ck_algebra import core_norm, p, s, s_star, unit, word
from cuntzkrieger.errors import DepthTooSmall
from cuntzkrieger.matrix_graph import count_words
from cuntzkrieger.numeric_oracle import (
    TruncatedRep,
    norm_estimate,
    oracle_check,
    oracle_check_product,
    represent,
)


def test_basis_size(fib):
    rep = TruncatedRep(fib, 6)
    assert rep.dim == sum(count_words(fib, k) for k in range(7))
    assert [len(rep.basis[k]) for k in rep.interior(2)] == sorted(len(rep.basis[k]) for k in rep.interior(2))
    assert all(2 < len(rep.basis[k]) <= 4 for k in rep.interior(2))


def test_detects_differences(corpus):
    assert oracle_check(p(corpus, 1), p(corpus, 1))
    assert not oracle_check(p(corpus, 1), p(corpus, 2))
    assert not oracle_check(unit(corpus), p(corpus, 1))


def test_product_route(fib):
    x = s(fib, 1) * s_star(fib, 2)
    y = s(fib, 2) * s_star(fib, 1)
    assert oracle_check_product([x, y], x * y)
    assert not oracle_check_product([x, y], y * x)


def test_depth_errors(fib):
    with pytest.raises(DepthTooSmall):
        represent(word(fib, (1, 1, 1), (1,)), L=3)
    with pytest.raises(DepthTooSmall):
        oracle_check(p(fib, 1), p(fib, 1), L=4, d=2)


@pytest.mark.parametrize(
    "x_factory",
    [
        lambda A: p(A, 1) + word(A, (1,), (2,)) + word(A, (2,), (1,)),
        lambda A: word(A, (1, 1), (2, 1), 3) - p(A, 2),
        lambda A: unit(A),
    ],
)
def test_norm_gap_at_depth_14(corpus, x_factory):
    x = x_factory(corpus)
    if x.is_zero():
        return
    exact = core_norm(x)
    est = norm_estimate(x, L=14)
    assert est <= exact + 1e-6
    assert exact - est < 1e-6
