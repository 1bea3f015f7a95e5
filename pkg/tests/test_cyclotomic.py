import cmath
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from cuntzkrieger.cyclotomic import ONE, ZERO, RootScalar, cyclotomic_polynomial, format_scalar


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6, 8, 9, 12, 15, 20, 24])
def test_cyclotomic_polynomial_matches_sympy(n):
    x = sympy.Symbol("x")
    expected = sympy.Poly(sympy.cyclotomic_poly(n, x), x).all_coeffs()[::-1]
    assert list(cyclotomic_polynomial(n)) == [int(c) for c in expected]


def test_frozen_small_polynomials():
    assert cyclotomic_polynomial(12) == (1, 0, -1, 0, 1)
    assert cyclotomic_polynomial(6) == (1, -1, 1)


def test_root_identities():
    z3 = RootScalar.root(1, 3)
    assert z3 ** 3 == ONE
    assert ONE + z3 + z3 ** 2 == ZERO
    assert RootScalar.root(1, 4) ** 2 == RootScalar.rational(-1)
    # zeta_6 = -zeta_3^2
    assert RootScalar.root(1, 6) == -(z3 ** 2)
    assert RootScalar.root(2, 12) == RootScalar.root(1, 6)


def test_equality_across_fields():
    assert RootScalar.root(3, 12) == RootScalar.root(1, 4)
    assert RootScalar.rational(Fraction(1, 2)) == RootScalar.root(0, 5, Fraction(1, 2))
    assert RootScalar.root(1, 3) != RootScalar.root(1, 6)


def test_conjugate_and_inverse():
    x = RootScalar.root(1, 12, 2) + RootScalar.rational(3)
    assert x * x.inverse() == ONE
    assert abs(complex(x.conjugate()) - complex(x).conjugate()) < 1e-12
    with pytest.raises(ZeroDivisionError):
        ZERO.inverse()


def test_format():
    assert format_scalar(ONE) == "1"
    assert format_scalar(RootScalar.root(1, 3), 3) == "z"
    assert format_scalar(RootScalar.root(2, 3), 3) == "(-1 - z)"


elements = st.builds(
    lambda n, cs: RootScalar(n, [Fraction(c) for c in cs]),
    st.sampled_from([1, 2, 3, 4, 6, 12]),
    st.lists(st.integers(-5, 5), min_size=1, max_size=4),
)


@settings(max_examples=80, deadline=None)
@given(elements, elements, elements)
def test_field_laws_against_complex(a, b, c):
    assert abs(complex(a * (b + c)) - (complex(a) * (complex(b) + complex(c)))) < 1e-9
    assert (a + b) * c == a * c + b * c
    assert (a * b).conjugate() == a.conjugate() * b.conjugate()
    if not b.is_zero():
        assert (a / b) * b == a


def test_complex_value():
    assert abs(complex(RootScalar.root(1, 8)) - cmath.exp(2j * cmath.pi / 8)) < 1e-15
