"""Exact arithmetic in cyclotomic fields Q(zeta_N).

An element is stored in the power basis 1, z, ..., z^(phi(N)-1) of
Q(zeta_N) with rational coefficients, reduced modulo the N-th cyclotomic
polynomial.  Elements of different orders are lifted to the lcm of the
orders before they are combined.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from functools import lru_cache
from math import gcd
from numbers import Rational


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _poly_divmod(num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    # exact division by a monic integer polynomial, coefficients low -> high
    num = list(num)
    q = [0] * max(len(num) - len(den) + 1, 1)
    for shift in range(len(num) - len(den), -1, -1):
        c = num[shift + len(den) - 1]
        if c:
            q[shift] = c
            for k, d in enumerate(den):
                num[shift + k] -= c * d
    return q, num[: len(den) - 1]


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_n, lowest degree first."""
    if n < 1:
        raise ValueError("order must be positive")
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly, rem = _poly_divmod(poly, list(cyclotomic_polynomial(d)))
            assert not any(rem)
    while len(poly) > 1 and poly[-1] == 0:
        poly.pop()
    return tuple(poly)


def _reduce(coeffs: list[Fraction], n: int) -> tuple[Fraction, ...]:
    phi = cyclotomic_polynomial(n)
    deg = len(phi) - 1
    c = list(coeffs) + [Fraction(0)] * max(0, deg - len(coeffs))
    for top in range(len(c) - 1, deg - 1, -1):
        lead = c[top]
        if lead:
            base = top - deg
            for k in range(deg):
                if phi[k]:
                    c[base + k] -= lead * phi[k]
            c[top] = Fraction(0)
    return tuple(c[:deg])


class RootScalar:
    """An exact element of Q(zeta_N)."""

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs):
        self.order = order
        self.coeffs = _reduce([Fraction(c) for c in coeffs], order)

    @classmethod
    def _raw(cls, order: int, coeffs: tuple[Fraction, ...]) -> RootScalar:
        obj = object.__new__(cls)
        obj.order = order
        obj.coeffs = coeffs
        return obj

    # -- constructors -----------------------------------------------------
    @classmethod
    def rational(cls, q) -> RootScalar:
        return cls._raw(1, (Fraction(q),))

    @classmethod
    def root(cls, k: int, n: int, scale=1) -> RootScalar:
        """``scale * zeta_n**k``."""
        k %= n
        c = [Fraction(0)] * (k + 1)
        c[k] = Fraction(scale)
        return cls._raw(n, _reduce(c, n))

    @classmethod
    def coerce(cls, value) -> RootScalar:
        if isinstance(value, RootScalar):
            return value
        if isinstance(value, (int, Rational)):
            return cls.rational(value)
        raise TypeError(f"cannot interpret {value!r} as an exact scalar")

    # -- structure --------------------------------------------------------
    def lift(self, n: int) -> RootScalar:
        """Re-express in Q(zeta_n); ``self.order`` must divide ``n``."""
        if n == self.order:
            return self
        if n % self.order:
            raise ValueError(f"order {self.order} does not divide {n}")
        step = n // self.order
        c = [Fraction(0)] * (step * len(self.coeffs))
        for k, a in enumerate(self.coeffs):
            c[k * step] = a
        return RootScalar._raw(n, _reduce(c, n))

    def _common(self, other: RootScalar) -> tuple[RootScalar, RootScalar]:
        if self.order == other.order:
            return self, other
        n = _lcm(self.order, other.order)
        return self.lift(n), other.lift(n)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_one(self) -> bool:
        return self.coeffs[0] == 1 and not any(self.coeffs[1:])

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        try:
            other = RootScalar.coerce(other)
        except TypeError:
            return NotImplemented
        a, b = self._common(other)
        return RootScalar._raw(a.order, tuple(x + y for x, y in zip(a.coeffs, b.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return RootScalar._raw(self.order, tuple(-x for x in self.coeffs))

    def __sub__(self, other):
        try:
            other = RootScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return RootScalar.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Rational)):
            f = Fraction(other)
            return RootScalar._raw(self.order, tuple(x * f for x in self.coeffs))
        if not isinstance(other, RootScalar):
            return NotImplemented
        a, b = self._common(other)
        if a.order <= 2:
            return RootScalar._raw(a.order, (a.coeffs[0] * b.coeffs[0],))
        prod = [Fraction(0)] * (len(a.coeffs) + len(b.coeffs) - 1)
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in enumerate(b.coeffs):
                    if y:
                        prod[i + j] += x * y
        return RootScalar._raw(a.order, _reduce(prod, a.order))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = RootScalar.rational(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __truediv__(self, other):
        if isinstance(other, (int, Rational)):
            return self * (1 / Fraction(other))
        return self * RootScalar.coerce(other).inverse()

    def conjugate(self) -> RootScalar:
        n = self.order
        c = [Fraction(0)] * n
        for k, a in enumerate(self.coeffs):
            c[(-k) % n] += a
        return RootScalar._raw(n, _reduce(c, n))

    def inverse(self) -> RootScalar:
        if self.is_zero():
            raise ZeroDivisionError("zero has no inverse")
        n = self.order
        deg = len(self.coeffs)
        # columns: self * z^j in the power basis; solve M x = e_0
        cols = []
        basis_elem = RootScalar.rational(1).lift(n) if n > 1 else RootScalar.rational(1)
        z = RootScalar.root(1, n)
        for _ in range(deg):
            cols.append((self * basis_elem).coeffs)
            basis_elem = basis_elem * z
        rows = [[cols[j][i] for j in range(deg)] + [Fraction(int(i == 0))] for i in range(deg)]
        for col in range(deg):
            piv = next(r for r in range(col, deg) if rows[r][col] != 0)
            rows[col], rows[piv] = rows[piv], rows[col]
            p = rows[col][col]
            rows[col] = [v / p for v in rows[col]]
            for r in range(deg):
                if r != col and rows[r][col] != 0:
                    f = rows[r][col]
                    rows[r] = [v - f * w for v, w in zip(rows[r], rows[col])]
        return RootScalar._raw(n, tuple(rows[i][deg] for i in range(deg)))

    # -- comparison / conversion -----------------------------------------
    def __eq__(self, other):
        try:
            other = RootScalar.coerce(other)
        except TypeError:
            return NotImplemented
        a, b = self._common(other)
        return a.coeffs == b.coeffs

    __hash__ = None  # type: ignore[assignment]

    def __complex__(self) -> complex:
        n = self.order
        return sum(
            (float(a) * cmath.exp(2j * cmath.pi * k / n) for k, a in enumerate(self.coeffs) if a),
            0j,
        )

    def __repr__(self) -> str:
        return f"RootScalar({self.order}, {[str(c) for c in self.coeffs]})"

    def __str__(self) -> str:
        return format_scalar(self)


ONE = RootScalar.rational(1)
ZERO = RootScalar.rational(0)


def _monomial(a: Fraction, k: int) -> str:
    mag = abs(a)
    if k == 0:
        body = str(mag)
    else:
        zpart = "z" if k == 1 else f"z^{k}"
        body = zpart if mag == 1 else f"{mag} {zpart}"
    return body


def format_scalar(x: RootScalar, order: int | None = None) -> str:
    """Render as ``a/b z^k`` monomials; multi-term values are parenthesized.

    ``z`` stands for zeta_order; pass ``order`` to render in a larger field.
    """
    if order is not None:
        x = x.lift(order)
    parts = [(a, k) for k, a in enumerate(x.coeffs) if a]
    if not parts:
        return "0"
    out = []
    for idx, (a, k) in enumerate(parts):
        m = _monomial(a, k)
        if idx == 0:
            out.append(m if a > 0 else f"-{m}")
        else:
            out.append(f"{'+' if a > 0 else '-'} {m}")
    text = " ".join(out)
    return f"({text})" if len(parts) > 1 else text
