"""Exact arithmetic in the dense *-subalgebra of O_A spanned by s_mu s_nu^*.

An element is a map from word pairs ``(mu, nu)`` to exact cyclotomic
coefficients.  Every stored pair is admissible and nonvanishing, i.e. the
rows of A at the last letters of mu and nu share a common 1.

Canonical form
--------------
s_mu s_nu^* equals the sum of s_{mu l} s_{nu l}^* over the common admissible
extensions l.  Each homogeneous part is expanded to the least level at which
all long words have the same length and matching last letters (a unique
representation, since such pairs live in pairwise orthogonal corners), and
then complete equal-coefficient extension blocks are contracted, longest
first, until nothing changes.  The result depends only on the value of the
element.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from numbers import Rational
from typing import Iterable, Mapping

import numpy as np

from .cyclotomic import ONE, RootScalar
from .errors import IndexOutOfRange, LevelTooSmall, MatrixMismatch, MixedDegree
from .matrix_graph import Word, ZeroOneMatrix, admissible_words

Pair = tuple[Word, Word]


def ext_letters(A: ZeroOneMatrix, mu: Word, nu: Word) -> tuple[int, ...]:
    """Letters l for which both mu+l and nu+l are admissible."""
    a = A.successors[mu[-1] if mu else 0]
    if not nu:
        return a
    b = set(A.successors[nu[-1]])
    return tuple(l for l in a if l in b)


def nonvanishing(A: ZeroOneMatrix, mu: Word, nu: Word) -> bool:
    return A.admissible(mu) and A.admissible(nu) and bool(ext_letters(A, mu, nu))


def _matched(pair: Pair) -> bool:
    mu, nu = pair
    return bool(mu) and bool(nu) and mu[-1] == nu[-1]


def _extend(A: ZeroOneMatrix, pair: Pair, steps: int) -> list[Pair]:
    out = [pair]
    for _ in range(steps):
        out = [(m + (l,), v + (l,)) for m, v in out for l in ext_letters(A, m, v)]
    return out


def _degree(pair: Pair) -> int:
    return len(pair[0]) - len(pair[1])


def _accumulate(acc: dict, pair: Pair, c: RootScalar) -> None:
    if pair in acc:
        s = acc[pair] + c
        if s.is_zero():
            del acc[pair]
        else:
            acc[pair] = s
    elif not c.is_zero():
        acc[pair] = c


def _sufficient_level(terms: Iterable[Pair]) -> int:
    terms = list(terms)
    if not terms:
        return 0
    M = max(len(m) for m, _ in terms)
    if any(len(m) == M and not _matched((m, v)) for m, v in terms):
        M += 1
    return M


def _expand_part(A: ZeroOneMatrix, terms: Mapping[Pair, RootScalar], M: int) -> dict:
    out: dict = {}
    for pair, c in terms.items():
        steps = M - len(pair[0])
        if steps < 0:
            raise LevelTooSmall(f"term {pair} is longer than level {M}")
        if steps == 0 and not _matched(pair):
            raise LevelTooSmall(f"term {pair} cannot be terminal-matched at level {M}")
        for q in _extend(A, pair, steps):
            _accumulate(out, q, c)
    return out


def _expand_exact(A: ZeroOneMatrix, terms: Mapping[Pair, RootScalar], k: int) -> dict:
    """Expand every term so that the left word has length exactly k (no matching)."""
    out: dict = {}
    for pair, c in terms.items():
        steps = k - len(pair[0])
        if steps < 0:
            raise LevelTooSmall(f"term {pair} is longer than level {k}")
        for q in _extend(A, pair, steps):
            _accumulate(out, q, c)
    return out


def _contract(A: ZeroOneMatrix, terms: dict) -> dict:
    terms = dict(terms)
    while True:
        parents = {(m[:-1], v[:-1]) for m, v in terms if _matched((m, v))}
        changed = False
        for parent in sorted(parents, key=lambda p: (-len(p[0]), p)):
            mu, nu = parent
            letters = ext_letters(A, mu, nu)
            members = [(mu + (l,), nu + (l,)) for l in letters]
            coeffs = [terms.get(q) for q in members]
            if any(c is None for c in coeffs):
                continue
            c0 = coeffs[0]
            if any(c != c0 for c in coeffs[1:]):
                continue
            for q in members:
                del terms[q]
            _accumulate(terms, parent, c0)
            changed = True
        if not changed:
            return terms


def _canonical(A: ZeroOneMatrix, terms: Mapping[Pair, RootScalar]) -> dict:
    parts: dict[int, dict] = defaultdict(dict)
    for pair, c in terms.items():
        parts[_degree(pair)][pair] = c
    out: dict = {}
    for d in sorted(parts):
        part = parts[d]
        M = _sufficient_level(part)
        out.update(_contract(A, _expand_part(A, part, M)))
    return dict(sorted(out.items()))


def _product_pairs(A: ZeroOneMatrix, mu: Word, nu: Word, rho: Word, tau: Word) -> list[Pair]:
    """(s_mu s_nu^*)(s_rho s_tau^*) as a sum of word pairs (unit coefficients)."""
    if nu == rho:
        if not nu:
            return [(mu, tau)]
        return [(mu + (l,), tau + (l,)) for l in A.successors[nu[-1]]]
    if len(rho) > len(nu) and rho[: len(nu)] == nu:
        lam = rho[len(nu):]
        if nu and not A(nu[-1], lam[0]):
            return []
        if mu and not A(mu[-1], lam[0]):
            return []
        return [(mu + lam, tau)]
    if len(nu) > len(rho) and nu[: len(rho)] == rho:
        lam = nu[len(rho):]
        if rho and not A(rho[-1], lam[0]):
            return []
        if tau and not A(tau[-1], lam[0]):
            return []
        return [(mu, tau + lam)]
    return []


def _as_scalar(value) -> RootScalar | None:
    if isinstance(value, RootScalar):
        return value
    if isinstance(value, (int, Rational)):
        return RootScalar.rational(value)
    return None


class CKElement:
    """Finite linear combination of s_mu s_nu^* in canonical form."""

    __slots__ = ("A", "terms")

    def __init__(self, A: ZeroOneMatrix, terms: Mapping[Pair, object] | None = None, *, canonical=False):
        self.A = A
        if canonical:
            self.terms = dict(terms or {})
            return
        clean: dict = {}
        for (mu, nu), c in (terms or {}).items():
            mu, nu = tuple(mu), tuple(nu)
            if not nonvanishing(A, mu, nu):
                continue
            _accumulate(clean, (mu, nu), RootScalar.coerce(c))
        self.terms = _canonical(A, clean)

    # -- basic structure ---------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> list[int]:
        return sorted({_degree(p) for p in self.terms})

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def degree(self) -> int:
        ds = self.degrees()
        if len(ds) > 1:
            raise MixedDegree(f"element has degrees {ds}")
        return ds[0] if ds else 0

    def parts(self) -> dict[int, CKElement]:
        out: dict[int, dict] = defaultdict(dict)
        for p, c in self.terms.items():
            out[_degree(p)][p] = c
        return {d: CKElement(self.A, t, canonical=True) for d, t in sorted(out.items())}

    def max_length(self) -> int:
        return max((max(len(m), len(v)) for m, v in self.terms), default=0)

    def coefficient(self, mu: Word, nu: Word = ()) -> RootScalar:
        return self.terms.get((tuple(mu), tuple(nu)), RootScalar.rational(0))

    def scalar_order(self) -> int:
        from math import lcm

        return lcm(1, *(c.order for c in self.terms.values()))

    # -- arithmetic ----------------------------------------------------------
    def _check(self, other: CKElement) -> None:
        if other.A != self.A:
            raise MatrixMismatch("elements live over different matrices")

    def __add__(self, other):
        if isinstance(other, CKElement):
            self._check(other)
            acc = dict(self.terms)
            for p, c in other.terms.items():
                _accumulate(acc, p, c)
            return CKElement(self.A, acc)
        s = _as_scalar(other)
        if s is None:
            return NotImplemented
        return self + s * unit(self.A)

    __radd__ = __add__

    def __neg__(self):
        return CKElement(self.A, {p: -c for p, c in self.terms.items()}, canonical=True)

    def __sub__(self, other):
        if isinstance(other, CKElement):
            return self + (-other)
        s = _as_scalar(other)
        if s is None:
            return NotImplemented
        return self + (-s)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, s) -> CKElement:
        s = RootScalar.coerce(s)
        if s.is_zero():
            return CKElement(self.A, {}, canonical=True)
        return CKElement(self.A, {p: c * s for p, c in self.terms.items()}, canonical=True)

    def __mul__(self, other):
        if isinstance(other, CKElement):
            return multiply(self, other)
        s = _as_scalar(other)
        if s is None:
            return NotImplemented
        return self.scale(s)

    def __rmul__(self, other):
        s = _as_scalar(other)
        if s is None:
            return NotImplemented
        return self.scale(s)

    def __pow__(self, k: int) -> CKElement:
        if k < 0:
            raise ValueError("negative powers are not defined")
        result = unit(self.A)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def adjoint(self) -> CKElement:
        return CKElement(self.A, {(v, m): c.conjugate() for (m, v), c in self.terms.items()})

    @property
    def star(self) -> CKElement:
        return self.adjoint()

    def __eq__(self, other):
        if isinstance(other, CKElement):
            return equals(self, other)
        s = _as_scalar(other)
        if s is None:
            return NotImplemented
        return equals(self, s * unit(self.A))

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        from .literals import format_element

        return f"CKElement({format_element(self)!r})"


def multiply(x: CKElement, y: CKElement) -> CKElement:
    x._check(y)
    A = x.A
    acc: dict = {}
    for (mu, nu), a in x.terms.items():
        for (rho, tau), b in y.terms.items():
            pairs = _product_pairs(A, mu, nu, rho, tau)
            if pairs:
                c = a * b
                for q in pairs:
                    if nonvanishing(A, *q):
                        _accumulate(acc, q, c)
    return CKElement(A, acc)


def adjoint(x: CKElement) -> CKElement:
    return x.adjoint()


# -- generators ----------------------------------------------------------------
def _letter(A: ZeroOneMatrix, i: int) -> int:
    if not 1 <= i <= A.n:
        raise IndexOutOfRange(f"letter {i} outside 1..{A.n}")
    return i


def unit(A: ZeroOneMatrix) -> CKElement:
    return CKElement(A, {((), ()): ONE}, canonical=True)


def zero(A: ZeroOneMatrix) -> CKElement:
    return CKElement(A, {}, canonical=True)


def s(A: ZeroOneMatrix, i: int) -> CKElement:
    return CKElement(A, {((_letter(A, i),), ()): ONE})


def s_star(A: ZeroOneMatrix, i: int) -> CKElement:
    return CKElement(A, {((), (_letter(A, i),)): ONE})


def p(A: ZeroOneMatrix, i: int) -> CKElement:
    i = _letter(A, i)
    return CKElement(A, {((i,), (i,)): ONE})


def q(A: ZeroOneMatrix, i: int) -> CKElement:
    i = _letter(A, i)
    return CKElement(A, {((j,), (j,)): ONE for j in A.successors[i]})


def word(A: ZeroOneMatrix, mu: Iterable[int], nu: Iterable[int] = (), coeff=1) -> CKElement:
    """coeff * s_mu s_nu^*; zero if the pair vanishes."""
    return CKElement(A, {(tuple(mu), tuple(nu)): coeff})


def generator(A: ZeroOneMatrix, kind: str, i: int | None = None) -> CKElement:
    kinds = {"s": s, "s*": s_star, "q": q, "p": p}
    if kind == "unit":
        return unit(A)
    if kind not in kinds:
        raise ValueError(f"unknown generator kind {kind!r}")
    if i is None:
        raise IndexOutOfRange("generator index required")
    return kinds[kind](A, i)


# -- leveled forms -----------------------------------------------------------------
@dataclass
class LeveledForm:
    """Terminal-matched expansion: |mu| = level, |nu| = level - degree, equal last letters."""

    A: ZeroOneMatrix
    level: int
    degree: int
    terms: dict = field(default_factory=dict)

    def contract(self) -> CKElement:
        return CKElement(self.A, self.terms)

    def blocks(self) -> dict[int, tuple[list[Word], list[Word], np.ndarray]]:
        """One complex matrix per terminal letter; rows/columns are the words present."""
        by_end: dict[int, dict] = defaultdict(dict)
        for (m, v), c in self.terms.items():
            by_end[m[-1]][(m, v)] = complex(c)
        out = {}
        for l, entries in sorted(by_end.items()):
            rows = sorted({m for m, _ in entries})
            cols = sorted({v for _, v in entries})
            ri = {w: k for k, w in enumerate(rows)}
            ci = {w: k for k, w in enumerate(cols)}
            mat = np.zeros((len(rows), len(cols)), dtype=complex)
            for (m, v), c in entries.items():
                mat[ri[m], ci[v]] = c
            out[l] = (rows, cols, mat)
        return out


def sufficient_level(x: CKElement) -> int:
    """Least level at which the (homogeneous) element can be terminal-matched."""
    return _sufficient_level(x.terms)


def expand_to_level(x: CKElement, M: int) -> LeveledForm:
    d = x.degree()
    if x.terms:
        if M < max(len(m) for m, _ in x.terms) or M - d < 0:
            raise LevelTooSmall(f"level {M} is below the longest word")
    terms = _expand_part(x.A, x.terms, M)
    return LeveledForm(x.A, M, d, dict(sorted(terms.items())))


def expand_words(x: CKElement, k: int) -> dict:
    """Coefficients of x on pairs with left word of length exactly k (no terminal matching)."""
    return _expand_exact(x.A, x.terms, k)


def equals(x: CKElement, y: CKElement) -> bool:
    x._check(y)
    xp, yp = x.parts(), y.parts()
    for d in set(xp) | set(yp):
        a = xp.get(d, zero(x.A))
        b = yp.get(d, zero(x.A))
        M = max(sufficient_level(a), sufficient_level(b))
        if expand_to_level(a, M).terms != expand_to_level(b, M).terms:
            return False
    return True


def core_norm(x: CKElement) -> float:
    """Exact operator norm of a degree-0 element through its finite-dimensional blocks."""
    if x.is_zero():
        return 0.0
    if x.degree() != 0:
        raise MixedDegree("core_norm needs a degree-0 element")
    form = expand_to_level(x, sufficient_level(x))
    return max(float(np.linalg.norm(mat, 2)) for _, _, mat in form.blocks().values())


# -- commutant structure ---------------------------------------------------------
def commutes(x: CKElement, y: CKElement) -> bool:
    return equals(x * y, y * x)


def in_diagonal_commutant(x: CKElement) -> bool:
    return all(commutes(x, q(x.A, i)) for i in range(1, x.A.n + 1))


def _rational_nullspace(rows: list[list[Fraction]], ncols: int) -> list[list[Fraction]]:
    mat = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((k for k in range(r, len(mat)) if mat[k][c] != 0), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        lead = mat[r][c]
        mat[r] = [v / lead for v in mat[r]]
        for k in range(len(mat)):
            if k != r and mat[k][c] != 0:
                f = mat[k][c]
                mat[k] = [a - f * b for a, b in zip(mat[k], mat[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        vec = [Fraction(0)] * ncols
        vec[f] = Fraction(1)
        for row, pc in enumerate(pivots):
            vec[pc] = -mat[row][f]
        basis.append(vec)
    return basis


def level_pairs(A: ZeroOneMatrix, k: int) -> list[Pair]:
    words = admissible_words(A, k)
    return [(m, v) for m, v in product(words, words) if nonvanishing(A, m, v)]


def commutant_nullspace(A: ZeroOneMatrix, pairs: list[Pair]) -> list[CKElement]:
    """Exact basis of {x in span(pairs) : [x, q_i] = 0 for all i}."""
    if not pairs:
        return []
    k = max(len(m) for m, _ in pairs)
    cols = []
    for pair in pairs:
        b = CKElement(A, {pair: ONE}, canonical=True)
        vec: dict = {}
        for i in range(1, A.n + 1):
            qi = q(A, i)
            comm = b * qi - qi * b
            for key, c in expand_words(comm, k).items():
                if any(c.coeffs[1:]):
                    raise ValueError("commutator coefficients are expected to be rational")
                vec[(i, key)] = c.coeffs[0]
        cols.append(vec)
    keys = sorted({key for v in cols for key in v})
    rows = [[col.get(key, Fraction(0)) for col in cols] for key in keys]
    null = _rational_nullspace(rows, len(pairs)) if rows else [
        [Fraction(int(i == j)) for i in range(len(pairs))] for j in range(len(pairs))
    ]
    return [
        CKElement(A, {pairs[i]: RootScalar.rational(v) for i, v in enumerate(vec) if v})
        for vec in null
    ]


def diagonal_commutant_basis(A: ZeroOneMatrix, k: int) -> list[CKElement]:
    """Basis of the level-k degree-0 span intersected with {q_1, ..., q_n}'."""
    if k < 1:
        raise ValueError("k must be at least 1")
    return commutant_nullspace(A, level_pairs(A, k))


def column_classes(A: ZeroOneMatrix) -> list[list[int]]:
    classes: dict[tuple, list[int]] = {}
    for j in range(1, A.n + 1):
        classes.setdefault(A.column(j), []).append(j)
    return sorted(classes.values())


def unit_classes(A: ZeroOneMatrix) -> list[list[int]]:
    """Letters with equal rows and equal columns.

    For i, j in one class the s_i s_j^* are matrix units (s_i s_j^* s_j s_k^* =
    s_i q_j s_k^* = s_i s_k^* needs q_j = q_k); equal columns alone only give
    commutation with the q_l.
    """
    classes: dict[tuple, list[int]] = {}
    for j in range(1, A.n + 1):
        classes.setdefault((A.column(j), A.rows[j - 1]), []).append(j)
    return sorted(classes.values())


def minimal_diagonal_projections(A: ZeroOneMatrix) -> list[CKElement]:
    """r_c = sum of p_l over each column-equality class c, ordered by least member."""
    return [CKElement(A, {((l,), (l,)): ONE for l in c}) for c in column_classes(A)]
