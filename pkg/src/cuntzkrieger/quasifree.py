"""Unitaries commuting with the q_i, the endomorphisms lambda_u they induce,
and finite abelian group actions by diagonal quasi-free automorphisms.

Within B = span{s_i s_j^*}, the commutant of the q_i is spanned by the
s_i s_j^* with equal columns i, j of A, and for such letters these are
genuine matrix units.  So B intersected with {q}' is a direct sum of full
matrix algebras, one per column-equality class; numerical work (the
conjugator of ``diagonalize_commuting_family``) happens in those blocks.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import product
from math import lcm
from typing import Sequence

import numpy as np

from .ck_algebra import (
    CKElement,
    unit_classes,
    commutant_nullspace,
    equals,
    expand_words,
    in_diagonal_commutant,
    level_pairs,
    q,
    s,
    s_star,
    unit,
    zero,
)
from .cyclotomic import ONE, ZERO, RootScalar
from .errors import (
    DimensionMismatch,
    NonCommuting,
    NotAnEndomorphism,
    NotCommuting,
    NotFiniteOrder,
    NotInCommutant,
    NotUnitary,
    OrderViolation,
)
from .matrix_graph import Word, ZeroOneMatrix


# -- endomorphisms given on generators ----------------------------------------
@dataclass
class EndoSpec:
    """An endomorphism given by the images of s_1, ..., s_n."""

    images: list[CKElement]

    @property
    def A(self) -> ZeroOneMatrix:
        return self.images[0].A

    def __post_init__(self):
        self._cache: dict[Word, CKElement] = {}

    def of_word(self, mu: Word) -> CKElement:
        if mu not in self._cache:
            if not mu:
                self._cache[mu] = unit(self.A)
            else:
                self._cache[mu] = self.of_word(mu[:-1]) * self.images[mu[-1] - 1]
        return self._cache[mu]

    def __call__(self, x: CKElement) -> CKElement:
        out = zero(x.A)
        for (mu, nu), c in x.terms.items():
            out = out + (self.of_word(mu) * self.of_word(nu).adjoint()).scale(c)
        return out

    def compose(self, other: EndoSpec) -> EndoSpec:
        """self o other."""
        return EndoSpec([self(img) for img in other.images])


def identity_endo(A: ZeroOneMatrix) -> EndoSpec:
    return EndoSpec([s(A, i) for i in range(1, A.n + 1)])


def verify_endo(sigma: EndoSpec) -> None:
    """Raise NotAnEndomorphism unless the images satisfy the relations, are unital and fix every q_i."""
    A = sigma.A
    imgs = sigma.images
    if len(imgs) != A.n:
        raise NotAnEndomorphism(f"expected {A.n} images, got {len(imgs)}")
    for i, j in product(range(A.n), repeat=2):
        if i != j and not (imgs[i].adjoint() * imgs[j]).is_zero():
            raise NotAnEndomorphism(f"s_{i + 1}^* s_{j + 1} = 0")
    ranges = [img * img.adjoint() for img in imgs]
    for i in range(A.n):
        rhs = zero(A)
        for j in range(A.n):
            if A(i + 1, j + 1):
                rhs = rhs + ranges[j]
        if not equals(imgs[i].adjoint() * imgs[i], rhs):
            raise NotAnEndomorphism(f"s_{i + 1}^* s_{i + 1} = sum_j A({i + 1},j) p_j")
        if not equals(imgs[i].adjoint() * imgs[i], q(A, i + 1)):
            raise NotAnEndomorphism(f"sigma(q_{i + 1}) = q_{i + 1}")
    if not equals(reduce(lambda a, b: a + b, ranges), unit(A)):
        raise NotAnEndomorphism("sigma(1) = 1")


# -- unitaries in the commutant -----------------------------------------------------
@dataclass
class QFUnitary:
    """A unitary of B = span{s_i s_j^*} commuting with every q_i."""

    element: CKElement

    @property
    def A(self) -> ZeroOneMatrix:
        return self.element.A

    @classmethod
    def checked(cls, x: CKElement) -> QFUnitary:
        if x.max_length() > 1 or x.degrees() not in ([], [0]):
            raise NotInCommutant("element is not in span{s_i s_j^*}")
        if not is_unitary(x):
            raise NotUnitary("u u^* = u^* u = 1 fails")
        if not in_diagonal_commutant(x):
            raise NotInCommutant("u does not commute with every q_i")
        return cls(x)

    def diagonal_eigenvalues(self) -> list[RootScalar] | None:
        """eta_i with u = sum eta_i p_i, or None if u is not diagonal."""
        return diagonal_eigenvalues(self.element)


def is_unitary(x: CKElement) -> bool:
    one = unit(x.A)
    return equals(x * x.adjoint(), one) and equals(x.adjoint() * x, one)


def diagonal_eigenvalues(x: CKElement) -> list[RootScalar] | None:
    if any(m != v or len(m) > 1 for m, v in x.terms):
        return None
    base = x.terms.get(((), ()), ZERO)
    return [base + x.terms.get(((i,), (i,)), ZERO) for i in range(1, x.A.n + 1)]


def diagonal_unitary(A: ZeroOneMatrix, etas: Sequence[RootScalar]) -> CKElement:
    return CKElement(A, {((i + 1,), (i + 1,)): eta for i, eta in enumerate(etas)})


def endo_of_unitary(u: QFUnitary | CKElement) -> EndoSpec:
    x = u.element if isinstance(u, QFUnitary) else u
    return EndoSpec([x * s(x.A, i) for i in range(1, x.A.n + 1)])


def lambda_apply(u: QFUnitary | CKElement, x: CKElement) -> CKElement:
    """lambda_u(x), where lambda_u(s_i) = u s_i."""
    uel = u.element if isinstance(u, QFUnitary) else u
    if uel.A != x.A:
        from .errors import MatrixMismatch

        raise MatrixMismatch("unitary and element live over different matrices")
    etas = diagonal_eigenvalues(uel)
    if etas is None:
        return endo_of_unitary(uel)(x)
    conj = [e.conjugate() for e in etas]
    out = {}
    for (mu, nu), c in x.terms.items():
        for a in mu:
            c = c * etas[a - 1]
        for a in nu:
            c = c * conj[a - 1]
        out[(mu, nu)] = c
    return CKElement(x.A, out)


def unitary_of_endo(sigma: EndoSpec, *, verify: bool = True) -> QFUnitary:
    """u_sigma = sum_i sigma(s_i) s_i^*."""
    if verify:
        verify_endo(sigma)
    A = sigma.A
    u = reduce(lambda a, b: a + b, (sigma.images[i] * s_star(A, i + 1) for i in range(A.n)))
    return QFUnitary(u)


def is_diagonal_quasi_free(sigma: EndoSpec) -> bool:
    A = sigma.A
    for img in sigma.images:
        if any(len(m) != 1 or v for m, v in img.terms):
            return False
    return all(equals(sigma(q(A, i)), q(A, i)) for i in range(1, A.n + 1))


def convolution_unitary(sigma: EndoSpec, rho: EndoSpec) -> QFUnitary:
    """sigma(u_rho) u_sigma, checked against u_(sigma o rho)."""
    u_sigma = unitary_of_endo(sigma)
    u_rho = unitary_of_endo(rho)
    conv = sigma(u_rho.element) * u_sigma.element
    direct = unitary_of_endo(sigma.compose(rho), verify=False)
    if not equals(conv, direct.element):
        raise NotAnEndomorphism("convolution formula u_(sigma o rho) = sigma(u_rho) u_sigma")
    return QFUnitary(conv)


# -- diagonal actions of finite abelian groups ---------------------------------------
@dataclass(frozen=True)
class ActionSpec:
    """G = Z_{n_1} x ... x Z_{n_r}; generator t scales s_i by exp(2 pi i * turns[t][i]).

    ``turns`` are fractions of a full turn (an integer exponent a on Z_{n_t}
    is the turn a / n_t).
    """

    orders: tuple[int, ...]
    turns: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def from_exponents(cls, orders: Sequence[int], exponents: Sequence[Sequence]) -> ActionSpec:
        turns = []
        for n_t, row in zip(orders, exponents):
            turns.append(tuple(_turn(a, n_t) for a in row))
        return cls(tuple(orders), tuple(turns))

    def eta(self, t: int, i: int) -> RootScalar:
        f = self.turns[t][i - 1]
        return RootScalar.root(f.numerator, f.denominator)

    def word_turn(self, t: int, mu: Word) -> Fraction:
        return sum((self.turns[t][a - 1] for a in mu), Fraction(0)) % 1

    def unitary(self, A: ZeroOneMatrix, t: int) -> CKElement:
        return diagonal_unitary(A, [self.eta(t, i) for i in range(1, A.n + 1)])

    @property
    def field_order(self) -> int:
        return lcm(1, *(f.denominator for row in self.turns for f in row))


def _turn(a, n_t: int) -> Fraction:
    if isinstance(a, str):
        a = Fraction(a) if "/" in a else Fraction(int(a), n_t)
    elif isinstance(a, int):
        a = Fraction(a, n_t)
    return Fraction(a) % 1


@dataclass
class VerifiedAction:
    A: ZeroOneMatrix
    spec: ActionSpec
    unitaries: list[QFUnitary] = field(default_factory=list)

    def endo(self, t: int) -> EndoSpec:
        return endo_of_unitary(self.unitaries[t])


def convolution_power(u: CKElement, n: int) -> CKElement:
    """sigma^(n-1)(u) ... sigma(u) u for sigma = lambda_u; equals 1 iff sigma^n = id."""
    out = unit(u.A)
    term = u
    factors = []
    for _ in range(n):
        factors.append(term)
        term = lambda_apply(u, term)
    for f in factors:
        out = f * out
    return out


def verify_action(A: ZeroOneMatrix, spec: ActionSpec) -> VerifiedAction:
    if len(spec.turns) != len(spec.orders):
        raise DimensionMismatch("one eigenvalue row per generator is required")
    for row in spec.turns:
        if len(row) != A.n:
            raise DimensionMismatch(f"eigenvalue rows need {A.n} entries, got {len(row)}")
    us = []
    for t, n_t in enumerate(spec.orders):
        u = spec.unitary(A, t)
        if not equals(convolution_power(u, n_t), unit(A)):
            raise OrderViolation(t)
        us.append(QFUnitary(u))
    for t, t2 in product(range(len(us)), repeat=2):
        if t < t2:
            for i in range(1, A.n + 1):
                a = lambda_apply(us[t], lambda_apply(us[t2], s(A, i)))
                b = lambda_apply(us[t2], lambda_apply(us[t], s(A, i)))
                if not equals(a, b):
                    raise NonCommuting(t, t2)
    return VerifiedAction(A, spec, us)


def fixed_point_core_basis(action: VerifiedAction, k: int, *, commutant: bool = False) -> list[CKElement]:
    """Level-k degree-0 word pairs fixed by every generator (optionally also commuting with the q_i)."""
    A, spec = action.A, action.spec
    pairs = [
        (m, v)
        for m, v in level_pairs(A, k)
        if all(spec.word_turn(t, m) == spec.word_turn(t, v) for t in range(len(spec.orders)))
    ]
    if commutant:
        return commutant_nullspace(A, pairs)
    return [CKElement(A, {pair: ONE}, canonical=True) for pair in pairs]


# -- conjugation to diagonal form -----------------------------------------------------
def commutant_blocks(x: CKElement) -> dict[tuple[int, ...], np.ndarray]:
    """Matrices of x in B intersected with {q}', one per class of unit_classes."""
    coeffs = expand_words(x, 1)
    classes = unit_classes(x.A)
    where = {l: tuple(c) for c in classes for l in c}
    for (m, v) in coeffs:
        if len(v) != 1 or where[m[0]] != where[v[0]]:
            raise NotInCommutant("element is not a block matrix over the unit classes")
    out = {}
    for c in classes:
        mat = np.zeros((len(c), len(c)), dtype=complex)
        for a, i in enumerate(c):
            for b, j in enumerate(c):
                val = coeffs.get(((i,), (j,)))
                if val is not None:
                    mat[a, b] = complex(val)
        out[tuple(c)] = mat
    return out


def from_blocks(A: ZeroOneMatrix, blocks: dict[tuple[int, ...], np.ndarray]) -> dict:
    return {
        ((i,), (j,)): complex(mat[a, b])
        for c, mat in blocks.items()
        for a, i in enumerate(c)
        for b, j in enumerate(c)
        if abs(mat[a, b]) > 1e-15
    }


def spectral_projections(u: CKElement, N: int) -> dict[int, CKElement]:
    """Exact P_a = (1/N) sum_k zeta_N^(-a k) u^k for the nonzero eigenprojections (u^N = 1)."""
    powers = [unit(u.A)]
    for _ in range(N - 1):
        powers.append(powers[-1] * u)
    if not equals(powers[-1] * u, unit(u.A)):
        raise NotFiniteOrder(f"u^{N} != 1")
    out = {}
    for a in range(N):
        P = zero(u.A)
        for k, uk in enumerate(powers):
            P = P + uk.scale(RootScalar.root(-a * k, N, Fraction(1, N)))
        if not P.is_zero():
            out[a] = P
    return out


def _range_basis(P: np.ndarray, tol: float = 1e-9) -> list[np.ndarray]:
    basis: list[np.ndarray] = []
    for k in range(P.shape[1]):
        v = P[:, k].copy()
        for b in basis:
            v = v - np.vdot(b, v) * b
        nrm = np.linalg.norm(v)
        if nrm > tol:
            basis.append(v / nrm)
    return basis


@dataclass
class Diagonalization:
    conjugator: dict  # (mu, nu) -> complex coefficient of w
    blocks: dict[tuple[int, ...], np.ndarray]
    projections: list[CKElement]  # exact joint spectral projections
    characters: list[tuple[int, ...]]
    off_diagonal_mass: float


def diagonalize_commuting_family(us: Sequence[QFUnitary | CKElement], N: int) -> Diagonalization:
    """Find w in U(B intersected with {q}') with w u w^* in span{p_i} for every u in the family."""
    els = [u.element if isinstance(u, QFUnitary) else u for u in us]
    A = els[0].A
    for a in range(len(els)):
        for b in range(a + 1, len(els)):
            if not equals(els[a] * els[b], els[b] * els[a]):
                raise NotCommuting(f"family members {a} and {b} do not commute")
    projs = [spectral_projections(u, N) for u in els]
    joint: list[tuple[tuple[int, ...], CKElement]] = [((), unit(A))]
    for family in projs:
        nxt = []
        for chars, P in joint:
            for a, Pa in family.items():
                prod = P * Pa
                if not prod.is_zero():
                    nxt.append((chars + (a,), prod))
        joint = nxt
    blocks: dict[tuple[int, ...], np.ndarray] = {}
    for c in unit_classes(A):
        cols: list[np.ndarray] = []
        for _, P in joint:
            cols.extend(_range_basis(commutant_blocks(P)[tuple(c)]))
        Q = np.column_stack(cols) if cols else np.zeros((len(c), 0))
        for k in range(Q.shape[1]):
            j = int(np.argmax(np.abs(Q[:, k]) > 1e-9))
            Q[:, k] *= abs(Q[j, k]) / Q[j, k]
        blocks[tuple(c)] = Q.conj().T
    mass = 0.0
    for u in els:
        for c, mat in commutant_blocks(u).items():
            W = blocks[c]
            D = W @ mat @ W.conj().T
            off = D - np.diag(np.diag(D))
            mass = max(mass, float(np.max(np.abs(off))) if off.size else 0.0)
    return Diagonalization(from_blocks(A, blocks), blocks, [P for _, P in joint], [ch for ch, _ in joint], mass)


# -- exact random unitaries for tests and demos ----------------------------------------
_PYTHAGOREAN = [(Fraction(3, 5), Fraction(4, 5)), (Fraction(5, 13), Fraction(12, 13)), (Fraction(8, 17), Fraction(15, 17))]


def _matmul(a, b):
    n = len(a)
    return [[sum((a[i][k] * b[k][j] for k in range(n)), ZERO) for j in range(n)] for i in range(n)]


def random_block_unitary(m: int, rng: random.Random, order: int = 12, steps: int = 3) -> list[list[RootScalar]]:
    """An exact m x m unitary over Q(zeta_order): phases, permutations and rational rotations."""
    U = [[ONE if i == j else ZERO for j in range(m)] for i in range(m)]
    for _ in range(steps):
        phase = [[RootScalar.root(rng.randrange(order), order) if i == j else ZERO for j in range(m)] for i in range(m)]
        U = _matmul(phase, U)
        if m >= 2:
            i, j = rng.sample(range(m), 2)
            a, b = rng.choice(_PYTHAGOREAN)
            w = RootScalar.root(rng.randrange(order), order)
            R = [[ONE if x == y else ZERO for y in range(m)] for x in range(m)]
            R[i][i] = RootScalar.rational(a)
            R[j][j] = RootScalar.rational(a)
            R[i][j] = -(w.conjugate() * b)
            R[j][i] = w * b
            U = _matmul(R, U)
            perm = list(range(m))
            rng.shuffle(perm)
            P = [[ONE if perm[x] == y else ZERO for y in range(m)] for x in range(m)]
            U = _matmul(P, U)
    return U


def element_from_blocks(A: ZeroOneMatrix, blocks: dict[tuple[int, ...], list[list[RootScalar]]]) -> CKElement:
    terms = {}
    for c, mat in blocks.items():
        for a, i in enumerate(c):
            for b, j in enumerate(c):
                if not mat[a][b].is_zero():
                    terms[((i,), (j,))] = mat[a][b]
    return CKElement(A, terms)


def random_qf_unitary(A: ZeroOneMatrix, rng: random.Random, order: int = 12) -> QFUnitary:
    blocks = {tuple(c): random_block_unitary(len(c), rng, order) for c in unit_classes(A)}
    return QFUnitary(element_from_blocks(A, blocks))
