"""The canonical shift phi(x) = sum_i s_i x s_i^* and its automorphic dilation."""

from __future__ import annotations

from dataclasses import dataclass

from .ck_algebra import (
    CKElement,
    column_classes,
    equals,
    in_diagonal_commutant,
    minimal_diagonal_projections,
    p,
    q,
    s,
    s_star,
    word,
    zero,
)
from .errors import IndexOutOfRange, NotAperiodic, NotInCommutant, ProbeExceeded, ZeroCorner, ZeroInput
from .matrix_graph import Word, ZeroOneMatrix, admissible_words, is_aperiodic, is_permutation


def phi(x: CKElement) -> CKElement:
    A = x.A
    out = zero(A)
    for i in range(1, A.n + 1):
        out = out + s(A, i) * x * s_star(A, i)
    return out


def phi_power(x: CKElement, k: int) -> CKElement:
    """Closed form sum over nu in W^k of s_nu x s_nu^*."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return x
    A = x.A
    out = zero(A)
    for nu in admissible_words(A, k):
        sn = word(A, nu)
        out = out + sn * x * sn.adjoint()
    return out


def phi_iterate(x: CKElement, k: int) -> CKElement:
    for _ in range(k):
        x = phi(x)
    return x


def injectivity_witness(x: CKElement) -> tuple[int, CKElement]:
    """A letter j with x q_j != 0, together with the nonzero certificate p_j phi(x)."""
    if x.is_zero():
        raise ZeroInput("x must be nonzero")
    if not in_diagonal_commutant(x):
        raise NotInCommutant("x must commute with every q_i")
    A = x.A
    fx = phi(x)
    for j in range(1, A.n + 1):
        if not (x * q(A, j)).is_zero():
            cert = p(A, j) * fx
            assert not cert.is_zero(), "phi failed to be injective"
            return j, cert
    raise AssertionError("x q_j = 0 for all j although sum of q_j dominates 1")


def _class_index(A: ZeroOneMatrix, i: int) -> list[int]:
    classes = column_classes(A)
    if not 1 <= i <= len(classes):
        raise IndexOutOfRange(f"class index {i} outside 1..{len(classes)}")
    return classes[i - 1]


def corner_words(A: ZeroOneMatrix, i: int, j: int, k: int) -> list[Word]:
    """W^k_{j,i}: words nu with p_{nu_1} <= r_j and r_i <= q_{nu_k}."""
    ci = _class_index(A, i)
    cj = _class_index(A, j)
    rep = ci[0]
    return [nu for nu in admissible_words(A, k, start=cj) if A(nu[-1], rep)]


@dataclass
class CornerReport:
    equal: bool
    lhs: CKElement
    rhs: CKElement
    words: list[Word]


def corner_formula_check(i: int, j: int, k: int, x: CKElement) -> CornerReport:
    """Compare r_j phi^k(r_i x r_i) r_j with the sum over W^k_{j,i} of s_nu (r_i x r_i) s_nu^*."""
    if k < 1:
        raise ValueError("k must be at least 1")
    A = x.A
    rs = minimal_diagonal_projections(A)
    _class_index(A, i)
    _class_index(A, j)
    ri, rj = rs[i - 1], rs[j - 1]
    corner = ri * x * ri
    lhs = rj * phi_power(corner, k) * rj
    ws = corner_words(A, i, j, k)
    rhs = zero(A)
    for nu in ws:
        sn = word(A, nu)
        rhs = rhs + sn * corner * sn.adjoint()
    return CornerReport(equals(lhs, rhs), lhs, rhs, ws)


@dataclass
class FullnessWitness:
    m: int
    mu: Word
    certificate: CKElement  # s_mu^* (r_j phi^m(r_i x r_i) r_j) s_mu
    expected: CKElement  # q_t (r_i x r_i) q_t


def fullness_witness(i: int, j: int, x: CKElement) -> FullnessWitness:
    A = x.A
    m0 = is_aperiodic(A)
    if m0 is None:
        raise NotAperiodic("the matrix is not aperiodic")
    if not in_diagonal_commutant(x):
        raise NotInCommutant("x must commute with every q_i")
    ci = _class_index(A, i)
    cj = _class_index(A, j)
    rs = minimal_diagonal_projections(A)
    ri, rj = rs[i - 1], rs[j - 1]
    corner = ri * x * ri
    if corner.is_zero():
        raise ZeroCorner(f"x r_{i} = 0")
    src = cj[0]
    tgt = next(t for t in range(1, A.n + 1) if A(t, ci[0]))
    m = m0
    while True:
        words = admissible_words(A, m, start=[src], end=[tgt])
        if words:
            break
        m += 1
    mu = words[0]
    smu = word(A, mu)
    cert = smu.adjoint() * (rj * phi_power(corner, m) * rj) * smu
    expected = q(A, tgt) * corner * q(A, tgt)
    if cert.is_zero() or not equals(cert, expected):
        raise AssertionError("fullness certificate failed")
    return FullnessWitness(m, mu, cert, expected)


@dataclass
class PreimageVerdict:
    target: int
    solvable: bool
    candidate: CKElement  # the forced candidate q_i
    image: CKElement  # phi(q_i)


def solve_phi_preimage(A: ZeroOneMatrix, i: int) -> PreimageVerdict:
    """Decide phi(x) = p_i on the commutant: the only possible solution is x = q_i."""
    if not 1 <= i <= A.n:
        raise IndexOutOfRange(f"letter {i} outside 1..{A.n}")
    cand = q(A, i)
    img = phi(cand)
    return PreimageVerdict(i, equals(img, p(A, i)), cand, img)


@dataclass
class SurjectivityReport:
    verdicts: list[PreimageVerdict]
    all_solvable: bool
    is_permutation: bool

    @property
    def consistent(self) -> bool:
        return self.all_solvable == self.is_permutation


def surjectivity_report(A: ZeroOneMatrix) -> SurjectivityReport:
    verdicts = [solve_phi_preimage(A, i) for i in range(1, A.n + 1)]
    return SurjectivityReport(verdicts, all(v.solvable for v in verdicts), is_permutation(A))


# -- dilation ------------------------------------------------------------------------
DEFAULT_PROBE = 8


@dataclass
class DilationElement:
    """The class of (x, phi(x), phi^2(x), ...) starting at ``stage``."""

    stage: int
    element: CKElement


def dilation_make(stage: int, x: CKElement) -> DilationElement:
    if stage < 0:
        raise ValueError("stage must be nonnegative")
    if not in_diagonal_commutant(x):
        raise NotInCommutant("dilation representatives must commute with every q_i")
    return DilationElement(stage, x)


def dilation_equals(a: DilationElement, b: DilationElement, budget: int = DEFAULT_PROBE) -> bool:
    """(l, x) ~ (m, y) iff phi^(L-l)(x) = phi^(L-m)(y) at the common stage L = max(l, m).

    Because phi is injective on the commutant, further probes cannot change a
    negative answer; they are still run (up to ``budget``) as a consistency check.
    """
    if abs(a.stage - b.stage) > budget:
        raise ProbeExceeded(f"stage gap {abs(a.stage - b.stage)} exceeds the probe budget {budget}")
    L = max(a.stage, b.stage)
    x = phi_power(a.element, L - a.stage)
    y = phi_power(b.element, L - b.stage)
    if equals(x, y):
        return True
    for _ in range(budget - abs(a.stage - b.stage)):
        x, y = phi(x), phi(y)
        if equals(x, y):
            raise AssertionError("phi is not injective on these representatives")
    return False


def dilation_apply(a: DilationElement) -> DilationElement:
    return DilationElement(a.stage, phi(a.element))


def dilation_inverse(a: DilationElement) -> DilationElement:
    return DilationElement(a.stage + 1, a.element)
