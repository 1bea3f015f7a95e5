"""Cocycle chains, finite-order unitary paths, Rokhlin-tower averaging and
innerness defects.

The averaging construction is carried out in finite-dimensional models
D = M_d + ... + M_d (one summand per tower level).  The automorphism alpha
moves block b to block perm[b] and conjugates by V[b]; the towers are the
block units, so alpha permutes them exactly.  With towers of lengths r and
r + 1 and the chain u_k = u alpha(u) ... alpha^(k-1)(u), the averaged
unitary

    z = sum_k u_k alpha^k(z0_k) e_k + sum_l u_l alpha^l(z1_l) f_l

satisfies ||z alpha(z)^* - u|| <= 2 pi / r, where z0, z1 are the paths from
u_r and u_(r+1) to 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
import scipy.linalg

from .ck_algebra import (
    CKElement,
    column_classes,
    core_norm,
    equals,
    expand_to_level,
    in_diagonal_commutant,
    s,
    unit,
    zero,
)
from .cyclotomic import ONE, RootScalar
from .errors import IdentityFailed, ModelInvariantViolated, NotFiniteOrder, NotInCommutant, NotUnitary
from .matrix_graph import admissible_words
from .quasifree import (
    QFUnitary,
    VerifiedAction,
    diagonal_eigenvalues,
    endo_of_unitary,
    is_unitary,
    lambda_apply,
    spectral_projections,
)
from .shift_dilation import phi, phi_power


# -- cocycle chains --------------------------------------------------------------
@dataclass
class CocycleChain:
    base: CKElement
    entries: list[CKElement]

    @property
    def K(self) -> int:
        return len(self.entries) - 1


def closed_form_chain(u: CKElement, k: int) -> CKElement:
    """sum over mu in W^k of eta_mu s_mu s_mu^* for diagonal u = sum eta_i p_i."""
    etas = diagonal_eigenvalues(u)
    if etas is None:
        raise ValueError("closed form needs a diagonal unitary")
    A = u.A
    terms = {}
    for mu in admissible_words(A, k):
        c = ONE
        for a in mu:
            c = c * etas[a - 1]
        terms[(mu, mu)] = c
    return CKElement(A, terms)


def cocycle_chain(u: QFUnitary | CKElement, K: int) -> CocycleChain:
    """u_0 = 1, u_(k+1) = u_k phi^k(u); for diagonal u also checked against the closed form."""
    x = u.element if isinstance(u, QFUnitary) else u
    entries = [unit(x.A)]
    power = x
    for k in range(K):
        entries.append(entries[-1] * power)
        power = phi(power)
    if diagonal_eigenvalues(x) is not None:
        for k, e in enumerate(entries):
            if not equals(e, closed_form_chain(x, k)):
                raise IdentityFailed("closed form", (k,))
    return CocycleChain(x, entries)


def _commutator_vanishes(a: CKElement, b: CKElement) -> bool:
    return equals(a * b, b * a)


def chain_identities(chain: CocycleChain, n: int, *, raise_on_failure: bool = True) -> dict[str, bool]:
    """Check u_k^n = 1, u_i^* u_(i+j) = phi^i(u_j), [phi^k(u), phi^l(u)] = 0,
    sigma o phi^k = ad(u_k) o phi^k o sigma on generators (sigma = lambda_u),
    and, for diagonal u, the closed form of every entry."""
    u = chain.base
    A = u.A
    K = chain.K
    report: dict[str, bool] = {}
    failure: IdentityFailed | None = None

    def record(name: str, ok: bool, idx: tuple):
        nonlocal failure
        report[name] = report.get(name, True) and ok
        if not ok and failure is None:
            failure = IdentityFailed(name, idx)

    phis = [u]
    for _ in range(K):
        phis.append(phi(phis[-1]))
    one = unit(A)
    for k, e in enumerate(chain.entries):
        record("order", equals(e ** n, one), (k,))
    for i in range(K + 1):
        for j in range(K + 1 - i):
            lhs = chain.entries[i].adjoint() * chain.entries[i + j]
            record("cocycle", equals(lhs, phi_power(chain.entries[j], i)), (i, j))
    for k in range(K + 1):
        for l in range(k + 1, K + 1):
            record("commutation", _commutator_vanishes(phis[k], phis[l]), (k, l))
    sigma = endo_of_unitary(u)
    for k in range(K + 1):
        uk = chain.entries[k]
        for i in range(1, A.n + 1):
            lhs = sigma(phi_power(s(A, i), k))
            rhs = uk * phi_power(sigma(s(A, i)), k) * uk.adjoint()
            record("intertwining", equals(lhs, rhs), (k, i))
    if diagonal_eigenvalues(u) is not None:
        for k, e in enumerate(chain.entries):
            record("closed_form", equals(e, closed_form_chain(u, k)), (k,))
    if failure is not None and raise_on_failure:
        raise failure
    return report


# -- unitary paths ---------------------------------------------------------------
def _principal_turn(a: int, n: int) -> Fraction:
    """a/n mapped into (-1/2, 1/2]."""
    f = Fraction(a % n, n)
    return f - 1 if f > Fraction(1, 2) else f


def _numeric_projections(u: np.ndarray, n: int) -> dict[int, np.ndarray]:
    d = u.shape[-1]
    eye = np.broadcast_to(np.eye(d, dtype=complex), u.shape)
    powers = [np.array(eye)]
    for _ in range(n):
        powers.append(powers[-1] @ u)
    if np.max(np.abs(powers[n] - eye)) > 1e-9:
        raise NotFiniteOrder(f"u^{n} != 1")
    out = {}
    for a in range(n):
        P = sum(np.exp(-2j * np.pi * a * k / n) * powers[k] for k in range(n)) / n
        if np.max(np.abs(P)) > 1e-12:
            out[a] = P
    return out


def unitary_path(u, t, n: int):
    """z(t) = exp(2 pi i (1 - t) H) with u = exp(2 pi i H), spec(H) in (-1/2, 1/2].

    ``u`` is either a CKElement (then ``t`` must be rational and the result is
    exact, each spectral projection weighted by a root of unity) or an array
    of shape (..., d, d) holding a model element.
    """
    if isinstance(u, CKElement):
        t = Fraction(t)
        out = zero(u.A)
        for a, P in spectral_projections(u, n).items():
            turn = ((1 - t) * _principal_turn(a, n)) % 1
            out = out + P.scale(RootScalar.root(turn.numerator, turn.denominator))
        return out
    u = np.asarray(u, dtype=complex)
    out = np.zeros_like(u)
    for a, P in _numeric_projections(u, n).items():
        out = out + np.exp(2j * np.pi * (1 - float(t)) * float(_principal_turn(a, n))) * P
    return out


def path_lipschitz_ratio(u: np.ndarray, n: int, grid: int = 100) -> float:
    """max ||z(s) - z(t)|| / |s - t| over grid neighbours (compare with 2 pi)."""
    ts = np.linspace(0.0, 1.0, grid + 1)
    zs = [unitary_path(u, t, n) for t in ts]
    best = 0.0
    for a in range(len(ts)):
        for b in range(a + 1, len(ts)):
            best = max(best, _block_norm(zs[a] - zs[b]) / (ts[b] - ts[a]))
    return best


def _block_norm(x: np.ndarray) -> float:
    if x.ndim == 2:
        return float(np.linalg.norm(x, 2))
    return max(float(np.linalg.norm(b, 2)) for b in x)


# -- Rokhlin models -------------------------------------------------------------------
@dataclass
class RokhlinModel:
    """Direct sum of 2r+1 copies of M_d: blocks 0..r-1 carry e_0..e_(r-1), blocks r..2r carry f_0..f_r."""

    r: int
    d: int
    perm: np.ndarray  # alpha maps block b onto block perm[b]
    conj: np.ndarray  # (B, d, d) unitaries: alpha(x)[perm[b]] = conj[b] x[b] conj[b]^*
    u: np.ndarray  # (B, d, d)
    order: int

    @property
    def blocks(self) -> int:
        return 2 * self.r + 1

    def e(self, i: int) -> np.ndarray:
        return self._indicator(i % self.r)

    def f(self, j: int) -> np.ndarray:
        return self._indicator(self.r + j % (self.r + 1))

    def _indicator(self, b: int) -> np.ndarray:
        out = np.zeros((self.blocks, self.d, self.d), dtype=complex)
        out[b] = np.eye(self.d)
        return out

    def one(self) -> np.ndarray:
        return np.broadcast_to(np.eye(self.d, dtype=complex), (self.blocks, self.d, self.d)).copy()

    def alpha(self, x: np.ndarray, k: int = 1) -> np.ndarray:
        for _ in range(k):
            y = np.empty_like(x)
            moved = self.conj @ x @ np.conj(np.swapaxes(self.conj, -1, -2))
            y[self.perm] = moved
            x = y
        return x

    def chain(self, K: int) -> list[np.ndarray]:
        """u_0 = 1, u_k = u alpha(u) ... alpha^(k-1)(u)."""
        out = [self.one()]
        power = self.u
        for _ in range(K):
            out.append(out[-1] @ power)
            power = self.alpha(power)
        return out

    def validate(self) -> None:
        r, B = self.r, self.blocks
        expected = np.array([(b + 1) % r if b < r else r + (b - r + 1) % (r + 1) for b in range(B)])
        if not np.array_equal(self.perm, expected):
            raise ModelInvariantViolated("alpha must cycle e_0 -> ... -> e_(r-1) -> e_0 and f_0 -> ... -> f_r -> f_0")
        total = sum(self.e(i) for i in range(r)) + sum(self.f(j) for j in range(r + 1))
        if not np.array_equal(total, self.one()):
            raise ModelInvariantViolated("tower projections must sum to 1")
        for i in range(r):
            if not np.allclose(self.alpha(self.e(i)), self.e(i + 1), atol=1e-12):
                raise ModelInvariantViolated(f"alpha(e_{i}) != e_{i + 1}")
        for j in range(r + 1):
            if not np.allclose(self.alpha(self.f(j)), self.f(j + 1), atol=1e-12):
                raise ModelInvariantViolated(f"alpha(f_{j}) != f_{j + 1}")
        for b in range(B):
            if np.max(np.abs(self.conj[b] @ self.conj[b].conj().T - np.eye(self.d))) > 1e-12:
                raise ModelInvariantViolated("conjugations must be unitary")
        one = self.one()
        if np.max(np.abs(np.linalg.matrix_power(self.u, self.order) - one)) > 1e-10:
            raise ModelInvariantViolated(f"u^{self.order} != 1")
        for k, uk in enumerate(self.chain(r + 1)):
            for proj in [self.e(i) for i in range(r)] + [self.f(j) for j in range(r + 1)]:
                if np.max(np.abs(uk @ proj - proj @ uk)) > 1e-12:
                    raise ModelInvariantViolated(f"u_{k} does not commute with the towers")
            if np.max(np.abs(np.linalg.matrix_power(uk, self.order) - one)) > 1e-9:
                raise ModelInvariantViolated(f"u_{k} does not have order dividing {self.order}")


def _tower_perm(r: int) -> np.ndarray:
    return np.array([(b + 1) % r if b < r else r + (b - r + 1) % (r + 1) for b in range(2 * r + 1)])


def scalar_model(r: int, order: int, exponents: Sequence[int] | None = None) -> RokhlinModel:
    """Functions on the disjoint union of an r-cycle and an (r+1)-cycle; u = zeta_order^a per point."""
    B = 2 * r + 1
    if exponents is None:
        exponents = [1] * B
    u = np.array([[[np.exp(2j * np.pi * a / order)]] for a in exponents])
    conj = np.ones((B, 1, 1), dtype=complex)
    return RokhlinModel(r, 1, _tower_perm(r), conj, u, order)


def block_model(r: int, order: int, seed: int = 0) -> RokhlinModel:
    """2 x 2 blocks: u and the conjugations live in the normalizer of one rotated diagonal masa."""
    rng = np.random.default_rng(seed)
    B = 2 * r + 1
    theta = rng.uniform(0, np.pi)
    W = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]], dtype=complex)
    swap = np.array([[0, 1], [1, 0]], dtype=complex)
    u = np.empty((B, 2, 2), dtype=complex)
    conj = np.empty((B, 2, 2), dtype=complex)
    for b in range(B):
        a, c = rng.integers(0, order, size=2)
        u[b] = W @ np.diag(np.exp(2j * np.pi * np.array([a, c]) / order)) @ W.conj().T
        D = np.diag(np.exp(2j * np.pi * rng.uniform(size=2)))
        if rng.integers(2):
            D = swap @ D
        conj[b] = W @ D @ W.conj().T
    return RokhlinModel(r, 2, _tower_perm(r), conj, u, order)


@dataclass
class AveragingReport:
    z: np.ndarray
    defect: float
    bound: float
    sampling: str

    @property
    def passed(self) -> bool:
        return self.defect <= self.bound + 1e-12


def build_averaged_unitary(model: RokhlinModel, sampling: str = "uniform") -> AveragingReport:
    """Assemble z from the tower-wise rescaled paths and measure ||z alpha(z)^* - u||.

    ``sampling="uniform"`` samples both paths at steps of 1/r (so z1_r = z1(1) = 1);
    ``sampling="shifted"`` samples the second path at l/(r+1).  Both keep
    consecutive samples within 2 pi / r of each other.
    """
    model.validate()
    r, n = model.r, model.order
    chain = model.chain(r + 1)
    z0 = [unitary_path(chain[r], k / r, n) for k in range(r)]
    if sampling == "uniform":
        steps1 = [l / r for l in range(r + 1)]
    elif sampling == "shifted":
        steps1 = [l / (r + 1) for l in range(r + 1)]
    else:
        raise ValueError(f"unknown sampling {sampling!r}")
    z1 = [unitary_path(chain[r + 1], t, n) for t in steps1]
    z = np.zeros_like(model.u)
    for k in range(r):
        z = z + chain[k] @ model.alpha(z0[k], k) @ model.e(k)
    for l in range(r + 1):
        z = z + chain[l] @ model.alpha(z1[l], l) @ model.f(l)
    if np.max(np.abs(z @ np.conj(np.swapaxes(z, -1, -2)) - model.one())) > 1e-9:
        raise ModelInvariantViolated("assembled z is not unitary")
    diff = z @ np.conj(np.swapaxes(model.alpha(z), -1, -2)) - model.u
    return AveragingReport(z, _block_norm(diff), 2 * math.pi / r, sampling)


# -- innerness defects ------------------------------------------------------------------
@dataclass
class InnernessReport:
    defect: float
    ad_matches_lambda: bool


def innerness_defect(w: CKElement, u: QFUnitary | CKElement) -> InnernessReport:
    """||u - w phi(w)^*||, after checking ad(w) = lambda_(w phi(w)^*) on the generators."""
    uel = u.element if isinstance(u, QFUnitary) else u
    if w.degrees() not in ([], [0]) or not is_unitary(w):
        raise NotUnitary("w must be a degree-0 unitary")
    if not in_diagonal_commutant(w):
        raise NotInCommutant("w must commute with every q_i")
    A = w.A
    v = w * phi(w).adjoint()
    ok = all(
        equals(w * s(A, i) * w.adjoint(), lambda_apply(v, s(A, i))) for i in range(1, A.n + 1)
    )
    return InnernessReport(core_norm(uel - v), ok)


# -- witness search ------------------------------------------------------------------------
@dataclass
class LevelResult:
    level: int
    defect: float
    witness: dict  # (mu, nu) -> complex coefficient of w at this level
    evaluations: int


@dataclass
class WitnessTrace:
    levels: list[LevelResult] = field(default_factory=list)
    eps: float | None = None

    @property
    def defects(self) -> list[float]:
        return [lv.defect for lv in self.levels]

    @property
    def first_below_eps(self) -> int | None:
        if self.eps is None:
            return None
        return next((lv.level for lv in self.levels if lv.defect <= self.eps), None)


class _LevelGeometry:
    """Index data for candidates w at level k, evaluated as matrices over W^(k+1)."""

    def __init__(self, action: VerifiedAction, k: int, u: CKElement):
        A = action.A
        spec = action.spec
        self.words = admissible_words(A, k)
        self.long = admissible_words(A, k + 1)
        widx = {w: i for i, w in enumerate(self.words)}
        lidx = {w: i for i, w in enumerate(self.long)}
        nk, nl = len(self.words), len(self.long)
        extend = np.zeros((nl, nk))
        prepend = np.zeros((nl, nk))
        for w, i in widx.items():
            for l in A.successors[w[-1] if w else 0]:
                extend[lidx[w + (l,)], i] = 1
            for a in range(1, A.n + 1):
                if not w or A(a, w[0]):
                    prepend[lidx[(a,) + w], i] = 1
        last = np.array([w[-1] for w in self.long])
        first = np.array([w[0] for w in self.long])
        self.extend, self.prepend = extend, prepend
        self.same_last = (last[:, None] == last[None, :]).astype(float)
        self.same_first = (first[:, None] == first[None, :]).astype(float)
        classes = {l: ci for ci, c in enumerate(column_classes(A)) for l in c}
        keys: dict[tuple, list[int]] = {}
        for i, w in enumerate(self.words):
            key = (
                w[-1] if w else None,
                tuple(spec.word_turn(t, w) for t in range(len(spec.orders))),
                classes[w[0]] if w else None,
            )
            keys.setdefault(key, []).append(i)
        self.blocks = [np.array(v) for _, v in sorted(keys.items(), key=lambda kv: kv[1][0])]
        form = expand_to_level(u, k + 1)
        U = np.zeros((nl, nl), dtype=complex)
        for (m, v), c in form.terms.items():
            U[lidx[m], lidx[v]] = complex(c)
        self.U = U

    def defect(self, w: np.ndarray) -> float:
        WM = (self.extend @ w @ self.extend.T) * self.same_last
        PH = (self.prepend @ w @ self.prepend.T) * self.same_first
        return float(np.linalg.norm(self.U - WM @ PH.conj().T, 2))

    def embed_from(self, prev: _LevelGeometry, w_prev: np.ndarray) -> np.ndarray:
        # prev.long are the words of this level
        return (prev.extend @ w_prev @ prev.extend.T) * prev.same_last

    def random_unitary(self, rng: np.random.Generator) -> np.ndarray:
        w = np.zeros((len(self.words), len(self.words)), dtype=complex)
        for idx in self.blocks:
            m = len(idx)
            z = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
            qm, rm = np.linalg.qr(z)
            w[np.ix_(idx, idx)] = qm * (np.diag(rm) / np.abs(np.diag(rm)))
        return w


def _random_hermitian(rng: np.random.Generator, m: int) -> np.ndarray:
    h = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
    return (h + h.conj().T) / 2


def witness_search(
    action: VerifiedAction,
    generator: int = 0,
    max_level: int = 6,
    eps: float | None = None,
    budget: int = 10_000,
    seed: int = 0,
    restarts: int = 3,
) -> WitnessTrace:
    """Gradient-free search for unitaries w in the fixed-point, q-commuting core with small ||u - w phi(w)^*||.

    Level k candidates are block unitaries on terminal-matched level-k word
    pairs with equal last letter, equal character under every generator and
    equal column class of the first letter.  Each level starts from the
    previous level's best witness, so the reported defects never increase.
    """
    rng = np.random.default_rng(seed)
    u = action.unitaries[generator].element
    trace = WitnessTrace(eps=eps)
    prev_geo: _LevelGeometry | None = None
    prev_w: np.ndarray | None = None
    best_defect = math.inf
    for k in range(max_level + 1):
        geo = _LevelGeometry(action, k, u)
        if prev_geo is None:
            start = np.eye(len(geo.words), dtype=complex)
        else:
            start = geo.embed_from(prev_geo, prev_w)
        best_w = start
        best = geo.defect(start)
        if best > best_defect:
            # the embedding is exact; only rounding can make it larger
            best = best_defect
        evals = 1
        if k > 0 and budget > 1:
            per_run = max(1, (budget - 1) // (restarts + 1))
            for run in range(restarts + 1):
                w = start.copy() if run == 0 else geo.random_unitary(rng)
                cur = geo.defect(w)
                evals += 1
                step = 0.5
                for it in range(per_run):
                    idx = geo.blocks[rng.integers(len(geo.blocks))]
                    m = len(idx)
                    rot = scipy.linalg.expm(1j * step * _random_hermitian(rng, m))
                    cand = w.copy()
                    cand[np.ix_(idx, idx)] = rot @ w[np.ix_(idx, idx)]
                    val = geo.defect(cand)
                    evals += 1
                    if val < cur:
                        w, cur = cand, val
                    else:
                        step = max(step * 0.995, 1e-3)
                if cur < best:
                    best, best_w = cur, w
        best_defect = min(best_defect, best)
        witness = {
            (geo.words[i], geo.words[j]): complex(best_w[i, j])
            for i in range(len(geo.words))
            for j in range(len(geo.words))
            if abs(best_w[i, j]) > 1e-14
        }
        trace.levels.append(LevelResult(k, best_defect, witness, evals))
        prev_geo, prev_w = geo, best_w
    return trace
