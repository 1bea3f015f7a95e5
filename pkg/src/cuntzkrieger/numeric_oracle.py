"""Truncated path-space representation of O_A.

The Hilbert space has an orthonormal basis indexed by admissible words of
length at most L.  s_i sends the basis word x to ix when |x| < L and ix is
admissible, and to 0 otherwise.  On the interior (words w with
d < |w| <= L - d) products of at most d generator symbols satisfy the
defining relations exactly, which makes this an independent check of the
symbolic arithmetic.  Short words are excluded because a computation that
strips a word down to the empty word leaves the Cuntz-Krieger relations
(the empty word is range-deficient), long ones because of the truncation.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .ck_algebra import CKElement
from .errors import DepthTooSmall
from .matrix_graph import Word, ZeroOneMatrix, admissible_words

DEFAULT_DEPTH = 12


class TruncatedRep:
    def __init__(self, A: ZeroOneMatrix, depth: int = DEFAULT_DEPTH):
        self.A = A
        self.depth = depth
        self.basis: list[Word] = [w for k in range(depth + 1) for w in admissible_words(A, k)]
        self.index = {w: k for k, w in enumerate(self.basis)}

    @property
    def dim(self) -> int:
        return len(self.basis)

    @cached_property
    def shifts(self) -> dict[int, sp.csr_matrix]:
        out = {}
        for i in range(1, self.A.n + 1):
            rows, cols = [], []
            for w, k in self.index.items():
                if len(w) < self.depth and (not w or self.A(i, w[0])):
                    rows.append(self.index[(i,) + w])
                    cols.append(k)
            data = np.ones(len(rows))
            out[i] = sp.csr_matrix((data, (rows, cols)), shape=(self.dim, self.dim))
        return out

    def word_operator(self, mu: Word) -> sp.csr_matrix:
        op = sp.identity(self.dim, format="csr")
        for letter in mu:
            op = op @ self.shifts[letter]
        return op

    def interior(self, d: int) -> np.ndarray:
        lo = max(d, 0)
        return np.array([k for k, w in enumerate(self.basis) if lo < len(w) <= self.depth - d])


def represent(x: CKElement, L: int = DEFAULT_DEPTH, rep: TruncatedRep | None = None) -> sp.csr_matrix:
    """Sparse matrix of x acting on the depth-L truncated path space."""
    if x.terms and L < x.max_length() + 1:
        raise DepthTooSmall(f"depth {L} too small for words of length {x.max_length()}")
    rep = rep or TruncatedRep(x.A, L)
    out = sp.csr_matrix((rep.dim, rep.dim), dtype=complex)
    for (mu, nu), c in x.terms.items():
        out = out + complex(c) * (rep.word_operator(mu) @ rep.word_operator(nu).T)
    return out.tocsr()


def oracle_check(x: CKElement, y: CKElement, L: int = DEFAULT_DEPTH, d: int | None = None, tol: float = 1e-9) -> bool:
    """Compare x and y on interior rows and columns (words of length d+1..L-d)."""
    if d is None:
        d = max(x.max_length(), y.max_length()) + 1
    if L - d <= d:
        raise DepthTooSmall(f"depth {L} leaves no interior for d = {d}")
    rep = TruncatedRep(x.A, L)
    diff = represent(x, L, rep) - represent(y, L, rep)
    idx = rep.interior(d)
    sub = diff[idx][:, idx]
    return bool(sub.nnz == 0 or np.max(np.abs(sub.data)) <= tol)


def norm_estimate(x: CKElement, L: int = DEFAULT_DEPTH, d: int | None = None) -> float:
    """Largest singular value of the interior compression (a lower bound on the norm)."""
    if x.is_zero():
        return 0.0
    if d is None:
        d = x.max_length()
    rep = TruncatedRep(x.A, L)
    idx = rep.interior(d)
    sub = represent(x, L, rep)[idx][:, idx]
    if sub.nnz == 0:
        return 0.0
    if sub.shape[0] <= 2500:
        return float(np.linalg.norm(sub.toarray(), 2))
    sv = spla.svds(sub, k=1, return_singular_vectors=False, random_state=0)
    return float(sv[0])


def oracle_check_product(factors: list[CKElement], result: CKElement, L: int = DEFAULT_DEPTH, d: int | None = None, tol: float = 1e-9) -> bool:
    """Multiply the represented factors numerically and compare with ``result`` on the interior."""
    if d is None:
        d = sum(f.max_length() for f in factors) + 1
    if L - d <= d:
        raise DepthTooSmall(f"depth {L} leaves no interior for d = {d}")
    rep = TruncatedRep(result.A, L)
    prod = sp.identity(rep.dim, dtype=complex, format="csr")
    for f in factors:
        prod = prod @ represent(f, L, rep)
    diff = (prod - represent(result, L, rep)).tocsr()
    idx = rep.interior(d)
    sub = diff[idx][:, idx]
    return bool(sub.nnz == 0 or np.max(np.abs(sub.data)) <= tol)
