"""Smith normal form over the integers and the K-theory of O_A.

K_0(O_A) = coker(I - A^t) and K_1(O_A) = ker(I - A^t); both are read off
the invariant factors of I - A^t.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .matrix_graph import ZeroOneMatrix, int_matmul, is_aperiodic

IntMatrix = list[list[int]]


def _identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


@dataclass(frozen=True)
class SmithDecomposition:
    """U @ M @ V == D with U, V unimodular and d_1 | d_2 | ... on the diagonal of D."""

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        k = min(len(self.D), len(self.D[0]) if self.D else 0)
        return tuple(self.D[i][i] for i in range(k))


def _swap_rows(m: IntMatrix, i: int, j: int) -> None:
    m[i], m[j] = m[j], m[i]


def _swap_cols(m: IntMatrix, i: int, j: int) -> None:
    for row in m:
        row[i], row[j] = row[j], row[i]


def _add_row(m: IntMatrix, src: int, dst: int, f: int) -> None:
    # row_dst += f * row_src
    m[dst] = [a + f * b for a, b in zip(m[dst], m[src])]


def _add_col(m: IntMatrix, src: int, dst: int, f: int) -> None:
    for row in m:
        row[dst] += f * row[src]


def smith_normal_form(M: IntMatrix) -> SmithDecomposition:
    """Smith normal form by elementary operations, pivoting on the smallest nonzero |entry|."""
    D = [list(map(int, r)) for r in M]
    rows = len(D)
    cols = len(D[0]) if rows else 0
    U = _identity(rows)
    V = _identity(cols)

    def neg_row(i):
        D[i] = [-a for a in D[i]]
        U[i] = [-a for a in U[i]]

    t = 0
    while t < min(rows, cols):
        entries = [(abs(D[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if D[i][j]]
        if not entries:
            break
        _, pi, pj = min(entries)
        _swap_rows(D, t, pi)
        _swap_rows(U, t, pi)
        _swap_cols(D, t, pj)
        _swap_cols(V, t, pj)
        done = False
        while not done:
            done = True
            for i in range(t + 1, rows):
                if D[i][t]:
                    f = D[i][t] // D[t][t]
                    _add_row(D, t, i, -f)
                    _add_row(U, t, i, -f)
                    if D[i][t]:
                        _swap_rows(D, t, i)
                        _swap_rows(U, t, i)
                        done = False
            for j in range(t + 1, cols):
                if D[t][j]:
                    f = D[t][j] // D[t][t]
                    _add_col(D, t, j, -f)
                    _add_col(V, t, j, -f)
                    if D[t][j]:
                        _swap_cols(D, t, j)
                        _swap_cols(V, t, j)
                        done = False
            if done:
                # divisibility: fold in any entry the pivot does not divide
                bad = next(
                    ((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols) if D[i][j] % D[t][t]),
                    None,
                )
                if bad is not None:
                    _add_row(D, bad[0], t, 1)
                    _add_row(U, bad[0], t, 1)
                    done = False
        if D[t][t] < 0:
            neg_row(t)
        t += 1
    return SmithDecomposition(U, D, V)


def invariant_factors(M: IntMatrix) -> tuple[int, ...]:
    return smith_normal_form(M).invariant_factors


def is_unimodular(U: IntMatrix) -> bool:
    return abs(determinant(U)) == 1


def determinant(M: IntMatrix) -> int:
    """Exact integer determinant (fraction-free Bareiss elimination)."""
    m = [list(r) for r in M]
    n = len(m)
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k]), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1] if n else 1


def determinantal_divisors(M: IntMatrix) -> tuple[int, ...]:
    """gcd of all k x k minors for k = 1..min(shape); independent route to the invariant factors."""
    from itertools import combinations

    rows = len(M)
    cols = len(M[0]) if rows else 0
    out = []
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for ri in combinations(range(rows), k):
            for ci in combinations(range(cols), k):
                g = gcd(g, determinant([[M[i][j] for j in ci] for i in ri]))
        out.append(g)
    return tuple(out)


def factors_from_divisors(divs: tuple[int, ...]) -> tuple[int, ...]:
    out = []
    prev = 1
    for d in divs:
        if d == 0:
            out.append(0)
        else:
            out.append(d // prev)
            prev = d
    return tuple(out)


@dataclass(frozen=True)
class KGroups:
    torsion: tuple[int, ...]  # nontrivial invariant factors of K_0
    k0_rank: int
    k1_rank: int

    @property
    def k0_trivial(self) -> bool:
        return not self.torsion and self.k0_rank == 0

    def k0_str(self) -> str:
        parts = [f"Z_{d}" for d in self.torsion] + ["Z"] * self.k0_rank
        return " + ".join(parts) if parts else "0"

    def k1_str(self) -> str:
        return " + ".join(["Z"] * self.k1_rank) if self.k1_rank else "0"


def k_groups(A: ZeroOneMatrix) -> KGroups:
    n = A.n
    M = [[int(i == j) - A.rows[j][i] for j in range(n)] for i in range(n)]
    factors = invariant_factors(M)
    zeros = sum(1 for d in factors if d == 0)
    return KGroups(tuple(d for d in factors if d > 1), zeros, zeros)


@dataclass(frozen=True)
class O2Verdict:
    is_O2: bool
    aperiodic_exponent: int | None
    k: KGroups
    explanation: str


def is_O2(A: ZeroOneMatrix) -> O2Verdict:
    m = is_aperiodic(A)
    k = k_groups(A)
    ok = m is not None and k.k0_trivial and k.k1_rank == 0
    if m is None:
        why = "A is not aperiodic, so the Kirchberg-algebra criterion does not apply"
    elif not ok:
        why = f"K_0 = {k.k0_str()}, K_1 = {k.k1_str()}: K-theory differs from that of O_2"
    else:
        why = (
            f"A is aperiodic (m = {m}), so O_A is a unital Kirchberg algebra, and K_0 = K_1 = 0; "
            "O_A = O_2 then follows from Kirchberg-Phillips classification (external theorem, not verified here)"
        )
    return O2Verdict(ok, m, k, why)


def check_decomposition(M: IntMatrix, dec: SmithDecomposition) -> bool:
    if int_matmul(int_matmul(dec.U, M), dec.V) != dec.D:
        return False
    if not (is_unimodular(dec.U) and is_unimodular(dec.V)):
        return False
    rows, cols = len(dec.D), len(dec.D[0])
    if any(dec.D[i][j] for i in range(rows) for j in range(cols) if i != j):
        return False
    f = dec.invariant_factors
    for a, b in zip(f, f[1:]):
        if a == 0 and b != 0:
            return False
        if a and b % a:
            return False
    return all(x >= 0 for x in f)
