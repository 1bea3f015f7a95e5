"""0-1 matrices, finite graphs and admissible words.

Letters are 1-based throughout: a word over an n x n matrix is a tuple of
integers in ``1..n`` and ``A(i, j)`` is ``matrix[i, j]`` with 1-based
indices.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Iterable, Sequence

from .errors import ParseError, TooSmall, ZeroRowOrColumn

Word = tuple[int, ...]


@dataclass(frozen=True)
class ZeroOneMatrix:
    """A validated square 0-1 matrix with no zero rows or columns."""

    rows: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.rows)

    def __call__(self, i: int, j: int) -> int:
        return self.rows[i - 1][j - 1]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(row[j - 1] for row in self.rows)

    def transpose(self) -> ZeroOneMatrix:
        return ZeroOneMatrix(tuple(zip(*self.rows)))

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    @cached_property
    def successors(self) -> tuple[tuple[int, ...], ...]:
        # successors[i] = letters l with A(i, l) = 1; index 0 holds all letters
        allowed = [tuple(range(1, self.n + 1))]
        for row in self.rows:
            allowed.append(tuple(j + 1 for j, a in enumerate(row) if a))
        return tuple(allowed)

    def admissible(self, word: Sequence[int]) -> bool:
        return all(1 <= a <= self.n for a in word) and all(
            self(a, b) for a, b in zip(word, word[1:])
        )

    def __str__(self) -> str:
        return "\n".join(" ".join(map(str, r)) for r in self.rows)


def validate(raw: Sequence[Sequence[int]]) -> ZeroOneMatrix:
    """Check squareness, 0/1 entries, size and absence of zero rows/columns.

    Row and column indices in errors are 1-based.
    """
    rows = [list(r) for r in raw]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ParseError("matrix is not square")
    if any(v not in (0, 1) for r in rows for v in r):
        raise ParseError("entries must be 0 or 1")
    if n < 2:
        raise TooSmall(f"need n >= 2, got n = {n}")
    for i, r in enumerate(rows):
        if not any(r):
            raise ZeroRowOrColumn("row", i + 1)
    for j in range(n):
        if not any(r[j] for r in rows):
            raise ZeroRowOrColumn("column", j + 1)
    return ZeroOneMatrix(tuple(tuple(int(v) for v in r) for r in rows))


def int_matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> list[list[int]]:
    n, m, p = len(a), len(b), len(b[0])
    return [[sum(a[i][k] * b[k][j] for k in range(m)) for j in range(p)] for i in range(n)]


def is_aperiodic(A: ZeroOneMatrix) -> int | None:
    """Smallest m with A^m entrywise positive, or None.

    The search stops at Wielandt's bound (n-1)^2 + 1.
    """
    n = A.n
    power = [list(r) for r in A.rows]
    for m in range(1, (n - 1) ** 2 + 2):
        if all(v > 0 for r in power for v in r):
            return m
        power = int_matmul(power, A.rows)
    return None


def is_permutation(A: ZeroOneMatrix) -> bool:
    return all(sum(r) == 1 for r in A.rows) and all(sum(A.column(j)) == 1 for j in range(1, A.n + 1))


def admissible_words(
    A: ZeroOneMatrix,
    k: int,
    start: Iterable[int] | None = None,
    end: Iterable[int] | None = None,
) -> list[Word]:
    """Admissible words of length k in lexicographic order.

    ``start`` restricts the first letter and ``end`` the last letter.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return [()]
    start_set = set(start) if start is not None else None
    end_set = set(end) if end is not None else None
    words: list[Word] = [(a,) for a in range(1, A.n + 1) if start_set is None or a in start_set]
    for _ in range(k - 1):
        words = [w + (b,) for w in words for b in A.successors[w[-1]]]
    if end_set is not None:
        words = [w for w in words if w[-1] in end_set]
    return words


def count_words(A: ZeroOneMatrix, k: int) -> int:
    """|W^k| via the transfer matrix: sum of the entries of A^(k-1)."""
    if k == 0:
        return 1
    power = [[int(i == j) for j in range(A.n)] for i in range(A.n)]
    for _ in range(k - 1):
        power = int_matmul(power, A.rows)
    return sum(map(sum, power))


@dataclass(frozen=True)
class FiniteGraph:
    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str, str], ...]  # (id, source, range)

    def __post_init__(self):
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise ParseError("duplicate vertex")
        ids = [e[0] for e in self.edges]
        if len(set(ids)) != len(ids):
            raise ParseError("duplicate edge id")
        for eid, s, r in self.edges:
            if s not in vs or r not in vs:
                raise ParseError(f"edge {eid} uses an undeclared vertex")
        if len(self.edges) < 2:
            raise TooSmall("a graph needs at least two edges")


def edge_matrix(E: FiniteGraph) -> ZeroOneMatrix:
    """A_E(e, f) = 1 iff r(e) = s(f); rows/columns follow the edge order."""
    raw = [[int(e[2] == f[1]) for f in E.edges] for e in E.edges]
    return validate(raw)


def is_strongly_connected_aperiodic(E: FiniteGraph) -> bool:
    try:
        A = edge_matrix(E)
    except ZeroRowOrColumn:
        return False
    return is_aperiodic(A) is not None


def brute_force_words(A: ZeroOneMatrix, k: int) -> list[Word]:
    """Filter all of {1..n}^k; kept as an independent check of admissible_words."""
    return sorted(w for w in product(range(1, A.n + 1), repeat=k) if A.admissible(w))
