"""Plain-text formats: element literals, matrix, graph and action files.

Element literals::

    term  := coeff "*" pair | pair | coeff | ("p" | "q") letter
    pair  := ["s"] word ["." word "*"]
    coeff := rational | [rational] "z" ["^" int] | "(" coeff (("+"|"-") coeff)* ")"

``z`` is zeta_N for the order N supplied by the caller.  Words are digit
strings when n <= 9 and comma-separated letters otherwise.  Examples:
``1*11.21*`` is s_11 s_21^*, ``s1`` is s_1, ``s.2*`` is s_2^*, ``1/2 z^3``
is (1/2) zeta_N^3 times the unit.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .ck_algebra import CKElement, p, q
from .cyclotomic import RootScalar, format_scalar
from .errors import ParseError
from .matrix_graph import FiniteGraph, Word, ZeroOneMatrix, validate

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<z>z)|(?P<op>[-+*^().])|(?P<pq>[pq])|(?P<s>s)|(?P<comma>,))"
)


def _tokens(text: str) -> list[tuple[str, str]]:
    out = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        kind = m.lastgroup
        out.append((kind, m.group(kind)))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, A: ZeroOneMatrix, order: int, text: str):
        self.A = A
        self.order = order
        self.toks = _tokens(text)
        self.i = 0

    def peek(self, k: int = 0):
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, value: str):
        tok = self.take()
        if tok[1] != value:
            raise ParseError(f"expected {value!r}, got {tok[1]!r}")

    # coefficient grammar
    def monomial(self) -> RootScalar:
        kind, val = self.peek()
        rat = Fraction(1)
        seen = False
        if kind == "num":
            self.take()
            rat = Fraction(val)
            seen = True
        if self.peek()[0] == "z":
            self.take()
            power = 1
            if self.peek()[1] == "^":
                self.take()
                kind, val = self.take()
                if kind != "num" or "/" in val:
                    raise ParseError("exponent must be an integer")
                power = int(val)
            return RootScalar.root(power, self.order, rat)
        if not seen:
            raise ParseError("expected a coefficient")
        return RootScalar.rational(rat)

    def coeff(self) -> RootScalar:
        if self.peek()[1] == "(":
            self.take()
            sign = 1
            if self.peek()[1] == "-":
                self.take()
                sign = -1
            total = self.monomial() * sign
            while self.peek()[1] in ("+", "-"):
                op = self.take()[1]
                m = self.monomial()
                total = total + m if op == "+" else total - m
            self.expect(")")
            return total
        return self.monomial()

    def word(self) -> Word:
        letters: list[int] = []
        if self.A.n <= 9:
            if self.peek()[0] == "num" and "/" not in self.peek()[1]:
                letters = [int(ch) for ch in self.take()[1]]
        else:
            while self.peek()[0] == "num":
                letters.append(int(self.take()[1]))
                if self.peek()[0] == "comma":
                    self.take()
                else:
                    break
        for a in letters:
            if not 1 <= a <= self.A.n:
                raise ParseError(f"letter {a} outside 1..{self.A.n}")
        return tuple(letters)

    def pair(self) -> tuple[Word, Word]:
        if self.peek()[0] == "s":
            self.take()
        mu = self.word()
        nu: Word = ()
        if self.peek()[1] == ".":
            self.take()
            nu = self.word()
            self.expect("*")
            if not nu:
                raise ParseError("empty starred word")
        if not mu and not nu:
            raise ParseError("empty word pair")
        return mu, nu

    def projection(self) -> CKElement:
        kind, val = self.take()
        letter = self.word()
        if len(letter) != 1:
            raise ParseError("projection needs a single letter")
        return (p if val == "p" else q)(self.A, letter[0])

    def term(self) -> CKElement:
        kind, val = self.peek()
        if kind == "pq":
            return self.projection()
        if kind == "s":
            return CKElement(self.A, {self.pair(): 1})
        c = self.coeff()
        if self.peek()[1] == "*":
            self.take()
            if self.peek()[0] == "pq":
                return self.projection().scale(c)
            return CKElement(self.A, {self.pair(): c})
        return CKElement(self.A, {((), ()): c})

    def expr(self) -> CKElement:
        sign = 1
        if self.peek()[1] == "-":
            self.take()
            sign = -1
        total = self.term().scale(sign)
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            t = self.term()
            total = total + t if op == "+" else total - t
        if self.peek()[0] is not None:
            raise ParseError(f"trailing input near {self.peek()[1]!r}")
        return total


def parse_element(A: ZeroOneMatrix, text: str, order: int = 1) -> CKElement:
    if not text.strip():
        raise ParseError("empty element literal")
    return _Parser(A, order, text).expr()


def format_word(A: ZeroOneMatrix, w: Word) -> str:
    return "".join(map(str, w)) if A.n <= 9 else ",".join(map(str, w))


def format_element(x: CKElement, order: int | None = None) -> str:
    """Render in literal syntax; ``z`` denotes zeta of ``order`` (default: lcm of the coefficients)."""
    if x.is_zero():
        return "0"
    if order is None:
        order = x.scalar_order()
    pieces = []
    for (mu, nu), c in x.terms.items():
        coeff = format_scalar(c, order)
        if not mu and not nu:
            pieces.append(coeff)
            continue
        body = format_word(x.A, mu)
        if nu:
            body += "." + format_word(x.A, nu) + "*"
        if coeff == "1":
            pieces.append("s" + body)
        elif coeff == "-1":
            pieces.append("-s" + body)
        else:
            pieces.append(f"{coeff}*{body}")
    out = pieces[0]
    for piece in pieces[1:]:
        out += f" - {piece[1:]}" if piece.startswith("-") else f" + {piece}"
    return out


# -- files -------------------------------------------------------------------------
def _content_lines(text: str) -> list[str]:
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    return lines


def parse_matrix(text: str) -> ZeroOneMatrix:
    lines = _content_lines(text)
    if not lines:
        raise ParseError("empty matrix file")
    try:
        n = int(lines[0].strip())
    except ValueError:
        raise ParseError("first line must be the size n") from None
    if len(lines) != n + 1:
        raise ParseError(f"expected {n} matrix rows, found {len(lines) - 1}")
    rows = []
    for line in lines[1:]:
        parts = line.split()
        if len(parts) != n or any(t not in ("0", "1") for t in parts):
            raise ParseError(f"bad matrix row: {line!r}")
        rows.append([int(t) for t in parts])
    return validate(rows)


def format_matrix(A: ZeroOneMatrix) -> str:
    return f"{A.n}\n{A}\n"


def parse_graph(text: str) -> FiniteGraph:
    lines = _content_lines(text)
    if not lines or not lines[0].startswith("vertices:"):
        raise ParseError("first line must start with 'vertices:'")
    vertices = tuple(lines[0][len("vertices:"):].split())
    edges = []
    for line in lines[1:]:
        parts = line.split()
        if len(parts) != 4 or parts[0] != "edge":
            raise ParseError(f"bad edge line: {line!r}")
        edges.append(tuple(parts[1:]))
    return FiniteGraph(vertices, tuple(edges))


def parse_action_text(text: str) -> tuple[tuple[int, ...], tuple[tuple[str, ...], ...]]:
    """Return (cyclic orders, eigenvalue rows) from an action file.

    An entry is an integer exponent a (eigenvalue exp(2 pi i a / n_t)) or a
    turn "a/m" (eigenvalue exp(2 pi i a / m)); entries are returned as text.
    """
    lines = _content_lines(text)
    if not lines or not lines[0].startswith("group:"):
        raise ParseError("first line must start with 'group:'")
    try:
        orders = tuple(int(t) for t in lines[0][len("group:"):].split())
        rows = tuple(tuple(line.split()) for line in lines[1:])
        for row in rows:
            for tok in row:
                Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise ParseError("action entries must be integers or turns a/m") from None
    if not orders or any(o < 1 for o in orders):
        raise ParseError("cyclic orders must be positive")
    if len(rows) != len(orders):
        raise ParseError(f"expected {len(orders)} generator lines, found {len(rows)}")
    return orders, rows
