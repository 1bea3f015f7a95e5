"""Command-line front end.

Every subcommand prints sorted ``key=value`` lines; prose explanations are
printed only with ``--explain``, as ``#``-prefixed lines after the report.
Expected errors exit with a class-specific code and a one-line message on
stderr.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import errors
from .ck_algebra import CKElement, column_classes, diagonal_commutant_basis, expand_to_level
from .cocycle_rokhlin import (
    block_model,
    build_averaged_unitary,
    chain_identities,
    cocycle_chain,
    scalar_model,
    witness_search,
)
from .ktheory import is_O2, smith_normal_form
from .literals import format_element, parse_action_text, parse_element, parse_matrix
from .matrix_graph import ZeroOneMatrix, is_aperiodic, is_permutation
from .numeric_oracle import TruncatedRep, represent
from .quasifree import ActionSpec, fixed_point_core_basis, verify_action, verify_endo
from .shift_dilation import corner_formula_check, phi_power

EXIT_CODES = [
    (errors.ParseError, 2),
    (errors.TooSmall, 2),
    (errors.ZeroRowOrColumn, 3),
    (errors.OrderViolation, 4),
    (errors.DimensionMismatch, 5),
    (errors.MatrixMismatch, 5),
    (errors.NonCommuting, 6),
    (errors.IdentityFailed, 7),
    (errors.NotAperiodic, 8),
    (errors.CKError, 9),
]


class Report:
    def __init__(self):
        self.values: dict[str, str] = {}
        self.notes: list[str] = []

    def __setitem__(self, key: str, value) -> None:
        if isinstance(value, bool):
            value = "true" if value else "false"
        self.values[key] = str(value)

    def note(self, text: str) -> None:
        self.notes.append(text)

    def render(self, explain: bool = False) -> str:
        lines = [f"{k}={self.values[k]}" for k in sorted(self.values)]
        if explain:
            lines += [f"# {n}" for n in self.notes]
        return "\n".join(lines) + "\n"


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise errors.ParseError(f"cannot read {path}: {exc.strerror}") from None


def _matrix(path: str) -> ZeroOneMatrix:
    return parse_matrix(_read(path))


def _action(A: ZeroOneMatrix, path: str):
    orders, rows = parse_action_text(_read(path))
    return verify_action(A, ActionSpec.from_exponents(orders, rows))


def _fmt(x: float, digits: int = 6) -> str:
    return f"{x:.{digits}f}"


def _oracle_equal(x: CKElement, numeric, rep: TruncatedRep, d: int, tol: float = 1e-9) -> bool:
    idx = rep.interior(d)
    diff = (represent(x, rep.depth, rep) - numeric).tocsr()[idx][:, idx]
    return bool(diff.nnz == 0 or np.max(np.abs(diff.data)) <= tol)


# -- subcommands -----------------------------------------------------------------------
def cmd_analyze(args) -> Report:
    A = _matrix(args.matrix)
    rep = Report()
    rep["valid"] = True
    rep["n"] = A.n
    m = is_aperiodic(A)
    rep["aperiodic"] = m is not None
    if m is not None:
        rep["m"] = m
        rep["kirchberg"] = "reported"
        rep.note(f"A^{m} > 0, so O_A is a unital Kirchberg algebra (external theorem, reported not proved)")
    rep["permutation"] = is_permutation(A)
    classes = column_classes(A)
    rep["classes"] = len(classes)
    rep["class_members"] = "|".join(",".join(map(str, c)) for c in classes)
    rep["commutant_dim_level1"] = len(diagonal_commutant_basis(A, 1))
    rep.note("classes group letters with equal columns; each gives a minimal projection r_c among the q_i")
    return rep


def cmd_action(args) -> Report:
    A = _matrix(args.matrix)
    action = _action(A, args.action)
    rep = Report()
    rep["action"] = "verified"
    order = action.spec.field_order
    for t, u in enumerate(action.unitaries):
        rep[f"unitary[{t}]"] = format_element(u.element, order)
    if args.verify:
        for t in range(len(action.unitaries)):
            verify_endo(action.endo(t))
        rep["endomorphisms"] = "pass"
        if args.verify == "oracle":
            trep = TruncatedRep(A, args.depth)
            ok = True
            for t, u in enumerate(action.unitaries):
                U = represent(u.element, args.depth, trep)
                sigma = action.endo(t)
                for i in range(1, A.n + 1):
                    img = sigma(CKElement(A, {((i,), ()): 1}))
                    ok = ok and _oracle_equal(img, U @ trep.shifts[i], trep, 2)
            rep["oracle"] = "pass" if ok else "fail"
    if args.cocycle is not None:
        results = {}
        for t, u in enumerate(action.unitaries):
            chain = cocycle_chain(u, args.cocycle)
            results.update({f"{k}[{t}]": v for k, v in chain_identities(chain, action.spec.orders[t]).items()})
        for k, v in results.items():
            rep[f"identity.{k}"] = "pass" if v else "fail"
        rep["identities"] = "pass" if all(results.values()) else "fail"
        rep.note(f"checked u_k^n = 1, the cocycle law, commutation and intertwining up to K = {args.cocycle}")
    if args.fixed is not None:
        rep[f"fixed_core_dim[{args.fixed}]"] = len(fixed_point_core_basis(action, args.fixed))
        rep[f"fixed_commutant_dim[{args.fixed}]"] = len(fixed_point_core_basis(action, args.fixed, commutant=True))
    if args.witness is not None:
        K, eps = int(args.witness[0]), float(args.witness[1])
        for t in range(len(action.unitaries)):
            _witness_report(rep, action, t, K, eps, args.budget, args.seed, prefix=f"witness[{t}]")
    return rep


def _witness_report(rep: Report, action, t: int, K: int, eps: float, budget: int, seed: int, prefix: str) -> None:
    trace = witness_search(action, t, K, eps, budget=budget, seed=seed)
    for lv in trace.levels:
        rep[f"{prefix}.defect[{lv.level}]"] = _fmt(lv.defect)
    hit = trace.first_below_eps
    rep[f"{prefix}.first_below_eps"] = "none" if hit is None else hit
    rep.note("witness defects are finite-level probes; no threshold is implied")


def cmd_witness(args) -> Report:
    A = _matrix(args.matrix)
    action = _action(A, args.action)
    rep = Report()
    _witness_report(rep, action, args.generator, args.level, args.eps, args.budget, args.seed, prefix="witness")
    return rep


def cmd_ktheory(args) -> Report:
    A = _matrix(args.matrix)
    verdict = is_O2(A)
    rep = Report()
    rep["K0"] = verdict.k.k0_str().replace(" ", "")
    rep["K1"] = verdict.k.k1_str().replace(" ", "")
    rep["O2"] = verdict.is_O2
    rep["m"] = verdict.aperiodic_exponent if verdict.aperiodic_exponent is not None else "none"
    M = [[int(i == j) - A(j + 1, i + 1) for j in range(A.n)] for i in range(A.n)]
    rep["invariant_factors"] = ",".join(map(str, smith_normal_form(M).invariant_factors))
    rep.note(verdict.explanation)
    return rep


def cmd_rokhlin_demo(args) -> Report:
    if args.r < 1 or args.order < 1:
        raise errors.ModelInvariantViolated("r and order must be positive")
    model = scalar_model(args.r, args.order) if args.model == "scalar" else block_model(args.r, args.order, args.seed)
    res = build_averaged_unitary(model, args.sampling)
    rep = Report()
    rep["defect"] = _fmt(res.defect, 4)
    rep["bound"] = _fmt(res.bound, 4)
    rep["pass"] = res.passed
    rep.note(f"{args.model} model, towers of length {args.r} and {args.r + 1}, {args.sampling} path sampling")
    return rep


def cmd_shift(args) -> Report:
    A = _matrix(args.matrix)
    x = parse_element(A, args.element, args.order)
    rep = Report()
    y = phi_power(x, args.phi_power)
    rep[f"phi[{args.phi_power}]"] = format_element(y, args.order)
    if args.level is not None:
        form = expand_to_level(y, args.level)
        rep[f"phi[{args.phi_power}].level[{args.level}]"] = format_element(CKElement(A, form.terms, canonical=True), args.order)
    if args.corner is not None:
        i, j, k = args.corner
        res = corner_formula_check(i, j, k, x)
        rep["corner.equal"] = res.equal
        rep["corner.lhs"] = format_element(res.lhs, args.order)
        rep["corner.words"] = ",".join("".join(map(str, w)) for w in res.words) or "none"
    if args.verify == "oracle":
        L = args.depth
        trep = TruncatedRep(A, L)
        X = represent(x, L, trep)
        for _ in range(args.phi_power):
            X = sum(trep.shifts[i] @ X @ trep.shifts[i].T for i in range(1, A.n + 1))
        d = y.max_length() + 1
        rep["oracle"] = "pass" if _oracle_equal(y, X, trep, d) else "fail"
    return rep


# -- entry point -------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cuntzkrieger", description="Computations in Cuntz-Krieger algebras")
    parser.add_argument("--explain", action="store_true", help="append prose explanations")
    parser.add_argument("--jobs", type=int, default=1, help="worker count (computations are single-threaded)")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized procedures")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="validate a matrix and report aperiodicity and diagonal classes")
    p.add_argument("--matrix", required=True)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("action", help="verify a diagonal quasi-free group action")
    p.add_argument("--matrix", required=True)
    p.add_argument("--action", required=True)
    p.add_argument("--verify", nargs="?", const="exact", choices=["exact", "oracle"])
    p.add_argument("--cocycle", type=int, metavar="K")
    p.add_argument("--witness", nargs=2, metavar=("K", "EPS"))
    p.add_argument("--fixed", type=int, metavar="k")
    p.add_argument("--budget", type=int, default=10_000)
    p.add_argument("--depth", type=int, default=10)
    p.set_defaults(func=cmd_action)

    p = sub.add_parser("witness", help="search for approximate innerness witnesses")
    p.add_argument("--matrix", required=True)
    p.add_argument("--action", required=True)
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--generator", type=int, default=0)
    p.add_argument("--budget", type=int, default=10_000)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("ktheory", help="K-theory of O_A and the O_2 test")
    p.add_argument("--matrix", required=True)
    p.set_defaults(func=cmd_ktheory)

    p = sub.add_parser("rokhlin-demo", help="averaging defect in a Rokhlin tower model")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--model", choices=["scalar", "block"], default="scalar")
    p.add_argument("--sampling", choices=["uniform", "shifted"], default="uniform")
    p.set_defaults(func=cmd_rokhlin_demo)

    p = sub.add_parser("shift", help="images under powers of the shift and corner formulas")
    p.add_argument("--matrix", required=True)
    p.add_argument("--element", required=True, help="element literal, e.g. p1 or 1*11.21*")
    p.add_argument("--order", type=int, default=1, help="N for z = zeta_N in literals")
    p.add_argument("--phi-power", type=int, default=1)
    p.add_argument("--level", type=int, help="also print the image expanded to this word length")
    p.add_argument("--corner", type=int, nargs=3, metavar=("I", "J", "K"))
    p.add_argument("--verify", choices=["oracle"])
    p.add_argument("--depth", type=int, default=12)
    p.set_defaults(func=cmd_shift)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = args.func(args)
    except errors.CKError as exc:
        code = next(c for cls, c in EXIT_CODES if isinstance(exc, cls))
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return code
    sys.stdout.write(report.render(args.explain))
    return 0


if __name__ == "__main__":
    sys.exit(main())
