"""Command line front end.

Every subcommand reads JSON (from a file, inline, or stdin via "-"), runs
one pipeline operation, and prints a JSON report with sorted keys, so the
output is byte-identical across runs.  Exit codes: 0 on success, 1 when a
verification fails (the report still prints), 2 on usage or input errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from .numkit import Matrix, rat, rat_to_str
from .frobenius import ConsistencyError
from .kfa import (
    KFA,
    IrrationalSpectrumError,
    check_kfa,
    character_of,
    invariant_table,
    scale_kfa,
)
from .character import (
    CharacterForm,
    ExprError,
    Good,
    SequenceTable,
    classify_rational,
    classify_table,
    parse_rational_expr,
)
from .cobordism import TermTypeError, evaluate, parse
from .gram import (
    IncompleteSpanningError,
    build_idempotents,
    gram_rank,
    nilpotent_trace_obstruction,
    rational_character,
    spanning_end,
    verify_splitting,
)

DSL_HELP = """\
Diagram terms are built from the generators
  uI eI mI dI   unit / counit / product / coproduct of the open sector (I)
  uS eS mS dS   the same for the closed sector (S)
  z zs          zipper S -> I and cozipper I -> S
  id:W sw:A,B   identity on the word W, swap of the single letters A and B
combined with ";" (left to right composition) and "*" (side by side),
with parentheses; example: "uS ; z ; eI".

Characters in closed form are JSON objects
  {"poly": {"1": r, "X": r, "Y": r, "Y2": r},
   "exp": [{"lambda": r, "mu": r, "coeff": r}, ...]}
and value tables are {"values": [[r, ...], ...]} with rows indexed by the
genus and columns by the window count.  Rationals r are strings "p/q" or
"p".  Generating functions use the expression grammar with tokens
integer, X, Y, + - * / ( ), e.g. "1/((1-2X)(1-3Y))" written with explicit
products: "1/((1-2*X)*(1-3*Y))".

Structures are {"open": F, "closed": F, "zipper": M, "cozipper": M} where
F = {"dim": n, "product": [[[r]]], "unit": [r], "coproduct": [[[r]]],
"counit": [r]} and M is a matrix as nested row lists.
"""


def _read_source(spec: str) -> str:
    if spec == "-":
        return sys.stdin.read()
    if spec.lstrip().startswith(("{", "[")):
        return spec
    with open(spec) as fh:
        return fh.read()


def _load_json(spec: str):
    return json.loads(_read_source(spec))


def _load_kfa(spec: str) -> KFA:
    return KFA.from_json(_load_json(spec))


def _load_char_form(spec: str) -> CharacterForm:
    return CharacterForm.from_json(_load_json(spec))


def _load_character(spec: str):
    """A character for the pairing: closed-form JSON, or a generating
    function expression which may lie outside the good class."""
    if spec == "-" or spec.lstrip().startswith("{") or os.path.exists(spec):
        return _load_char_form(spec)
    num, den = parse_rational_expr(spec)
    return rational_character(num, den, label=spec)


def _emit(payload, out_path):
    text = json.dumps(payload, sort_keys=True, indent=2)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _cmd_check_kfa(args):
    report = check_kfa(_load_kfa(args.kfa))
    payload = report.to_json()
    payload["valid"] = report.valid
    _emit(payload, args.output)
    return 0 if report.valid else 1


def _cmd_invariants(args):
    table = invariant_table(_load_kfa(args.kfa), args.gmax, args.wmax)
    _emit(table.to_json(), args.output)
    return 0


def _cmd_character(args):
    try:
        form = character_of(_load_kfa(args.kfa))
    except IrrationalSpectrumError as e:
        _emit({"status": "indeterminate", "reason": str(e)}, args.output)
        return 1
    _emit(form.to_json(), args.output)
    return 0


def _cmd_classify(args):
    if args.form:
        form = _load_char_form(args.form)
        result = Good(form)
    elif args.rational:
        num, den = parse_rational_expr(args.rational)
        result = classify_rational(num, den)
    else:
        table = SequenceTable.from_json(_load_json(args.table))
        bound = args.rank_bound
        if bound is None:
            bound = min((table.g_max - 4) // 2, (table.w_max - 4) // 2)
            if bound < 0:
                raise ExprError("table too small for any rank bound", 0)
        result = classify_table(table, bound)
    _emit(result.to_json(), args.output)
    return 0 if isinstance(result, Good) else 1


def _cmd_eval(args):
    value = evaluate(parse(args.term), _load_kfa(args.kfa))
    if isinstance(value, Matrix):
        _emit(value.to_json(), args.output)
    else:
        _emit(rat_to_str(value), args.output)
    return 0


def _cmd_gram(args):
    chi = _load_char_form(args.char)
    space = spanning_end(args.object, chi)
    matrix, rank = gram_rank(space, chi)
    payload = {
        "object": args.object,
        "rank": rank,
        "gram": None if args.no_matrix else matrix.to_json(),
        "witness": None,
    }
    _emit(payload, args.output)
    return 0


def _cmd_idempotents(args):
    chi = _load_char_form(args.char)
    idem = build_idempotents(chi)
    report = verify_splitting(chi, args.gmax, args.wmax)
    payload = {
        "passed": report.passed,
        "residual_ok": report.residual_ok,
        "components": {
            f"{rat_to_str(lam)},{rat_to_str(mu)}": ok
            for (lam, mu), ok in report.components.items()
        },
        "e_lambda_sizes": {
            rat_to_str(lam): len(e.terms) for lam, e in idem.e_lambda.items()
        },
        "g_max": args.gmax,
        "w_max": args.wmax,
    }
    _emit(payload, args.output)
    return 0 if report.passed else 1


def _cmd_witness(args):
    chi = _load_character(args.char)
    witness = nilpotent_trace_obstruction(args.object, chi, args.budget)
    payload = {
        "object": args.object,
        "budget": args.budget,
        "witness": witness.to_json() if witness else None,
    }
    _emit(payload, args.output)
    return 1 if witness else 0


def _cmd_scale(args):
    scaled = scale_kfa(_load_kfa(args.kfa), rat(Fraction(args.s)))
    _emit(scaled.to_json(), args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="octqft",
        description="Exact invariants of open-closed field theories.",
        epilog=DSL_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = top.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(fn=fn)
        p.add_argument("--output", "-o", help="write the report here instead of stdout")
        return p

    p = add("check-kfa", _cmd_check_kfa, "verify every axiom of a structure")
    p.add_argument("--kfa", required=True, help="structure JSON (path, inline, or -)")

    p = add("invariants", _cmd_invariants, "table of closed surface invariants")
    p.add_argument("--kfa", required=True)
    p.add_argument("--gmax", type=int, default=5)
    p.add_argument("--wmax", type=int, default=5)

    p = add("character", _cmd_character, "closed form of the invariant table")
    p.add_argument("--kfa", required=True)

    p = add("classify", _cmd_classify, "decide whether a generating function is good")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--rational", help="generating function expression")
    g.add_argument("--table", help="value table JSON")
    g.add_argument("--form", help="closed-form JSON to validate and echo")
    p.add_argument("--rank-bound", type=int, default=None,
                   help="max geometric terms for --table (default: largest the table supports)")

    p = add("eval", _cmd_eval, "evaluate a diagram term in a structure")
    p.add_argument("--term", required=True, help="diagram term text")
    p.add_argument("--kfa", required=True)

    p = add("gram", _cmd_gram, "pairing matrix and hom-space dimension")
    p.add_argument("--object", required=True, choices=["S", "I"])
    p.add_argument("--char", required=True, help="closed-form character JSON")
    p.add_argument("--no-matrix", action="store_true",
                   help="omit the full pairing matrix from the report")

    p = add("idempotents", _cmd_idempotents, "spectral idempotents and splitting check")
    p.add_argument("--char", required=True, help="closed-form character JSON")
    p.add_argument("--gmax", type=int, default=3)
    p.add_argument("--wmax", type=int, default=3)

    p = add("witness", _cmd_witness, "search for a nilpotent with nonzero trace")
    p.add_argument("--object", required=True,
                   help="object word such as S, I, or III")
    p.add_argument("--char", required=True,
                   help="closed-form JSON or a generating function expression")
    p.add_argument("--budget", type=int, required=True,
                   help="composition length budget of the enumerated spanning set")

    p = add("scale", _cmd_scale, "rescale the counits of a structure")
    p.add_argument("--kfa", required=True)
    p.add_argument("--s", required=True, help="nonzero rational scale")

    return top


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ConsistencyError, IrrationalSpectrumError, IncompleteSpanningError) as e:
        _emit({"error": str(e)}, getattr(args, "output", None))
        return 1
    except (json.JSONDecodeError, OSError, ExprError, TermTypeError,
            KeyError, ValueError, ZeroDivisionError) as e:
        print(f"octqft: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
