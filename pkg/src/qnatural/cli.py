"""Command-line front end: expression parsing, transform evaluation, audits.

Verbs:
    eval    evaluate a q-Natural transform of a parsed function
    closed  closed-form catalog value for a parsed function
    audit   run one registry identity over its parameter grid
    sweep   run the full audit registry over a q grid (JSON or CSV)
    limit   q -> 1 study of the first-kind transform against the classical one
    table   catalog of known transform values at a given (q, u, v)

All numbers are printed with full round-trip precision; output is UTF-8
JSON (one object) or CSV with a fixed column set.  Exit status is 0 unless
a non-erratum identity fails (status 1) or the invocation itself is invalid
(status 2, with a machine-readable error object on stderr).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import List, Optional, Tuple

from .errors import (
    DivergentTransform,
    DomainError,
    NonConvergence,
    ParseError,
    QNaturalError,
    UnknownForm,
    UnknownIdentity,
)
from .funcspec import (
    Constant,
    CosFirst,
    CosSecond,
    CoshSecond,
    ExpClassical,
    ExpFirst,
    ExpSecond,
    FunctionSpec,
    Heaviside,
    Monomial,
    Scale,
    SinFirst,
    SinSecond,
    SinhSecond,
    Sum,
    to_text,
)
from .qcore import QContext
from .transforms import (
    DirectLattice,
    Formal,
    Strategy,
    TermwiseGamma,
    TransformKind,
    TransformPoint,
    nq_first,
    nq_first_closed,
    nq_second,
    nq_second_closed,
)
from .verify import (
    IdentityReport,
    SweepConfig,
    Verdict,
    audit_identity,
    audit_sweep,
    identity_info,
    q_limit_study,
)

#: JSON schema for a single transform evaluation result.
EVAL_JSON_SCHEMA = {
    "type": "object",
    "required": ["value", "status", "termsUsed", "tailEstimate", "strategy", "params"],
    "properties": {
        "value": {"type": ["number", "null"]},
        "status": {"enum": ["Converged", "Truncated", "Diverged"]},
        "termsUsed": {"type": "integer", "minimum": 0},
        "tailEstimate": {"type": ["number", "null"]},
        "strategy": {"type": "string"},
        "params": {"type": "object"},
    },
}

#: JSON schema for one identity report emitted by audit/sweep.
REPORT_JSON_SCHEMA = {
    "type": "object",
    "required": ["identityId", "params", "lhs", "rhs", "relErr", "mode", "verdict"],
    "properties": {
        "identityId": {"type": "string"},
        "params": {"type": "object"},
        "lhs": {"type": ["number", "null"]},
        "rhs": {"type": ["number", "null"]},
        "relErr": {"type": ["number", "null"]},
        "mode": {"enum": ["Numeric", "Formal"]},
        "verdict": {"enum": ["Pass", "Fail", "Diverged", "DomainSkipped"]},
        "tolerance": {"type": "number"},
        "erratumCandidate": {"type": "boolean"},
        "detail": {"type": "string"},
    },
}

#: Column order of CSV report output.
CSV_COLUMNS = (
    "identityId", "q", "u", "v", "extraParams",
    "lhs", "rhs", "relErr", "mode", "verdict",
)


# ---------------------------------------------------------------------------
# function-expression parser
# ---------------------------------------------------------------------------


class _Cursor:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, literal: str) -> None:
        self.skip_ws()
        if not self.text.startswith(literal, self.pos):
            raise ParseError(
                f"expected {literal!r}", self.pos, expected=(literal,)
            )
        self.pos += len(literal)

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)


def _read_number(cursor: _Cursor, allow_sign: bool = False) -> float:
    cursor.skip_ws()
    start = cursor.pos
    pos = cursor.pos
    text = cursor.text
    if allow_sign and pos < len(text) and text[pos] in "+-":
        pos += 1
    digits = pos
    while pos < len(text) and text[pos].isdigit():
        pos += 1
    if pos < len(text) and text[pos] == ".":
        pos += 1
        while pos < len(text) and text[pos].isdigit():
            pos += 1
    if pos == digits:
        raise ParseError("expected a number", start, expected=("number",))
    if pos < len(text) and text[pos] in "eE":
        mark = pos
        pos += 1
        if pos < len(text) and text[pos] in "+-":
            pos += 1
        if pos < len(text) and text[pos].isdigit():
            while pos < len(text) and text[pos].isdigit():
                pos += 1
        else:
            pos = mark
    cursor.pos = pos
    return float(text[start:pos])


def _read_name(cursor: _Cursor) -> str:
    cursor.skip_ws()
    start = cursor.pos
    pos = cursor.pos
    text = cursor.text
    while pos < len(text) and (text[pos].isalnum() or text[pos] == "_"):
        pos += 1
    cursor.pos = pos
    return text[start:pos]


_FUNCTION_ATOMS = {
    "eq": ExpSecond,
    "Eq": ExpFirst,
    "sinq2": SinSecond,
    "cosq2": CosSecond,
    "sinq1": SinFirst,
    "cosq1": CosFirst,
    "coshq": CoshSecond,
    "sinhq": SinhSecond,
    "exp": ExpClassical,
}


def _parse_scaled_t_arg(cursor: _Cursor) -> float:
    """Parse 'a*t' or bare 't' inside a function atom; returns a."""
    if cursor.peek() == "t":
        cursor.expect("t")
        return 1.0
    a = _read_number(cursor, allow_sign=True)
    cursor.expect("*")
    cursor.expect("t")
    return a


def _parse_atom(cursor: _Cursor) -> FunctionSpec:
    ch = cursor.peek()
    if ch == "":
        raise ParseError("unexpected end of input", cursor.pos,
                         expected=("t^", "number", "function"))
    if ch.isdigit() or ch == ".":
        return Constant(_read_number(cursor))
    mark = cursor.pos
    name = _read_name(cursor)
    if name == "t":
        if cursor.peek() == "^":
            cursor.expect("^")
            return Monomial(_read_number(cursor, allow_sign=True))
        return Monomial(1.0)
    if name == "H":
        cursor.expect("(")
        cursor.expect("t")
        cursor.expect("-")
        a = _read_number(cursor)
        cursor.expect(")")
        return Heaviside(a)
    if name in _FUNCTION_ATOMS:
        cursor.expect("(")
        a = _parse_scaled_t_arg(cursor)
        cursor.expect(")")
        return _FUNCTION_ATOMS[name](a)
    raise ParseError(
        f"unknown function {name!r}" if name else "expected an atom",
        mark,
        expected=("t^", "number", "H(t-a)", *sorted(_FUNCTION_ATOMS)),
    )


def _parse_term(cursor: _Cursor) -> FunctionSpec:
    ch = cursor.peek()
    if ch.isdigit() or ch == ".":
        mark = cursor.pos
        value = _read_number(cursor)
        if cursor.peek() == "*":
            cursor.expect("*")
            atom = _parse_atom(cursor)
            return atom if value == 1.0 else Scale(value, atom)
        if cursor.peek() == "^":
            raise ParseError("exponent is only valid on t", mark, expected=("t^",))
        return Constant(value)
    return _parse_atom(cursor)


def parse_function(text: str) -> FunctionSpec:
    """Parse the transform-input grammar into a FunctionSpec.

    expr := term (('+'|'-') term)*
    term := [number '*'] atom
    atom := 't^'number | number | eq(a*t) | Eq(a*t) | sinq2(a*t) | cosq2(a*t)
            | sinq1(a*t) | cosq1(a*t) | coshq(t) | sinhq(t) | H(t-a) | exp(a*t)
    """
    if not text or not text.strip():
        raise ParseError("empty function expression", 0, expected=("expression",))
    cursor = _Cursor(text)
    parts: List[FunctionSpec] = [_parse_term(cursor)]
    signs: List[float] = [1.0]
    while not cursor.at_end():
        ch = cursor.peek()
        if ch == "+":
            cursor.expect("+")
            signs.append(1.0)
        elif ch == "-":
            cursor.expect("-")
            signs.append(-1.0)
        else:
            raise ParseError(
                f"unexpected character {ch!r}", cursor.pos, expected=("+", "-", "end")
            )
        parts.append(_parse_term(cursor))
    if len(parts) == 1 and signs[0] > 0:
        return parts[0]
    terms = tuple(
        part if sign > 0 else Scale(-1.0, part) if not isinstance(part, Scale)
        else Scale(-part.c, part.inner)
        for sign, part in zip(signs, parts)
    )
    return Sum(terms)


# ---------------------------------------------------------------------------
# serialization helpers
# ---------------------------------------------------------------------------


def _clean_number(x: float) -> Optional[float]:
    return x if isinstance(x, (int, float)) and math.isfinite(x) else None


def _report_payload(report: IdentityReport) -> dict:
    payload = report.to_dict()
    for key in ("lhs", "rhs", "relErr"):
        payload[key] = _clean_number(payload[key])
    return payload


def _report_csv_row(report: IdentityReport) -> dict:
    params = {k: v for k, v in report.params}
    extra = {
        k: v for k, v in sorted(params.items()) if k not in ("q", "u", "v")
    }
    def fmt(x):
        return "" if x is None else f"{x:.17g}"
    return {
        "identityId": report.identity_id,
        "q": fmt(params.get("q")),
        "u": fmt(params.get("u")),
        "v": fmt(params.get("v")),
        "extraParams": json.dumps(extra, sort_keys=True),
        "lhs": fmt(_clean_number(report.lhs)),
        "rhs": fmt(_clean_number(report.rhs)),
        "relErr": fmt(_clean_number(report.rel_err)),
        "mode": report.mode.value,
        "verdict": report.verdict,
    }


def reports_to_csv(reports) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for report in reports:
        writer.writerow(_report_csv_row(report))
    return buffer.getvalue()


def _emit(payload, fmt: str, out) -> None:
    if fmt == "json":
        print(json.dumps(payload, sort_keys=True, allow_nan=False), file=out)
    else:
        print(payload, file=out, end="")


# ---------------------------------------------------------------------------
# command handlers
# ---------------------------------------------------------------------------


def _context_from(args) -> QContext:
    return QContext(
        q=args.q,
        lattice_k_min=args.k_min,
        lattice_k_max=args.k_max,
        rel_tol=args.rel_tol,
        max_terms=args.max_terms,
    )


def _strategy_from(args, kind: str) -> Strategy:
    name = args.strategy
    if name is None:
        return TermwiseGamma() if kind == TransformKind.FIRST else DirectLattice("bilateral")
    if name == "termwise":
        return TermwiseGamma()
    if name == "lattice":
        return DirectLattice("aligned" if kind == TransformKind.FIRST else "bilateral")
    if name == "lattice-bilateral":
        return DirectLattice("bilateral")
    if name.startswith("formal:"):
        return Formal(int(name.split(":", 1)[1]))
    raise DomainError(f"unknown strategy {name!r}")


def _cmd_eval(args, out) -> int:
    ctx = _context_from(args)
    spec = parse_function(args.f)
    pt = TransformPoint(args.u, args.v)
    strategy = _strategy_from(args, args.kind)
    if args.kind == TransformKind.FIRST:
        result = nq_first(spec, pt, ctx, strategy)
    else:
        result = nq_second(spec, pt, ctx, strategy)
    payload = {
        "value": _clean_number(result.value),
        "status": result.status.value,
        "termsUsed": result.terms_used,
        "tailEstimate": _clean_number(result.tail_estimate),
        "strategy": type(strategy).__name__,
        "params": {
            "f": to_text(spec), "kind": args.kind,
            "q": args.q, "u": args.u, "v": args.v,
        },
    }
    _emit(payload, "json", out)
    return 0


def _cmd_closed(args, out) -> int:
    ctx = _context_from(args)
    spec = parse_function(args.f)
    pt = TransformPoint(args.u, args.v)
    payload = {
        "params": {
            "f": to_text(spec), "kind": args.kind,
            "q": args.q, "u": args.u, "v": args.v,
        },
    }
    if args.kind == TransformKind.FIRST:
        payload["value"] = nq_first_closed(spec, pt, ctx)
    else:
        payload["variants"] = nq_second_closed(spec, pt, ctx)
    _emit(payload, "json", out)
    return 0


def _exit_code_for(reports) -> int:
    bad = any(
        r.verdict == Verdict.FAIL and not r.erratum_candidate for r in reports
    )
    return 1 if bad else 0


def _cmd_audit(args, out) -> int:
    identity = identity_info(args.id)
    qs = _parse_q_list(args.q_list)
    reports = []
    for q in qs:
        ctx = QContext(q=q, rel_tol=args.rel_tol, max_terms=args.max_terms)
        for params in identity.grid(q):
            reports.append(audit_identity(args.id, params, ctx))
    if args.format == "csv":
        _emit(reports_to_csv(reports), "csv", out)
    else:
        _emit([_report_payload(r) for r in reports], "json", out)
    return _exit_code_for(reports)


def _cmd_sweep(args, out) -> int:
    ids = tuple(args.ids.split(",")) if args.ids else None
    config = SweepConfig(qs=_parse_q_list(args.q_list), identity_ids=ids)
    result = audit_sweep(config)
    if args.format == "csv":
        _emit(reports_to_csv(result.reports), "csv", out)
    else:
        payload = {
            "reports": [_report_payload(r) for r in result.reports],
            "summary": result.summary,
            "exitOk": result.exit_ok,
        }
        _emit(payload, "json", out)
    return 0 if result.exit_ok else 1


def _cmd_limit(args, out) -> int:
    ctx = _context_from(args)
    spec = parse_function(args.f)
    study = q_limit_study(
        spec, TransformPoint(args.u, args.v), _parse_q_list(args.q_list), ctx
    )
    payload = {
        "rows": [
            {
                "q": row.q,
                "qTransform": _clean_number(row.q_value),
                "classical": _clean_number(row.classical_value),
                "gap": _clean_number(row.gap),
            }
            for row in study.rows
        ],
        "gapMonotone": study.gap_monotone,
        "params": {"f": to_text(spec), "u": args.u, "v": args.v},
    }
    _emit(payload, "json", out)
    return 0


def _cmd_table(args, out) -> int:
    ctx = _context_from(args)
    pt = TransformPoint(args.u, args.v)
    a = 0.5 * args.v / args.u
    rows = []

    def add(spec, kind, form, value):
        rows.append({
            "function": to_text(spec), "kind": kind,
            "form": form, "value": _clean_number(value),
        })

    add(Constant(1.0), "first", "1/v", nq_first_closed(Constant(1.0), pt, ctx))
    for n in (1, 2, 3):
        add(Monomial(float(n)), "first", "u^n [n]!/v^(n+1)",
            nq_first_closed(Monomial(float(n)), pt, ctx))
    add(ExpSecond(a), "first", "1/(v-au)", nq_first_closed(ExpSecond(a), pt, ctx))
    add(ExpFirst(a), "first", "series", nq_first_closed(ExpFirst(a), pt, ctx))
    u, v = pt.u, pt.v
    add(CoshSecond(a), "first", "stated v/(v^2+a^2u^2)",
        nq_first_closed(CoshSecond(a), pt, ctx))
    add(CoshSecond(a), "first", "derived v/(v^2-a^2u^2)",
        v / (v * v - a * a * u * u))
    add(SinhSecond(a), "first", "stated au/(v^2+a^2u^2)",
        nq_first_closed(SinhSecond(a), pt, ctx))
    add(SinhSecond(a), "first", "derived au/(v^2-a^2u^2)",
        a * u / (v * v - a * a * u * u))
    add(CosSecond(a), "first", "stated v/(v^2-a^2u^2)",
        nq_first_closed(CosSecond(a), pt, ctx))
    add(CosSecond(a), "first", "derived v/(v^2+a^2u^2)",
        v / (v * v + a * a * u * u))
    add(SinSecond(a), "first", "stated au/(v^2-a^2u^2)",
        nq_first_closed(SinSecond(a), pt, ctx))
    add(SinSecond(a), "first", "derived au/(v^2+a^2u^2)",
        a * u / (v * v + a * a * u * u))
    add(Heaviside(args.q), "first", "(1/v) E_q(-(v/u)a)",
        nq_first_closed(Heaviside(args.q), pt, ctx))
    for n in (1, 2):
        variants = nq_second_closed(Monomial(float(n)), pt, ctx)
        for label, value in sorted(variants.items()):
            add(Monomial(float(n)), "second", f"{label} exponent", value)
    variants = nq_second_closed(Monomial(1.5), pt, ctx)
    add(Monomial(1.5), "second", "gamma", variants["gamma"])
    _emit({"rows": rows, "params": {"q": args.q, "u": args.u, "v": args.v}}, "json", out)
    return 0


def _parse_q_list(text: str) -> Tuple[float, ...]:
    try:
        qs = tuple(float(chunk) for chunk in text.split(",") if chunk.strip())
    except ValueError as exc:
        raise DomainError(f"bad q list {text!r}: {exc}") from None
    if not qs:
        raise DomainError("empty q list")
    for q in qs:
        if not (0.0 < q < 1.0):
            raise DomainError(f"q values must lie in (0, 1), got {q}")
    return qs


# ---------------------------------------------------------------------------
# argument parsing and dispatch
# ---------------------------------------------------------------------------


def _add_context_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--q", type=float, default=0.5, help="deformation parameter")
    parser.add_argument("--rel-tol", dest="rel_tol", type=float, default=1e-10)
    parser.add_argument("--max-terms", dest="max_terms", type=int, default=500)
    parser.add_argument("--k-min", dest="k_min", type=int, default=-60)
    parser.add_argument("--k-max", dest="k_max", type=int, default=200)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qnatural",
        description="q-Natural transform evaluation and identity auditing",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    p_eval = sub.add_parser("eval", help="evaluate a q-Natural transform")
    p_eval.add_argument("--kind", choices=("first", "second"), required=True)
    p_eval.add_argument("--f", required=True, help="function expression")
    p_eval.add_argument("--u", type=float, default=1.0)
    p_eval.add_argument("--v", type=float, default=1.0)
    p_eval.add_argument("--strategy", default=None,
                        help="termwise | lattice | lattice-bilateral | formal:N")
    _add_context_options(p_eval)
    p_eval.set_defaults(handler=_cmd_eval)

    p_closed = sub.add_parser("closed", help="closed-form catalog value")
    p_closed.add_argument("--kind", choices=("first", "second"), required=True)
    p_closed.add_argument("--f", required=True)
    p_closed.add_argument("--u", type=float, default=1.0)
    p_closed.add_argument("--v", type=float, default=1.0)
    _add_context_options(p_closed)
    p_closed.set_defaults(handler=_cmd_closed)

    p_audit = sub.add_parser("audit", help="audit one identity")
    p_audit.add_argument("--id", required=True, metavar="ID")
    p_audit.add_argument("--q", dest="q_list", default="0.3,0.5,0.8",
                         help="comma-separated q grid")
    p_audit.add_argument("--rel-tol", dest="rel_tol", type=float, default=1e-12)
    p_audit.add_argument("--max-terms", dest="max_terms", type=int, default=900)
    p_audit.add_argument("--format", choices=("json", "csv"), default="json")
    p_audit.set_defaults(handler=_cmd_audit)

    p_sweep = sub.add_parser("sweep", help="audit the whole registry")
    p_sweep.add_argument("--suite", choices=("default",), default="default")
    p_sweep.add_argument("--q", dest="q_list", default="0.3,0.5,0.8")
    p_sweep.add_argument("--ids", default=None, help="comma-separated identity ids")
    p_sweep.add_argument("--format", choices=("json", "csv"), default="json")
    p_sweep.set_defaults(handler=_cmd_sweep)

    p_limit = sub.add_parser("limit", help="q -> 1 limit study")
    p_limit.add_argument("--f", required=True)
    p_limit.add_argument("--u", type=float, default=1.0)
    p_limit.add_argument("--v", type=float, default=1.0)
    p_limit.add_argument("--q", dest="q_list", default="0.9,0.99,0.999")
    p_limit.set_defaults(
        handler=_cmd_limit, q=0.5, rel_tol=1e-10, max_terms=500, k_min=-60, k_max=200
    )

    p_table = sub.add_parser("table", help="known transform values")
    p_table.add_argument("--u", type=float, default=1.0)
    p_table.add_argument("--v", type=float, default=2.0)
    _add_context_options(p_table)
    p_table.set_defaults(handler=_cmd_table)

    return parser


_ERROR_CODES = {
    ParseError: "parse-error",
    DomainError: "domain-error",
    NonConvergence: "non-convergence",
    DivergentTransform: "divergent-transform",
    UnknownForm: "unknown-form",
    UnknownIdentity: "unknown-identity",
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.handler(args, sys.stdout)
    except QNaturalError as exc:
        error = {
            "error": {
                "code": _ERROR_CODES.get(type(exc), "error"),
                "type": type(exc).__name__,
                "message": str(exc),
            }
        }
        if isinstance(exc, ParseError):
            error["error"]["position"] = exc.position
            error["error"]["expected"] = list(exc.expected)
        print(json.dumps(error, sort_keys=True), file=sys.stderr)
        return 2
    except ValueError as exc:
        print(json.dumps({"error": {"code": "bad-arguments", "message": str(exc)}}),
              file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
