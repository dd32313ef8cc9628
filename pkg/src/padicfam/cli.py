"""Command-line front end.

Subcommands: ``dims``, ``bounds``, ``paper-check``, ``transport``, ``axs``.
Exit codes: 0 success, 1 mathematical failure, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from typing import Any, Optional, Sequence

from . import axschanuel as axs
from . import bounds, checks, filtered, liedims, transport
from .exactnum import BoundValue, DomainError, format_bound
from .padic import IntegrabilityError, PadicScalar, TruncSeries, format_padic

EXIT_OK, EXIT_MATH, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# output


def render_value(v: Any) -> Any:
    """Exact rationals as "a/b", enclosures as "[lo,hi]@digits"; no floats."""
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    if isinstance(v, int):
        return v
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, BoundValue):
        return format_bound(v)
    if isinstance(v, PadicScalar):
        return format_padic(v)
    if isinstance(v, TruncSeries):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return [render_value(x) for x in v]
    if isinstance(v, dict):
        return {str(k): render_value(x) for k, x in v.items()}
    if isinstance(v, float):
        raise TypeError("floats are not emitted")
    return str(v)


def _cell(v: Any) -> str:
    v = render_value(v)
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (list, dict)):
        return json.dumps(v, separators=(",", ":"))
    return str(v)


def _columns(rows: Sequence[dict]) -> list[str]:
    cols: list[str] = []
    for r in rows:
        for k in r:
            if k not in cols:
                cols.append(k)
    return cols


def format_report(report: str, config: dict, rows: Sequence[dict], fmt: str) -> str:
    header = {"report": report, **config}
    if fmt == "json":
        body = [{"header": header}] + [{k: render_value(v) for k, v in r.items()} for r in rows]
        return json.dumps(body, indent=2) + "\n"
    cols = _columns(rows)
    if fmt == "csv":
        buf = io.StringIO()
        buf.write("# " + "; ".join(f"{k}={_cell(v)}" for k, v in header.items()) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([_cell(r.get(c)) for c in cols])
        return buf.getvalue()
    lines = [f"## {report}", "", "config: " + ", ".join(f"{k}={_cell(v)}" for k, v in config.items()), ""]
    if cols:
        lines.append("| " + " | ".join(cols) + " |")
        lines.append("|" + "---|" * len(cols))
        for r in rows:
            lines.append("| " + " | ".join(_cell(r.get(c)).replace("|", "\\|") for c in cols) + " |")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# dims


def cmd_dims(args) -> tuple[list[dict], int]:
    try:
        curve = liedims.parse_curve(args.curve)
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    if args.depth < 1:
        raise UsageError("--depth must be positive")
    N = args.depth
    e = liedims.graded_dims(curve, N).e
    genus = isinstance(curve, liedims.ProjectiveGenus)
    chi = liedims.filip_chi(curve.g, N) if genus else None
    anchor = "Labute formula" if genus else "Witt formula"
    rows = []
    for n in range(1, N + 1):
        row: dict = {"n": n, "e": e[n - 1]}
        if n >= 2:
            lo, hi = liedims.dim_envelope(curve, n, args.digits)
            row["env_lower"], row["env_upper"] = lo, hi
        else:
            row["env_lower"] = row["env_upper"] = "undefined"
        if chi is not None:
            row["chi_c"] = chi.chi_c[n - 1]
            row["dimV_c"] = chi.v_fixed[n - 1]
        row["anchor"] = anchor if chi is None else f"{anchor}; Thm filip"
        rows.append(row)
    return rows, EXIT_OK


# --------------------------------------------------------------------------
# bounds

THEOREMS = ("thm1-smooth", "thm1-stable", "mg", "stoll-zp", "padic-zp", "sunit", "twist", "bad-reduction", "gonality", "classical")

_ANCHORS = {
    "thm1-smooth": "smooth family bound",
    "thm1-stable": "stable family bound",
    "mg": "Cor Mg",
    "stoll-zp": "Zilber-Pink linear bound",
    "padic-zp": "p-adic Zilber-Pink hypotheses",
    "sunit": "S-unit bound",
    "twist": "twist bound",
    "bad-reduction": "stable family bound",
    "gonality": "Cor low_gonality",
    "classical": "comparison constants",
}


def _need(args, *names: str) -> list:
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"{args.theorem} needs " + ", ".join("--" + m for m in missing))
    return [getattr(args, n) for n in names]


def _bound_rows(args) -> list[bounds.BoundReport] | list[dict]:
    t = args.theorem
    variant = args.variant
    if t == "thm1-smooth":
        g, s, r, d = _need(args, "g", "s", "r", "d")
        return [bounds.thm1_smooth(bounds.FamilyParams(g=g, s=s, r=r, d=d))]
    if t == "thm1-stable":
        g, s, r = _need(args, "g", "s", "r")
        p = bounds.FamilyParams(g=g, s=s, r=r, d=args.d or 0)
        return [bounds.thm1_stable(p, variant or "statement")]
    if t == "mg":
        g, r = _need(args, "g", "r")
        return [bounds.mg_bound(g, r)]
    if t == "stoll-zp":
        g, s, r = _need(args, "g", "s", "r")
        return [bounds.stoll_zp(g, s, r)]
    if t == "padic-zp":
        g, n, r, dimV = _need(args, "g", "n", "r", "dimV")
        ok = bounds.padic_zp_check(g, n, r, dimV)
        return [{"name": "padic-zp", "result": ok, "valid": True, "anchor": _ANCHORS[t]}]
    if t == "sunit":
        (s,) = _need(args, "s")
        return [bounds.sunit_bound(s, args.digits)]
    if t == "twist":
        g, r = _need(args, "g", "r")
        cv = Fraction(args.cv) if args.cv is not None else Fraction(1)
        return [bounds.twist_bound(g, r, cv, variant or "statement", args.digits)]
    if t == "bad-reduction":
        g, s, r, d = _need(args, "g", "s", "r", "d")
        return bounds.bad_reduction_rows(g, s, r, d)
    if t == "gonality":
        g, r, d, gamma = _need(args, "g", "r", "d", "gamma")
        ok, b = bounds.gonality_check(g, r, d, gamma)
        return [{"name": "gonality", "result": ok, "bound": b, "valid": True, "anchor": _ANCHORS[t]}]
    if t == "classical":
        if args.s is None and args.g is None:
            raise UsageError("classical needs --s and/or --g")
        return bounds.classical_rows(args.s, args.g, args.digits)
    raise UsageError(f"unknown theorem id {t!r}")


def cmd_bounds(args) -> tuple[list[dict], int]:
    if args.theorem not in THEOREMS:
        raise UsageError(f"unknown theorem id {args.theorem!r}; choose from {', '.join(THEOREMS)}")
    try:
        out = _bound_rows(args)
    except bounds.ValidityError as exc:
        row = {"name": args.theorem, "threshold": "undefined", "min_n": None, "valid": False, "notes": str(exc), "anchor": _ANCHORS[args.theorem]}
        return [row], EXIT_OK
    except (DomainError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    rows = [r.to_record() if isinstance(r, bounds.BoundReport) else r for r in out]
    return rows, EXIT_OK


# --------------------------------------------------------------------------
# paper-check


def cmd_paper_check(args) -> tuple[list[dict], int]:
    conv = filtered.WeightConvention.parse(args.convention)
    results = checks.run_all(conv, tamper=args.tamper, seed=args.seed, p=args.p, N=args.N, cap=min(args.cap, 12), digits=args.digits)
    code = EXIT_OK
    for r in results:
        if r.ok is None:
            print(f"warning: {r.name} skipped ({r.detail})", file=sys.stderr)
        elif not r.ok:
            print(f"FAILED [{r.anchor}] {r.name}: {r.detail}", file=sys.stderr)
            code = EXIT_MATH
    return [r.to_record() for r in results], code


# --------------------------------------------------------------------------
# transport


def _matrix_rows(item: str, H, anchor: str, **extra) -> list[dict]:
    return [
        {"item": item, "i": i, "j": j, "value": a, **extra, "anchor": anchor}
        for i, r in enumerate(H)
        for j, a in enumerate(r)
    ]


def _flatness_row(rep: transport.FlatnessReport) -> dict:
    return {"item": "flatness", "flat": rep.flat, "residual_degree": rep.residual_degree, "anchor": "flatness"}


def _transport_demo(name: str, args) -> tuple[list[dict], int]:
    cap = args.cap
    if name == "betti-square":
        L = transport.demo_family(cap)
        rep = transport.betti_square_check(L)
        rows = [{"item": "betti-square", "ok": rep.ok, "residual": "0" if rep.ok else "nonzero", "anchor": "lemma simplest_commutative"}]
        rows += _matrix_rows("residual", rep.residual, "lemma simplest_commutative")
        rows += _matrix_rows("leaf", rep.leaf, "lemma simplest_commutative")
        return rows, EXIT_OK if rep.ok else EXIT_MATH
    if name == "nilpotent":
        t = TruncSeries.variable(0, ("t",), cap)
        x2 = args.p
        I = transport.coleman_disk_integral([(1 + t).inverse()], [0], [x2], args.p, args.N)[0]
        ref = transport.log_of_one_plus(args.p, args.N)
        ok = I.agrees(ref)
        rows = [
            {"item": "integral dt/(1+t), 0 to p", "value": I, "anchor": "dH = Lambda H"},
            {"item": "log(1+p)", "value": ref, "anchor": "Coleman integral"},
            {"item": "agree", "value": ok, "anchor": "Coleman integral"},
        ]
        return rows, EXIT_OK if ok else EXIT_MATH
    if name == "log-singular":
        one = TruncSeries.constant(1, ("t",), cap)
        G = transport.parallel_transport(transport.ConnectionForm.nilpotent_column([[one]]))
        lt = transport.log_singular_transport([((0, 0), (1, 0))], G)
        return _matrix_rows("exp(N L) G", lt.H, "eq GM_badred"), EXIT_OK
    raise UsageError(f"unknown transport demo {name!r}")


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def _points(rec, key: str, m: int) -> list[Fraction]:
    try:
        pt = [Fraction(str(x)) for x in rec[key]]
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"bad point {key!r}: {exc}") from None
    if len(pt) != m:
        raise UsageError(f"{key} needs {m} coordinates")
    return pt


def cmd_transport(args) -> tuple[list[dict], int]:
    if (args.demo is None) == (args.input is None):
        raise UsageError("give exactly one of --demo and --input")
    if args.demo is not None:
        return _transport_demo(args.demo, args)
    rec = _load_json(args.input)
    if not isinstance(rec, dict):
        raise UsageError("input must be a JSON object")
    try:
        L = transport.ConnectionForm.from_record(rec.get("connection", rec))
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    rep = transport.flatness_check(L)
    if not rep.flat:
        print(f"integrability fails: residual of degree {rep.residual_degree}", file=sys.stderr)
        rows = [_flatness_row(rep)]
        for (l, k), R in sorted(rep.residuals.items()):
            rows += _matrix_rows(f"residual ({l},{k})", R, "flatness")
        return rows, EXIT_MATH
    res = transport.parallel_transport(L.regular_part(), check=False)
    if args.query == "H":
        return [_flatness_row(rep)] + _matrix_rows("H", res.H, "dH = Lambda H"), EXIT_OK
    m = len(L.names)
    x1, x2 = _points(rec, "x1", m), _points(rec, "x2", m)
    try:
        P = transport.transport_evaluate(res, x1, x2, args.p, args.N)
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    H = [[P.entry(i, j) for j in range(P.shape[1])] for i in range(P.shape[0])]
    return [_flatness_row(rep)] + _matrix_rows("transport", H, "dH = Lambda H"), EXIT_OK


# --------------------------------------------------------------------------
# axs


def _verdict_row(step: int, v, cap: int) -> dict:
    row: dict = {"step": step, "verdict": type(v).__name__}
    if isinstance(v, axs.FirstIntegral):
        row["detail"] = f"f = {v.f!r}; vanishing {v.vanishing_fn!r}"
    elif isinstance(v, axs.SubalgebraDescent):
        row["detail"] = "span 0" if not v.basis else "span " + "; ".join("(" + ",".join(str(render_value(x)) for x in b) + ")" for b in v.basis)
    else:
        row["detail"] = ""
    row["certificate"] = v.certificate
    row["order"] = f"certified to total degree {cap}"
    row["anchor"] = "effectively computable rational first integral"
    return row


def cmd_axs(args) -> tuple[list[dict], int]:
    if (args.demo is None) == (args.input is None):
        raise UsageError("give exactly one of --demo and --input")
    try:
        if args.demo is not None:
            omega, V = axs.demo(args.demo, args.cap)
        else:
            omega, V = axs.from_record(_load_json(args.input))
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    loc = axs.effective_locus(omega, V)
    rows = [_verdict_row(k, v, c) for k, (v, c) in enumerate(zip(loc.verdicts, loc.caps), start=1)]
    cap = min(loc.caps, default=V.cap - 1)
    rows.append(
        {
            "step": "result",
            "verdict": "complete" if loc.complete else "incomplete",
            "detail": "functions: " + (", ".join(repr(f) for f in loc.functions) or "none"),
            "certificate": "; ".join(loc.notes),
            "order": f"certified to total degree {cap}",
            "anchor": "dim V < dim W + dim G",
        }
    )
    return rows, EXIT_OK


# --------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "md"), default="md")
    common.add_argument("--digits", type=int, default=50, help="decimal digits for enclosures")
    common.add_argument("--cap", type=int, default=16, help="series truncation degree")
    common.add_argument("--p", type=int, default=5, help="prime")
    common.add_argument("--N", type=int, default=8, help="p-adic precision")
    common.add_argument("--convention", choices=("weighted", "unweighted"), default="weighted")
    common.add_argument("--seed", type=int, default=0)

    ap = argparse.ArgumentParser(prog="padicfam", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    d = sub.add_parser("dims", parents=[common], help="graded dimensions of the fundamental Lie algebra")
    d.add_argument("curve", help='"p1" or "genus:g"')
    d.add_argument("--depth", type=int, default=10)

    b = sub.add_parser("bounds", parents=[common], help="bound rows for one theorem id")
    b.add_argument("theorem", help=" | ".join(THEOREMS))
    for name in ("g", "s", "r", "d", "d0", "n", "dimV", "gamma"):
        b.add_argument(f"--{name}", type=int)
    b.add_argument("--cv", help="product of local Tamagawa-type factors, rational")
    b.add_argument("--variant")

    pc = sub.add_parser("paper-check", parents=[common], help="run the identity and cross-check suite")
    pc.add_argument("--tamper", help=argparse.SUPPRESS)

    t = sub.add_parser("transport", parents=[common], help="parallel transport of a unipotent connection")
    t.add_argument("--demo", choices=("betti-square", "nilpotent", "log-singular"))
    t.add_argument("--input", help="JSON connection record")
    t.add_argument("--query", choices=("H", "evaluate"), default="H")

    x = sub.add_parser("axs", parents=[common], help="effective first-integral procedure")
    x.add_argument("--demo", choices=("parabola", "constant-kernel", "full-rank", "line-kernel"))
    x.add_argument("--input", help="JSON record with ambient, omega and chart")
    return ap


COMMANDS = {
    "dims": cmd_dims,
    "bounds": cmd_bounds,
    "paper-check": cmd_paper_check,
    "transport": cmd_transport,
    "axs": cmd_axs,
}


def run_config(args) -> dict:
    return {
        "digits": args.digits,
        "cap": args.cap,
        "p": args.p,
        "N": args.N,
        "convention": args.convention,
        "seed": args.seed,
    }


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.digits < 10 or args.cap < 1 or args.N < 1:
        parser.print_usage(sys.stderr)
        print("error: need --digits >= 10, --cap >= 1, --N >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        rows, code = COMMANDS[args.command](args)
    except (UsageError, DomainError) as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IntegrabilityError as exc:
        print(f"integrability error: {exc}", file=sys.stderr)
        return EXIT_MATH
    except ArithmeticError as exc:
        print(f"math failure: {exc}", file=sys.stderr)
        return EXIT_MATH
    sys.stdout.write(format_report(args.command, run_config(args), rows, args.format))
    return code


if __name__ == "__main__":
    sys.exit(main())
