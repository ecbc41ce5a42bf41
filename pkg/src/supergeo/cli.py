"""Command-line driver: every verification as a subcommand.

Exit codes: 0 = pass / value computed, 1 = verification failure, 2 = usage
error.  Reports are deterministic: sorted JSON keys, canonical "p/q" rational
strings, exact arithmetic throughout.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import __version__
from .superalg import SuperError, VarTable, format_elem, parse
from .atlas import (
    atlas_from_json,
    check_cocycle_loop,
    is_calabi_yau,
    standard_chart,
    truncate_J,
)
from .cech import (
    basis_top,
    bott,
    h_line,
    h1_tangent,
    h1_tangent_bott,
    monomial_str,
    obstruction_delta,
    omega_cocycle_sum,
    picard_delta,
)
from .families import (
    CYCLIC,
    MatrixCocycle,
    REDUCED,
    atlas_equal,
    berezinian_normal_form,
    berezinian_raw,
    build_decomposable,
    build_generic,
    build_omega1,
    build_pi_plane,
    sym_restricted_rank,
)
from .selfcheck import DEFAULT_SEED, run_all

FAMILIES = ("decomposable", "omega1", "pi-plane", "generic")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # keep exit-code control in run()
        raise UsageError(message)


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a rational number: {text!r} ({exc})") from exc


def _pair_str(pair) -> str:
    return f"{pair[0]}<-{pair[1]}"


def _get_atlas(args):
    family = args.family
    lam = _fraction(getattr(args, "lam", "1"))
    if family == "decomposable":
        return build_decomposable(lam), lam
    if family == "omega1":
        return build_omega1(lam), lam
    if family == "pi-plane":
        if lam != 1:
            raise UsageError("the pi-plane atlas is the lambda = 1 member; use --lambda 1")
        return build_pi_plane(), lam
    if family == "generic":
        path = getattr(args, "matrix_json", None)
        if not path:
            raise UsageError("--matrix-json FILE is required with --family generic")
        try:
            with open(path) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise UsageError(f"cannot read {path}: {exc}") from exc
        mats = {}
        for key, rows in data["matrices"].items():
            tgt_s, src_s = key.split("<-")
            pair = (int(tgt_s), int(src_s))
            table = standard_chart(pair[1]).table
            mats[pair] = [[parse(txt, table) for txt in row] for row in rows]
        return build_generic(MatrixCocycle(mats), lam), lam
    raise UsageError(f"unknown family {family!r}")


def _class_details(cls) -> dict:
    return {"class": cls.to_dict(), "is_zero": cls.is_zero(), "bundle": f"O({cls.k})", "degree": cls.q}


# -- subcommand bodies: return (outcome, details) -----------------------------


def _cmd_cohomology(args):
    dim = h_line(args.n, args.k, args.q)
    details = {"dim": dim}
    if args.q == args.n:
        details["basis"] = [monomial_str(m) for m in basis_top(args.n, args.k)]
    return "value", details


def _cmd_bott(args):
    return "value", {"dim": bott(args.n, args.p, args.k, args.q)}


def _cmd_h1_tangent(args):
    euler = h1_tangent(args.n, args.k)
    via_bott = h1_tangent_bott(args.n, args.k)
    details = {"dim": euler, "dim_bott_serre": via_bott, "agree": euler == via_bott}
    return ("value" if euler == via_bott else "fail"), details


def _cmd_verify_atlas(args):
    atlas, lam = _get_atlas(args)
    loop = check_cocycle_loop(atlas)
    reduced_ok = True
    mismatches = []
    for pair in CYCLIC:
        f = atlas.map(*pair)
        for name, text in REDUCED[pair].items():
            want = parse(text, f.source.table)
            if truncate_J(f.assignment[name], 2) != want:
                reduced_ok = False
                mismatches.append(f"{_pair_str(pair)}:{name}")
    details = {
        "lambda": str(lam),
        "loop_ok": loop.ok,
        "loop_residuals": loop.nonzero(),
        "reduced_ok": reduced_ok,
        "reduced_mismatches": mismatches,
        "notes": list(atlas.notes),
    }
    return ("pass" if loop.ok and reduced_ok else "fail"), details


def _cmd_berezinian(args):
    atlas, lam = _get_atlas(args)
    pair = tuple(args.pair)
    if pair not in CYCLIC:
        raise UsageError(f"--pair must be one of {[f'{i} {j}' for i, j in CYCLIC]}")
    nf = berezinian_normal_form(atlas, pair)
    raw = berezinian_raw(atlas, pair)
    details = {
        "lambda": str(lam),
        "pair": _pair_str(pair),
        "value": format_elem(nf),
        "raw_value": format_elem(raw),
    }
    return "value", details


def _cmd_calabi_yau(args):
    atlas, lam = _get_atlas(args)
    rep = is_calabi_yau(atlas)
    details = {
        "lambda": str(lam),
        "flag": rep.ok,
        "berezinians": {_pair_str(k): format_elem(v) for k, v in rep.berezinians.items()},
        "normal_form": {
            _pair_str(p): format_elem(berezinian_normal_form(atlas, p)) for p in CYCLIC
        },
    }
    return ("pass" if rep.ok else "fail"), details


def _cmd_obstruction(args):
    atlas, lam = _get_atlas(args)
    cls = obstruction_delta(atlas)
    details = {"lambda": str(lam), **_class_details(cls)}
    return "value", details


def _cmd_picard_chase(args):
    atlas, lam = _get_atlas(args)
    cls = picard_delta(atlas)
    details = {
        "lambda": str(lam),
        **_class_details(cls),
        "branch": "projected/split" if cls.is_zero() else "non-projected",
    }
    return "value", details


def _cmd_omega_cocycle(args):
    atlas, lam = _get_atlas(args)
    total = omega_cocycle_sum(atlas)
    nonzero = {k: format_elem(v) for k, v in total.items() if not v.is_zero()}
    details = {"lambda": str(lam), "zero_sum": not nonzero, "residuals": nonzero}
    return ("pass" if not nonzero else "fail"), details


def _cmd_pi_plane_compare(args):
    pi = build_pi_plane()
    om = build_omega1(Fraction(1))
    equal = atlas_equal(pi, om)
    details = {
        "equal": equal,
        "assignments_checked": sum(len(f.assignment) for f in pi.maps.values()),
    }
    return ("pass" if equal else "fail"), details


def _cmd_sym_rank(args):
    even, odd = sym_restricted_rank(args.k)
    return "value", {"k": args.k, "even": even, "odd": odd}


_PARSE_TABLES = {
    "0": lambda: standard_chart(0).table,
    "1": lambda: standard_chart(1).table,
    "2": lambda: standard_chart(2).table,
    "hom": lambda: VarTable(even=("X0", "X1", "X2"), odd=()),
}


def _cmd_parse(args):
    table = _PARSE_TABLES[args.table]()
    bindings = {}
    for item in args.bind or ():
        if "=" not in item:
            raise UsageError(f"--bind needs NAME=VALUE, got {item!r}")
        name, _, value = item.partition("=")
        bindings[name] = _fraction(value)
    elem = parse(args.expr, table, bindings)
    canonical = format_elem(elem)
    details = {
        "input": args.expr,
        "canonical": canonical,
        "roundtrip_ok": parse(canonical, table) == elem,
        "even": elem.is_even(),
        "odd": elem.is_odd(),
    }
    return "value", details


def _cmd_selftest(args):
    seed = int(os.environ.get("SUPERGEO_SEED", DEFAULT_SEED))
    rep = run_all(seed=seed, total_cases=args.cases)
    return ("pass" if rep["ok"] else "fail"), rep


def _build_parser() -> _Parser:
    parser = _Parser(prog="supergeo", description=__doc__)
    parser.add_argument("--version", action="version", version=f"supergeo {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(fn=fn)
        p.add_argument("--json", action="store_true", help="emit the JSON report")
        return p

    p = add("cohomology", _cmd_cohomology, "dim (and top-degree basis) of H^q(P^n, O(k))")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--q", type=int, required=True)

    p = add("bott", _cmd_bott, "dim H^q(P^n, Omega^p(k)) by the Bott formula")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--q", type=int, required=True)

    p = add("h1-tangent", _cmd_h1_tangent, "dim H^1(P^n, T(k)) two independent ways")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)

    def family_flags(p, with_pair=False):
        p.add_argument("--family", choices=FAMILIES, required=True)
        p.add_argument("--lambda", dest="lam", default="1", metavar="RATIONAL")
        p.add_argument("--matrix-json", dest="matrix_json", metavar="FILE",
                       help="matrix cocycle JSON (with --family generic)")
        if with_pair:
            p.add_argument("--pair", type=int, nargs=2, required=True, metavar=("I", "J"))

    p = add("verify-atlas", _cmd_verify_atlas, "loop identity + reduced-part check")
    family_flags(p)
    p = add("berezinian", _cmd_berezinian, "Berezinian of one overlap Jacobian")
    family_flags(p, with_pair=True)
    p = add("calabi-yau", _cmd_calabi_yau, "constancy of all transition Berezinians")
    family_flags(p)
    p = add("obstruction", _cmd_obstruction, "obstruction class in H^2(O(-3))")
    family_flags(p)
    p = add("picard-chase", _cmd_picard_chase, "even-Picard connecting map on the degree-1 lift")
    family_flags(p)
    p = add("omega-cocycle", _cmd_omega_cocycle, "chart-0 sum of the deformation derivations")
    family_flags(p)

    add("pi-plane-compare", _cmd_pi_plane_compare, "big-cell atlas vs the lambda=1 cotangent family")

    p = add("sym-rank", _cmd_sym_rank, "even|odd rank of the restricted symmetric power")
    p.add_argument("--k", type=int, required=True)

    p = add("parse", _cmd_parse, "canonicalize an expression (grammar round trip)")
    p.add_argument("expr")
    p.add_argument("--table", choices=sorted(_PARSE_TABLES), default="0")
    p.add_argument("--bind", action="append", metavar="NAME=VALUE")

    p = add("selftest", _cmd_selftest, "seeded randomized property suite")
    p.add_argument("--cases", type=int, default=None, help="total case budget (default 13600)")

    return parser


def run(argv) -> tuple[int, dict]:
    """Execute argv; return (exit_code, report)."""
    parser = _build_parser()
    report = {"version": __version__, "exact": True}
    try:
        args = parser.parse_args(argv)
        report["command"] = args.command
        report["inputs"] = {
            k: (str(v) if isinstance(v, Fraction) else v)
            for k, v in sorted(vars(args).items())
            if k not in ("fn", "json", "command") and v is not None
        }
        outcome, details = args.fn(args)
    except UsageError as exc:
        report.update(outcome="usage-error", details={"error": str(exc)})
        return 2, report
    except SuperError as exc:  # verification failures: rejected cocycles etc.
        report.update(outcome="fail", details={"error": str(exc)})
        return 1, report
    except ValueError as exc:  # domain errors: bad n/p/q ranges etc.
        report.update(outcome="usage-error", details={"error": str(exc)})
        return 2, report
    report["outcome"] = outcome
    report["details"] = details
    return (0 if outcome in ("pass", "value") else 1), report


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    code, report = run(argv)
    if "--json" in argv:
        print(json.dumps(report, sort_keys=True))
    else:
        _print_text(report, file=sys.stderr if code == 2 else sys.stdout)
    return code


def _print_text(report: dict, file=sys.stdout) -> None:
    head = f"{report.get('command', 'supergeo')}: {report.get('outcome', '?')}"
    print(head, file=file)
    details = report.get("details", {})
    for key in sorted(details):
        print(f"  {key}: {json.dumps(details[key], sort_keys=True)}", file=file)


if __name__ == "__main__":
    sys.exit(main())
