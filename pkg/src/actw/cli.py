"""Command-line front end.

Exit codes: 0 success/derivable, 1 underivable, 2 unknown (or a derivation
valid only up to a bound), 64 usage error, 65 input data error.  Reports are
stable-ordered key/value lines; wall time is always last so golden files can
drop it.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import reductions, search
from .calculus import INVALID, VALID, VALID_UP_TO_BOUND, check_derivation
from .dyadic import absorb_all, to_dyadic
from .ordinals import OrdVec, base_step, lift, mu_sequent, ord_compare, rho, rho_inv
from .proofio import format_derivation, parse_derivation
from .reductions import (
    HypothesisSet,
    compile_tm,
    embed,
    gen_formulas,
    gen_main_sequent,
    parse_machine,
    parse_srs,
    srs_reach,
    suffix_predicate,
)
from .syntax import (
    DSequent,
    FragmentClass,
    ParseError,
    Sequent,
    fragment_of,
    parse_formula,
    parse_sequent,
    parse_sequent_or_dsequent,
    print_dsequent,
    print_formula,
    print_sequent,
    read_sequent_file,
)

USAGE_ERROR = 64
DATA_ERROR = 65

_VERDICT_CODES = {search.DERIVABLE: 0, search.UNDERIVABLE: 1, search.UNKNOWN: 2}


class Report:
    """Ordered key/value run report; printable and JSON-serialisable."""

    def __init__(self, command: str):
        self.items = [("command", command)]
        self.t0 = time.monotonic()

    def add(self, key, value):
        self.items.append((key, str(value)))

    def emit(self, json_path=None):
        self.items.append(("wall_time_s", f"{time.monotonic() - self.t0:.3f}"))
        for k, v in self.items:
            print(f"{k}: {v}")
        if json_path:
            with open(json_path, "w", encoding="utf-8") as fh:
                json.dump(dict(self.items), fh, indent=2)
                fh.write("\n")


def _parse_input_sequent(text: str):
    try:
        return parse_sequent_or_dsequent(text)
    except ParseError as exc:
        raise SystemExit(_data_error(f"cannot parse sequent: {exc}"))


def _data_error(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return DATA_ERROR


def _as_dyadic(s) -> DSequent:
    if isinstance(s, DSequent):
        return s
    return absorb_all(to_dyadic(s))


def cmd_prove(args) -> int:
    rep = Report("refute" if args.refute else "prove")
    s = _parse_input_sequent(args.sequent)
    rep.add("sequent", s)
    fragment = args.fragment
    if fragment == "auto":
        fragment = "ne" if fragment_of(s) <= FragmentClass.NE else "m"
    rep.add("fragment", fragment)
    try:
        ds = _as_dyadic(s)
        if fragment == "ne":
            star_free = search._star_free(ds)
            if star_free and fragment_of(ds) <= FragmentClass.NE:
                verdict = search.decide_ne_star_free(ds)
            else:
                verdict = search.prove_bounded(
                    ds, depth=args.depth, star_bound=args.star_bound
                )
        else:
            verdict = search.prove_bounded(
                ds, depth=args.depth, star_bound=args.star_bound
            )
    except ValueError as exc:
        return _data_error(str(exc))
    rep.add("verdict", verdict.status)
    if verdict.witness is not None:
        rep.add("witness", f"star@{verdict.witness[0]} instance n={verdict.witness[1]}")
    if verdict.bounds:
        rep.add("bounds", json.dumps(verdict.bounds, sort_keys=True))
    rep.add("seed", args.seed)
    if verdict.proof is not None and args.emit_proof:
        with open(args.emit_proof, "w", encoding="utf-8") as fh:
            fh.write(format_derivation(verdict.proof))
        rep.add("proof_file", args.emit_proof)
    rep.emit(args.json_report)
    return _VERDICT_CODES[verdict.status]


def cmd_check(args) -> int:
    rep = Report("check")
    try:
        with open(args.derivation, encoding="utf-8") as fh:
            d = parse_derivation(fh.read())
    except (OSError, ValueError) as exc:
        return _data_error(f"cannot read derivation: {exc}")
    hyps = ()
    if args.hyps:
        with open(args.hyps, encoding="utf-8") as fh:
            hyps = tuple(read_sequent_file(fh.read()))
    srs = None
    if args.srs:
        with open(args.srs, encoding="utf-8") as fh:
            srs = parse_srs(fh.read())
    res = check_derivation(
        d,
        allow_cut=args.allow_cut,
        omega_bound=args.omega_bound,
        hypotheses=hyps,
        srs=srs,
    )
    rep.add("conclusion", d.conclusion)
    rep.add("status", res.status)
    if res.reason:
        rep.add("reason", res.reason)
        rep.add("at_node", "/".join(map(str, res.where)) or "root")
    rep.emit(args.json_report)
    return {VALID: 0, VALID_UP_TO_BOUND: 1, INVALID: 2}[res.status]


def cmd_embed(args) -> int:
    rep = Report("embed")
    try:
        with open(args.hyps, encoding="utf-8") as fh:
            hyps = HypothesisSet(tuple(read_sequent_file(fh.read())))
    except (OSError, ValueError) as exc:
        return _data_error(f"cannot read hypotheses: {exc}")
    goal = _parse_input_sequent(args.sequent)
    if not isinstance(goal, Sequent):
        return _data_error("embed expects a flat sequent goal")
    embedded = embed(hyps, goal)
    rep.add("hypotheses", len(hyps.sequents))
    rep.add("classes", ",".join(hyps.classify()))
    rep.add("embedded", embedded)
    code = 0
    if args.decide:
        ds = _as_dyadic(embedded)
        try:
            verdict = search.decide_ne_star_free(ds)
        except ValueError:
            verdict = search.prove_bounded(ds, depth=args.depth)
        rep.add("verdict", verdict.status)
        code = _VERDICT_CODES[verdict.status]
    rep.emit(args.json_report)
    return code


def cmd_measure(args) -> int:
    rep = Report("measure")
    s = _parse_input_sequent(args.sequent)
    try:
        m = mu_sequent(s)
    except ValueError as exc:
        return _data_error(str(exc))
    rep.add("sequent", s)
    rep.add("mu", m)
    rep.add("nu", m.symbolic())
    code = rho(m)
    rep.add("code", code if code < 2**64 else "code overflow")
    rep.emit(args.json_report)
    return 0


def _parse_vec(text: str) -> OrdVec:
    body = text.strip()
    if body.startswith("(") and body.endswith(")"):
        body = body[1:-1]
    parts = [p for p in body.replace(",", " ").split() if p]
    return OrdVec(tuple(int(p) for p in parts))


def cmd_ordinal(args) -> int:
    rep = Report(f"ordinal {args.op}")
    try:
        if args.op == "encode":
            v = _parse_vec(args.args[0])
            rep.add("vector", v)
            rep.add("code", rho(v))
        elif args.op == "decode":
            v = rho_inv(int(args.args[0]))
            rep.add("vector", v)
            rep.add("nu", v.symbolic())
        elif args.op == "compare":
            a, b = _parse_vec(args.args[0]), _parse_vec(args.args[1])
            c = ord_compare(a, b)
            rep.add("result", {-1: "less", 0: "equal", 1: "greater"}[c])
        elif args.op == "lift":
            v = lift(_parse_vec(args.args[0]), int(args.args[1]))
            rep.add("vector", v)
            rep.add("nu", v.symbolic())
        elif args.op == "base-step":
            base, step = base_step(_parse_vec(args.args[0]))
            rep.add("base", base)
            rep.add("step", step)
        else:
            return _data_error(f"unknown ordinal operation {args.op!r}")
    except (ValueError, IndexError) as exc:
        return _data_error(str(exc))
    rep.emit(args.json_report)
    return 0


def cmd_tm_compile(args) -> int:
    rep = Report("tm-compile")
    try:
        with open(args.machine, encoding="utf-8") as fh:
            m = parse_machine(fh.read())
        srs = compile_tm(m, args.left, args.right, args.end)
    except (OSError, ValueError) as exc:
        return _data_error(str(exc))
    text = str(srs) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        rep.add("rules", len(srs.rules))
        rep.add("out", args.out)
        rep.emit(args.json_report)
    else:
        print(text, end="")
    return 0


def cmd_srs_run(args) -> int:
    rep = Report("srs-run")
    try:
        with open(args.srs, encoding="utf-8") as fh:
            srs = parse_srs(fh.read())
    except (OSError, ValueError) as exc:
        return _data_error(str(exc))
    start = tuple(args.start.split())
    pred = suffix_predicate(args.suffix.split()) if args.suffix else (lambda w: True)
    matches, truncated = srs_reach(srs, start, pred, args.steps, args.breadth)
    rep.add("start", " ".join(start))
    rep.add("matches", " | ".join(sorted(" ".join(w) for w in matches)) or "-")
    rep.add("truncated", truncated)
    rep.emit(args.json_report)
    return 0


def cmd_gen_lower_bound(args) -> int:
    rep = Report("gen-lower-bound")
    ks = [int(p) for p in args.ks.split(",") if p != ""] if args.ks else []
    try:
        if args.m0 and args.m1:
            with open(args.m0, encoding="utf-8") as fh:
                m0 = parse_machine(fh.read())
            with open(args.m1, encoding="utf-8") as fh:
                m1 = parse_machine(fh.read())
        else:
            m0, m1 = reductions.demo_check_machines()
        system = reductions.build_system(m0, m1)
        hyps = reductions.hypotheses_from_srs(system)
        table = gen_formulas(max(ks) if ks else 0, m0.initial, m1.initial)
        main = gen_main_sequent(args.x, ks, m0.initial, m1.initial)
    except (OSError, ValueError) as exc:
        return _data_error(str(exc))
    rep.add("x", args.x)
    rep.add("ks", ",".join(map(str, ks)) or "-")
    rep.add("hypotheses", len(hyps.sequents))
    for name in sorted(table):
        rep.add(f"formula.{name}", print_formula(table[name]))
    rep.add("main_sequent", main)
    if args.hyps_out:
        with open(args.hyps_out, "w", encoding="utf-8") as fh:
            for h in hyps.sequents:
                fh.write(print_sequent(h) + "\n")
        rep.add("hyps_out", args.hyps_out)
    if args.srs_out:
        with open(args.srs_out, "w", encoding="utf-8") as fh:
            fh.write(str(system) + "\n")
        rep.add("srs_out", args.srs_out)
    rep.emit(args.json_report)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="actw",
        description="workbench for infinitary action logic with the exponential",
    )
    sub = p.add_subparsers(dest="cmd", required=True)

    def common(sp):
        sp.add_argument("--json-report", default=None)

    for name in ("prove", "refute"):
        sp = sub.add_parser(name, help=f"{name} a sequent")
        sp.add_argument("sequent")
        sp.add_argument("--fragment", choices=("auto", "ne", "m"), default="auto")
        sp.add_argument("--depth", type=int, default=14)
        sp.add_argument("--star-bound", type=int, default=4)
        sp.add_argument("--emit-proof", default=None)
        sp.add_argument("--seed", type=int, default=0)
        common(sp)
        sp.set_defaults(func=cmd_prove, refute=(name == "refute"))

    sp = sub.add_parser("check", help="check a derivation file")
    sp.add_argument("derivation")
    sp.add_argument("--allow-cut", action="store_true")
    sp.add_argument("--omega-bound", type=int, default=None)
    sp.add_argument("--hyps", default=None)
    sp.add_argument("--srs", default=None)
    common(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("embed", help="compile hypotheses into a !-sequent")
    sp.add_argument("sequent")
    sp.add_argument("--hyps", required=True)
    sp.add_argument("--decide", action="store_true")
    sp.add_argument("--depth", type=int, default=14)
    common(sp)
    sp.set_defaults(func=cmd_embed)

    sp = sub.add_parser("measure", help="star-nesting measure of a sequent")
    sp.add_argument("sequent")
    common(sp)
    sp.set_defaults(func=cmd_measure)

    sp = sub.add_parser("ordinal", help="ordinal vector toolkit")
    sp.add_argument("op", choices=("encode", "decode", "compare", "lift", "base-step"))
    sp.add_argument("args", nargs="*")
    common(sp)
    sp.set_defaults(func=cmd_ordinal)

    sp = sub.add_parser("tm-compile", help="compile a machine to rewriting rules")
    sp.add_argument("machine")
    sp.add_argument("--left", default="l")
    sp.add_argument("--right", default="r")
    sp.add_argument("--end", default="e")
    sp.add_argument("--out", default=None)
    common(sp)
    sp.set_defaults(func=cmd_tm_compile)

    sp = sub.add_parser("srs-run", help="bounded reachability in a rewriting system")
    sp.add_argument("--srs", required=True)
    sp.add_argument("--start", required=True)
    sp.add_argument("--suffix", default=None)
    sp.add_argument("--steps", type=int, default=100)
    sp.add_argument("--breadth", type=int, default=100000)
    common(sp)
    sp.set_defaults(func=cmd_srs_run)

    sp = sub.add_parser("gen-lower-bound", help="energy formulas and main sequent")
    sp.add_argument("--x", type=int, required=True)
    sp.add_argument("--ks", default="")
    sp.add_argument("--m0", default=None)
    sp.add_argument("--m1", default=None)
    sp.add_argument("--hyps-out", default=None)
    sp.add_argument("--srs-out", default=None)
    common(sp)
    sp.set_defaults(func=cmd_gen_lower_bound)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else DATA_ERROR
    except ParseError as exc:
        return _data_error(str(exc))


if __name__ == "__main__":
    sys.exit(main())
