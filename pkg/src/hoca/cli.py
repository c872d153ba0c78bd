"""Command line entry point ``hoca``.

Every subcommand builds a :class:`Report` (text lines plus a JSON payload)
and returns an exit code: 0 success, 1 usage error, 2 budget exceeded,
3 invariant violation or failed check, 4 malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

from . import serialize as ser
from .complexes import InvariantViolation, cone, cylinder, homology
from .model import (
    BudgetExceeded,
    DescentData,
    derived_hom,
    factorize,
    generating_trivial_cofibrations,
    verify_descent,
)
from .monoidal import derived_tensor, monoid_axiom_probe, tensor

EXIT_OK, EXIT_USAGE, EXIT_BUDGET, EXIT_INVARIANT, EXIT_PARSE = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


@dataclass
class Report:
    lines: list = field(default_factory=list)
    data: dict = field(default_factory=dict)
    code: int = EXIT_OK


def _module_json(M) -> dict:
    return {"text": str(M), "invariants": [int(k) for k in M.invariants()]}


def _complex_report(C, kind="complex") -> Report:
    return Report(str(C).splitlines(), ser.dump(C, kind))


def _window(a, b, default):
    if a is None:
        return default
    if a > b:
        raise UsageError(f"empty range {a}..{b}")
    return range(a, b + 1)


# --------------------------------------------------------------------------
# complexes

def cmd_homology(args) -> Report:
    _, C = ser.read(args.input, "complex")
    degs = [args.deg] if args.deg is not None else C.degrees()
    hs = {n: homology(C, n) for n in degs}
    if args.deg is not None:
        lines = [str(hs[args.deg])]
    else:
        lines = [f"H^{n} = {M}" for n, M in hs.items()] or ["0"]
    return Report(lines, {"homology": {str(n): _module_json(M) for n, M in hs.items()}})


def cmd_cone(args) -> Report:
    _, f = ser.read(args.input, "chain_map")
    return _complex_report(cone(f)[0])


def cmd_cylinder(args) -> Report:
    _, C = ser.read(args.input, "complex")
    return _complex_report(cylinder(C)[0])


def cmd_tensor(args) -> Report:
    _, X = ser.read(args.left, "complex")
    _, Y = ser.read(args.right, "complex")
    return _complex_report(tensor(X, Y))


def cmd_derived_tensor(args) -> Report:
    _, X = ser.read(args.left, "complex")
    _, Y = ser.read(args.right, "complex")
    T, _ = derived_tensor(X, Y)
    rep = _complex_report(T)
    hs = {n: homology(T, n) for n in T.degrees()}
    rep.lines += [f"H^{n} = {M}" for n, M in hs.items()]
    return rep


def cmd_derived_hom(args) -> Report:
    _, X = ser.read(args.left, "complex")
    _, Y = ser.read(args.right, "complex")
    M = derived_hom(X, Y, args.shift)
    return Report([str(M)], {"shift": args.shift, "hom": _module_json(M)})


# --------------------------------------------------------------------------
# model structure

def cmd_factorize(args) -> Report:
    _, f = ser.read(args.input, "chain_map")
    i, cert, p = factorize(f, DescentData.modules(f.source.ring), max_cells=args.max_cells)
    verified = cert.verify()
    qiso = p.is_quasi_isomorphism()
    lines = [f"cells attached: {cert.cell_count()}",
             f"certificate verified: {'yes' if verified else 'no'}",
             f"p is a quasi-isomorphism: {'yes' if qiso else 'no'}",
             "middle complex:"] + ["  " + s for s in str(i.target).splitlines()]
    data = {"cells": cert.cell_count(), "verified": verified, "quasi_isomorphism": qiso,
            "cells_log": [{"degree": a.degree, "module": str(a.module)} for a in cert.attachments],
            "i": ser.dump(i, "chain_map"), "p": ser.dump(p, "chain_map")}
    return Report(lines, data, EXIT_OK if verified and qiso else EXIT_INVARIANT)


def cmd_verify_descent(args) -> Report:
    _, dd = ser.read(args.input, "descent")
    probes = [ser.read(p, "complex")[1] for p in args.probe]
    rep = verify_descent(dd, probes)
    data = {"ok": rep.ok, "items": [{"name": n, "ok": ok, "reason": why} for n, ok, why in rep.items]}
    return Report(rep.lines(), data, EXIT_OK if rep.ok else EXIT_INVARIANT)


def cmd_localize(args) -> Report:
    from .localization import t_cell_tower
    _, C = ser.read(args.input, "complex")
    _, ts = ser.read(args.tset, "tset")
    window = _window(*(args.range or (None, None)), None)
    tower = t_cell_tower(C, ts, steps=args.steps, shift_range=window)
    stages = [{"stage": k, "homology": {str(n): _module_json(homology(S, n)) for n in S.degrees()}}
              for k, S in enumerate(tower.stages)]
    for k in range(1, len(stages)):
        stages[k]["nonzero_from_previous"] = tower.surviving_degrees(k)
    data = {"stages": stages,
            "attached": [{"stage": a.stage, "t": a.t_index, "shift": a.shift} for a in tower.log],
            "residual": [{"t": t, "shift": n, "module": str(M)} for t, n, M in tower.residual]}
    return Report(tower.report(), data)


def cmd_probe_monoid_axiom(args) -> Report:
    _, C = ser.read(args.input, "complex")
    degs = C.degrees() or [0]
    window = _window(*(args.range or (None, None)), range(min(degs) - 1, max(degs) + 2))
    J = generating_trivial_cofibrations(DescentData.modules(C.ring), window)
    if not 0 <= args.j_index < len(J):
        raise UsageError(f"--j-index must lie in 0..{len(J) - 1}")
    j = J[args.j_index]
    ok = monoid_axiom_probe(C, j)
    lines = [f"j = J[{args.j_index}] of {len(J)} over degrees {window.start}..{window.stop - 1}",
             f"C ⊗ j injective quasi-isomorphism: {'yes' if ok else 'no'}"]
    return Report(lines, {"j_index": args.j_index, "count": len(J), "ok": ok},
                  EXIT_OK if ok else EXIT_INVARIANT)


# --------------------------------------------------------------------------
# spectra

def cmd_spectrum(args) -> Report:
    from .spectra import suspension_map, validate_spectrum, weak_omega_report
    _, E = ser.read(args.input, "spectrum")
    rep = validate_spectrum(E)
    if args.action == "validate":
        data = {"ok": rep.ok, "coxeter": [list(map(int, x)) if isinstance(x, tuple) else x
                                          for x in rep.coxeter],
                "equivariance": [[m, n, side, j] for m, n, side, j in rep.equivariance]}
        return Report(rep.lines(), data, EXIT_OK if rep.ok else EXIT_INVARIANT)
    if not rep.ok:
        raise InvariantViolation("input is not a spectrum: " + "; ".join(rep.lines()))
    if args.action == "suspend":
        maps = suspension_map(E)
        flags = [f.is_quasi_isomorphism() for f in maps]
        lines = [f"level {l}: sigma is {'a' if q else 'not a'} quasi-isomorphism"
                 for l, q in enumerate(flags)]
        data = {"levels": [{"level": l, "quasi_isomorphism": q, "map": ser.dump(f, "chain_map")}
                           for l, (q, f) in enumerate(zip(flags, maps))]}
        return Report(lines, data)
    omega = weak_omega_report(E)
    window = _window(*(args.range or (None, None)), range(E.N))
    bad = [n for n in window if n not in omega.levels]
    if bad:
        raise UsageError(f"levels {bad} are outside the truncation 0..{E.N - 1}")
    levels = {n: omega.levels[n] for n in window}
    ok = all(levels.values())
    lines = [l for n, l in zip(sorted(omega.levels), omega.lines()) if n in levels]
    lines.append(f"weak omega-spectrum on levels {window.start}..{window.stop - 1}: {'yes' if ok else 'no'}")
    return Report(lines, {"ok": ok, "levels": {str(n): v for n, v in levels.items()}},
                  EXIT_OK if ok else EXIT_INVARIANT)


# --------------------------------------------------------------------------
# presentations

def _acomplex_lines(X) -> list[str]:
    lines = []
    for n in X.degrees():
        vals = ", ".join(f"M({r})={V}" for r, V in zip(X.cat.ranks, X.module(n).values))
        lines.append(f"degree {n}: {vals}")
    return lines or ["0"]


def cmd_present(args) -> Report:
    from .presentation import AddCategory, adjunction_report, extend, restrict
    if args.action == "restrict":
        _, F = ser.read(args.inputs[0], "complex")
        X = restrict(F, AddCategory(F.ring))
        return Report(_acomplex_lines(X), ser.dump(X, "acomplex"))
    if args.action == "extend":
        _, M = ser.read(args.inputs[0], "acomplex")
        return _complex_report(extend(M).complex)
    if len(args.inputs) != 2:
        raise UsageError("check-adjunction needs X.json and F.json")
    _, X = ser.read(args.inputs[0], "acomplex")
    _, F = ser.read(args.inputs[1], "complex")
    if F.ring != X.cat.ring:
        raise UsageError("X and F live over different rings")
    rep = adjunction_report(X, F)
    yn = lambda b: "yes" if b else "no"
    lines = [f"triangle identity (extension side): {yn(rep.triangle_left)}",
             f"triangle identity (restriction side): {yn(rep.triangle_right)}"]
    if rep.counts is not None:
        lines.append(f"|Hom(extend X, F)| = {rep.counts[0]}, |Hom(X, restrict F)| = {rep.counts[1]}")
    if rep.bijective is not None:
        lines.append(f"adjunction map bijective: {yn(rep.bijective)}")
    lines += rep.notes
    lines.append(f"adjunction check: {'pass' if rep.ok else 'FAIL'}")
    data = {"ok": rep.ok, "triangle_left": rep.triangle_left, "triangle_right": rep.triangle_right,
            "counts": list(rep.counts) if rep.counts else None, "bijective": rep.bijective,
            "notes": rep.notes}
    return Report(lines, data, EXIT_OK if rep.ok else EXIT_INVARIANT)


# --------------------------------------------------------------------------
# self test

def cmd_selftest(args) -> Report:
    from .acceptance import CRITERIA, run_criterion
    wanted = args.only or [k for k, _, _ in CRITERIA]
    results = [run_criterion(k, args.seed) for k in wanted]
    ok = all(r.ok for r in results)
    lines = [r.line() for r in results]
    lines.append(f"{sum(r.ok for r in results)}/{len(results)} criteria passed")
    data = {"ok": ok, "criteria": [{"number": r.number, "name": r.name, "ok": r.ok,
                                    "detail": r.detail} for r in results]}
    return Report(lines, data, EXIT_OK if ok else EXIT_INVARIANT)


# --------------------------------------------------------------------------
# argument parsing

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _range_arg(p):
    p.add_argument("--range", nargs=2, type=int, metavar=("A", "B"),
                   help="inclusive window of degrees or levels")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default=argparse.SUPPRESS)
    top = _Parser(prog="hoca", description="Homotopical algebra on chain complexes of modules.")
    top.add_argument("--format", choices=("text", "json"), default="text")
    sub = top.add_subparsers(dest="command", parser_class=_Parser, required=True)
    _add = sub.add_parser

    def add_parser(name, **kw):
        return _add(name, parents=[common], **kw)
    sub.add_parser = add_parser

    p = sub.add_parser("homology", help="homology modules of a complex")
    p.add_argument("input")
    p.add_argument("--deg", type=int)
    p.set_defaults(func=cmd_homology)

    p = sub.add_parser("cone", help="mapping cone of a chain map")
    p.add_argument("input")
    p.set_defaults(func=cmd_cone)

    p = sub.add_parser("cylinder", help="cylinder of a complex")
    p.add_argument("input")
    p.set_defaults(func=cmd_cylinder)

    for name, func, text in (("tensor", cmd_tensor, "tensor product of two complexes"),
                             ("derived-tensor", cmd_derived_tensor, "derived tensor product")):
        p = sub.add_parser(name, help=text)
        p.add_argument("left")
        p.add_argument("right")
        p.set_defaults(func=func)

    p = sub.add_parser("derived-hom", help="Hom in the derived category")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--shift", type=int, default=0)
    p.set_defaults(func=cmd_derived_hom)

    p = sub.add_parser("factorize", help="cofibration / trivial fibration factorization")
    p.add_argument("input")
    p.add_argument("--max-cells", type=int, default=64)
    p.set_defaults(func=cmd_factorize)

    p = sub.add_parser("verify-descent", help="check generators, acyclics and their certificates")
    p.add_argument("input")
    p.add_argument("--probe", action="append", default=[], metavar="C.json")
    p.set_defaults(func=cmd_verify_descent)

    p = sub.add_parser("localize", help="cell tower killing maps out of a set of complexes")
    p.add_argument("input")
    p.add_argument("--tset", required=True)
    p.add_argument("--steps", type=int, default=1)
    _range_arg(p)
    p.set_defaults(func=cmd_localize)

    p = sub.add_parser("probe-monoid-axiom", help="test C ⊗ j for a generating trivial cofibration j")
    p.add_argument("input")
    p.add_argument("--j-index", type=int, required=True)
    _range_arg(p)
    p.set_defaults(func=cmd_probe_monoid_axiom)

    p = sub.add_parser("spectrum", help="validate, suspend or test symmetric spectra")
    p.add_argument("action", choices=("validate", "suspend", "weak-omega"))
    p.add_argument("input")
    _range_arg(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("present", help="restrict, extend and adjunction checks over small free modules")
    p.add_argument("action", choices=("restrict", "extend", "check-adjunction"))
    p.add_argument("inputs", nargs="+")
    p.set_defaults(func=cmd_present)

    p = sub.add_parser("selftest", help="run the acceptance suite")
    p.add_argument("--seed", type=int)
    p.add_argument("--only", type=int, action="append", choices=range(1, 11), metavar="K")
    p.set_defaults(func=cmd_selftest)
    return top


def _check_flags(args):
    if getattr(args, "max_cells", 0) < 0:
        raise UsageError("--max-cells must be non-negative")
    if getattr(args, "steps", 0) < 0:
        raise UsageError("--steps must be non-negative")
    if args.command == "present" and args.action != "check-adjunction" and len(args.inputs) != 1:
        raise UsageError(f"present {args.action} takes one input")
    if args.command == "spectrum" and args.range and args.action != "weak-omega":
        raise UsageError("--range only applies to weak-omega")


def _emit(rep: Report, fmt: str, out):
    if fmt == "json":
        out.write(json.dumps(rep.data, indent=1, sort_keys=True, ensure_ascii=False) + "\n")
    else:
        for line in rep.lines:
            out.write(line + "\n")


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        _check_flags(args)
    except UsageError as e:
        err.write(f"usage error: {e}\n")
        return EXIT_USAGE
    except SystemExit as e:          # --help
        return EXIT_OK if not e.code else EXIT_USAGE
    try:
        rep = args.func(args)
    except UsageError as e:
        err.write(f"usage error: {e}\n")
        return EXIT_USAGE
    except ser.ParseError as e:
        err.write(f"malformed input: {e}\n")
        return EXIT_PARSE
    except BudgetExceeded as e:
        err.write(f"budget exceeded: {e}\n")
        return EXIT_BUDGET
    except InvariantViolation as e:
        err.write(f"invariant violation: {e}\n")
        return EXIT_INVARIANT
    except ValueError as e:
        err.write(f"invariant violation: {e}\n")
        return EXIT_INVARIANT
    _emit(rep, args.format, out)
    return rep.code


if __name__ == "__main__":
    sys.exit(main())
