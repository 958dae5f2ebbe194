"""Command-line front end.

Exit codes: 0 success, 1 verification failure / cutoff too small / invalid
spec, 2 usage or parse errors.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .catalog import BUILTINS, CatalogEntry, ParseError, ValidationError, dump_spec, resolve
from .lattice import check_wplus, minimal_chern
from .novikov import format_energy, parse_energy, parse_gamma
from .quantum import axiom_suite, q_plus_closed, validate_spec
from .units import (
    CutoffTooSmall,
    FirstTauPower,
    Inverse,
    LoopElement,
    NotInvertible,
    NotInvertibleError,
    identity_loop,
    invert,
    loop_inverse,
    loop_power,
    order_lower_bound,
    tau,
)
from .verify import DEFAULT_SEED, SUITES, run_suite

Record = List[Tuple[str, str]]


class UsageError(Exception):
    pass


class Failure(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qhseidel", description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for randomized checks")
    p.add_argument("--format", choices=("text", "lines"), default="text",
                   help="'lines' prints one key=value record per line")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("info", help="summarize a spec, or list builtins")
    sp.add_argument("spec", nargs="?")

    sp = sub.add_parser("check", help="validate a spec and run the ring-axiom suite")
    sp.add_argument("spec")
    sp.add_argument("--samples", type=int, default=200)
    sp.add_argument("--cutoff", default="6")

    sp = sub.add_parser("product", help="quantum product of two elements")
    sp.add_argument("spec")
    sp.add_argument("x")
    sp.add_argument("y")

    sp = sub.add_parser("invert", help="inverse of a homogeneous element")
    sp.add_argument("spec")
    sp.add_argument("x")
    sp.add_argument("--cutoff", required=True)

    sp = sub.add_parser("power", help="Seidel element of the m-th power of a loop")
    sp.add_argument("spec")
    sp.add_argument("loop", help="loop name, or id:<gamma> for the constant loop lifted by gamma")
    sp.add_argument("m", type=int)
    sp.add_argument("--cutoff", required=True)

    sp = sub.add_parser("order-bound", help="first power of a loop whose Seidel element lies in tau(Gamma)")
    sp.add_argument("spec")
    sp.add_argument("loop")
    sp.add_argument("--max", type=int, required=True)
    sp.add_argument("--cutoff", required=True)

    sp = sub.add_parser("tau", help="the element [M]<gamma>")
    sp.add_argument("spec")
    sp.add_argument("gamma")

    sp = sub.add_parser("verify", help="run a verification suite")
    sp.add_argument("suite", choices=list(SUITES) + ["all"])

    sp = sub.add_parser("export", help="print a spec in file format")
    sp.add_argument("spec")
    return p


def _energy(text: str) -> Fraction:
    try:
        e = parse_energy(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad cutoff {text!r}") from None
    return e


def _element(entry: CatalogEntry, text: str):
    try:
        return entry.ring.parse(text)
    except ValueError as exc:
        raise UsageError(f"cannot parse element {text!r}: {exc}") from None


def _loop(entry: CatalogEntry, text: str) -> LoopElement:
    if text.startswith("id:"):
        try:
            g = parse_gamma(text[3:], entry.ring.gamma, entry.ring.gamma_names)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        return identity_loop(entry.ring, g)
    try:
        return entry.loop(text)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None


def _load(spec: str) -> CatalogEntry:
    try:
        return resolve(spec)
    except (KeyError, FileNotFoundError) as exc:
        raise UsageError(exc.args[0] if isinstance(exc, KeyError) else str(exc)) from None
    except ParseError as exc:
        raise UsageError(f"parse error: {exc}") from None
    except ValidationError as exc:
        raise Failure(str(exc)) from None
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_info(args) -> Record:
    if not args.spec:
        return [("builtin", name) for name in BUILTINS]
    entry = _load(args.spec)
    ring = entry.ring
    g = ring.gamma
    return [
        ("name", ring.name),
        ("n", str(ring.n)),
        ("gamma_rank", str(g.canonical_rank)),
        ("omega", ",".join(str(w) for w in g.omega_canonical)),
        ("chern", ",".join(str(c) for c in g.chern_canonical)),
        ("minimal_chern", str(minimal_chern(g))),
        ("wplus", check_wplus(g, ring.n).value),
        ("basis", ", ".join(f"{a}:{d}" for a, d in ring.basis.classes)),
        ("q_plus_closed", str(q_plus_closed(ring)).lower()),
        ("loops", ", ".join(
            f"{l.name} (I={l.maslov}, q={l.q.render()})" for _, l in sorted(entry.loops.items())
        ) or "none"),
    ]


def cmd_check(args) -> Record:
    entry = _load(args.spec)
    report = validate_spec(entry.ring)
    rec: Record = [("spec", entry.ring.name), ("validate", "ok" if report.ok else "FAIL")]
    if not report.ok:
        rec += [("violation", str(v)) for v in report.violations]
        raise Failure(rec)
    axioms = axiom_suite(entry.ring, args.samples, _energy(args.cutoff), args.seed)
    rec += [tuple(line.split(": ", 1)) for line in axioms.lines()]
    if not axioms.ok:
        raise Failure(rec)
    return rec


def cmd_product(args) -> Record:
    entry = _load(args.spec)
    x, y = _element(entry, args.x), _element(entry, args.y)
    return [("result", (x * y).render())]


def cmd_invert(args) -> Record:
    entry = _load(args.spec)
    x = _element(entry, args.x)
    try:
        out = invert(entry.ring, x, _energy(args.cutoff))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if isinstance(out, Inverse):
        return [("result", out.element.render())]
    if isinstance(out, NotInvertible):
        return [("result", "not-invertible"), ("level", str(out.level)), ("reason", out.reason)]
    raise Failure([("result", "undetermined"), ("cutoff", format_energy(out.cutoff)),
                   ("reason", out.reason)])


def cmd_power(args) -> Record:
    entry = _load(args.spec)
    loop = _loop(entry, args.loop)
    cutoff = _energy(args.cutoff)
    if args.m == 0:
        raise UsageError("power must be nonzero")
    try:
        if args.m < 0:
            loop = loop_inverse(loop, cutoff)
        out = loop_power(loop, abs(args.m), cutoff)
    except NotInvertibleError as exc:
        raise Failure(str(exc)) from None
    name = _loop(entry, args.loop).name + ("" if args.m == 1 else f"^{args.m}")
    return [("loop", name), ("maslov", str(out.maslov)), ("q", out.q.render())]


def cmd_order_bound(args) -> Record:
    entry = _load(args.spec)
    loop = _loop(entry, args.loop)
    try:
        out = order_lower_bound(loop, args.max, _energy(args.cutoff))
    except CutoffTooSmall as exc:
        raise Failure(f"cutoff too small: {exc}") from None
    if isinstance(out, FirstTauPower):
        gamma = "<" + ",".join(str(c) for c in out.gamma) + ">"
        return [
            ("result", "first-tau-power"),
            ("k", str(out.k)),
            ("gamma", gamma),
            ("summary", f"q^{out.k} = [M]{gamma}; consistent with order {out.k}"),
        ]
    return [
        ("result", "none-up-to"),
        ("k", str(out.k)),
        ("summary", f"no power up to {out.k} lies in tau(Gamma); order > {out.k}"),
    ]


def cmd_tau(args) -> Record:
    entry = _load(args.spec)
    try:
        g = parse_gamma(args.gamma, entry.ring.gamma, entry.ring.gamma_names)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return [("result", tau(entry.ring, g).render())]


def cmd_verify(args) -> Record:
    results = run_suite(args.suite, args.seed)
    rec: Record = []
    for res in results:
        rec += [("check", line) for line in res.lines()]
    failures = [r for r in results if not r.ok]
    rec.append(("status", "FAIL" if failures else "ok"))
    if failures:
        first = failures[0].first_failure()
        rec.append(("first_failure", f"{failures[0].suite}: {first.name} {first.detail}".rstrip()))
        raise Failure(rec)
    return rec


COMMANDS = {
    "info": cmd_info,
    "check": cmd_check,
    "product": cmd_product,
    "invert": cmd_invert,
    "power": cmd_power,
    "order-bound": cmd_order_bound,
    "tau": cmd_tau,
    "verify": cmd_verify,
}


def _emit(rec: Record, fmt: str, stream) -> None:
    if fmt == "lines":
        for k, v in rec:
            stream.write(f"{k}={v}\n")
        return
    if len(rec) == 1 and rec[0][0] == "result":
        stream.write(rec[0][1] + "\n")
        return
    for k, v in rec:
        stream.write((v if k == "check" else f"{k}: {v}") + "\n")


def main(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "export":
            stdout.write(dump_spec(_load(args.spec)))
            return 0
        rec = COMMANDS[args.command](args)
    except UsageError as exc:
        stderr.write(f"error: {exc}\n")
        return 2
    except Failure as exc:
        payload = exc.args[0]
        if isinstance(payload, list):
            _emit(payload, args.format, stdout)
        else:
            stderr.write(f"error: {payload}\n")
        return 1
    _emit(rec, args.format, stdout)
    return 0


if __name__ == "__main__":
    sys.exit(main())
