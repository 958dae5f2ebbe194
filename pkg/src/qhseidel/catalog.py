"""Built-in rings and loops, and the ring-spec file format.

Spec files are a small YAML subset, written by :func:`dump_spec` in a fixed
layout so that dumping is byte-stable::

    name: "cp1"
    n: 1
    lattice:
      rank: 1
      omega: ["1"]
      chern: [2]
    gammas: {}
    basis:
      - ["[M]", 2]
      - ["pt", 0]
    classical:
      - pair: ["[M]", "[M]"]
        result: ["[M]"]
      ...
    quantum:
      - gamma: [1]
        pair: ["pt", "pt"]
        result: ["[M]"]
    loops:
      - name: "rotation"
        q: "pt<0>"
        maslov: 1

Rationals are written as "p/q" strings, gammas as integer lists in the
canonical coordinates of the group (identical to the generator coordinates
whenever no combination of generators has zero area and zero Chern number),
results as lists of basis class names.  Unknown keys are rejected.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import yaml

from .lattice import Coords, SphereClassLattice, build_gamma
from .quantum import (
    FUNDAMENTAL,
    GWTable,
    HomologyBasis,
    RingSpec,
    ValidationReport,
    parse_element,
    validate_spec,
)
from .units import LoopDegreeError, LoopElement


class ParseError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


class ValidationError(ValueError):
    def __init__(self, message: str, report: Optional[ValidationReport] = None):
        self.report = report
        super().__init__(message)


@dataclass
class CatalogEntry:
    ring: RingSpec
    loops: Dict[str, LoopElement] = field(default_factory=dict)

    def loop(self, name: str) -> LoopElement:
        try:
            return self.loops[name]
        except KeyError:
            raise KeyError(
                f"{self.ring.name} has no loop {name!r}; known: {', '.join(self.loops) or 'none'}"
            ) from None


# ---------------------------------------------------------------------------
# builders


def make_ring(
    name: str,
    n: int,
    omega: Sequence,
    chern: Sequence[int],
    basis: Sequence[Tuple[str, int]],
    classical: Iterable[Tuple[str, str, Sequence[str]]],
    quantum: Iterable[Tuple[Sequence[int], str, str, Sequence[str]]] = (),
    gammas: Optional[Mapping[str, Sequence[int]]] = None,
    raw_gammas: bool = True,
) -> RingSpec:
    """Assemble a RingSpec from named entries.

    Quantum gammas are given on the lattice generators (projected to canonical
    coordinates) unless ``raw_gammas`` is False.  Entries that land on the same
    (gamma, pair) add mod 2.
    """
    group = build_gamma(SphereClassLattice(tuple(Fraction(w) for w in omega), tuple(chern)))
    hb = HomologyBasis(tuple(basis), n)
    idx = {a: i for i, (a, _) in enumerate(hb.classes)}

    def vec(names: Sequence[str]) -> FrozenSet[int]:
        acc: set = set()
        for a in names:
            acc ^= {idx[a]}
        return frozenset(acc)

    cl: Dict[Tuple[int, int], FrozenSet[int]] = {}
    for a, b, out in classical:
        cl[(idx[a], idx[b])] = vec(out)
    qu: Dict[Coords, Dict[Tuple[int, int], FrozenSet[int]]] = {}
    for g, a, b, out in quantum:
        c = group.project(g) if raw_gammas else tuple(g)
        key = (idx[a], idx[b])
        slot = qu.setdefault(c, {})
        slot[key] = frozenset(slot.get(key, frozenset()) ^ vec(out))
    named = {
        k: (group.project(v) if raw_gammas else tuple(v)) for k, v in (gammas or {}).items()
    }
    return RingSpec(name, n, group, hb, GWTable(cl, qu), named)


def _unit_row(classes: Sequence[str]) -> List[Tuple[str, str, List[str]]]:
    return [(FUNDAMENTAL, a, [a]) for a in classes]


def cp1() -> CatalogEntry:
    ring = make_ring(
        "cp1",
        1,
        omega=[1],
        chern=[2],
        basis=[(FUNDAMENTAL, 2), ("pt", 0)],
        classical=_unit_row([FUNDAMENTAL, "pt"]),
        quantum=[((1,), "pt", "pt", [FUNDAMENTAL])],
        gammas={"L": (1,)},
    )
    rot = LoopElement("rotation", ring, ring.monomial("pt"), 1)
    return CatalogEntry(ring, {"rotation": rot})


def cp2() -> CatalogEntry:
    ring = make_ring(
        "cp2",
        2,
        omega=[1],
        chern=[3],
        basis=[(FUNDAMENTAL, 4), ("line", 2), ("pt", 0)],
        classical=_unit_row([FUNDAMENTAL, "line", "pt"]) + [("line", "line", ["pt"])],
        quantum=[
            ((1,), "line", "pt", [FUNDAMENTAL]),
            ((1,), "pt", "pt", ["line"]),
        ],
        gammas={"L": (1,)},
    )
    rot = LoopElement("rotation", ring, ring.monomial("line"), 1)
    return CatalogEntry(ring, {"rotation": rot})


def _s2xs2_ring(name: str, lam: Fraction, gammas: Mapping[str, Sequence[int]]) -> RingSpec:
    a, b, ab = (1, 0), (0, 1), (1, 1)
    return make_ring(
        name,
        2,
        omega=[lam, 1],
        chern=[2, 2],
        basis=[(FUNDAMENTAL, 4), ("a", 2), ("b", 2), ("pt", 0)],
        classical=_unit_row([FUNDAMENTAL, "a", "b", "pt"]) + [("a", "b", ["pt"])],
        quantum=[
            (b, "a", "a", [FUNDAMENTAL]),
            (a, "b", "b", [FUNDAMENTAL]),
            (b, "a", "pt", ["b"]),
            (a, "b", "pt", ["a"]),
            (ab, "pt", "pt", [FUNDAMENTAL]),
        ],
        gammas=gammas,
    )


def cp1xcp1(lam=2) -> CatalogEntry:
    lam = Fraction(lam)
    if lam <= 0:
        raise ValueError("cp1xcp1 needs lambda > 0")
    ring = _s2xs2_ring(f"cp1xcp1:{lam}", lam, {"a": (1, 0), "b": (0, 1)})
    return CatalogEntry(ring, {})


def f2_as_s2xs2(lam=2) -> CatalogEntry:
    lam = Fraction(lam)
    if lam <= 1:
        raise ValueError("f2-as-s2xs2 needs lambda > 1")
    ring = _s2xs2_ring(
        f"f2-as-s2xs2:{lam}",
        lam,
        {"a": (1, 0), "b": (0, 1), "x+": (1, 1), "x-": (1, -1)},
    )
    q = ring.parse("a<0,0> + b<0,0>")
    return CatalogEntry(ring, {"circle-action": LoopElement("circle-action", ring, q, 1)})


BUILTINS = {
    "cp1": cp1,
    "cp2": cp2,
    "cp1xcp1": cp1xcp1,
    "f2-as-s2xs2": f2_as_s2xs2,
}


def builtin(name: str) -> CatalogEntry:
    """Look up ``cp1``, ``cp2``, ``cp1xcp1[:lambda]`` or ``f2-as-s2xs2[:lambda]``."""
    base, _, param = name.partition(":")
    if base not in BUILTINS:
        raise KeyError(f"unknown builtin {name!r}; known: {', '.join(BUILTINS)}")
    factory = BUILTINS[base]
    if param:
        if base in ("cp1", "cp2"):
            raise ValueError(f"{base} takes no parameter")
        entry = factory(Fraction(param))
    else:
        entry = factory()
    report = validate_spec(entry.ring)
    if not report.ok:
        raise ValidationError(f"builtin {name} is invalid:\n{report}", report)
    return entry


def resolve(name_or_path: str) -> CatalogEntry:
    """A builtin name or a path to a spec file."""
    base = name_or_path.partition(":")[0]
    if base in BUILTINS:
        return builtin(name_or_path)
    return load_spec_file(name_or_path)


# ---------------------------------------------------------------------------
# serialization


def _q(s: str) -> str:
    return json.dumps(s, ensure_ascii=False)


def _flow(items: Iterable) -> str:
    return "[" + ", ".join(_q(x) if isinstance(x, str) else str(x) for x in items) + "]"


def dump_spec(entry: CatalogEntry) -> str:
    ring = entry.ring
    names = ring.basis.names
    lat = ring.gamma.source
    lines = [
        f"name: {_q(ring.name)}",
        f"n: {ring.n}",
        "lattice:",
        f"  rank: {lat.rank}",
        f"  omega: {_flow(str(w) for w in lat.omega)}",
        f"  chern: {_flow(lat.chern)}",
    ]
    if ring.gamma_names:
        lines.append("gammas:")
        for k in sorted(ring.gamma_names):
            lines.append(f"  {_q(k)}: {_flow(ring.gamma_names[k])}")
    else:
        lines.append("gammas: {}")
    lines.append("basis:")
    for a, d in ring.basis.classes:
        lines.append(f"  - {_flow([a, d])}")

    def entries(table) -> List[Tuple[int, int, List[str]]]:
        out = []
        for (i, j), outs in sorted(table.items()):
            if outs:
                out.append((i, j, [names[o] for o in sorted(outs)]))
        return out

    cl = entries(ring.table.classical)
    lines.append("classical:" if cl else "classical: []")
    for i, j, res in cl:
        lines.append(f"  - pair: {_flow([names[i], names[j]])}")
        lines.append(f"    result: {_flow(res)}")
    qu = [(g, e) for g in sorted(ring.table.quantum) for e in entries(ring.table.quantum[g])]
    lines.append("quantum:" if qu else "quantum: []")
    for g, (i, j, res) in qu:
        lines.append(f"  - gamma: {_flow(g)}")
        lines.append(f"    pair: {_flow([names[i], names[j]])}")
        lines.append(f"    result: {_flow(res)}")
    lines.append("loops:" if entry.loops else "loops: []")
    for name in sorted(entry.loops):
        loop = entry.loops[name]
        lines.append(f"  - name: {_q(name)}")
        lines.append(f"    q: {_q(loop.q.render())}")
        lines.append(f"    maslov: {loop.maslov}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# loading

_TOP_KEYS = {"name", "n", "lattice", "gammas", "basis", "classical", "quantum", "loops"}
_REQUIRED = {"name", "n", "lattice", "basis", "classical"}


def _line(node) -> int:
    return node.start_mark.line + 1


def _mapping(node, where: str, allowed: set, required: set) -> Dict[str, yaml.Node]:
    if not isinstance(node, yaml.MappingNode):
        raise ParseError(f"{where}: expected a mapping", _line(node))
    out: Dict[str, yaml.Node] = {}
    for k, v in node.value:
        key = k.value
        if key not in allowed:
            raise ParseError(f"{where}: unknown key {key!r}", _line(k))
        if key in out:
            raise ParseError(f"{where}: duplicate key {key!r}", _line(k))
        out[key] = v
    missing = sorted(required - set(out))
    if missing:
        raise ParseError(f"{where}: missing key(s) {', '.join(missing)}", _line(node))
    return out


def _seq(node, where: str) -> List[yaml.Node]:
    if not isinstance(node, yaml.SequenceNode):
        raise ParseError(f"{where}: expected a list", _line(node))
    return list(node.value)


def _scalar(node, where: str) -> str:
    if not isinstance(node, yaml.ScalarNode):
        raise ParseError(f"{where}: expected a scalar", _line(node))
    return node.value


def _int(node, where: str) -> int:
    text = _scalar(node, where)
    try:
        return int(text)
    except ValueError:
        raise ParseError(f"{where}: expected an integer, got {text!r}", _line(node)) from None


def _rational(node, where: str) -> Fraction:
    text = _scalar(node, where)
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"{where}: expected a rational 'p/q', got {text!r}", _line(node)) from None


def _name_list(node, where: str, known: Dict[str, int]) -> List[str]:
    out = []
    for item in _seq(node, where):
        name = _scalar(item, where)
        if name not in known:
            raise ParseError(f"{where}: unknown basis class {name!r}", _line(item))
        out.append(name)
    return out


def loads_spec(text: str) -> CatalogEntry:
    try:
        root = yaml.compose(text)
    except yaml.MarkedYAMLError as exc:
        line = exc.problem_mark.line + 1 if exc.problem_mark else None
        raise ParseError(str(exc.problem or exc), line) from None
    except yaml.YAMLError as exc:
        raise ParseError(str(exc)) from None
    if root is None:
        raise ParseError("empty spec file")
    top = _mapping(root, "spec", _TOP_KEYS, _REQUIRED)
    name = _scalar(top["name"], "name")
    n = _int(top["n"], "n")

    lat = _mapping(top["lattice"], "lattice", {"rank", "omega", "chern"}, {"rank", "omega", "chern"})
    rank = _int(lat["rank"], "lattice.rank")
    omega = [_rational(x, "lattice.omega") for x in _seq(lat["omega"], "lattice.omega")]
    chern = [_int(x, "lattice.chern") for x in _seq(lat["chern"], "lattice.chern")]
    if len(omega) != rank or len(chern) != rank:
        raise ParseError(
            f"lattice: rank {rank} but {len(omega)} omega and {len(chern)} chern values",
            _line(top["lattice"]),
        )

    basis: List[Tuple[str, int]] = []
    for item in _seq(top["basis"], "basis"):
        pair = _seq(item, "basis entry")
        if len(pair) != 2:
            raise ParseError("basis entry must be [name, degree]", _line(item))
        basis.append((_scalar(pair[0], "basis name"), _int(pair[1], "basis degree")))
    known = {a: i for i, (a, _) in enumerate(basis)}

    def pair_of(node, where):
        names = _name_list(node, where, known)
        if len(names) != 2:
            raise ParseError(f"{where}: pair needs two classes", _line(node))
        return names

    classical = []
    for item in _seq(top["classical"], "classical"):
        e = _mapping(item, "classical entry", {"pair", "result"}, {"pair", "result"})
        a, b = pair_of(e["pair"], "classical.pair")
        classical.append((a, b, _name_list(e["result"], "classical.result", known)))

    quantum = []
    quantum_node = top.get("quantum")
    for item in _seq(quantum_node, "quantum") if quantum_node is not None else []:
        e = _mapping(item, "quantum entry", {"gamma", "pair", "result"}, {"gamma", "pair", "result"})
        g = tuple(_int(x, "quantum.gamma") for x in _seq(e["gamma"], "quantum.gamma"))
        a, b = pair_of(e["pair"], "quantum.pair")
        quantum.append((g, a, b, _name_list(e["result"], "quantum.result", known), _line(item)))

    gammas: Dict[str, Tuple[int, ...]] = {}
    if "gammas" in top:
        gnode = top["gammas"]
        if not isinstance(gnode, yaml.MappingNode):
            raise ParseError("gammas: expected a mapping", _line(gnode))
        for k, v in gnode.value:
            gammas[k.value] = tuple(_int(x, "gammas") for x in _seq(v, f"gammas.{k.value}"))

    try:
        ring = make_ring(
            name, n, omega, chern, basis, classical,
            [q[:4] for q in quantum], gammas, raw_gammas=False,
        )
    except ValueError as exc:
        raise ParseError(str(exc), _line(root)) from None
    for g, *_, line in quantum:
        if len(g) != ring.gamma.canonical_rank:
            raise ParseError(
                f"quantum.gamma {list(g)} has {len(g)} coordinates, group rank is "
                f"{ring.gamma.canonical_rank}",
                line,
            )
    report = validate_spec(ring)
    if not report.ok:
        raise ValidationError(f"spec {name} fails validation:\n{report}", report)

    loops: Dict[str, LoopElement] = {}
    loops_node = top.get("loops")
    for item in _seq(loops_node, "loops") if loops_node is not None else []:
        e = _mapping(item, "loop", {"name", "q", "maslov"}, {"name", "q", "maslov"})
        lname = _scalar(e["name"], "loop.name")
        try:
            q = parse_element(ring, _scalar(e["q"], "loop.q"))
        except ValueError as exc:
            raise ParseError(f"loop {lname}: {exc}", _line(e["q"])) from None
        try:
            loops[lname] = LoopElement(lname, ring, q, _int(e["maslov"], "loop.maslov"))
        except LoopDegreeError as exc:
            raise ValidationError(f"line {_line(item)}: {exc}") from None
    return CatalogEntry(ring, loops)


def load_spec_file(path: Union[str, Path, bytes]) -> CatalogEntry:
    """Load from a path, or from raw bytes of a spec document."""
    if isinstance(path, bytes):
        return loads_spec(path.decode("utf-8"))
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"no builtin or spec file named {str(path)!r}")
    return loads_spec(p.read_text(encoding="utf-8"))
