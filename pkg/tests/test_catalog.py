from fractions import Fraction
from pathlib import Path

import pytest

from qhseidel.catalog import (
    CatalogEntry,
    ParseError,
    ValidationError,
    builtin,
    dump_spec,
    load_spec_file,
    loads_spec,
    resolve,
)
from qhseidel.lattice import minimal_chern
from qhseidel.quantum import axiom_suite, q_plus_closed, validate_spec
from qhseidel.verify import classical_torus_spec

HERE = Path(__file__).parent
GOLDEN = HERE / "golden"
DATA = HERE / "data"


@pytest.mark.parametrize("name", ["cp1", "cp2", "cp1xcp1", "f2-as-s2xs2"])
def test_builtin_matches_golden(name):
    assert dump_spec(builtin(name)) == (GOLDEN / f"{name}.yaml").read_text(encoding="utf-8")


@pytest.mark.parametrize("name", ["cp1", "cp2", "cp1xcp1", "f2-as-s2xs2"])
def test_golden_loads_back(name):
    entry = load_spec_file(GOLDEN / f"{name}.yaml")
    ref = builtin(name)
    assert entry.ring == ref.ring
    assert entry.loops == ref.loops


def test_load_from_bytes():
    data = (GOLDEN / "cp1.yaml").read_bytes()
    assert load_spec_file(data).ring == builtin("cp1").ring


def test_builtin_facts():
    cp1 = builtin("cp1")
    assert minimal_chern(cp1.ring.gamma) == 2
    assert list(cp1.loops) == ["rotation"]
    s2 = builtin("cp1xcp1:2")
    assert validate_spec(s2.ring).ok
    assert not q_plus_closed(s2.ring)
    assert not s2.loops
    assert list(builtin("cp2").loops) == ["rotation"]
    for lam in (Fraction(3, 2), Fraction(2), Fraction(5)):
        g = builtin(f"cp1xcp1:{lam}").ring.gamma
        assert g.omega((1, -1)) == lam - 1


def test_builtins_pass_axioms_and_loop_degrees():
    for name in ("cp1", "cp2", "cp1xcp1:2", "f2-as-s2xs2:2"):
        entry = builtin(name)
        assert axiom_suite(entry.ring, 200, Fraction(6), seed=0).ok
        for loop in entry.loops.values():
            assert loop.degree == 2 * entry.ring.n - 2 * loop.maslov


def test_builtin_errors():
    with pytest.raises(KeyError):
        builtin("cp3")
    with pytest.raises(ValueError):
        builtin("f2-as-s2xs2:1")
    with pytest.raises(ValueError):
        builtin("cp1xcp1:-1")
    with pytest.raises(ValueError):
        builtin("cp1:2")
    assert builtin("cp1xcp1:1/2").ring.gamma.omega((1, 0)) == Fraction(1, 2)


def test_resolve_path_and_builtin():
    assert resolve("cp2").ring.name == "cp2"
    assert resolve(str(DATA / "t2xs2-classical-c0.yaml")).ring == classical_torus_spec(0)
    with pytest.raises(FileNotFoundError):
        resolve("no/such/file.yaml")


def test_classical_data_files():
    for c in (0, 2):
        entry = load_spec_file(DATA / f"t2xs2-classical-c{c}.yaml")
        assert dump_spec(entry) == dump_spec(CatalogEntry(classical_torus_spec(c)))
        assert q_plus_closed(entry.ring)


# fault injection ----------------------------------------------------------

CP1 = (GOLDEN / "cp1.yaml").read_text(encoding="utf-8")


def test_zero_area_quantum_entry_is_rejected():
    text = CP1.replace('omega: ["1"]', 'omega: ["0"]')
    with pytest.raises(ValidationError) as err:
        loads_spec(text)
    assert "positiv" in str(err.value)
    assert not err.value.report.ok


def test_loop_with_wrong_degree_is_rejected():
    text = CP1.replace("maslov: 1", "maslov: 0")
    with pytest.raises(ValidationError) as err:
        loads_spec(text)
    assert "2n - 2I" in str(err.value)


def test_unknown_key_is_rejected_with_line():
    text = CP1.replace("n: 1\n", "n: 1\ncolour: blue\n")
    with pytest.raises(ParseError) as err:
        loads_spec(text)
    assert err.value.line == 3
    assert "colour" in str(err.value)


def test_syntax_error_has_line():
    text = CP1.replace('rank: 1', 'rank: [1')
    with pytest.raises(ParseError) as err:
        loads_spec(text)
    assert err.value.line is not None


def test_bad_field_values():
    with pytest.raises(ParseError, match="rational"):
        loads_spec(CP1.replace('omega: ["1"]', 'omega: ["x"]'))
    with pytest.raises(ParseError, match="unknown basis class"):
        loads_spec(CP1.replace('pair: ["pt", "pt"]', 'pair: ["pt", "dot"]'))
    with pytest.raises(ParseError, match="missing"):
        loads_spec(CP1.replace("n: 1\n", ""))
    with pytest.raises(ParseError, match="coordinates"):
        loads_spec(CP1.replace("gamma: [1]", "gamma: [1, 0]"))
    with pytest.raises(ParseError):
        loads_spec("")


def test_degree_law_violation_is_reported():
    text = CP1.replace('pair: ["pt", "pt"]\n    result: ["[M]"]', 'pair: ["pt", "pt"]\n    result: ["pt"]')
    with pytest.raises(ValidationError) as err:
        loads_spec(text)
    assert any("degree" in str(v) for v in err.value.report.violations)
