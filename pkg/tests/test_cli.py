import io
import subprocess
import sys
from pathlib import Path

from qhseidel.cli import main

GOLDEN = Path(__file__).parent / "golden"
DATA = Path(__file__).parent / "data"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_product():
    code, out, _ = run("product", "cp1xcp1:2", "a<0,0>", "a<0,0>")
    assert code == 0
    assert out == "[M]<0,1>\n"


def test_product_lines_format():
    code, out, _ = run("--format", "lines", "product", "cp1xcp1:2", "a<0,0>", "b<0,0>")
    assert (code, out) == (0, "result=pt<0,0>\n")


def test_invert():
    code, out, _ = run("invert", "f2-as-s2xs2:2", "a<0,0> + b<0,0>", "--cutoff", "3")
    assert code == 0
    assert out.startswith("a<0,-1> + a<1,-2>")
    assert out.rstrip().endswith("@E=3")


def test_invert_outcomes():
    code, out, _ = run("invert", "cp1", "0", "--cutoff", "3")
    assert code == 0 and "not-invertible" in out
    code, out, _ = run("invert", "f2-as-s2xs2:2", "a<0,0> + b<0,0> @E=1/2", "--cutoff", "3")
    assert code == 1 and "undetermined" in out
    code, _, err = run("invert", "cp1", "[M]<0> + pt<0>", "--cutoff", "3")
    assert code == 2 and "homogeneous" in err


def test_order_bound():
    code, out, _ = run("order-bound", "cp1", "rotation", "--max", "5", "--cutoff", "6")
    assert code == 0
    assert "k: 2" in out
    assert "consistent with order 2" in out
    code, out, _ = run("--format", "lines", "order-bound", "f2-as-s2xs2:2", "circle-action",
                       "--max", "20", "--cutoff", "25")
    assert code == 0
    assert out.splitlines()[:2] == ["result=none-up-to", "k=20"]


def test_order_bound_identity_loop():
    code, out, _ = run("--format", "lines", "order-bound", "cp1xcp1:2", "id:1,-1", "--max", "3", "--cutoff", "4")
    assert code == 0
    assert "k=1" in out and "gamma=<1,-1>" in out


def test_power_and_tau():
    code, out, _ = run("power", "f2-as-s2xs2:2", "circle-action", "2", "--cutoff", "5")
    assert code == 0
    assert "q: [M]<0,1> + [M]<1,0> @E=5" in out
    assert "maslov: 2" in out
    code, out, _ = run("tau", "f2-as-s2xs2:2", "x-")
    assert out == "[M]<1,-1>\n"


def test_info_and_check():
    code, out, _ = run("info")
    assert code == 0 and "cp1xcp1" in out
    code, out, _ = run("info", "cp1")
    assert "minimal_chern: 2" in out and "rotation" in out
    code, out, _ = run("check", "cp2", "--samples", "20")
    assert code == 0 and "associativity: pass" in out


def test_check_spec_file():
    code, out, _ = run("check", str(DATA / "t2xs2-classical-c0.yaml"), "--samples", "10")
    assert code == 0


def test_invalid_spec_file_exits_1(tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text((GOLDEN / "cp1.yaml").read_text().replace('omega: ["1"]', 'omega: ["0"]'))
    code, _, err = run("info", str(bad))
    assert code == 1 and "positiv" in err


def test_usage_errors_exit_2():
    assert run("product", "cp9", "a<0>", "a<0>")[0] == 2
    assert run("product", "cp1", "pt", "pt<0>")[0] == 2
    assert run("invert", "cp1", "pt<0>")[0] == 2
    assert run("power", "cp1", "spin", "2", "--cutoff", "3")[0] == 2
    assert run("frobnicate")[0] == 2


def test_export_matches_golden():
    code, out, _ = run("export", "cp1xcp1")
    assert code == 0
    assert out == (GOLDEN / "cp1xcp1.yaml").read_text()


def test_verify_identity_loop():
    code, out, _ = run("verify", "identity-loop")
    assert code == 0
    assert out.rstrip().endswith("status: ok")


def test_verify_is_deterministic():
    first = run("--seed", "7", "verify", "truncation")
    second = run("--seed", "7", "verify", "truncation")
    assert first == second
    assert first[0] == 0


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "qhseidel.cli", "product", "cp1", "pt<0>", "pt<0>"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout == "[M]<1>\n"
