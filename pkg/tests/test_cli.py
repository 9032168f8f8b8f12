from __future__ import annotations

import io
import json
import subprocess
import sys

import pytest

from wheelcalc import cli
from wheelcalc.checks import PropertyResult


def run(*argv: str) -> tuple[int, str, str]:
    out, err = io.StringIO(), io.StringIO()
    code = cli.run_command(list(argv), out=out, err=err)
    return code, out.getvalue().strip(), err.getvalue()


def test_bv_of_a_closed_tensor() -> None:
    assert run("bv", "[x # x*]") == (0, "[e_v] * [e_v]", "")


def test_bracket_modes() -> None:
    assert run("bracket", "[x x x*]", "[x x* x*]")[1] == "[x x x* x*] + 2 * [x x* x x*]"
    assert run("bracket", "[x x*]", "x")[1] == "x"
    assert run("bracket", "--kind", "wheeled", "[x x*]", "[x]")[1] == "[x]"


def test_dbracket_and_cobracket() -> None:
    assert run("dbracket", "x*", "x")[1] == "e_v # e_v"
    assert run("cobracket", "--quiver", "loops:2", "[x y* y x*]")[1] == (
        "-[e_v] # [x x*] - [e_v] # [y y*] + [x x*] # [e_v] + [y y*] # [e_v]"
    )
    assert run("cobracket", "x x*")[1] == "-e_v # [e_v]"
    assert run("cobracket", "x x x*")[1] == "-e_v # [x] - x # [e_v]"
    assert run("cobracket", "--quiver", "loops:2", "x y* y")[1] == "x # [e_v]"


def test_ev_with_point_file(tmp_path) -> None:
    f = tmp_path / "point.json"
    f.write_text(json.dumps({"x": [["1/2", 2], [5, "1/3"]]}))
    assert run("ev", "[x]", "--dim", "v=2", "--point", str(f)) == (0, "5/6", "")


def test_ev_symbolic() -> None:
    code, out, _ = run("ev", "[x x*]", "--dim", "2")
    assert code == 0
    assert out == "x[1,1] x*[1,1] + x[1,2] x*[2,1] + x[2,1] x*[1,2] + x[2,2] x*[2,2]"


def test_symbol_and_apply() -> None:
    assert run("symbol", "weil([x x*])", "0")[1] == "1/2 * [e_v] * [e_v]"
    assert run("symbol", "weil([x x*])", "1")[1] == "[x x*]"
    assert run("apply", "op(x*)", "[x x]")[1] == "2 * x"


def test_connection_commands(tmp_path) -> None:
    f = tmp_path / "conn.json"
    f.write_text(json.dumps([{"arrow": "x", "left": ["dx x*"], "right": []}]))
    assert run("torsion", "--connection", str(f))[1] == "-[x* dx dx]"
    assert run("curvtrace", "--connection", str(f))[1] == "0"
    code, out, _ = run("bv", "[x x*]", "--connection", str(f))
    assert code == 0 and out


def test_quiver_file(tmp_path) -> None:
    f = tmp_path / "q.json"
    f.write_text(json.dumps({"vertices": ["v", "w"], "arrows": [{"name": "a", "tail": "v", "head": "w"}]}))
    assert run("bracket", "--quiver", str(f), "[a a*]", "[a a*]")[1] == "0"


def test_check_passes_and_json_is_deterministic() -> None:
    code, text, _ = run("check", "bialgebra", "--seed", "1", "--max-len", "4")
    assert code == 0 and text.splitlines()[-1].startswith("PASS bialgebra")
    first = run("check", "bialgebra", "--seed", "1", "--format", "json")
    second = run("check", "bialgebra", "--seed", "1", "--format", "json")
    assert first == second
    doc = json.loads(first[1])
    assert doc["passed"] and doc["inputs"]["seed"] == 1
    assert all(p["passed"] for p in doc["properties"])


def test_failed_check_exits_one_with_counterexample(monkeypatch) -> None:
    bad = PropertyResult("fake", "broken", cases=3, failures=1, counterexample={"u": "[x]"})
    monkeypatch.setattr(cli, "run_suite", lambda name, cfg: [bad])
    code, out, _ = run("check", "weil")
    assert code == 1
    assert "FAIL fake.broken" in out and "u = [x]" in out
    code, out, _ = run("check", "weil", "--format", "json")
    assert json.loads(out)["properties"][0]["counterexample"] == {"u": "[x]"}


@pytest.mark.parametrize(
    "argv",
    [
        ("check", "nope"),
        ("frobnicate",),
        ("bracket", "x"),
        ("ev", "[x]"),
        ("bv", "x # ("),
        ("torsion",),
        ("bracket", "--quiver", "loops:two", "x", "y"),
        ("bracket", "--quiver", "/no/such/file.json", "x", "y"),
    ],
)
def test_usage_and_input_errors_exit_two(argv, capsys) -> None:
    assert run(*argv)[0] == 2


def test_parse_error_reports_the_column() -> None:
    code, _, err = run("bv", "x # (")
    assert code == 2 and "column 5" in err


def test_module_entry_point() -> None:
    proc = subprocess.run(
        [sys.executable, "-m", "wheelcalc", "bv", "[x # x*]", "--format", "json"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    doc = json.loads(proc.stdout)
    assert doc["output"] == "[e_v] * [e_v]" and doc["quiver"]["star_parity"] == 1
