"""Exit codes, output shape, and determinism of the command line."""

import json
import subprocess
import sys
from fractions import Fraction

from degen.bundle import Bundle, Params, dumps
from degen.cli import main

from fixtures import simplex_surface


def run_cli(*argv):
    return subprocess.run(
        [sys.executable, "-m", "degen", *argv],
        capture_output=True,
        text=True,
    )


def write_example(tmp_path, name, *params):
    out = tmp_path / f"{name}.json"
    assert main(["example", name, *params, "-o", str(out)]) == 0
    return out


def test_exit_zero_on_pass(tmp_path, capsys):
    f = write_example(tmp_path, "zeta-fqt", "q=3")
    assert main(["validate", str(f)]) == 0
    assert main(["dim-theorem", str(f)]) == 0
    assert main(["check", "A2", str(f)]) == 0
    assert main(["check", "B2FF", str(f)]) == 0
    assert main(["check", "CFF", str(f)]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out
    assert "PASS" in out


def test_exit_two_when_data_missing(tmp_path, capsys):
    f = write_example(tmp_path, "ngon", "n=4", "q=3")
    assert main(["check", "CFF", str(f)]) == 2
    assert main(["check", "B1FF", str(f)]) == 2
    out = capsys.readouterr().out
    assert "INCONCLUSIVE" in out


def test_exit_one_on_sign_corruption(tmp_path, capsys):
    b = Bundle(params=Params(3, 1, 2), fibres={"v0": simplex_surface()})
    data = json.loads(dumps(b))
    block = data["fibres"]["v0"]["pushforward"][0]["matrix"]
    block["entries"] = [str(-Fraction(e)) for e in block["entries"]]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    assert main(["validate", str(bad)]) == 1
    out = capsys.readouterr().out
    assert "FAIL" in out


def test_exit_three_on_input_errors(tmp_path, capsys):
    missing = tmp_path / "nope.json"
    assert main(["validate", str(missing)]) == 3
    junk = tmp_path / "junk.json"
    junk.write_text("{ nope")
    assert main(["validate", str(junk)]) == 3
    assert main(["example", "no-such-example"]) == 3
    assert main(["example", "ngon", "n=big"]) == 3
    assert main(["example", "ngon", "sides=4"]) == 3
    assert main(["check", "D9", str(junk)]) == 3
    capsys.readouterr()


def test_tsv_is_four_tab_separated_fields(tmp_path, capsys):
    f = write_example(tmp_path, "zeta-fqt", "q=2")
    capsys.readouterr()
    assert main(["--tsv", "check", "CFF", str(f)]) == 0
    out = capsys.readouterr().out
    rows = [line.split("\t") for line in out.splitlines()]
    assert rows and all(len(r) == 4 for r in rows)
    assert ["CFF.orders", "-", "PASS", "kernel=1 cokernel=1"] in rows


def test_quasi_iso_sweep_and_single_star(tmp_path, capsys):
    f = write_example(tmp_path, "ngon", "n=3", "q=2")
    capsys.readouterr()
    assert main(["quasi-iso", str(f)]) == 0
    sweep = capsys.readouterr().out
    assert sweep.count("quasi-iso") == 4  # stars 0..dim+2 for a curve
    assert main(["quasi-iso", str(f), "--star", "1"]) == 0
    single = capsys.readouterr().out
    assert single.count("quasi-iso") == 1


def test_complex_command_reports_focus_degree(tmp_path, capsys):
    f = write_example(tmp_path, "ngon", "n=5", "q=2")
    capsys.readouterr()
    assert main(["complex", str(f), "--q", "1", "--star", "1"]) == 0
    out = capsys.readouterr().out
    assert "dims[1:5,2:5]" in out
    assert "h^1=1" in out


def test_strict_flag(tmp_path, capsys):
    f = write_example(tmp_path, "smooth-ec")
    data = json.loads(f.read_text())
    data["note"] = "hand-edited"
    f.write_text(json.dumps(data))
    assert main(["validate", str(f)]) == 3
    assert main(["--no-strict", "validate", str(f)]) == 0
    capsys.readouterr()


def test_dim_theorem_override_flags(tmp_path, capsys):
    f = write_example(tmp_path, "ngon")
    capsys.readouterr()
    assert main(["dim-theorem", str(f), "--q", "4", "--a", "1"]) in (0, 1)
    out = capsys.readouterr().out
    assert "dim=0" in out


def test_reports_are_byte_identical_across_runs(tmp_path):
    f1 = write_example(tmp_path, "zeta-fqt", "q=5")
    f2 = tmp_path / "again.json"
    assert main(["example", "zeta-fqt", "q=5", "-o", str(f2)]) == 0
    assert f1.read_bytes() == f2.read_bytes()

    first = run_cli("check", "CFF", str(f1))
    second = run_cli("check", "CFF", str(f1))
    assert first.returncode == second.returncode == 0
    assert first.stdout == second.stdout
    tsv1 = run_cli("--tsv", "quasi-iso", str(f1))
    tsv2 = run_cli("--tsv", "quasi-iso", str(f1))
    assert tsv1.stdout == tsv2.stdout


def test_entry_point_runs_as_module(tmp_path):
    out = tmp_path / "z.json"
    built = run_cli("example", "zeta-fqt", "q=2", "-o", str(out))
    assert built.returncode == 0
    checked = run_cli("check", "CFF", str(out))
    assert checked.returncode == 0
    assert "-1*log(q)^-1" in checked.stdout


def test_example_default_output_name(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "degen", "example", "ngon"],
        capture_output=True,
        text=True,
        cwd=tmp_path,
    )
    assert proc.returncode == 0
    assert (tmp_path / "ngon.json").exists()


def test_usage_error_exits_three():
    proc = run_cli("no-such-command")
    assert proc.returncode == 3
    proc = run_cli()
    assert proc.returncode == 3
