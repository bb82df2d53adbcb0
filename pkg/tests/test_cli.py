from __future__ import annotations

import json
import subprocess
import sys

import pytest

from ookb.cli import run_cli


def run(capsys, *argv):
    code = run_cli(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_subsume_true(capsys, cell_path):
    code, out, _ = run(capsys, "subsume", "cell", "cell", "-k", str(cell_path))
    assert code == 0
    assert out.strip() == "true"


def test_subsume_false_exit_code(capsys, cell_path):
    code, out, _ = run(capsys, "subsume", "cell", "eukaryotic_cell", "-k", str(cell_path))
    assert code == 1
    assert out.strip() == "false"


def test_solve_parents_inconsistent(capsys, parents_path):
    code, out, _ = run(capsys, "solve", "-k", str(parents_path))
    assert code == 1
    assert "inconsistent" in out
    assert "exact-high" in out and "count 3" in out


def test_solve_parents_json_report(capsys, parents_path):
    code, out, _ = run(capsys, "solve", "--format", "json", "-k", str(parents_path))
    assert code == 1
    payload = json.loads(out)
    assert payload["consistent"] is False
    kinds = [v["kind"] for v in payload["violations"]]
    assert "exact-high" in kinds
    high = [v for v in payload["violations"] if v["kind"] == "exact-high"][0]
    assert high["count"] == 3 and high["depth_sensitive"] is False


def test_solve_parents_eq_consistent(capsys, parents_eq_path):
    code, out, _ = run(capsys, "solve", "-k", str(parents_eq_path))
    assert code == 0
    assert "consistent" in out.splitlines()[0]


def test_solve_with_assert(capsys, cell_path):
    code, out, _ = run(
        capsys, "solve", "-k", str(cell_path),
        "--assert", "individual(i)", "--assert", "instance_of(i, eukaryotic_cell)",
    )
    assert code == 0
    assert "value(has_part, i, f1_cell(i))." in out


def test_solve_dump_ground(capsys, cell_path, tmp_path):
    dump = tmp_path / "ground.lp"
    code, _out, _ = run(
        capsys, "solve", "-k", str(cell_path), "--dump-ground", str(dump),
        "--assert", "instance_of(i, cell)",
    )
    assert code == 0
    text = dump.read_text()
    assert "value(has_part, i, f1_cell(i)) :- instance_of(i, cell)." in text


def test_path_command(capsys, cell_path):
    code, out, _ = run(
        capsys, "path", "eukaryotic_cell", "nucleus", "--rel", "has_part",
        "-k", str(cell_path),
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 1
    assert lines[0].startswith("eukaryotic_cell -has_part-> nucleus")


def test_path_none_found_exit_one(capsys, cell_path):
    code, out, _ = run(
        capsys, "path", "nucleus", "cell", "--rel", "has_part", "-k", str(cell_path)
    )
    assert code == 1
    assert out == ""


def test_describe_text_and_msc(capsys, cell_path):
    code, out, _ = run(capsys, "describe", "eukaryotic_cell", "-k", str(cell_path))
    assert code == 0
    assert "member_of(cell)." in out
    code, msc_out, _ = run(
        capsys, "describe", "eukaryotic_cell", "--msc", "-k", str(cell_path)
    )
    assert code == 0
    assert "member_of(cell)." not in msc_out
    assert "member_of(eukaryotic_cell)." in msc_out


def test_describe_json(capsys, cell_path):
    code, out, _ = run(
        capsys, "describe", "eukaryotic_cell", "--format", "json", "-k", str(cell_path)
    )
    assert code == 0
    payload = json.loads(out)
    assert set(payload) == {"member_of", "values"}
    assert "cell" in payload["member_of"]


def test_compare_text(capsys, cell_path):
    code, out, _ = run(capsys, "compare", "eukaryotic_cell", "cell", "-k", str(cell_path))
    assert code == 0
    assert "dist_class(cell, eukaryotic_cell)." in out


def test_stats_text(capsys, cell_path):
    code, out, _ = run(capsys, "stats", "-k", str(cell_path))
    assert code == 0
    assert "classes: 5" in out
    assert "descriptive rules: 8" in out
    assert "avg skolem functions per descriptive rule: 1.25" in out


def test_load_ok(capsys, cell_path):
    code, out, _ = run(capsys, "load", "-k", str(cell_path))
    assert code == 0
    assert out.startswith("ok: 5 classes")


def test_load_error_exit_three(capsys, tmp_path):
    bad = tmp_path / "bad.ookb"
    bad.write_text("subclass_of(a, b).\n")
    code, _out, err = run(capsys, "load", "-k", str(bad))
    assert code == 3
    assert "undeclared-symbol" in err


def test_load_error_json_diagnostics(capsys, tmp_path):
    bad = tmp_path / "bad.ookb"
    bad.write_text("subclass_of(a, b).\n")
    code, _out, err = run(capsys, "load", "--format", "json", "-k", str(bad))
    assert code == 3
    for line in err.strip().splitlines():
        obj = json.loads(line)
        assert obj["error"] == "load"
        assert obj["kind"] == "undeclared-symbol"
        assert obj["file"] == str(bad)


def test_missing_kb_is_usage_error(capsys):
    code, _out, err = run(capsys, "stats")
    assert code == 2
    assert "usage" in err


def test_unknown_command_usage(capsys):
    assert run_cli(["frobnicate"]) == 2


def test_universe_cap_resource_exit(capsys, tmp_path):
    kb = tmp_path / "cyclic.ookb"
    kb.write_text(
        "class(a).\ninstance_of(f(X), a) :- instance_of(X, a).\n"
    )
    code, _out, err = run(
        capsys, "solve", "-k", str(kb), "--assert", "instance_of(i, a)",
        "--depth", "50", "--universe-cap", "10",
    )
    assert code == 4
    assert "cap" in err


def test_gen_deterministic(capsys):
    args = ["gen", "--classes", "5", "--relations", "2", "--skolems", "2",
            "--eq-density", "0.4", "--seed", "9"]
    code1, out1, _ = run(capsys, *args)
    code2, out2, _ = run(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2
    assert "class(c1)." in out1


def test_gen_pipes_into_load(capsys, tmp_path):
    out_file = tmp_path / "gen.ookb"
    code, _out, _ = run(capsys, "gen", "--seed", "3", "-o", str(out_file))
    assert code == 0
    code, out, _ = run(capsys, "load", "-k", str(out_file))
    assert code == 0
    assert out.startswith("ok:")


def test_console_script_entry_point(cell_path):
    proc = subprocess.run(
        [sys.executable, "-m", "ookb.cli", "subsume", "eukaryotic_cell", "cell",
         "-k", str(cell_path)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip() == "true"
