import json
import os
import shutil
import subprocess
import sys

import pytest

from rrcrn import Execution, Step
from rrcrn.cli import main
from rrcrn.core import Direction
from rrcrn.devfile import parse_device
from rrcrn.transform import replay

from .conftest import GOLDEN


def golden(name):
    return os.path.join(GOLDEN, name)


def read(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read()


@pytest.mark.parametrize("argv,name", [
    (["mod", "--weights", "1", "--residue", "0", "--modulus", "2"], "parity.crd"),
    (["mod", "--weights", "2,3", "--residue", "1", "--modulus", "4"], "mod_2_3.crd"),
    (["threshold", "--weights", "1,-1", "--threshold", "0"], "threshold_diff.crd"),
    (["threshold", "--weights", "2", "--threshold", "3"], "threshold_2x.crd"),
    (["affine", "--coefficients", "1/2", "--offsets", "1", "--constant", "2"], "affine_half.crc"),
    (["semilinear", "--piece", "affine(1/2;0;0) when mod(1;0;2)",
      "--piece", "affine(1/2;1;0) when mod(1;1;2)"], "floor_half.crc"),
])
def test_compile_matches_golden(tmp_path, argv, name):
    out = tmp_path / name
    assert main(["compile", *argv, "-o", str(out)]) == 0
    assert out.read_text(encoding="utf-8") == read(golden(name))


def test_compile_or_matches_golden(tmp_path):
    out = tmp_path / "o.crd"
    assert main(["compile", "or", golden("parity.crd"), golden("at_least_2.crd"), "-o", str(out)]) == 0
    assert out.read_text(encoding="utf-8") == read(golden("parity_or_2.crd"))


def test_compile_not_and_predicate(tmp_path, capsys):
    assert main(["compile", "not", golden("parity.crd")]) == 0
    text = capsys.readouterr().out
    assert "@yes Y1" in text and "@oracle bool not(mod(1;0;2))" in text
    assert main(["compile", "predicate", "and(mod(1;0;2),threshold(1;2))"]) == 0
    assert "@yes V_YY" in capsys.readouterr().out


def test_compile_parallel_reports_splits(capsys):
    assert main(["compile", "parallel", golden("parity.crd"), golden("parity.crd")]) == 0
    cap = capsys.readouterr()
    assert "split reactions: 0" in cap.err
    assert "@rxn X1 -> X1#1 + X1#2" in cap.out


def test_verify_parity(capsys):
    assert main(["verify", golden("parity.crd"), "--model", "reverse-robust",
                 "--input", "X1=4", "--cap-extra", "16"]) == 0
    assert "VERIFIED-UP-TO-CAP" in capsys.readouterr().out


def test_verify_trap(tmp_path, capsys):
    report = tmp_path / "r.json"
    status = main(["verify", golden("trap.crc"), "--model", "reverse-robust", "--input", "X=2",
                   "--report", str(report)])
    assert status == 1
    assert "trap {} reached by 0F 1R 2F" in capsys.readouterr().out
    doc = json.loads(report.read_text())
    assert doc["outcome"] == "REFUTED"
    assert doc["results"][0]["trap"]["config"] == {}
    assert main(["verify", golden("trap.crc"), "--model", "stable", "--input", "X=2"]) == 0
    assert "output 1" in capsys.readouterr().out


def test_inconclusive_exit_status(tmp_path, capsys):
    # X -> 2X never settles its output within any cap
    dev = tmp_path / "pump.crc"
    dev.write_text("@type crc\n@inputs X\n@output Y\n@rxn X -> X + Y\n")
    assert main(["verify", str(dev), "--input", "X=1", "--expect", "1", "--cap-extra", "3"]) == 2
    assert "INCONCLUSIVE" in capsys.readouterr().out


def test_grid_skips_empty_input(tmp_path, capsys):
    report = tmp_path / "g.json"
    assert main(["verify", golden("parity.crd"), "--grid", "3", "--report", str(report)]) == 0
    out = capsys.readouterr().out
    assert "SKIPPED input X1=0" in out
    assert "VERIFIED-UP-TO-CAP over 3 input(s), 1 skipped" in out
    doc = json.loads(report.read_text())
    assert [r["input"]["X1"] for r in doc["results"]] == [1, 2, 3]


def test_expect_overrides_oracle(capsys):
    assert main(["verify", golden("parity.crd"), "--input", "X1=3", "--expect", "yes",
                 "--model", "stable"]) == 1
    capsys.readouterr()


@pytest.mark.parametrize("argv", [
    [],
    ["verify"],
    ["verify", "missing.crd", "--input", "X1=1"],
    ["verify", os.path.join(GOLDEN, "parity.crd"), "--input", "Q=1"],
    ["verify", os.path.join(GOLDEN, "parity.crd"), "--input", "X1=-1"],
    ["verify", os.path.join(GOLDEN, "parity.crd"), "--grid", "2", "--input", "X1=1"],
    ["compile", "mod", "--weights", "1", "--residue", "0", "--modulus", "1"],
    ["compile", "semilinear", "--piece", "affine(1;0;0) when mod(1;0;2)"],
    ["compile", "and", os.path.join(GOLDEN, "parity.crd"), os.path.join(GOLDEN, "trap.crc")],
])
def test_usage_errors(argv, capsys):
    assert main(argv) == 3
    capsys.readouterr()


def test_no_oracle_needs_expect(tmp_path, capsys):
    dev = tmp_path / "t.crc"
    dev.write_text("@type crc\n@inputs X\n@output Y\n@rxn 2 X -> Y\n")
    assert main(["verify", str(dev), "--input", "X=2"]) == 3
    assert main(["verify", str(dev), "--input", "X=2", "--expect", "1"]) == 0
    capsys.readouterr()


def test_invariants_commands(tmp_path, capsys):
    assert main(["invariants", "check", golden("floor_half.crc")]) == 0
    out = capsys.readouterr().out
    assert "ok I_0" in out and "ok I_M#1" in out
    assert main(["invariants", "find", golden("trap.crc")]) == 0
    assert "no linear invariants" in capsys.readouterr().out
    bad = tmp_path / "bad.crd"
    bad.write_text(read(golden("parity.crd")).replace("@rxn X1 -> Y1", "@rxn X1 -> Y0"))
    assert main(["invariants", "check", str(bad)]) == 1
    assert "VIOLATED I_M: reaction 0 residual" in capsys.readouterr().out


def test_trace_replay(tmp_path, capsys):
    tr = tmp_path / "t.trace"
    tr.write_text("@start X:2\n0F 1R 2F\n")
    assert main(["trace", "replay", golden("trap.crc"), str(tr), "--expect-end", ""]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[-1] == "3: 2F -> {}"
    assert main(["trace", "replay", golden("trap.crc"), str(tr), "--expect-end", "Y:1"]) == 1
    tr.write_text("@start X:1\n0F\n")
    assert main(["trace", "replay", golden("trap.crc"), str(tr)]) == 1
    capsys.readouterr()


def test_trace_normalize(tmp_path, capsys):
    src = tmp_path / "p.crn"
    assert main(["compile", "parallel", golden("parity.crd"), golden("parity.crd"), "-o", str(src)]) == 0
    tr = tmp_path / "t.trace"
    # split, un-split, split again: the reverse split cancels
    tr.write_text("@start X1:1\n0F 0R 0F 1F\n")
    out = tmp_path / "n.trace"
    assert main(["trace", "normalize", str(src), str(tr), "-o", str(out)]) == 0
    assert out.read_text() == "@start X1:1\n0F 1F\n"
    capsys.readouterr()


def test_report_replays_to_trap(tmp_path, capsys):
    report = tmp_path / "r.json"
    main(["verify", golden("trap.crc"), "--input", "X=4", "--report", str(report)])
    capsys.readouterr()
    dev = parse_device(read(golden("trap.crc")))
    for res in json.loads(report.read_text())["results"]:
        trap = res["trap"]
        steps = tuple(Step(int(t[:-1]), Direction(t[-1])) for t in trap["steps"].split())
        end = replay(dev.crn, Execution(dev.crn.config(trap["start"]), steps))[-1]
        assert end == dev.crn.config(trap["config"])


def test_module_entry_point(tmp_path):
    shutil.copy(golden("parity.crd"), tmp_path)
    r = subprocess.run([sys.executable, "-m", "rrcrn", "verify", "parity.crd", "--input", "X1=2"],
                       cwd=tmp_path, capture_output=True, text=True)
    assert r.returncode == 0 and "VERIFIED-UP-TO-CAP" in r.stdout
