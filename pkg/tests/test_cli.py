"""Byte-exact CLI output over the corpus (see scripts/regen_golden.py)."""

import io
import subprocess
import sys

import pytest

from cli_cases import CASES, render_run
from conftest import GOLDEN, ROOT
from mstt.cli import run


def invoke(argv, monkeypatch):
    monkeypatch.chdir(ROOT)
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, out, err)
    return render_run(code, out.getvalue(), err.getvalue())


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name, monkeypatch):
    expected = (GOLDEN / f"{name}.txt").read_text(encoding="utf-8")
    assert invoke(CASES[name], monkeypatch) == expected


def test_check_is_byte_stable(monkeypatch):
    argv = CASES["check-streams"]
    assert invoke(argv, monkeypatch) == invoke(argv, monkeypatch)


def test_usage_errors_exit_1(monkeypatch):
    assert invoke(["frobnicate", "x.mstt"], monkeypatch).startswith("exit: 1")
    assert invoke(["check", "corpus/guarded/g-map.mstt", "-m", "q"], monkeypatch).startswith("exit: 1")


def test_bad_stage(monkeypatch):
    text = invoke(["eval", "corpus/guarded/g-nats.mstt", "--stage", "soon"], monkeypatch)
    assert text.startswith("exit: 1") and "not a natural number" in text


def test_parse_error_location(tmp_path, monkeypatch):
    bad = tmp_path / "bad.mstt"
    bad.write_text("def x = lam[y : Nat\n")
    out, err = io.StringIO(), io.StringIO()
    assert run(["check", str(bad)], out, err) == 1
    assert err.getvalue().startswith(f"{bad}:")


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "mstt.cli", "extract", "corpus/guarded/streams.mstt", "--name", "nats", "--take", "3"],
        cwd=ROOT,
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and proc.stdout == "0 1 2\n"
