"""Rewrite tests/golden/*.txt from the current CLI output.

Only run this after checking that the new output is right; the golden
files are what the test suite compares against byte for byte.
"""

import io
import os
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))

from cli_cases import CASES, render_run  # noqa: E402
from mstt.cli import run  # noqa: E402


def main():
    os.chdir(ROOT)
    golden = ROOT / "tests" / "golden"
    golden.mkdir(exist_ok=True)
    for name, argv in CASES.items():
        out, err = io.StringIO(), io.StringIO()
        code = run(argv, out, err)
        (golden / f"{name}.txt").write_text(render_run(code, out.getvalue(), err.getvalue()), encoding="utf-8")
        print(f"{name}: exit {code}")


if __name__ == "__main__":
    main()
