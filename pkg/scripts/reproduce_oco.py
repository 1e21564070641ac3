"""Walk through the Sierpinski counterexample with the command line tool.

Writes the JSON inputs to a temporary directory, runs each command and prints
its exit code and output.
"""
import json
import subprocess
import sys
import tempfile
from pathlib import Path

INPUTS = {
    "oco.json": {"space": "SIER", "p": {"eta": 0, "x": 2}},
    "S.json": {"space": "SIER", "p": {"eta": 0, "x": 1}},
    "jk.json": {"space": "SIER", "field": "F2", "terms": {"0": {"stalks": {"eta": 1, "x": 0}}}},
}

STEPS = [
    ["check-datum", "--datum", "oco.json"],
    ["check-datum", "--datum", "S.json"],
    ["convolve", "--datum", "S.json", "--datum2", "S.json"],
    ["residuate", "--datum", "oco.json", "--datum2", "S.json"],
    ["truncate", "--datum", "oco.json", "--complex", "jk.json"],
    ["phi-cohomology", "--datum", "oco.json", "--complex", "jk.json", "--n", "-1"],
]


def main() -> int:
    with tempfile.TemporaryDirectory() as d:
        for name, obj in INPUTS.items():
            Path(d, name).write_text(json.dumps(obj))
        for step in STEPS:
            proc = subprocess.run([sys.executable, "-m", "tstruct", *step], cwd=d, capture_output=True, text=True)
            print(f"$ tstruct {' '.join(step)}   [exit {proc.returncode}]")
            print(proc.stdout.strip() or proc.stderr.strip())
            print()
    return 0


if __name__ == "__main__":
    sys.exit(main())
