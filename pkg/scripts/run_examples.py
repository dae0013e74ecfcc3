"""Run every example job through the CLI and compare exit codes with jobs/expected.json."""

import json
import subprocess
import sys
from pathlib import Path

JOBS = Path(__file__).resolve().parent.parent / "jobs"


def main() -> int:
    expected = json.loads((JOBS / "expected.json").read_text())
    bad = 0
    for name, want in sorted(expected.items()):
        proc = subprocess.run([sys.executable, "-m", "birmaps", "--job", str(JOBS / name)], capture_output=True, text=True)
        verdict = json.loads(proc.stdout)["verdict"] if proc.stdout else "?"
        ok = proc.returncode == want
        bad += not ok
        print(f"{'ok ' if ok else 'BAD'} {name:34} exit {proc.returncode} ({verdict}), expected {want}")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
