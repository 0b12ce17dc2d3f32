#!/usr/bin/env python3
"""Regenerate the expected-report snapshots under snapshots/.

Each bundled fixture gets one deterministic JSON report; the test suite
diffs fresh runs against these files byte for byte.
"""

import os
import subprocess
import sys

HERE = os.path.dirname(os.path.abspath(__file__))
ROOT = os.path.dirname(HERE)
OUT = os.path.join(ROOT, "snapshots")

JOBS = {
    "kx2_p2": ["periodicity", "--fixture", "kx2_p2"],
    "kx2_p3": ["periodicity", "--fixture", "kx2_p3"],
    "a2_te_p2": ["periodicity", "--fixture", "a2_te_p2"],
    "a2_te_p3": ["periodicity", "--fixture", "a2_te_p3"],
    "brauer_line_3_p2": ["twist", "--fixture", "brauer_line_3_p2",
                         "--J", "1,2"],
    "brauer_line_3_p3": ["twist", "--fixture", "brauer_line_3_p3",
                         "--J", "1,2"],
    "kq8_p2": ["algebra-check", "--fixture", "kq8_p2"],
}


def main() -> int:
    os.makedirs(OUT, exist_ok=True)
    for name, args in JOBS.items():
        dest = os.path.join(OUT, f"{name}.json")
        cmd = [sys.executable, "-m", "pertwist.cli", *args,
               "--format", "json", "--out", dest]
        print("->", " ".join(cmd))
        res = subprocess.run(cmd, cwd=ROOT)
        if res.returncode != 0:
            print(f"FAILED ({res.returncode}): {name}", file=sys.stderr)
            return res.returncode
    return 0


if __name__ == "__main__":
    sys.exit(main())
