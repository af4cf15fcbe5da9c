#!/usr/bin/env python3
"""Regenerate the beam-width scaling bundles and fit reports.

Runs the pinned recipes behind `beamnet reproduce` for all four targets and
leaves CSVs plus plot scripts under out/scaling/.  Expect roughly ten minutes
at the default sample count.
"""

import sys

from beamnet.cli import main

OUT = "out/scaling"

if __name__ == "__main__":
    samples = sys.argv[1] if len(sys.argv) > 1 else "1000000"
    for figure in ("fig4", "fig5", "fig6", "tableC"):
        print(f"=== reproduce {figure} ===", flush=True)
        code = main([
            "reproduce", figure, "--samples", samples,
            "--out", f"{OUT}/{figure}", "--emit-plot", "--threads", "2",
        ])
        if code != 0:
            sys.exit(code)
    print(f"done; see {OUT}/")
