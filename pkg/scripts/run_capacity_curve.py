#!/usr/bin/env python3
"""Throughput versus network size for the slotted-ALOHA torus simulator.

Sweeps n with p_t = 1/2 and r at the connectivity floor sqrt(log n / n), then
prints the log-log slope of total throughput (an n/log n trend lands a bit
below 1).  Writes out/capacity_curve.csv.
"""

import csv
import math
import sys
from pathlib import Path

import numpy as np

from beamnet import netsim
from beamnet.patterns import omni, parse_pattern_spec

N_LIST = (250, 500, 1000, 2000, 4000)

if __name__ == "__main__":
    pattern = parse_pattern_spec(sys.argv[1]) if len(sys.argv) > 1 else omni()
    slots = int(sys.argv[2]) if len(sys.argv) > 2 else 600
    base = netsim.NetworkConfig(
        n=N_LIST[0], r=0.1, p_t=0.5, alpha=4.0, sir0=10.0,
        tx_pattern=pattern, rx_pattern=omni(),
        model="pairwise", fading="none", slots=slots, seed=17,
    )
    points = netsim.capacity_curve(base, N_LIST, threads=2)
    out = Path("out/capacity_curve.csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="") as f:
        f.write(f"# capacity curve | tx={pattern.label} slots={slots} seed=17\n")
        w = csv.writer(f)
        w.writerow(["n", "p_t", "r", "eta_tt", "eta_tt_stderr", "eta_tr", "eta_tr_stderr"])
        for p in points:
            w.writerow([p.n, p.p_t, f"{p.r:.6g}", f"{p.eta_tt:.6g}", f"{p.eta_tt_stderr:.3g}",
                        f"{p.eta_tr:.6g}", f"{p.eta_tr_stderr:.3g}"])
            print(f"n={p.n:5d}  eta_tt={p.eta_tt:9.3f} +- {p.eta_tt_stderr:.3f}  "
                  f"eta_tr={p.eta_tr:.4f}")
    slope = np.polyfit(np.log10([p.n for p in points]),
                       np.log10([p.eta_tt for p in points]), 1)[0]
    print(f"log-log slope of eta_tt vs n: {slope:.3f}")
    print(f"wrote {out}")
