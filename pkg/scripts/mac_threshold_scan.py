"""Tabulate the MAC thresholds against the size of the smaller group.

Columns: alpha, the closed-form gamma_under, the exact fully mixed
window edge, gamma_bar, and the largest gamma (on a 1e-3 grid) at which a
pure-mixed equilibrium still exists.
"""

import argparse
import csv
import sys

import numpy as np

from groupess.game import GroupWeights
from groupess.mac import MacParams, mac_find_gess, mac_thresholds


def pure_mixed_edge(p):
    last = None
    for g in np.arange(0, 1, 1e-3):
        if any(e.kind == "pure-mixed" for e in mac_find_gess(p.with_gamma(float(g)))):
            last = float(g)
    return last


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--delta", type=float, default=0.2)
    ap.add_argument("--step", type=float, default=0.05)
    args = ap.parse_args()
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["alpha", "gamma_under_formula", "gamma_under_numeric", "gamma_bar", "pure_mixed_until"])
    for a in np.arange(args.step, 0.5, args.step):
        p = MacParams(args.delta, 0.0, 1.0, GroupWeights((float(a), float(1 - a))))
        th = mac_thresholds(p)
        edge = pure_mixed_edge(p)
        w.writerow([f"{a:.3f}", f"{th.gamma_under_formula:.4f}", f"{th.gamma_under_numeric:.4f}", f"{th.gamma_bar:.4f}", "" if edge is None else f"{edge:.3f}"])


if __name__ == "__main__":
    main()
