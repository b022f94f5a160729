"""Regularized ledger terms of the sharp pair as epsilon shrinks (CSV on stdout)."""

import argparse
import csv
import sys

from zeromodes.checks import RunConfig, sharp_ledger

KEYS = ("P_eps", "R_eps", "R1_eps", "R2_eps", "S1_eps", "S2_eps", "balance_eps")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grid", type=int, default=65)
    ap.add_argument("--eps", type=float, nargs="+", default=[0.1, 0.03, 0.01, 0.003, 0.001])
    args = ap.parse_args()
    cfg = RunConfig(grid=args.grid)
    w = csv.writer(sys.stdout)
    w.writerow(["eps", *KEYS])
    for eps in args.eps:
        L = sharp_ledger(cfg, args.grid, eps)
        w.writerow([eps, *(f"{getattr(L, k):.6e}" for k in KEYS)])


if __name__ == "__main__":
    main()
