"""Plot-ready CSV of E_n (near-best), Omega_k(f, 1/n) and R_2k(f, 1/n) for one function.

    python3 scripts/curves.py --fn abs-sin-pow:1.5 --phi power:3 --weight power:0.4 --k 1 > curves.csv
"""
import argparse
import csv
import sys

import numpy as np

from orlicz_approx import Grid, OrliczContext
from orlicz_approx.approximation import near_best_errors, realization_curve
from orlicz_approx.operators import modulus_curve
from orlicz_approx.verify import make_function, parse_phi, parse_weight


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--fn", default="abs-sin-pow:1.5")
    ap.add_argument("--phi", default="power:2")
    ap.add_argument("--weight", default="const")
    ap.add_argument("--k", type=float, default=1.0)
    ap.add_argument("--grid", type=int, default=4096)
    ap.add_argument("--n-max", type=int, default=128)
    args = ap.parse_args()
    grid = Grid(args.grid)
    ctx = OrliczContext(parse_phi(args.phi), parse_weight(args.weight, grid))
    f = make_function(args.fn, grid).f
    ns = np.arange(1, args.n_max + 1)
    E = near_best_errors(ctx, f, ns)
    om = modulus_curve(ctx, f, args.k, 1.0 / ns)[0]
    nr = ns[ns <= grid.jmax // 4]
    R = np.full(len(ns), np.nan)
    R[: len(nr)] = realization_curve(ctx, f, args.k, nr)
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["n", "E_n", "omega", "R", "E_n/omega"])
    for row in zip(ns, E, om, R, E / om):
        out.writerow([int(row[0])] + [repr(float(v)) for v in row[1:]])


if __name__ == "__main__":
    main()
