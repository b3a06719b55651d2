"""Modular property of the Rubio de Francia majorant as a function of a0.

Prints, per Young function and a0, how many of the five test h's satisfy the
bound and the worst ratio / bound.  Used to size a0 for each phi.

    python3 scripts/rubio_a0_scan.py [--grid 4096] [--weight const]
"""
import argparse

from orlicz_approx import Grid, OrliczContext, PeriodicFunction
from orlicz_approx.verify import (DEFAULT_PHIS, check_rubio_modular, parse_phi, parse_weight,
                                  rubio_test_functions)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--grid", type=int, default=4096)
    ap.add_argument("--weight", default="const")
    ap.add_argument("--a0", default="2,3,4,6")
    args = ap.parse_args()
    grid = Grid(args.grid)
    hs = rubio_test_functions(grid)
    print(f"{'phi':<14}{'a0':>5}{'pass':>7}{'ratio/bound':>14}")
    for p in DEFAULT_PHIS:
        ctx = OrliczContext(parse_phi(p), parse_weight(args.weight, grid))
        for a0 in (float(a) for a in args.a0.split(",")):
            reps = [check_rubio_modular(ctx, PeriodicFunction(grid, v, {"function_id": n}), a0)
                    for n, v in hs.items()]
            worst = max(r.rows[0][2] / r.rows[0][3] for r in reps)
            print(f"{p:<14}{a0:>5g}{sum(r.passed for r in reps):>5}/5{worst:>14.4f}")


if __name__ == "__main__":
    main()
