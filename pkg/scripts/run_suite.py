"""Run a verification suite and write reports.json / reports.csv / summary.txt.

    python3 scripts/run_suite.py [config.json|default|selftest] [out_dir] [--grid N]
"""
import argparse
import sys
import time

from orlicz_approx.cli import resolve_config
from orlicz_approx.verify import all_passed, load_config, reports_text, run_suite, write_reports


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("config", nargs="?", default="default")
    ap.add_argument("out", nargs="?", default="reports")
    ap.add_argument("--grid", type=int, default=None)
    args = ap.parse_args()
    cfg = load_config(resolve_config(args.config), args.grid)
    t0 = time.perf_counter()
    reports = run_suite(cfg)
    for p in write_reports(reports, args.out):
        print("wrote", p)
    # per-check tallies
    tally = {}
    for r in reports:
        t = tally.setdefault(r.inequality_id, [0, 0])
        t[0] += r.passed
        t[1] += 1
    for k, (a, b) in tally.items():
        print(f"{k:<20} {a:>4}/{b}")
    print(reports_text(reports).splitlines()[-1], f"({time.perf_counter() - t0:.0f} s)")
    return 0 if all_passed(reports) else 1


if __name__ == "__main__":
    sys.exit(main())
