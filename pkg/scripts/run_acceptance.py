#!/usr/bin/env python3
"""Run the acceptance suite from the command line.

Equivalent to ``phylonet selftest``; use ``--only 1,2,9`` to restrict.
"""

import argparse
import sys

from phylonet.acceptance import run_all


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--only", default=None,
                    help="comma-separated criterion numbers")
    ns = ap.parse_args()
    numbers = None
    if ns.only:
        numbers = {int(x) for x in ns.only.split(",")}
    ok = True
    for r in run_all(numbers):
        status = "PASS" if r.passed else "FAIL"
        print("criterion %2d %s %s (%s) [%.1fs]"
              % (r.number, status, r.title, r.detail, r.seconds),
              flush=True)
        ok = ok and r.passed
    sys.exit(0 if ok else 1)


if __name__ == "__main__":
    main()
