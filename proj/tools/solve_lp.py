#!/usr/bin/env python3
"""Solve an LP-format model with HiGHS and print the optimal objective.

Output is a single line: "optimal <objective>" or "status <name>".
Exit code 0 on optimal, 1 otherwise, 2 when highspy is missing.
"""

import argparse
import sys


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("model", help="path to a .lp file")
    ap.add_argument("--time-limit", type=float, default=120.0)
    args = ap.parse_args()

    try:
        import highspy
    except ImportError:
        print("highspy not available", file=sys.stderr)
        return 2

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("time_limit", args.time_limit)
    h.setOptionValue("mip_rel_gap", 0.0)
    h.setOptionValue("mip_abs_gap", 1e-7)
    if h.readModel(args.model) != highspy.HighsStatus.kOk:
        print("status read_error")
        return 1
    h.run()
    status = h.getModelStatus()
    if status != highspy.HighsModelStatus.kOptimal:
        print("status " + h.modelStatusToString(status))
        return 1
    print("optimal %.9f" % h.getInfo().objective_function_value)
    return 0


if __name__ == "__main__":
    sys.exit(main())
