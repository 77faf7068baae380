#!/usr/bin/env python3
"""Solve a fixed-format MPS file written by rfcmpc with scipy's HiGHS MILP.

Usage: scipy_milp.py MODEL.mps SOLUTION.txt [--time-limit SECONDS]

Writes `status <word>` followed by one `x<id> <value>` line per column.
SOS2 sections are ignored: the rfcmpc models encode adjacency with binaries.
"""

import argparse
import sys

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import coo_matrix


def read_mps(path):
    rows, senses, rhs = [], {}, {}
    cols, col_index = [], {}
    entries, cost, integer = [], {}, set()
    lower, upper = {}, {}
    section, in_int = None, False
    with open(path) as fh:
        for line in fh:
            if not line.strip() or line.startswith("*"):
                continue
            if not line[0].isspace():
                section = line.split()[0]
                continue
            f = line.split()
            if section == "ROWS":
                if f[0] != "N":
                    senses[f[1]] = f[0]
                    rhs[f[1]] = 0.0
                    rows.append(f[1])
            elif section == "COLUMNS":
                if len(f) >= 3 and f[1] == "'MARKER'":
                    in_int = f[2] == "'INTORG'"
                    continue
                name = f[0]
                if name not in col_index:
                    col_index[name] = len(cols)
                    cols.append(name)
                    if in_int:
                        integer.add(name)
                for r, v in zip(f[1::2], f[2::2]):
                    if r == "OBJ":
                        cost[name] = float(v)
                    else:
                        entries.append((r, name, float(v)))
            elif section == "RHS":
                for r, v in zip(f[1::2], f[2::2]):
                    rhs[r] = float(v)
            elif section == "BOUNDS":
                kind, name = f[0], f[2]
                val = float(f[3]) if len(f) > 3 else None
                if kind == "BV":
                    lower[name], upper[name] = 0.0, 1.0
                    integer.add(name)
                elif kind == "FR":
                    lower[name], upper[name] = -np.inf, np.inf
                elif kind == "MI":
                    lower[name] = -np.inf
                elif kind == "FX":
                    lower[name] = upper[name] = val
                elif kind == "LO":
                    lower[name] = val
                elif kind == "UP":
                    upper[name] = val
    return rows, senses, rhs, cols, entries, cost, integer, lower, upper


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("mps")
    ap.add_argument("solution")
    ap.add_argument("--time-limit", type=float, default=None)
    args = ap.parse_args()

    rows, senses, rhs, cols, entries, cost, integer, lower, upper = read_mps(args.mps)
    row_index = {r: i for i, r in enumerate(rows)}
    col_index = {c: j for j, c in enumerate(cols)}
    n = len(cols)
    c = np.array([cost.get(name, 0.0) for name in cols])
    lb = np.array([lower.get(name, 0.0) for name in cols])
    ub = np.array([upper.get(name, np.inf) for name in cols])
    integrality = np.array([1 if name in integer else 0 for name in cols])

    constraints = []
    if rows:
        a = coo_matrix(
            ([v for _, _, v in entries],
             ([row_index[r] for r, _, _ in entries], [col_index[k] for _, k, _ in entries])),
            shape=(len(rows), n)).tocsr()
        b = np.array([rhs[r] for r in rows])
        lo = np.where([senses[r] in ("G", "E") for r in rows], b, -np.inf)
        hi = np.where([senses[r] in ("L", "E") for r in rows], b, np.inf)
        constraints.append(LinearConstraint(a, lo, hi))

    options = {"mip_rel_gap": 0.0}
    if args.time_limit is not None:
        options["time_limit"] = args.time_limit
    res = milp(c, constraints=constraints, integrality=integrality, bounds=Bounds(lb, ub), options=options)

    status = {0: "optimal", 1: "limit", 2: "infeasible", 3: "unbounded"}.get(res.status, "error")
    with open(args.solution, "w") as out:
        out.write(f"status {status}\n")
        if res.x is not None:
            for name, v in zip(cols, res.x):
                out.write(f"{name} {float(v)!r}\n")
    return 0 if res.x is not None or status in ("infeasible", "unbounded") else 1


if __name__ == "__main__":
    sys.exit(main())
