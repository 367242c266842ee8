"""Two-line-charge potential against the point-dipole form as the separation shrinks.

    python scripts/dipole_limit.py [--points 1,0.5;2,-1] [--out limit.csv]

The moment p = 2 eps lambda is held fixed, so the relative deviation should
fall as eps^2.
"""

import argparse
import csv
import sys

import numpy as np

from dipolephase.core import ElectricDipoleLine
from dipolephase.fields import potential_dipole_line_approx, potential_dipole_line_exact
from dipolephase.oracle import fit_convergence_order


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", default="1,0.5;2,-1;0.3,3")
    ap.add_argument("--moment", type=float, default=1.0)
    ap.add_argument("--out")
    args = ap.parse_args()

    points = [tuple(float(v) for v in p.split(",")) for p in args.points.split(";")]
    epsilons = np.logspace(-1, -5, 9)
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(out, lineterminator="\n")
    w.writerow(("x", "y", "epsilon", "exact", "point_dipole", "rel_dev"))
    for x, y in points:
        samples = []
        for eps in epsilons:
            line = ElectricDipoleLine(args.moment / (2 * eps), eps)
            exact = float(potential_dipole_line_exact(line, x, y))
            approx = potential_dipole_line_approx(args.moment, x, y)
            dev = abs(exact / approx - 1)
            samples.append((eps, dev))
            w.writerow((x, y, eps, repr(exact), repr(approx), repr(dev)))
        usable = [(e, d) for e, d in samples if d > 1e-13]
        print(f"# ({x:g}, {y:g}): fitted order {fit_convergence_order(usable):.3f}", file=sys.stderr)
    if args.out:
        out.close()


if __name__ == "__main__":
    main()
