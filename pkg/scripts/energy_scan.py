"""Bound-state energy E_N across its a_minus window, for several N.

    python scripts/energy_scan.py --max-n 3 --points 40 --out energies.csv

Columns: N, a_plus, a_minus, energy.  Every sampled energy lies in (0, 2);
the script exits with status 1 if one does not.
"""

import argparse
import csv
import sys

import numpy as np

from relcm.hypgamma import ScaleParams
from relcm.special_n import SpecialNEvaluator


def energy_rows(max_n: int, points: int, a_plus: float = 1.0) -> list[dict]:
    rows = []
    for n in range(max_n + 1):
        lo, hi = (n + 0.5) * a_plus, (n + 1) * a_plus
        # open window: cell midpoints
        for am in lo + (np.arange(points) + 0.5) * (hi - lo) / points:
            ev = SpecialNEvaluator(ScaleParams(a_plus, float(am)), n)
            rows.append({"N": n, "a_plus": a_plus, "a_minus": float(am), "energy": ev.energy()})
    return rows


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-n", type=int, default=3)
    ap.add_argument("--points", type=int, default=40)
    ap.add_argument("--out", default="energy_scan.csv")
    args = ap.parse_args()
    rows = energy_rows(args.max_n, args.points)
    with open(args.out, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=["N", "a_plus", "a_minus", "energy"], lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    energies = np.array([r["energy"] for r in rows])
    inside = bool(np.all((energies > 0) & (energies < 2)))
    print(f"{len(rows)} rows -> {args.out}; E range [{energies.min():.6g}, {energies.max():.6g}];"
          f" all in (0, 2): {inside}")
    return 0 if inside else 1


if __name__ == "__main__":
    sys.exit(main())
