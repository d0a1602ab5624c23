"""Wave-operator defect against time for the psi_N kernel in its unitary
window, for both the momentum (mu) and the position (d) dynamics.

    python scripts/defect_ladder.py --n 0 --rho-kappa 1.5 --times 5,10,20,40,80 --out ladder.csv

``--rho-kappa`` is in units of pi.  Columns: dynamics, direction, t, defect.
"""

import argparse
import csv
import math
import sys

from relcm.hypgamma import ScaleParams
from relcm.scattering import ScatteringState, d_cm, defect_ladder, mu_cm
from relcm.suites import D_STATE, MU_STATE
from relcm.transforms import make_kernel_psiN


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=0)
    ap.add_argument("--rho-kappa", type=float, default=1.5, help="in units of pi; must be >= N+1")
    ap.add_argument("--times", default="5,10,20,40,80", help="positive times; both signs are run")
    ap.add_argument("--out", default="defect_ladder.csv")
    args = ap.parse_args()
    rk = args.rho_kappa * math.pi
    times = [float(t) for t in args.times.split(",")]
    rows = []
    # rho = 1 for the mu dynamics, kappa = 1/2 for the d dynamics, as in the verify suite
    for name, params, state in (
        ("mu_CM", ScaleParams.from_rho_kappa(1.0, rk), ScatteringState(momentum=MU_STATE)),
        ("d_CM", ScaleParams.from_rho_kappa(rk / 0.5, 0.5), ScatteringState(position=D_STATE)),
    ):
        kern = make_kernel_psiN(params, args.n)
        dyn = mu_cm(params.rho_value) if name == "mu_CM" else d_cm(params.kappa)
        for direction, sign in (("in", -1.0), ("out", 1.0)):
            for row in defect_ladder(kern, dyn, state, [sign * t for t in times]):
                rows.append({"dynamics": name, "direction": direction, **row})
                print(f"{name:5s} {direction:3s} t={row['t']:+7.1f}  defect={row['defect']:.3e}", flush=True)
    with open(args.out, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=["dynamics", "direction", "t", "defect"], lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    return 0


if __name__ == "__main__":
    sys.exit(main())
