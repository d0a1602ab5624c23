"""Measured and predicted Gram-defect ranks across rho*kappa for the psi_N
kernel, written as a long-format CSV (one row per rho*kappa sample).

    python scripts/phase_diagram.py --n 0 --lo 0.5 --hi 3 --steps 10 --out phase.csv

``--lo``/``--hi`` are in units of pi.  This is the same computation as
``relcm scan --axis rho-kappa``; the script exists so a full diagram can be
regenerated with one command.  Set RELCM_THREADS to spread rows over processes.
"""

import argparse
import math
import sys

from relcm import cli


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=0)
    ap.add_argument("--lo", type=float, default=0.5, help="lower end, in units of pi")
    ap.add_argument("--hi", type=float, default=3.0, help="upper end, in units of pi")
    ap.add_argument("--steps", type=int, default=10)
    ap.add_argument("--basis-size", type=int, default=4)
    ap.add_argument("--predict-only", action="store_true")
    ap.add_argument("--out", default="phase_diagram.csv")
    args = ap.parse_args()
    argv = ["scan", "--axis", "rho-kappa", "--range", f"{args.lo * math.pi}:{args.hi * math.pi}:{args.steps}",
            "--n", str(args.n), "--basis-size", str(args.basis_size), "--out", args.out, "--format", "csv"]
    if args.predict_only:
        argv.append("--predict-only")
    return cli.main(argv)


if __name__ == "__main__":
    sys.exit(main())
