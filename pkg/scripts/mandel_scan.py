"""Mandel Q against |z| for a few families, written as CSV (data only, no plotting)."""

import argparse
import csv
import math
import sys

import numpy as np

from gencs.families import convergence_radius, parse_family
from gencs.fock import build_state, photon_statistics

DEFAULT = ["canonical", "poschl_teller(nu=3)", "gp(kappa=1)", "bg(kappa=1)", "dual(hydrogen_like)",
           "penson_solomon(q=0.8)"]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("families", nargs="*", default=DEFAULT)
    ap.add_argument("--zmax", type=float, default=2.0)
    ap.add_argument("--steps", type=int, default=40)
    args = ap.parse_args(argv)

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["family", "abs_z", "mean_n", "mandel_q"])
    for text in args.families:
        fam = parse_family(text)
        R = convergence_radius(fam)
        top = min(args.zmax, 0.9 * R) if math.isfinite(R) else args.zmax
        for r in np.linspace(0.0, top, args.steps + 1)[1:]:
            st = photon_statistics(build_state(fam, r))
            w.writerow([text, f"{r:.6g}", f"{st.mean_n:.12g}", f"{st.mandel_q:.12g}"])


if __name__ == "__main__":
    main()
