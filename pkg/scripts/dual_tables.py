"""Print rho, mu, e_n and eps_n side by side for a family and its dual."""

import argparse
import math

from gencs.families import DualOf, dimension, parse_family


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("family", nargs="?", default="poschl_teller(nu=3)")
    ap.add_argument("--n-max", type=int, default=10)
    args = ap.parse_args(argv)

    fam = parse_family(args.family)
    d = dimension(fam)
    n_max = args.n_max if math.isinf(d) else min(args.n_max, int(d) - 1)
    dual = DualOf(fam)
    log_rho, log_mu = fam.log_rho_table(n_max), dual.log_rho_table(n_max)
    e, eps = fam.energy_table(n_max), dual.energy_table(n_max)
    print(f"{'n':>3} {'rho':>16} {'mu':>16} {'e_n':>14} {'eps_n':>14} {'mu*rho/(n!)^2':>14}")
    for n in range(n_max + 1):
        check = math.exp(log_rho[n] + log_mu[n] - 2 * math.lgamma(n + 1))
        print(f"{n:>3} {math.exp(log_rho[n]):>16.9g} {math.exp(log_mu[n]):>16.9g} "
              f"{e[n]:>14.9g} {eps[n]:>14.9g} {check:>14.12f}")


if __name__ == "__main__":
    main()
