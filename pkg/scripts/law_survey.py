"""Survey the built-in group laws: logarithms, binomial tables, timings.

Usage: python3 scripts/law_survey.py [--trunc N] [--nmax K]
"""

import argparse
import time

from fglcalc.fgl import g_factor, logarithm, standard_law
from fglcalc.calculus import FBinomialTable, f_binomial_identities

KINDS = [("additive", {}), ("multiplicative", {}), ("one_parameter", {}),
         ("elliptic", {}), ("p_typical", {"p": 2, "h": 1}),
         ("p_typical", {"p": 3, "h": 1})]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trunc", type=int, default=12)
    ap.add_argument("--nmax", type=int, default=3)
    args = ap.parse_args()

    for kind, params in KINDS:
        t0 = time.time()
        law = standard_law(kind, trunc=args.trunc, **params)
        build = time.time() - t0
        R = law.ring
        print(f"== {law.name} (trunc {law.trunc}, built {build:.2f}s)")
        if law.log is not None:
            phi = logarithm(law)
            head = sorted(phi.coeffs.items())[:5]
            print("   phi:", "  ".join(f"z^{e[0]}: {R.to_text(c)}"
                                       for e, c in head))
        diag = g_factor(law).as_laurent().diagonal_eval()
        head = sorted(diag.coeffs.items())[:5]
        print("   G(z,z):", "  ".join(f"z^{e[0]}: {R.to_text(c)}"
                                      for e, c in head))

        t0 = time.time()
        tab = FBinomialTable(law, nmax=args.nmax)
        rep = f_binomial_identities(law, nmax=min(args.nmax, 3))
        print(f"   binomial slices n in [{-args.nmax},{args.nmax}] "
              f"in {time.time() - t0:.2f}s; identities "
              f"{'pass' if rep.ok else 'FAIL'}")
        row = tab.slices[2]
        cells = [(e, c) for e, c in sorted(row.coeffs.items()) if e[1] >= 0]
        print("   row n=2:", "  ".join(f"{e}: {R.to_text(c)}"
                                       for e, c in cells[:6]))
        print()


if __name__ == "__main__":
    main()
