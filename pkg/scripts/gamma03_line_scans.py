"""Scan the Gamma_0(3) lines lam = n/12 for the families F and G = eta^-4 D F."""

import argparse

from vvmf.families import f_line_numerators, g_line_numerators, gamma03_line_scan


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--terms", type=int, default=12)
    args = ap.parse_args()
    for family, nums in (("F", f_line_numerators()), ("G", g_line_numerators())):
        print(f"family {family}")
        for v in gamma03_line_scan(family, nums, 12, args.terms):
            tag = "CONFORMAL" if v.conformal else "-"
            print(f"  lam={str(v.lam):>6} vacuum={v.vacuum} integral={v.integral} "
                  f"quasi={v.quasi_conformal} {tag}  {v.reason}")


if __name__ == "__main__":
    main()
