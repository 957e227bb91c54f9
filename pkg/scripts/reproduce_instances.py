"""Recompute the named rank-4 instances and compare with their reference coefficients."""

import argparse

from vvmf.conformal import check_conformal
from vvmf.families import INSTANCE_NAMES, builtin_instance


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("names", nargs="*", default=list(INSTANCE_NAMES))
    args = ap.parse_args()
    for name in args.names:
        inst = builtin_instance(name)
        exp = inst.expansion()
        rep = check_conformal(exp, inst.exponents, inst.S)
        print(f"{name}: exponents {', '.join(inst.exponents.to_json())}")
        print(f"  mlde {[str(c) for c in inst.mlde.coefficients()]}")
        for j, ref in enumerate(inst.reference):
            got = exp.integer_coefficients(j)[:len(ref)]
            flag = "ok" if got == list(ref) else "MISMATCH"
            print(f"  coord {j}: {flag} {got}")
        print(f"  quasi-conformal {rep.quasi_conformal}, conformal {rep.conformal}")


if __name__ == "__main__":
    main()
