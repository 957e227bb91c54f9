"""Compare the normalized G(-1/12) with the listed vector H, coefficient by coefficient."""

from vvmf.conformal import check_conformal, fusion
from vvmf.families import H_EXPONENTS, gamma03_H


def main():
    hv = gamma03_H(8)
    for j, (mine, ref) in enumerate(zip(hv.expansion.coordinates, hv.reference.coordinates)):
        print(f"exponent {H_EXPONENTS[j]}")
        print(f"  computed {[str(c) for c in mine.coeffs[:len(ref.coeffs)]]}")
        print(f"  listed   {[str(c) for c in ref.coeffs]}")
    print(f"{len(hv.mismatches())} differing positions")
    rep = check_conformal(hv.reference, hv.reference.exponents, hv.reference_S)
    print(f"listed vector with listed S: quasi-conformal {rep.quasi_conformal}, "
          f"conformal {rep.conformal}")
    N = fusion(hv.reference_S)
    print("listed S fusion (rounded):", [[[int(round(float(x))) for x in b] for b in a] for a in N])


if __name__ == "__main__":
    main()
