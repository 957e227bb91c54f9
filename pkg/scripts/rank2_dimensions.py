"""dim M_0 for rank-2 extremal parameters and the Gamma-quotient identity."""

from fractions import Fraction

from vvmf.hypergeom import Rank2Params, dim_M0, gamma_fn

CASES = [(33, Fraction(9, 4)), (-6, Fraction(-1, 3)), (-8, Fraction(-1, 2)), (-10, Fraction(-2, 3))]


def main():
    for c, h in CASES:
        d = dim_M0(Rank2Params(c, h))
        print(d.to_json())
    g = gamma_fn
    lhs = g(Fraction(3, 4)) * g(Fraction(5, 12)) / (g(Fraction(1, 4)) * g(Fraction(11, 12)))
    ctx = lhs.context
    print("Gamma quotient - sqrt(2 sqrt 3 - 3) =", ctx.nstr(lhs - ctx.sqrt(2 * ctx.sqrt(3) - 3), 5))


if __name__ == "__main__":
    main()
