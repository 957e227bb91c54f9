import random
from fractions import Fraction

import mpmath
import pytest

from vvmf.errors import DomainError
from vvmf.frobenius import family_solve, to_q_expansion
from vvmf.hypergeom import (Rank2Params, dim_M0, gamma_fn, hyp2f1, rank2_extremal_character,
                            rank2_S, rank2_X, rank2_X_gauss, rank2_X_simplified, rank2_X_theorem)
from vvmf.mlde import theta_from_exponents
from vvmf.series import WeightedForm, eisenstein, eta_quotient, mod_derivative

TOL30 = mpmath.mpf(10) ** -30


def test_params_derived():
    p = Rank2Params(33, Fraction(9, 4))
    assert p.e1 == Fraction(-11, 8)
    assert p.e2 == Fraction(7, 8)
    assert p.k1 == -4 == 6 * (p.e1 + p.e2) - 1
    assert p.f1 + p.f2 == Fraction(1, 6)
    with pytest.raises(DomainError):
        Rank2Params(1, 2)


def test_hyp2f1_trivial():
    assert list(hyp2f1(0, Fraction(2, 3), Fraction(5, 7), 5).coeffs) == [1, 0, 0, 0, 0]
    assert list(hyp2f1(1, 1, 1, 5).coeffs) == [1, 1, 1, 1, 1]
    assert hyp2f1(Fraction(11, 60), Fraction(31, 60), Fraction(6, 5), 2).coeffs[1] == Fraction(341, 4320)


def test_hyp2f1_pole():
    with pytest.raises(DomainError):
        hyp2f1(Fraction(1, 2), Fraction(1, 3), -2, 6)


def test_gamma_exact_values():
    ctx = mpmath.mp.clone()
    ctx.prec = 256
    assert abs(gamma_fn(1) - 1) < TOL30
    assert abs(gamma_fn(Fraction(1, 2)) - ctx.sqrt(ctx.pi)) < TOL30
    with pytest.raises(DomainError):
        gamma_fn(-3)


def test_gamma_reflection():
    ctx = mpmath.mp.clone()
    ctx.prec = 256
    x = Fraction(3, 10)
    lhs = gamma_fn(x) * gamma_fn(1 - x)
    rhs = ctx.pi / ctx.sinpi(ctx.mpf(3) / 10)
    assert abs(lhs / rhs - 1) < ctx.mpf(2) ** -240


def test_gamma_quotient_identity():
    g = gamma_fn
    lhs = g(Fraction(3, 4)) * g(Fraction(5, 12)) / (g(Fraction(1, 4)) * g(Fraction(11, 12)))
    rhs = mpmath.sqrt(2 * mpmath.sqrt(3) - 3)
    assert abs(lhs - rhs) < mpmath.mpf(10) ** -12


def test_three_routes_for_X():
    p = Rank2Params(1, Fraction(1, 5))
    a, b, c = rank2_X_theorem(p), rank2_X_simplified(p), rank2_X_gauss(p)
    assert abs(abs(a) - abs(b)) < TOL30
    assert abs(b - c) < TOL30


def test_X_sign():
    p = Rank2Params(33, Fraction(9, 4))
    assert rank2_X(p, 1) == -rank2_X(p, -1)
    with pytest.raises(DomainError):
        rank2_X(p, 0)


def test_dim_m0_565760():
    d = dim_M0(Rank2Params(33, Fraction(9, 4)))
    assert d.integral
    assert d.rounded == 565760
    assert abs(d.value - 565760) < mpmath.mpf(10) ** -6
    assert d.to_json()["value"].startswith("565760.000")


@pytest.mark.parametrize("c,h", [(-6, Fraction(-1, 3)), (-8, Fraction(-1, 2)), (-10, Fraction(-2, 3))])
def test_dim_m0_nonintegral(c, h):
    d = dim_M0(Rank2Params(c, h))
    assert d.to_json()["k1"] == 0
    assert not d.integral
    assert abs(d.value - d.rounded) > mpmath.mpf(10) ** -3


def test_dim_m0_not_extremal():
    with pytest.raises(DomainError, match="not extremal"):
        dim_M0(Rank2Params(1, Fraction(1, 5)))


def test_rank2_S_relations():
    S, T = rank2_S(Fraction(-11, 8), Fraction(7, 8))
    ctx = S.ctx
    assert S.is_symmetric() and S.squares_to_identity()
    M = ctx.matrix([[S[i, j] for j in range(2)] for i in range(2)])
    P = (M * ctx.diag(T)) ** 3
    sign = ctx.re(P[0, 0])
    assert abs(abs(sign) - 1) < TOL30
    for i in range(2):
        for j in range(2):
            assert abs(P[i, j] - (sign if i == j else 0)) < TOL30


def test_rank2_S_sign_flip():
    S, _ = rank2_S(Fraction(-11, 8), Fraction(7, 8), 1)
    S2, _ = rank2_S(Fraction(-11, 8), Fraction(7, 8), -1)
    conj = S.conjugate_by_signs([-1, 1])
    assert all(abs(conj[i, j] - S2[i, j]) < TOL30 for i in range(2) for j in range(2))


def test_rank2_S_degenerate():
    with pytest.raises(DomainError):
        rank2_S(Fraction(1, 3), Fraction(4, 3))


def test_extremal_character_565760():
    ch = rank2_extremal_character(Rank2Params(33, Fraction(9, 4)), 12)
    first, second = ch.expansion.coordinates
    assert first.coeffs[0] == 1
    assert first.lead_exp == Fraction(-11, 8)
    assert second.coeffs[0] == 565760
    assert ch.exact_integral


def _admissible(seed=11, count=20):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        h = Fraction(rng.randint(-40, 60), rng.choice([4, 5, 7, 8, 9, 10, 12]))
        k1 = rng.choice([0, -2, -4])
        if h.denominator == 1 or 6 * h == 1:
            continue
        try:
            p = Rank2Params.from_k1(h, k1)
            dim_M0(p)
            theta_from_exponents(2, (p.f1, p.f2))
        except DomainError:
            continue
        out.append(p)
    return out


@pytest.mark.parametrize("p", _admissible(), ids=lambda p: f"c={p.c},h={p.h}")
def test_table_assembly_matches_frobenius(p):
    n = 15
    ch = rank2_extremal_character(p, n)
    ode = theta_from_exponents(2, (p.f1, p.f2))
    pair = to_q_expansion(family_solve(ode, (p.f1, p.f2), n + 1), n + 1).normalized().coordinates
    k1 = int(p.k1)
    if k1 == 0:
        want = [s.truncate(n) for s in pair]
    elif k1 == -2:
        eta = eta_quotient([(1, -4)], n + 1)
        want = [(eta * mod_derivative(WeightedForm(0, s)).series).truncate(n).normalized() for s in pair]
    else:
        pre = eisenstein(4, n + 1).series * eta_quotient([(1, -8)], n + 1)
        want = [(pre * s).truncate(n).normalized() for s in pair]
    got = [c.normalized() for c in ch.expansion.coordinates]
    assert got == want
    assert [c.lead_exp for c in got] == [p.e1, p.e2]
