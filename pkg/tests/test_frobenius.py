import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from vvmf.errors import DomainError, TruncationError
from vvmf.families import builtin_instance, gamma03_exponents, gamma03_mlde
from vvmf.frobenius import (CharacterVectorExpansion, denominator_profile, family_solve,
                            frobenius_solve, to_q_expansion)
from vvmf.hypergeom import hyp2f1, pochhammer
from vvmf.mlde import ThetaOde, indicial_data, poly_eval, theta_from_exponents, theta_from_mlde
from vvmf.rings import QQ, rational_function_field

from conftest import fr

HARD_HEXAGON = fr("1/40", "31/40", "-1/40", "9/40")


def test_degree_one_is_monomial():
    e = Fraction(3, 7)
    sol = frobenius_solve(ThetaOde(1, ((-e,), (1,))), e, 6)
    assert list(sol.coefficients) == [1, 0, 0, 0, 0, 0]
    assert family_solve(ThetaOde(1, ((-e,), (1,))), [e], 3)[0].exponent == e
    assert denominator_profile(sol).cumulative_lcm == (1,) * 6


def test_rank2_first_coefficient():
    f1, f2 = fr("11/60", "-1/60")
    sol = frobenius_solve(theta_from_exponents(2, (f1, f2)), f1, 4)
    assert sol.coefficients[1] == Fraction(341, 4320)


def test_first_step_formula():
    ode = theta_from_exponents(4, HARD_HEXAGON)
    Q = indicial_data(ode)
    for j, e in enumerate(HARD_HEXAGON):
        prod = Fraction(1)
        for i, x in enumerate(HARD_HEXAGON):
            if i != j:
                prod *= e - x + 1
        a1 = frobenius_solve(ode, e, 2).coefficients[1]
        assert a1 == -poly_eval(Q[1], e, QQ) / prod


def test_not_a_root():
    with pytest.raises(DomainError, match="not a root"):
        frobenius_solve(theta_from_exponents(4, HARD_HEXAGON), Fraction(1, 3), 4)


def test_resonant_exponent():
    # exponents 0 and 2 differ by an integer; solving at the smaller one resonates
    ode = ThetaOde(2, ((0, 1), (-2,), (1,)))
    with pytest.raises(DomainError, match="resonant exponent"):
        frobenius_solve(ode, 0, 4)


def test_residual_zero():
    ode = theta_from_exponents(4, HARD_HEXAGON)
    for sol in family_solve(ode, HARD_HEXAGON, 15):
        r = sol.residual()
        assert r.is_zero()


def test_hard_hexagon_q_expansion():
    ode = theta_from_exponents(4, HARD_HEXAGON)
    exp = to_q_expansion(family_solve(ode, HARD_HEXAGON, 7), 7, (1, 1, 1, 1))
    assert [exp.integer_coefficients(j) for j in range(4)] == [
        [1, 0, 1, 1, 2, 2, 4],
        [1, 1, 1, 2, 2, 3, 4],
        [1, 1, 1, 2, 3, 4, 5],
        [1, 1, 2, 2, 3, 4, 6]]


def test_unscaled_prefactor():
    ode = theta_from_exponents(4, HARD_HEXAGON)
    exp = to_q_expansion(family_solve(ode, HARD_HEXAGON, 4), 4)
    for e, c in zip(HARD_HEXAGON, exp.coordinates):
        assert c.lead_exp == e
        assert c.prefactor.base == 1728 and c.prefactor.exp == e
        assert c.coeffs[0] == 1


def test_quasi_example_rescale():
    inst = builtin_instance("rank4-quasi")
    exp = inst.expansion(4)
    got = [exp.integer_coefficients(j) for j in range(4)]
    assert got[0][:4] == [1, 0, 120786, 14632531]
    assert got[1][:2] == [492, 466580]
    assert got[2][:2] == [22591, 3863061]
    assert got[3][:2] == [99180, 11114772]


def test_table3_row1_rescale():
    inst = builtin_instance("table3-row-1")
    exp = inst.expansion(6)
    assert exp.integer_coefficients(0) == [1, 99, 50787, 2794770, 70309800, 1134528021]
    assert exp.integer_coefficients(1)[:2] == [792, 154088]
    assert exp.integer_coefficients(2)[:2] == [3366, 466752]
    assert exp.integer_coefficients(3)[:2] == [14280, 1252152]


def test_truncation_shortfall():
    ode = theta_from_exponents(4, HARD_HEXAGON)
    with pytest.raises(TruncationError):
        to_q_expansion(family_solve(ode, HARD_HEXAGON, 3), 5)


def test_expansion_json_roundtrip():
    ode = theta_from_exponents(4, HARD_HEXAGON)
    exp = to_q_expansion(family_solve(ode, HARD_HEXAGON, 5), 5)
    assert CharacterVectorExpansion.from_json(exp.to_json()) == exp
    exp = exp.normalized()
    assert CharacterVectorExpansion.from_json(exp.to_json()) == exp


def test_denominators_hard_hexagon():
    ode = theta_from_exponents(4, HARD_HEXAGON)
    exp = to_q_expansion(family_solve(ode, HARD_HEXAGON, 20), 20).normalized()
    for c in exp.coordinates:
        prof = denominator_profile(c, window=10)
        assert prof.max_denominator == 1
        assert prof.stabilized


def test_denominators_grow_for_generic_tuple():
    e = fr("1/7", "2/9", "3/11", "1")
    e = (e[0], e[1], e[2], 1 - e[0] - e[1] - e[2])
    ode = theta_from_exponents(4, e)
    exp = to_q_expansion(family_solve(ode, e, 40), 40).normalized()
    prof = denominator_profile(exp.coordinates[0], window=10)
    assert not prof.stabilized
    assert prof.cumulative_lcm[-1] > prof.cumulative_lcm[20]


def _rank2_pairs():
    rng = random.Random(7)
    out = []
    while len(out) < 20:
        h = Fraction(rng.randint(-59, 59), rng.choice([5, 7, 8, 9, 10, 12, 15]))
        if h.denominator == 1:
            continue
        f1, f2 = Fraction(1, 12) - h / 2, Fraction(1, 12) + h / 2
        if (f1 - f2 + 1) <= 0 and (f1 - f2 + 1).denominator == 1:
            continue
        out.append((f1, f2))
    return out


@pytest.mark.parametrize("f1,f2", _rank2_pairs())
def test_rank2_closed_form(f1, f2):
    n = 15
    sol = frobenius_solve(theta_from_exponents(2, (f1, f2)), f1, n)
    want = [pochhammer(f1, k) * pochhammer(f1 + Fraction(1, 3), k)
            / (pochhammer(f1 - f2 + 1, k) * math.factorial(k)) for k in range(n)]
    assert list(sol.coefficients) == want
    assert list(hyp2f1(f1, f1 + Fraction(1, 3), f1 - f2 + 1, n).coeffs) == want


def test_symbolic_specialization_commutes():
    R = rational_function_field()
    lam = R.gen
    ode_sym = theta_from_mlde(gamma03_mlde(lam, R))
    ex_sym = gamma03_exponents(lam)
    sols = family_solve(ode_sym, ex_sym, 8)
    rng = random.Random(3)
    for _ in range(10):
        l0 = Fraction(rng.randint(-50, 50), rng.choice([7, 11, 13, 17, 24]))
        if (4 * l0).denominator == 1:
            continue
        ode = theta_from_mlde(gamma03_mlde(l0))
        direct = family_solve(ode, gamma03_exponents(l0), 8)
        for s_sym, s in zip(sols, direct):
            assert [R.evaluate(c, l0) for c in s_sym.coefficients] == list(s.coefficients)


def test_pochhammer_bound_gamma03():
    # clearing the theta-form to Z[lam] costs 216 per recurrence step; the
    # exponents lam/3 + k/3 cost another factor 3
    R = rational_function_field()
    lam = R.gen
    ode = theta_from_mlde(gamma03_mlde(lam, R))
    ex = gamma03_exponents(lam)
    clearing = (216, 648, 648, 648)
    for j in range(4):
        sol = frobenius_solve(ode, ex[j], 13)
        for n in range(1, 13):
            s = sol.coefficients[n] * math.factorial(n) * clearing[j] ** n
            for i in range(4):
                if i != j:
                    for k in range(n):
                        s = s * (ex[j] - ex[i] + 1 + k)
            assert R.is_polynomial_over_z(s), (j, n)
