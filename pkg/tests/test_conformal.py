import random
from fractions import Fraction

import pytest

from vvmf.conformal import (SMatrix, check_conformal, check_quasi_conformal, fusion,
                            integrality_scale, sign_prescreen)
from vvmf.errors import DomainError
from vvmf.families import (builtin_instance, gamma03_exponents, gamma03_G, gamma03_mlde,
                           gamma03_S, h_reference_S, hard_hexagon_S, quasi_conformal_S, s1_matrix,
                           s2_matrix)
from vvmf.frobenius import CharacterVectorExpansion
from vvmf.mlde import theta_from_mlde
from vvmf.rings import QQ, rational_function_field
from vvmf.series import PuiseuxSeries

TOL20 = Fraction(1, 10**20)
TOL9 = Fraction(1, 10**9)

NAMED = {"hard-hexagon": hard_hexagon_S, "rank4-quasi": quasi_conformal_S, "H": h_reference_S,
         "S1": s1_matrix, "S2": s2_matrix}


def near(x, y, tol):
    return abs(x - y) <= tol


@pytest.mark.parametrize("name", sorted(NAMED))
def test_named_matrices_are_involutions(name):
    S = NAMED[name]()
    tol = S.field.coerce(TOL20)
    assert S.symmetry_defect() <= tol
    assert S.involution_defect() <= tol


@pytest.mark.parametrize("name", sorted(NAMED))
def test_vacuum_fusion_is_identity(name):
    S = NAMED[name]()
    N = fusion(S)
    tol = S.field.coerce(TOL20)
    for mu in range(S.d):
        for nu in range(S.d):
            assert near(N[0][mu][nu], 1 if mu == nu else 0, tol)


@pytest.mark.parametrize("name", sorted(NAMED))
def test_fusion_symmetric(name):
    N = fusion(NAMED[name]())
    d = len(N)
    assert all(N[a][b][c] == N[b][a][c] for a in range(d) for b in range(d) for c in range(d))


def test_fusion_rank_one():
    N = fusion(SMatrix([[1]]))
    assert N[0][0][0] == 1


def test_fusion_hard_hexagon_values():
    S = hard_hexagon_S()
    tol = S.field.coerce(TOL9)
    vals = [v for a in fusion(S) for b in a for v in b]
    assert all(near(v, 0, tol) or near(v, 1, tol) for v in vals)


def test_fusion_quasi_has_minus_one():
    S = quasi_conformal_S()
    tol = S.field.coerce(TOL9)
    vals = [v for a in fusion(S) for b in a for v in b]
    assert any(near(v, -1, tol) for v in vals)


def test_fusion_zero_denominator():
    S = SMatrix([[0, 1], [1, 0]])
    with pytest.raises(DomainError, match="Verlinde denominator vanishes"):
        fusion(S)


def test_smatrix_json_roundtrip():
    S = s2_matrix()
    T = SMatrix.from_json(S.to_json())
    assert all(near(S[i, j], T[i, j], S.field.coerce(TOL20)) for i in range(4) for j in range(4))


def test_hard_hexagon_conformal():
    inst = builtin_instance("hard-hexagon")
    rep = check_conformal(inst.expansion(10), inst.exponents, inst.S)
    assert rep.quasi_conformal and rep.conformal
    q = check_quasi_conformal(inst.expansion(10), inst.exponents, inst.S)
    assert q.quasi_conformal


def test_quasi_instance_not_conformal():
    inst = builtin_instance("rank4-quasi")
    rep = check_conformal(inst.expansion(6), inst.exponents, inst.S)
    assert rep.quasi_conformal
    assert rep.conformal is False
    a, b, c = rep.witnesses["fusion"]["indices"]
    assert rep.fusion_rounded[a][b][c] == -1


def test_printed_H_matrix_fusion():
    S = h_reference_S()
    tol = S.field.coerce(TOL9)
    for a in fusion(S):
        for b in a:
            for v in b:
                r = round(float(v))
                assert r >= 0 and near(v, r, tol)


def test_coefficient_witness():
    inst = builtin_instance("hard-hexagon")
    exp = inst.expansion(6)
    bad = list(exp.coordinates[2].coeffs)
    bad[3] = -1
    coords = list(exp.coordinates)
    coords[2] = PuiseuxSeries(bad, coords[2].lead_exp, 1)
    broken = CharacterVectorExpansion(exp.exponents, tuple(coords), exp.rescale)
    rep = check_conformal(broken, inst.exponents, inst.S)
    assert not rep.conditions["nonnegative_integer_coefficients"]
    assert rep.witnesses["nonnegative_integer_coefficients"] == {
        "coordinate": 2, "exponent": str(coords[2].lead_exp + 3), "value": "-1"}
    assert not rep.quasi_conformal and not rep.conformal


def test_dimension_mismatch():
    inst = builtin_instance("hard-hexagon")
    with pytest.raises(DomainError, match="dimension mismatch"):
        check_quasi_conformal(inst.expansion(4), inst.exponents, SMatrix([[1]]))


def test_integrality_scale_examples():
    s = PuiseuxSeries([1, 13, 98], 0, 1)
    assert integrality_scale(s).scale == 1
    t = s.scale(Fraction(1, 3))
    r = integrality_scale(t)
    assert r.scale == 3 and r.coefficients == (1, 13, 98)
    assert integrality_scale(PuiseuxSeries([1, -1], 0, 1)) is None
    assert integrality_scale(PuiseuxSeries([1, Fraction(1, 10**8)], 0, 1)) is None


def test_integrality_scale_absent_on_family():
    # an irrational-free point whose coefficients have growing denominators
    from vvmf.families import gamma03_family

    fam = gamma03_family(Fraction(1, 7), 10)
    assert integrality_scale(fam.coordinates[0], max_scale=10**7) is None


def _random_conformal_inputs():
    rng = random.Random(5)
    names = ["hard-hexagon", "rank4-quasi", "table3-row-1", "table3-row-3"]
    out = []
    for name in names:
        inst = builtin_instance(name)
        out.append((inst.expansion(5), inst.exponents, inst.S))
        out.append((inst.expansion(5), inst.exponents, NAMED[rng.choice(sorted(NAMED))]()))
    return out


@pytest.mark.parametrize("exp,e,S", _random_conformal_inputs())
def test_conformal_implies_quasi(exp, e, S):
    full = check_conformal(exp, e, S)
    if full.conformal:
        assert check_quasi_conformal(exp, e, S).quasi_conformal


def test_sign_prescreen_first_coordinate_symbolic():
    R = rational_function_field()
    lam = R.gen
    ode = theta_from_mlde(gamma03_mlde(lam, R))
    res = sign_prescreen(gamma03_exponents(lam), ode, 3)
    assert res[0].coefficients[1] == -12 * lam
    assert res[0].coefficients[2] == 72 * lam * (lam - R.coerce(Fraction(1, 4)))
    assert res[1].coefficients[1] == 288 * lam * (lam * lam + lam * Fraction(3, 4) + Fraction(1, 72))


def test_sign_prescreen_rational_points():
    def coord(lam, j):
        ode = theta_from_mlde(gamma03_mlde(lam))
        return sign_prescreen(gamma03_exponents(lam), ode, 2)[j]

    assert coord(Fraction(1, 12), 0).ok is False
    assert coord(Fraction(-1, 12), 0).ok is True
    assert coord(Fraction(-37, 50), 1).ok is False
    assert coord(Fraction(-7, 12), 1).ok is True


def test_g_family_sign_bound():
    def first(lam):
        c = gamma03_G(lam, 4).coordinates[0].normalized()
        return [Fraction(x) for x in c.coeffs[:3]]

    assert all(x >= 0 for x in first(Fraction(5, 12)))
    assert all(x >= 0 for x in first(Fraction(7, 12)))
    assert any(x < 0 for x in first(Fraction(2, 3)))
    # the normalized first coordinate of G is 1 - 12(lam - 4/3) q + 72 (lam - 7/3)(lam - 7/12) q^2
    lam = Fraction(5, 12)
    assert first(lam) == [1, -12 * (lam - Fraction(4, 3)), 72 * (lam - Fraction(7, 3)) * (lam - Fraction(7, 12))]


def test_family_S_involution():
    rng = random.Random(2)
    for _ in range(10):
        lam = Fraction(rng.randint(-99, 99), rng.choice([7, 11, 12, 13, 20]))
        S = gamma03_S(lam)
        tol = S.field.coerce(TOL20)
        assert S.symmetry_defect() <= tol and S.involution_defect() <= tol
        ctx = S.ctx
        # the lower block's rows hold the three values 2 cos(2 pi (lam + k)/3)/3
        want = sorted(2 * ctx.cos(2 * ctx.pi * (ctx.mpf(lam.numerator) / lam.denominator + k) / 3) / 3
                      for k in range(3))
        for i in range(1, 4):
            got = sorted(S[i, j] for j in range(1, 4))
            assert all(near(a, b, tol) for a, b in zip(got, want))
        # each row of the block sums to zero
        assert all(near(sum(S[i, j] for j in range(1, 4)), 0, tol) for i in range(1, 4))
