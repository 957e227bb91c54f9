"""One test per acceptance criterion; each records a single pass/fail line."""

import random
import time
from fractions import Fraction

import math

from vvmf.conformal import check_conformal, fusion
from vvmf.families import (INSTANCE_NAMES, H_REFERENCE, ScanConfig, belyi_verify, builtin_instance,
                           f1_series, f_line_numerators, g_line_numerators, gamma03_family,
                           gamma03_H, gamma03_line_scan, h_reference_S, hard_hexagon_S,
                           line_survivors, quasi_conformal_S, rank4_scan, s1_matrix, s2_matrix,
                           z1_series, z2_series)
from vvmf.frobenius import family_solve, frobenius_solve, to_q_expansion
from vvmf.hypergeom import Rank2Params, dim_M0, gamma_fn, pochhammer
from vvmf.mlde import mlde_residual, monic_from_exponents, rank4_abc, theta_from_exponents
from vvmf.series import WeightedForm, delta, eisenstein, mod_derivative

from conftest import fr, record_criterion

HARD_HEXAGON_PRINTED = (
    (1, 0, 1, 1, 2, 2, 4, 4, 6, 7),
    (1, 1, 1, 2, 2, 3, 4, 5, 7, 9),
    (1, 1, 1, 2, 3, 4, 5, 7, 9, 12),
    (1, 1, 2, 2, 3, 4, 6, 7, 10, 12),
)


def test_criterion_1_hard_hexagon():
    t0 = time.perf_counter()
    e = fr("1/40", "31/40", "-1/40", "9/40")
    mlde = monic_from_exponents(e)
    ode = theta_from_exponents(4, e)
    exp = to_q_expansion(family_solve(ode, e, 10), 10).normalized()
    got = tuple(tuple(exp.integer_coefficients(j)) for j in range(4))
    elapsed = time.perf_counter() - t0
    ok = (got == HARD_HEXAGON_PRINTED and elapsed < 1.0
          and mlde.coefficients() == fr("-949/7200", "139/21600", "-279/2560000"))
    record_criterion(1, ok, f"40 printed coefficients exact, {elapsed:.3f} s")
    assert ok


def test_criterion_2_symmetric_function_map():
    a = rank4_abc(fr("1/40", "31/40", "-1/40", "9/40"))
    b = rank4_abc(fr("-41/40", "9/40", "31/40", "41/40"))
    ok = (a == fr("-949/7200", "139/21600", "-279/2560000")
          and b == fr("-8509/7200", "19039/21600", "-468999/2560000"))
    record_criterion(2, ok, f"hard hexagon {tuple(map(str, a))}, quasi {tuple(map(str, b))}")
    assert ok


def test_criterion_3_quasi_conformal_coefficients():
    exp = builtin_instance("rank4-quasi").expansion(5)
    c = [exp.integer_coefficients(j) for j in range(4)]
    checks = [(c[0][2], 120786), (c[0][3], 14632531), (c[0][4], 629268246),
              (c[1][0], 492), (c[1][1], 466580), (c[2][0], 22591), (c[2][1], 3863061),
              (c[3][0], 99180), (c[3][1], 11114772)]
    ok = all(g == w for g, w in checks)
    record_criterion(3, ok, f"{sum(g == w for g, w in checks)}/9 listed values at their positions")
    assert ok


def test_criterion_4_table3():
    total = matched = 0
    for k in range(1, 5):
        inst = builtin_instance(f"table3-row-{k}")
        exp = inst.expansion()
        for j, ref in enumerate(inst.reference):
            got = exp.integer_coefficients(j)
            total += len(ref)
            matched += sum(g == w for g, w in zip(got, ref))
    ok = matched == total
    record_criterion(4, ok, f"{matched}/{total} printed coefficients in four blocks")
    assert ok


def test_criterion_5_gamma03_suite():
    t0 = time.perf_counter()
    z1 = z1_series(9)
    z2 = z2_series(7)
    ok_z1 = z1.lead_exp == -1 and list(z1.coeffs) == [1, -12, 54, -76, -243, 1188, -1384, -2916, 11934]
    ok_z2 = (z2.lead_exp == Fraction(1, 3)
             and list(z2.coeffs) == [729 * c for c in (1, 12, 90, 508, 2391, 9828, 36428)])
    ok_f1 = list(f1_series(5).coeffs) == [1, 12, 36, 12, 84]
    res = belyi_verify(30)
    ok_belyi = res.is_zero() and res.precision >= 30
    ok_dual = all(gamma03_family(lam, 20).frobenius_agreement(20) for lam in fr("-1/12", "-7/12"))
    elapsed = time.perf_counter() - t0
    ok = ok_z1 and ok_z2 and ok_f1 and ok_belyi and ok_dual and elapsed < 5.0
    record_criterion(5, ok, f"z1 {ok_z1}, z2 {ok_z2}, f1 {ok_f1}, Belyi {ok_belyi}, "
                            f"eta vs MLDE {ok_dual}, {elapsed:.2f} s")
    assert ok


def _fusion_values(S):
    return [v for a in fusion(S) for b in a for v in b]


def test_criterion_6_H():
    H = gamma03_H(8)
    bad = H.mismatches()
    # the listing shows 28 nonzero coefficients; the absent q^1 term of the first row is a 0
    listed = [(j, k) for j, r in enumerate(H_REFERENCE) for k, c in enumerate(r) if c != 0]
    wrong = {(j, k) for j, k, _, _ in bad}
    n_listed = len(listed)
    n_ok = sum((j, k) not in wrong for j, k in listed)
    ok_coeffs = not bad
    S = h_reference_S()
    tol = S.field.coerce(Fraction(1, 10**9))
    ok_h_fusion = all(abs(v - round(float(v))) <= tol and round(float(v)) >= 0
                      for v in _fusion_values(S))
    Sq = quasi_conformal_S()
    ok_minus_one = any(abs(v + 1) <= tol for v in _fusion_values(Sq))
    ok = ok_coeffs and ok_h_fusion and ok_minus_one
    record_criterion(6, ok, f"{n_ok}/{n_listed} listed coefficients reproduced "
                            f"by normalized G(-1/12); listed S fusion nonnegative integral "
                            f"{ok_h_fusion}; quasi example has -1 {ok_minus_one}")
    assert ok


def test_criterion_7_line_scans():
    f_verdicts = gamma03_line_scan("F", f_line_numerators())
    f_surv = line_survivors(f_verdicts)
    five = next(v for v in f_verdicts if v.lam == Fraction(-5, 12))
    ok_f = (f_surv == [Fraction(-7, 12), Fraction(-1, 12)] and five.quasi_conformal
            and not five.conformal and "-1" in five.reason)
    g_surv = line_survivors(gamma03_line_scan("G", g_line_numerators()))
    ok_g = g_surv == [Fraction(-1, 12)]
    ok = ok_f and ok_g
    record_criterion(7, ok, f"F survivors {[str(x) for x in f_surv]} (-5/12 negative fusion "
                            f"{not five.conformal}); G survivors {[str(x) for x in g_surv]}")
    assert ok


def test_criterion_8_rank2_numerics():
    d = dim_M0(Rank2Params(33, Fraction(9, 4)))
    ctx = d.value.context
    ok_565760 = abs(d.value - 565760) < ctx.mpf(10) ** -6
    far = []
    for c, h in ((-6, Fraction(-1, 3)), (-8, Fraction(-1, 2)), (-10, Fraction(-2, 3))):
        v = dim_M0(Rank2Params(c, h)).value
        far.append(abs(v - ctx.nint(v)) > ctx.mpf(10) ** -3)
    g = gamma_fn
    lhs = g(Fraction(3, 4)) * g(Fraction(5, 12)) / (g(Fraction(1, 4)) * g(Fraction(11, 12)))
    rhs = ctx.sqrt(2 * ctx.sqrt(3) - 3)
    ok_gamma = abs(lhs - rhs) < ctx.mpf(10) ** -12
    ok = ok_565760 and all(far) and ok_gamma
    record_criterion(8, ok, f"dim M0(33, 9/4) = {ctx.nstr(d.value, 15)}; c=-6,-8,-10 non-integral "
                            f"{far}; Gamma identity {ok_gamma}")
    assert ok


def _leibniz_ramanujan(rng):
    n = 20
    e4, e6 = eisenstein(4, n), eisenstein(6, n)
    gens = [e4, e6, delta(n)]
    ok = (mod_derivative(e4).series == e6.series.scale(Fraction(-1, 3)).truncate(n)
          and mod_derivative(e6).series == (e4 * e4).series.scale(Fraction(-1, 2)).truncate(n)
          and mod_derivative(delta(n)).series.is_zero())
    for _ in range(20):
        f = WeightedForm(0, e4.series.one(n))
        g = WeightedForm(0, e4.series.one(n))
        for _ in range(rng.randint(1, 3)):
            f = f * rng.choice(gens)
        for _ in range(rng.randint(1, 3)):
            g = g * rng.choice(gens)
        lhs = mod_derivative(f * g).series
        rhs = (mod_derivative(f) * g + f * mod_derivative(g)).series
        ok = ok and lhs == rhs and lhs.precision >= 20
    return ok


def _rank2_closed_form(rng):
    ok = True
    count = 0
    while count < 20:
        h = Fraction(rng.randint(-59, 59), rng.choice([5, 7, 8, 9, 10, 12]))
        if h.denominator == 1:
            continue
        f1, f2 = Fraction(1, 12) - h / 2, Fraction(1, 12) + h / 2
        sol = frobenius_solve(theta_from_exponents(2, (f1, f2)), f1, 15)
        want = [pochhammer(f1, k) * pochhammer(f1 + Fraction(1, 3), k)
                / (pochhammer(f1 - f2 + 1, k) * math.factorial(k)) for k in range(15)]
        ok = ok and list(sol.coefficients) == want
        count += 1
    return ok


def _s_matrices():
    tol = Fraction(1, 10**20)
    ok = True
    for S in (hard_hexagon_S(), quasi_conformal_S(), h_reference_S(), s1_matrix(), s2_matrix()):
        t = S.field.coerce(tol)
        ok = ok and S.symmetry_defect() <= t and S.involution_defect() <= t
        N = fusion(S)
        ok = ok and all(abs(N[0][m][v] - (1 if m == v else 0)) <= t
                        for m in range(S.d) for v in range(S.d))
    return ok


def _residuals():
    ok = True
    for name in INSTANCE_NAMES:
        inst = builtin_instance(name)
        ok = ok and all(mlde_residual(inst.mlde, c).series.is_zero()
                        for c in inst.expansion(12).coordinates)
    for lam in fr("-1/12", "-7/12", "-5/12"):
        ok = ok and all(r.is_zero() for r in gamma03_family(lam, 12).residuals())
    return ok


def _determinism():
    inst = builtin_instance("hard-hexagon")
    base = dict(denominators=(40,), centers=inst.exponents.values, radius=2, n_terms=10)
    one = rank4_scan(ScanConfig(workers=1, **base)).to_json()
    many = rank4_scan(ScanConfig(workers=8, **base)).to_json()
    return one == many and len(one["candidates"]) > 0


def test_criterion_9_property_suites():
    rng = random.Random(2024)
    parts = {"Leibniz/Ramanujan": _leibniz_ramanujan(rng),
             "rank-2 closed form": _rank2_closed_form(rng),
             "S-matrices": _s_matrices(),
             "MLDE residuals": _residuals(),
             "scan determinism": _determinism()}
    ok = all(parts.values())
    record_criterion(9, ok, ", ".join(f"{k} {v}" for k, v in parts.items()))
    assert ok
