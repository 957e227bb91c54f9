"""Concrete families and instances of rank-4 vector-valued modular forms.

* the Gamma_0(3) induced one-parameter family F(lam), built from eta
  quotients and cross-checked against its monic MLDE;
* the derived family G = eta^-4 D_0 F;
* named instances with reference data (hard hexagon, a quasi-conformal
  example, four suspected conformal forms);
* scans over lam-lines and over boxes of rank-4 exponent tuples.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .conformal import (SMatrix, check_conformal, check_quasi_conformal, integrality_scale,
                        normalized_q_coefficients)
from .errors import DomainError
from .frobenius import (CharacterVectorExpansion, denominator_profile, family_solve,
                        to_q_expansion)
from .mlde import (ExponentTuple, MldeTerm, MonicMlde, monic_from_exponents, mlde_residual,
                   theta_from_exponents, theta_from_mlde)
from .rings import DEFAULT_PRECISION, QQ, fraction_str, real_field, to_fraction
from .series import (Prefactor, PuiseuxSeries, WeightedForm, eisenstein, eta_quotient, j_and_kappa,
                     mod_derivative, pow_frac, power, rational_power)


# ---------------------------------------------------------------------------
# Gamma_0(3) family


def gamma03_abc(lam):
    """(A, B, C) with D^4 + A E4 D^2 + B E6 D + C E4^2 annihilating z_j^lam.

    Obtained by reducing D^4(z^lam) with D(f) = -f^2/4 + E4/12 and the
    quartic relation for f = -D(z)/z; equivalently, the monic MLDE with
    exponents (-lam, lam/3, (lam+1)/3, (lam+2)/3). Works for any field
    element lam (rationals or a symbolic parameter).
    """
    A = -(8 * lam * lam + 4 * lam + 1) / 12
    B = (64 * lam ** 3 + 96 * lam * lam + 20 * lam + 3) / 216
    C = -lam * lam * (lam + 1) * (lam + 2) / 27
    if isinstance(lam, int):
        A, B, C = Fraction(A), Fraction(B), Fraction(C)
    return A, B, C


def gamma03_exponents(lam) -> tuple:
    """Cusp exponents (-lam, lam/3, (lam+1)/3, (lam+2)/3) of F(lam)."""
    return (-lam, lam / 3, (lam + 1) / 3, (lam + 2) / 3)


def gamma03_mlde(lam, ring=QQ) -> MonicMlde:
    A, B, C = gamma03_abc(ring.coerce(lam) if ring is not QQ else to_fraction(lam))
    return MonicMlde(4, (MldeTerm(2, A, 1, 0), MldeTerm(1, B, 0, 1), MldeTerm(0, C, 2, 0)), ring)


def is_reducible(lam) -> bool:
    """The induced representation is reducible exactly when 4 lam is an integer."""
    return (4 * to_fraction(lam)).denominator == 1


def z1_series(n_terms: int) -> PuiseuxSeries:
    """z_1 = (eta(q) / eta(q^3))^12 = q^-1 (1 - 12 q + 54 q^2 + ...)."""
    return eta_quotient([(1, 12), (3, -12)], n_terms)


def z2_series(n_terms: int) -> PuiseuxSeries:
    """z_2 = 729 (eta(q) / eta(q^(1/3)))^12 = 729 q^(1/3) (1 + 12 q^(1/3) + ...)."""
    return eta_quotient([(1, 12), (Fraction(1, 3), -12)], n_terms).scale(729)


def _three_power(lam: Fraction):
    """3^(6 lam + 1/2): rational when 12 lam is odd, otherwise kept out of band."""
    e = 6 * lam + Fraction(1, 2)
    r = rational_power(Fraction(3), e)
    return r, (None if r is not None else Prefactor(Fraction(3), e))


def f_family_coordinates(lam, n_terms: int) -> tuple:
    """The four coordinates of F(lam) through n_terms q-terms each.

    Coordinate 1 is z_1^lam. Coordinates 2..4 are the u-twisted sums of
    z_2^lam, computed without complex numbers by sorting the q^(1/3)-series
    of (z_2 / (729 q^(1/3)))^lam into residue classes of exponents mod 1.
    """
    lam = to_fraction(lam)
    if n_terms < 1:
        raise DomainError("n_terms must be positive")
    c1 = power(z1_series(n_terms + 1), lam).truncate(n_terms)
    unit = eta_quotient([(1, 12), (Fraction(1, 3), -12)], 3 * n_terms + 3).shift(Fraction(-1, 3))
    w = pow_frac(unit, lam)
    scale, pref = _three_power(lam)
    coords = [c1]
    for r in range(3):
        cs = [w.coeffs[m] for m in range(r, 3 * n_terms + r, 3)]
        s = PuiseuxSeries(cs, (lam + r) / 3, 1, QQ, prefactor=pref)
        coords.append(s.scale(scale) if scale is not None else s)
    return tuple(coords)


def gamma03_S(lam, precision_bits: int = DEFAULT_PRECISION, negate: bool = False) -> SMatrix:
    """S-matrix of F(lam) in the coordinates returned by f_family_coordinates."""
    ctx = real_field(precision_bits).ctx
    lam = to_fraction(lam)
    r3 = ctx.sqrt(3)
    two_cos = [2 * ctx.cos(2 * ctx.pi * ctx.mpf(lam.numerator + k * lam.denominator)
                           / (3 * lam.denominator)) for k in range(3)]
    c0, c1, c2 = two_cos
    rows = [[0, r3, r3, r3],
            [r3, c0, c2, c1],
            [r3, c2, c1, c0],
            [r3, c1, c0, c2]]
    sign = -1 if negate else 1
    return SMatrix([[sign * ctx.mpf(x) / 3 for x in row] for row in rows], precision_bits,
                   descriptor=f"{'-' if negate else ''}S_F({fraction_str(lam)})")


@dataclass(frozen=True)
class Gamma03Family:
    lam: Fraction
    exponents: tuple
    coordinates: tuple
    abc: tuple
    reducible: bool

    @property
    def n_terms(self) -> int:
        return min(c.trunc for c in self.coordinates)

    def mlde(self) -> MonicMlde:
        return gamma03_mlde(self.lam)

    def expansion(self) -> CharacterVectorExpansion:
        return CharacterVectorExpansion(self.exponents, self.coordinates)

    def S(self, precision_bits: int = DEFAULT_PRECISION) -> SMatrix:
        return gamma03_S(self.lam, precision_bits)

    def residuals(self) -> list:
        """The MLDE applied to each eta-quotient coordinate (prefactor dropped)."""
        return [mlde_residual(self.mlde(), c.without_prefactor()).series for c in self.coordinates]

    def frobenius_agreement(self, n_terms: int | None = None) -> bool:
        """Each normalized coordinate equals the normalized Frobenius solution at its exponent."""
        n = n_terms or self.n_terms
        ode = theta_from_mlde(self.mlde())
        sols = family_solve(ode, self.exponents, n)
        frob = to_q_expansion(sols, n).normalized()
        return all(a.normalized().truncate(n) == b.truncate(n)
                   for a, b in zip(self.coordinates, frob.coordinates))

    def to_json(self) -> dict:
        return {"lambda": fraction_str(self.lam),
                "reducible": self.reducible,
                "abc": [fraction_str(x) for x in self.abc],
                "expansion": self.expansion().to_json()}


def gamma03_family(lam, n_terms: int) -> Gamma03Family:
    """F(lam) from eta quotients; reducibility is a flag, not an error."""
    lam = to_fraction(lam)
    coords = f_family_coordinates(lam, n_terms)
    return Gamma03Family(lam, gamma03_exponents(lam), coords, gamma03_abc(lam), is_reducible(lam))


def eta_minus4_derivative(s: PuiseuxSeries) -> PuiseuxSeries:
    """eta^-4 * q d/dq s; the weight-0 modular derivative followed by eta^-4."""
    n = s.trunc
    return (eta_quotient([(1, -4)], n + 1) * s.q_derivative()).truncate(n)


def gamma03_G(lam, n_terms: int) -> CharacterVectorExpansion:
    """G(lam) = eta^-4 D_0 F(lam); exponents drop by 1/6 and S becomes -S_F."""
    lam = to_fraction(lam)
    coords = tuple(eta_minus4_derivative(c) for c in f_family_coordinates(lam, n_terms))
    exps = tuple(e - Fraction(1, 6) for e in gamma03_exponents(lam))
    return CharacterVectorExpansion(exps, coords)


# Reference vector at lam = -1/12 listed with exponents (17/36, -7/36, 5/36, -1/12).
H_EXPONENTS = (Fraction(17, 36), Fraction(-7, 36), Fraction(5, 36), Fraction(-1, 12))
H_REFERENCE = ((1, 0, 25, 133, 578, 1970, 6076, 16840),
               (1, 13, 98, 471, 1780, 5765, 16856),
               (1, 13, 73, 338, 1251, 4048, 11838),
               (1, 17, 116, 496, 1817, 5742, 16535))
# coordinate k of H is coordinate H_ORDER[k] of G(-1/12): matched by exponent
H_ORDER = (3, 1, 2, 0)


def h_reference_S(precision_bits: int = DEFAULT_PRECISION) -> SMatrix:
    ctx = real_field(precision_bits).ctx
    c = [2 * ctx.cos(ctx.pi * k / 18) for k in (1, 5, 7)]
    c1, c5, c7 = c
    r3 = ctx.sqrt(3)
    rows = [[c5, -c7, -c1, r3],
            [-c7, -c1, -c5, -r3],
            [-c1, -c5, c7, r3],
            [r3, -r3, r3, 0]]
    return SMatrix([[ctx.mpf(x) / 3 for x in row] for row in rows], precision_bits, "S_H")


def h_reference_expansion() -> CharacterVectorExpansion:
    coords = tuple(PuiseuxSeries(list(cs), e, 1) for cs, e in zip(H_REFERENCE, H_EXPONENTS))
    return CharacterVectorExpansion(H_EXPONENTS, coords, tuple(Fraction(1) for _ in coords))


@dataclass(frozen=True)
class HVector:
    """G(-1/12) reordered to the listed exponent order, with the comparison data."""

    expansion: CharacterVectorExpansion
    S: SMatrix
    reference: CharacterVectorExpansion
    reference_S: SMatrix

    def mismatches(self) -> list:
        """(coordinate, q-power offset, computed, listed) for every differing coefficient."""
        out = []
        for j, (mine, ref) in enumerate(zip(self.expansion.coordinates, self.reference.coordinates)):
            for k, want in enumerate(ref.coeffs):
                got = mine.coefficient(ref.lead_exp + k) if k < mine.trunc else None
                if got != want:
                    out.append((j, k, got, want))
        return out


def gamma03_H(n_terms: int = 8, precision_bits: int = DEFAULT_PRECISION) -> HVector:
    """Leading-1 normalized G(-1/12) in the order of H_EXPONENTS.

    The S-matrix is -S_F(-1/12) conjugated by the signs of the leading
    coefficients, which is the S-matrix in the normalized basis only if all
    leading coefficients share one magnitude; see ``uniform_scale``.
    """
    if n_terms < 8:
        raise DomainError("gamma03_H needs n_terms >= 8")
    lam = Fraction(-1, 12)
    G = gamma03_G(lam, n_terms).permuted(H_ORDER)
    signs = [1 if c.leading_coefficient > 0 else -1 for c in G.coordinates]
    S = gamma03_S(lam, precision_bits, negate=True).permuted(H_ORDER).conjugate_by_signs(signs)
    return HVector(G.normalized(), S, h_reference_expansion(), h_reference_S(precision_bits))


def belyi_residual(n_terms: int) -> PuiseuxSeries:
    """j z^3 - (z + 27)(z + 243)^3 for z = z_1, known up to O(q^n_terms).

    Zero for the degree-4 Belyi map. Both sides start at q^-4, so four
    extra terms are carried.
    """
    if n_terms < 5:
        raise DomainError("belyi_residual needs n_terms >= 5")
    j = j_and_kappa(n_terms + 4)[0].series
    z = z1_series(n_terms + 4)
    z3 = z * z * z
    lhs = j * z3
    rhs = (z + 27) * (z + 243) * (z + 243) * (z + 243)
    return lhs - rhs


def belyi_verify(n_terms: int) -> PuiseuxSeries:
    return belyi_residual(n_terms)


def f1_series(n_terms: int) -> PuiseuxSeries:
    """f_1 = -D(z_1)/z_1, the weight-2 eigenform for Gamma_0(3)."""
    z = z1_series(n_terms)
    return (z.q_derivative() / z).scale(-1).truncate(n_terms)


def f1_riccati_residual(n_terms: int) -> PuiseuxSeries:
    """D(f_1) + f_1^2/4 - E4/12."""
    f = f1_series(n_terms)
    e4 = eisenstein(4, n_terms).series
    df = mod_derivative(WeightedForm(2, f)).series
    return df + (f * f).scale(Fraction(1, 4)) - e4.scale(Fraction(1, 12))


def f1_quartic_residual(n_terms: int) -> PuiseuxSeries:
    """f^4 - (2/3) f^2 E4 - (1/27) E4^2 - (8/27) f E6."""
    f = f1_series(n_terms)
    e4 = eisenstein(4, n_terms).series
    e6 = eisenstein(6, n_terms).series
    f2 = f * f
    return (f2 * f2 - (f2 * e4).scale(Fraction(2, 3)) - (e4 * e4).scale(Fraction(1, 27))
            - (f * e6).scale(Fraction(8, 27)))


# ---------------------------------------------------------------------------
# named instances


def _golden_S(rows, precision_bits: int, name: str) -> SMatrix:
    """(1/4) sqrt(1 + 1/sqrt 5) * rows, rows written in terms of r = sqrt 5."""
    ctx = real_field(precision_bits).ctx
    r = ctx.sqrt(5)
    pref = ctx.sqrt(1 + 1 / r) / 4
    sym = {"2": ctx.mpf(2), "-2": ctx.mpf(-2), "r-1": r - 1, "1-r": 1 - r}
    return SMatrix([[pref * sym[x] for x in row] for row in rows], precision_bits, name)


_HARD_HEXAGON_S = (("2", "-2", "r-1", "1-r"),
                   ("-2", "-2", "r-1", "r-1"),
                   ("r-1", "r-1", "2", "2"),
                   ("1-r", "r-1", "2", "-2"))
_QUASI_S = (("2", "2", "r-1", "r-1"),
            ("2", "-2", "r-1", "1-r"),
            ("r-1", "r-1", "-2", "-2"),
            ("r-1", "1-r", "-2", "2"))
_S1 = (("r-1", "r-1", "2", "2"),
       ("r-1", "1-r", "2", "-2"),
       ("2", "2", "1-r", "1-r"),
       ("2", "-2", "1-r", "r-1"))


def s1_matrix(precision_bits: int = DEFAULT_PRECISION) -> SMatrix:
    return _golden_S(_S1, precision_bits, "S1")


def s2_matrix(precision_bits: int = DEFAULT_PRECISION) -> SMatrix:
    ctx = real_field(precision_bits).ctx
    c = ctx.cos(5 * ctx.pi / 18)
    s = ctx.sqrt(3) * ctx.sin(5 * ctx.pi / 18)
    r3 = ctx.sqrt(3)
    rows = [[-c + s, c + s, 2 * c, r3],
            [c + s, 2 * c, c - s, -r3],
            [2 * c, c - s, -c - s, r3],
            [r3, -r3, r3, ctx.mpf(0)]]
    return SMatrix([[x / 3 for x in row] for row in rows], precision_bits, "S2")


def hard_hexagon_S(precision_bits: int = DEFAULT_PRECISION) -> SMatrix:
    return _golden_S(_HARD_HEXAGON_S, precision_bits, "hard-hexagon")


def quasi_conformal_S(precision_bits: int = DEFAULT_PRECISION) -> SMatrix:
    return _golden_S(_QUASI_S, precision_bits, "rank4-quasi")


def _f(*xs):
    return tuple(Fraction(x) for x in xs)


_INSTANCES = {
    "hard-hexagon": dict(
        exponents=_f("1/40", "31/40", "-1/40", "9/40"),
        rescale=(1, 1, 1, 1),
        reference=((1, 0, 1, 1, 2, 2, 4, 4, 6, 7),
                   (1, 1, 1, 2, 2, 3, 4, 5, 7, 9),
                   (1, 1, 1, 2, 3, 4, 5, 7, 9, 12),
                   (1, 1, 2, 2, 3, 4, 6, 7, 10, 12)),
        S=hard_hexagon_S),
    "rank4-quasi": dict(
        exponents=_f("-41/40", "9/40", "31/40", "41/40"),
        rescale=(1, 492, 22591, 99180),
        reference=((1, 0, 120786, 14632531, 629268246, 15536981160),
                   (492, 466580, 40164912, 1462898532, 32571172112),
                   (22591, 3863061, 193342101, 5227692946, 95716064232),
                   (99180, 11114772, 461579312, 11153566692, 189039000612)),
        S=quasi_conformal_S),
    "table3-row-1": dict(
        exponents=_f("-33/40", "17/40", "23/40", "33/40"),
        rescale=(1, 792, 3366, 14280),
        reference=((1, 99, 50787, 2794770, 70309800, 1134528021),
                   (792, 154088, 6610824, 145807200, 2162364600),
                   (3366, 466752, 17581212, 361184706, 5110157492),
                   (14280, 1252152, 39126384, 721364424, 9486909432)),
        S=s1_matrix),
    "table3-row-2": dict(
        exponents=_f("-37/40", "13/40", "27/40", "37/40"),
        rescale=(1, 592, 11063, 47840),
        reference=((1, 37, 65527, 5306096, 174479457, 3487679200),
                   (592, 223184, 13516544, 383202192, 6974809024),
                   (11063, 1716467, 75169681, 1783793680, 28874814615),
                   (47840, 4779216, 173590384, 3687784672, 55362274160)),
        S=s1_matrix),
    "table3-row-3": dict(
        exponents=_f("-29/36", "31/36", "19/36", "5/12"),
        rescale=(1, 16588, 1595, 1044),
        reference=((1, 58, 29319, 1492282, 35652194, 551508428),
                   (16588, 1295459, 37792162, 661694421, 8340292294),
                   (1595, 230318, 8596093, 173614474, 2409567457),
                   (1044, 195489, 8038422, 171114471, 2458828278)),
        S=s2_matrix),
    "table3-row-4": dict(
        exponents=_f("-29/36", "-5/36", "19/36", "17/12"),
        rescale=(1, 116, 1015, 190269),
        reference=((1, 638, 33959, 1509682, 35709150, 551665608),
                   (116, 18328, 1302999, 37817682, 661768081),
                   (1015, 228114, 8586233, 173587214, 2409491477),
                   (190269, 8017542, 171051831, 2458656018, 26971011288)),
        S=s2_matrix),
}

INSTANCE_NAMES = tuple(_INSTANCES)


@dataclass(frozen=True)
class BuiltinInstance:
    name: str
    exponents: ExponentTuple
    mlde: MonicMlde
    rescale: tuple
    reference: tuple
    S: SMatrix

    def expansion(self, n_terms: int | None = None) -> CharacterVectorExpansion:
        n = n_terms or max(len(r) for r in self.reference)
        ode = theta_from_exponents(4, self.exponents)
        return to_q_expansion(family_solve(ode, self.exponents, n), n, self.rescale)

    def reference_expansion(self) -> CharacterVectorExpansion:
        coords = tuple(PuiseuxSeries(list(r), e, 1) for r, e in zip(self.reference, self.exponents))
        return CharacterVectorExpansion(self.exponents.values, coords, self.rescale)

    def to_json(self) -> dict:
        return {"name": self.name, "exponents": self.exponents.to_json(),
                "mlde": self.mlde.to_json(), "rescale": [fraction_str(r) for r in self.rescale],
                "reference": [[str(c) for c in r] for r in self.reference],
                "S": self.S.to_json()}


def builtin_instance(name: str, precision_bits: int = DEFAULT_PRECISION) -> BuiltinInstance:
    if name not in _INSTANCES:
        raise DomainError(f"unknown instance {name!r}; known: {', '.join(INSTANCE_NAMES)}")
    data = _INSTANCES[name]
    e = ExponentTuple(data["exponents"])
    return BuiltinInstance(name, e, monic_from_exponents(e.values), _f(*data["rescale"]),
                           data["reference"], data["S"](precision_bits))


# ---------------------------------------------------------------------------
# lam-line scans


@dataclass(frozen=True)
class LineVerdict:
    lam: Fraction
    reducible: bool
    integral: bool
    vacuum: int | None
    quasi_conformal: bool
    conformal: bool
    reason: str
    expansion: CharacterVectorExpansion | None = None

    def to_json(self) -> dict:
        out = {"lambda": fraction_str(self.lam), "reducible": self.reducible,
               "integral": self.integral, "vacuum": self.vacuum,
               "quasi_conformal": self.quasi_conformal, "conformal": self.conformal,
               "reason": self.reason}
        if self.expansion is not None:
            out["expansion"] = self.expansion.to_json()
        return out


def uniform_scale(expansion: CharacterVectorExpansion, vacuum: int):
    """Scale every coordinate by +-1/|lead of vacuum|, signs making each lead positive.

    This is the only rescaling that keeps a symmetric S-matrix symmetric
    (it conjugates S by a sign diagonal). Returns (expansion, signs) or None
    if a coordinate carries an irrational prefactor.
    """
    coords = expansion.coordinates
    if any(c.prefactor is not None and c.prefactor.rational_value is None for c in coords):
        return None
    coords = [c.without_prefactor().scale(c.prefactor.rational_value) if c.prefactor else c
              for c in coords]
    lead = to_fraction(coords[vacuum].leading_coefficient)
    signs = [1 if to_fraction(c.leading_coefficient) > 0 else -1 for c in coords]
    scaled = tuple(c.scale(Fraction(s) / abs(lead)) for c, s in zip(coords, signs))
    rescale = tuple(to_fraction(c.leading_coefficient) for c in scaled)
    return CharacterVectorExpansion(expansion.exponents, scaled, rescale), signs


def _line_verdict(lam: Fraction, family: str, n_terms: int, precision_bits: int) -> LineVerdict:
    red = is_reducible(lam)
    if red:
        return LineVerdict(lam, True, False, None, False, False, "reducible monodromy")
    if family == "F":
        exp = gamma03_family(lam, n_terms).expansion()
        S = gamma03_S(lam, precision_bits)
    else:
        exp = gamma03_G(lam, n_terms)
        S = gamma03_S(lam, precision_bits, negate=True)
    for c in exp.coordinates:
        nz = [to_fraction(x) for x in c.coeffs if x != 0]
        if any((x > 0) != (nz[0] > 0) for x in nz):
            return LineVerdict(lam, False, False, None, False, False,
                               f"mixed signs in the coordinate with exponent {c.lead_exp}")
    integral_any = False
    best = None
    for v in range(len(exp)):
        us = uniform_scale(exp, v)
        if us is None:
            return LineVerdict(lam, False, False, None, False, False, "irrational prefactor")
        scaled, signs = us
        ok = all(to_fraction(x).denominator == 1 for c in scaled.coordinates for x in c.coeffs)
        if not ok:
            continue
        integral_any = True
        rep = check_conformal(scaled, exp.exponents, S.conjugate_by_signs(signs), v)
        verdict = LineVerdict(lam, False, True, v, rep.quasi_conformal, bool(rep.conformal),
                              "conformal" if rep.conformal else
                              f"fusion witness {rep.witnesses.get('fusion')}", scaled)
        if rep.conformal:
            return verdict
        if best is None:
            best = verdict
    if best is not None:
        return best
    return LineVerdict(lam, False, integral_any, None, False, False,
                       "no vacuum choice gives integral coefficients")


def gamma03_line_scan(family: str, numerators, denominator: int = 12, n_terms: int = 12,
                      precision_bits: int = DEFAULT_PRECISION) -> list[LineVerdict]:
    """Verdict for each lam = n/denominator along the F or G line."""
    if family not in ("F", "G"):
        raise DomainError("family must be 'F' or 'G'")
    lams = sorted({Fraction(n, denominator) for n in numerators})
    return [_line_verdict(lam, family, n_terms, precision_bits) for lam in lams]


def f_line_numerators() -> list[int]:
    """Odd n in [-8, -1]: 12 lam odd for rationality, lam < 0 and lam > -3/4 for signs."""
    return [n for n in range(-8, 0) if n % 2]


def g_line_numerators() -> list[int]:
    """n in [-7, 7] with n = 1, 5 mod 6."""
    return [n for n in range(-7, 8) if n % 6 in (1, 5)]


def line_survivors(verdicts) -> list[Fraction]:
    return [v.lam for v in verdicts if v.conformal]


# ---------------------------------------------------------------------------
# box scan over rank-4 exponent tuples


@dataclass(frozen=True)
class ScanConfig:
    denominators: tuple = (40,)
    numerator_bounds: tuple = (-60, 60)
    centers: tuple | None = None
    radius: int = 0
    trace: Fraction = Fraction(1)
    n_terms: int = 25
    prescreen_terms: int = 4
    rescale_bound: int = 10**7
    sign_prescreen: bool = True
    denominator_check: bool = True
    denominator_terms: int = 40
    denominator_window: int = 10
    max_tuples: int = 10**6
    workers: int = 1
    targets: tuple = ()

    def __post_init__(self):
        if not self.denominators or any(d <= 0 for d in self.denominators):
            raise DomainError("denominators must be positive")
        if self.n_terms < 2 or self.prescreen_terms < 1 or self.rescale_bound < 1:
            raise DomainError("term budgets and rescale bound must be positive")
        if self.max_tuples < 1 or self.workers < 1 or self.radius < 0:
            raise DomainError("budgets and worker count must be positive")
        lo, hi = self.numerator_bounds
        if lo > hi:
            raise DomainError("empty numerator range")


@dataclass(frozen=True)
class CharacterCandidate:
    exponents: tuple
    vacuum: int
    rescale: tuple
    expansion: CharacterVectorExpansion
    verdicts: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"exponents": [fraction_str(e) for e in self.exponents],
                "vacuum": self.vacuum,
                "rescale": [fraction_str(r) for r in self.rescale],
                "coefficients": [[str(c) for c in s.coeffs] for s in self.expansion.coordinates],
                "verdicts": self.verdicts}


@dataclass(frozen=True)
class ScanResult:
    candidates: list
    tuples_enumerated: int
    tuples_evaluated: int
    budget_exhausted: bool

    def to_json(self) -> dict:
        return {"tuples_enumerated": self.tuples_enumerated,
                "tuples_evaluated": self.tuples_evaluated,
                "budget_exhausted": self.budget_exhausted,
                "candidates": [c.to_json() for c in self.candidates]}


def enumerate_tuples(cfg: ScanConfig):
    """Sorted exponent tuples, distinct mod 1, with the configured trace.

    Order: by denominator, then lexicographic on numerators. A tuple reached
    from several denominators is produced once, at the first of them.
    """
    seen = set()
    lo, hi = cfg.numerator_bounds
    for d in cfg.denominators:
        total = cfg.trace * d
        if total.denominator != 1:
            continue
        total = int(total)
        if cfg.centers is not None:
            ranges = []
            for c in cfg.centers:
                m = to_fraction(c) * d
                if m.denominator != 1:
                    ranges = None
                    break
                ranges.append(range(int(m) - cfg.radius, int(m) + cfg.radius + 1))
            if ranges is None:
                continue
            ranges = [sorted(set().union(*ranges))] * 4
        else:
            ranges = [range(lo, hi + 1)] * 4
        for n1, n2, n3 in product(ranges[0], ranges[1], ranges[2]):
            if not n1 < n2 < n3:
                continue
            n4 = total - n1 - n2 - n3
            if n4 <= n3 or n4 not in ranges[3]:
                continue
            e = tuple(Fraction(n, d) for n in (n1, n2, n3, n4))
            if len({x - math.floor(x) for x in e}) < 4 or e in seen:
                continue
            if cfg.centers is not None and not _near_centers(e, cfg.centers, cfg.radius, d):
                continue
            seen.add(e)
            yield e


def _near_centers(e, centers, radius: int, d: int) -> bool:
    cs = sorted(to_fraction(c) for c in centers)
    return all(abs(a - b) * d <= radius for a, b in zip(e, cs))


def _prescreen(e, cfg: ScanConfig) -> bool:
    ode = theta_from_exponents(4, ExponentTuple(e))
    for x in e:
        cs = normalized_q_coefficients(ode, x, cfg.prescreen_terms)
        if any(to_fraction(c) < 0 for c in cs):
            return False
    return True


def evaluate_tuple(e, cfg: ScanConfig):
    """Full exact check of one tuple; returns a CharacterCandidate or None.

    The vacuum is the coordinate with the smallest exponent and keeps its
    leading 1; every other coordinate takes its smallest integral scale.
    """
    if cfg.sign_prescreen and not _prescreen(e, cfg):
        return None
    et = ExponentTuple(tuple(e))
    ode = theta_from_exponents(4, et)
    try:
        sols = family_solve(ode, et, cfg.n_terms)
    except DomainError:
        return None
    exp = to_q_expansion(sols, cfg.n_terms).normalized()
    vac = min(range(4), key=lambda j: e[j])
    rescale, coords = [], []
    for j, c in enumerate(exp.coordinates):
        if j == vac:
            if any(to_fraction(x).denominator != 1 or x < 0 for x in c.coeffs):
                return None
            rescale.append(Fraction(1))
            coords.append(c)
            continue
        sc = integrality_scale(c, max_scale=cfg.rescale_bound)
        if sc is None:
            return None
        rescale.append(sc.scale)
        coords.append(c.scale(sc.scale))
    if cfg.denominator_check and not _denominators_stable(ode, et, cfg):
        return None
    expansion = CharacterVectorExpansion(tuple(e), tuple(coords), tuple(rescale))
    verdicts = {}
    for name in cfg.targets:
        S = builtin_instance(name).S if name in _INSTANCES else _named_S(name)
        rep = check_quasi_conformal(expansion, e, S, vac)
        verdicts[name] = rep.quasi_conformal
    return CharacterCandidate(tuple(e), vac, tuple(rescale), expansion, verdicts)


def _denominators_stable(ode, et: ExponentTuple, cfg: ScanConfig) -> bool:
    """LCM of the normalized q-coefficient denominators is flat over the last window terms."""
    n = max(cfg.n_terms, cfg.denominator_terms)
    exp = to_q_expansion(family_solve(ode, et, n), n).normalized()
    return all(denominator_profile(c, window=cfg.denominator_window).stabilized for c in exp.coordinates)


def _named_S(name: str) -> SMatrix:
    table = {"S1": s1_matrix, "S2": s2_matrix, "H": h_reference_S}
    if name not in table:
        raise DomainError(f"unknown target S-matrix {name!r}")
    return table[name]()


def _evaluate_chunk(args):
    chunk, cfg = args
    return [evaluate_tuple(e, cfg) for e in chunk]


def rank4_scan(cfg: ScanConfig) -> ScanResult:
    """Exact search for integral rank-4 Frobenius specializations.

    Results are independent of the worker count: tuples are enumerated in a
    fixed order, evaluated in chunks, and merged in that order.
    """
    tuples = []
    exhausted = False
    enumerated = 0
    for e in enumerate_tuples(cfg):
        enumerated += 1
        if len(tuples) >= cfg.max_tuples:
            exhausted = True
            continue
        tuples.append(e)
    if cfg.workers == 1:
        results = [evaluate_tuple(e, cfg) for e in tuples]
    else:
        size = max(1, len(tuples) // (4 * cfg.workers))
        chunks = [(tuples[i:i + size], cfg) for i in range(0, len(tuples), size)]
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = [r for part in pool.map(_evaluate_chunk, chunks) for r in part]
    cands = [r for r in results if r is not None]
    return ScanResult(cands, enumerated, len(tuples), exhausted)


def scan_config_from_mapping(data: dict) -> ScanConfig:
    """ScanConfig from flat string key/value pairs (CLI config files)."""
    kw = {}
    for key, raw in data.items():
        val = str(raw).strip()
        if key == "denominators":
            kw[key] = tuple(int(x) for x in val.split(","))
        elif key in ("numerator_bounds",):
            lo, hi = val.split(",")
            kw[key] = (int(lo), int(hi))
        elif key == "centers":
            kw[key] = tuple(to_fraction(x) for x in val.split(","))
        elif key == "targets":
            kw[key] = tuple(x.strip() for x in val.split(",") if x.strip())
        elif key == "trace":
            kw[key] = to_fraction(val)
        elif key in ("sign_prescreen", "denominator_check"):
            kw[key] = val.lower() in ("1", "true", "yes", "on")
        elif key in ("radius", "n_terms", "denominator_terms", "denominator_window", "prescreen_terms", "rescale_bound", "max_tuples", "workers"):
            kw[key] = int(val)
        else:
            raise DomainError(f"unknown scan setting {key!r}")
    return ScanConfig(**kw)

