"""Rank-2 closed forms: 2F1 series, the symmetrizing scalar X and dim M_0.

Every numeric routine takes ``precision_bits`` explicitly and works in a
private mpmath context, so nothing here depends on global precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .conformal import SMatrix
from .errors import DomainError
from .frobenius import CharacterVectorExpansion
from .rings import DEFAULT_PRECISION, QQ, fraction_str, real_field, to_fraction
from .series import (PuiseuxSeries, WeightedForm, eisenstein, eta_quotient, j_and_kappa,
                     mod_derivative, substitute)


@dataclass(frozen=True)
class Rank2Params:
    """Central charge c and conformal weight h of a two-module theory."""

    c: Fraction
    h: Fraction

    def __post_init__(self):
        object.__setattr__(self, "c", to_fraction(self.c))
        object.__setattr__(self, "h", to_fraction(self.h))
        if self.h.denominator == 1:
            raise DomainError(f"h = {self.h} is an integer; exponents would collide")

    @property
    def e1(self) -> Fraction:
        return -self.c / 24

    @property
    def e2(self) -> Fraction:
        return self.h - self.c / 24

    @property
    def k1(self) -> Fraction:
        return 6 * self.h - self.c / 2 - 1

    @property
    def f1(self) -> Fraction:
        return Fraction(1, 12) - self.h / 2

    @property
    def f2(self) -> Fraction:
        return Fraction(1, 12) + self.h / 2

    @classmethod
    def from_k1(cls, h, k1: int) -> Rank2Params:
        """The central charge determined by h and the minimal weight."""
        h = to_fraction(h)
        return cls(2 * (6 * h - 1 - k1), h)


def pochhammer(x, n: int):
    out = x - x + 1
    for i in range(n):
        out = out * (x + i)
    return out


def hyp2f1(a, b, c, n_terms: int, ring=QQ) -> PuiseuxSeries:
    """sum (a)_n (b)_n / ((c)_n n!) K^n with n_terms exact terms."""
    a, b, c = (ring.coerce(to_fraction(x)) if isinstance(x, (int, Fraction, str)) else x
               for x in (a, b, c))
    out = [ring.one]
    term = ring.one
    for n in range(1, n_terms):
        den = (c + (n - 1)) * n
        if den == 0:
            raise DomainError(f"Pochhammer symbol (c)_{n} vanishes for c = {c}")
        term = term * (a + (n - 1)) * (b + (n - 1)) / den
        out.append(term)
    return PuiseuxSeries(out, 0, 1, ring, _normalized=True)


def _mp(ctx, x):
    if isinstance(x, ctx.mpf):
        return x
    x = to_fraction(x)
    return ctx.mpf(x.numerator) / x.denominator


def gamma_fn(x, precision_bits: int = DEFAULT_PRECISION):
    """Gamma(x) at the requested binary precision; poles raise DomainError."""
    ctx = real_field(precision_bits).ctx
    if isinstance(x, (int, Fraction, str)):
        fx = to_fraction(x)
        if fx <= 0 and fx.denominator == 1:
            raise DomainError(f"Gamma has a pole at {fx}")
    xv = _mp(ctx, x)
    if xv <= 0 and ctx.isint(xv):
        raise DomainError(f"Gamma has a pole at {xv}")
    return ctx.gamma(xv)


def _sinpi(ctx, x):
    return ctx.sinpi(_mp(ctx, x))


def rank2_X_theorem(p: Rank2Params, precision_bits: int = DEFAULT_PRECISION):
    """X from the Gamma-quotient in the eta-stripped exponents f1, f2."""
    ctx = real_field(precision_bits).ctx
    f1, f2 = p.f1, p.f2
    g = lambda x: gamma_fn(x, precision_bits)  # noqa: E731
    ratio = (g(f1 - f2) * g(1 - f1) * g(Fraction(2, 3) - f1)) / (
        g(f2 - f1) * g(1 - f2) * g(Fraction(2, 3) - f2))
    den = _sinpi(ctx, f2) * _sinpi(ctx, f2 + Fraction(1, 3))
    if den == 0:
        raise DomainError(f"radicand of X has a zero denominator at h = {p.h}")
    rad = -_sinpi(ctx, f1) * _sinpi(ctx, f1 + Fraction(1, 3)) / den
    if rad <= 0:
        raise DomainError(f"radicand of X is not positive at h = {p.h}")
    return ratio * ctx.sqrt(rad)


def _trig_factor(p: Rank2Params, ctx):
    num = _sinpi(ctx, p.h - Fraction(1, 6))
    den = _sinpi(ctx, p.h + Fraction(1, 6))
    if den == 0 or num == 0:
        raise DomainError(f"zero radicand in X at h = {p.h}")
    rad = num / den
    if rad < 0:
        raise DomainError(f"negative radicand in X at h = {p.h}")
    return ctx.sqrt(rad)


def rank2_X_simplified(p: Rank2Params, precision_bits: int = DEFAULT_PRECISION):
    """X = 4^-h Gamma(-h) Gamma(5/6+h) / (Gamma(h) Gamma(5/6-h)) * trig factor."""
    ctx = real_field(precision_bits).ctx
    h = p.h
    g = lambda x: gamma_fn(x, precision_bits)  # noqa: E731
    four = ctx.power(4, -_mp(ctx, h))
    return four * g(-h) * g(Fraction(5, 6) + h) / (g(h) * g(Fraction(5, 6) - h)) * _trig_factor(p, ctx)


def gauss_2f1_at_one(a, b, c, precision_bits: int = DEFAULT_PRECISION):
    """2F1(a, b; c; 1) by direct summation with Levin acceleration (needs c - a - b > 0)."""
    a, b, c = to_fraction(a), to_fraction(b), to_fraction(c)
    if c - a - b <= 0:
        raise DomainError("2F1 at 1 diverges unless c - a - b > 0")
    if c <= 0 and c.denominator == 1:
        raise DomainError(f"Pochhammer symbol of c = {c} vanishes")
    ctx = real_field(precision_bits).ctx
    am, bm, cm = _mp(ctx, a), _mp(ctx, b), _mp(ctx, c)

    def term(n):
        n = int(n)
        return ctx.rf(am, n) * ctx.rf(bm, n) / (ctx.rf(cm, n) * ctx.factorial(n))

    return ctx.nsum(term, [0, ctx.inf], method="levin")


def rank2_X_gauss(p: Rank2Params, precision_bits: int = DEFAULT_PRECISION):
    """X = 4^-h 2F1(-2h, -5/6; -h; 1) * trig factor, valid for h > -5/6."""
    if p.h <= Fraction(-5, 6):
        raise DomainError("the 2F1(1) rewriting needs h > -5/6")
    ctx = real_field(precision_bits).ctx
    s = gauss_2f1_at_one(-2 * p.h, Fraction(-5, 6), -p.h, precision_bits)
    return ctx.power(4, -_mp(ctx, p.h)) * s * _trig_factor(p, ctx)


def rank2_X(p: Rank2Params, sign: int = 1, precision_bits: int = DEFAULT_PRECISION):
    """sign * |X|, after checking that the two closed forms agree in magnitude."""
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    ctx = real_field(precision_bits).ctx
    a = rank2_X_theorem(p, precision_bits)
    b = rank2_X_simplified(p, precision_bits)
    tol = ctx.ldexp(1, -(precision_bits // 2))
    if abs(abs(a) - abs(b)) > tol * abs(b):
        raise DomainError(f"closed forms of X disagree at h = {p.h}: {a} vs {b}")
    return sign * abs(b)


@dataclass(frozen=True)
class DimM0:
    c: Fraction
    h: Fraction
    k1: int
    value: object
    integral: bool
    rounded: int
    precision_bits: int

    def to_json(self) -> dict:
        ctx = real_field(self.precision_bits).ctx
        digits = int(self.precision_bits * 0.30103) - 2
        return {"c": fraction_str(self.c), "h": fraction_str(self.h), "k1": self.k1,
                "value": ctx.nstr(self.value, 30, strip_zeros=False, min_fixed=-30, max_fixed=digits),
                "integral": self.integral, "rounded": self.rounded,
                "precision_bits": self.precision_bits}


INTEGRALITY_TOL = Fraction(1, 10**6)


def _dim_factor(p: Rank2Params) -> Fraction:
    k1 = p.k1
    if k1 not in (0, -2, -4):
        raise DomainError(f"not extremal: k1 = {k1} is outside {{0, -2, -4}}")
    if k1 == -2:
        return (1 + 6 * p.h) / (1 - 6 * p.h)
    return Fraction(1)


def dim_M0(p: Rank2Params, precision_bits: int = DEFAULT_PRECISION) -> DimM0:
    """dim M_0 = 1728^h X (times (1+6h)/(1-6h) when k1 = -2), sign chosen positive."""
    factor = _dim_factor(p)
    ctx = real_field(precision_bits).ctx
    x = rank2_X(p, 1, precision_bits)
    value = abs(_mp(ctx, factor) * ctx.power(1728, _mp(ctx, p.h)) * x)
    rounded = int(ctx.nint(value))
    integral = abs(value - rounded) < _mp(ctx, INTEGRALITY_TOL)
    return DimM0(p.c, p.h, int(p.k1), value, bool(integral), rounded, precision_bits)


def rank2_S(e1, e2, sign: int = 1, precision_bits: int = DEFAULT_PRECISION):
    """Symmetric S-matrix and diagonal T for exponents (e1, e2).

    Returns (SMatrix, [exp(2 pi i e1), exp(2 pi i e2)]).
    """
    e1, e2 = to_fraction(e1), to_fraction(e2)
    for v, name in ((e1, "e1"), (e2, "e2"), (e1 - e2, "e1 - e2")):
        if v.denominator == 1:
            raise DomainError(f"degenerate exponents: {name} = {v} is an integer")
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    ctx = real_field(precision_bits).ctx
    two_pi_i = 2 * ctx.pi * ctx.j
    pref = 1 / (ctx.exp(two_pi_i * _mp(ctx, 2 * e1 + e2)) - ctx.exp(two_pi_i * _mp(ctx, e1 + 2 * e2)))
    tol = ctx.ldexp(1, -(precision_bits - 16))
    if abs(ctx.im(pref)) > tol * abs(pref):
        raise DomainError(f"S-matrix is not real for exponents ({e1}, {e2}); "
                          "need e1 + e2 = 1/6 mod 1/3")
    rad = 1 - 2 * ctx.cospi(2 * _mp(ctx, e1 - e2))
    if rad < 0:
        raise DomainError(f"sqrt(1 - 2 cos(2 pi (e1 - e2))) is imaginary for e1 - e2 = {e1 - e2}")
    pr = ctx.re(pref)
    r = ctx.sqrt(rad) * sign
    entries = [[pr, pr * r], [pr * r, -pr]]
    S = SMatrix(entries, precision_bits)
    T = [ctx.exp(two_pi_i * _mp(ctx, e1)), ctx.exp(two_pi_i * _mp(ctx, e2))]
    return S, T


@dataclass(frozen=True)
class Rank2Character:
    expansion: CharacterVectorExpansion
    dim: DimM0
    exact_integral: bool


def _hyp_q_series(f, other, n_terms: int) -> PuiseuxSeries:
    """Leading-1 q-series of K^f 2F1(f, f + 1/3; f - other + 1; K)."""
    outer = hyp2f1(f, f + Fraction(1, 3), f - other + 1, n_terms).shift(f)
    kappa = j_and_kappa(n_terms)[1].series
    return substitute(outer, kappa, n_terms).normalized()


def rank2_extremal_character(p: Rank2Params, n_terms: int,
                             precision_bits: int = DEFAULT_PRECISION) -> Rank2Character:
    """The extremal character vector for k1 in {0, -2, -4}.

    Coordinate 1 is normalized to leading coefficient 1. Coordinate 2 is the
    normalized second solution times round(dim M_0) when that number is a
    positive integer; otherwise it is left with leading coefficient 1. ``exact_integral``
    says whether the integer-scaled second coordinate has integral
    coefficients through n_terms terms.
    """
    dim = dim_M0(p, precision_bits)
    k1 = int(p.k1)
    f1, f2 = p.f1, p.f2
    pair = [_hyp_q_series(f1, f2, n_terms + 1), _hyp_q_series(f2, f1, n_terms + 1)]
    if k1 == 0:
        coords = [s.truncate(n_terms) for s in pair]
    elif k1 == -2:
        eta = eta_quotient([(1, -4)], n_terms + 1)
        coords = [(eta * mod_derivative(WeightedForm(0, s)).series).truncate(n_terms).normalized()
                  for s in pair]
    else:
        eta = eta_quotient([(1, -8)], n_terms + 1)
        e4 = eisenstein(4, n_terms + 1).series
        coords = [(e4 * eta * s).truncate(n_terms).normalized() for s in pair]
    second = coords[1]
    exact = False
    scaled = dim.integral and dim.rounded > 0
    if scaled:
        second = second.scale(dim.rounded)
        exact = all(to_fraction(c).denominator == 1 for c in second.coeffs)
    exps = (p.e1, p.e2)
    rescale = (Fraction(1), Fraction(dim.rounded) if scaled else Fraction(1))
    exp = CharacterVectorExpansion(exps, (coords[0], second), rescale)
    return Rank2Character(exp, dim, exact)
