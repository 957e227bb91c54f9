"""Truncated Puiseux series in q (or K) with exact coefficients.

A :class:`PuiseuxSeries` stores ``q^lead * sum_n coeffs[n] q^(n*step)`` and
knows how many of its terms are valid: everything at or above
``precision = lead + step*len(coeffs)`` is unknown, and asking for it raises
:class:`~vvmf.errors.TruncationError`. Binary operations keep the smaller
valid range, so a result is never padded with zeros it has not earned.

Irrational constants such as ``1728^(1/40)`` are kept out of the
coefficients as a :class:`Prefactor`, so the stored coefficients stay in the
exact ring.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import DomainError, RingMismatchError, TruncationError
from .rings import QQ, Ring, fraction_str, to_fraction


def frac_gcd(a: Fraction, b: Fraction) -> Fraction:
    """Largest rational g with a/g and b/g both integers (gcd(0, b) = |b|)."""
    a, b = to_fraction(a), to_fraction(b)
    num = math.gcd(a.numerator * b.denominator, b.numerator * a.denominator)
    return Fraction(num, a.denominator * b.denominator)


def _is_integer(x: Fraction) -> bool:
    return x.denominator == 1


def _integer_root(n: int, k: int) -> int | None:
    """Exact k-th root of a nonnegative integer, or None."""
    if n < 0:
        return None
    if n in (0, 1):
        return n
    r = round(n ** (1.0 / k))
    for c in (r - 1, r, r + 1):
        if c >= 0 and c**k == n:
            return c
    # float rounding can be far off for huge n; fall back to bisection
    lo, hi = 0, 1 << (n.bit_length() // k + 1)
    while lo < hi:
        mid = (lo + hi) // 2
        if mid**k < n:
            lo = mid + 1
        else:
            hi = mid
    return lo if lo**k == n else None


def rational_power(base: Fraction, e: Fraction) -> Fraction | None:
    """base**e when it is rational, else None."""
    base, e = to_fraction(base), to_fraction(e)
    if base == 0:
        return Fraction(0) if e > 0 else None
    if _is_integer(e):
        return base ** int(e)
    if base < 0:
        return None
    n = _integer_root(base.numerator, e.denominator)
    d = _integer_root(base.denominator, e.denominator)
    if n is None or d is None:
        return None
    return Fraction(n, d) ** e.numerator


@dataclass(frozen=True)
class Prefactor:
    """The constant ``base**exp`` with positive rational base."""

    base: Fraction
    exp: Fraction

    def __post_init__(self):
        object.__setattr__(self, "base", to_fraction(self.base))
        object.__setattr__(self, "exp", to_fraction(self.exp))
        if self.base <= 0:
            raise DomainError("prefactor base must be positive")

    def rational_value(self) -> Fraction | None:
        return rational_power(self.base, self.exp)

    def evaluate(self, ctx):
        """Numeric value in an mpmath context."""
        return ctx.power(ctx.mpf(self.base.numerator) / self.base.denominator,
                         ctx.mpf(self.exp.numerator) / self.exp.denominator)

    def to_json(self) -> dict:
        b = self.base
        return {"base": int(b) if b.denominator == 1 else fraction_str(b),
                "exp": fraction_str(self.exp)}

    def __str__(self):
        return f"{fraction_str(self.base)}^({fraction_str(self.exp)})"


def _combine_prefactors(a: Prefactor | None, b: Prefactor | None):
    """Product of two prefactors as (prefactor or None, rational factor)."""
    if a is None:
        return b, Fraction(1)
    if b is None:
        return a, Fraction(1)
    if a.base == b.base:
        p = Prefactor(a.base, a.exp + b.exp)
        return _simplify_prefactor(p)
    ra, rb = a.rational_value(), b.rational_value()
    if ra is not None:
        return b, ra
    if rb is not None:
        return a, rb
    raise DomainError(f"cannot combine prefactors {a} and {b} with different bases")


def _simplify_prefactor(p: Prefactor | None):
    if p is None:
        return None, Fraction(1)
    if p.exp == 0:
        return None, Fraction(1)
    r = p.rational_value()
    if r is not None:
        return None, r
    return p, Fraction(1)


class PuiseuxSeries:
    """Immutable truncated series ``prefactor * q^lead * sum c_n q^(n*step)``."""

    __slots__ = ("ring", "lead_exp", "step", "coeffs", "prefactor")

    def __init__(self, coeffs, lead_exp=0, step=1, ring: Ring = QQ,
                 prefactor: Prefactor | None = None, _normalized: bool = False):
        step = to_fraction(step)
        if step <= 0:
            raise DomainError("series step must be positive")
        lead_exp = to_fraction(lead_exp)
        if not _normalized:
            coeffs = tuple(ring.coerce(c) for c in coeffs)
        else:
            coeffs = tuple(coeffs)
        # strip leading zeros unless everything is zero
        k = 0
        while k < len(coeffs) and coeffs[k] == 0:
            k += 1
        if 0 < k < len(coeffs):
            coeffs = coeffs[k:]
            lead_exp += k * step
        prefactor, r = _simplify_prefactor(prefactor)
        if r != 1:
            rr = ring.coerce(r)
            coeffs = tuple(c * rr for c in coeffs)
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "lead_exp", lead_exp)
        object.__setattr__(self, "step", step)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "prefactor", prefactor)

    def __setattr__(self, name, value):
        raise AttributeError("PuiseuxSeries is immutable")

    def __reduce__(self):
        return (PuiseuxSeries, (self.coeffs, self.lead_exp, self.step, self.ring, self.prefactor, True))

    # construction helpers

    @classmethod
    def zero(cls, precision, step=1, ring: Ring = QQ):
        """The zero series known up to (not including) q^precision."""
        return cls((), lead_exp=precision, step=step, ring=ring)

    @classmethod
    def monomial(cls, exp, n_terms: int, coeff=1, step=1, ring: Ring = QQ):
        """coeff * q^exp with n_terms valid terms on the given grid."""
        if n_terms < 1:
            raise DomainError("n_terms must be positive")
        c = ring.coerce(coeff)
        return cls((c,) + (ring.zero,) * (n_terms - 1), lead_exp=exp, step=step, ring=ring)

    @classmethod
    def one(cls, n_terms: int, step=1, ring: Ring = QQ):
        return cls.monomial(0, n_terms, 1, step, ring)

    # basic accessors

    @property
    def trunc(self) -> int:
        return len(self.coeffs)

    @property
    def precision(self) -> Fraction:
        return self.lead_exp + self.step * len(self.coeffs)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    @property
    def leading_coefficient(self):
        if not self.coeffs or self.coeffs[0] == 0:
            raise DomainError("zero series has no leading coefficient")
        return self.coeffs[0]

    def exponents(self):
        return [self.lead_exp + n * self.step for n in range(len(self.coeffs))]

    def terms(self):
        """(exponent, coefficient) pairs of the stored terms."""
        return list(zip(self.exponents(), self.coeffs))

    def coefficient(self, exp):
        """Coefficient of q^exp (prefactor excluded)."""
        exp = to_fraction(exp)
        if exp >= self.precision:
            raise TruncationError(f"q^{fraction_str(exp)} is beyond the known precision "
                                  f"O(q^{fraction_str(self.precision)})")
        if exp < self.lead_exp:
            return self.ring.zero
        n = (exp - self.lead_exp) / self.step
        if not _is_integer(n):
            return self.ring.zero
        return self.coeffs[int(n)]

    __getitem__ = coefficient

    # shape changes

    def refine(self, step) -> PuiseuxSeries:
        """Same series on the finer grid ``step`` (which must divide the current step)."""
        step = to_fraction(step)
        ratio = self.step / step
        if not _is_integer(ratio):
            raise DomainError(f"step {step} does not divide {self.step}")
        r = int(ratio)
        if r == 1:
            return self
        z = self.ring.zero
        out = []
        for c in self.coeffs:
            out.append(c)
            out.extend([z] * (r - 1))
        return PuiseuxSeries(out, self.lead_exp, step, self.ring, self.prefactor, _normalized=True)

    def coarsen(self) -> PuiseuxSeries:
        """Largest step that still represents the stored terms and precision."""
        g = self.step * len(self.coeffs) if self.coeffs else self.step
        for n, c in enumerate(self.coeffs):
            if c != 0:
                g = frac_gcd(g, n * self.step)
        if g == 0 or not _is_integer(g / self.step):
            return self
        r = int(g / self.step)
        if r <= 1:
            return self
        return PuiseuxSeries(self.coeffs[::r], self.lead_exp, g, self.ring,
                             self.prefactor, _normalized=True)

    def truncate(self, n_terms: int) -> PuiseuxSeries:
        """First n_terms stored terms."""
        if n_terms > len(self.coeffs):
            raise TruncationError(f"only {len(self.coeffs)} valid terms, {n_terms} requested")
        return PuiseuxSeries(self.coeffs[:n_terms], self.lead_exp, self.step, self.ring,
                             self.prefactor, _normalized=True)

    def truncate_to(self, precision) -> PuiseuxSeries:
        """Drop every term at or above q^precision."""
        precision = to_fraction(precision)
        if precision > self.precision:
            raise TruncationError(f"precision O(q^{fraction_str(self.precision)}) "
                                  f"is below requested O(q^{fraction_str(precision)})")
        n = math.ceil((precision - self.lead_exp) / self.step)
        if n < 0:
            return PuiseuxSeries.zero(precision, self.step, self.ring)
        return self.truncate(n) if n < len(self.coeffs) else self

    def _with(self, coeffs, lead_exp=None, step=None, prefactor="keep"):
        return PuiseuxSeries(coeffs, self.lead_exp if lead_exp is None else lead_exp,
                             self.step if step is None else step, self.ring,
                             self.prefactor if prefactor == "keep" else prefactor,
                             _normalized=True)

    def without_prefactor(self) -> PuiseuxSeries:
        return self._with(self.coeffs, prefactor=None)

    def with_prefactor(self, prefactor: Prefactor | None) -> PuiseuxSeries:
        return self._with(self.coeffs, prefactor=prefactor)

    def shift(self, exp) -> PuiseuxSeries:
        """Multiply by q^exp."""
        return self._with(self.coeffs, lead_exp=self.lead_exp + to_fraction(exp))

    def map_coeffs(self, fn, ring: Ring | None = None) -> PuiseuxSeries:
        ring = ring or self.ring
        return PuiseuxSeries([fn(c) for c in self.coeffs], self.lead_exp, self.step,
                             ring, self.prefactor)

    def normalized(self) -> PuiseuxSeries:
        """Rescaled so the leading stored coefficient is 1, prefactor dropped."""
        c = self.leading_coefficient
        return self._with([x / c for x in self.coeffs], prefactor=None)

    # arithmetic

    def _check_ring(self, other: PuiseuxSeries):
        if other.ring is not self.ring:
            raise RingMismatchError(f"cannot combine series over {self.ring} and {other.ring}")

    def _scalar(self, x):
        return self.ring.coerce(x)

    def _aligned(self, other: PuiseuxSeries):
        self._check_ring(other)
        g = frac_gcd(frac_gcd(self.step, other.step), self.lead_exp - other.lead_exp)
        return self.refine(g), other.refine(g), g

    def __add__(self, other):
        if not isinstance(other, PuiseuxSeries):
            return self + self._constant_like(other)
        if self.prefactor != other.prefactor:
            if self.is_zero():
                return other.truncate_to(min(self.precision, other.precision))
            if other.is_zero():
                return self.truncate_to(min(self.precision, other.precision))
            raise DomainError(f"cannot add series with prefactors {self.prefactor} "
                              f"and {other.prefactor}")
        a, b, g = self._aligned(other)
        lead = min(a.lead_exp, b.lead_exp)
        prec = min(a.precision, b.precision)
        n = int((prec - lead) / g)
        z = self.ring.zero
        out = [z] * max(n, 0)
        for s in (a, b):
            off = int((s.lead_exp - lead) / g)
            for i, c in enumerate(s.coeffs):
                j = i + off
                if j >= n:
                    break
                out[j] = out[j] + c
        if n <= 0:
            return PuiseuxSeries.zero(prec, g, self.ring)
        return PuiseuxSeries(out, lead, g, self.ring, self.prefactor, _normalized=True)

    __radd__ = __add__

    def __neg__(self):
        return self._with([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def _constant_like(self, x):
        """Constant x valid to this series' precision (for adding scalars)."""
        if self.prefactor is not None:
            raise DomainError("cannot add a bare scalar to a series carrying a prefactor")
        x = self.ring.coerce(x)
        prec = self.precision
        if prec <= 0:
            return PuiseuxSeries.zero(prec, self.step, self.ring)
        g = frac_gcd(self.step, self.lead_exp)
        n = math.ceil(prec / g)
        return PuiseuxSeries([x] + [self.ring.zero] * (n - 1), 0, g, self.ring,
                             _normalized=True).truncate_to(prec)

    def scale(self, x) -> PuiseuxSeries:
        x = self._scalar(x)
        return self._with([c * x for c in self.coeffs])

    def __mul__(self, other):
        if not isinstance(other, PuiseuxSeries):
            return self.scale(other)
        self._check_ring(other)
        pref, r = _combine_prefactors(self.prefactor, other.prefactor)
        g = frac_gcd(self.step, other.step)
        a, b = self.refine(g), other.refine(g)
        n = min(len(a.coeffs), len(b.coeffs))
        lead = a.lead_exp + b.lead_exp
        z = self.ring.zero
        ac, bc = a.coeffs, b.coeffs
        out = []
        for k in range(n):
            s = z
            for i in range(k + 1):
                x = ac[i]
                if x != 0:
                    y = bc[k - i]
                    if y != 0:
                        s = s + x * y
            out.append(s)
        if r != 1:
            rr = self.ring.coerce(r)
            out = [c * rr for c in out]
        if not out:
            return PuiseuxSeries.zero(lead, g, self.ring)
        return PuiseuxSeries(out, lead, g, self.ring, pref, _normalized=True)

    __rmul__ = __mul__

    def inverse(self) -> PuiseuxSeries:
        """1/self; the leading coefficient must be nonzero."""
        c0 = self.leading_coefficient
        inv0 = self.ring.one / c0
        f = self.coeffs
        g = [inv0]
        for n in range(1, len(f)):
            s = self.ring.zero
            for k in range(1, n + 1):
                if f[k] != 0:
                    s = s + f[k] * g[n - k]
            g.append(-s * inv0)
        pref = None
        if self.prefactor is not None:
            pref = Prefactor(self.prefactor.base, -self.prefactor.exp)
        return PuiseuxSeries(g, -self.lead_exp, self.step, self.ring, pref, _normalized=True)

    def __truediv__(self, other):
        if isinstance(other, PuiseuxSeries):
            return self * other.inverse()
        return self.scale(self.ring.one / self._scalar(other))

    def __rtruediv__(self, other):
        return self.inverse().scale(other)

    def __pow__(self, e):
        return power(self, e)

    def q_derivative(self) -> PuiseuxSeries:
        """q d/dq (prefactor is a constant and passes through)."""
        R = self.ring
        return self._with([c * R.coerce(self.lead_exp + n * self.step)
                           for n, c in enumerate(self.coeffs)])

    # comparison

    def __eq__(self, other):
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        if other.ring is not self.ring or self.prefactor != other.prefactor:
            return False
        if self.precision != other.precision:
            return False
        d = self - other
        return d.is_zero()

    __hash__ = None

    def agrees_with(self, other: PuiseuxSeries, upto=None) -> bool:
        """Coefficientwise equality below min(precisions) (or below ``upto``)."""
        prec = min(self.precision, other.precision)
        if upto is not None:
            upto = to_fraction(upto)
            if upto > prec:
                raise TruncationError(f"cannot compare up to q^{upto}; known to q^{prec}")
            prec = upto
        if self.prefactor != other.prefactor:
            return False
        return (self.truncate_to(prec) - other.truncate_to(prec)).is_zero()

    def __repr__(self):
        parts = []
        for e, c in self.terms()[:8]:
            if c == 0:
                continue
            parts.append(f"{self.ring.to_str(c)}*q^{fraction_str(e)}")
        body = " + ".join(parts) if parts else "0"
        pre = f"{self.prefactor}*" if self.prefactor else ""
        return f"{pre}({body} + O(q^{fraction_str(self.precision)}))"

    # serialization

    def to_json(self) -> dict:
        return {"lead_exp": fraction_str(self.lead_exp),
                "step": fraction_str(self.step),
                "prefactor": self.prefactor.to_json() if self.prefactor else None,
                "coeffs": [self.ring.to_str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, data: dict, ring: Ring = QQ) -> PuiseuxSeries:
        pref = data.get("prefactor")
        pref = Prefactor(to_fraction(str(pref["base"])), to_fraction(pref["exp"])) if pref else None
        return cls([ring.parse(c) for c in data["coeffs"]], to_fraction(data["lead_exp"]),
                   to_fraction(data["step"]), ring, pref)


def _miller_power(f, e, ring: Ring):
    """Coefficients of (sum f_n x^n)^e for f_0 = 1 (e any ring element)."""
    e = ring.coerce(e)
    g = [ring.one]
    n_terms = len(f)
    one = ring.one
    for n in range(1, n_terms):
        s = ring.zero
        for k in range(1, n + 1):
            if f[k] != 0:
                s = s + ((e + one) * ring.coerce(k) - ring.coerce(n)) * f[k] * g[n - k]
        g.append(s / ring.coerce(n))
    return g


def pow_frac(s: PuiseuxSeries, e) -> PuiseuxSeries:
    """s**e for a series whose leading coefficient is exactly 1.

    ``e`` may be rational, or any element of the coefficient ring as long as
    the series starts at q^0 (so no symbolic exponent leaks into lead_exp).
    """
    if s.is_zero():
        raise DomainError("cannot take a fractional power of the zero series")
    if s.coeffs[0] != s.ring.one:
        raise DomainError("non-unital base: leading coefficient must be 1")
    if isinstance(e, (int, Fraction)) and not isinstance(e, bool):
        e = to_fraction(e)
        lead = s.lead_exp * e
        pref = None
        if s.prefactor is not None:
            pref = Prefactor(s.prefactor.base, s.prefactor.exp * e)
    else:
        if s.lead_exp != 0 or s.prefactor is not None:
            raise DomainError("a symbolic exponent needs a series starting at q^0")
        lead, pref = Fraction(0), None
    g = _miller_power(s.coeffs, e, s.ring)
    return PuiseuxSeries(g, lead, s.step, s.ring, pref, _normalized=True)


def power(s: PuiseuxSeries, e) -> PuiseuxSeries:
    """s**e allowing any nonzero leading coefficient.

    For integer e the leading coefficient is raised exactly. For fractional e
    a positive rational leading coefficient c becomes the prefactor c^e
    (folded back in when c^e happens to be rational).
    """
    e = to_fraction(e)
    if e == 0:
        return PuiseuxSeries.one(max(s.trunc, 1), s.step, s.ring)
    if e == 1:
        return s
    if e == -1:
        return s.inverse()
    c = s.leading_coefficient
    unit = s.normalized()
    out = pow_frac(unit, e)
    pref = None
    if s.prefactor is not None:
        pref = Prefactor(s.prefactor.base, s.prefactor.exp * e)
    if _is_integer(e):
        return out.scale(c ** int(e)).with_prefactor(pref)
    if c != s.ring.one:
        if s.ring is not QQ:
            raise DomainError("fractional powers with a non-unit leading coefficient need exact rationals")
        if c <= 0:
            raise DomainError(f"fractional power of negative leading coefficient {c}")
        pref, r = _combine_prefactors(Prefactor(c, e), pref)
        out = out.scale(r)
    return out.with_prefactor(pref)


def substitute(outer: PuiseuxSeries, inner: PuiseuxSeries, n_terms: int | None = None) -> PuiseuxSeries:
    """outer(inner): the series ``sum c_n K^(lead + n step)`` with K := inner.

    Fractional powers of ``inner`` go through :func:`power`; a prefactor is
    allowed only on the overall ``inner**lead`` factor.
    """
    if inner.is_zero() or inner.lead_exp <= 0:
        raise DomainError("composition diverges at cusp: inner series must have positive valuation")
    if outer.ring is not inner.ring:
        raise RingMismatchError("outer and inner series live over different rings")
    head = power(inner, outer.lead_exp)
    w = power(inner, outer.step)
    if w.prefactor is not None:
        raise DomainError("inner**step has an irrational leading constant; cannot sum the series")
    # Horner in w, with the unknown tail O(w^N) accounted for below
    R = outer.ring
    c = outer.coeffs
    if not c:
        raise TruncationError("outer series has no valid terms")
    acc = PuiseuxSeries.one(inner.trunc, inner.step, R).scale(c[-1])
    for coef in reversed(c[:-1]):
        acc = acc * w + coef
    result = head * acc
    tail = inner.lead_exp * (outer.lead_exp + outer.step * len(c))
    prec = min(result.precision, tail)
    result = result.truncate_to(prec)
    if n_terms is not None:
        result = result.truncate(n_terms)
    return result


# classical modular objects

BERNOULLI = {2: Fraction(1, 6), 4: Fraction(-1, 30), 6: Fraction(1, 42)}


def divisor_sigma_table(power_: int, n_max: int) -> list[int]:
    """sigma_power(n) for 0 <= n <= n_max (index 0 unused, set to 0)."""
    sig = [0] * (n_max + 1)
    for d in range(1, n_max + 1):
        dp = d**power_
        for m in range(d, n_max + 1, d):
            sig[m] += dp
    return sig


@dataclass(frozen=True)
class WeightedForm:
    """A q-series tagged with its modular weight."""

    weight: int
    series: PuiseuxSeries
    tag: str | None = None

    def __mul__(self, other):
        if isinstance(other, WeightedForm):
            tag = f"{self.tag}*{other.tag}" if self.tag and other.tag else None
            return WeightedForm(self.weight + other.weight, self.series * other.series, tag)
        return WeightedForm(self.weight, self.series * other, None)

    __rmul__ = __mul__

    def __add__(self, other):
        if not isinstance(other, WeightedForm):
            raise TypeError("can only add weighted forms to weighted forms")
        if other.weight != self.weight:
            raise DomainError(f"cannot add forms of weights {self.weight} and {other.weight}")
        return WeightedForm(self.weight, self.series + other.series)

    def __neg__(self):
        return WeightedForm(self.weight, -self.series, None)

    def __sub__(self, other):
        return self + (-other)

    def __pow__(self, n: int):
        return WeightedForm(self.weight * n, power(self.series, n),
                            f"{self.tag}^{n}" if self.tag else None)

    def truncate(self, n_terms: int):
        return WeightedForm(self.weight, self.series.truncate(n_terms), self.tag)


@lru_cache(maxsize=64)
def _eisenstein_cached(k: int, n_terms: int, ring: Ring) -> WeightedForm:
    factor = -2 * k / BERNOULLI[k]
    sig = divisor_sigma_table(k - 1, n_terms)
    coeffs = [1] + [factor * sig[n] for n in range(1, n_terms)]
    return WeightedForm(k, PuiseuxSeries(coeffs[:n_terms], 0, 1, ring), f"E{k}")


def eisenstein(k: int, n_terms: int, ring: Ring = QQ) -> WeightedForm:
    """Normalized Eisenstein series E_k = 1 - (2k/B_k) sum sigma_{k-1}(n) q^n."""
    if k not in BERNOULLI:
        raise DomainError(f"unsupported Eisenstein weight {k}")
    if n_terms < 1:
        raise DomainError("n_terms must be positive")
    return _eisenstein_cached(k, n_terms, ring)


def _euler_product(n_terms: int) -> list[int]:
    """Coefficients of prod_{n>=1} (1 - x^n), via the pentagonal number theorem."""
    out = [0] * n_terms
    k = 0
    while True:
        hit = False
        for kk in ((k, -k) if k else (0,)):
            p = kk * (3 * kk - 1) // 2
            if p < n_terms:
                out[p] += -1 if kk % 2 else 1
                hit = True
        if not hit and k > 0:
            break
        k += 1
    return out


def eta_quotient(factors, n_terms: int, ring: Ring = QQ) -> PuiseuxSeries:
    """prod over (m, p) of eta(q^m)^p with rational scales m > 0.

    Each eta(q^m) contributes q^(m/24) prod (1 - q^(m n)). The result lives on
    the grid step = 1/lcm(denominators of m) and has n_terms valid terms.
    """
    if n_terms < 1:
        raise DomainError("n_terms must be positive")
    facs = [(to_fraction(m), int(p)) for m, p in factors]
    for m, _ in facs:
        if m <= 0:
            raise DomainError(f"eta scale must be positive, got {m}")
    den = 1
    for m, _ in facs:
        den = den * m.denominator // math.gcd(den, m.denominator)
    step = Fraction(1, den)
    lead = sum((m * p for m, p in facs), Fraction(0)) / 24
    total = PuiseuxSeries.one(n_terms, step, ring)
    for m, p in facs:
        if p == 0:
            continue
        stride = int(m / step)
        base = _euler_product(n_terms // stride + 1)
        coeffs = [0] * n_terms
        for i, c in enumerate(base):
            if i * stride < n_terms:
                coeffs[i * stride] = c
        f = PuiseuxSeries(coeffs, 0, step, ring)
        total = total * pow_frac(f, p)
    return total.shift(lead)


@lru_cache(maxsize=32)
def _j_and_kappa_cached(n_terms: int, ring: Ring):
    e4 = eisenstein(4, n_terms + 1, ring).series
    delta = eta_quotient([(1, 24)], n_terms + 1, ring)
    e4c = power(e4, 3)
    j = (e4c / delta).truncate(n_terms)
    kappa = (delta / e4c).scale(1728).truncate(n_terms)
    return WeightedForm(0, j, "j"), WeightedForm(0, kappa, "K")


def j_and_kappa(n_terms: int, ring: Ring = QQ) -> tuple[WeightedForm, WeightedForm]:
    """j = E4^3/Delta and K = 1728/j, each with n_terms valid terms."""
    if n_terms < 1:
        raise DomainError("n_terms must be positive")
    return _j_and_kappa_cached(n_terms, ring)


def delta(n_terms: int, ring: Ring = QQ) -> WeightedForm:
    return WeightedForm(12, eta_quotient([(1, 24)], n_terms, ring), "Delta")


def mod_derivative(f: WeightedForm) -> WeightedForm:
    """Serre derivative D_k f = q df/dq - (k/12) E2 f, of weight k + 2."""
    s = f.series
    rel = s.precision - s.lead_exp
    n = max(math.ceil(rel), 1)
    e2 = eisenstein(2, n, s.ring).series
    out = s.q_derivative()
    if f.weight != 0:
        out = out - (e2 * s).scale(s.ring.coerce(Fraction(f.weight, 12)))
    tag = f"D({f.tag})" if f.tag else None
    return WeightedForm(f.weight + 2, out, tag)


def mod_derivative_power(f: WeightedForm, n: int) -> WeightedForm:
    """D^n f, iterating the Serre derivative through increasing weights."""
    for _ in range(n):
        f = mod_derivative(f)
    return f
