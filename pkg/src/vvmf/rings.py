"""Coefficient rings for series and polynomials.

Three rings are supported:

* ``QQ``: exact rationals, elements are :class:`fractions.Fraction`;
* :func:`real_field`: arbitrary precision binary floats backed by a private
  mpmath context, so the working precision is a property of the ring and not
  global state;
* :func:`rational_function_field`: rational functions in one formal parameter
  over Q, backed by sympy's sparse fraction fields.

Integers and Fractions embed into every ring. Elements of one ring never mix
with elements of another ring; :meth:`Ring.coerce` raises
:class:`~vvmf.errors.RingMismatchError` instead of silently converting.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

import mpmath
import sympy
from sympy.polys.fields import field as _sympy_field

from .errors import DomainError, RingMismatchError

DEFAULT_PRECISION = 256


def to_fraction(x) -> Fraction:
    """Parse ints, Fractions, gmpy/sympy rationals and ``"p/q"`` strings."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, Rational):
        return Fraction(int(x.numerator), int(x.denominator))
    if hasattr(x, "numerator") and hasattr(x, "denominator") and not isinstance(x, float):
        return Fraction(int(x.numerator), int(x.denominator))
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def fraction_str(x: Fraction) -> str:
    x = to_fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class Ring:
    name = "ring"

    def coerce(self, x):
        raise NotImplementedError

    def __call__(self, x):
        return self.coerce(x)

    @property
    def zero(self):
        return self.coerce(0)

    @property
    def one(self):
        return self.coerce(1)

    def is_zero(self, x) -> bool:
        return x == 0

    def to_str(self, x) -> str:
        return str(x)

    def parse(self, s: str):
        raise NotImplementedError

    def __repr__(self):
        return self.name


class RationalField(Ring):
    name = "QQ"

    def coerce(self, x):
        if isinstance(x, Fraction):
            return x
        if isinstance(x, int) and not isinstance(x, bool):
            return Fraction(x)
        if isinstance(x, str):
            return Fraction(x)
        if type(x).__name__ == "mpq":
            return Fraction(int(x.numerator), int(x.denominator))
        raise RingMismatchError(f"{type(x).__name__} value {x!r} is not an element of QQ")

    def to_str(self, x) -> str:
        return fraction_str(x)

    def parse(self, s: str):
        return Fraction(s)

    def __reduce__(self):
        return (_rational_field, ())


class RealField(Ring):
    """Binary floating point with ``prec`` bits, isolated in its own context."""

    def __init__(self, prec: int = DEFAULT_PRECISION):
        if prec < 8:
            raise DomainError("precision must be at least 8 bits")
        self.prec = prec
        self.ctx = mpmath.MPContext()
        self.ctx.prec = prec
        self.name = f"RR{prec}"

    def __reduce__(self):
        return (real_field, (self.prec,))

    def coerce(self, x):
        ctx = self.ctx
        if isinstance(x, ctx.mpf):
            return x
        if isinstance(x, int) and not isinstance(x, bool):
            return ctx.mpf(x)
        if isinstance(x, Fraction):
            return ctx.mpf(x.numerator) / x.denominator
        if isinstance(x, str):
            if "/" in x:
                return self.coerce(Fraction(x))
            return ctx.mpf(x)
        raise RingMismatchError(f"{type(x).__name__} value {x!r} is not an element of {self.name}")

    def to_str(self, x) -> str:
        digits = int(self.prec * 0.30103)
        return self.ctx.nstr(x, digits, min_fixed=-1, max_fixed=digits + 1)

    def parse(self, s: str):
        return self.coerce(s)

    def tolerance(self, slack_bits: int = 8):
        return self.ctx.ldexp(1, -(self.prec - slack_bits))


class RationalFunctionField(Ring):
    """Q(var): ratios of univariate polynomials over the rationals."""

    def __init__(self, var: str = "lam"):
        self.var = var
        self.field, self.gen = _sympy_field(var, sympy.QQ)
        self.name = f"QQ({var})"

    def __reduce__(self):
        return (rational_function_field, (self.var,))

    def coerce(self, x):
        if isinstance(x, int) and not isinstance(x, bool):
            return self.field(x)
        if isinstance(x, Fraction):
            return self.field(sympy.QQ(x.numerator, x.denominator))
        if getattr(x, "field", None) is self.field:
            return x
        if isinstance(x, str):
            return self.parse(x)
        raise RingMismatchError(f"{type(x).__name__} value {x!r} is not an element of {self.name}")

    def to_str(self, x) -> str:
        return str(x)

    def parse(self, s: str):
        return self.field.from_expr(sympy.sympify(s, locals={self.var: sympy.Symbol(self.var)}))

    def evaluate(self, x, value) -> Fraction:
        """Specialize ``x`` at a rational value of the parameter."""
        value = to_fraction(value)
        v = sympy.QQ(value.numerator, value.denominator)
        den = x.denom.evaluate(self.field.ring.gens[0], v)
        if den == 0:
            raise DomainError(f"{x} has a pole at {self.var} = {value}")
        num = x.numer.evaluate(self.field.ring.gens[0], v)
        q = num / den
        return Fraction(int(q.numerator), int(q.denominator))

    def is_polynomial_over_z(self, x) -> bool:
        if x.denom != 1 and not (x.denom.is_ground and x.denom.LC == 1):
            return False
        return all(c.denominator == 1 for c in x.numer.coeffs())


QQ = RationalField()

_real_fields: dict[int, RealField] = {}
_function_fields: dict[str, RationalFunctionField] = {}


def _rational_field() -> RationalField:
    return QQ


def real_field(prec: int = DEFAULT_PRECISION) -> RealField:
    """Shared RealField per precision, so equal precisions compare identical."""
    if prec not in _real_fields:
        _real_fields[prec] = RealField(prec)
    return _real_fields[prec]


def rational_function_field(var: str = "lam") -> RationalFunctionField:
    if var not in _function_fields:
        _function_fields[var] = RationalFunctionField(var)
    return _function_fields[var]


def ring_of(x) -> Ring:
    """The ring an isolated scalar lives in."""
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return QQ
    fld = getattr(x, "field", None)
    for r in _function_fields.values():
        if r.field is fld:
            return r
    for r in _real_fields.values():
        if isinstance(x, r.ctx.mpf):
            return r
    raise RingMismatchError(f"no registered ring contains {x!r}")
