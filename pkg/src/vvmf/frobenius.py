"""Frobenius solutions of theta-form equations and their q-expansions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, TruncationError
from .mlde import ExponentTuple, ThetaOde, poly_eval
from .rings import QQ, fraction_str, to_fraction
from .series import PuiseuxSeries, j_and_kappa, substitute


@dataclass(frozen=True)
class FrobeniusSolution:
    """K^exponent * sum a_n K^n with a_0 = 1; ``series`` holds sum a_n K^n."""

    exponent: object
    series: PuiseuxSeries
    ode: ThetaOde

    @property
    def n_terms(self) -> int:
        return self.series.trunc

    @property
    def coefficients(self):
        return self.series.coeffs

    def k_series(self) -> PuiseuxSeries:
        """The full solution as a Puiseux series in K (rational exponents only)."""
        return self.series.shift(to_fraction(self.exponent))

    def residual(self) -> PuiseuxSeries:
        """The operator applied to the solution; zero to truncation for a true solution."""
        return self.ode.apply_k_series(self.k_series())


def frobenius_solve(ode: ThetaOde, e, n_terms: int) -> FrobeniusSolution:
    """Coefficients a_0..a_{n_terms-1} from Q_0(e+n) a_n = -sum_k Q_k(e+n-k) a_{n-k}."""
    R = ode.ring
    if n_terms < 1:
        raise DomainError("n_terms must be positive")
    if isinstance(e, (int, Fraction, str)):
        e = to_fraction(e)
    ee = R.coerce(e)
    Q = ode.Q
    if poly_eval(Q[0], ee, R) != 0:
        raise DomainError(f"{e} is not a root of the indicial polynomial Q_0")
    depth = len(Q) - 1
    # Q_k(e + m) for every shift that the recurrence will touch
    vals = [[poly_eval(Q[k], ee + R.coerce(m), R) for m in range(n_terms)] for k in range(depth + 1)]
    a = [R.one]
    for n in range(1, n_terms):
        q0 = vals[0][n]
        if q0 == 0:
            raise DomainError(f"resonant exponent: Q_0({e} + {n}) = 0")
        s = R.zero
        for k in range(1, min(depth, n) + 1):
            qk = vals[k][n - k]
            if qk != 0 and a[n - k] != 0:
                s = s + qk * a[n - k]
        a.append(-s / q0)
    return FrobeniusSolution(e, PuiseuxSeries(a, 0, 1, R, _normalized=True), ode)


def family_solve(ode: ThetaOde, e, n_terms: int) -> list[FrobeniusSolution]:
    """One normalized solution per exponent, in the input order."""
    values = e.values if isinstance(e, ExponentTuple) else tuple(e)
    return [frobenius_solve(ode, x, n_terms) for x in values]


@dataclass(frozen=True)
class CharacterVectorExpansion:
    """Per-coordinate q-series of a vector-valued form.

    Without a rescale, coordinate j is 1728^(e_j) q^(e_j) (1 + ...) with the
    irrational constant kept as the series prefactor. With a rescale r, the
    coordinate is r_j times the leading-1 normalized series.
    """

    exponents: tuple
    coordinates: tuple
    rescale: tuple | None = None

    def __len__(self):
        return len(self.coordinates)

    @property
    def n_terms(self) -> int:
        return min(c.trunc for c in self.coordinates)

    def normalized(self) -> CharacterVectorExpansion:
        return CharacterVectorExpansion(self.exponents, tuple(c.normalized() for c in self.coordinates),
                                        tuple(Fraction(1) for _ in self.coordinates))

    def with_rescale(self, rescale) -> CharacterVectorExpansion:
        rescale = tuple(to_fraction(r) for r in rescale)
        if len(rescale) != len(self.coordinates):
            raise DomainError("rescale length does not match the number of coordinates")
        coords = tuple(c.normalized().scale(r) for c, r in zip(self.coordinates, rescale))
        return CharacterVectorExpansion(self.exponents, coords, rescale)

    def permuted(self, order) -> CharacterVectorExpansion:
        order = list(order)
        return CharacterVectorExpansion(tuple(self.exponents[i] for i in order),
                                        tuple(self.coordinates[i] for i in order),
                                        tuple(self.rescale[i] for i in order) if self.rescale else None)

    def integer_coefficients(self, j: int) -> list[int]:
        """Coefficients of coordinate j, which must all be integers."""
        out = []
        for c in self.coordinates[j].coeffs:
            c = to_fraction(c)
            if c.denominator != 1:
                raise DomainError(f"coordinate {j} has non-integral coefficient {c}")
            out.append(int(c))
        return out

    def to_json(self) -> dict:
        return {"exponents": [fraction_str(to_fraction(e)) for e in self.exponents],
                "rescale": [fraction_str(r) for r in self.rescale] if self.rescale else None,
                "coordinates": [c.to_json() for c in self.coordinates]}

    @classmethod
    def from_json(cls, data: dict) -> CharacterVectorExpansion:
        coords = tuple(PuiseuxSeries.from_json(c) for c in data["coordinates"])
        rescale = data.get("rescale")
        return cls(tuple(to_fraction(e) for e in data["exponents"]), coords,
                   tuple(to_fraction(r) for r in rescale) if rescale else None)


def to_q_expansion(solutions, n_terms: int, rescale=None) -> CharacterVectorExpansion:
    """Compose each K-series with K(q) = 1728 q - 1285632 q^2 + ... to n_terms q-terms."""
    sols = list(solutions)
    if not sols:
        raise DomainError("no solutions given")
    R = sols[0].series.ring
    if R is not QQ:
        raise DomainError("q-expansions are computed over exact rationals")
    for s in sols:
        if s.n_terms < n_terms:
            raise TruncationError(f"solution has {s.n_terms} K-terms, {n_terms} q-terms requested")
    kappa = j_and_kappa(n_terms, R)[1].series
    coords = []
    for s in sols:
        outer = s.series.truncate(n_terms).shift(to_fraction(s.exponent))
        coords.append(substitute(outer, kappa, n_terms))
    exp = CharacterVectorExpansion(tuple(to_fraction(s.exponent) for s in sols), tuple(coords))
    return exp.with_rescale(rescale) if rescale is not None else exp


@dataclass(frozen=True)
class DenominatorProfile:
    denominators: tuple
    cumulative_lcm: tuple
    stabilized: bool
    window: int

    @property
    def max_denominator(self) -> int:
        return self.cumulative_lcm[-1] if self.cumulative_lcm else 1


def denominator_profile(source, n_terms: int | None = None, window: int = 10) -> DenominatorProfile:
    """Per-term denominators and their running LCM.

    ``stabilized`` is true when the LCM over all n_terms equals the LCM over
    the first n_terms - window terms, a cheap hint of bounded denominators.
    """
    series = source.series if isinstance(source, FrobeniusSolution) else source
    coeffs = series.coeffs if n_terms is None else series.truncate(n_terms).coeffs
    dens = tuple(to_fraction(c).denominator for c in coeffs)
    cum, acc = [], 1
    for d in dens:
        acc = acc * d // math.gcd(acc, d)
        cum.append(acc)
    if len(cum) > window:
        stable = cum[-1] == cum[-1 - window]
    else:
        stable = False
    return DenominatorProfile(dens, tuple(cum), stable, window)
