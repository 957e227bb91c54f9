"""Monic modular linear differential equations and their Fuchsian K-line form.

A weight-0 monic MLDE of degree d is

    D^d F + sum_j c_j M_j D^j F = 0,

with M_j a monomial E4^a E6^b of weight 2(d - j). Writing F as a function of
K = 1728/j and theta = K d/dK turns it into a Fuchsian equation

    sum_j C_j(K) theta^j F = 0

whose local exponents at K = 0 are the cusp exponents of F. The conversion
uses only D(E4) = -E6/3, D(E6) = -E4^2/2, D(h(K)) = (E6/E4) theta h for
weight-0 h, and E6^2 = (1 - K) E4^3.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DomainError, TruncationError
from .rings import QQ, Ring, fraction_str, to_fraction
from .series import PuiseuxSeries, WeightedForm, eisenstein, mod_derivative

# polynomials are tuples of ring elements, lowest degree first


def poly_trim(p, ring: Ring):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def poly_add(p, q, ring: Ring):
    n = max(len(p), len(q))
    z = ring.zero
    return poly_trim([(p[i] if i < len(p) else z) + (q[i] if i < len(q) else z) for i in range(n)], ring)


def poly_scale(p, c, ring: Ring):
    c = ring.coerce(c)
    return poly_trim([x * c for x in p], ring)


def poly_mul(p, q, ring: Ring):
    if not p or not q:
        return ()
    out = [ring.zero] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a * b
    return poly_trim(out, ring)


def poly_eval(p, x, ring: Ring):
    acc = ring.zero
    for c in reversed(p):
        acc = acc * x + c
    return acc


def poly_from_roots(roots, ring: Ring):
    p = (ring.one,)
    for r in roots:
        p = poly_mul(p, (-ring.coerce(r), ring.one), ring)
    return p


def poly_str(p, ring: Ring, var: str = "X") -> str:
    terms = []
    for k, c in enumerate(p):
        if c == 0:
            continue
        mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        cs = ring.to_str(c)
        terms.append(cs if not mono else f"({cs})*{mono}")
    return " + ".join(terms) if terms else "0"


def _theta_poly(g, ring: Ring):
    """theta = K d/dK on a polynomial in K."""
    return poly_trim([c * ring.coerce(k) for k, c in enumerate(g)], ring)


@dataclass(frozen=True)
class ExponentTuple:
    """Rational cusp exponents, pairwise distinct modulo the integers."""

    values: tuple

    def __post_init__(self):
        vals = tuple(to_fraction(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        for i in range(len(vals)):
            for j in range(i):
                if (vals[i] - vals[j]).denominator == 1:
                    raise DomainError(f"logarithmic case unsupported: exponents {vals[j]} and "
                                      f"{vals[i]} agree modulo 1")

    @classmethod
    def parse(cls, text: str) -> ExponentTuple:
        return cls(tuple(Fraction(t.strip()) for t in text.split(",") if t.strip()))

    @property
    def trace(self) -> Fraction:
        return sum(self.values, Fraction(0))

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def to_json(self):
        return [fraction_str(v) for v in self.values]


_MONOMIALS = {0: (0, 0), 4: (1, 0), 6: (0, 1), 8: (2, 0), 10: (1, 1)}


@dataclass(frozen=True)
class MldeTerm:
    """scalar * E4^a * E6^b * D^order."""

    order: int
    scalar: object
    a: int
    b: int

    @property
    def monomial(self) -> str:
        return f"E4^{self.a}*E6^{self.b}"


@dataclass(frozen=True)
class MonicMlde:
    """D^d F + sum of lower terms = 0 for a weight-0 unknown F."""

    degree: int
    terms: tuple
    ring: Ring = QQ

    def __post_init__(self):
        for t in self.terms:
            if not 0 <= t.order < self.degree:
                raise DomainError(f"term order {t.order} outside 0..{self.degree - 1}")
            if 4 * t.a + 6 * t.b != 2 * (self.degree - t.order):
                raise DomainError(f"monomial {t.monomial} has weight {4 * t.a + 6 * t.b}, "
                                  f"expected {2 * (self.degree - t.order)} in front of D^{t.order}")

    def coefficient(self, order: int):
        """Scalar in front of D^order (zero if absent)."""
        for t in self.terms:
            if t.order == order:
                return t.scalar
        return self.ring.zero

    def coefficients(self):
        """Scalars from D^(d-2) down to D^0."""
        return tuple(self.coefficient(j) for j in range(self.degree - 2, -1, -1))

    def to_json(self) -> dict:
        return {"degree": self.degree,
                "coeffs": [{"order": t.order, "scalar": self.ring.to_str(t.scalar),
                            "monomial": t.monomial} for t in self.terms]}

    @classmethod
    def from_json(cls, data: dict, ring: Ring = QQ) -> MonicMlde:
        terms = []
        for item in data["coeffs"]:
            m = re.fullmatch(r"E4\^(\d+)\*E6\^(\d+)", item["monomial"].replace(" ", ""))
            if not m:
                raise DomainError(f"cannot parse monomial {item['monomial']!r}")
            terms.append(MldeTerm(int(item["order"]), ring.parse(item["scalar"]),
                                  int(m.group(1)), int(m.group(2))))
        return cls(int(data["degree"]), tuple(terms), ring)


@dataclass(frozen=True)
class ThetaOde:
    """sum_j C_j(K) theta^j f = 0 on the K-line, theta = K d/dK.

    ``coeffs[j]`` is the polynomial in K multiplying theta^j. The indicial
    polynomials are Q_k(X) = sum_j [K^k] C_j(K) X^j, and the Frobenius
    recurrence reads Q_0(e + n) a_n = -sum_{k>=1} Q_k(e + n - k) a_{n-k}.
    """

    degree: int
    coeffs: tuple
    ring: Ring = QQ
    Q: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        R = self.ring
        cs = tuple(poly_trim([R.coerce(c) for c in p], R) for p in self.coeffs)
        if len(cs) != self.degree + 1:
            raise DomainError(f"expected {self.degree + 1} coefficient polynomials, got {len(cs)}")
        if not cs[self.degree] or cs[self.degree][0] == 0:
            raise DomainError("K = 0 must be a regular singular point (C_d(0) != 0)")
        object.__setattr__(self, "coeffs", cs)
        top = max(len(p) for p in cs)
        qs = []
        for k in range(top):
            qs.append(poly_trim([p[k] if k < len(p) else R.zero for p in cs], R))
        object.__setattr__(self, "Q", tuple(qs))

    @classmethod
    def from_fuchsian(cls, P, ring: Ring = QQ) -> ThetaOde:
        """Build from P_0..P_d with C_j = (1 - K)^j P_{d-j}(K)."""
        d = len(P) - 1
        one_minus_k = (ring.one, -ring.one)
        cs = []
        for j in range(d + 1):
            p = tuple(ring.coerce(c) for c in P[d - j])
            for _ in range(j):
                p = poly_mul(p, one_minus_k, ring)
            cs.append(p)
        return cls(d, tuple(cs), ring)

    def indicial(self, k: int):
        return self.Q[k] if k < len(self.Q) else ()

    def exponents_from_roots(self):
        """Rational roots of Q_0 (exact rationals only), with multiplicity."""
        if self.ring is not QQ:
            raise DomainError("root extraction needs exact rational coefficients")
        import sympy

        X = sympy.Symbol("X")
        expr = sum(sympy.Rational(c.numerator, c.denominator) * X**k for k, c in enumerate(self.Q[0]))
        roots = sympy.roots(sympy.Poly(expr, X), filter="Q")
        out = []
        for r, mult in roots.items():
            out.extend([Fraction(int(r.p), int(r.q))] * mult)
        return sorted(out)

    def scaled(self, c) -> ThetaOde:
        return ThetaOde(self.degree, tuple(poly_scale(p, c, self.ring) for p in self.coeffs), self.ring)

    def to_json(self) -> dict:
        return {"degree": self.degree,
                "P": [[self.ring.to_str(c) for c in p] for p in self.coeffs]}

    @classmethod
    def from_json(cls, data: dict, ring: Ring = QQ) -> ThetaOde:
        return cls(int(data["degree"]), tuple(tuple(ring.parse(c) for c in p) for p in data["P"]), ring)

    def apply_k_series(self, f: PuiseuxSeries) -> PuiseuxSeries:
        """Apply the operator to a K-series (a residual check for solutions)."""
        R = self.ring
        out = None
        g = f
        for j in range(self.degree + 1):
            cj = self.coeffs[j]
            if cj:
                poly = PuiseuxSeries(list(cj) + [R.zero] * max(0, g.trunc - len(cj)), 0, 1, R)
                term = poly * g
                out = term if out is None else out + term
            g = g.q_derivative()
        return out


def indicial_data(ode: ThetaOde):
    """The polynomials Q_0, Q_1, ... of the Frobenius recurrence."""
    return list(ode.Q)


# conversion from the D-form to the theta-form


def _reduce(expr, ring: Ring):
    """Rewrite E6^b with b >= 2 using E6^2 = (1 - K) E4^3."""
    out = {}
    for (a, b, m), g in expr.items():
        while b >= 2:
            b -= 2
            a += 3
            g = poly_mul(g, (ring.one, -ring.one), ring)
        key = (a, b, m)
        out[key] = poly_add(out.get(key, ()), g, ring)
    return {k: v for k, v in out.items() if v}


def _apply_d(expr, ring: Ring):
    """One modular derivative of sum g(K) E4^a E6^b theta^m F."""
    out = {}

    def acc(key, g):
        out[key] = poly_add(out.get(key, ()), g, ring)

    for (a, b, m), g in expr.items():
        if a:
            acc((a - 1, b + 1, m), poly_scale(g, Fraction(-a, 3), ring))
        if b:
            acc((a + 2, b - 1, m), poly_scale(g, Fraction(-b, 2), ring))
        tg = _theta_poly(g, ring)
        if tg:
            acc((a - 1, b + 1, m), tg)
        acc((a - 1, b + 1, m + 1), g)
    return _reduce({k: v for k, v in out.items() if v}, ring)


def theta_from_mlde(mlde: MonicMlde) -> ThetaOde:
    """The theta-form on the K-line of a monic weight-0 MLDE, normalized with C_d(0) = 1."""
    R = mlde.ring
    d = mlde.degree
    powers = [{(0, 0, 0): (R.one,)}]
    for _ in range(d):
        powers.append(_apply_d(powers[-1], R))
    total = dict(powers[d])
    for t in mlde.terms:
        for (a, b, m), g in powers[t.order].items():
            key = (a + t.a, b + t.b, m)
            total[key] = poly_add(total.get(key, ()), poly_scale(g, t.scalar, R), R)
    total = _reduce({k: v for k, v in total.items() if v}, R)
    want = (d // 2, 0) if d % 2 == 0 else ((d - 3) // 2, 1)
    cs = [()] * (d + 1)
    for (a, b, m), g in total.items():
        if (a, b) != want:
            raise DomainError(f"term E4^{a} E6^{b} does not have weight {2 * d}")
        cs[m] = g
    return ThetaOde(d, tuple(cs), R)


def _falling_basis(d: int, ring: Ring):
    """p_j(x) = prod_{i<j} (x - i/6) for j = 0..d: the leading action of D^j on q^x."""
    return [poly_from_roots([Fraction(i, 6) for i in range(j)], ring) for j in range(d + 1)]


def monomial_for_weight(w: int) -> tuple[int, int]:
    if w not in _MONOMIALS:
        raise DomainError(f"no unique monomial in E4, E6 of weight {w}")
    return _MONOMIALS[w]


def monic_from_exponents(exponents, ring: Ring = QQ) -> MonicMlde:
    """Monic MLDE whose indicial roots at the cusp are the given exponents.

    The coefficient in front of D^j is read off by expanding prod (x - e_i)
    in the basis prod_{i<j}(x - i/6); weight 2 has no holomorphic form, so
    the D^(d-1) coefficient must vanish, which forces sum e = d(d-1)/12.
    Works for any exponent ring (e.g. rational functions of a parameter).
    """
    d = len(exponents)
    if d < 1 or d > 6:
        raise DomainError("degree must be between 1 and 6")
    ex = [ring.coerce(e) for e in exponents]
    target = poly_from_roots(ex, ring)
    basis = _falling_basis(d, ring)
    rem = list(poly_add(target, poly_scale(basis[d], -1, ring), ring))
    rem += [ring.zero] * (d + 1 - len(rem))
    coeffs = [ring.zero] * d
    for j in range(d - 1, -1, -1):
        c = rem[j] if j < len(rem) else ring.zero
        coeffs[j] = c
        if c != 0:
            rem = list(poly_add(rem, poly_scale(basis[j], -c, ring), ring))
            rem += [ring.zero] * (d + 1 - len(rem))
    if d >= 2 and coeffs[d - 1] != 0:
        expected = Fraction(d * (d - 1), 12)
        raise DomainError(f"exponent trace mismatch: sum of exponents must be {fraction_str(expected)}")
    if d == 1 and coeffs[0] != 0:
        raise DomainError("exponent trace mismatch: a weight-0 first order MLDE forces exponent 0")
    terms = []
    for j in range(d - 2, -1, -1):
        if coeffs[j] != 0:
            a, b = monomial_for_weight(2 * (d - j))
            terms.append(MldeTerm(j, coeffs[j], a, b))
    return MonicMlde(d, tuple(terms), ring)


_TRACE = {2: Fraction(1, 6), 3: Fraction(1, 2), 4: Fraction(1)}


def _check_trace(rank: int, e: ExponentTuple):
    if len(e) != rank:
        raise DomainError(f"expected {rank} exponents, got {len(e)}")
    if e.trace != _TRACE[rank]:
        raise DomainError(f"exponent trace mismatch: sum is {fraction_str(e.trace)}, "
                          f"rank {rank} needs {fraction_str(_TRACE[rank])}")


def monic_from_symmetric(rank: int, e: ExponentTuple) -> MonicMlde:
    """Monic MLDE of rank 3 (D^3 + a E4 D + b E6) or rank 4 (D^4 + a E4 D^2 + b E6 D + c E4^2)."""
    if rank not in (3, 4):
        raise DomainError("monic_from_symmetric handles ranks 3 and 4")
    if not isinstance(e, ExponentTuple):
        e = ExponentTuple(tuple(e))
    _check_trace(rank, e)
    return monic_from_exponents(e.values)


def rank4_abc(e) -> tuple:
    """(a, b, c) of D^4 + a E4 D^2 + b E6 D + c E4^2 for exponents summing to 1."""
    m = monic_from_symmetric(4, e)
    return m.coefficient(2), m.coefficient(1), m.coefficient(0)


def theta_from_exponents(rank: int, e: ExponentTuple) -> ThetaOde:
    """Theta-form for given exponents.

    Rank 2 takes the eta-stripped pair (f1, f2) with f1 + f2 = 1/6 and returns
    (6 - 6K) theta^2 - (2K + 1) theta + 6 f1 f2. Rank 4 takes exponents with
    sum 1 and returns the monic-at-the-cusp operator with Q_0 = prod (X - e_j).
    """
    if rank not in (2, 4):
        raise DomainError(f"theta_from_exponents supports ranks 2 and 4, not {rank}")
    if not isinstance(e, ExponentTuple):
        e = ExponentTuple(tuple(e))
    _check_trace(rank, e)
    ode = theta_from_mlde(monic_from_exponents(e.values))
    return ode.scaled(6) if rank == 2 else ode


def rank4_theta_closed_form(a, b, c, ring: Ring = QQ) -> ThetaOde:
    """The degree-4 theta-operator written directly in terms of (a, b, c)."""
    F = lambda x: ring.coerce(to_fraction(x)) if isinstance(x, (int, Fraction, str)) else x  # noqa: E731
    a, b, c = F(a), F(b), F(c)
    R = ring
    c4 = (R.one, R.coerce(-2), R.one)
    c3 = (R.coerce(-1), R.coerce(-1), R.coerce(2))
    c2 = ((a * 36 + 11) / 36, -(a * 9 + 7) / 9, R.coerce(Fraction(11, 9)))
    c1 = ((a * -6 + b * 36 - 1) / 36, -(a * 3 + b * 9 + 1) / 9, R.coerce(Fraction(2, 9)))
    c0 = (c,)
    return ThetaOde(4, (c0, c1, c2, c3, c4), R)


def mlde_residual(mlde: MonicMlde, candidate) -> WeightedForm | list:
    """Apply the MLDE to a weight-0 q-series (or a list of them).

    The residual carries weight 2d; a genuine solution gives the zero series
    to the candidate's valid precision.
    """
    if isinstance(candidate, (list, tuple)):
        return [mlde_residual(mlde, c) for c in candidate]
    d = mlde.degree
    if candidate.trunc < d + 1:
        raise TruncationError(f"candidate has {candidate.trunc} terms; need at least {d + 1}")
    R = mlde.ring
    n = candidate.trunc + 2
    e4 = eisenstein(4, n, R).series
    e6 = eisenstein(6, n, R).series
    derivs = [WeightedForm(0, candidate)]
    for _ in range(d):
        derivs.append(mod_derivative(derivs[-1]))
    total = derivs[d].series
    for t in mlde.terms:
        m = derivs[t.order].series.scale(t.scalar)
        for _ in range(t.a):
            m = m * e4
        for _ in range(t.b):
            m = m * e6
        total = total + m
    return WeightedForm(2 * d, total, "residual")
