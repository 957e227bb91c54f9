"""S-matrices, Verlinde fusion rules and the (quasi-)conformal checks.

A candidate character vector is quasi-conformal when

1. every Fourier coefficient is a nonnegative integer,
2. the vacuum coordinate starts with coefficient exactly 1,
3. the S-matrix is real symmetric,
4. the vacuum row of S has no zero entry,
5. T has finite order (all exponents rational),

and conformal when, in addition, the Verlinde numbers
N^nu_{lam,mu} = sum_s S[lam,s] S[mu,s] S[nu,s] / S[vac,s]
are nonnegative integers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DomainError
from .frobenius import CharacterVectorExpansion, family_solve
from .mlde import ExponentTuple, ThetaOde
from .rings import DEFAULT_PRECISION, QQ, Ring, real_field, to_fraction
from .series import PuiseuxSeries, frac_gcd, j_and_kappa, pow_frac

SYMMETRY_TOL = Fraction(1, 10**20)
FUSION_TOL = Fraction(1, 10**9)


class SMatrix:
    """Real d x d matrix at a fixed binary precision."""

    def __init__(self, entries, precision_bits: int = DEFAULT_PRECISION, descriptor: str | None = None):
        self.field = real_field(precision_bits)
        self.precision_bits = precision_bits
        rows = [[self._coerce(x) for x in row] for row in entries]
        d = len(rows)
        if d == 0 or any(len(r) != d for r in rows):
            raise DomainError("S-matrix must be square and nonempty")
        self.entries = tuple(tuple(r) for r in rows)
        self.descriptor = descriptor

    def _coerce(self, x):
        ctx = self.field.ctx
        if isinstance(x, ctx.mpf):
            return x
        if isinstance(x, ctx.mpc):
            if x.imag != 0:
                raise DomainError("S-matrix entries must be real")
            return x.real
        if isinstance(x, float):
            return ctx.mpf(x)
        return self.field.coerce(x)

    @property
    def d(self) -> int:
        return len(self.entries)

    @property
    def ctx(self):
        return self.field.ctx

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def row(self, i):
        return self.entries[i]

    def matmul(self, other: SMatrix) -> SMatrix:
        d = self.d
        out = [[sum((self[i, k] * other[k, j] for k in range(d)), self.ctx.mpf(0)) for j in range(d)]
               for i in range(d)]
        return SMatrix(out, self.precision_bits)

    def symmetry_defect(self):
        return max((abs(self[i, j] - self[j, i]) for i in range(self.d) for j in range(self.d)),
                   default=self.ctx.mpf(0))

    def involution_defect(self):
        sq = self.matmul(self)
        return max(abs(sq[i, j] - (1 if i == j else 0)) for i in range(self.d) for j in range(self.d))

    def is_symmetric(self, tol=SYMMETRY_TOL) -> bool:
        return self.symmetry_defect() <= self.field.coerce(to_fraction(tol))

    def squares_to_identity(self, tol=SYMMETRY_TOL) -> bool:
        return self.involution_defect() <= self.field.coerce(to_fraction(tol))

    def conjugate_by_signs(self, signs) -> SMatrix:
        """diag(signs) S diag(signs)."""
        return SMatrix([[self[i, j] * signs[i] * signs[j] for j in range(self.d)] for i in range(self.d)],
                       self.precision_bits, self.descriptor)

    def permuted(self, order) -> SMatrix:
        """Rows and columns reordered so new index k is old index order[k]."""
        return SMatrix([[self[i, j] for j in order] for i in order], self.precision_bits, self.descriptor)

    def scaled(self, c) -> SMatrix:
        c = self._coerce(c)
        return SMatrix([[x * c for x in row] for row in self.entries], self.precision_bits, self.descriptor)

    def quantum_dimensions(self, vacuum: int = 0):
        """The ratios S[vac, j] / S[vac, vac] (a diagnostic only)."""
        s00 = self[vacuum, vacuum]
        return [self[vacuum, j] / s00 for j in range(self.d)]

    def to_json(self) -> dict:
        digits = int(self.precision_bits * 0.30103)
        return {"d": self.d,
                "entries": [[self.ctx.nstr(x, digits, min_fixed=-digits, max_fixed=digits) for x in row]
                            for row in self.entries],
                "precision_bits": self.precision_bits}

    @classmethod
    def from_json(cls, data: dict, precision_bits: int | None = None) -> SMatrix:
        prec = precision_bits or int(data.get("precision_bits", DEFAULT_PRECISION))
        entries = data["entries"]
        if int(data.get("d", len(entries))) != len(entries):
            raise DomainError("declared dimension does not match the entries")
        return cls([[str(x) for x in row] for row in entries], prec)

    def __repr__(self):
        return f"SMatrix(d={self.d}, {self.descriptor or 'numeric'})"


def fusion(S: SMatrix, vacuum: int = 0):
    """Verlinde numbers N[lam][mu][nu] from a real symmetric S."""
    d = S.d
    ctx = S.ctx
    tol = ctx.ldexp(1, -(S.precision_bits // 2))
    den = S.row(vacuum)
    for s, x in enumerate(den):
        if abs(x) <= tol:
            raise DomainError(f"Verlinde denominator vanishes: S[{vacuum},{s}] = 0")
    inv = [1 / x for x in den]
    N = [[[ctx.mpf(0)] * d for _ in range(d)] for _ in range(d)]
    for lam in range(d):
        for mu in range(lam, d):
            w = [S[lam, s] * S[mu, s] * inv[s] for s in range(d)]
            for nu in range(d):
                v = ctx.fsum(w[s] * S[nu, s] for s in range(d))
                N[lam][mu][nu] = v
                N[mu][lam][nu] = v
    return N


@dataclass
class ConformalReport:
    conditions: dict
    witnesses: dict = field(default_factory=dict)
    fusion: list | None = None
    fusion_rounded: list | None = None
    conformal: bool | None = None

    @property
    def quasi_conformal(self) -> bool:
        return all(self.conditions.values())

    def to_json(self) -> dict:
        out = {"quasi_conformal": self.quasi_conformal, "conformal": self.conformal,
               "conditions": dict(self.conditions),
               "witnesses": {k: v for k, v in self.witnesses.items()}}
        if self.fusion_rounded is not None:
            out["fusion"] = self.fusion_rounded
        return out


def _coefficient_witness(expansion: CharacterVectorExpansion):
    for j, coord in enumerate(expansion.coordinates):
        if coord.prefactor is not None:
            return {"coordinate": j, "reason": f"irrational prefactor {coord.prefactor}"}
        for e, c in coord.terms():
            c = to_fraction(c)
            if c.denominator != 1 or c < 0:
                return {"coordinate": j, "exponent": str(e), "value": str(c)}
    return None


def check_quasi_conformal(expansion: CharacterVectorExpansion, T_exponents, S: SMatrix,
                          vacuum: int = 0) -> ConformalReport:
    """Conditions (1)-(5) on the available terms of the expansion."""
    if not isinstance(T_exponents, ExponentTuple):
        T_exponents = ExponentTuple(tuple(T_exponents))
    d = len(expansion)
    if len(T_exponents) != d or S.d != d:
        raise DomainError(f"dimension mismatch: {d} coordinates, {len(T_exponents)} exponents, "
                          f"{S.d}x{S.d} S-matrix")
    conds, wit = {}, {}
    w = _coefficient_witness(expansion)
    conds["nonnegative_integer_coefficients"] = w is None
    if w is not None:
        wit["nonnegative_integer_coefficients"] = w
    vac = expansion.coordinates[vacuum]
    lead_ok = (not vac.is_zero()) and vac.prefactor is None and vac.coeffs[0] == 1
    conds["vacuum_leading_one"] = lead_ok
    if not lead_ok:
        wit["vacuum_leading_one"] = {"coordinate": vacuum,
                                     "value": str(vac.coeffs[0]) if vac.coeffs else "0"}
    tol = S.field.coerce(SYMMETRY_TOL)
    sym = S.symmetry_defect()
    conds["real_symmetric_S"] = sym <= tol
    if sym > tol:
        wit["real_symmetric_S"] = {"defect": S.ctx.nstr(sym, 10)}
    zero_tol = S.ctx.ldexp(1, -(S.precision_bits // 2))
    zeros = [s for s in range(d) if abs(S[vacuum, s]) <= zero_tol]
    conds["vacuum_row_nonzero"] = not zeros
    if zeros:
        wit["vacuum_row_nonzero"] = {"column": zeros[0]}
    # exponents are rationals by type, so T has finite order; also check the
    # expansion starts where the declared exponents say it does
    bad = [j for j, c in enumerate(expansion.coordinates)
           if not c.is_zero() and (c.lead_exp - T_exponents[j]).denominator != 1]
    conds["finite_order_T"] = not bad
    if bad:
        wit["finite_order_T"] = {"coordinate": bad[0],
                                 "lead_exp": str(expansion.coordinates[bad[0]].lead_exp),
                                 "exponent": str(T_exponents[bad[0]])}
    return ConformalReport(conds, wit)


def check_conformal(expansion: CharacterVectorExpansion, T_exponents, S: SMatrix,
                    vacuum: int = 0) -> ConformalReport:
    """Quasi-conformal conditions plus nonnegative integral fusion rules."""
    rep = check_quasi_conformal(expansion, T_exponents, S, vacuum)
    if not rep.conditions["vacuum_row_nonzero"]:
        rep.conformal = False
        rep.witnesses["fusion"] = {"reason": "Verlinde denominator vanishes"}
        return rep
    N = fusion(S, vacuum)
    ctx = S.ctx
    tol = S.field.coerce(FUSION_TOL)
    d = S.d
    rounded = [[[0] * d for _ in range(d)] for _ in range(d)]
    witness = None
    for a in range(d):
        for b in range(d):
            for c in range(d):
                v = N[a][b][c]
                r = int(ctx.nint(v))
                rounded[a][b][c] = r
                if witness is None and (abs(v - r) > tol or r < 0):
                    witness = {"indices": [a, b, c], "value": ctx.nstr(v, 15)}
    rep.fusion = N
    rep.fusion_rounded = rounded
    rep.conformal = rep.quasi_conformal and witness is None
    if witness is not None:
        rep.witnesses["fusion"] = witness
    return rep


@dataclass(frozen=True)
class IntegralScale:
    scale: Fraction
    coefficients: tuple


def integrality_scale(series: PuiseuxSeries, n_terms: int | None = None,
                      max_scale: int = 10**7) -> IntegralScale | None:
    """Smallest positive rational s <= max_scale with s * series in Z_{>=0}[[q]], or None.

    The multipliers that make every coefficient integral form the lattice
    (1/g) Z where g is the rational gcd of the coefficients; s = 1/g is then
    the smallest one, and it works iff all coefficients share its sign.
    """
    coeffs = [to_fraction(c) for c in (series.coeffs if n_terms is None
                                       else series.truncate(n_terms).coeffs)]
    nz = [c for c in coeffs if c != 0]
    if not nz or nz[0] < 0 or any(c < 0 for c in nz):
        return None
    g = Fraction(0)
    for c in nz:
        g = frac_gcd(g, c)
    s = 1 / g
    if s > max_scale:
        return None
    return IntegralScale(s, tuple(int(c * s) for c in coeffs))


@dataclass(frozen=True)
class PrescreenResult:
    coordinate: int
    exponent: object
    coefficients: tuple
    ok: bool | None


def normalized_q_coefficients(ode: ThetaOde, e, n: int):
    """First n q-coefficients of the leading-1 normalized Frobenius solution at e.

    Works over any coefficient ring, including symbolic exponents: with
    K = 1728 q u(q), u(0) = 1, the solution is proportional to
    q^e u^e sum a_m 1728^m q^m u^m.
    """
    R: Ring = ode.ring
    sol = family_solve(ode, [e], n)[0]
    kappa = j_and_kappa(n)[1].series
    u = PuiseuxSeries([R.coerce(to_fraction(c) / 1728) for c in kappa.coeffs], 0, 1, R)
    ue = pow_frac(u, R.coerce(e) if not isinstance(e, (int, Fraction)) else e)
    acc = PuiseuxSeries.zero(n, 1, R)
    ku = PuiseuxSeries.one(n, 1, R)
    qu = PuiseuxSeries([R.zero, R.coerce(1728)] + [R.zero] * (n - 2), 0, 1, R) * u if n > 1 else None
    for m in range(n):
        acc = acc + ku.scale(sol.coefficients[m])
        if qu is not None:
            ku = ku * qu
    out = (ue * acc).truncate_to(n)
    return tuple(out.coefficient(k) for k in range(n))


def sign_prescreen(e, ode: ThetaOde, n_coeffs: int = 3) -> list[PrescreenResult]:
    """Leading q-coefficients of each normalized coordinate and whether they are >= 0.

    For symbolic exponents the coefficients are returned as rational
    functions and ``ok`` is None: the sign conditions are then read off by
    the caller.
    """
    values = e.values if isinstance(e, ExponentTuple) else tuple(e)
    out = []
    for j, x in enumerate(values):
        cs = normalized_q_coefficients(ode, x, n_coeffs)
        ok = None
        if ode.ring is QQ:
            ok = all(to_fraction(c) >= 0 for c in cs)
        out.append(PrescreenResult(j, x, cs, ok))
    return out
