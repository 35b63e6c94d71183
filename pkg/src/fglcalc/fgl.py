"""Formal group laws at finite truncation.

A law is a two-variable truncated power series F(z,w) = z + w + O(zw)
that is commutative and associative; the object caches the inverse
iota, the invariant differential coefficient p_F, the logarithm and
exponential (over rings containing the rationals), and the unit factor
G with F(z, iota(w)) = G(z,w) * (z - w).
"""

from __future__ import annotations

from fractions import Fraction

from .ring import Ring
from .series import PowerSeries


class AxiomViolation(Exception):
    def __init__(self, axiom, monomial=None):
        self.axiom = axiom
        self.monomial = monomial
        super().__init__(f"group-law axiom {axiom!r} fails"
                         + (f" at monomial {monomial}" if monomial else ""))


class NeedsRationals(Exception):
    pass


class IntegralityFailure(Exception):
    pass


class DivisionFailure(Exception):
    pass


Z, W, V = "z", "w", "v"


def _first_difference(a, b):
    keys = set(a.coeffs) | set(b.coeffs)
    bad = [e for e in sorted(keys) if not a.ring.eq(a.coefficient(e), b.coefficient(e))]
    return bad[0] if bad else None


class FormalGroupLaw:
    """A validated formal group law with eagerly computed companions."""

    def __init__(self, F, name="custom", params=None, validate=True):
        if F.vars != (Z, W):
            F = F.rename((Z, W))
        self.ring = F.ring
        self.F = F
        self.trunc = F.trunc
        self.name = name
        self.params = dict(params or {})
        if validate:
            self.validate()
        self.iota = self._solve_inverse()
        self.pF = self._invariant_differential()
        if self.ring.contains_rationals:
            self.log = self.pF.integrate(Z)
            self.exp = self.log.comp_inverse()
        else:
            self.log = None
            self.exp = None
        self.G = self._g_factor()

    # -- validation --------------------------------------------------------

    def validate(self):
        F, R = self.F, self.ring
        # unitality F(z,0) = z
        if not R.eq(F.coefficient((1, 0)), R.one()):
            raise AxiomViolation("unitality", (1, 0))
        if not R.eq(F.coefficient((0, 1)), R.one()):
            raise AxiomViolation("unitality", (0, 1))
        for (i, j), c in F.coeffs.items():
            if j == 0 and not (i == 1 and R.eq(c, R.one())):
                raise AxiomViolation("unitality", (i, j))
            if i == 0 and not (j == 1 and R.eq(c, R.one())):
                raise AxiomViolation("unitality", (i, j))
        # commutativity F(z,w) = F(w,z)
        for (i, j), c in F.coeffs.items():
            if not R.eq(F.coefficient((j, i)), c):
                raise AxiomViolation("commutativity", (i, j))
        # associativity F(z, F(w,v)) = F(F(z,w), v)
        tvars = (Z, W, V)
        t = F.trunc
        Fwv = F.rename((W, V)).extend(tvars)
        Fzw = F.extend(tvars)
        lhs = F.substitute({W: Fwv, Z: PowerSeries.var(R, tvars, Z, t)})
        rhs = F.rename((V, W)).substitute(
            {V: Fzw, W: PowerSeries.var(R, tvars, V, t)})
        bad = _first_difference(lhs, rhs)
        if bad is not None:
            raise AxiomViolation("associativity", bad)

    # -- companions --------------------------------------------------------

    def _solve_inverse(self):
        R, F, t = self.ring, self.F, self.trunc
        iota = -PowerSeries.var(R, (Z,), Z, t)
        while True:
            r = self.apply(PowerSeries.var(R, (Z,), Z, t), iota)
            if r.is_zero():
                break
            iota = iota - r
        return iota

    def _invariant_differential(self):
        # p_F(z) = F^{0,1}(z, 0)^{-1}
        f01 = self.F.derivative(W)
        row = {}
        for (i, j), c in f01.coeffs.items():
            if j == 0:
                row[(i,)] = c
        base = PowerSeries(self.ring, (Z,), row, f01.trunc, _clean=True)
        return base.invert_unit()

    def _g_factor(self):
        # F(z, iota(w)) = G(z,w) * (z - w), solved by the coefficient recursion
        R, t = self.ring, self.trunc
        iw = self.iota.rename((W,)).extend((Z, W))
        a = self.F.substitute({W: iw, Z: PowerSeries.var(R, (Z, W), Z, t)})
        gt = t - 1
        g = {}
        for j in range(0, gt):
            for i in range(gt - j - 1, -1, -1):
                val = a.coefficient((i + 1, j))
                if j >= 1:
                    val = R.add(val, g.get((i + 1, j - 1), R.zero()))
                if not R.is_zero(val):
                    g[(i, j)] = val
        G = PowerSeries(R, (Z, W), g, gt, _clean=True)
        zmw = PowerSeries(R, (Z, W), {(1, 0): R.one(), (0, 1): R.neg(R.one())}, t)
        if _first_difference((G * zmw).truncate(gt), a.truncate(gt)) is not None:
            raise DivisionFailure("F(z, iota w) is not divisible by (z - w)")
        if not R.eq(G.constant_term(), R.one()):
            raise DivisionFailure("G(0,0) != 1")
        return G

    # -- operations --------------------------------------------------------

    def apply(self, x, y):
        """F(x, y) for power series x, y over a common variable list."""
        if x.vars != y.vars:
            raise ValueError("operands must share variables")
        return self.F.substitute({Z: x, W: y})

    def partial_derivative(self, m, n):
        """F^{m,n} = d^{m+n} F / dz^m dw^n, without factorial normalization."""
        out = self.F
        for _ in range(m):
            out = out.derivative(Z)
        for _ in range(n):
            out = out.derivative(W)
        return out

    def logarithm(self):
        if self.log is None:
            raise NeedsRationals("the logarithm needs rational coefficients")
        return self.log

    def exponential(self):
        if self.exp is None:
            raise NeedsRationals("the exponential needs rational coefficients")
        return self.exp

    def f_z_iota_w(self, zname=Z, wname=W, trunc=None):
        """F(z, iota(w)) as an exact LaurentElement in (zname, wname)."""
        t = trunc or self.trunc
        R = self.ring
        iw = self.iota.truncate(t).rename((wname,)).extend((zname, wname))
        f = self.F.truncate(t).rename((zname, wname))
        out = f.substitute({wname: iw, zname: PowerSeries.var(R, (zname, wname), zname, t)})
        return out.as_laurent()

    def as_laurent(self, zname=Z, wname=W, trunc=None):
        t = trunc or self.trunc
        return self.F.truncate(t).rename((zname, wname)).as_laurent()

    def pF_laurent(self, name, vars, trunc=None):
        """p_F(name) viewed in a larger Laurent variable list."""
        t = trunc or self.trunc
        return self.pF.truncate(t).rename((name,)).extend(vars).as_laurent()

    def __repr__(self):
        return f"<FormalGroupLaw {self.name} over {self.ring!r} at N={self.trunc}>"


def fgl_new(F, name="custom", params=None):
    return FormalGroupLaw(F, name=name, params=params)


def fgl_inverse(law):
    return law.iota


def invariant_differential(law):
    return law.pF


def logarithm(law):
    return law.logarithm()


def exponential(law):
    return law.exponential()


def partial_derivative(law, m, n):
    return law.partial_derivative(m, n)


def g_factor(law):
    return law.G


def _phi_p(ring, p, h, trunc):
    q = p ** h
    coeffs = {(1,): Fraction(1)}
    n = 1
    while q ** n < trunc:
        coeffs[(q ** n,)] = Fraction(1, p ** n)
        n += 1
    return PowerSeries(ring, (Z,), coeffs, trunc)


def standard_law(kind, trunc=12, **params):
    """Built-in laws: additive, multiplicative, one_parameter, elliptic,
    p_typical(p, h)."""
    QQ = Ring.rationals()
    if kind == "additive":
        F = PowerSeries(QQ, (Z, W), {(1, 0): Fraction(1), (0, 1): Fraction(1)}, trunc)
        return FormalGroupLaw(F, name="additive")
    if kind == "multiplicative":
        F = PowerSeries(QQ, (Z, W),
                        {(1, 0): Fraction(1), (0, 1): Fraction(1), (1, 1): Fraction(1)},
                        trunc)
        return FormalGroupLaw(F, name="multiplicative")
    if kind == "one_parameter":
        R = Ring.parampoly(QQ, ["s"])
        s = R.param("s")
        F = PowerSeries(R, (Z, W), {(1, 0): R.one(), (0, 1): R.one(), (1, 1): s}, trunc)
        return FormalGroupLaw(F, name="one_parameter")
    if kind == "elliptic":
        R = Ring.parampoly(QQ, ["d", "e"])
        d, e = R.param("d"), R.param("e")
        zz = PowerSeries.var(R, (Z, W), Z, trunc)
        ww = PowerSeries.var(R, (Z, W), W, trunc)

        def S_of(v):
            return PowerSeries(R, (Z, W), {
                (0, 0): R.one(),
                (2, 0) if v == Z else (0, 2): R.neg(R.add(d, d)),
                (4, 0) if v == Z else (0, 4): e,
            }, trunc)

        num = zz * S_of(W).sqrt() + ww * S_of(Z).sqrt()
        den = PowerSeries(R, (Z, W), {(0, 0): R.one(), (2, 2): R.neg(e)}, trunc)
        F = num * den.invert_unit()
        return FormalGroupLaw(F.truncate(trunc), name="elliptic")
    if kind == "p_typical":
        p = params.get("p", 2)
        h = params.get("h", 1)
        phi = _phi_p(QQ, p, h, trunc)
        expp = phi.comp_inverse()
        tvars = (Z, W)
        phisum = (phi.extend(tvars)
                  + phi.rename((W,)).extend(tvars))
        F = expp.substitute({Z: phisum})
        law = FormalGroupLaw(F, name=f"p_typical({p},{h})", params={"p": p, "h": h})
        for e, c in F.coeffs.items():
            if c.denominator != 1:
                raise IntegralityFailure(
                    f"coefficient of z^{e[0]} w^{e[1]} is {c}, not an integer")
        return law
    raise ValueError(f"unknown law kind {kind!r}")
