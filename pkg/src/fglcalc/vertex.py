"""Vertex algebras over a formal group law: shift operators, partial field
maps, axiom checkers, and the Lie bracket on the shift quotient.

States are sparse polynomials in creation generators, stored as dicts mapping
a sorted tuple of negative mode indices to an exact rational coefficient.
The field map Y is deliberately partial: it is declared on the vacuum and on
the single-generator state only, and everything downstream either works
inside that domain or raises YUndefined.  See the README for the one place
where this partiality has mathematical consequences (field-level skew
symmetry can fail away from the additive law, and the antisymmetry checker
accounts for that exactly instead of papering over it).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .calculus import Report, _fail, f_residue, hyperderivative
from .series import BilateralWindow, LaurentElement, WindowMiss


class YUndefined(Exception):
    pass


class NeedsField(Exception):
    pass


class MismatchBug(Exception):
    pass


class NotFound(Exception):
    def __init__(self, bound, what="order"):
        super().__init__(f"no {what} found up to {bound}")
        self.bound = bound


# -- states -----------------------------------------------------------------
#
# A state is {monomial: Fraction} where a monomial is a sorted tuple of
# negative integers (mode indices of the creation operators applied to the
# vacuum); () is the vacuum monomial.


def st_add(s1, s2):
    out = dict(s1)
    for k, v in s2.items():
        c = out.get(k, Fraction(0)) + v
        if c:
            out[k] = c
        else:
            out.pop(k, None)
    return out


def st_scale(s, c):
    c = Fraction(c)
    if not c:
        return {}
    return {k: v * c for k, v in s.items()}


def st_neg(s):
    return {k: -v for k, v in s.items()}


def st_sub(s1, s2):
    return st_add(s1, st_neg(s2))


def state_weight(s):
    """Largest weight among the monomials (0 for the zero state)."""
    return max((mono_weight(m) for m in s), default=0)


def mono_weight(m):
    # non-integer labels (the fixture's nilpotent) carry weight zero
    return -sum(i for i in m if isinstance(i, int))


def b_apply(n, s):
    """Mode operator: multiply by the generator (n < 0), n * d/d(gen) (n > 0),
    zero for n = 0."""
    out = {}
    for mono, c in s.items():
        if n < 0:
            out = st_add(out, {tuple(sorted(mono + (n,))): c})
        elif n > 0:
            cnt = mono.count(-n)
            if cnt:
                lst = list(mono)
                lst.remove(-n)
                out = st_add(out, {tuple(lst): c * n * cnt})
    return out


def state_to_json(s):
    return [{"mono": list(m), "coeff": str(c)}
            for m, c in sorted(s.items(), key=lambda kv: (mono_weight(kv[0]), kv[0]))]


def state_text(s):
    if not s:
        return "0"
    parts = []
    for m, c in sorted(s.items(), key=lambda kv: (mono_weight(kv[0]), kv[0])):
        mono = "*".join(f"b({i})" if isinstance(i, int) else str(i)
                        for i in m) or "vac"
        parts.append(f"({c})*{mono}")
    return " + ".join(parts)


class StateSpace:
    """Ring-like adapter so the series containers can hold state coefficients.

    Values are either state dicts or raw scalars of the base ring; products
    of two state dicts are rejected (the module has no ring structure), while
    scalar * state scales.  This is what lets BilateralWindow / LaurentElement
    machinery be reused verbatim for state-valued series.
    """

    kind = "state-module"

    def __init__(self, base):
        self.base = base

    def __eq__(self, other):
        return isinstance(other, StateSpace) and self.base == other.base

    def __hash__(self):
        return hash(("state-module", self.base))

    def __repr__(self):
        return f"StateSpace({self.base!r})"

    def zero(self):
        return {}

    def one(self):
        return self.base.one()

    def from_int(self, n):
        return self.base.from_int(n)

    def from_fraction(self, q):
        return self.base.from_fraction(q)

    def is_zero(self, a):
        if isinstance(a, dict):
            return not a
        return self.base.is_zero(a)

    def add(self, a, b):
        if isinstance(a, dict) and isinstance(b, dict):
            return st_add(a, b)
        if isinstance(a, dict):
            if self.base.is_zero(b):
                return a
            raise ValueError("cannot add a state and a nonzero scalar")
        if isinstance(b, dict):
            if self.base.is_zero(a):
                return b
            raise ValueError("cannot add a state and a nonzero scalar")
        return self.base.add(a, b)

    def neg(self, a):
        if isinstance(a, dict):
            return st_neg(a)
        return self.base.neg(a)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if isinstance(a, dict) and isinstance(b, dict):
            raise ValueError("product of two states is undefined")
        if isinstance(a, dict):
            return st_scale(a, b)
        if isinstance(b, dict):
            return st_scale(b, a)
        return self.base.mul(a, b)

    def eq(self, a, b):
        if self.is_zero(a) and self.is_zero(b):
            return True
        if isinstance(a, dict) != isinstance(b, dict):
            return False
        if isinstance(a, dict):
            return a == b
        return self.base.eq(a, b)

    def to_text(self, a):
        if isinstance(a, dict):
            return state_text(a)
        return self.base.to_text(a)


def lift_laurent(adapter, f):
    """View a scalar-coefficient LaurentElement over the state adapter."""
    return LaurentElement(adapter, f.vars, dict(f.coeffs), f.trunc,
                          floors=f.floors, _clean=True)


def lift_window(adapter, w):
    return BilateralWindow(adapter, w.vars, dict(w.coeffs), w.reliable,
                           max_total=w.max_total, _clean=True)


# -- algebras ---------------------------------------------------------------


class VertexFAlgebra:
    """Common interface: a law, a vacuum, a shift operator, a partial Y.

    Subclasses provide shift(n, state), y_defined(a), y_coeff(a, c, k) and a
    finite monomial basis per weight.
    """

    def __init__(self, law):
        self.law = law
        self.ring = law.ring
        self.adapter = StateSpace(law.ring)
        self.vacuum = {(): Fraction(1)}

    def weight(self, s):
        return state_weight(s)

    def y_field(self, a, c, kmax):
        """{k: coefficient of z^k in Y(a,z)c} for k up to kmax (finite below)."""
        out = {}
        for k in range(self.y_kmin(a, c), kmax + 1):
            v = self.y_coeff(a, c, k)
            if v:
                out[k] = v
        return out


class HeisenbergAlgebra(VertexFAlgebra):
    """Polynomial Fock space on creation modes b(-1), ..., b(-K).

    The shift operator is determined inductively from S(z) fixing the vacuum
    and the conjugation relation S(z) b(w) = b(F(z,w)) S(z); written in
    components against a monomial state b_m s this gives

        S^(n)(b_m s) = sum_{k<=n} sum_j beta_j(k, m) b_j S^(n-k)(s),

    where beta_j(k, m) is the z^k w^(-m-1) coefficient of the w-dominant
    expansion of F(z,w)^(-j-1).  (The commutator form of the relation is not
    self-consistent at z^0; see the README note on the shift relation.)
    Annihilation insertions b_j with j > weight(s) act as zero, which keeps
    the sum finite.  Y is defined on the span of the vacuum and b(-1)vac,
    with Y(b(-1)vac, z) the generator field sum_n b_n z^(-n-1).
    """

    def __init__(self, law, K=6, W=6):
        if law.ring.kind != "rationals":
            raise NeedsField("Heisenberg construction needs rational coefficients")
        if law.trunc < 3 * W:
            raise ValueError(
                f"law truncation {law.trunc} too small for weight cap {W}; "
                f"need at least {3 * W}")
        super().__init__(law)
        self.K = K
        self.W = W
        self._FL = law.as_laurent("z", "w")
        self._FWZ = self._FL.reorder(("w", "z"))
        self._pow_wz = {}
        self._pow_zw = {}
        self._smono = {}
        self.generator = {(-1,): Fraction(1)}
        # precompute the shift images of the weight basis; these rows are the
        # spanning set for the quotient modulus and the per-weight matrices
        for mono in self.basis_monomials(W):
            for n in range(0, W + 1):
                self._shift_mono(n, mono)

    # -- F power caches ------------------------------------------------------

    def f_power_wz(self, n):
        if n not in self._pow_wz:
            self._pow_wz[n] = self._FWZ.int_power(n)
        return self._pow_wz[n]

    def f_power_zw(self, n):
        if n not in self._pow_zw:
            self._pow_zw[n] = self._FL.int_power(n)
        return self._pow_zw[n]

    def beta(self, j, k, m):
        """z^k w^(-m-1) coefficient of the w-dominant expansion of F^(-j-1)."""
        g = self.f_power_wz(-j - 1)
        e = (-m - 1, k)
        if not g.reliable_at(e):
            raise WindowMiss(
                f"shift coefficient ({j},{k},{m}) beyond certified truncation")
        return g.coefficient(e)

    # -- basis ---------------------------------------------------------------

    def basis_monomials(self, W=None):
        """Monomials of weight <= W with parts at most K, weight-then-lex order."""
        W = self.W if W is None else W
        out = [()]
        seen = {()}
        frontier = [()]
        while frontier:
            nxt = []
            for m in frontier:
                low = m[0] if m else -1
                for j in range(-1, max(low, -self.K) - 1, -1):
                    cand = tuple(sorted(m + (j,)))
                    if mono_weight(cand) <= W and cand not in seen:
                        seen.add(cand)
                        out.append(cand)
                        nxt.append(cand)
            frontier = nxt
        out.sort(key=lambda m: (mono_weight(m), m))
        return out

    # -- shift ---------------------------------------------------------------

    def _shift_mono(self, n, mono):
        key = (n, mono)
        if key in self._smono:
            return self._smono[key]
        if not mono:
            r = {(): Fraction(1)} if n == 0 else {}
            self._smono[key] = r
            return r
        m = mono[0]
        rest = tuple(mono[1:])
        out = {}
        for k in range(n + 1):
            sub = self._shift_mono(n - k, rest)
            if not sub:
                continue
            for j in range(m - n - 1, state_weight(sub) + 1):
                if j == 0:
                    continue
                c = self.beta(j, k, m)
                if c:
                    out = st_add(out, st_scale(b_apply(j, sub), c))
        self._smono[key] = out
        return out

    def shift(self, n, s):
        out = {}
        for mono, c in s.items():
            out = st_add(out, st_scale(self._shift_mono(n, mono), c))
        return out

    def shift_matrix(self, n, W=None):
        """Rows {input monomial: output state} of S^(n) on the weight basis."""
        W = self.W if W is None else W
        return {mono: self._shift_mono(n, mono) for mono in self.basis_monomials(W)}

    # -- the partial field map ----------------------------------------------

    def y_defined(self, a):
        return all(m in ((), (-1,)) for m in a)

    def _split(self, a):
        if not self.y_defined(a):
            raise YUndefined(f"Y not declared on {state_text(a)}")
        return a.get((), Fraction(0)), a.get((-1,), Fraction(0))

    def y_kmin(self, a, c):
        self._split(a)
        return -state_weight(c) - 1

    def y_coeff(self, a, c, k):
        """Coefficient of z^k in Y(a,z)c."""
        alpha, beta = self._split(a)
        out = {}
        if alpha and k == 0:
            out = st_scale(c, alpha)
        if beta:
            out = st_add(out, st_scale(b_apply(-k - 1, c), beta))
        return out

    def samples(self):
        return [self.vacuum, self.generator]


class TrivialAlgebra(VertexFAlgebra):
    """Axiom-checker fixture: the base ring plus one square-zero nilpotent.

    States are r*vac + s*eps with eps^2 = 0, Y(a,z)b = (S(z)a) * b, and the
    honest shift is the identity (S^(0) = id, higher components zero), making
    every axiom hold with N = M = 0.  With corrupt=True the higher shift
    components instead act as the projection onto the nilpotent line, which
    breaks translation covariance and weak associativity in a way the
    checkers must localize.
    """

    EPS = ("e",)

    def __init__(self, law, corrupt=False):
        if law.ring.kind != "rationals":
            raise NeedsField("fixture uses exact rational states")
        super().__init__(law)
        self.corrupt = corrupt
        self.eps = {self.EPS: Fraction(1)}

    def weight(self, s):
        return 0

    def basis_monomials(self, W=None):
        return [(), self.EPS]

    def mul(self, a, b):
        a0, a1 = a.get((), Fraction(0)), a.get(self.EPS, Fraction(0))
        b0, b1 = b.get((), Fraction(0)), b.get(self.EPS, Fraction(0))
        out = {}
        if a0 * b0:
            out[()] = a0 * b0
        s = a0 * b1 + a1 * b0
        if s:
            out[self.EPS] = s
        return out

    def shift(self, n, s):
        if n == 0:
            return dict(s)
        if self.corrupt:
            c = s.get(self.EPS, Fraction(0))
            return {self.EPS: c} if c else {}
        return {}

    def y_defined(self, a):
        return True

    def y_kmin(self, a, c):
        return 0

    def y_coeff(self, a, c, k):
        if k < 0:
            return {}
        return self.mul(self.shift(k, a), c)

    def samples(self):
        return [self.vacuum,
                st_add(self.vacuum, self.eps),
                {self.EPS: Fraction(2)}]


# -- quotient and Lie bracket -------------------------------------------------


class ShiftQuotient:
    """Reduced row form of the span of all S^(n)(V), n >= 1, up to weight W.

    Coordinates are monomials ordered by (weight, lex); reduction against the
    pivot rows yields a canonical representative, so class equality is plain
    dict equality of representatives.
    """

    def __init__(self, A, W):
        if A.ring.kind != "rationals":
            raise NeedsField("quotient reduction needs a field")
        self.A = A
        self.W = W
        rows = []
        for mono in A.basis_monomials(W):
            st = {mono: Fraction(1)}
            for n in range(1, W + 1):
                img = A.shift(n, st)
                if img:
                    rows.append(img)
        self.pivots = {}
        for row in rows:
            self._insert(row)

    def _lead(self, s):
        return min(s, key=lambda m: (mono_weight(m), m))

    def _insert(self, row):
        row = self.reduce_raw(row)
        if not row:
            return
        lead = self._lead(row)
        row = st_scale(row, 1 / row[lead])
        # back-substitute into existing pivot rows to keep the form reduced
        for piv, prow in list(self.pivots.items()):
            c = prow.get(lead, Fraction(0))
            if c:
                self.pivots[piv] = st_sub(prow, st_scale(row, c))
        self.pivots[lead] = row

    def reduce_raw(self, s):
        out = dict(s)
        while out:
            hit = None
            for m in out:
                if m in self.pivots:
                    hit = m
                    break
            if hit is None:
                break
            out = st_sub(out, st_scale(self.pivots[hit], out[hit]))
        return out

    def reduce(self, s):
        return LieClass(self.reduce_raw(s), self)

    def rank(self):
        return len(self.pivots)


@dataclass
class LieClass:
    """A canonical representative in V modulo the shift image span."""

    rep: dict
    quotient: ShiftQuotient = field(repr=False, compare=False)

    def is_zero(self):
        return not self.rep

    def __eq__(self, other):
        return isinstance(other, LieClass) and self.rep == other.rep

    def __add__(self, other):
        return self.quotient.reduce(st_add(self.rep, other.rep))

    def to_json(self):
        return {"rep": state_to_json(self.rep)}

    def __repr__(self):
        return f"LieClass({state_text(self.rep)})"


def _quotient(A, W):
    cache = getattr(A, "_quotients", None)
    if cache is None:
        cache = A._quotients = {}
    if W not in cache:
        cache[W] = ShiftQuotient(A, W)
    return cache[W]


def quotient_reduce(A, state, W=None):
    W = getattr(A, "W", 6) if W is None else W
    return _quotient(A, W).reduce(state)


def _pf_coeff(law, i):
    return law.pF.coefficient((i,))


def bracket_raw(A, a, b):
    """Res^F Y(a,z)b: the z^(-1) coefficient of Y(a,z)b * p_F(z)."""
    law = A.law
    out = {}
    for k in range(A.y_kmin(a, b), 0):
        yk = A.y_coeff(a, b, k)
        if not yk:
            continue
        c = _pf_coeff(law, -1 - k)
        if c:
            out = st_add(out, st_scale(yk, c))
    return out


def lie_bracket(A, a, b, W=None):
    return quotient_reduce(A, bracket_raw(A, a, b), W)


def shifted_bracket_series(A, a, b, mmax):
    """w-coefficients of Res^F_z Y(a, F(z,w))b dz for 0 <= m <= mmax.

    The w^m coefficient realizes [S^(m)a, b] through translation covariance;
    the theorem's descent property says these vanish for m >= 1, and the m=0
    entry is the plain bracket.
    """
    law = A.law
    kmin = A.y_kmin(a, b)
    out = []
    for m in range(mmax + 1):
        d = {}
        for k in range(kmin, m):
            yk = A.y_coeff(a, b, k)
            if not yk:
                continue
            g = A.f_power_zw(k) if hasattr(A, "f_power_zw") \
                else law.as_laurent("z", "w").int_power(k)
            r = law.ring.zero()
            for i in range(0, m - k):
                e = (-1 - i, m)
                if not g.reliable_at(e):
                    raise WindowMiss(f"descent cell {e} beyond certified truncation")
                r = law.ring.add(r, law.ring.mul(_pf_coeff(law, i),
                                                 g.coefficient(e)))
            if r:
                d = st_add(d, st_scale(yk, r))
        out.append(d)
    return out


def field_skew_defect(A, a, b, emax=None):
    """Coefficients of Y(a,z)b - S(z) Y(b, iota(z))a on a certified z-range.

    Returns (defect dict e -> state, emin, emax).  A zero defect on the range
    is the field-level skew symmetry; nonzero entries are reported, not
    hidden, because the bracket antisymmetry argument runs through this
    identity.
    """
    law = A.law
    if emax is None:
        emax = getattr(A, "W", 4) + 1
    kmin_ab = A.y_kmin(a, b)
    kmin_ba = A.y_kmin(b, a)
    emin = min(kmin_ab, kmin_ba)
    iota = law.iota.as_laurent()
    depth = 3 * law.trunc
    H = {}
    for k in range(kmin_ba, emax + 1):
        yk = A.y_coeff(b, a, k)
        if not yk:
            continue
        if k >= 0:
            ip = iota.int_power(k)
        else:
            ip = iota.int_power(k, floors=(-depth,))
        for e in range(max(k, emin), emax + 1):
            if not ip.reliable_at((e,)):
                raise WindowMiss(f"iota power cell ({k},{e}) beyond truncation")
            c = ip.coefficient((e,))
            if c:
                H[e] = st_add(H.get(e, {}), st_scale(yk, c))
    defect = {}
    for e in range(emin, emax + 1):
        rhs = {}
        for n in range(0, e - emin + 1):
            hf = H.get(e - n)
            if hf:
                rhs = st_add(rhs, A.shift(n, hf))
        d = st_sub(A.y_coeff(a, b, e), rhs)
        if d:
            defect[e] = d
    return defect, emin, emax


def _residue_of_field(law, coeffs):
    """Res^F of a z-series given as {exponent: state} (certified below -1)."""
    out = {}
    for e, s in coeffs.items():
        if e > -1:
            continue
        c = _pf_coeff(law, -1 - e)
        if c:
            out = st_add(out, st_scale(s, c))
    return out


def lie_axiom_check(A, samples=None, W=None, mmax=4):
    """Descent, the proof's Jacobi variant, and antisymmetry of the bracket.

    Antisymmetry [a,b] + [b,a] = 0 is asserted on pairs whose field-level
    skew defect vanishes; on every pair (including defective ones) the exact
    transfer identity class([a,b] + [b,a]) = class(Res^F defect) is checked,
    which is what the skew axiom actually contributes to the theorem.  The
    defective pairs are listed in the report.
    """
    if samples is None:
        samples = A.samples()
    W = getattr(A, "W", 6) if W is None else W
    law = A.law
    name = law.name
    Q = _quotient(A, W)

    # descent: [S^(m)a, b] = 0 exactly; [a, S^(m)b] lands in the modulus on
    # pairs satisfying shift conjugation (the second-slot argument moves the
    # shift through Y, which is exactly what a conjugation defect breaks)
    conj_skipped = []
    for i, a in enumerate(samples):
        for j, b in enumerate(samples):
            series = shifted_bracket_series(A, a, b, mmax)
            if series[0] != bracket_raw(A, a, b):
                return Report("lie/descent_base", name, {"m": 0},
                              _fail(A.adapter, None, series[0],
                                    bracket_raw(A, a, b)))
            conj_ok, _ = shift_conjugation_defect(A, a, b)
            if not conj_ok:
                conj_skipped.append([i, j])
            for m in range(1, mmax + 1):
                if series[m]:
                    return Report("lie/descent", name, {"m": m},
                                  _fail(A.adapter, None, series[m], {}))
                shifted = A.shift(m, b)
                if not conj_ok or not shifted:
                    continue
                if not Q.reduce(bracket_raw(A, a, shifted)).is_zero():
                    return Report("lie/descent_second", name, {"m": m},
                                  _fail(A.adapter, None,
                                        bracket_raw(A, a, shifted), {}))

    # antisymmetry, scoped by the field-level skew defect
    defect_pairs = []
    clean_pairs = 0
    for i, a in enumerate(samples):
        for j, b in enumerate(samples):
            defect, emin, emax = field_skew_defect(A, a, b, emax=W + 1)
            anti = st_add(bracket_raw(A, a, b), bracket_raw(A, b, a))
            transfer = _residue_of_field(law, defect)
            if Q.reduce(anti) != Q.reduce(transfer):
                return Report("lie/skew_transfer", name, {"pair": [i, j]},
                              _fail(A.adapter, None, anti, transfer))
            if defect:
                defect_pairs.append([i, j])
            else:
                clean_pairs += 1
                if not Q.reduce(anti).is_zero():
                    return Report("lie/antisymmetry", name, {"pair": [i, j]},
                                  _fail(A.adapter, None, anti, {}))

    # Jacobi variant [a,[b,c]] - [b,[a,c]] = -[[b,a],c]
    triples = 0
    for a in samples:
        for b in samples:
            for c in samples:
                ba = bracket_raw(A, b, a)
                if not A.y_defined(ba):
                    raise YUndefined(
                        f"inner bracket {state_text(ba)} outside the Y domain")
                lhs = st_sub(bracket_raw(A, a, bracket_raw(A, b, c)),
                             bracket_raw(A, b, bracket_raw(A, a, c)))
                rhs = st_neg(bracket_raw(A, ba, c))
                if Q.reduce(lhs) != Q.reduce(rhs):
                    return Report("lie/jacobi_variant", name, None,
                                  _fail(A.adapter, None, lhs, rhs))
                triples += 1
    return Report("lie_axioms", name, {"W": W, "mmax": mmax},
                  details={"triples": triples,
                           "antisymmetry_pairs": clean_pairs,
                           "skew_defect_pairs": defect_pairs,
                           "conjugation_defect_pairs": conj_skipped,
                           "modulus_rank": Q.rank()})


# -- state-valued windows -----------------------------------------------------
#
# Every checker below reduces to finite grids of states: the cell values are
# exact (each one is a finite sum of mode applications), so the windows carry
# max_total=None and certification comes purely from the requested box.


def _fpow_zw(A, k, zlo=None):
    # default floors of a negative power reach -trunc; grids with deeper
    # box lows must ask for the floor explicitly
    if k < 0 and zlo is not None and zlo < -A.law.trunc:
        deep = A.__dict__.setdefault("_fpow_zw_deep", {})
        ent = deep.get(k)
        if ent is None or ent[0] > zlo:
            g = A.law.as_laurent("z", "w").int_power(k, floors=(zlo, None))
            deep[k] = (zlo, g)
        return deep[k][1]
    if hasattr(A, "f_power_zw"):
        return A.f_power_zw(k)
    cache = getattr(A, "_fpow_zw_cache", None)
    if cache is None:
        cache = A._fpow_zw_cache = {"base": A.law.as_laurent("z", "w")}
    if k not in cache:
        cache[k] = cache["base"].int_power(k)
    return cache[k]


def op_product_grid(A, a, b, c, box):
    """Y(a,z) Y(b,w) c on the box: cell (i,j) = a_(coeff i) of b_(coeff j) c."""
    (zlo, zhi), (wlo, whi) = box
    coeffs = {}
    for j in range(max(wlo, A.y_kmin(b, c)), whi + 1):
        inner = A.y_coeff(b, c, j)
        if not inner:
            continue
        for i in range(max(zlo, A.y_kmin(a, inner)), zhi + 1):
            v = A.y_coeff(a, inner, i)
            if v:
                coeffs[(i, j)] = v
    return BilateralWindow(A.adapter, ("z", "w"), coeffs, box, _clean=True)


def shift_grid(A, fdict, box):
    """S(w) applied to a z-series of states {e: state}: cell (e+0, n)."""
    (zlo, zhi), (wlo, whi) = box
    coeffs = {}
    for e, s in fdict.items():
        for n in range(max(0, wlo), whi + 1):
            if not (zlo <= e <= zhi):
                continue
            v = A.shift(n, s)
            if v:
                coeffs[(e, n)] = v
    return BilateralWindow(A.adapter, ("z", "w"), coeffs,
                           [(zlo, zhi), (max(0, wlo), whi)], _clean=True)


def y_at_group_law_grid(A, a, series, box, tot_cap=None):
    """i_{z,w} Y(a, F(z,w)) applied to a w-series of states {n: state}.

    series must hold every w-coefficient with index <= box w-top.  Cell
    (i,j) collects y_coeff(a, series[n], k) * [F^k]_(i, j-n) over the finite
    range n <= j, k <= i+j-n; the z-dominant power table certifies each
    lookup or raises WindowMiss.  tot_cap skips box cells above that total
    degree and records the cap as the window's max_total, which keeps deep
    box corners from demanding power cells beyond the truncation.
    """
    (zlo, zhi), (wlo, whi) = box
    coeffs = {}
    for n, s in series.items():
        if n > whi or not s:
            continue
        kmin = A.y_kmin(a, s)
        ktop = zhi + whi - n if tot_cap is None else tot_cap - n
        for k in range(kmin, ktop + 1):
            yk = A.y_coeff(a, s, k)
            if not yk:
                continue
            g = _fpow_zw(A, k, zlo=zlo)
            for i in range(zlo, zhi + 1):
                for j in range(max(wlo, n), whi + 1):
                    if i + j - n < k:
                        continue
                    if tot_cap is not None and i + j > tot_cap:
                        continue
                    e = (i, j - n)
                    if not g.reliable_at(e):
                        raise WindowMiss(
                            f"group-law power cell {e} of F^{k} beyond truncation")
                    cf = g.coefficient(e)
                    if cf:
                        coeffs[(i, j)] = st_add(coeffs.get((i, j), {}),
                                                st_scale(yk, cf))
    coeffs = {e: v for e, v in coeffs.items() if v}
    return BilateralWindow(A.adapter, ("z", "w"), coeffs, box,
                           max_total=tot_cap, _clean=True)


def shift_conjugation_defect(A, a, b, box=((-8, 4), (0, 4))):
    """Window discrepancy of S(w) Y(a,z)b against i_{z,w} Y(a,F(z,w)) S(w)b.

    Returns (ok, first_bad_cell).  This is the meromorphicity identity that
    the bracket's second-argument descent and the c = vacuum associativity
    route rely on; it can genuinely fail for the partial generator field away
    from the additive law, so callers scope their conclusions by it.
    """
    (zlo, zhi), (wlo, whi) = box
    lhs = shift_grid(A, A.y_field(a, b, zhi), box)
    series = {n: A.shift(n, b) for n in range(0, whi + 1)}
    rhs = y_at_group_law_grid(A, a, series, box)
    ok, bad, _ = lhs.agrees_with(rhs)
    return ok, bad


def _lifted_f_power(A, n, vars=("z", "w")):
    g = A.law.as_laurent(*vars).int_power(n)
    return lift_laurent(A.adapter, g)


def mul_complete_lower(win, g):
    """Product of a window with true lower support bounds by a tame factor.

    Assumes the window's box lows are genuine support bounds of the bilateral
    series it represents (not mere view cutoffs) and that g has componentwise
    nonnegative exponents and is complete below its truncation.  Then every
    box cell only ever receives contributions from stored cells, so the box
    survives unchanged and only a total-degree cap (low corner + g.trunc)
    appears.  The generic mul_laurent cannot know the lows are real and would
    shrink the box by the factor's full exponent spread instead.
    """
    if any(f is not None for f in g.floors):
        raise ValueError("factor must be complete")
    if any(min(e[i] for e in g.coeffs) < 0 for i in range(len(g.vars))
           for _ in [0] if g.coeffs):
        raise ValueError("factor must have nonnegative exponents")
    R = win.ring
    out = {}
    for e1, c1 in win.coeffs.items():
        for e2, c2 in g.coeffs.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            s = R.add(out.get(e, R.zero()), R.mul(c1, c2))
            if R.is_zero(s):
                out.pop(e, None)
            else:
                out[e] = s
    # cells can only miss contributions pairing a factor term beyond g.trunc
    # with a window cell below total (cell - g.trunc); the least possible
    # total of a true window cell is bounded by the stored support (complete
    # inside the box) and by the box geometry outside it
    lows = [lo for lo, hi in win.reliable]
    lo_tot = sum(lows)
    stored_min = min((sum(e) for e in win.coeffs), default=None)
    outside_min = min(hi + 1 + lo_tot - lo for lo, hi in win.reliable)
    min_true = outside_min if stored_min is None else min(stored_min, outside_min)
    # uncertified window cells sit above win.max_total and the complete
    # factor only raises totals, so the product ceiling shifts up by the
    # factor's least total degree
    g_min = min((sum(e) for e in g.coeffs), default=0)
    ceil = None if win.max_total is None else win.max_total + g_min
    mt = BilateralWindow._merge_total(ceil, min_true + g.trunc - 1)
    return BilateralWindow(R, win.vars, out, win.reliable, max_total=mt)


def _escaped_lowest_part(diff, box):
    """First cell of the lowest total-degree diagonal when that diagonal sits
    strictly inside the box top, else None.

    Both grids feeding ``diff`` capture every true cell componentwise below
    the box highs, so contributions to any box cell come from stored cells
    only.  If the lowest diagonal stays strictly inside the top edges, the
    extreme coefficient of F^N times that diagonal lands at a box cell for
    every N up to the remaining headroom, and for larger N the support has
    merely been pushed past the top edge.  Either way no F^N multiple can
    vanish on the box, so a window "pass" would be an artifact.  A diagonal
    touching the top edge is the genuinely bilateral situation (delta-like
    discrepancies enter the box from outside) and window semantics stand.
    """
    if not diff.coeffs:
        return None
    d = min(i + j for (i, j) in diff.coeffs)
    p = [cell for cell in diff.coeffs if sum(cell) == d]
    (_, zhi), (_, whi) = diff.reliable
    if max(i for i, _ in p) < zhi and max(j for _, j in p) < whi:
        return min(p)
    return None


def _w_route_grid(A, inner, c, box):
    """Y(Y(a,z)b, w)c from the inner field {e: a_e b}: the w-dominant route.

    Uses the creation consequence Y(x,w)vac = S(w)x when c is a vacuum
    multiple; otherwise applies Y directly and raises YUndefined if an inner
    coefficient leaves the partial domain.
    """
    (zlo, zhi), (wlo, whi) = box
    if all(m == () for m in c):
        scale = c.get((), Fraction(0))
        return shift_grid(A, {e: st_scale(s, scale) for e, s in inner.items()},
                          box)
    coeffs = {}
    for e, s in inner.items():
        if not A.y_defined(s):
            raise YUndefined(
                f"coefficient {state_text(s)} of the inner field is outside "
                "the Y domain and c is not a vacuum multiple")
        for j in range(max(wlo, A.y_kmin(s, c)), whi + 1):
            v = A.y_coeff(s, c, j)
            if v:
                coeffs[(e, j)] = v
    return BilateralWindow(A.adapter, ("z", "w"), coeffs, box, _clean=True)


def weak_associativity_order(A, a, b, c, Nmax=8, top=(4, 4)):
    """Minimal N with F(z,w)^N (Y(Y(a,z)b,w)c) = F^N i_{z,w}Y(a,F(z,w))Y(b,w)c.

    The left side needs Y on the coefficients of Y(a,z)b; when c is a
    multiple of the vacuum the creation consequence Y(x,w)vac = S(w)x is used
    instead, which stays inside the partial domain.  The comparison box has
    highs from ``top`` and its lows are derived from the true support bounds
    of both routes (total degree for the group-law route), so the F^N factor
    can be applied with mul_complete_lower.  Returns (N, None) on success and
    (None, first_bad_cell) when no N <= Nmax works.
    """
    zhi, whi = top
    inner = A.y_field(a, b, zhi)
    series = {}
    for n in range(A.y_kmin(b, c), whi + 1):
        v = A.y_coeff(b, c, n)
        if v:
            series[n] = v
    min_tot = min((n + A.y_kmin(a, s) for n, s in series.items()), default=-1)
    wlo = min(0, min(series, default=0))
    zlo = min(min_tot - whi, min(inner, default=0), A.y_kmin(a, b))
    box = ((zlo, zhi), (wlo, whi))
    lhs = _w_route_grid(A, inner, c, box)
    rhs = y_at_group_law_grid(A, a, series, box)
    diff = lhs - rhs
    bad = _escaped_lowest_part(diff, box)
    if bad is not None:
        return None, bad
    for N in range(0, Nmax + 1):
        if N == 0:
            prod = diff
        else:
            prod = mul_complete_lower(diff, _lifted_f_power(A, N))
        if prod.is_zero_on_window():
            return N, None
        if bad is None:
            bad = min(prod.coeffs)
    return None, bad


def axiom_check(A, which, samples=None, Nmax=8, kmax=None):
    """One of the four defining axioms, certified on finite windows."""
    if samples is None:
        samples = A.samples()
    law = A.law
    name = law.name
    kmax = (getattr(A, "W", 4) + 1) if kmax is None else kmax

    if which == "vacuum_creation":
        for a in samples:
            fld = A.y_field(a, A.vacuum, kmax)
            for e, s in fld.items():
                if e < 0 and s:
                    return Report("axiom/vacuum_creation", name, {"kmax": kmax},
                                  _fail(A.adapter, ("z", e), s, {}))
            if fld.get(0, {}) != a:
                return Report("axiom/vacuum_creation", name, {"kmax": kmax},
                              _fail(A.adapter, ("z", 0), fld.get(0, {}), a))
            for k in range(A.y_kmin(A.vacuum, a), kmax + 1):
                want = a if k == 0 else {}
                if A.y_coeff(A.vacuum, a, k) != want:
                    return Report("axiom/vacuum_creation", name, {"kmax": kmax},
                                  _fail(A.adapter, ("id", k),
                                        A.y_coeff(A.vacuum, a, k), want))
        return Report("axiom/vacuum_creation", name, {"kmax": kmax},
                      details={"samples": len(samples)})

    if which == "translation_covariance":
        for s in samples:
            if A.shift(0, s) != s:
                return Report("axiom/translation_covariance", name, {"part": "S(0)"},
                              _fail(A.adapter, None, A.shift(0, s), s))
        for n in range(1, kmax + 1):
            if A.shift(n, A.vacuum):
                return Report("axiom/translation_covariance", name,
                              {"part": "vacuum", "n": n},
                              _fail(A.adapter, None, A.shift(n, A.vacuum), {}))
        # the shift group law, matrix-exactly on the sample states
        FL = law.as_laurent("z", "w")
        fpow = {n: FL.int_power(n) for n in range(0, kmax + 1)}
        for s in samples:
            for p in range(0, kmax + 1):
                for q in range(0, kmax + 1 - p):
                    got = A.shift(p, A.shift(q, s))
                    want = {}
                    for n in range(0, p + q + 1):
                        cf = fpow[n].coefficient((p, q))
                        if cf:
                            want = st_add(want, st_scale(A.shift(n, s), cf))
                    if got != want:
                        return Report("axiom/translation_covariance", name,
                                      {"part": "group_law", "exps": [p, q]},
                                      _fail(A.adapter, (p, q), got, want))
        # covariance Y(S(w)a, z)b against the group-law substitution; falls
        # back to the creation consequence Y(a,z)vac = S(z)a when shifted
        # samples leave the Y domain
        full = 0
        consequence = 0
        box = ((-kmax - 2, 3), (0, 3))
        for a in samples:
            shifted = {n: A.shift(n, a) for n in range(0, box[1][1] + 1)}
            if all(A.y_defined(s) or not s for s in shifted.values()):
                for b in samples:
                    coeffs = {}
                    for n, sa in shifted.items():
                        if not sa:
                            continue
                        for i in range(max(box[0][0], A.y_kmin(sa, b)),
                                       box[0][1] + 1):
                            v = A.y_coeff(sa, b, i)
                            if v:
                                coeffs[(i, n)] = st_add(coeffs.get((i, n), {}), v)
                    lhs = BilateralWindow(A.adapter, ("z", "w"), coeffs, box,
                                          _clean=True)
                    rhs = y_at_group_law_grid(A, a, {0: b}, box)
                    ok, bad, _ = lhs.agrees_with(rhs)
                    if not ok:
                        return Report("axiom/translation_covariance", name,
                                      {"part": "covariance"},
                                      _fail(A.adapter, bad,
                                            lhs.coeffs.get(bad, {}),
                                            rhs.coeffs.get(bad, {})))
                    full += 1
            else:
                fld = A.y_field(a, A.vacuum, kmax)
                for n in range(0, kmax + 1):
                    if fld.get(n, {}) != A.shift(n, a):
                        return Report("axiom/translation_covariance", name,
                                      {"part": "creation_consequence", "n": n},
                                      _fail(A.adapter, ("w", n), fld.get(n, {}),
                                            A.shift(n, a)))
                consequence += 1
        return Report("axiom/translation_covariance", name, {"kmax": kmax},
                      details={"full_pairs": full,
                               "creation_consequence_samples": consequence})

    if which == "weak_associativity":
        worst = 0
        for a in samples:
            if not A.y_defined(a):
                continue
            for b in samples:
                for c in samples:
                    try:
                        N, bad = weak_associativity_order(A, a, b, c, Nmax=Nmax)
                    except YUndefined:
                        continue
                    if N is None:
                        return Report("axiom/weak_associativity", name,
                                      {"Nmax": Nmax},
                                      _fail(A.adapter, bad, "nonzero", {}))
                    worst = max(worst, N)
        return Report("axiom/weak_associativity", name, {"Nmax": Nmax},
                      details={"minimal_N": worst})

    if which == "skew_symmetry":
        defects = []
        for i, a in enumerate(samples):
            for j, b in enumerate(samples):
                d, emin, emax = field_skew_defect(A, a, b, emax=kmax)
                if d:
                    defects.append({"pair": [i, j],
                                    "first_exponent": min(d)})
        if defects:
            return Report("axiom/skew_symmetry", name, {"kmax": kmax},
                          {"fail": {"defect_pairs": defects}})
        return Report("axiom/skew_symmetry", name, {"kmax": kmax},
                      details={"pairs": len(samples) ** 2})

    raise ValueError(f"unknown axiom {which!r}")


def weak_commutativity_order(A, a, b, c, Mmax=8, top=(4, 4), factor="group"):
    """Minimal M such that F(z, iota w)^M kills the ordering discrepancy of
    Y(a,z)Y(b,w)c on a box with highs ``top``; factor="classical" uses
    (z-w)^M instead (the two differ by a unit and must give the same M)."""
    zhi, whi = top
    wlo1 = A.y_kmin(b, c)
    zlo1 = 0
    g1c = {}
    for j in range(wlo1, whi + 1):
        inner = A.y_coeff(b, c, j)
        if not inner:
            continue
        zlo1 = min(zlo1, A.y_kmin(a, inner))
        for i in range(A.y_kmin(a, inner), zhi + 1):
            v = A.y_coeff(a, inner, i)
            if v:
                g1c[(i, j)] = v
    zlo2 = A.y_kmin(a, c)
    wlo2 = 0
    g2c = {}
    for i in range(zlo2, zhi + 1):
        inner = A.y_coeff(a, c, i)
        if not inner:
            continue
        wlo2 = min(wlo2, A.y_kmin(b, inner))
        for j in range(A.y_kmin(b, inner), whi + 1):
            v = A.y_coeff(b, inner, j)
            if v:
                g2c[(i, j)] = v
    box = ((min(zlo1, zlo2), zhi), (min(wlo1, wlo2), whi))
    g1 = BilateralWindow(A.adapter, ("z", "w"), g1c, box, _clean=True)
    g2 = BilateralWindow(A.adapter, ("z", "w"), g2c, box, _clean=True)
    diff = g1 - g2
    if _escaped_lowest_part(diff, box) is not None:
        raise NotFound(Mmax, what="commutativity order")
    R = A.ring
    if factor == "classical":
        base = LaurentElement(R, ("z", "w"),
                              {(1, 0): R.one(), (0, 1): R.neg(R.one())},
                              A.law.trunc)
    else:
        base = A.law.f_z_iota_w("z", "w")
    for M in range(0, Mmax + 1):
        prod = diff if M == 0 else mul_complete_lower(
            diff, lift_laurent(A.adapter, base.int_power(M)))
        if prod.is_zero_on_window():
            return M
    raise NotFound(Mmax, what="commutativity order")


# -- meromorphicity -----------------------------------------------------------


@dataclass
class MeromorphicityPair:
    """The common Laurent series F^N i_{z,w}Y(a,F(z,w))Y(b,w)c with its
    coherence checks.

    checks entries are Reports; a value of None means the check needed a Y
    value outside the partial domain and was skipped (recorded, not hidden).
    """

    p: object
    N: int
    law: str
    checks: dict

    @property
    def ok(self):
        return all(r is None or r.ok for r in self.checks.values())

    def to_json(self):
        return {
            "law": self.law,
            "N": self.N,
            "p": self.p.to_json(),
            "checks": {k: (None if r is None else r.to_json())
                       for k, r in self.checks.items()},
        }


def _group_route_grid(A, a, b, c, top, tot_cap=None):
    """i_{z,w} Y(a, F(z,w)) Y(b,w)c on a box sized so the lows are true
    support bounds (total degree min over the series, spread to the w-top)."""
    zhi, whi = top
    series = {}
    for n in range(A.y_kmin(b, c), whi + 1):
        v = A.y_coeff(b, c, n)
        if v:
            series[n] = v
    min_tot = min((n + A.y_kmin(a, s) for n, s in series.items()), default=-1)
    wlo = min(0, min(series, default=0))
    box = ((min_tot - whi, zhi), (wlo, whi))
    return y_at_group_law_grid(A, a, series, box, tot_cap=tot_cap), series


def meromorphicity_pair(A, a, b, c, N=None, top=(3, 3)):
    """p_{a,b,c} = F^N times the group-law route, with its coherence checks.

    N defaults to the weak commutativity order (the annihilation order of
    the ordering discrepancy, which is what makes the fraction p / F^N well
    defined).  Three checks are run:

      n_independence     p_{N+1} agrees with p_N * F on the box;
      w_dominant         F^N Y(Y(a,z)b,w)c reproduces p (the other
                         expansion); skipped (None) when the inner states
                         leave the Y domain and c is not a vacuum multiple;
      operator_product   the substitution z -> F(v, iota w) divided by v^N
                         reproduces Y(a,v)Y(b,w)c cell by cell.

    ``top`` bounds the comparison box of the operator_product check; the p
    grid itself is computed on a wider box so every substitution cell is a
    certified finite sum.
    """
    if N is None:
        N = weak_commutativity_order(A, a, b, c)
    law = A.law
    name = law.name
    vhi, whi = top
    kbc = A.y_kmin(b, c)
    # substitution cells (u, j2) need p cells with w <= whi and
    # z <= u + N + whi - j, so size the p grid accordingly
    ztop = vhi + N + whi - min(0, kbc)
    g, series = _group_route_grid(A, a, b, c, (ztop, whi))
    box = g.reliable
    p = g if N == 0 else mul_complete_lower(g, _lifted_f_power(A, N))
    checks = {}

    p_up = mul_complete_lower(g, _lifted_f_power(A, N + 1))
    p_mul = mul_complete_lower(p, _lifted_f_power(A, 1))
    ok, bad, surv = p_up.agrees_with(p_mul)
    if not ok:
        checks["n_independence"] = Report(
            "meromorphicity/n_independence", name, {"N": N},
            _fail(A.adapter, bad, p_up.coeffs.get(bad, {}),
                  p_mul.coeffs.get(bad, {})))
    else:
        checks["n_independence"] = Report(
            "meromorphicity/n_independence", name, [list(r) for r in surv],
            details={"N": N})

    try:
        inner = A.y_field(a, b, box[0][1])
        lhs = _w_route_grid(A, inner, c, box)
        lhsN = lhs if N == 0 else mul_complete_lower(lhs, _lifted_f_power(A, N))
        ok, bad, surv = lhsN.agrees_with(p)
        if not ok:
            checks["w_dominant"] = Report(
                "meromorphicity/w_dominant", name, {"N": N},
                _fail(A.adapter, bad, lhsN.coeffs.get(bad, {}),
                      p.coeffs.get(bad, {})))
        else:
            checks["w_dominant"] = Report(
                "meromorphicity/w_dominant", name, [list(r) for r in surv],
                details={"N": N})
    except YUndefined:
        checks["w_dominant"] = None

    checks["operator_product"] = _substituted_p_check(A, a, b, c, p, N, top)
    return MeromorphicityPair(p, N, name, checks)


def _substituted_p_check(A, a, b, c, p, N, top):
    """i_{v,w} p(F(v, iota w), w) * v^{-N} against Y(a,v)Y(b,w)c.

    Since F(F(v, iota w), w) = v, this is the statement that the fraction
    p / F^N recovers the operator product in the v-dominant expansion.  Each
    output cell is a finite sum: the substituted power F(v, iota w)^i has
    nonnegative w-exponents and total degree at least i.
    """
    law = A.law
    R = A.ring
    name = law.name
    vhi, whi = top
    kbc = A.y_kmin(b, c)
    vlo = min(e[0] for e in p.coeffs) - N if p.coeffs else -N
    cmp_box = ((vlo, vhi), (kbc, whi))
    direct = op_product_grid(A, a, b, c, cmp_box)

    fvw = law.f_z_iota_w("v", "w")
    powers = {}
    coeffs = {}
    mt = p.max_total
    for (i, j), pij in p.coeffs.items():
        if i not in powers:
            powers[i] = fvw.int_power(i)
        P = powers[i]
        for u in range(vlo, vhi + 1):
            e1 = u + N
            for j2 in range(max(kbc, j), whi + 1):
                e = (e1, j2 - j)
                if e1 + (j2 - j) < i:
                    continue
                if not P.reliable_at(e):
                    raise WindowMiss(
                        f"substituted power cell {e} of F^{i} beyond truncation")
                cf = P.coefficient(e)
                if R.is_zero(cf):
                    continue
                coeffs[(u, j2)] = st_add(coeffs.get((u, j2), {}),
                                         st_scale(pij, cf))
    coeffs = {e: v for e, v in coeffs.items() if v}
    # same variable labels as the direct grid (v plays the role of z there)
    sub = BilateralWindow(A.adapter, ("z", "w"), coeffs, cmp_box,
                          max_total=None if mt is None else mt - N)
    ok, bad, surv = sub.agrees_with(direct)
    if not ok:
        return Report("meromorphicity/operator_product", name, {"N": N},
                      _fail(A.adapter, bad, sub.coeffs.get(bad, {}),
                            direct.coeffs.get(bad, {})))
    return Report("meromorphicity/operator_product", name,
                  [list(r) for r in surv], details={"N": N})


# -- the three-term delta Jacobi identity for Y -------------------------------


def _delta_elements(A):
    if not hasattr(A, "_delta_elems"):
        fzu = A.law.f_z_iota_w("z", "u")
        da = fzu.int_power(-1)
        db = fzu.reorder(("u", "z")).int_power(-1).reorder(("z", "u"))
        A._delta_elems = (da, db)
    return A._delta_elems


def _delta_coeff(A, m, n):
    """out^m u^n coefficient of out^{-1} delta_F(u/out), certified."""
    da, db = _delta_elements(A)
    e = (m, n)
    if not (da.reliable_at(e) and db.reliable_at(e)):
        raise WindowMiss(f"delta cell {e} beyond certified truncation")
    R = da.ring
    return R.add(da.coefficient(e), R.neg(db.coefficient(e)))


def _fzi_pow(A, dominant_first, k):
    """F(x, iota y)^k with x dominant (dominant_first) or y dominant,
    exponents always reported in (x, y) order."""
    cache = A.__dict__.setdefault("_fzi_pow_cache", {})
    key = (dominant_first, k)
    if key not in cache:
        base = A.law.f_z_iota_w("x", "y")
        if dominant_first:
            cache[key] = base.int_power(k)
        else:
            cache[key] = base.reorder(("y", "x")).int_power(k).reorder(("x", "y"))
    return cache[key]


def jacobi_identity_check(A, a, b, c, B=4, N=None):
    """The three-term F-delta Jacobi identity for Y on the box [-B, B]^3.

    In variables (z0, z1, z2):

        i_{z1,z0} z2^{-1} d_F(F(z1,i z0)/z2) Y(Y(a,z0)b, z2)c
          = i_{z1,z2} z0^{-1} d_F(F(z1,i z2)/z0) Y(a,z1)Y(b,z2)c
          - i_{z2,z1} z0^{-1} d_F(F(z1,i z2)/z0) Y(b,z2)Y(a,z1)c.

    The right side is contracted directly against the Y products.  The
    iterated composition on the left is not defined for a partial Y, so the
    left side is given its meaning through the meromorphic kernel: with
    phi(z0,z1,z2) = p_{a,b,c}(z0,z2) / z1^N the left term is the delta tower
    applied to phi, which is what the identity's proof reduces it to.  Every
    output cell is a certified finite sum; the kernel must be componentwise
    bounded below in z0 for the contraction to terminate, and a violation is
    reported as a failure of meromorphicity.
    """
    law = A.law
    R = A.ring
    name = law.name
    kbc = A.y_kmin(b, c)
    kac = A.y_kmin(a, c)
    cap = 3 * B + 1

    g1 = {}
    for j2 in range(kbc, B + 1):
        inner = A.y_coeff(b, c, j2)
        if not inner:
            continue
        for j1 in range(A.y_kmin(a, inner), cap - j2 + 1):
            v = A.y_coeff(a, inner, j1)
            if v:
                g1[(j1, j2)] = v
    g2 = {}
    for j1 in range(kac, B + 1):
        inner = A.y_coeff(a, c, j1)
        if not inner:
            continue
        for j2 in range(A.y_kmin(b, inner), cap - j1 + 1):
            v = A.y_coeff(b, inner, j2)
            if v:
                g2[(j1, j2)] = v
    if N is None:
        N = weak_commutativity_order(A, a, b, c)
    # kernel cells above this total cannot reach the output box: the delta
    # tower only holds cells of total degree -1 and up
    cap_p = 3 * B + N + 1
    # the w-top of the kernel grid must reach every cell of total <= cap_p,
    # which needs the kernel's global z-low; that low is exactly what
    # meromorphicity asserts, so find it by widening until it stabilizes
    wtop = cap_p + 2
    zmin = None
    p = None
    for _ in range(5):
        g, _series = _group_route_grid(A, a, b, c, (B, wtop),
                                       tot_cap=cap_p - N)
        p = g if N == 0 else mul_complete_lower(g, _lifted_f_power(A, N))
        low = min((e[0] for e in p.coeffs
                   if sum(e) <= cap_p), default=0)
        if low == zmin and cap_p - min(low, 0) + 2 <= wtop:
            break
        zmin = low
        wtop = max(wtop, cap_p - min(low, 0) + 2)
    else:
        return Report("vertex/jacobi", name, [[-B, B]] * 3,
                      {"fail": {"reason":
                                "kernel z-support not bounded below",
                                "z_min_seen": zmin}})
    if p.max_total is not None and p.max_total < cap_p:
        raise WindowMiss(
            f"kernel certified only to total {p.max_total}, need {cap_p}")

    cells = 0
    for e0 in range(-B, B + 1):
        for e1 in range(-B, B + 1):
            for e2 in range(-B, B + 1):
                rhs = {}
                for (j1, j2), v in g1.items():
                    s1, s2 = e1 - j1, e2 - j2
                    if s2 < 0:
                        continue
                    for n in range(-e0 - 1, s1 + s2 + 1):
                        d = _delta_coeff(A, e0, n)
                        if R.is_zero(d):
                            continue
                        P = _fzi_pow(A, True, n)
                        if not P.reliable_at((s1, s2)):
                            raise WindowMiss(
                                f"power cell ({s1},{s2}) of F^{n} beyond "
                                "certified truncation")
                        cf = R.mul(d, P.coefficient((s1, s2)))
                        if not R.is_zero(cf):
                            rhs = st_add(rhs, st_scale(v, cf))
                for (j1, j2), v in g2.items():
                    s1, s2 = e1 - j1, e2 - j2
                    if s1 < 0:
                        continue
                    for n in range(-e0 - 1, s1 + s2 + 1):
                        d = _delta_coeff(A, e0, n)
                        if R.is_zero(d):
                            continue
                        P = _fzi_pow(A, False, n)
                        if not P.reliable_at((s1, s2)):
                            raise WindowMiss(
                                f"power cell ({s1},{s2}) of F^{n} beyond "
                                "certified truncation")
                        cf = R.mul(d, P.coefficient((s1, s2)))
                        if not R.is_zero(cf):
                            rhs = st_sub(rhs, st_scale(v, cf))
                lhs = {}
                for (i, j), pij in p.coeffs.items():
                    s0 = e0 - i
                    if s0 < 0 or i + j > cap_p:
                        continue
                    m2 = e2 - j
                    for n in range(-m2 - 1, e1 + N + s0 + 1):
                        d = _delta_coeff(A, m2, n)
                        if R.is_zero(d):
                            continue
                        P = _fzi_pow(A, True, n)
                        if not P.reliable_at((e1 + N, s0)):
                            raise WindowMiss(
                                f"power cell ({e1 + N},{s0}) of F^{n} beyond "
                                "certified truncation")
                        cf = R.mul(d, P.coefficient((e1 + N, s0)))
                        if not R.is_zero(cf):
                            lhs = st_add(lhs, st_scale(pij, cf))
                if lhs != rhs:
                    return Report("vertex/jacobi", name, [[-B, B]] * 3,
                                  _fail(A.adapter, (e0, e1, e2), lhs, rhs))
                cells += 1
    return Report("vertex/jacobi", name, [[-B, B]] * 3,
                  details={"cells": cells, "N": N})


# -- named constructors and the cocycle ---------------------------------------


def heisenberg_build(law, K=6, W=6):
    """Fock space on K creation modes with weight cap W over the given law."""
    return HeisenbergAlgebra(law, K=K, W=W)


def heisenberg_cocycle(law, f, g):
    """Central-extension cocycle on Laurent polynomials: Res^F (S_1 f) g.

    Computed both as the F-residue of the first hyperderivative of f times g
    and as the classical residue of f' g; the two agree because S_1 f times
    the invariant differential is f'(z) dz, so a disagreement means a bug,
    not a mathematical failure.
    """
    if len(f.vars) != 1 or len(g.vars) != 1:
        raise ValueError("cocycle arguments must be univariate")

    def as_z(h):
        if h.vars == ("z",):
            return h
        return LaurentElement(h.ring, ("z",), dict(h.coeffs), h.trunc,
                              floors=h.floors, _clean=True)

    fz = as_z(f)
    gz = as_z(g)
    s1 = hyperderivative(law, fz, 1)
    lhs = f_residue(law, s1 * gz)
    rhs = (fz.derivative("z") * gz).residue_coeff("z").scalar()
    if not law.ring.eq(lhs, rhs):
        raise MismatchBug(
            f"cocycle routes disagree: {law.ring.to_text(lhs)} vs "
            f"{law.ring.to_text(rhs)}")
    return lhs
