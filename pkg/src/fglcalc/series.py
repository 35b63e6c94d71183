"""Truncated multivariate series arithmetic.

Three computational series kinds:

  PowerSeries      -- finitely supported map from nonnegative exponent vectors,
                      truncated by total degree N (terms of total degree >= N
                      are unknown, not zero).
  LaurentElement   -- integer exponent vectors with a variable *ordering* that
                      records the iterated Laurent ring the element lives in
                      (first variable dominates, i.e. vars (z, w) means the
                      ring of series meromorphic in z inside series in w).
                      Besides the total-degree truncation, each variable may
                      carry a finite reliability floor: coefficients with an
                      exponent below the floor were cut off and are unknown.
  BilateralWindow  -- a finite coefficient box standing for a bilateral series,
                      with a certified-correct interval per variable.

All coefficients are raw ring values owned by a Ring (see ring.py).
"""

from __future__ import annotations

import json
from math import comb

from .ring import NOT_INVERTIBLE, Ring


class OrderingMismatch(Exception):
    pass


class NonConvergentProduct(Exception):
    pass


class NotInvertibleError(Exception):
    pass


class IllegalSubstitution(Exception):
    pass


class NotLocalizable(Exception):
    pass


class DiagonalDivergence(Exception):
    pass


class WindowMiss(Exception):
    pass


class EmptyWindow(Exception):
    pass


def _tot(e):
    return sum(e)


def _revlex_key(e):
    # leading-term order of the iterated ring: last variable is most
    # significant (series variable at the outermost level)
    return tuple(reversed(e))


class PowerSeries:
    """Truncated power series over an exact ring."""

    __slots__ = ("ring", "vars", "coeffs", "trunc")

    def __init__(self, ring, vars, coeffs, trunc, _clean=False):
        self.ring = ring
        self.vars = tuple(vars)
        self.trunc = trunc
        if _clean:
            self.coeffs = coeffs
        else:
            out = {}
            for e, c in coeffs.items():
                e = tuple(e)
                if any(x < 0 for x in e):
                    raise ValueError(f"negative exponent {e} in PowerSeries")
                if _tot(e) >= trunc or ring.is_zero(c):
                    continue
                out[e] = c
            self.coeffs = out

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(ring, vars, trunc):
        return PowerSeries(ring, vars, {}, trunc, _clean=True)

    @staticmethod
    def const(ring, vars, value, trunc):
        z = (0,) * len(vars)
        c = {} if ring.is_zero(value) else {z: value}
        return PowerSeries(ring, vars, c, trunc, _clean=True)

    @staticmethod
    def one(ring, vars, trunc):
        return PowerSeries.const(ring, vars, ring.one(), trunc)

    @staticmethod
    def var(ring, vars, name, trunc):
        e = tuple(1 if v == name else 0 for v in vars)
        if sum(e) != 1:
            raise ValueError(f"{name!r} not in {vars}")
        return PowerSeries(ring, vars, {e: ring.one()}, trunc)

    # -- basics ------------------------------------------------------------

    def _check(self, other):
        if self.ring != other.ring:
            raise OrderingMismatch("coefficient rings differ")
        if self.vars != other.vars:
            raise OrderingMismatch(f"variable orderings differ: {self.vars} vs {other.vars}")

    def coefficient(self, e):
        return self.coeffs.get(tuple(e), self.ring.zero())

    def constant_term(self):
        return self.coefficient((0,) * len(self.vars))

    def is_zero(self):
        return not self.coeffs

    def valuation(self):
        """Minimal total degree of the support (trunc if zero)."""
        if not self.coeffs:
            return self.trunc
        return min(_tot(e) for e in self.coeffs)

    def truncate(self, n):
        n = min(n, self.trunc)
        return PowerSeries(
            self.ring, self.vars,
            {e: c for e, c in self.coeffs.items() if _tot(e) < n},
            n, _clean=True)

    def __eq__(self, other):
        return (
            isinstance(other, PowerSeries)
            and self.ring == other.ring
            and self.vars == other.vars
            and self.trunc == other.trunc
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.vars, self.trunc, len(self.coeffs)))

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        self._check(other)
        t = min(self.trunc, other.trunc)
        R = self.ring
        out = {e: c for e, c in self.coeffs.items() if _tot(e) < t}
        for e, c in other.coeffs.items():
            if _tot(e) >= t:
                continue
            s = R.add(out.get(e, R.zero()), c)
            if R.is_zero(s):
                out.pop(e, None)
            else:
                out[e] = s
        return PowerSeries(R, self.vars, out, t, _clean=True)

    def __neg__(self):
        R = self.ring
        return PowerSeries(R, self.vars, {e: R.neg(c) for e, c in self.coeffs.items()},
                           self.trunc, _clean=True)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check(other)
        R = self.ring
        t = min(self.trunc + other.valuation(), other.trunc + self.valuation())
        out = {}
        for e1, c1 in self.coeffs.items():
            t1 = _tot(e1)
            for e2, c2 in other.coeffs.items():
                if t1 + _tot(e2) >= t:
                    continue
                e = tuple(x + y for x, y in zip(e1, e2))
                s = R.add(out.get(e, R.zero()), R.mul(c1, c2))
                if R.is_zero(s):
                    out.pop(e, None)
                else:
                    out[e] = s
        return PowerSeries(R, self.vars, out, t, _clean=True)

    def scale(self, raw):
        R = self.ring
        out = {}
        for e, c in self.coeffs.items():
            s = R.mul(c, raw)
            if not R.is_zero(s):
                out[e] = s
        return PowerSeries(R, self.vars, out, self.trunc, _clean=True)

    def pow(self, n):
        if n < 0:
            raise ValueError("use invert_unit / as_laurent for negative powers")
        out = PowerSeries.one(self.ring, self.vars, self.trunc + max(0, (n - 1)) * self.valuation() if self.coeffs else self.trunc)
        out = out.truncate(out.trunc)
        for _ in range(n):
            out = out * self
        if n == 0:
            out = PowerSeries.one(self.ring, self.vars, self.trunc)
        return out

    # -- calculus ----------------------------------------------------------

    def derivative(self, name):
        i = self.vars.index(name)
        R = self.ring
        out = {}
        for e, c in self.coeffs.items():
            if e[i] == 0:
                continue
            d = R.mul(c, R.from_int(e[i]))
            if R.is_zero(d):
                continue
            e2 = e[:i] + (e[i] - 1,) + e[i + 1:]
            out[e2] = d
        return PowerSeries(R, self.vars, out, self.trunc - 1, _clean=True)

    def integrate(self, name):
        """Termwise primitive with zero constant term; needs divisibility by n."""
        i = self.vars.index(name)
        R = self.ring
        out = {}
        for e, c in self.coeffs.items():
            e2 = e[:i] + (e[i] + 1,) + e[i + 1:]
            out[e2] = R.divide_by_int(c, e[i] + 1)
        return PowerSeries(R, self.vars, out, self.trunc + 1, _clean=False)

    # -- inversion, composition --------------------------------------------

    def invert_unit(self):
        """Inverse of a series with invertible constant term."""
        R = self.ring
        c0 = self.constant_term()
        c0inv = R.try_invert(c0)
        if c0inv is NOT_INVERTIBLE:
            raise NotInvertibleError("constant term is not a unit")
        # f = c0 (1 - h), 1/f = c0^{-1} (1 + h + h^2 + ...)
        h = PowerSeries.one(R, self.vars, self.trunc) - self.scale(c0inv)
        acc = PowerSeries.one(R, self.vars, self.trunc)
        term = PowerSeries.one(R, self.vars, self.trunc)
        while True:
            term = (term * h).truncate(self.trunc)
            if term.is_zero():
                break
            acc = acc + term
        return acc.scale(c0inv)

    def substitute(self, bindings):
        """Substitute power series (each of positive valuation) for variables.

        bindings: {name: PowerSeries over the target variables}. Unbound
        variables must exist in the target variable list and are kept.
        """
        targets = [g for g in bindings.values()]
        if not targets:
            return self
        tvars = targets[0].vars
        R = self.ring
        for g in targets:
            if g.vars != tvars or g.ring != R:
                raise OrderingMismatch("inconsistent substitution targets")
            if g.valuation() < 1:
                raise IllegalSubstitution("substituted series must have positive valuation")
        ttrunc = min(g.trunc for g in targets)
        full = {}
        for v in self.vars:
            if v in bindings:
                full[v] = bindings[v]
            else:
                if v not in tvars:
                    raise IllegalSubstitution(f"unbound variable {v!r} missing from target")
                full[v] = PowerSeries.var(R, tvars, v, ttrunc)
        t = min(self.trunc, ttrunc)
        out = PowerSeries.zero(R, tvars, t)
        pw = {v: {0: PowerSeries.one(R, tvars, t)} for v in self.vars}

        def power(v, k):
            cache = pw[v]
            if k not in cache:
                cache[k] = (power(v, k - 1) * full[v]).truncate(t)
            return cache[k]

        for e, c in self.coeffs.items():
            term = PowerSeries.const(R, tvars, c, t)
            for v, k in zip(self.vars, e):
                if k:
                    term = (term * power(v, k)).truncate(t)
            out = out + term
        return out.truncate(t)

    def comp_inverse(self, name=None):
        """Compositional inverse g with f(g) = g(f) = id, found degree by degree."""
        if len(self.vars) != 1:
            raise ValueError("comp_inverse needs a univariate series")
        name = name or self.vars[0]
        R = self.ring
        if not R.is_zero(self.constant_term()):
            raise IllegalSubstitution("comp_inverse needs f(0) = 0")
        e1 = (1,)
        c1 = self.coefficient(e1)
        c1inv = R.try_invert(c1)
        if c1inv is NOT_INVERTIBLE:
            raise NotInvertibleError("f'(0) is not a unit")
        t = self.trunc
        g = PowerSeries(R, self.vars, {e1: c1inv}, t)
        # Newton-free iteration: correct degree d using the linear term
        for d in range(2, t):
            r = self.substitute({name: g}) - PowerSeries.var(R, self.vars, name, t)
            if r.is_zero():
                break
            # residual starts at degree d; cancel it
            corr = {}
            for e, c in r.coeffs.items():
                if _tot(e) <= d:
                    corr[e] = R.neg(R.mul(c, c1inv))
            if corr:
                g = g + PowerSeries(R, self.vars, corr, t)
        return g

    def sqrt(self):
        """Square root with constant term 1; needs 2 invertible."""
        R = self.ring
        if not R.eq(self.constant_term(), R.one()):
            raise NotInvertibleError("sqrt needs constant term 1")
        two_inv = R.try_invert(R.from_int(2))
        if two_inv is NOT_INVERTIBLE:
            raise NotInvertibleError("sqrt needs 2 invertible in the ring")
        t = self.trunc
        g = PowerSeries.one(R, self.vars, t)
        # Newton: g <- g - (g^2 - f) / (2g); here 1/(2g) via invert_unit
        while True:
            r = (g * g).truncate(t) - self
            if r.is_zero():
                break
            half = (g + g).invert_unit()
            g = g - (r * half).truncate(t)
        return g

    # -- conversions -------------------------------------------------------

    def as_laurent(self):
        return LaurentElement(self.ring, self.vars, dict(self.coeffs), self.trunc,
                              floors=(None,) * len(self.vars))

    def rename(self, new_vars):
        if len(new_vars) != len(self.vars):
            raise ValueError("rename needs the same arity")
        return PowerSeries(self.ring, tuple(new_vars), self.coeffs, self.trunc, _clean=True)

    def extend(self, new_vars):
        """View in a larger variable list (new variables get exponent 0)."""
        new_vars = tuple(new_vars)
        idx = [new_vars.index(v) for v in self.vars]
        out = {}
        for e, c in self.coeffs.items():
            e2 = [0] * len(new_vars)
            for j, x in zip(idx, e):
                e2[j] = x
            out[tuple(e2)] = c
        return PowerSeries(self.ring, new_vars, out, self.trunc, _clean=True)

    def __repr__(self):
        terms = []
        for e in sorted(self.coeffs, key=lambda e: (_tot(e), e)):
            mono = "*".join(f"{v}^{k}" for v, k in zip(self.vars, e) if k) or "1"
            terms.append(f"({self.ring.to_text(self.coeffs[e])})*{mono}")
        body = " + ".join(terms) or "0"
        return f"<{body} + O(deg {self.trunc})>"

    def to_json(self):
        return _series_json(self)


class LaurentElement:
    """An iterated-Laurent element at truncation, with reliability floors.

    ``vars`` is the ordering: ``(z, w)`` is the ring of Laurent series in w
    whose coefficients are Laurent series in z (z dominates, as in the
    expansion with |z| > |w|).  ``floors[i]`` is None when the element
    genuinely has no terms below any bound in variable i; an integer floor
    means coefficients with a smaller exponent were truncated away and are
    unknown.
    """

    __slots__ = ("ring", "vars", "coeffs", "trunc", "floors", "tag")

    def __init__(self, ring, vars, coeffs, trunc, floors=None, tag=None, _clean=False):
        self.ring = ring
        self.vars = tuple(vars)
        self.trunc = trunc
        if floors is None:
            floors = (None,) * len(self.vars)
        self.floors = tuple(floors)
        self.tag = tag
        if _clean:
            self.coeffs = coeffs
        else:
            out = {}
            for e, c in coeffs.items():
                e = tuple(e)
                if _tot(e) >= trunc or ring.is_zero(c):
                    continue
                if any(f is not None and x < f for x, f in zip(e, self.floors)):
                    continue
                out[e] = c
            self.coeffs = out

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(ring, vars, trunc):
        return LaurentElement(ring, vars, {}, trunc, _clean=True)

    @staticmethod
    def const(ring, vars, value, trunc):
        z = (0,) * len(vars)
        c = {} if ring.is_zero(value) else {z: value}
        return LaurentElement(ring, vars, c, trunc, _clean=True)

    @staticmethod
    def var(ring, vars, name, trunc, power=1):
        e = tuple(power if v == name else 0 for v in vars)
        if name not in vars:
            raise ValueError(f"{name!r} not in {vars}")
        return LaurentElement(ring, vars, {e: ring.one()}, trunc)

    # -- basics ------------------------------------------------------------

    def _check(self, other):
        if self.ring != other.ring:
            raise OrderingMismatch("coefficient rings differ")
        if self.vars != other.vars:
            raise OrderingMismatch(f"variable orderings differ: {self.vars} vs {other.vars}")

    def coefficient(self, e):
        return self.coeffs.get(tuple(e), self.ring.zero())

    def is_zero(self):
        return not self.coeffs

    def valuation(self):
        if not self.coeffs:
            return self.trunc
        return min(_tot(e) for e in self.coeffs)

    def support_max(self, i):
        if not self.coeffs:
            return 0
        return max(e[i] for e in self.coeffs)

    def support_min(self, i):
        if not self.coeffs:
            return 0
        return min(e[i] for e in self.coeffs)

    def reliable_at(self, e):
        """Whether the coefficient at exponent vector e is certified."""
        if _tot(e) >= self.trunc:
            return False
        return all(f is None or x >= f for x, f in zip(e, self.floors))

    def truncate(self, n, floors=None):
        """Truncate to total degree n and, optionally, clip below floors.

        A requested floor is only recorded when it actually removes a stored
        term; clipping nothing leaves the element exact in that direction.
        """
        n = min(n, self.trunc)
        out_floors = list(self.floors)
        coeffs = {e: c for e, c in self.coeffs.items() if _tot(e) < n}
        if floors is not None:
            for i, f in enumerate(floors):
                if f is None:
                    continue
                cur = out_floors[i]
                if cur is not None and cur >= f:
                    continue
                cut = [e for e in coeffs if e[i] < f]
                if cut:
                    for e in cut:
                        del coeffs[e]
                    out_floors[i] = f
        return LaurentElement(self.ring, self.vars, coeffs, n,
                              floors=tuple(out_floors), _clean=True)

    def __eq__(self, other):
        return (
            isinstance(other, LaurentElement)
            and self.ring == other.ring
            and self.vars == other.vars
            and self.trunc == other.trunc
            and self.floors == other.floors
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.vars, self.trunc, self.floors, len(self.coeffs)))

    # -- arithmetic --------------------------------------------------------

    @staticmethod
    def _join_floors_add(f1, f2):
        return tuple(
            a if b is None else (b if a is None else max(a, b))
            for a, b in zip(f1, f2))

    def __add__(self, other):
        self._check(other)
        R = self.ring
        t = min(self.trunc, other.trunc)
        floors = self._join_floors_add(self.floors, other.floors)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            s = R.add(out.get(e, R.zero()), c)
            if R.is_zero(s):
                out.pop(e, None)
            else:
                out[e] = s
        return LaurentElement(R, self.vars, out, t, floors=floors)

    def __neg__(self):
        R = self.ring
        return LaurentElement(R, self.vars, {e: R.neg(c) for e, c in self.coeffs.items()},
                              self.trunc, floors=self.floors,
                              tag=None, _clean=True)

    def __sub__(self, other):
        return self + (-other)

    def _mul_floors(self, other):
        floors = []
        for i in range(len(self.vars)):
            cands = []
            if self.floors[i] is not None:
                cands.append(self.floors[i] + other.support_max(i))
            if other.floors[i] is not None:
                cands.append(other.floors[i] + self.support_max(i))
            floors.append(max(cands) if cands else None)
        return tuple(floors)

    def __mul__(self, other):
        self._check(other)
        R = self.ring
        if self.is_zero() or other.is_zero():
            return LaurentElement.zero(R, self.vars, max(self.trunc, other.trunc))
        t = min(self.trunc + other.valuation(), other.trunc + self.valuation())
        floors = self._mul_floors(other)
        out = {}
        for e1, c1 in self.coeffs.items():
            t1 = _tot(e1)
            for e2, c2 in other.coeffs.items():
                if t1 + _tot(e2) >= t:
                    continue
                e = tuple(x + y for x, y in zip(e1, e2))
                s = R.add(out.get(e, R.zero()), R.mul(c1, c2))
                if R.is_zero(s):
                    out.pop(e, None)
                else:
                    out[e] = s
        return LaurentElement(R, self.vars, out, t, floors=floors)

    def scale(self, raw):
        R = self.ring
        out = {}
        for e, c in self.coeffs.items():
            s = R.mul(c, raw)
            if not R.is_zero(s):
                out[e] = s
        return LaurentElement(R, self.vars, out, self.trunc, floors=self.floors, _clean=True)

    # -- integer powers ----------------------------------------------------

    def leading(self):
        """Leading (revlex-minimal) exponent vector and coefficient."""
        if not self.coeffs:
            raise NotInvertibleError("zero element has no leading term")
        e = min(self.coeffs, key=_revlex_key)
        return e, self.coeffs[e]

    def int_power(self, n, floors=None):
        """f^n in the iterated ring given by the ordering self.vars.

        For n < 0 the leading coefficient must be invertible in the base
        ring; the result is cut at ``floors`` (default: -trunc per variable)
        which become the reliability floors of the output.
        """
        R = self.ring
        if n == 0:
            return LaurentElement.one_like(self)
        if n == 1 and floors is None:
            return self
        m, c = self.leading()
        cinv = R.try_invert(c)
        if cinv is NOT_INVERTIBLE:
            if n < 0:
                raise NotInvertibleError("leading coefficient is not a unit")
            out = self
            for _ in range(n - 1):
                out = out * self
            return out
        v = _tot(m)
        t_rel = self.trunc - v  # relative precision above the valuation
        if n >= 0:
            if floors is None:
                floors = self.floors  # exact support, no cutting needed
                work_floors = (None,) * len(self.vars)
            else:
                work_floors = tuple(
                    None if f is None else f - n * mi for f, mi in zip(floors, m))
        else:
            if floors is None:
                floors = tuple(-self.trunc for _ in self.vars)
            work_floors = tuple(
                None if f is None else f - n * mi for f, mi in zip(floors, m))
        # h = f / (c * monomial m) - 1, terms of positive revlex order
        h_coeffs = {}
        for e, ce in self.coeffs.items():
            e2 = tuple(x - y for x, y in zip(e, m))
            if not any(e2):
                continue
            h_coeffs[e2] = R.mul(ce, cinv)
        h = LaurentElement(R, self.vars, h_coeffs, t_rel, _clean=True)
        hv = min(0, h.valuation()) if h.coeffs else 0
        # Deep-cut mode: when the base is exact and every dominated direction
        # of h has nonnegative exponent sums, run the loop with floors one
        # whole truncation order deeper and clip once at the end.  A term
        # dropped that far down can resurface, within the total-degree cap,
        # only strictly below the requested floors, so the kept region stays
        # exact and the per-product pollution rule (which would otherwise
        # ratchet the floors upward every iteration) can be skipped.
        deep = all(f is None for f in self.floors) and \
            all(_tot(e) >= 0 for e in h.coeffs)
        if deep:
            for i, f in enumerate(work_floors):
                if f is None or all(e[i] >= 0 for e in h.coeffs):
                    continue  # this direction is never cut
                if any(_tot(e) - e[i] < 0 for e in h.coeffs):
                    deep = False
                    break
        if deep:
            cut_floors = tuple(
                None if f is None else f - t_rel for f in work_floors)
        else:
            cut_floors = work_floors
        work_trunc = t_rel
        acc = LaurentElement.const(R, self.vars, R.one(), work_trunc)
        term = acc
        k = 0
        min_trunc = work_trunc
        loop_floors = (None,) * len(self.vars)
        dropped = [False] * len(self.vars)
        while True:
            k += 1
            term = (term * h).truncate(work_trunc, floors=cut_floors)
            if deep:
                for i, tf in enumerate(term.floors):
                    if tf is not None:
                        dropped[i] = True
                term = LaurentElement(R, self.vars, term.coeffs, term.trunc,
                                      _clean=True)
            else:
                loop_floors = self._join_floors_add(loop_floors, term.floors)
            if term.is_zero():
                break
            coef = R.from_int(comb_any(n, k))
            if not R.is_zero(coef):
                acc = acc + term.scale(coef)
                min_trunc = min(min_trunc, t_rel + (k - 1) * hv)
            if n >= 0 and k >= n:
                break
        if deep:
            acc = acc.truncate(acc.trunc, floors=work_floors)
            final = tuple(
                wf if wf is not None and (dropped[i] or acc.floors[i] is not None)
                else None
                for i, wf in enumerate(work_floors))
            acc = LaurentElement(R, self.vars, acc.coeffs, acc.trunc,
                                 floors=final, _clean=True)
        else:
            acc = acc.truncate(acc.trunc, floors=loop_floors)
            acc = LaurentElement(R, self.vars, acc.coeffs, acc.trunc,
                                 floors=self._join_floors_add(acc.floors, loop_floors))
        # shift by n*m and scale by c^n
        cn = c if n >= 0 else cinv
        cpow = R.one()
        for _ in range(abs(n)):
            cpow = R.mul(cpow, cn)
        shift = tuple(n * x for x in m)
        out = {}
        for e, ce in acc.coeffs.items():
            out[tuple(x + y for x, y in zip(e, shift))] = R.mul(ce, cpow)
        out_trunc = min_trunc + n * v
        out_floors = tuple(
            (af + s) if af is not None else (None if sf is None else fl)
            for af, s, sf, fl in zip(acc.floors, shift, self.floors, floors))
        tag = None
        if all(f is None for f in self.floors):
            tag = ("power", self.plain(), n)
        return LaurentElement(R, self.vars, out, out_trunc, floors=out_floors, tag=tag)

    @staticmethod
    def one_like(f):
        return LaurentElement.const(f.ring, f.vars, f.ring.one(), f.trunc)

    def plain(self):
        """A copy without reliability caps; only valid for exact elements."""
        if any(f is not None for f in self.floors):
            raise NotLocalizable("element carries truncation floors")
        return LaurentElement(self.ring, self.vars, dict(self.coeffs), self.trunc, _clean=True)

    # -- expansion maps ----------------------------------------------------

    def expand(self, ordering, floors=None):
        """Re-expand in a different variable ordering.

        Exact elements of the un-iterated ring are reinterpreted directly
        (the two expansions agree there).  Elements produced by int_power
        carry a (base, exponent) tag and are recomputed in the target ring.
        """
        ordering = tuple(ordering)
        if set(ordering) != set(self.vars):
            raise OrderingMismatch(f"{ordering} is not a reordering of {self.vars}")
        if self.tag is not None and self.tag[0] == "power":
            _, base, n = self.tag
            base2 = base.reorder(ordering)
            return base2.int_power(n, floors=floors)
        if all(f is None for f in self.floors):
            return self.reorder(ordering)
        raise NotLocalizable("no localization data; cannot re-expand a capped element")

    def reorder(self, ordering):
        """Permute the variable axes (exact elements only)."""
        ordering = tuple(ordering)
        idx = [self.vars.index(v) for v in ordering]
        out = {}
        for e, c in self.coeffs.items():
            out[tuple(e[i] for i in idx)] = c
        floors = tuple(self.floors[i] for i in idx)
        return LaurentElement(self.ring, ordering, out, self.trunc, floors=floors)

    def extend(self, new_vars):
        new_vars = tuple(new_vars)
        idx = [new_vars.index(v) for v in self.vars]
        out = {}
        for e, c in self.coeffs.items():
            e2 = [0] * len(new_vars)
            for j, x in zip(idx, e):
                e2[j] = x
            out[tuple(e2)] = c
        floors = [None] * len(new_vars)
        for j, f in zip(idx, self.floors):
            floors[j] = f
        return LaurentElement(self.ring, new_vars, out, self.trunc, floors=tuple(floors))

    # -- substitution ------------------------------------------------------

    def substitute(self, bindings, neg_depth=None):
        """Substitute LaurentElements for variables.

        bindings: {name: (g, also_inverse)} or {name: g}.  Every g must be
        in positive complete filtration (all monomials of total degree >= 1)
        over a common target ordering.  Negative powers of a substituted
        variable require g to be invertible in its iterated ring; their
        expansions are cut at exponent -neg_depth per variable (default:
        the truncation order), which becomes the reliability floor.
        """
        norm = {}
        for k, v in bindings.items():
            if isinstance(v, tuple):
                norm[k] = v
            else:
                norm[k] = (v, False)
        targets = [g for g, _ in norm.values()]
        if not targets:
            return self
        R = self.ring
        tvars = targets[0].vars
        for g in targets:
            if g.vars != tvars or g.ring != R:
                raise OrderingMismatch("inconsistent substitution targets")
            if g.coeffs and g.valuation() < 1:
                raise IllegalSubstitution("substituted element must be in positive filtration")
        ttrunc = min(g.trunc for g in targets)
        full = {}
        for v in self.vars:
            if v in norm:
                full[v] = norm[v][0]
            else:
                if v not in tvars:
                    raise IllegalSubstitution(f"unbound variable {v!r} missing from target")
                full[v] = LaurentElement.var(R, tvars, v, ttrunc)
        t = min(self.trunc, ttrunc)
        zero = LaurentElement.zero(R, tvars, t)
        out = zero
        pcache = {v: {0: LaurentElement.const(R, tvars, R.one(), t)} for v in self.vars}

        def power(v, k):
            cache = pcache[v]
            if k in cache:
                return cache[k]
            g = full[v]
            if k > 0:
                cache[k] = (power(v, k - 1) * g).truncate(t)
            else:
                # int_power directly: chaining multiplications by g^{-1}
                # inflates the reliability floors at every step
                fl = None
                if neg_depth is not None:
                    fl = (-neg_depth,) * len(tvars)
                try:
                    cache[k] = g.int_power(k, floors=fl)
                except NotInvertibleError as exc:
                    raise IllegalSubstitution(
                        f"negative powers of {v!r} need an invertible image") from exc
            return cache[k]

        min_trunc = t
        floors = (None,) * len(tvars)
        for e, c in self.coeffs.items():
            term = LaurentElement.const(R, tvars, c, t)
            for v, k in zip(self.vars, e):
                if k:
                    term = term * power(v, k)
            min_trunc = min(min_trunc, term.trunc)
            floors = LaurentElement._join_floors_add(floors, term.floors)
            out = out + term
        return out.truncate(min_trunc, floors=floors)

    # -- evaluation and extraction -----------------------------------------

    def diagonal_eval(self, out_var=None):
        """f(z, z) for a two-variable element; certifies finiteness."""
        if len(self.vars) != 2:
            raise ValueError("diagonal_eval needs exactly two variables")
        if any(f is not None for f in self.floors):
            # missing coefficients below a floor could pile up on the diagonal
            raise DiagonalDivergence("truncated tails prevent a finite diagonal sum")
        R = self.ring
        name = out_var or self.vars[0]
        out = {}
        for (i, j), c in self.coeffs.items():
            e = (i + j,)
            s = R.add(out.get(e, R.zero()), c)
            if R.is_zero(s):
                out.pop(e, None)
            else:
                out[e] = s
        return LaurentElement(R, (name,), out, self.trunc, _clean=True)

    def residue_coeff(self, name):
        """Coefficient of name^{-1}; a LaurentElement in the remaining vars."""
        i = self.vars.index(name)
        if self.floors[i] is not None and self.floors[i] > -1:
            raise WindowMiss(f"exponent -1 of {name!r} lies below the reliable floor")
        R = self.ring
        rest = self.vars[:i] + self.vars[i + 1:]
        out = {}
        for e, c in self.coeffs.items():
            if e[i] == -1:
                out[e[:i] + e[i + 1:]] = c
        floors = self.floors[:i] + self.floors[i + 1:]
        if not rest:
            return LaurentElement(R, (), out, self.trunc + 1, _clean=True)
        return LaurentElement(R, rest, out, self.trunc + 1, floors=floors)

    def coefficient_of(self, name, k):
        """Coefficient of name^k as an element in the remaining variables."""
        i = self.vars.index(name)
        R = self.ring
        rest = self.vars[:i] + self.vars[i + 1:]
        out = {}
        for e, c in self.coeffs.items():
            if e[i] == k:
                out[e[:i] + e[i + 1:]] = c
        floors = self.floors[:i] + self.floors[i + 1:]
        return LaurentElement(R, rest, out, self.trunc - k, floors=floors)

    def scalar(self):
        """The value of a zero-variable element."""
        if self.vars:
            raise ValueError("not a scalar element")
        return self.coeffs.get((), self.ring.zero())

    def derivative(self, name):
        i = self.vars.index(name)
        R = self.ring
        out = {}
        for e, c in self.coeffs.items():
            if e[i] == 0:
                continue
            d = R.mul(c, R.from_int(e[i]))
            if R.is_zero(d):
                continue
            out[e[:i] + (e[i] - 1,) + e[i + 1:]] = d
        floors = tuple(
            (f - 1 if j == i and f is not None else f)
            for j, f in enumerate(self.floors))
        return LaurentElement(R, self.vars, out, self.trunc - 1, floors=floors)

    def __repr__(self):
        terms = []
        for e in sorted(self.coeffs, key=lambda e: (_tot(e), e)):
            mono = "*".join(f"{v}^{k}" for v, k in zip(self.vars, e) if k) or "1"
            terms.append(f"({self.ring.to_text(self.coeffs[e])})*{mono}")
        body = " + ".join(terms[:12]) or "0"
        if len(terms) > 12:
            body += f" + [{len(terms) - 12} more]"
        return f"<{body} | trunc {self.trunc}, floors {self.floors}>"

    def to_json(self):
        return _series_json(self)


def comb_any(n, k):
    """Binomial coefficient C(n, k) for any integer n and k >= 0."""
    if k < 0:
        return 0
    if n >= 0:
        return comb(n, k)
    # C(n, k) = (-1)^k C(k - n - 1, k)
    return (-1) ** k * comb(k - n - 1, k)


class BilateralWindow:
    """A finite coefficient box for a bilateral series.

    ``reliable[i] = (lo, hi)`` is the closed interval of exponents of
    variable i inside which coefficients are certified correct.  When the
    window descends from a truncated element, ``max_total`` additionally
    bounds the certified total degree (None means no bound); coefficients
    are only stored inside the certified region.
    """

    __slots__ = ("ring", "vars", "coeffs", "reliable", "max_total")

    def __init__(self, ring, vars, coeffs, reliable, max_total=None, _clean=False):
        self.ring = ring
        self.vars = tuple(vars)
        self.reliable = tuple((lo, hi) for lo, hi in reliable)
        self.max_total = max_total
        if _clean:
            self.coeffs = coeffs
        else:
            out = {}
            for e, c in coeffs.items():
                e = tuple(e)
                if ring.is_zero(c) or not self._inside(e):
                    continue
                out[e] = c
            self.coeffs = out

    def _inside(self, e):
        if self.max_total is not None and _tot(e) > self.max_total:
            return False
        return all(lo <= x <= hi for x, (lo, hi) in zip(e, self.reliable))

    def is_empty_window(self):
        if any(lo > hi for lo, hi in self.reliable):
            return True
        if self.max_total is not None:
            return sum(lo for lo, hi in self.reliable) > self.max_total
        return False

    @staticmethod
    def _merge_total(a, b):
        if a is None:
            return b
        if b is None:
            return a
        return min(a, b)

    @staticmethod
    def from_laurent(f, box):
        """Window view of a LaurentElement on a requested box.

        The certified region is the intersection of the request with the
        element's floors; the truncation bound survives as max_total.
        """
        boxes = []
        for i, (lo, hi) in enumerate(box):
            if f.floors[i] is not None:
                lo = max(lo, f.floors[i])
            boxes.append((lo, hi))
        return BilateralWindow(f.ring, f.vars, dict(f.coeffs), boxes,
                               max_total=f.trunc - 1)

    def _check(self, other):
        if self.ring != other.ring or self.vars != other.vars:
            raise OrderingMismatch("window mismatch")

    def __add__(self, other):
        self._check(other)
        R = self.ring
        rel = tuple((max(a, c), min(b, d))
                    for (a, b), (c, d) in zip(self.reliable, other.reliable))
        mt = self._merge_total(self.max_total, other.max_total)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            s = R.add(out.get(e, R.zero()), c)
            if R.is_zero(s):
                out.pop(e, None)
            else:
                out[e] = s
        return BilateralWindow(R, self.vars, out, rel, max_total=mt)

    def __neg__(self):
        R = self.ring
        return BilateralWindow(R, self.vars,
                               {e: R.neg(c) for e, c in self.coeffs.items()},
                               self.reliable, max_total=self.max_total, _clean=True)

    def __sub__(self, other):
        return self + (-other)

    def mul_laurent(self, g, exact_factor=False):
        """Product with a formal Laurent factor of finite known support.

        The reliable interval shrinks on each side by the exponent spread of
        the factor.  Unless ``exact_factor`` asserts that the factor has no
        unknown tail beyond its truncation, the certified total degree drops
        to ``g.trunc + (window lows) - 1``.  A second bilateral factor is
        rejected outright.
        """
        if isinstance(g, BilateralWindow):
            raise NonConvergentProduct("product of two bilateral series is undefined")
        if isinstance(g, PowerSeries):
            g = g.as_laurent()
        if g.ring != self.ring or g.vars != self.vars:
            raise OrderingMismatch("window/factor mismatch")
        if any(f is not None for f in g.floors):
            raise NonConvergentProduct("factor must have certain finite support")
        R = self.ring
        if not g.coeffs:
            return BilateralWindow(R, self.vars, {}, self.reliable,
                                   max_total=self.max_total, _clean=True)
        rel = []
        for i, (lo, hi) in enumerate(self.reliable):
            gmax = max(e[i] for e in g.coeffs)
            gmin = min(e[i] for e in g.coeffs)
            rel.append((lo + gmax, hi + gmin))
        gval = min(_tot(e) for e in g.coeffs)
        mt = None if self.max_total is None else self.max_total + gval
        if not exact_factor and self.coeffs:
            # the unknown part of g beyond its truncation meets the stored
            # window coefficients, polluting total degrees from
            # g.trunc + (lowest stored total degree) upward
            self_min = min(_tot(e) for e in self.coeffs)
            mt = self._merge_total(mt, g.trunc + self_min - 1)
        out = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in g.coeffs.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                s = R.add(out.get(e, R.zero()), R.mul(c1, c2))
                if R.is_zero(s):
                    out.pop(e, None)
                else:
                    out[e] = s
        return BilateralWindow(R, self.vars, out, rel, max_total=mt)

    def restrict(self, box):
        rel = tuple((max(a, lo), min(b, hi))
                    for (a, b), (lo, hi) in zip(self.reliable, box))
        return BilateralWindow(self.ring, self.vars, self.coeffs, rel,
                               max_total=self.max_total)

    def residue_coeff(self, name):
        i = self.vars.index(name)
        lo, hi = self.reliable[i]
        if not (lo <= -1 <= hi):
            raise WindowMiss(f"exponent -1 of {name!r} outside reliable range [{lo},{hi}]")
        R = self.ring
        rest = self.vars[:i] + self.vars[i + 1:]
        out = {}
        for e, c in self.coeffs.items():
            if e[i] == -1:
                out[e[:i] + e[i + 1:]] = c
        rel = self.reliable[:i] + self.reliable[i + 1:]
        mt = None if self.max_total is None else self.max_total + 1
        return BilateralWindow(R, rest, out, rel, max_total=mt)

    def agrees_with(self, other):
        """Exact comparison on the intersection of certified regions.

        Returns (ok, first_bad_exponent, surviving_box); raises EmptyWindow
        if the intersection is empty.
        """
        self._check(other)
        box = tuple((max(a, c), min(b, d))
                    for (a, b), (c, d) in zip(self.reliable, other.reliable))
        mt = self._merge_total(self.max_total, other.max_total)
        if any(lo > hi for lo, hi in box) or (
                mt is not None and sum(lo for lo, hi in box) > mt):
            raise EmptyWindow(f"no surviving window: {box} (max total {mt})")
        R = self.ring

        def inside(e):
            if mt is not None and _tot(e) > mt:
                return False
            return all(lo <= x <= hi for x, (lo, hi) in zip(e, box))

        keys = {e for e in self.coeffs if inside(e)}
        keys |= {e for e in other.coeffs if inside(e)}
        for e in sorted(keys):
            if not R.eq(self.coeffs.get(e, R.zero()), other.coeffs.get(e, R.zero())):
                return False, e, box
        return True, None, box

    def is_zero_on_window(self):
        if self.is_empty_window():
            raise EmptyWindow(f"no surviving window: {self.reliable}")
        return not self.coeffs

    def window_size(self):
        """Number of certified exponent vectors (for check reports)."""
        if self.is_empty_window():
            return 0
        count = 0
        from itertools import product as iproduct
        ranges = [range(lo, hi + 1) for lo, hi in self.reliable]
        for e in iproduct(*ranges):
            if self.max_total is None or _tot(e) <= self.max_total:
                count += 1
        return count

    def __repr__(self):
        return (f"<window {self.vars} reliable {self.reliable} "
                f"max_total {self.max_total} ({len(self.coeffs)} terms)>")

    def to_json(self):
        d = _series_json(self)
        d["reliable"] = [list(r) for r in self.reliable]
        if self.max_total is not None:
            d["max_total"] = self.max_total
        return d


def _ring_json(ring):
    if ring.kind == "mod":
        return {"kind": "mod", "m": ring.modulus}
    if ring.kind == "parampoly":
        return {"kind": "parampoly", "base": ring.base.kind, "params": list(ring.params)}
    return {"kind": ring.kind}


def ring_from_json(d):
    kind = d["kind"]
    if kind == "rationals":
        return Ring.rationals()
    if kind == "integers":
        return Ring.integers()
    if kind == "mod":
        return Ring.integers_mod(d["m"])
    if kind == "parampoly":
        base = Ring.rationals() if d["base"] == "rationals" else Ring.integers()
        return Ring.parampoly(base, d["params"])
    raise ValueError(f"unknown ring kind {kind!r}")


def _series_json(f):
    terms = [
        {"exp": list(e), "coeff": f.ring.to_text(c)}
        for e, c in sorted(f.coeffs.items())
    ]
    d = {"ring": _ring_json(f.ring), "vars": list(f.vars), "terms": terms}
    if hasattr(f, "trunc"):
        d["trunc"] = f.trunc
    return d


def dumps(f, **kw):
    return json.dumps(f.to_json(), **kw)
