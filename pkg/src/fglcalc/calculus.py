"""Group-law calculus: deformed binomial coefficients, delta distributions,
twisted residues, and hyperderivatives.

Everything here is certified on finite windows: a check passes only when the
identity holds coefficient-exactly on a non-empty reliable region, and the
report records that region.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from math import comb

from .series import (
    BilateralWindow,
    LaurentElement,
    WindowMiss,
    comb_any,
)


class NonConvergentSubstitution(Exception):
    pass


@dataclass
class Report:
    """Outcome of one identity check on one law."""

    identity: str
    law: str
    window: object
    status: object = "pass"
    details: dict = field(default_factory=dict)

    @property
    def ok(self):
        return self.status == "pass"

    def to_json(self):
        d = {
            "identity": self.identity,
            "law": self.law,
            "window": self.window,
            "status": self.status,
        }
        if self.details:
            d["details"] = self.details
        return d


def _fail(ring, monomial, lhs, rhs):
    return {"fail": {
        "monomial": list(monomial) if isinstance(monomial, tuple) else monomial,
        "lhs": ring.to_text(lhs),
        "rhs": ring.to_text(rhs),
    }}


# -- F-binomial coefficients ----------------------------------------------


class FBinomialTable:
    """Coefficients of the two-variable expansions F(z,w)^n, n in [-nmax, nmax].

    entry(n, i, j) is the coefficient of z^i w^j in the expansion where z
    dominates; entries outside the certified region raise WindowMiss.
    """

    def __init__(self, law, nmax=4, override=None):
        self.law = law
        self.nmax = nmax
        self.override = dict(override or {})
        base = law.as_laurent()
        self.slices = {}
        for n in range(-nmax, nmax + 1):
            self.slices[n] = base.int_power(n)

    def reliable(self, n, i, j):
        return self.slices[n].reliable_at((i, j))

    def entry(self, n, i, j):
        if (n, i, j) in self.override:
            return self.override[(n, i, j)]
        s = self.slices[n]
        if not s.reliable_at((i, j)):
            raise WindowMiss(f"binomial entry ({n},{i},{j}) is outside the table")
        return s.coefficient((i, j))


def f_binomial(law, n, trunc=None):
    """The (i,j) -> coefficient map of the z-dominant expansion of F^n."""
    s = law.as_laurent(trunc=trunc).int_power(n)
    return {e: c for e, c in s.coeffs.items()}


def f_binomial_identities(law, nmax=3, smax=4, override=None):
    """Vanishing, Kronecker j=0 column, symmetry, and convolution checks.

    The j=0 column is tested against the Kronecker delta in n (the natural
    reading; see the package docs for the index-naming caveat).  `override`
    injects corrupted entries for fault testing.
    """
    table = FBinomialTable(law, nmax=2 * nmax, override=override)
    R = law.ring
    name = law.name
    checked = 0

    for n in range(-nmax, nmax + 1):
        s = table.slices[n]
        for (i, j), c in s.coeffs.items():
            v = table.override.get((n, i, j), c)
            if (j < 0 or i + j < n) and not R.is_zero(v):
                return Report("f_binomial/vanishing", name, f"|n|<={nmax}",
                              _fail(R, (n, i, j), v, R.zero()))
        # j = 0 column: delta in n
        for i in range(max(-6, s.floors[0] if s.floors[0] is not None else -6), 7):
            if not s.reliable_at((i, 0)):
                continue
            want = R.one() if i == n else R.zero()
            got = table.entry(n, i, 0)
            if not R.eq(got, want):
                return Report("f_binomial/kronecker", name, f"|n|<={nmax}",
                              _fail(R, (n, i, 0), got, want))
            checked += 1
        if n >= 0:
            for (i, j), c in s.coeffs.items():
                v = table.override.get((n, i, j), c)
                w = table.override.get((n, j, i), s.coefficient((j, i)))
                if not R.eq(v, w):
                    return Report("f_binomial/symmetry", name, f"0<=n<={nmax}",
                                  _fail(R, (n, i, j), v, w))
                checked += 1

    # convolution: entry(m+n, r, s) = sum over i+k=r, j+l=s
    for m in range(-nmax, nmax + 1):
        for n in range(-nmax, nmax + 1):
            for s in range(0, smax + 1):
                for r in range(m + n - s, m + n + smax + 1):
                    try:
                        lhs = table.entry(m + n, r, s)
                        rhs = R.zero()
                        for j in range(0, s + 1):
                            ell = s - j
                            for i in range(m - j, r - n + ell + 1):
                                k = r - i
                                rhs = R.add(rhs, R.mul(table.entry(m, i, j),
                                                       table.entry(n, k, ell)))
                    except WindowMiss:
                        continue
                    if not R.eq(lhs, rhs):
                        return Report("f_binomial/convolution", name,
                                      f"|m|,|n|<={nmax}, s<={smax}",
                                      _fail(R, (m + n, r, s), lhs, rhs))
                    checked += 1
    return Report("f_binomial", name, f"|n|<={nmax}, s<={smax}",
                  details={"entries_checked": checked})


# -- F-delta distributions -------------------------------------------------


@dataclass
class DeltaWindow:
    """The distribution z^{-1} delta_F(w/z) restricted to a finite box."""

    law_name: str
    vars: tuple
    window: BilateralWindow
    orderings: tuple

    def to_json(self):
        d = self.window.to_json()
        d["law"] = self.law_name
        d["orderings"] = [list(o) for o in self.orderings]
        return d


def delta_F(law, box=(-6, 6), zvar="z", wvar="w", zbox=None):
    """z^{-1} delta_F(w/z): difference of the two expansions of F(z, iota w)^{-1}.

    zbox widens the certified z-range independently (useful before taking a
    z-residue against the truncated p_F factor).
    """
    fzi = law.f_z_iota_w(zvar, wvar)
    a = fzi.int_power(-1)
    b = fzi.reorder((wvar, zvar)).int_power(-1).reorder((zvar, wvar))
    full = [zbox or box, box]
    win = BilateralWindow.from_laurent(a, full) - BilateralWindow.from_laurent(b, full)
    return DeltaWindow(law.name, (zvar, wvar), win,
                       ((zvar, wvar), (wvar, zvar)))


def delta_support_check(law, f, box=(-6, 6)):
    """Diagonal support: delta * f(z) = delta * f(w), and the two-variable form.

    f is a finite-support LaurentElement in one variable z, or in (z, w) with
    a convergent diagonal.
    """
    D = delta_F(law, box=box).window
    R = law.ring
    if len(f.vars) == 1:
        fz = f.extend(("z", "w"))
        fw = LaurentElement(R, ("z", "w"),
                            {(0, e[0]): c for e, c in f.coeffs.items()},
                            f.trunc)
        lhs = D.mul_laurent(fz, exact_factor=True)
        rhs = D.mul_laurent(fw, exact_factor=True)
    else:
        diag = f.diagonal_eval("w")
        fww = LaurentElement(R, ("z", "w"),
                             {(0, e[0]): c for e, c in diag.coeffs.items()},
                             diag.trunc)
        lhs = D.mul_laurent(f, exact_factor=True)
        rhs = D.mul_laurent(fww, exact_factor=True)
    ok, bad, surv = lhs.agrees_with(rhs)
    if not ok:
        return Report("delta/diagonal_support", law.name, [list(r) for r in surv],
                      _fail(R, bad, lhs.coeffs.get(bad, R.zero()),
                            rhs.coeffs.get(bad, R.zero())))
    return Report("delta/diagonal_support", law.name, [list(r) for r in surv],
                  details={"window_size": lhs.restrict(surv).window_size()})


def delta_g_relation_check(law, box=(-6, 6)):
    """delta_F(w/z) = G(z,w)^{-1} * delta_{F_a}(w/z) on the surviving window."""
    R = law.ring
    D = delta_F(law, box=box).window
    zmw = LaurentElement(R, ("z", "w"), {(1, 0): R.one(), (0, 1): R.neg(R.one())},
                         law.trunc)
    a = zmw.int_power(-1)
    b = zmw.reorder(("w", "z")).int_power(-1).reorder(("z", "w"))
    Da = BilateralWindow.from_laurent(a, [box, box]) - \
        BilateralWindow.from_laurent(b, [box, box])
    Ginv = law.G.invert_unit()
    rhs = Da.mul_laurent(Ginv.as_laurent())
    ok, bad, surv = D.agrees_with(rhs)
    if not ok:
        return Report("delta/g_relation", law.name, [list(r) for r in surv],
                      _fail(R, bad, D.coeffs.get(bad, R.zero()),
                            rhs.coeffs.get(bad, R.zero())))
    return Report("delta/g_relation", law.name, [list(r) for r in surv],
                  details={"window_size": D.restrict(surv).window_size()})


def delta_phi_relation_check(law, box=(-6, 6)):
    """delta_F(w/z) * p_F(z) = delta_{F_a}(w/z); valid over any base ring."""
    R = law.ring
    D = delta_F(law, box=box).window
    pf = law.pF.rename(("z",)).extend(("z", "w"))
    lhs = D.mul_laurent(pf.as_laurent())
    zmw = LaurentElement(R, ("z", "w"), {(1, 0): R.one(), (0, 1): R.neg(R.one())},
                         law.trunc)
    a = zmw.int_power(-1)
    b = zmw.reorder(("w", "z")).int_power(-1).reorder(("z", "w"))
    rhs = BilateralWindow.from_laurent(a, [box, box]) - \
        BilateralWindow.from_laurent(b, [box, box])
    ok, bad, surv = lhs.agrees_with(rhs)
    if not ok:
        return Report("delta/invariant_factor", law.name, [list(r) for r in surv],
                      _fail(R, bad, lhs.coeffs.get(bad, R.zero()),
                            rhs.coeffs.get(bad, R.zero())))
    return Report("delta/invariant_factor", law.name, [list(r) for r in surv],
                  details={"window_size": lhs.restrict(surv).window_size()})


def _delta_tower(law, base, base_vars, out_var, B):
    """out^{-1} delta_F(u/out) with u^{+-1} replaced by the given expansion
    of base^{+-1}; a window over (z0, z1, z2).

    base is an exact two-variable element of valuation one in base_vars,
    already in the desired dominance ordering.  The result is
    sum_n slice_n(out) * base^n where slice_n is the u^n coefficient of the
    two-variable F-delta element.  A substituted cell at out-exponent e0
    receives contributions only from n >= -e0-1 (the delta element has total
    degree >= -1 and its out-dominant part bottoms out at out^{-n-1}), which
    keeps every certified cell a finite sum.
    """
    R = law.ring
    aux = "u"
    fzi = law.f_z_iota_w(out_var, aux)
    a = fzi.int_power(-1)
    b = fzi.reorder((aux, out_var)).int_power(-1).reorder((out_var, aux))
    slices = {}
    for src, neg in ((a, False), (b, True)):
        for (e0, n), c in src.coeffs.items():
            d = slices.setdefault(n, {})
            s = R.add(d.get(e0, R.zero()), R.neg(c) if neg else c)
            if R.is_zero(s):
                d.pop(e0, None)
            else:
                d[e0] = s

    allvars = ("z0", "z1", "z2")
    oi = allvars.index(out_var)
    b0 = allvars.index(base_vars[0])
    b1 = allvars.index(base_vars[1])
    lo = [-B, -B, -B]
    hi = [B, B, B]
    if a.floors[0] is not None:
        lo[oi] = max(lo[oi], a.floors[0])
    coeffs = {}
    mt = min(a.trunc, b.trunc) - 1
    for n in range(-(B + 1), law.trunc + B + 1):
        sl = slices.get(n, {})
        sl = {e0: c for e0, c in sl.items() if lo[oi] <= e0 <= hi[oi]}
        if not sl:
            continue
        p = base.int_power(n)
        # the lowest out-exponent a slice_n term can certify is max(-B,-n-1);
        # cells of higher total degree than this cap may miss contributions
        # beyond the truncation of base^n
        mt = min(mt, p.trunc - 1 + max(-B, -n - 1))
        for v, f in zip(base_vars, p.floors):
            if f is not None:
                k = allvars.index(v)
                lo[k] = max(lo[k], f)
        for e0, c0 in sl.items():
            for e, c in p.coeffs.items():
                full = [0, 0, 0]
                full[oi] = e0
                full[b0] = e[0]
                full[b1] = e[1]
                key = tuple(full)
                s = R.add(coeffs.get(key, R.zero()), R.mul(c0, c))
                if R.is_zero(s):
                    coeffs.pop(key, None)
                else:
                    coeffs[key] = s
    return BilateralWindow(R, allvars, coeffs,
                           list(zip(lo, hi)), max_total=mt)


def f_jacobi_delta_check(law, B=4):
    """Three-variable delta identities on the box [-B, B]^3.

    Part one: the three-term Jacobi identity for z0^{-1} delta_F applied to
    F(z1, iota z2), in its two expansions, against the z2^{-1} term.  Part
    two: the exchange identity relating the z2-term to the delta of F(z0,z2).
    """
    R = law.ring
    f12 = law.f_z_iota_w("z1", "z2")
    t1 = _delta_tower(law, f12, ("z1", "z2"), "z0", B)
    t2 = _delta_tower(law, f12.reorder(("z2", "z1")), ("z2", "z1"), "z0", B)
    f10 = law.f_z_iota_w("z1", "z0")
    t3 = _delta_tower(law, f10, ("z1", "z0"), "z2", B)
    lhs = t1 - t2
    ok, bad, surv = lhs.agrees_with(t3)
    if not ok:
        return Report("delta/f_jacobi", law.name, [list(r) for r in surv],
                      _fail(R, bad, lhs.coeffs.get(bad, R.zero()),
                            t3.coeffs.get(bad, R.zero())))
    win1 = lhs.restrict(surv).window_size()

    # exchange: i_{z1,z0} z2^{-1} delta_F(F(z1,iota z0)/z2)
    #         = i_{z2,z0} z1^{-1} delta_F(F(z0,z2)/z1)
    f02 = law.F.rename(("z0", "z2")).as_laurent().extend(("z2", "z0"))
    t4 = _delta_tower(law, f02, ("z2", "z0"), "z1", B)
    ok, bad, surv2 = t3.agrees_with(t4)
    if not ok:
        return Report("delta/exchange", law.name, [list(r) for r in surv2],
                      _fail(R, bad, t3.coeffs.get(bad, R.zero()),
                            t4.coeffs.get(bad, R.zero())))
    return Report("delta/f_jacobi", law.name,
                  {"jacobi": [list(r) for r in surv],
                   "exchange": [list(r) for r in surv2]},
                  details={"window_size": win1})


# -- F-residues ------------------------------------------------------------


def f_residue(law, f, var="z"):
    """Residue of f * p_F(var) d var.

    Accepts a LaurentElement (returns the raw ring value when univariate, a
    LaurentElement in the remaining variables otherwise) or a BilateralWindow
    (returns a window in the remaining variables).
    """
    pf = law.pF.rename((var,)).extend(f.vars)
    if isinstance(f, BilateralWindow):
        return f.mul_laurent(pf.as_laurent()).residue_coeff(var)
    res = (f * pf.as_laurent()).residue_coeff(var)
    if not res.vars:
        return res.scalar()
    return res


# -- F-hyperderivatives ----------------------------------------------------


def hyperderivative_expansion(law, f):
    """i_{z,w} f(F(z,w)) for univariate f; the w^n slices are S_n f.

    Negative powers are expanded three truncation orders deep so that the
    result stays residue-reliable after multiplication by p_F.  The map is
    linear in f, so the expansion of each power of z is cached on the law.
    """
    if f.vars != ("z",):
        raise ValueError("hyperderivative input must be univariate in z")
    R = law.ring
    cache = getattr(law, "_hyperexp_cache", None)
    if cache is None:
        cache = law._hyperexp_cache = {}
    Fzw = law.as_laurent()
    out = None
    for (e,), c in sorted(f.coeffs.items()):
        g = cache.get((e, f.trunc))
        if g is None:
            mono = LaurentElement(R, ("z",), {(e,): R.one()}, f.trunc)
            g = mono.substitute({"z": (Fzw, True)}, neg_depth=3 * law.trunc)
            cache[(e, f.trunc)] = g
        term = g.scale(c)
        out = term if out is None else out + term
    if out is None:
        return f.substitute({"z": (Fzw, True)}, neg_depth=3 * law.trunc)
    return out


def _slice_w(g, n):
    wi = g.vars.index("w")
    if g.floors[wi] is not None and n < g.floors[wi]:
        raise WindowMiss(f"w^{n} slice below the reliable floor")
    return g.coefficient_of("w", n)


def hyperderivative(law, f, n):
    """S_n f: the w^n coefficient of the z-dominant expansion of f(F(z,w))."""
    if n < 0:
        raise ValueError("hyperderivatives need n >= 0")
    return _slice_w(hyperderivative_expansion(law, f), n)


def hyperderivatives(law, f, nmax):
    """[S_0 f, ..., S_nmax f] from a single expansion of f(F(z,w))."""
    g = hyperderivative_expansion(law, f)
    return [_slice_w(g, n) for n in range(nmax + 1)]


def _agree_on_reliable(a, b):
    """Compare two capped LaurentElements where both are certified."""
    R = a.ring
    bad = None
    seen = 0
    for e in set(a.coeffs) | set(b.coeffs):
        if a.reliable_at(e) and b.reliable_at(e):
            seen += 1
            if not R.eq(a.coefficient(e), b.coefficient(e)):
                bad = e
                break
    return bad, seen


def hyperderivative_properties(law, fs=None, nmax=3):
    """Leibniz rule, composition rule, commutation, and the S_1 identities."""
    R = law.ring
    if fs is None:
        fs = [
            LaurentElement(R, ("z",), {(3,): R.one(), (-1,): R.one()}, law.trunc),
            LaurentElement(R, ("z",), {(-2,): R.one(), (1,): R.from_int(2)},
                           law.trunc),
        ]
    name = law.name
    table = FBinomialTable(law, nmax=2 * nmax)

    cache = {}
    for f in fs:
        cache[id(f)] = hyperderivatives(law, f, 2 * nmax)
        sf = cache[id(f)]
        # S_0 = identity
        bad, _ = _agree_on_reliable(sf[0], f)
        if bad is not None:
            return Report("hyper/identity", name, None,
                          _fail(R, bad, sf[0].coefficient(bad), f.coefficient(bad)))
        # S_1 f * p_F = f'
        lhs = sf[1] * law.pF.rename(("z",)).as_laurent()
        bad, _ = _agree_on_reliable(lhs, f.derivative("z"))
        if bad is not None:
            return Report("hyper/first_derivative", name, None,
                          _fail(R, bad, lhs.coefficient(bad),
                                f.derivative("z").coefficient(bad)))

    # Leibniz
    f, g = fs[0], fs[1 % len(fs)]
    sf, sg = cache[id(f)], cache[id(g)]
    prod = f * g
    sprod = hyperderivatives(law, prod, nmax)
    for n in range(0, nmax + 1):
        rhs = None
        for i in range(0, n + 1):
            term = sf[i] * sg[n - i]
            rhs = term if rhs is None else rhs + term
        bad, seen = _agree_on_reliable(sprod[n], rhs)
        if bad is not None:
            return Report("hyper/leibniz", name, {"n": n},
                          _fail(R, bad, sprod[n].coefficient(bad),
                                rhs.coefficient(bad)))

    # composition and commutation
    nested = {n: hyperderivatives(law, sf[n], nmax) for n in range(nmax + 1)}
    for m in range(0, nmax + 1):
        for n in range(0, nmax + 1):
            smn = nested[n][m]
            snm = nested[m][n]
            bad, _ = _agree_on_reliable(smn, snm)
            if bad is not None:
                return Report("hyper/commutation", name, {"m": m, "n": n},
                              _fail(R, bad, smn.coefficient(bad),
                                    snm.coefficient(bad)))
            rhs = None
            for k in range(0, m + n + 1):
                coef = table.entry(k, m, n) if k <= table.nmax else R.zero()
                term = sf[k].scale(coef)
                rhs = term if rhs is None else rhs + term
            bad, _ = _agree_on_reliable(smn, rhs)
            if bad is not None:
                return Report("hyper/composition", name, {"m": m, "n": n},
                              _fail(R, bad, smn.coefficient(bad),
                                    rhs.coefficient(bad)))

    is_additive = law.F.coeffs == {(1, 0): R.one(), (0, 1): R.one()}
    if is_additive:
        # repeated S_1 recovers n! S_n; over a ring of characteristic p this
        # kills S_1^p while S_p itself survives
        cur = f
        fact = 1
        for n in range(1, nmax + 1):
            cur = hyperderivative(law, cur, 1)
            fact *= n
            rhs = sf[n].scale(R.from_int(fact))
            bad, _ = _agree_on_reliable(cur, rhs)
            if bad is not None:
                return Report("hyper/repeated_s1", name, {"n": n},
                              _fail(R, bad, cur.coefficient(bad),
                                    rhs.coefficient(bad)))
        if R.kind == "mod":
            p = R.modulus
            cur = f
            for _ in range(p):
                cur = hyperderivative(law, cur, 1)
            if any(not R.is_zero(c) for e, c in cur.coeffs.items()
                   if cur.reliable_at(e)):
                bad = next(e for e, c in cur.coeffs.items()
                           if cur.reliable_at(e) and not R.is_zero(c))
                return Report("hyper/torsion_s1", name, {"p": p},
                              _fail(R, bad, cur.coefficient(bad), R.zero()))
            zp = LaurentElement(R, ("z",), {(p,): R.one()}, law.trunc)
            sp = hyperderivative(law, zp, p)
            if not R.eq(sp.coefficient((0,)), R.one()):
                return Report("hyper/torsion_sp", name, {"p": p},
                              _fail(R, (0,), sp.coefficient((0,)), R.one()))
    return Report("hyperderivative", name, {"nmax": nmax})


def residue_theorems_check(law, nmax=5, samples=20, seed=0, max_pole=3, max_deg=5):
    """Res^F S_n f = 0 and the hyperderivative by-parts rule on seeded samples."""
    R = law.ring
    rng = random.Random(seed)
    name = law.name

    def sample():
        coeffs = {}
        for _ in range(rng.randint(1, 5)):
            e = rng.randint(-max_pole, max_deg)
            c = rng.randint(-5, 5)
            if c:
                coeffs[(e,)] = R.from_int(c)
        return LaurentElement(R, ("z",), coeffs, law.trunc)

    for idx in range(samples):
        f = sample()
        g = sample()
        sf = hyperderivatives(law, f, nmax)
        sg = hyperderivatives(law, g, nmax)
        for n in range(1, nmax + 1):
            r = f_residue(law, sf[n])
            if not R.is_zero(r):
                return Report("residue/vanishing", name, {"seed": seed, "sample": idx},
                              _fail(R, ("n", n), r, R.zero()))
            lhs = f_residue(law, sf[n] * g)
            rhs = R.zero()
            for j in range(1, n + 1):
                rhs = R.sub(rhs, f_residue(law, sf[n - j] * sg[j]))
            if not R.eq(lhs, rhs):
                return Report("residue/by_parts", name, {"seed": seed, "sample": idx},
                              _fail(R, ("n", n), lhs, rhs))
    return Report("residue_theorems", name, {"seed": seed, "samples": samples,
                                             "nmax": nmax})


def delta_residue_check(law, box=(-6, 6)):
    """Res^F z^{-1} delta_F(w/z) dz = 1 on the window (as a series in w)."""
    R = law.ring
    D = delta_F(law, box=box, zbox=(-2 * law.trunc, box[1])).window
    res = f_residue(law, D, "z")
    lo, hi = res.reliable[0]
    for k in range(lo, hi + 1):
        want = R.one() if k == 0 else R.zero()
        got = res.coeffs.get((k,), R.zero())
        if not R.eq(got, want):
            return Report("residue/delta_unit", law.name, [lo, hi],
                          _fail(R, (k,), got, want))
    return Report("residue/delta_unit", law.name, [lo, hi])


def residue_inversion_check(law, samples=10, seed=1, max_pole=3, max_deg=5):
    """Res^F f(iota(z)) dz = -Res^F f(z) dz on seeded Laurent samples."""
    R = law.ring
    rng = random.Random(seed)
    iota = law.iota.as_laurent()
    for idx in range(samples):
        coeffs = {}
        for _ in range(rng.randint(1, 5)):
            e = rng.randint(-max_pole, max_deg)
            c = rng.randint(-5, 5)
            if c:
                coeffs[(e,)] = R.from_int(c)
        f = LaurentElement(R, ("z",), coeffs, law.trunc)
        fi = f.substitute({"z": (iota, True)})
        lhs = f_residue(law, fi)
        rhs = R.neg(f_residue(law, f))
        if not R.eq(lhs, rhs):
            return Report("residue/inversion", law.name, {"seed": seed, "sample": idx},
                          _fail(R, None, lhs, rhs))
    return Report("residue/inversion", law.name, {"seed": seed, "samples": samples})


def iterated_residue_check(law, triples):
    """The three-term iterated residue identity on monomials x0^a x1^b x2^c.

    Convergence of the substitutions is automatic for monomials; anything
    else is rejected.
    """
    R = law.ring
    for t in triples:
        if not (isinstance(t, tuple) and len(t) == 3):
            raise NonConvergentSubstitution("only monomial exponent triples supported")
    name = law.name

    depth = 3 * law.trunc
    pow_cache = {}

    def double_res(base, b_exps, mono_exps):
        # base^a * (vars monomials), residue in second then first variable;
        # the power is expanded deep enough to survive both p_F factors.
        # Powers are cached across triples since the exponents recur.
        key = (base.vars, mono_exps[0])
        a_pow = pow_cache.get(key)
        if a_pow is None:
            a_pow = base.int_power(mono_exps[0], floors=(-depth, -depth))
            pow_cache[key] = a_pow
        shift = LaurentElement(R, base.vars,
                               {b_exps: R.one()}, a_pow.trunc + sum(b_exps) + 1)
        el = a_pow * shift
        inner = f_residue(law, el, base.vars[1])
        return f_residue(law, inner, base.vars[0])

    f12 = law.f_z_iota_w("z1", "z2")
    f21 = f12.reorder(("z2", "z1"))
    f10 = law.f_z_iota_w("z1", "z0")
    for (a, b, c) in triples:
        term1 = double_res(f12, (b, c), (a,))
        term2 = double_res(f21, (c, b), (a,))
        term3 = double_res(f10, (b, a), (c,))
        lhs = R.sub(term1, term2)
        if not R.eq(lhs, term3):
            return Report("residue/iterated", name, {"triple": [a, b, c]},
                          _fail(R, (a, b, c), lhs, term3))
    return Report("residue/iterated", name, {"triples": len(triples)})


def additive_iterated_oracle(a, b, c):
    """Closed form of the iterated identity for the classical case.

    Both double residues of x0^a x1^b x2^c pick out a single binomial term;
    the identity collapses to
    (-1)^(c-1) C(a,-1-c) - (-1)^(a+b-1) C(a,-1-b) = (-1)^(a-1) C(c,-1-a)
    for a+b+c = -2 (the lower binomial indices are often misprinted with the
    opposite sign; see the package docs).
    """
    if a + b + c + 2 != 0:
        raise ValueError("need a+b+c = -2")
    lhs = (-1) ** ((c - 1) % 2) * comb_any(a, -1 - c) \
        - (-1) ** ((a + b - 1) % 2) * comb_any(a, -1 - b)
    rhs = (-1) ** ((a - 1) % 2) * comb_any(c, -1 - a)
    return lhs, rhs
