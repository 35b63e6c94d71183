"""Exact coefficient rings: rationals, integers, integers mod m, parameter polynomials.

Every ring value is kept in canonical form so that equality is structural:
fractions reduced, residues in [0, m), polynomial dicts with zero terms pruned.
No floating point anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd


class RingMismatch(Exception):
    """Raised when combining elements of different rings."""


class _NotInvertible:
    """Marker value returned by try_invert for non-units."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NotInvertible"


NOT_INVERTIBLE = _NotInvertible()


class Ring:
    """A commutative unital ring with exact arithmetic on raw values.

    Raw value representations:
      rationals     -> Fraction
      integers      -> int
      mod m         -> int in [0, m)
      parameter polynomials -> dict {exponent tuple: base raw value}, no zeros

    Series code works with raw values directly; RingElement is a thin
    wrapper for the public boundary (parsing, printing, ring-level tests).
    """

    KINDS = ("rationals", "integers", "mod", "parampoly")

    def __init__(self, kind, modulus=None, base=None, params=()):
        if kind not in self.KINDS:
            raise ValueError(f"unknown ring kind {kind!r}")
        self.kind = kind
        self.modulus = modulus
        self.base = base
        self.params = tuple(params)
        if kind == "mod" and (modulus is None or modulus < 1):
            raise ValueError("modulus must be a positive integer")
        if kind == "parampoly":
            if base is None or base.kind not in ("rationals", "integers"):
                raise ValueError("parampoly base must be rationals or integers")
            if not self.params:
                raise ValueError("parampoly needs at least one parameter")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def rationals():
        return Ring("rationals")

    @staticmethod
    def integers():
        return Ring("integers")

    @staticmethod
    def integers_mod(m):
        return Ring("mod", modulus=m)

    @staticmethod
    def parampoly(base, params):
        return Ring("parampoly", base=base, params=params)

    # -- identity ----------------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, Ring)
            and self.kind == other.kind
            and self.modulus == other.modulus
            and self.params == other.params
            and (self.base == other.base)
        )

    def __hash__(self):
        return hash((self.kind, self.modulus, self.params, self.base))

    def __repr__(self):
        if self.kind == "mod":
            return f"Ring(mod {self.modulus})"
        if self.kind == "parampoly":
            return f"Ring({self.base!r}[{','.join(self.params)}])"
        return f"Ring({self.kind})"

    @property
    def contains_rationals(self):
        if self.kind == "rationals":
            return True
        if self.kind == "parampoly":
            return self.base.kind == "rationals"
        return False

    # -- raw arithmetic ----------------------------------------------------

    def zero(self):
        if self.kind == "parampoly":
            return {}
        if self.kind == "rationals":
            return Fraction(0)
        return 0

    def one(self):
        return self.from_int(1)

    def from_int(self, n):
        if self.kind == "rationals":
            return Fraction(n)
        if self.kind == "integers":
            return int(n)
        if self.kind == "mod":
            return n % self.modulus
        v = self.base.from_int(n)
        return {} if self.base.is_zero(v) else {(0,) * len(self.params): v}

    def from_fraction(self, q):
        q = Fraction(q)
        if self.kind == "rationals":
            return q
        if q.denominator == 1:
            return self.from_int(q.numerator)
        if self.kind == "parampoly" and self.base.kind == "rationals":
            return {(0,) * len(self.params): q}
        raise ValueError(f"{q} does not lie in {self!r}")

    def param(self, name):
        """The raw value of a single parameter variable."""
        if self.kind != "parampoly" or name not in self.params:
            raise ValueError(f"{name!r} is not a parameter of {self!r}")
        exp = tuple(1 if p == name else 0 for p in self.params)
        return {exp: self.base.one()}

    def is_zero(self, a):
        if self.kind == "parampoly":
            return not a
        return a == self.zero()

    def eq(self, a, b):
        return a == b

    def add(self, a, b):
        if self.kind == "rationals" or self.kind == "integers":
            return a + b
        if self.kind == "mod":
            return (a + b) % self.modulus
        out = dict(a)
        for e, c in b.items():
            s = self.base.add(out.get(e, self.base.zero()), c)
            if self.base.is_zero(s):
                out.pop(e, None)
            else:
                out[e] = s
        return out

    def neg(self, a):
        if self.kind in ("rationals", "integers"):
            return -a
        if self.kind == "mod":
            return (-a) % self.modulus
        return {e: self.base.neg(c) for e, c in a.items()}

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if self.kind in ("rationals", "integers"):
            return a * b
        if self.kind == "mod":
            return (a * b) % self.modulus
        out = {}
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                s = self.base.add(out.get(e, self.base.zero()), self.base.mul(c1, c2))
                if self.base.is_zero(s):
                    out.pop(e, None)
                else:
                    out[e] = s
        return out

    def try_invert(self, a):
        """Return b with a*b = 1, or NOT_INVERTIBLE. Never raises for non-units."""
        if self.kind == "rationals":
            return NOT_INVERTIBLE if a == 0 else 1 / a
        if self.kind == "integers":
            return a if a in (1, -1) else NOT_INVERTIBLE
        if self.kind == "mod":
            if self.modulus == 1:
                return 0
            g = gcd(a, self.modulus)
            if g != 1:
                return NOT_INVERTIBLE
            return pow(a, -1, self.modulus)
        # units of base[params] are the unit constants of the base
        if len(a) != 1:
            return NOT_INVERTIBLE
        (e, c), = a.items()
        if any(e):
            return NOT_INVERTIBLE
        inv = self.base.try_invert(c)
        if inv is NOT_INVERTIBLE:
            return NOT_INVERTIBLE
        return {e: inv}

    def divide_by_int(self, a, n):
        """Exact division by a nonzero integer; raises if not divisible."""
        if n == 0:
            raise ZeroDivisionError
        if self.kind == "rationals":
            return a / n
        if self.kind == "integers":
            q, r = divmod(a, n)
            if r:
                raise ValueError(f"{a} not divisible by {n}")
            return q
        if self.kind == "mod":
            inv = self.try_invert(n % self.modulus)
            if inv is NOT_INVERTIBLE:
                raise ValueError(f"{n} not invertible mod {self.modulus}")
            return (a * inv) % self.modulus
        return {e: self.base.divide_by_int(c, n) for e, c in a.items()}

    # -- text form ---------------------------------------------------------

    def to_text(self, a):
        """Canonical decimal-free text form, e.g. '5/6', 's^2+s', '3 mod 7'."""
        if self.kind == "rationals":
            return str(a)
        if self.kind == "integers":
            return str(a)
        if self.kind == "mod":
            return f"{a} mod {self.modulus}"
        if not a:
            return "0"
        terms = []
        for e in sorted(a, reverse=True):
            c = a[e]
            mono = "*".join(
                p if k == 1 else f"{p}^{k}"
                for p, k in zip(self.params, e)
                if k
            )
            cs = self.base.to_text(c)
            if mono:
                if cs == "1":
                    terms.append(mono)
                elif cs == "-1":
                    terms.append("-" + mono)
                else:
                    terms.append(f"{cs}*{mono}")
            else:
                terms.append(cs)
        out = terms[0]
        for t in terms[1:]:
            out += t if t.startswith("-") else "+" + t
        return out


@dataclass(frozen=True)
class RingElement:
    """A raw ring value tagged with its owning ring."""

    owner: Ring
    data: object

    def _check(self, other):
        if not isinstance(other, RingElement) or other.owner != self.owner:
            raise RingMismatch(f"cannot combine {self!r} with {other!r}")

    def __add__(self, other):
        self._check(other)
        return RingElement(self.owner, self.owner.add(self.data, other.data))

    def __sub__(self, other):
        self._check(other)
        return RingElement(self.owner, self.owner.sub(self.data, other.data))

    def __mul__(self, other):
        self._check(other)
        return RingElement(self.owner, self.owner.mul(self.data, other.data))

    def __neg__(self):
        return RingElement(self.owner, self.owner.neg(self.data))

    def __eq__(self, other):
        return (
            isinstance(other, RingElement)
            and other.owner == self.owner
            and self.owner.eq(self.data, other.data)
        )

    def __hash__(self):
        return hash((self.owner, self.owner.to_text(self.data)))

    def is_zero(self):
        return self.owner.is_zero(self.data)

    def try_invert(self):
        inv = self.owner.try_invert(self.data)
        if inv is NOT_INVERTIBLE:
            return NOT_INVERTIBLE
        return RingElement(self.owner, inv)

    def __repr__(self):
        return f"<{self.owner.to_text(self.data)}>"


def arith(op, a, b=None):
    """Named-operation arithmetic entry point on RingElements."""
    if op == "neg":
        return -a
    a._check(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")
