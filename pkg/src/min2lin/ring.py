"""Effective Euclidean domains: exact arithmetic over Z, Q and F_p.

A Euclidean domain here is an integral domain with a norm function
admitting division with remainder (the remainder has strictly smaller
norm than the divisor).  Three concrete instances are shipped:

* ``Integers`` -- arbitrary-precision ints, norm ``abs``;
* ``Rationals`` -- exact ``fractions.Fraction`` values, norm 1 for
  nonzero elements;
* ``PrimeField(p)`` -- residues in ``[0, p)`` for a prime modulus,
  norm 1 for nonzero elements.

All operations are pure value computations on plain Python objects
(int / Fraction), so domains are safe to share between threads.  The
interface is deliberately generic: a new instance (say Gaussian
integers with norm a^2 + b^2 and rounding division) only needs to
subclass :class:`Domain` and implement the abstract primitives.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple


class DivisionByZero(ArithmeticError):
    """Raised when a division-with-remainder has a zero divisor."""


class ParseError(ValueError):
    """Raised when an element string does not match the domain encoding."""


def _is_prime(p: int) -> bool:
    # Trial division; moduli at our scale are small.
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


class Domain:
    """Base class for effective Euclidean domains.

    Elements are plain Python values; the domain object carries the
    operations.  Products of elements stay polynomially sized in the
    bit-size of the factors for every shipped instance.
    """

    name = "domain"
    is_field = False

    # -- ring primitives -------------------------------------------------

    @property
    def zero(self):
        raise NotImplementedError

    @property
    def one(self):
        raise NotImplementedError

    def add(self, a, b):
        raise NotImplementedError

    def sub(self, a, b):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        return self.sub(self.zero, a)

    def norm(self, a) -> int:
        """Euclidean norm: norm(0) = 0 and divmod remainders shrink it."""
        raise NotImplementedError

    def divmod(self, a, b):
        """Return (q, r) with a = b*q + r and norm(r) < norm(b).

        The canonical choice is deterministic: Euclidean remainder
        0 <= r < |b| over the integers, exact division over fields.
        """
        raise NotImplementedError

    def unit_canonical(self, a):
        """Return (a_canonical, u) with a = u * a_canonical and u a unit.

        Canonical representatives: nonnegative over Z, 0/1 over fields.
        """
        raise NotImplementedError

    def is_unit(self, a) -> bool:
        raise NotImplementedError

    def inverse(self, a):
        """Multiplicative inverse of a unit."""
        raise NotImplementedError

    # -- textual encoding ------------------------------------------------

    def parse(self, text: str):
        raise NotImplementedError

    def format(self, a) -> str:
        raise NotImplementedError

    # -- derived operations ----------------------------------------------

    def is_zero(self, a) -> bool:
        return a == self.zero

    def divides(self, a, b) -> bool:
        """True iff a | b (every element divides 0; 0 divides only 0)."""
        if self.is_zero(b):
            return True
        if self.is_zero(a):
            return False
        _, r = self.divmod(b, a)
        return self.is_zero(r)

    def exact_div(self, a, b):
        """Quotient a / b when b | a; the quotient is unique."""
        if self.is_zero(b):
            raise DivisionByZero("exact division by zero")
        q, r = self.divmod(a, b)
        if not self.is_zero(r):
            raise ArithmeticError("exact_div with nonzero remainder")
        return q

    def ext_gcd(self, a, b):
        """Extended Euclid: (g, s, t) with g = s*a + t*b, canonical g.

        ext_gcd(0, 0) = (0, 0, 0); otherwise g is the canonical unit
        representative of a greatest common divisor of a and b.
        """
        old_r, r = a, b
        old_s, s = self.one, self.zero
        old_t, t = self.zero, self.one
        while not self.is_zero(r):
            q, rem = self.divmod(old_r, r)
            old_r, r = r, rem
            old_s, s = s, self.sub(old_s, self.mul(q, s))
            old_t, t = t, self.sub(old_t, self.mul(q, t))
        g = old_r
        if self.is_zero(g):
            return self.zero, self.zero, self.zero
        g_can, u = self.unit_canonical(g)
        u_inv = self.inverse(u)
        return g_can, self.mul(u_inv, old_s), self.mul(u_inv, old_t)

    def gcd(self, a, b):
        return self.ext_gcd(a, b)[0]

    def lcm(self, a, b):
        """Canonical least common multiple; lcm(0, b) = 0."""
        if self.is_zero(a) or self.is_zero(b):
            return self.zero
        g = self.gcd(a, b)
        m = self.mul(self.exact_div(a, g), b)
        m_can, _ = self.unit_canonical(m)
        return m_can

    def lcm_many(self, items):
        acc = self.one
        for x in items:
            acc = self.lcm(acc, x)
        return acc

    def solve_single(self, a, b, c) -> Optional[Tuple[object, object, object]]:
        """Solve a*x + b*y = c for one equation.

        Returns (x0, y0, g) with a*x0 + b*y0 = c where g = gcd(a, b), or
        None when no solution exists (g does not divide c).  The full
        solution set is {(x0 + (b/g)*r, y0 - (a/g)*r) : r in D} whenever
        g is nonzero.
        """
        g, s, t = self.ext_gcd(a, b)
        if self.is_zero(g):
            # a = b = 0: solvable iff c = 0, any pair works.
            if self.is_zero(c):
                return self.zero, self.zero, self.zero
            return None
        if not self.divides(g, c):
            return None
        m = self.exact_div(c, g)
        return self.mul(s, m), self.mul(t, m), g

    def solve_single_strides(self, a, b, g):
        """Parametrization steps (b/g, -(a/g)) for solve_single witnesses."""
        return self.exact_div(b, g), self.neg(self.exact_div(a, g))


class Integers(Domain):
    name = "Z"

    def __eq__(self, other):
        return isinstance(other, Integers)

    def __hash__(self):
        return hash("Integers")

    @property
    def zero(self):
        return 0

    @property
    def one(self):
        return 1

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def norm(self, a):
        return abs(a)

    def divmod(self, a, b):
        if b == 0:
            raise DivisionByZero("divmod by zero")
        r = a % abs(b)
        q = (a - r) // b
        return q, r

    def unit_canonical(self, a):
        if a < 0:
            return -a, -1
        return a, 1

    def is_unit(self, a):
        return a in (1, -1)

    def inverse(self, a):
        if not self.is_unit(a):
            raise ArithmeticError(f"{a} is not a unit in Z")
        return a

    def parse(self, text):
        if not re.fullmatch(r"[+-]?\d+", text):
            raise ParseError(f"not an integer literal: {text!r}")
        return int(text)

    def format(self, a):
        return str(a)


class Rationals(Domain):
    name = "Q"
    is_field = True

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("Rationals")

    @property
    def zero(self):
        return Fraction(0)

    @property
    def one(self):
        return Fraction(1)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def norm(self, a):
        return 0 if a == 0 else 1

    def divmod(self, a, b):
        if b == 0:
            raise DivisionByZero("divmod by zero")
        return a / b, Fraction(0)

    def unit_canonical(self, a):
        if a == 0:
            return Fraction(0), Fraction(1)
        return Fraction(1), a

    def is_unit(self, a):
        return a != 0

    def inverse(self, a):
        if a == 0:
            raise ArithmeticError("0 is not a unit")
        return 1 / a

    def parse(self, text):
        if not re.fullmatch(r"[+-]?\d+(/\d+)?", text):
            raise ParseError(f"not a rational literal: {text!r}")
        return Fraction(text)

    def format(self, a):
        if a.denominator == 1:
            return str(a.numerator)
        return f"{a.numerator}/{a.denominator}"


class PrimeField(Domain):
    is_field = True

    def __init__(self, p: int):
        if not _is_prime(p):
            raise ValueError(f"modulus {p} is not prime")
        self.p = p
        self.name = f"F{p}"

    @property
    def zero(self):
        return 0

    @property
    def one(self):
        return 1

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def norm(self, a):
        return 0 if a == 0 else 1

    def divmod(self, a, b):
        if b == 0:
            raise DivisionByZero("divmod by zero")
        return (a * pow(b, self.p - 2, self.p)) % self.p, 0

    def unit_canonical(self, a):
        if a == 0:
            return 0, 1
        return 1, a

    def is_unit(self, a):
        return a % self.p != 0

    def inverse(self, a):
        if a % self.p == 0:
            raise ArithmeticError("0 is not a unit")
        return pow(a, self.p - 2, self.p)

    def parse(self, text):
        if not re.fullmatch(r"\d+", text):
            raise ParseError(f"not a residue literal: {text!r}")
        v = int(text)
        if not 0 <= v < self.p:
            raise ParseError(f"residue {v} out of range [0, {self.p})")
        return v

    def format(self, a):
        return str(a % self.p)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("PrimeField", self.p))


@dataclass(frozen=True)
class DomainSpec:
    """Serializable description of a domain: kind 'Z' | 'Q' | 'Fp'."""

    kind: str
    p: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("Z", "Q", "Fp"):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if self.kind == "Fp":
            if self.p is None or not _is_prime(self.p):
                raise ValueError(f"Fp needs a prime modulus, got {self.p}")
        elif self.p is not None:
            raise ValueError(f"domain {self.kind} takes no modulus")

    def domain(self) -> Domain:
        if self.kind == "Z":
            return Integers()
        if self.kind == "Q":
            return Rationals()
        return PrimeField(self.p)


def spec_of(dom: Domain) -> DomainSpec:
    if isinstance(dom, Integers):
        return DomainSpec("Z")
    if isinstance(dom, Rationals):
        return DomainSpec("Q")
    if isinstance(dom, PrimeField):
        return DomainSpec("Fp", dom.p)
    raise ValueError(f"no spec for domain {dom!r}")
