"""Exact arithmetic in Q(delta) for a real algebraic number delta > 0.

The modulus is any squarefree integer polynomial with delta as a root (not
necessarily irreducible).  Zero tests use gcd with the modulus followed by a
Sturm count on delta's isolating bracket, so reducibility of the modulus never
produces a wrong answer.
"""

from __future__ import annotations

from fractions import Fraction
from functools import cached_property
from typing import Sequence

import mpmath

from .intpoly import IntPoly, _strip, qdivmod, qgcd, squarefree_part
from .roots import RootBracket, cyclotomic_split, largest_real_root, sturm_count


class NumberContext:
    """Q[t]/(modulus) together with an isolating bracket for delta."""

    def __init__(self, modulus: IntPoly, root: RootBracket):
        modulus = squarefree_part(modulus)
        if modulus.degree < 1:
            raise ValueError("modulus must be nonconstant")
        if sturm_count(modulus, root.lo, root.hi) != 1:
            raise ValueError("bracket does not isolate a root of the modulus")
        if root.poly != modulus:
            root = RootBracket.make(modulus, root.lo, root.hi)
        self.modulus = modulus
        self.root = root
        self._brackets = {}

    @classmethod
    def largest_root_of(cls, p: IntPoly, digits: int = 40) -> "NumberContext":
        """Context for the largest real root of the cyclotomic-free part of p."""
        residual = squarefree_part(cyclotomic_split(p).residual)
        br = largest_real_root(residual, digits)
        if br is None:
            raise ValueError(f"{p} has no real root off the unit circle")
        return cls(residual, br)

    @property
    def degree(self) -> int:
        return self.modulus.degree

    def bracket(self, bits: int) -> RootBracket:
        """Root bracket of width at most 2**-bits (cached)."""
        br = self._brackets.get(bits)
        if br is None:
            digits = int(bits * 0.30103) + 2
            br = self.root.refine(digits)
            self._brackets[bits] = br
        return br

    def elem(self, rep: Sequence) -> "FieldElem":
        return FieldElem(self, rep)

    @cached_property
    def one(self) -> "FieldElem":
        return FieldElem(self, [1])

    @cached_property
    def zero(self) -> "FieldElem":
        return FieldElem(self, [])

    @cached_property
    def delta(self) -> "FieldElem":
        return FieldElem(self, [0, 1])

    def __eq__(self, other):
        return (isinstance(other, NumberContext) and self.modulus == other.modulus
                and self.root.lo < other.root.hi and other.root.lo < self.root.hi)

    def __hash__(self):
        return hash(self.modulus)


class FieldElem:
    """A value r(delta) with r a rational polynomial of degree < deg modulus."""

    __slots__ = ("ctx", "rep", "_sign")

    def __init__(self, ctx: NumberContext, rep: Sequence):
        rep = [Fraction(c) for c in rep]
        if len(rep) > ctx.modulus.degree:
            _, rep = qdivmod(rep, ctx.modulus.coeffs)
        self.ctx = ctx
        self.rep = tuple(_strip(list(rep)))
        self._sign = None

    def _coerce(self, other) -> "FieldElem":
        if isinstance(other, FieldElem):
            if other.ctx is not self.ctx and other.ctx != self.ctx:
                raise ValueError("elements from different contexts")
            return other
        return FieldElem(self.ctx, [Fraction(other)])

    def __add__(self, other):
        other = self._coerce(other)
        n = max(len(self.rep), len(other.rep))
        a = self.rep + (0,) * (n - len(self.rep))
        b = other.rep + (0,) * (n - len(other.rep))
        return FieldElem(self.ctx, [x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return FieldElem(self.ctx, [-c for c in self.rep])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        if not self.rep or not other.rep:
            return FieldElem(self.ctx, [])
        out = [Fraction(0)] * (len(self.rep) + len(other.rep) - 1)
        for i, a in enumerate(self.rep):
            if a:
                for j, b in enumerate(other.rep):
                    out[i + j] += a * b
        return FieldElem(self.ctx, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = self.ctx.one
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def inverse(self) -> "FieldElem":
        """Inverse via extended Euclid; requires gcd(rep, modulus) = 1."""
        a = [Fraction(c) for c in self.ctx.modulus.coeffs]
        b = list(self.rep)
        if not b:
            raise ZeroDivisionError("inverse of zero")
        # invariant: r_i = s_i * modulus + u_i * rep
        r0, r1 = a, b
        u0, u1 = [], [Fraction(1)]
        while len(r1) > 1:
            q, r = qdivmod(r0, r1)
            r0, r1 = r1, r
            u0, u1 = u1, _psub(u0, _pmul(q, u1))
            if not r1:
                raise ZeroDivisionError(
                    "element shares a factor with the modulus; not invertible in this context")
        c = r1[0]
        return FieldElem(self.ctx, [x / c for x in u1])

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    # -- exact predicates -----------------------------------------------------
    def is_zero(self) -> bool:
        """True iff the value r(delta) is exactly zero."""
        if not self.rep:
            return True
        g = qgcd(self.rep, self.ctx.modulus.coeffs)
        if len(g) <= 1:
            return False
        gi = IntPoly.from_rational(g)
        return sturm_count(gi, self.ctx.root.lo, self.ctx.root.hi) == 1

    def interval(self, bits: int = 96):
        """Certified rational enclosure of the value using a 2**-bits bracket."""
        br = self.ctx.bracket(bits)
        lo, hi = br.lo, br.hi
        if lo < 0:
            raise ValueError("interval evaluation assumes a positive root")
        vlo = vhi = Fraction(0)
        plo = phi = Fraction(1)
        for c in self.rep:
            if c > 0:
                vlo += c * plo
                vhi += c * phi
            elif c < 0:
                vlo += c * phi
                vhi += c * plo
            plo *= lo
            phi *= hi
        return vlo, vhi

    def sign(self) -> int:
        """Exact sign of the value: zero test first, then refine until decisive."""
        if self._sign is not None:
            return self._sign
        if self.is_zero():
            self._sign = 0
            return 0
        bits = 96
        while True:
            lo, hi = self.interval(bits)
            if lo > 0:
                self._sign = 1
                return 1
            if hi < 0:
                self._sign = -1
                return -1
            bits *= 2

    def mp(self, digits: int = 30):
        """High-precision approximation."""
        with mpmath.workdps(digits + 10):
            d = self.ctx.root.mp(digits + 10)
            acc = mpmath.mpf(0)
            for c in reversed(self.rep):
                acc = acc * d + mpmath.mpf(c.numerator) / c.denominator
            return +acc

    def __float__(self):
        return float(self.mp(20))

    def as_poly_strings(self) -> list:
        return [str(c) for c in self.rep]

    def __repr__(self):
        return f"FieldElem({[str(c) for c in self.rep]} ~ {mpmath.nstr(self.mp(15), 12)})"

    def equals(self, other) -> bool:
        return (self - other).is_zero()


def _pmul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _strip(out)


def _psub(a, b):
    n = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (n - len(a))
    b = list(b) + [Fraction(0)] * (n - len(b))
    return _strip([x - y for x, y in zip(a, b)])


def nf_is_zero(x: FieldElem) -> bool:
    return x.is_zero()
