"""Dense univariate polynomials with arbitrary-precision integer coefficients.

Coefficients are stored in ascending degree order.  Rational arithmetic
(remainders, gcds) is done on lists of ``Fraction`` and the results are
cleared back to primitive integer polynomials.
"""

from __future__ import annotations

import json
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence


def _strip(coeffs: list) -> list:
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


class IntPoly:
    """Immutable integer polynomial ``sum(coeffs[k] * t**k)``."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable[int] = ()):
        out = []
        for c in coeffs:
            if isinstance(c, Fraction):
                if c.denominator != 1:
                    raise ValueError(f"non-integer coefficient {c}")
                c = c.numerator
            elif not isinstance(c, int):
                if float(c) != int(c):
                    raise ValueError(f"non-integer coefficient {c}")
                c = int(c)
            out.append(int(c))
        self._c = tuple(_strip(out))

    # -- constructors -----------------------------------------------------
    @classmethod
    def monomial(cls, k: int, c: int = 1) -> "IntPoly":
        return cls([0] * k + [c])

    @classmethod
    def t(cls) -> "IntPoly":
        return cls([0, 1])

    @classmethod
    def from_rational(cls, coeffs: Sequence[Fraction]) -> "IntPoly":
        """Primitive integer multiple of a rational polynomial (positive scale)."""
        coeffs = _strip(list(coeffs))
        if not coeffs:
            return cls()
        den = 1
        for c in coeffs:
            den = den * Fraction(c).denominator // _gcd(den, Fraction(c).denominator)
        ints = [int(Fraction(c) * den) for c in coeffs]
        g = 0
        for c in ints:
            g = _gcd(g, c)
        return cls([c // g for c in ints])

    @classmethod
    def from_json(cls, text: str) -> "IntPoly":
        return cls(int(s) for s in json.loads(text))

    def to_json(self) -> str:
        return json.dumps([str(c) for c in self._c])

    # -- basic structure ----------------------------------------------------
    @property
    def coeffs(self) -> tuple:
        return self._c

    @property
    def degree(self) -> int:
        return len(self._c) - 1

    @property
    def lead(self) -> int:
        return self._c[-1] if self._c else 0

    def is_zero(self) -> bool:
        return not self._c

    def __len__(self):
        return len(self._c)

    def __getitem__(self, k):
        return self._c[k] if 0 <= k < len(self._c) else 0

    def __eq__(self, other):
        if isinstance(other, int):
            other = IntPoly([other])
        return isinstance(other, IntPoly) and self._c == other._c

    def __hash__(self):
        return hash(self._c)

    def __repr__(self):
        return f"IntPoly({list(self._c)})"

    def __str__(self):
        if not self._c:
            return "0"
        terms = []
        for k in range(len(self._c) - 1, -1, -1):
            c = self._c[k]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if k == 0:
                body = str(a)
            else:
                mon = "t" if k == 1 else f"t^{k}"
                body = mon if a == 1 else f"{a}*{mon}"
            terms.append((sign, body))
        s = ("-" if terms[0][0] == "-" else "") + terms[0][1]
        for sign, body in terms[1:]:
            s += f" {sign} {body}"
        return s

    # -- arithmetic ---------------------------------------------------------
    def __neg__(self):
        return IntPoly(-c for c in self._c)

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self._c), len(other._c))
        return IntPoly(self[k] + other[k] for k in range(n))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        if not self._c or not other._c:
            return IntPoly()
        out = [0] * (len(self._c) + len(other._c) - 1)
        for i, a in enumerate(self._c):
            if a == 0:
                continue
            for j, b in enumerate(other._c):
                out[i + j] += a * b
        return IntPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        result = IntPoly([1])
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def shift(self, k: int) -> "IntPoly":
        """Multiply by t**k."""
        if not self._c:
            return self
        return IntPoly([0] * k + list(self._c))

    def content(self) -> int:
        g = 0
        for c in self._c:
            g = _gcd(g, c)
        return g

    def primitive(self) -> "IntPoly":
        """Divide by content and make the leading coefficient positive."""
        if not self._c:
            return self
        g = self.content()
        if self.lead < 0:
            g = -g
        return IntPoly(c // g for c in self._c)

    def normalized(self) -> "IntPoly":
        """Same polynomial with positive leading coefficient."""
        return -self if self.lead < 0 else self

    def derivative(self) -> "IntPoly":
        return IntPoly(k * self._c[k] for k in range(1, len(self._c)))

    def __call__(self, x):
        acc = 0 * x
        for c in reversed(self._c):
            acc = acc * x + c
        return acc

    def sign_at(self, x: Fraction) -> int:
        """Exact sign of p(x) for rational x."""
        x = Fraction(x)
        u, v = x.numerator, x.denominator
        d = len(self._c) - 1
        acc = 0
        vp = 1
        # sum c_k u^k v^(d-k), evaluated Horner-style
        for c in reversed(self._c):
            acc = acc * u + c * vp
            vp *= v
        return (acc > 0) - (acc < 0)

    def divmod(self, other: "IntPoly"):
        """Integer division; requires the divisor to have leading coefficient +-1."""
        other = _as_poly(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        if abs(other.lead) != 1:
            q, r = qdivmod(self._c, other._c)
            if any(Fraction(c).denominator != 1 for c in q + r):
                raise ValueError("divisor not unit-leading and quotient not integral")
            return IntPoly(q), IntPoly(r)
        rem = list(self._c)
        dq = len(rem) - len(other._c)
        if dq < 0:
            return IntPoly(), self
        q = [0] * (dq + 1)
        lb = other.lead
        ob = other._c
        for k in range(dq, -1, -1):
            c = rem[k + len(ob) - 1] * lb
            q[k] = c
            if c:
                for j, b in enumerate(ob):
                    rem[k + j] -= c * b
        return IntPoly(q), IntPoly(rem)

    def exact_div(self, other: "IntPoly") -> "IntPoly":
        q, r = qdivmod(self._c, _as_poly(other)._c)
        if r or any(Fraction(c).denominator != 1 for c in q):
            raise ValueError(f"{other} does not divide {self}")
        return IntPoly(q)

    def divides(self, other: "IntPoly") -> bool:
        """True when self divides other over Z[t] (content-respecting)."""
        q, r = qdivmod(other._c, self._c)
        return not r and all(Fraction(c).denominator == 1 for c in q)

    def compose_neg(self) -> "IntPoly":
        """p(-t)."""
        return IntPoly(c if k % 2 == 0 else -c for k, c in enumerate(self._c))

    def is_reciprocal(self) -> bool:
        return self._c == tuple(reversed(self._c))


def _as_poly(x) -> IntPoly:
    if isinstance(x, IntPoly):
        return x
    if isinstance(x, int):
        return IntPoly([x])
    raise TypeError(f"cannot coerce {type(x).__name__} to IntPoly")


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


T = IntPoly.t()


# -- rational helpers ----------------------------------------------------------

def qdivmod(a: Sequence, b: Sequence):
    """Quotient and remainder over Q of coefficient lists (ascending)."""
    a = [Fraction(c) for c in a]
    b = _strip([Fraction(c) for c in b])
    if not b:
        raise ZeroDivisionError("division by zero polynomial")
    _strip(a)
    db = len(b) - 1
    if len(a) - 1 < db:
        return [], a
    q = [Fraction(0)] * (len(a) - db)
    lb = b[-1]
    for k in range(len(a) - 1 - db, -1, -1):
        c = a[k + db] / lb
        q[k] = c
        if c:
            for j in range(db + 1):
                a[k + j] -= c * b[j]
    return _strip(q), _strip(a[:db])


def qgcd(a: Sequence, b: Sequence) -> list:
    """Monic gcd over Q of coefficient lists."""
    a = _strip([Fraction(c) for c in a])
    b = _strip([Fraction(c) for c in b])
    while b:
        _, r = qdivmod(a, b)
        a, b = b, r
    if not a:
        return []
    lc = a[-1]
    return [c / lc for c in a]


def gcd(p: IntPoly, q: IntPoly) -> IntPoly:
    """Primitive gcd with positive leading coefficient."""
    g = qgcd(p.coeffs, q.coeffs)
    return IntPoly.from_rational(g)


def squarefree_part(p: IntPoly) -> IntPoly:
    if p.is_zero():
        raise ValueError("zero polynomial has no squarefree part")
    g = gcd(p, p.derivative())
    return p.primitive().exact_div(g) if g.degree > 0 else p.primitive()


def reverse(p: IntPoly) -> IntPoly:
    """t**deg(p) * p(1/t)."""
    return IntPoly(reversed(p.coeffs))


def reciprocal_twist(p: IntPoly, n: int) -> IntPoly:
    """(-t)**n * p(1/t) multiplied through as a polynomial when n >= deg p."""
    if n < p.degree:
        raise ValueError("twist exponent below degree")
    out = [0] * (n + 1)
    sgn = -1 if n % 2 else 1
    for k, c in enumerate(p.coeffs):
        out[n - k] += sgn * c
    return IntPoly(out)


# -- cyclotomic polynomials ----------------------------------------------------

def euler_phi(k: int) -> int:
    result = k
    m = k
    p = 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


@lru_cache(maxsize=None)
def cyclotomic(k: int) -> IntPoly:
    """The k-th cyclotomic polynomial."""
    if k < 1:
        raise ValueError("cyclotomic index must be positive")
    num = IntPoly.monomial(k) - 1
    for d in range(1, k):
        if k % d == 0:
            num = num.exact_div(cyclotomic(d))
    return num
