"""Real-root isolation, cyclotomic splitting, power sums and complex roots."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import mpmath

from .intpoly import IntPoly, cyclotomic, euler_phi, gcd, qdivmod, squarefree_part

INF = float("inf")


class RootSeparationError(ArithmeticError):
    """Simultaneous iteration could not certify pairwise-disjoint root disks."""

    def __init__(self, poly, digits, overlaps):
        self.poly = poly
        self.digits = digits
        self.overlaps = overlaps
        super().__init__(
            f"could not separate roots of {poly} at {digits} digits "
            f"({len(overlaps)} overlapping pairs)"
        )


# -- Sturm sequences --------------------------------------------------------------

def sturm_sequence(p: IntPoly) -> list:
    """Sturm chain of p with every member scaled to a primitive integer polynomial.

    Only positive rescalings are applied, so sign patterns are preserved.
    """
    seq = [p, p.derivative()]
    while seq[-1].degree > 0:
        _, r = qdivmod(seq[-2].coeffs, seq[-1].coeffs)
        if not r:
            break
        nxt = IntPoly.from_rational([-c for c in r])
        seq.append(nxt)
    return seq


def _sign_changes(signs) -> int:
    signs = [s for s in signs if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _signs_at(seq, x) -> list:
    if x == INF:
        return [(q.lead > 0) - (q.lead < 0) for q in seq]
    if x == -INF:
        return [((q.lead > 0) - (q.lead < 0)) * (-1 if q.degree % 2 else 1) for q in seq]
    return [q.sign_at(x) for q in seq]


def sturm_count(p: IntPoly, a, b, *, seq=None) -> int:
    """Number of distinct real roots of p in (a, b]; a, b rational or +-inf."""
    if p.is_zero():
        raise ValueError("sturm_count of the zero polynomial")
    if not (a < b):
        raise ValueError("sturm_count needs a < b")
    if seq is None:
        seq = sturm_sequence(squarefree_part(p))
    a = a if a in (INF, -INF) else Fraction(a)
    b = b if b in (INF, -INF) else Fraction(b)
    return _sign_changes(_signs_at(seq, a)) - _sign_changes(_signs_at(seq, b))


def cauchy_bound(p: IntPoly) -> Fraction:
    """All roots satisfy |z| < bound."""
    lead = abs(p.lead)
    return 1 + Fraction(max(abs(c) for c in p.coeffs[:-1]) if p.degree > 0 else 0, lead)


# -- root brackets -----------------------------------------------------------------

@dataclass(frozen=True)
class RootBracket:
    """A rational interval (lo, hi] holding exactly one root of a squarefree poly."""

    poly: IntPoly
    lo: Fraction
    hi: Fraction
    approx: mpmath.mpf = field(compare=False)
    error: mpmath.mpf = field(compare=False)

    @classmethod
    def make(cls, poly, lo, hi):
        lo, hi = Fraction(lo), Fraction(hi)
        with mpmath.workprec(max(64, _bits_needed(hi - lo))):
            approx = (mpmath.mpf(lo.numerator) / lo.denominator
                      + mpmath.mpf(hi.numerator) / hi.denominator) / 2
            error = mpmath.mpf((hi - lo).numerator) / (hi - lo).denominator / 2
        return cls(poly, lo, hi, +approx, +error)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def __float__(self):
        return float(self.approx)

    def mp(self, digits: int = 30):
        """Midpoint as an mpf, refining first if the bracket is too wide."""
        br = self.refine(digits + 5)
        with mpmath.workdps(digits + 10):
            return (mpmath.mpf(br.lo.numerator) / br.lo.denominator
                    + mpmath.mpf(br.hi.numerator) / br.hi.denominator) / 2

    def refine(self, digits: int) -> "RootBracket":
        """Shrink until the width is below 10**-digits."""
        target = Fraction(1, 10 ** digits)
        if self.width <= target:
            return self
        p = self.poly
        lo, hi = self.lo, self.hi
        s_lo = p.sign_at(lo)
        s_hi = p.sign_at(hi)
        if s_hi == 0:
            # rational root sitting at the right end
            return RootBracket.make(p, hi - target / 2, hi)
        # Newton at high precision, then certify a tiny bracket by a sign change.
        try:
            with mpmath.workdps(digits + 20):
                x0 = (mpmath.mpf(lo.numerator) / lo.denominator
                      + mpmath.mpf(hi.numerator) / hi.denominator) / 2
                coeffs = [mpmath.mpf(c) for c in reversed(p.coeffs)]
                dcoeffs = [mpmath.mpf(c) for c in reversed(p.derivative().coeffs)]
                x = x0
                for _ in range(200):
                    fx = mpmath.polyval(coeffs, x)
                    dfx = mpmath.polyval(dcoeffs, x)
                    if dfx == 0:
                        break
                    step = fx / dfx
                    x -= step
                    if abs(step) < mpmath.mpf(10) ** (-digits - 15):
                        break
                xr = mpf_to_fraction(x)
            eps = target / 4
            a, b = xr - eps, xr + eps
            if lo < a and b <= hi and s_lo != 0:
                sa, sb = p.sign_at(a), p.sign_at(b)
                if sa == 0:
                    return RootBracket.make(p, a - eps, a)
                if sb == 0:
                    return RootBracket.make(p, a, b)
                if sa != sb:
                    return RootBracket.make(p, a, b)
        except (ValueError, ZeroDivisionError, OverflowError):
            pass
        # Bisection fallback.
        while hi - lo > target:
            mid = (lo + hi) / 2
            sm = p.sign_at(mid)
            if sm == 0:
                return RootBracket.make(p, mid - target / 2, mid)
            if sm == s_hi:
                hi = mid
            else:
                lo, s_lo = mid, sm
        return RootBracket.make(p, lo, hi)

    def is_root_of(self, q: IntPoly) -> bool:
        """Whether the bracketed root is also a root of q, decided exactly."""
        if q.is_zero():
            return True
        if q.degree == 0:
            return False
        g = gcd(self.poly, q)
        return g.degree > 0 and sturm_count(g, self.lo, self.hi) == 1

    def to_dict(self, digits: int = 30) -> dict:
        return {
            "value": mpmath.nstr(self.mp(digits), digits),
            "lo": str(self.lo),
            "hi": str(self.hi),
            "poly": [str(c) for c in self.poly.coeffs],
        }


def mpf_to_fraction(x) -> Fraction:
    sign, man, exp, _ = mpmath.mpf(x)._mpf_
    value = Fraction(int(man)) * Fraction(2) ** int(exp)
    return -value if sign else value


def _bits_needed(w: Fraction) -> int:
    if w <= 0:
        return 64
    return int(max(64, -math.log2(w.numerator) + math.log2(w.denominator) + 64))


def isolate_real_roots(p: IntPoly) -> list:
    """Disjoint brackets for every distinct real root, in increasing order."""
    sf = squarefree_part(p)
    if sf.degree <= 0:
        return []
    seq = sturm_sequence(sf)
    B = cauchy_bound(sf)
    out = []

    def rec(a, b, n):
        if n == 0:
            return
        if n == 1:
            out.append(RootBracket.make(sf, a, b))
            return
        mid = (a + b) / 2
        left = sturm_count(sf, a, mid, seq=seq)
        rec(a, mid, left)
        rec(mid, b, n - left)

    rec(-B, B, sturm_count(sf, -B, B, seq=seq))
    return out


def largest_real_root(p: IntPoly, digits: int = 30) -> Optional[RootBracket]:
    """Bracket of the greatest real root, refined to 10**-digits, or None."""
    if p.degree < 1:
        raise ValueError("largest_real_root needs a nonconstant polynomial")
    sf = squarefree_part(p)
    seq = sturm_sequence(sf)
    B = cauchy_bound(sf)
    if sturm_count(sf, -B, B, seq=seq) == 0:
        return None
    lo, hi = -B, B
    while sturm_count(sf, lo, hi, seq=seq) > 1:
        mid = (lo + hi) / 2
        if sturm_count(sf, mid, hi, seq=seq) >= 1:
            lo = mid
        else:
            hi = mid
    return RootBracket.make(sf, lo, hi).refine(digits)


# -- cyclotomic factors --------------------------------------------------------------

@dataclass(frozen=True)
class CyclotomicSplit:
    factors: dict
    residual: IntPoly

    def reassemble(self) -> IntPoly:
        out = self.residual
        for k, m in sorted(self.factors.items()):
            out = out * cyclotomic(k) ** m
        return out

    def orders(self) -> list:
        return sorted(self.factors)

    def describe(self) -> str:
        parts = [f"Phi_{k}^{m}" if m > 1 else f"Phi_{k}" for k, m in sorted(self.factors.items())]
        return " * ".join(parts + [f"({self.residual})"])


def cyclotomic_candidates(degree: int) -> list:
    """Every k with phi(k) <= degree, found by scanning k up to 3*degree**2 + 1."""
    return [k for k in range(1, 3 * degree * degree + 2) if euler_phi(k) <= degree]


def cyclotomic_split(p: IntPoly) -> CyclotomicSplit:
    if p.is_zero():
        raise ValueError("cyclotomic_split of the zero polynomial")
    factors = {}
    rest = p
    for k in cyclotomic_candidates(max(p.degree, 1)):
        if rest.degree < euler_phi(k):
            continue
        phi = cyclotomic(k)
        while rest.degree >= phi.degree:
            q, r = rest.divmod(phi)
            if not r.is_zero():
                break
            factors[k] = factors.get(k, 0) + 1
            rest = q
    return CyclotomicSplit(factors, rest)


# -- power sums ------------------------------------------------------------------------

def power_sums(p: IntPoly, n_max: int) -> list:
    """[P_1, ..., P_nmax] where P_k is the sum of k-th powers of all roots."""
    if p.degree < 1:
        return [0] * n_max
    if abs(p.lead) != 1:
        raise ValueError("power_sums needs a polynomial monic up to sign")
    q = p if p.lead == 1 else -p
    d = q.degree
    c = [q[d - j] for j in range(d + 1)]  # c[0] = 1
    P = [d]
    for k in range(1, n_max + 1):
        s = k * c[k] if k <= d else 0
        for i in range(1, min(k - 1, d) + 1):
            s += c[i] * P[k - i]
        P.append(-s)
    return P[1:]


def power_sum(p: IntPoly, n: int) -> int:
    if n == 0:
        return p.degree
    return power_sums(p, n)[-1]


# -- complex roots ---------------------------------------------------------------------

def all_complex_roots(p: IntPoly, digits: int = 30, max_digits: int = 240):
    """All deg p roots with certified, pairwise disjoint inclusion disks.

    Aberth-Ehrlich simultaneous iteration from perturbed roots of unity;
    each disk has the Weierstrass/Gershgorin radius
    d*|p(z_i)| / |a_d * prod_{j != i}(z_i - z_j)|.  Disjoint disks each hold
    exactly one root.  Precision doubles on failure up to ``max_digits``.
    """
    if p.degree < 1:
        raise ValueError("all_complex_roots needs a nonconstant polynomial")
    d = p.degree
    work = digits
    last_overlaps = []
    while work <= max_digits:
        res = _aberth(p, work)
        if res is not None:
            roots, radii, overlaps = res
            if not overlaps and all(r <= mpmath.mpf(10) ** (-digits) * max(1, abs(z))
                                    for z, r in zip(roots, radii)):
                order = sorted(range(d), key=lambda i: (float(abs(roots[i])), float(mpmath.arg(roots[i]))))
                return [(roots[i], radii[i]) for i in order]
            last_overlaps = overlaps
        work *= 2
    raise RootSeparationError(p, max_digits, last_overlaps)


def _aberth(p: IntPoly, dps: int):
    d = p.degree
    with mpmath.workdps(dps + 10):
        cs = [mpmath.mpf(c) for c in reversed(p.coeffs)]
        dcs = [mpmath.mpf(c) for c in reversed(p.derivative().coeffs)]
        lead = abs(cs[0])
        R = 1 + max(abs(c) for c in cs[1:]) / lead if d > 0 else 1
        # Fujiwara-type radius is tighter for starting points
        rad = 2 * max(abs(cs[k] / cs[0]) ** (mpmath.mpf(1) / k) for k in range(1, d + 1)) if d else 1
        rad = min(R, rad) if rad > 0 else R
        z = [rad * mpmath.expj(2 * mpmath.pi * k / d + mpmath.mpf("0.4") / d) for k in range(d)]
        tol = mpmath.mpf(10) ** (-(dps + 3))
        converged = False
        for _ in range(50 * d + 500):
            maxstep = 0
            for i in range(d):
                pz = mpmath.polyval(cs, z[i])
                dpz = mpmath.polyval(dcs, z[i])
                if pz == 0:
                    continue
                ratio = pz / dpz if dpz != 0 else mpmath.mpc(tol)
                s = mpmath.fsum(1 / (z[i] - z[j]) for j in range(d) if j != i)
                w = ratio / (1 - ratio * s)
                z[i] -= w
                aw = abs(w)
                if aw > maxstep:
                    maxstep = aw
            if maxstep < tol * max(1, max(abs(x) for x in z)):
                converged = True
                break
        if not converged:
            return None
        radii = []
        for i in range(d):
            prod = mpmath.mpf(1)
            for j in range(d):
                if j != i:
                    prod *= abs(z[i] - z[j])
            if prod == 0:
                return None
            radii.append(d * abs(mpmath.polyval(cs, z[i])) / (lead * prod))
        # slack for rounding in evaluating p
        slack = mpmath.mpf(10) ** (-(dps + 5)) * max(1, max(abs(x) for x in z))
        radii = [r + slack for r in radii]
        overlaps = [(i, j) for i in range(d) for j in range(i + 1, d)
                    if abs(z[i] - z[j]) <= radii[i] + radii[j]]
        return [+x for x in z], [+r for r in radii], overlaps
