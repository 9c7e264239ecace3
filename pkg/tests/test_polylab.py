from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from cubicdyn.polylab import (
    IntPoly, NumberContext, RootSeparationError, T, all_complex_roots, cyclotomic, cyclotomic_split,
    euler_phi, gcd, isolate_real_roots, largest_real_root, power_sum, power_sums, reverse,
    squarefree_part, sturm_count,
)
from cubicdyn.polylab.intmatrix import charpoly, companion, matpow, trace
from cubicdyn.polylab.roots import mpf_to_fraction

small_coeffs = st.lists(st.integers(-6, 6), min_size=1, max_size=7)
monic = st.lists(st.integers(-4, 4), min_size=1, max_size=7).map(lambda c: IntPoly(c + [1]))


def test_arithmetic_basics():
    p = IntPoly([1, 2, 3])
    assert p.degree == 2 and p.lead == 3
    assert p + 1 == IntPoly([2, 2, 3])
    assert p * (T - 1) == IntPoly([-1, -1, -1, 3])
    assert str(IntPoly([])) == "0"
    assert IntPoly([0, 0]).is_zero()


@given(small_coeffs, monic)
def test_division_identity(a, b):
    p = IntPoly(a)
    q, r = p.divmod(b)
    assert q * b + r == p
    assert r.is_zero() or r.degree < b.degree
    assert (p * b).exact_div(b) == p


@given(small_coeffs)
def test_compose_neg_is_involution(a):
    p = IntPoly(a)
    assert p.compose_neg().compose_neg() == p
    assert p.compose_neg()(2) == p(-2)


@given(monic, st.integers(1, 12))
def test_power_sums_match_companion_traces(p, n):
    if p.degree < 1:
        return
    assert power_sum(p, n) == trace(matpow(companion(p), n))


def test_power_sum_zero_is_degree():
    assert power_sum(IntPoly([1, 0, 1]), 0) == 2


def test_phi4_power_sum_cycle():
    assert power_sums(cyclotomic(4), 4) == [0, -2, 0, 2]


@given(monic)
def test_charpoly_of_companion(p):
    if p.degree < 1:
        return
    assert charpoly(companion(p)) == p


def test_cyclotomic_values():
    assert cyclotomic(1) == IntPoly([-1, 1])
    assert cyclotomic(12) == IntPoly([1, 0, -1, 0, 1])
    assert [euler_phi(k) for k in range(1, 13)] == [1, 1, 2, 2, 4, 2, 6, 4, 6, 4, 10, 4]


@given(st.lists(st.integers(1, 15), max_size=4), small_coeffs)
def test_cyclotomic_split_reassembles(orders, rest):
    p = IntPoly(rest)
    if p.is_zero():
        return
    for k in orders:
        p = p * cyclotomic(k)
    split = cyclotomic_split(p)
    assert split.reassemble() == p
    for k in orders:
        assert split.factors.get(k, 0) >= orders.count(k)


def test_lehmer_polynomial():
    lehmer = IntPoly([1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1])
    br = largest_real_root(lehmer, 30)
    with mpmath.workdps(40):
        assert abs(br.mp(30) - mpmath.mpf("1.17628081825991750654407033847")) < 1e-25
    assert cyclotomic_split(lehmer).factors == {}


def test_plastic_number_against_bisection():
    p = IntPoly([-1, -1, 0, 1])
    br = largest_real_root(p, 20)
    lo, hi = Fraction(1), Fraction(2)
    for _ in range(80):
        mid = (lo + hi) / 2
        if p.sign_at(mid) > 0:
            hi = mid
        else:
            lo = mid
    assert abs(float(br.mp(20)) - float(lo)) < 1e-15
    assert round(float(br.mp(20)), 7) == 1.324718


def test_sturm_and_isolation():
    p = (T - 1) * (T - 2) * (T + 3)
    assert sturm_count(p, 0, 10) == 2
    roots = isolate_real_roots(p)
    assert len(roots) == 3
    assert largest_real_root(IntPoly([1, 0, 1])) is None


@given(monic)
def test_all_complex_roots_certified(p):
    p = squarefree_part(p)
    if p.degree < 1:
        return
    roots = all_complex_roots(p, 20)
    assert len(roots) == p.degree
    for z, r in roots:
        assert r < mpmath.mpf(10) ** -15 * max(1, abs(z))
    ref = sorted(mpmath.polyroots([mpmath.mpf(c) for c in reversed(p.coeffs)], maxsteps=200, extraprec=200),
                 key=lambda z: (float(abs(z)), float(mpmath.arg(z))))
    for (z, _), w in zip(roots, ref):
        assert abs(z - w) < 1e-10


def test_root_failure_is_structured():
    with pytest.raises(ValueError):
        all_complex_roots(IntPoly([5]))
    assert issubclass(RootSeparationError, ArithmeticError)


def test_gcd_and_reverse():
    a = (T - 1) * (T + 2)
    b = (T - 1) * (T - 5)
    assert gcd(a, b).normalized() == T - 1
    assert reverse(IntPoly([1, 2, 3])) == IntPoly([3, 2, 1])


def test_mpf_to_fraction_keeps_sign():
    assert mpf_to_fraction(mpmath.mpf(-1.5)) == Fraction(-3, 2)
    assert mpf_to_fraction(mpmath.mpf(0)) == 0


def test_number_field_zero_test():
    ctx = NumberContext.largest_root_of(IntPoly([-1, -1, 0, 1]))
    d = ctx.delta
    assert (d ** 3 - d - 1).is_zero()
    assert not (d - 1).is_zero()
    assert (d * d.inverse() - 1).is_zero()
    assert (d - 1).sign() == 1
    with mpmath.workdps(30):
        assert abs(d.mp(20) - mpmath.mpf("1.32471795724474602596")) < 1e-18
