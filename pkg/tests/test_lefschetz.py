import csv
import io
import json

import pytest
from hypothesis import given, settings, strategies as st

from cubicdyn.lefschetz import (
    CertificateError, all_real_certificate, alternative_bookkeeping, complex_fix_count, fix_count_table,
    holomorphic_lefschetz_check, minimal_period_counts, real_index_sum,
)
from cubicdyn.orbitspec import canonical_orbit_data, cyc, h2_action_matrix, ident
from cubicdyn.polylab import IntPoly, power_sum
from cubicdyn.polylab.intmatrix import matpow, trace
from cubicdyn.realhomology import charpoly_real
from cubicdyn.realization import realizability

REALIZABLE = [od for od in canonical_orbit_data(14) if realizability(od).realizable]


@settings(max_examples=20)
@given(st.sampled_from(canonical_orbit_data(14)), st.integers(1, 12))
def test_complex_count_is_two_plus_trace(od, n):
    assert complex_fix_count(od, n) == 2 + trace(matpow(h2_action_matrix(od), n))


def test_complex_count_at_zero():
    od = ident(2, 4, 5)
    assert complex_fix_count(od, 0) == 2 + 12
    with pytest.raises(ValueError):
        complex_fix_count(od, -1)
    with pytest.raises(ValueError):
        real_index_sum(od, 0)


@settings(max_examples=20)
@given(st.sampled_from(REALIZABLE), st.integers(1, 12))
def test_index_sum_parity(od, n):
    # Lefschetz on the real slice: |index sum| <= complex count, same parity
    c, r = complex_fix_count(od, n), real_index_sum(od, n)
    assert (c + r) % 2 == 0
    assert abs(r) <= c


def test_245_counts():
    od = ident(2, 4, 5)
    assert complex_fix_count(od, 1) == 4
    assert real_index_sum(od, 1) == 0
    assert real_index_sum(od, 3) == 1 - power_sum(charpoly_real(od), 3) == 3


def test_245_index_sum_against_residual_form():
    od = ident(2, 4, 5)
    s = IntPoly([1, 0, 0, -1, -1, -1, 0, 0, 1])
    for n in range(4, 41, 4):
        # (t-1)(t^2+1) contribute 1 + 2 when 4 | n, so the residual form carries -2
        assert real_index_sum(od, n) == -2 - power_sum(s, n)


def test_all_real_certificate_245():
    table = all_real_certificate(ident(2, 4, 5), range(4, 41, 4))
    assert table.all_certified
    for row in table.rows:
        assert row.complex_count + row.real_index_sum == 4
        assert row.fix_plus == 2 and row.fix_minus == row.complex_count - 2


def test_certificate_rejects_odd_parity(monkeypatch):
    import cubicdyn.lefschetz as lf
    monkeypatch.setattr(lf, "real_index_sum", lambda od, n: 1)
    with pytest.raises(CertificateError):
        lf.all_real_certificate(ident(2, 4, 5), [4])


def test_certificate_can_fail_honestly():
    table = all_real_certificate(ident(2, 4, 5), [1, 2, 3])
    assert not table.all_certified


def test_bookkeepings_differ_by_cyclotomic_part():
    b = alternative_bookkeeping(ident(2, 4, 5), 4)
    assert b["full"] == 2 + b["cyclotomic_part"] + b["residual_part"]
    assert b["constant_three"] - b["full"] == 3 - b["cyclotomic_part"]
    assert b["cyclotomic_orders"] == [1, 2]
    assert b["cyclotomic_part"] == 4 and b["constant_three"] == b["full"] - 1


def test_minimal_periods_245():
    assert minimal_period_counts(ident(2, 4, 5), 6) == [(1, 4), (2, 2), (3, 3), (4, 4), (5, 5), (6, 0)]


def test_minimal_period_counts_sum_back():
    od = cyc(1, 1, 8)
    mp = dict(minimal_period_counts(od, 12))
    for n in range(1, 13):
        assert sum(mp[d] for d in mp if n % d == 0) == complex_fix_count(od, n)


def test_holomorphic_lefschetz_refuses_incomplete():
    with pytest.raises(CertificateError):
        holomorphic_lefschetz_check([(0.5, 0.5)], expected_count=4)
    with pytest.raises(CertificateError):
        holomorphic_lefschetz_check([])
    # a single fixed point of a linear map has 1/det(I - A) = 1 only when det(I - A) = 1
    assert holomorphic_lefschetz_check([(0.5, -1.0)]) < 1e-12


def test_table_exports():
    t = fix_count_table(cyc(1, 1, 8), range(1, 6))
    rows = list(csv.reader(io.StringIO(t.to_csv())))
    assert rows[0] == ["n", "complex_count", "index_sum", "fix_plus", "fix_minus", "certified"]
    assert len(rows) == 6
    data = json.loads(t.to_json())
    assert data["orbit_data"] == "1,1,8:123" and len(data["rows"]) == 5
