"""Periodic-point bookkeeping from the two characteristic polynomials.

Complex side: #Fix(f^n) with multiplicity is 2 + tr(f^n_* on H2).
Real side: the real slice is a nonorientable surface, so the index sum over real fixed points
of f^n is 1 - tr(f^n_* on H1).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from typing import Iterable, Optional

import mpmath

from .orbitspec import OrbitData, charpoly_complex
from .polylab import IntPoly, cyclotomic, cyclotomic_split, power_sum
from .realhomology import charpoly_real


class CertificateError(ArithmeticError):
    pass


def complex_fix_count(od: OrbitData, n: int) -> int:
    """Number of fixed points of f^n counted with multiplicity (n = 0 gives 2 + deg chi)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    chi = charpoly_complex(od)
    return 2 + (chi.degree if n == 0 else power_sum(chi, n))


def real_index_sum(od: OrbitData, n: int) -> int:
    """Sum of the indices sign det(Df^n - id) over real fixed points of f^n."""
    if n < 1:
        raise ValueError("n must be positive")
    return 1 - power_sum(charpoly_real(od), n)


def residual_power_sum(p: IntPoly, n: int) -> int:
    """Power sum over the roots of the cyclotomic-free part of p."""
    return power_sum(cyclotomic_split(p).residual, n)


@dataclass
class FixCountRow:
    n: int
    complex_count: int
    real_index_sum: int
    fix_plus: Optional[int] = None
    fix_minus: Optional[int] = None
    certified: Optional[bool] = None


@dataclass
class FixCountTable:
    od: str
    rows: list = field(default_factory=list)
    hypothesis: Optional[int] = None
    notes: list = field(default_factory=list)

    @property
    def all_certified(self) -> bool:
        return bool(self.rows) and all(r.certified for r in self.rows)

    def to_dict(self) -> dict:
        return {"orbit_data": self.od, "fix_plus_hypothesis": self.hypothesis,
                "rows": [asdict(r) for r in self.rows], "all_certified": self.all_certified,
                "notes": list(self.notes)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "complex_count", "index_sum", "fix_plus", "fix_minus", "certified"])
        for r in self.rows:
            w.writerow([r.n, r.complex_count, r.real_index_sum,
                        "" if r.fix_plus is None else r.fix_plus,
                        "" if r.fix_minus is None else r.fix_minus,
                        "" if r.certified is None else str(r.certified).lower()])
        return buf.getvalue()


def fix_count_table(od: OrbitData, ns: Iterable[int]) -> FixCountTable:
    rows = [FixCountRow(n, complex_fix_count(od, n), real_index_sum(od, n)) for n in ns]
    return FixCountTable(str(od), rows)


def all_real_certificate(od: OrbitData, n_set: Iterable[int], fix_plus: int = 2) -> FixCountTable:
    """Check complex_count(n) + real_index_sum(n) = 2 fix_plus for every n in n_set.

    Real saddles have index -1 and all other real fixed points index +1, so when the
    identity holds every fixed point of f^n is real, with fix_plus of positive index.
    """
    table = FixCountTable(str(od), hypothesis=fix_plus)
    for n in n_set:
        if n < 1:
            raise ValueError("certificates need n >= 1")
        c = complex_fix_count(od, n)
        r = real_index_sum(od, n)
        if (c + r) % 2:
            raise CertificateError(f"n={n}: complex count {c} and index sum {r} have odd sum")
        ok = c + r == 2 * fix_plus
        row = FixCountRow(n, c, r, certified=ok)
        if ok:
            row.fix_plus = fix_plus
            row.fix_minus = c - fix_plus
        table.rows.append(row)
    return table


def alternative_bookkeeping(od: OrbitData, n: int) -> dict:
    """Two bookkeepings of the complex count.

    ``full`` is 2 + P_chi(n).  ``constant_three`` replaces the unit-circle contribution by the
    constant 3, which agrees with ``full`` only when those roots contribute 3 to P_chi(n).
    """
    chi = charpoly_complex(od)
    split = cyclotomic_split(chi)
    cyclo = 0
    for k, mult in split.factors.items():
        cyclo += mult * power_sum(cyclotomic(k), n)
    return {"n": n, "full": 2 + power_sum(chi, n), "residual_part": power_sum(split.residual, n),
            "cyclotomic_part": cyclo, "cyclotomic_orders": split.orders(),
            "constant_three": 5 + power_sum(split.residual, n)}


def holomorphic_lefschetz_check(records, expected_count: Optional[int] = None):
    """|sum 1/det(I - Df(p)) - 1| over a complete list of fixed points."""
    records = list(records)
    if not records:
        raise CertificateError("empty fixed-point list")
    if expected_count is not None and len(records) != expected_count:
        raise CertificateError(f"fixed-point list has {len(records)} entries, expected {expected_count}")
    total = mpmath.mpf(0)
    for rec in records:
        m = rec.multipliers if hasattr(rec, "multipliers") else rec
        total += 1 / ((1 - m[0]) * (1 - m[1]))
    return abs(total - 1)


def minimal_period_counts(od: OrbitData, n_max: int) -> list:
    """[(n, number of points of minimal period n with multiplicity)] by Moebius inversion."""
    counts = {n: complex_fix_count(od, n) for n in range(1, n_max + 1)}
    out = []
    for n in range(1, n_max + 1):
        out.append((n, sum(_mobius(n // d) * counts[d] for d in range(1, n + 1) if n % d == 0)))
    return out


def _mobius(n: int) -> int:
    result, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            result = -result
        p += 1
    return -result if n > 1 else result
