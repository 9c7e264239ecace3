"""Small exact integer-matrix helpers (characteristic polynomial, powers, rank)."""

from __future__ import annotations

from sympy import ZZ, QQ
from sympy.polys.matrices import DomainMatrix

from .intpoly import IntPoly


def to_dm(rows) -> DomainMatrix:
    rows = [[ZZ(int(x)) for x in row] for row in rows]
    n = len(rows)
    m = len(rows[0]) if rows else 0
    return DomainMatrix(rows, (n, m), ZZ)


def from_dm(dm: DomainMatrix) -> list:
    return [[int(x) for x in row] for row in dm.to_list()]


def charpoly(rows) -> IntPoly:
    """det(t*I - M) as an IntPoly."""
    coeffs = to_dm(rows).charpoly()  # descending
    return IntPoly(int(c) for c in reversed(coeffs))


def identity(n: int) -> list:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def matmul(a, b) -> list:
    return from_dm(to_dm(a) * to_dm(b))


def matpow(a, k: int) -> list:
    return from_dm(to_dm(a) ** k)


def rank(rows) -> int:
    return to_dm(rows).convert_to(QQ).rank()


def determinant(rows) -> int:
    return int(to_dm(rows).det())


def trace(rows) -> int:
    return sum(rows[i][i] for i in range(len(rows)))


def companion(p: IntPoly) -> list:
    """Companion matrix of a polynomial that is monic up to sign."""
    q = p if p.lead == 1 else -p
    if q.lead != 1:
        raise ValueError("companion matrix needs a monic polynomial")
    d = q.degree
    m = [[0] * d for _ in range(d)]
    for i in range(1, d):
        m[i][i - 1] = 1
    for i in range(d):
        m[i][d - 1] = -q[i]
    return m
