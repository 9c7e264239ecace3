"""Signed action on H1 of the real surface, built from the parity rules on the cubic."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache, reduce
from typing import Optional

import mpmath
import sympy

from .orbitspec import CYCLE, IDENTITY, TRANSPOSITION, OrbitData, charpoly_complex, dynamical_degree
from .polylab import (
    IntPoly,
    all_complex_roots,
    cyclotomic_split,
    largest_real_root,
    squarefree_part,
)
from .polylab.intmatrix import charpoly, identity, matmul, matpow, rank, to_dm, from_dm
from .realization import (
    Label,
    MarkedConfig,
    blown,
    crit_image,
    crit_preimage,
    ind_minus,
    ind_plus,
    marked_config,
    realizability,
    require_realizable,
)


# -- lines and their classes ---------------------------------------------------------

@dataclass(frozen=True)
class LineOnCubic:
    which: int
    side: str  # '-' for e_k^-, '+' for e_k^+
    intersections: tuple
    on_line_blown: tuple

    def __str__(self):
        return f"e{self.which}{self.side}"


def line_on_cubic(k: int, config: MarkedConfig, side: str = "-") -> LineOnCubic:
    """The critical line e_k^- (or e_k^+) and its three points on the cubic."""
    others = [j for j in (1, 2, 3) if j != k]
    if side == "-":
        pts = (ind_minus(others[0]), ind_minus(others[1]), crit_image(k))
    elif side == "+":
        pts = (ind_plus(others[0]), ind_plus(others[1]), crit_preimage(k))
    else:
        raise ValueError("side must be '-' or '+'")
    on = tuple(b for b in config.blown_labels() if any(config.coincide(b, p) for p in pts))
    return LineOnCubic(k, side, pts, on)


def basis(od: OrbitData) -> list:
    return [blown(i, j) for i in (1, 2, 3) for j in range(1, od.n(i) + 1)]


def real_line_class(line: LineOnCubic, config: MarkedConfig) -> list:
    """Coefficients over the blown basis: 0 on the line, else (-1)**(#intersections before)."""
    out = []
    for b in basis(config.od):
        if b in line.on_line_blown:
            out.append(0)
            continue
        before = sum(1 for p in line.intersections if config.precedes(p, b))
        out.append(-1 if before % 2 else 1)
    return out


# -- sign rules --------------------------------------------------------------------------

def interior_sign(i: int, j: int, config: MarkedConfig) -> int:
    """Sign of e_{i,j} -> +-e_{i,j+1}: even count of indeterminate/critical points before."""
    if not 1 <= j < config.od.n(i):
        raise ValueError(f"interior index ({i},{j}) out of range")
    target = blown(i, j)
    special = [ind_plus(k) for k in (1, 2, 3)] + [crit_preimage(k) for k in (1, 2, 3)]
    count = sum(1 for s in special if config.precedes(s, target))
    return 1 if count % 2 == 0 else -1


def terminal_sign(i: int, config: MarkedConfig) -> int:
    """Sign of e_{i,n_i} -> +-e_{sigma(i)}^-."""
    m = config.od.s(i)
    ref = crit_image(m)
    pts = [ind_minus(m)] + [crit_image(k) for k in (1, 2, 3) if k != m]
    count = sum(1 for p in pts if config.precedes(p, ref))
    return 1 if count % 2 == 1 else -1


def initial_sign(i: int, config: MarkedConfig) -> int:
    """Sign of e_i^+ -> +-e_{i,1}."""
    ref = crit_preimage(i)
    pts = [ind_plus(i)] + [crit_preimage(k) for k in (1, 2, 3) if k != i]
    count = sum(1 for p in pts if config.precedes(p, ref))
    return 1 if count % 2 == 1 else -1


@dataclass(frozen=True)
class HomologyAction:
    od: OrbitData
    basis: tuple
    matrix: tuple  # row-major, columns are images

    @property
    def size(self) -> int:
        return len(self.basis)

    def rows(self) -> list:
        return [list(r) for r in self.matrix]

    def column(self, label: Label) -> list:
        c = self.basis.index(label)
        return [r[c] for r in self.matrix]

    def to_dict(self) -> dict:
        return {"orbit_data": str(self.od), "basis": [f"e{b.i},{b.j}" for b in self.basis],
                "matrix": [list(r) for r in self.matrix]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _freeze(m) -> tuple:
    return tuple(tuple(r) for r in m)


@lru_cache(maxsize=2048)
def real_action_matrix(od: OrbitData) -> HomologyAction:
    cfg = require_realizable(od)
    bs = basis(od)
    idx = {b: k for k, b in enumerate(bs)}
    n = len(bs)
    M = [[0] * n for _ in range(n)]
    for i in (1, 2, 3):
        for j in range(1, od.n(i)):
            M[idx[blown(i, j + 1)]][idx[blown(i, j)]] = interior_sign(i, j, cfg)
        col = idx[blown(i, od.n(i))]
        s = terminal_sign(i, cfg)
        cls = real_line_class(line_on_cubic(od.s(i), cfg, "-"), cfg)
        for r in range(n):
            M[r][col] = s * cls[r]
    return HomologyAction(od, tuple(bs), _freeze(M))


@lru_cache(maxsize=2048)
def inverse_action_matrix(od: OrbitData) -> HomologyAction:
    cfg = require_realizable(od)
    bs = basis(od)
    idx = {b: k for k, b in enumerate(bs)}
    n = len(bs)
    M = [[0] * n for _ in range(n)]
    for i in (1, 2, 3):
        for j in range(1, od.n(i)):
            M[idx[blown(i, j)]][idx[blown(i, j + 1)]] = interior_sign(i, j, cfg)
        col = idx[blown(i, 1)]
        s = initial_sign(i, cfg)
        cls = real_line_class(line_on_cubic(i, cfg, "+"), cfg)
        for r in range(n):
            M[r][col] = s * cls[r]
    return HomologyAction(od, tuple(bs), _freeze(M))


@lru_cache(maxsize=2048)
def charpoly_real(od: OrbitData) -> IntPoly:
    return charpoly(real_action_matrix(od).rows()).normalized()


def charpoly_inverse(od: OrbitData) -> IntPoly:
    return charpoly(inverse_action_matrix(od).rows()).normalized()


# -- growth and entropy ------------------------------------------------------------------

@dataclass(frozen=True)
class Growth:
    kind: str  # exponential | periodic | polynomial
    rho: float = 1.0
    order: Optional[int] = None
    degree: Optional[int] = None

    def __str__(self):
        if self.kind == "exponential":
            return f"exponential({self.rho:.10g})"
        if self.kind == "periodic":
            return f"periodic({self.order})"
        return f"polynomial({self.degree})"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "rho": self.rho, "order": self.order, "degree": self.degree}


def spectral_radius(p: IntPoly, digits: int = 30) -> float:
    res = cyclotomic_split(p).residual
    if res.degree < 1:
        return 1.0
    roots = all_complex_roots(squarefree_part(res), digits)
    return float(max(abs(z) for z, _ in roots))


def _is_identity(m) -> bool:
    return all(m[i][j] == (1 if i == j else 0) for i in range(len(m)) for j in range(len(m)))


def _divisors(n: int) -> list:
    return sorted({d for k in range(1, int(math.isqrt(n)) + 1) if n % k == 0 for d in (k, n // k)})


def matrix_order(rows, bound: int) -> Optional[int]:
    """Smallest m dividing bound with rows**m = I, or None."""
    dm = to_dm(rows)
    for m in _divisors(bound):
        if _is_identity(from_dm(dm ** m)):
            return m
    return None


@lru_cache(maxsize=2048)
def growth_class(od: OrbitData) -> Growth:
    chi_r = charpoly_real(od)
    split = cyclotomic_split(chi_r)
    if split.residual.degree >= 1:
        return Growth("exponential", rho=spectral_radius(chi_r))
    M = real_action_matrix(od).rows()
    L = reduce(lambda a, b: a * b // math.gcd(a, b), split.orders(), 1)
    order = matrix_order(M, L)
    if order is not None:
        return Growth("periodic", order=order)
    n = len(M)
    A = [[x - (1 if i == j else 0) for j, x in enumerate(row)] for i, row in enumerate(matpow(M, L))]
    k = 1
    P = A
    while any(any(r) for r in P):
        P = matmul(P, A)
        k += 1
        if k > n:
            raise ArithmeticError("unipotent part failed to vanish")
    return Growth("polynomial", degree=k - 1)


@dataclass(frozen=True)
class RealSpectralSummary:
    chi_r: IntPoly
    rho_r: float
    growth: Growth
    status: str  # homology_maximal | homology_inconclusive | no_delta

    def to_dict(self) -> dict:
        return {"chi_R": [str(c) for c in self.chi_r.coeffs], "rho_R": self.rho_r,
                "growth": self.growth.to_dict(), "status": self.status}


def entropy_status(od: OrbitData) -> str:
    """Whether the real homology action already carries the dynamical degree."""
    if dynamical_degree(od) is None:
        return "no_delta"
    cfg = require_realizable(od)
    chi_r = charpoly_real(od)
    # rho_R = delta exactly when delta or -delta is a root of chi_R
    hit = cfg.ctx.root.is_root_of(chi_r) or cfg.ctx.root.is_root_of(chi_r.compose_neg())
    return "homology_maximal" if hit else "homology_inconclusive"


def real_spectral_summary(od: OrbitData) -> RealSpectralSummary:
    g = growth_class(od)
    return RealSpectralSummary(charpoly_real(od), g.rho, g, entropy_status(od))


# -- closed-form audits ------------------------------------------------------------------

_t = sympy.Symbol("t")


def _sympy_to_intpoly(expr) -> IntPoly:
    p = sympy.Poly(sympy.expand(expr), _t)
    coeffs = p.all_coeffs()[::-1]
    if any(not c.is_integer for c in coeffs):
        raise ValueError("non-integral polynomial")
    return IntPoly(int(c) for c in coeffs)


def reciprocal_form(phi, total: int):
    """[phi(t) - (-t)**(N+1) phi(1/t)] / (t+1) as a cancelled rational expression."""
    expr = (phi - (-_t) ** (total + 1) * phi.subs(_t, 1 / _t)) / (_t + 1)
    return sympy.cancel(sympy.together(expr))


def phi_cyclic(n1, n2, n3):
    t = _t
    N = n1 + n2 + n3
    return ((-1) ** (N + 1)
            + (-1) ** (n2 + n3 + 1) * (t ** 2 + 1) * t ** n1 / (t - 1)
            + (-1) ** (n2 + n3) * (t ** 3 - t ** 2 + 3 * t + 1) * t ** n3 / (t ** 2 - 1)
            - (t ** 2 + 1) * t ** n2 / (t + 1))


def phi_identity(n1, n2, n3):
    t = _t
    if (n1, n2) == (2, 3):
        return 1 - 2 * t + 3 * t ** 3 - 3 * t ** 4 + t ** 5
    return (1 + (-1) ** n1 * t ** (n1 + 1) - 2 * t ** n2
            + (-1) ** (1 + n1) * t ** (1 + n2) + t ** (n1 + n2))


def _transposition_rows():
    t = _t
    rows = [
        ("n1=3,n2=4,n3=3", lambda a, b, c: (a, b, c) == (3, 4, 3),
         lambda a, b, c, n: 1 - t ** 3 - t ** 4 + t ** 5),
        ("n1=1,n2=4,n3>=6", lambda a, b, c: a == 1 and b == 4 and c >= 6,
         lambda a, b, c, n: 1 - t - t ** 2 + 2 * t ** 3 - t ** 4),
        ("n1=1,n2>=5,n3>=n2-1", lambda a, b, c: a == 1 and b >= 5 and c >= b - 1,
         lambda a, b, c, n: t ** n + (-1 - t ** 3 + 2 * t ** (n - 2)) / (t - 1)),
        ("n1=2,n2=3,n3>=6", lambda a, b, c: a == 2 and b == 3 and c >= 6,
         lambda a, b, c, n: 1 - t ** 2 + t ** 4 - t ** 5),
        ("n3=2<n2-1", lambda a, b, c: c == 2 < b - 1,
         lambda a, b, c, n: 1 + t ** 3 - t ** a - t ** (1 + a) + t ** (2 + a) - t ** (3 + a)),
        ("n1=n3<n2-1", lambda a, b, c: a == c < b - 1,
         lambda a, b, c, n: (1 + (-1) ** a * t ** a + t ** (2 * a) * (t - 1)
                             + 2 * (-1) ** a * t ** a * ((-t) ** a + t) / (t + 1))),
        ("2<n3<=n1-1", lambda a, b, c: 2 < c <= a - 1,
         lambda a, b, c, n: (1 + (-1) ** c * (t ** a + t ** (a + 1) + t ** (c + 1))
                             + (t - 1) * t ** (a + c)
                             - 2 * (-1) ** c * t ** (a + 2) * (1 - (-t) ** (c - 2)) / (t + 1))),
        ("n1+1<=n3<n2-1", lambda a, b, c: a + 1 <= c < b - 1,
         lambda a, b, c, n: (1 + (-1) ** a * (t ** (1 + c) - t ** a * (1 + t)) + t ** (a + c) * (t - 1)
                             + 2 * (-1) ** (a + 1) * t ** (2 + c) * (1 - (-t) ** (a - 2)) / (t + 1)
                             + 2 * (-1) ** (a + 1) * (t ** (1 + c) - t ** (2 + a)) / (t - 1))),
        ("n3>=n2-1", lambda a, b, c: c >= b - 1,
         lambda a, b, c, n: (1 + (-1) ** a * t ** b * (1 - t) + t ** (a + b) + (-1) ** (1 + a) * t ** a * (1 + t)
                             + 2 * (-1) ** (1 + a) * (-t ** (2 + a) + t ** b) / (t - 1))),
    ]
    return rows


TRANSPOSITION_PHI_ROWS = _transposition_rows()


@dataclass
class PhiAudit:
    od: str
    status: str  # match | mismatch | uncovered | not_realizable
    formula: Optional[str] = None
    interpretation: Optional[str] = None
    chi_r: Optional[list] = None
    predicted: Optional[list] = None
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"orbit_data": self.od, "status": self.status, "formula": self.formula,
                "interpretation": self.interpretation, "chi_R": self.chi_r,
                "predicted": self.predicted, "notes": list(self.notes)}


def _predict(phi, total) -> tuple:
    """(IntPoly or None, note)."""
    expr = reciprocal_form(phi, total)
    num, den = sympy.fraction(expr)
    if sympy.Poly(den, _t).degree() > 0:
        return None, "reciprocal form is not a polynomial"
    try:
        return _sympy_to_intpoly(num / den), ""
    except ValueError:
        return None, "reciprocal form has non-integral coefficients"


def _phi_candidates(od: OrbitData) -> list:
    """[(formula name, interpretation, sympy phi)], most specific first."""
    a, b, c = od.lengths
    if od.sigma == CYCLE:
        out = [("cyclic closed form", "lengths as given", phi_cyclic(a, b, c), (a, b, c))]
        for label, args in (("n1, longer, shorter", (a, max(b, c), min(b, c))),
                            ("lengths sorted", tuple(sorted(od.lengths)))):
            if args not in [x[3] for x in out]:
                out.append(("cyclic closed form", label, phi_cyclic(*args), args))
        return [x[:3] for x in out]
    if od.sigma == IDENTITY:
        name = "id (2,3) form" if (a, b) == (2, 3) else "id general form"
        return [(name, "lengths sorted", phi_identity(a, b, c))]
    if od.sigma == TRANSPOSITION:
        out = []
        for name, guard, build in TRANSPOSITION_PHI_ROWS:
            if guard(a, b, c):
                if "n2>=5" in name:
                    for label, n in (("n=n2", b), ("n=n3", c), ("n=n1+n2", a + b), ("n=N", od.total)):
                        out.append((name, label, build(a, b, c, n)))
                else:
                    out.append((name, "as printed", build(a, b, c, None)))
        return out
    return []


def verify_appendix_phi(od: OrbitData) -> PhiAudit:
    """Compare the appendix closed form for the real characteristic polynomial with the matrix."""
    v = realizability(od)
    if not v.realizable:
        return PhiAudit(str(od), "not_realizable", notes=[v.kind])
    cands = _phi_candidates(od)
    if not cands:
        return PhiAudit(str(od), "uncovered")
    chi_r = charpoly_real(od)
    notes = []
    first = None
    for name, interp, phi in cands:
        pred, note = _predict(phi, od.total)
        if pred is None:
            notes.append(f"{name} [{interp}]: {note}")
            continue
        pn = pred.normalized()
        if first is None:
            first = (name, interp, pn)
        if pn == chi_r:
            if (name, interp) != cands[0][:2]:
                notes.append(f"first candidate {cands[0][0]} [{cands[0][1]}] did not match")
            return PhiAudit(str(od), "match", name, interp, [str(x) for x in chi_r.coeffs],
                            [str(x) for x in pn.coeffs], notes)
        notes.append(f"{name} [{interp}] predicts {pn}")
    name, interp, pn = first if first else (cands[0][0], cands[0][1], None)
    return PhiAudit(str(od), "mismatch", name, interp, [str(x) for x in chi_r.coeffs],
                    [str(x) for x in pn.coeffs] if pn is not None else None, notes)


G_33N = IntPoly([1, 0, 0, 0, -2, 2, -1, 1])


def phi_33n_times_tplus1(n: int) -> IntPoly:
    """g(t) + (-t)**n * t**7 * g(1/t)."""
    rev = IntPoly(reversed(G_33N.coeffs))  # t^7 g(1/t)
    sign = -1 if n % 2 else 1
    return G_33N + rev.shift(n) * sign


def phi_33n(n: int) -> IntPoly:
    return phi_33n_times_tplus1(n).exact_div(IntPoly([1, 1]))


def check_33n_identity(n: int) -> bool:
    od = OrbitData(3, 3, n, CYCLE)
    lhs = charpoly_real(od) * IntPoly([1, 1])
    rhs = phi_33n_times_tplus1(n)
    return lhs == rhs or lhs == -rhs


def coxeter_quotient_holds(n: int) -> bool:
    od = OrbitData(1, 1, n, CYCLE)
    return charpoly_real(od) * IntPoly([-1, 1]) == charpoly_complex(od)


# -- reports -----------------------------------------------------------------------------

@dataclass
class AuditReport:
    entries: list

    def to_dict(self) -> dict:
        return {"entries": [e.to_dict() for e in self.entries],
                "summary": {s: sum(1 for e in self.entries if e.status == s)
                            for s in ("match", "mismatch", "uncovered", "not_realizable")}}

    def findings(self) -> list:
        return [e for e in self.entries if e.status == "mismatch"]


def audit_report(ods) -> AuditReport:
    return AuditReport([verify_appendix_phi(od) for od in ods])


CSV_FIELDS = ["orbit_data", "delta", "rho_R", "growth", "status"]


def summary_row(od: OrbitData) -> dict:
    d = dynamical_degree(od)
    v = realizability(od)
    row = {"orbit_data": str(od), "delta": mpmath.nstr(d.approx, 12) if d else "",
           "rho_R": "", "growth": "", "status": v.kind}
    if v.realizable:
        s = real_spectral_summary(od)
        row.update(rho_R=f"{s.rho_r:.12g}", growth=str(s.growth), status=s.status)
    return row


def export_csv(ods) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for od in ods:
        w.writerow(summary_row(od))
    return buf.getvalue()
