"""Marked points on the invariant cuspidal cubic, realizability and orderings.

Everything lives in the normalized parameter t on the cubic: the finite fixed
point of the restriction f_C sits at t = 0 and f_C(t) = delta * t.  Every
marked point has the form delta**a * t_i, so a point is stored as (i, a) and
comparisons run on certified mpmath intervals first, falling back to an exact
zero test in Q(delta) only when intervals overlap.
"""

from __future__ import annotations

import contextlib
import functools
from dataclasses import dataclass, field
from typing import Optional

import mpmath
from mpmath import iv

from .orbitspec import OrbitData, charpoly_complex, dynamical_degree, CYCLE, IDENTITY, TRANSPOSITION
from .polylab import FieldElem, NumberContext

DEFAULT_BITS = 128
MAX_BITS = 1 << 14


@contextlib.contextmanager
def ivprec(bits: int):
    """Temporarily raise the working precision of mpmath's interval context."""
    old = iv.prec
    iv.prec = max(old, bits)
    try:
        yield
    finally:
        iv.prec = old


class NoDelta(ValueError):
    """The orbit data has no dynamical degree > 1."""


class DegenerateConfig(ValueError):
    """Operation needs a realizable configuration."""


# -- labels -------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class Label:
    kind: str  # blown, ind_plus, ind_minus, crit_image, crit_preimage, fixed
    i: int = 0
    j: int = 0

    def __str__(self):
        if self.kind == "blown":
            return f"p{self.i},{self.j}"
        if self.kind == "fixed":
            return "p_fix"
        short = {"ind_plus": "p{}+", "ind_minus": "p{}-",
                 "crit_image": "fC(p{}+)", "crit_preimage": "fC^-1(p{}-)"}
        return short[self.kind].format(self.i)


def blown(i, j):
    return Label("blown", i, j)


def ind_plus(i):
    return Label("ind_plus", i)


def ind_minus(i):
    return Label("ind_minus", i)


def crit_image(i):
    return Label("crit_image", i)


def crit_preimage(i):
    return Label("crit_preimage", i)


FIXED = Label("fixed")


# -- parameters -----------------------------------------------------------------------

def delta_context(od: OrbitData, digits: int = 40) -> NumberContext:
    if dynamical_degree(od) is None:
        raise NoDelta(f"{od} has no dynamical degree > 1")
    return NumberContext.largest_root_of(charpoly_complex(od), digits)


def indeterminacy_parameters(od: OrbitData, ctx: NumberContext) -> tuple:
    """(t1, t2, t3): parameters of the indeterminacy points of the inverse map."""
    d = ctx.delta
    one = ctx.one
    out = []
    for i in (1, 2, 3):
        j = od.s(i)
        if j == i:
            den = one - d ** od.n(i)
            num = one
        else:
            k = od.s(j)
            if k == i:  # transposition i <-> j
                num = one + d ** od.n(j)
                den = one - d ** (od.n(i) + od.n(j))
            else:  # cycle i -> j -> k
                num = one + d ** od.n(k) + d ** (od.n(j) + od.n(k))
                den = one - d ** od.total
        if den.is_zero():
            raise ZeroDivisionError(f"parameter denominator vanishes for {od}")
        out.append(num / den)
    return tuple(out)


def numeric_parameters(od: OrbitData, delta) -> tuple:
    """Same formulas evaluated in whatever arithmetic ``delta`` carries (mpf, iv, float)."""
    out = []
    for i in (1, 2, 3):
        j = od.s(i)
        if j == i:
            out.append(1 / (1 - delta ** od.n(i)))
        else:
            k = od.s(j)
            if k == i:
                out.append((1 + delta ** od.n(j)) / (1 - delta ** (od.n(i) + od.n(j))))
            else:
                out.append((1 + delta ** od.n(k) + delta ** (od.n(j) + od.n(k)))
                           / (1 - delta ** od.total))
    return tuple(out)


@dataclass(frozen=True)
class CubicParams:
    ctx: NumberContext
    t: tuple

    @property
    def delta(self):
        return self.ctx.root


# -- marked configuration ---------------------------------------------------------------

@dataclass(frozen=True)
class MarkedPoint:
    label: Label
    index: int  # which t_i; 0 for the fixed point
    power: int  # param = delta**power * t_index

    def key(self):
        return (self.index, self.power)


class MarkedConfig:
    """All labeled points on the cubic for a given orbit data, with exact parameters."""

    def __init__(self, od: OrbitData, ctx: Optional[NumberContext] = None):
        self.od = od
        self.ctx = ctx or delta_context(od)
        self.params = CubicParams(self.ctx, indeterminacy_parameters(od, self.ctx))
        pts = []
        for i in (1, 2, 3):
            for j in range(1, od.n(i) + 1):
                pts.append(MarkedPoint(blown(i, j), i, j - 1))
        for i in (1, 2, 3):
            pts.append(MarkedPoint(ind_minus(i), i, 0))
        for m in (1, 2, 3):
            k = od.s(m)
            pts.append(MarkedPoint(ind_plus(k), m, od.n(m) - 1))
            pts.append(MarkedPoint(crit_image(k), m, od.n(m)))
        for i in (1, 2, 3):
            pts.append(MarkedPoint(crit_preimage(i), i, -1))
        pts.append(MarkedPoint(FIXED, 0, 0))
        self.points = tuple(pts)
        self.by_label = {p.label: p for p in pts}
        self._exact = {}
        self._iv = {}
        self._cmp = {}

    # parameters
    def exact(self, key) -> FieldElem:
        v = self._exact.get(key)
        if v is None:
            i, a = key
            if i == 0:
                v = self.ctx.zero
            else:
                v = self.params.t[i - 1] * (self.ctx.delta ** a)
            self._exact[key] = v
        return v

    def param(self, label: Label) -> FieldElem:
        return self.exact(self.by_label[label].key())

    def _interval_table(self, bits: int):
        tab = self._iv.get(bits)
        if tab is None:
            br = self.ctx.bracket(bits)
            with ivprec(bits + 32):
                lo = iv.mpf(br.lo.numerator) / br.lo.denominator
                hi = iv.mpf(br.hi.numerator) / br.hi.denominator
                d = iv.mpf([lo.a, hi.b])
                ts = numeric_parameters(self.od, d)
            tab = (d, ts)
            self._iv[bits] = tab
        return tab

    def interval(self, key, bits: int = DEFAULT_BITS):
        i, a = key
        if i == 0:
            return iv.mpf(0)
        d, ts = self._interval_table(bits)
        with ivprec(bits + 32):
            return ts[i - 1] * d ** a

    def approx(self, label: Label, digits: int = 20):
        return self.exact(self.by_label[label].key()).mp(digits)

    def compare_keys(self, k1, k2) -> int:
        """Exact sign of param(k1) - param(k2)."""
        if k1 == k2:
            return 0
        cached = self._cmp.get((k1, k2))
        if cached is not None:
            return cached
        bits = DEFAULT_BITS
        exact_checked = False
        while True:
            x, y = self.interval(k1, bits), self.interval(k2, bits)
            if x.b < y.a:
                res = -1
                break
            if y.b < x.a:
                res = 1
                break
            if not exact_checked:
                if (self.exact(k1) - self.exact(k2)).is_zero():
                    res = 0
                    break
                exact_checked = True
            bits *= 2
            if bits > MAX_BITS:
                res = (self.exact(k1) - self.exact(k2)).sign()
                break
        self._cmp[(k1, k2)] = res
        self._cmp[(k2, k1)] = -res
        return res

    def compare(self, a: Label, b: Label) -> int:
        return self.compare_keys(self.by_label[a].key(), self.by_label[b].key())

    def precedes(self, a: Label, b: Label) -> bool:
        return self.compare(a, b) < 0

    def coincide(self, a: Label, b: Label) -> bool:
        return self.compare(a, b) == 0

    def blown_labels(self) -> list:
        return [p.label for p in self.points if p.label.kind == "blown"]

    def sign_of_t(self) -> tuple:
        return tuple(self.compare_keys((i, 0), (0, 0)) for i in (1, 2, 3))

    def to_dict(self, digits: int = 20) -> dict:
        return {
            "orbit_data": str(self.od),
            "delta": self.ctx.root.to_dict(digits),
            "points": [
                {
                    "label": str(p.label),
                    "param": self.exact(p.key()).as_poly_strings(),
                    "interval": [mpmath.nstr(self.interval(p.key()).a, digits),
                                 mpmath.nstr(self.interval(p.key()).b, digits)],
                }
                for p in self.points
            ],
        }


@functools.lru_cache(maxsize=512)
def marked_config(od: OrbitData) -> MarkedConfig:
    return MarkedConfig(od)


# -- verdicts --------------------------------------------------------------------------

@dataclass(frozen=True)
class Verdict:
    kind: str  # realizable | degenerate | no_delta
    witnesses: tuple = field(default=())

    @property
    def realizable(self) -> bool:
        return self.kind == "realizable"

    def to_dict(self) -> dict:
        return {"kind": self.kind,
                "witnesses": [[str(a), str(b)] for a, b in self.witnesses]}


def ordering(config: MarkedConfig, labels=None) -> list:
    """Labels grouped into exact-tie classes and sorted by increasing parameter."""
    labels = list(labels) if labels is not None else [p.label for p in config.points]
    ordered = sorted(labels, key=functools.cmp_to_key(config.compare))
    groups = []
    for lab in ordered:
        if groups and config.compare(groups[-1][0], lab) == 0:
            groups[-1].append(lab)
        else:
            groups.append([lab])
    return groups


def realizability(od: OrbitData) -> Verdict:
    if dynamical_degree(od) is None:
        return Verdict("no_delta")
    cfg = marked_config(od)
    witnesses = []
    for group in ordering(cfg, cfg.blown_labels()):
        for a_idx in range(len(group)):
            for b_idx in range(a_idx + 1, len(group)):
                witnesses.append((group[a_idx], group[b_idx]))
    if witnesses:
        return Verdict("degenerate", tuple(witnesses))
    return Verdict("realizable")


def verify_witness(cfg: MarkedConfig, a: Label, b: Label) -> bool:
    """Independent exact check of a coincidence witness."""
    return (cfg.param(a) - cfg.param(b)).is_zero()


def require_realizable(od: OrbitData) -> MarkedConfig:
    v = realizability(od)
    if v.kind == "no_delta":
        raise NoDelta(f"{od} has no dynamical degree > 1")
    if v.kind != "realizable":
        raise DegenerateConfig(f"{od} is degenerate: {[(str(a), str(b)) for a, b in v.witnesses]}")
    return marked_config(od)


# -- table rows -------------------------------------------------------------------------

def plus_point(cfg: MarkedConfig, k: int, a: int = 0) -> tuple:
    """Key of f_C**a (p_k^+)."""
    p = cfg.by_label[ind_plus(k)]
    return (p.index, p.power + a)


@dataclass(frozen=True)
class TableRow:
    table: str
    row: str
    guard: object
    chain: tuple = ()  # ((k, a), ...) meaning f_C^a(p_k^+)
    relations: tuple = ()  # '<' or '=' between consecutive chain members
    not_realizable: bool = False

    def describe(self) -> str:
        if self.not_realizable:
            return "not realizable"
        parts = [_chain_name(*self.chain[0])]
        for rel, c in zip(self.relations, self.chain[1:]):
            parts.append("<" if rel == "<" else "=")
            parts.append(_chain_name(*c))
        return " ".join(parts)


def _chain_name(k, a):
    return f"p{k}+" if a == 0 else f"fC^{a}(p{k}+)"


def _row(table, row, guard, spec=None, not_realizable=False):
    if spec is None:
        return TableRow(table, row, guard, not_realizable=not_realizable)
    chain, rels = spec
    return TableRow(table, row, guard, tuple(chain), tuple(rels))


def _std(first, second, rels=("<", "<", "<")):
    return ([(2, 1), first, second, (2, 0)], rels)


# Rows are tried in order; specific tuples precede the general ranges they overlap.
CYCLIC_ROWS = (
    _row("cyclic", "not realizable",
         lambda a, b, c: (a == b == c) or (a == 1 and b == c) or (a == b == 2) or (a == c == 2),
         not_realizable=True),
    _row("cyclic", "n1=n2=1", lambda a, b, c: a == b == 1, _std((1, -1), (3, 2), ("<", "<", "="))),
    _row("cyclic", "n1=1,n2=2", lambda a, b, c: a == 1 and b == 2, _std((1, -1), (3, 2))),
    _row("cyclic", "n1=1,n3=2", lambda a, b, c: a == 1 and c == 2, _std((1, -1), (3, -2))),
    _row("cyclic", "n1=1,n2+1=n3", lambda a, b, c: a == 1 and b + 1 == c, _std((1, -1), (3, 0))),
    _row("cyclic", "n1=1,3<=n2<n3-1", lambda a, b, c: a == 1 and 3 <= b < c - 1, _std((3, 1), (1, -1))),
    _row("cyclic", "n1=1,3<=n3<=n2-1", lambda a, b, c: a == 1 and 3 <= c <= b - 1, _std((3, 0), (1, -1))),
    _row("cyclic", "2<=n1<=n2<n3", lambda a, b, c: 2 <= a <= b < c, _std((3, 1), (1, 0))),
    _row("cyclic", "2<=n1<=n3<=n2", lambda a, b, c: 2 <= a <= c <= b, _std((1, 0), (3, 0))),
)

IDENTITY_ROWS = (
    _row("id", "degenerate n_i=n_j", lambda a, b, c: a == b or b == c or a == c, not_realizable=True),
    _row("id", "(2,3,7)", lambda a, b, c: (a, b, c) == (2, 3, 7), _std((3, 4), (1, -2))),
    _row("id", "(2,3,8)", lambda a, b, c: (a, b, c) == (2, 3, 8), _std((1, -1), (3, 3))),
    _row("id", "(2,3,n3>=9)", lambda a, b, c: a == 2 and b == 3 and c >= 9, _std((3, 3), (1, -1))),
    _row("id", "(2,4,5)", lambda a, b, c: (a, b, c) == (2, 4, 5), _std((1, -1), (3, 1))),
    _row("id", "(2,n2>=4,n3>=6)", lambda a, b, c: a == 2 and b >= 4 and c >= 6, _std((3, 1), (1, -1))),
    _row("id", "3<=n1<n2<n3", lambda a, b, c: 3 <= a < b < c, _std((3, 1), (1, 0))),
)

_EXCEPT_N3_2 = {(3, 6), (3, 7), (3, 8), (4, 5)}

TRANSPOSITION_ROWS = (
    _row("12", "not realizable n1=n2", lambda a, b, c: a == b, not_realizable=True),
    _row("12", "(1,8,2)", lambda a, b, c: (a, b, c) == (1, 8, 2), _std((3, -4), (1, -2))),
    _row("12", "(1,n2>=9,2)", lambda a, b, c: a == 1 and b >= 9 and c == 2, _std((3, -3), (1, -2))),
    _row("12", "(1,4,6)", lambda a, b, c: (a, b, c) == (1, 4, 6), _std((3, 4), (1, -1))),
    _row("12", "(1,4,n3>=7)", lambda a, b, c: a == 1 and b == 4 and c >= 7, _std((3, 3), (1, -1))),
    _row("12", "(2,3,6)", lambda a, b, c: (a, b, c) == (2, 3, 6), _std((1, 0), (3, 3))),
    _row("12", "(2,3,7)", lambda a, b, c: (a, b, c) == (2, 3, 7), _std((3, 3), (1, 0))),
    _row("12", "(2,3,n3>=8)", lambda a, b, c: a == 2 and b == 3 and c >= 8, _std((1, 0), (3, 2))),
    _row("12", "(2,7,2)", lambda a, b, c: (a, b, c) == (2, 7, 2), _std((3, -3), (1, -1))),
    _row("12", "(2,n2>=8,2)", lambda a, b, c: a == 2 and b >= 8 and c == 2, _std((3, -2), (1, -1))),
    _row("12", "n3=2,(n1,n2) exceptional", lambda a, b, c: c == 2 and (a, b) in _EXCEPT_N3_2,
         _std((1, 0), (3, -2))),
    _row("12", "(n1,n2,2),n1>=3", lambda a, b, c: c == 2 and a >= 3 and (a, b) not in _EXCEPT_N3_2,
         _std((3, -1), (1, 0))),
    _row("12", "(1,n2,3) degenerate", lambda a, b, c: a == 1 and c == 3,
         _std((3, 0), (1, -1), ("=", "<", "<"))),
    _row("12", "(1,n2,n2-2) degenerate", lambda a, b, c: a == 1 and c == b - 2,
         _std((1, -1), (3, 0), ("<", "=", "<"))),
    _row("12", "(1,n2,n3),n3>=n2-1>=4", lambda a, b, c: a == 1 and c >= b - 1 >= 4, _std((3, 1), (1, -1))),
    _row("12", "(1,n2,n3),4<=n3<=n2-3", lambda a, b, c: a == 1 and 4 <= c <= b - 3 and b >= 5,
         _std((3, 0), (1, -1))),
    _row("12", "2<=n1<n2<=n3", lambda a, b, c: 2 <= a < b <= c, _std((3, 1), (1, 0))),
    _row("12", "2<=n1<n3<n2", lambda a, b, c: 2 <= a < c < b, _std((1, 0), (3, 0))),
    _row("12", "3<=n3<=n1<n2", lambda a, b, c: 3 <= c <= a < b, _std((3, 0), (1, 0))),
)

TABLES = {CYCLE: CYCLIC_ROWS, IDENTITY: IDENTITY_ROWS, TRANSPOSITION: TRANSPOSITION_ROWS}


@dataclass(frozen=True)
class RowCheck:
    table: str
    row: Optional[str]
    status: str  # pass | fail | uncovered | no_delta
    details: tuple = ()
    other_matches: tuple = ()

    def to_dict(self) -> dict:
        return {"table": self.table, "row": self.row, "status": self.status,
                "details": list(self.details), "other_matches": list(self.other_matches)}


def matching_rows(od: OrbitData) -> list:
    rows = TABLES.get(od.sigma)
    if rows is None:
        raise ValueError(f"classification needs canonical sigma, got {od.sigma_name}")
    return [r for r in rows if r.guard(*od.lengths)]


def check_row(od: OrbitData, row: TableRow) -> tuple:
    """(ok, details) for a single row against the exact configuration."""
    verdict = realizability(od)
    if row.not_realizable:
        ok = verdict.kind == "degenerate"
        return ok, (f"verdict {verdict.kind}",)
    if verdict.kind == "no_delta":
        return False, ("no dynamical degree > 1",)
    cfg = marked_config(od)
    keys = [plus_point(cfg, k, a) for k, a in row.chain]
    details = []
    ok = True
    for (c1, k1), (c2, k2), rel in zip(zip(row.chain, keys), zip(row.chain[1:], keys[1:]), row.relations):
        s = cfg.compare_keys(k1, k2)
        want = -1 if rel == "<" else 0
        good = s == want
        ok &= good
        got = {-1: "<", 0: "=", 1: ">"}[s]
        details.append(f"{_chain_name(*c1)} {got} {_chain_name(*c2)}" + ("" if good else f" (table says {rel})"))
    return ok, tuple(details)


def classify_table_row(od: OrbitData) -> RowCheck:
    table = {CYCLE: "cyclic", IDENTITY: "id", TRANSPOSITION: "12"}.get(od.sigma, od.sigma_name)
    if dynamical_degree(od) is None:
        return RowCheck(table, None, "no_delta")
    rows = matching_rows(od)
    if not rows:
        return RowCheck(table, None, "uncovered")
    first = rows[0]
    ok, details = check_row(od, first)
    return RowCheck(table, first.row, "pass" if ok else "fail", details,
                    tuple(r.row for r in rows[1:]))
