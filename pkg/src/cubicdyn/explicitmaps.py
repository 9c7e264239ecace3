"""Explicit quadratic maps: construction from a marked configuration, orbits, fixed points.

Coordinates: the cuspidal cubic is y z**2 = x**3, its regular part is gamma(x) = (x, x**3)
and the cusp [0, 1, 0] sits at infinity.  Three points gamma(a), gamma(b), gamma(c) are
collinear exactly when a + b + c = 0, which pins down the shift between the normalized
parameter of the marked configuration (fixed point at 0) and the x coordinate.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import mpmath
import sympy

from .orbitspec import OrbitData, charpoly_complex, dynamical_degree
from .polylab import IntPoly, largest_real_root, power_sum, reverse
from .polylab.roots import mpf_to_fraction
from .realization import (
    FIXED,
    MarkedConfig,
    blown,
    crit_preimage,
    ind_minus,
    ind_plus,
    require_realizable,
)

DEFAULT_DPS = 64
MONOMIALS = ((2, 0, 0), (0, 2, 0), (0, 0, 2), (0, 1, 1), (1, 0, 1), (1, 1, 0))


class ExplicitMapError(ArithmeticError):
    pass


class IndeterminacyHit(ExplicitMapError):
    def __init__(self, step: int):
        super().__init__(f"orbit hit an indeterminacy point at step {step}")
        self.step = step


# -- projective points -------------------------------------------------------------------

@dataclass(frozen=True)
class ProjPoint:
    coords: tuple

    @classmethod
    def of(cls, *coords) -> "ProjPoint":
        m = max(coords, key=lambda c: abs(c))
        if m == 0:
            raise ValueError("all homogeneous coordinates vanish")
        return cls(tuple(c / m for c in coords))

    def __getitem__(self, k):
        return self.coords[k]

    def affine(self) -> tuple:
        return (self.coords[0] / self.coords[2], self.coords[1] / self.coords[2])

    def dehomogenize(self) -> "ProjPoint":
        """Same point scaled so the last coordinate is 1."""
        z = self.coords[2]
        return ProjPoint(tuple(c / z for c in self.coords))

    def is_real(self, tol=1e-20) -> bool:
        return all(abs(mpmath.im(c)) <= tol for c in self.coords)

    def real(self) -> "ProjPoint":
        return ProjPoint(tuple(mpmath.re(c) for c in self.coords))

    def dist(self, other: "ProjPoint"):
        """Chordal distance between the two lines in C^3."""
        a = _unit(self.coords)
        b = _unit(other.coords)
        ip = sum(x * mpmath.conj(y) for x, y in zip(a, b))
        return mpmath.sqrt(max(mpmath.mpf(0), 1 - abs(ip) ** 2))

    def to_list(self, digits: int = 20) -> list:
        out = []
        for c in self.coords:
            if mpmath.im(c) == 0:
                out.append(mpmath.nstr(mpmath.re(c), digits))
            else:
                out.append(mpmath.nstr(mpmath.mpc(c), digits))
        return out


def _unit(v):
    n = mpmath.sqrt(sum(abs(c) ** 2 for c in v))
    return [c / n for c in v]


def gamma(x) -> ProjPoint:
    return ProjPoint.of(x, x ** 3, mpmath.mpf(1))


CUSP = ProjPoint((mpmath.mpf(0), mpmath.mpf(1), mpmath.mpf(0)))


# -- quadratic maps ------------------------------------------------------------------------

def _mat(rows) -> mpmath.matrix:
    return mpmath.matrix([[mpmath.mpmathify(x) for x in r] for r in rows])


@dataclass
class QuadMapHom:
    """f(p) = M . J(Tinv . p) with J the standard quadratic involution (yz, xz, xy)."""

    M: mpmath.matrix
    Tinv: mpmath.matrix
    delta: object = None
    tau: object = None
    meta: dict = field(default_factory=dict)

    def forms(self, p) -> list:
        v = p.coords if isinstance(p, ProjPoint) else p
        q = [sum(self.Tinv[a, u] * v[u] for u in range(3)) for a in range(3)]
        j = (q[1] * q[2], q[0] * q[2], q[0] * q[1])
        return [sum(self.M[r, k] * j[k] for k in range(3)) for r in range(3)]

    def __call__(self, p: ProjPoint) -> ProjPoint:
        return ProjPoint.of(*self.forms(p))

    def jacobian_h(self, p) -> list:
        """3x3 derivative of the homogeneous forms."""
        v = p.coords if isinstance(p, ProjPoint) else p
        q = [sum(self.Tinv[a, u] * v[u] for u in range(3)) for a in range(3)]
        dj = [[0, q[2], q[1]], [q[2], 0, q[0]], [q[1], q[0], 0]]
        md = [[sum(self.M[r, k] * dj[k][a] for k in range(3)) for a in range(3)] for r in range(3)]
        return [[sum(md[r][a] * self.Tinv[a, u] for a in range(3)) for u in range(3)] for r in range(3)]

    def coefficients(self) -> list:
        """Three rows of six monomial coefficients (x^2, y^2, z^2, yz, xz, xy)."""
        pairs = ((1, 2), (0, 2), (0, 1))
        out = []
        for r in range(3):
            quad = [[mpmath.mpf(0)] * 3 for _ in range(3)]
            for k, (a, b) in enumerate(pairs):
                for u in range(3):
                    for w in range(3):
                        quad[u][w] += self.M[r, k] * self.Tinv[a, u] * self.Tinv[b, w]
            out.append([quad[0][0], quad[1][1], quad[2][2],
                        quad[1][2] + quad[2][1], quad[0][2] + quad[2][0], quad[0][1] + quad[1][0]])
        return out

    def affine_polys(self):
        """Forms restricted to z = 1 as exact sympy polynomials in x, y (rationalized)."""
        x, y = sympy.symbols("x y")
        polys = []
        for row in self.coefficients():
            c = _rational_row(row)
            polys.append(c[0] * x ** 2 + c[1] * y ** 2 + c[2] + c[3] * y + c[4] * x + c[5] * x * y)
        return x, y, polys

    def to_dict(self, digits: int = 30) -> dict:
        return {
            "coefficients": [[mpmath.nstr(mpmath.re(v), digits) for v in row] for row in self.coefficients()],
            "monomials": ["x^2", "y^2", "z^2", "yz", "xz", "xy"],
            "delta": mpmath.nstr(self.delta, digits) if self.delta is not None else None,
            "tau": mpmath.nstr(self.tau, digits) if self.tau is not None else None,
            "meta": dict(self.meta),
        }


def _rational_row(row) -> list:
    """Exact rationals for a coefficient row, with round-off level entries set to zero."""
    big = max(abs(mpmath.re(v)) for v in row)
    cut = big * mpmath.mpf(10) ** (-(mpmath.mp.dps * 3 // 4))
    out = []
    for v in row:
        v = mpmath.re(v)
        fr = Fraction(0) if abs(v) <= cut else mpf_to_fraction(v)
        out.append(sympy.Rational(fr.numerator, fr.denominator))
    return out


def standard_involution() -> QuadMapHom:
    return QuadMapHom(mpmath.eye(3), mpmath.eye(3))


# -- construction from a configuration -----------------------------------------------------

@dataclass
class ConstructedMap:
    od: OrbitData
    config: MarkedConfig
    map: QuadMapHom
    shift: object  # x = normalized parameter + shift
    residual: object
    gap: object
    dps: int

    @property
    def delta(self):
        return self.map.delta

    def x(self, label):
        with mpmath.workdps(self.dps):
            return self.config.param(label).mp(self.dps) + self.shift

    def point(self, label) -> ProjPoint:
        with mpmath.workdps(self.dps):
            return gamma(self.x(label))

    def special_points(self) -> list:
        """Labels at which orientation can switch: p_k^+ and f_C^-1(p_k^-)."""
        return [ind_plus(k) for k in (1, 2, 3)] + [crit_preimage(k) for k in (1, 2, 3)]


def construct_map(config: MarkedConfig, dps: int = DEFAULT_DPS, samples: int = 10) -> ConstructedMap:
    """Solve M in f = M . J . Tinv so that f(gamma(x)) = gamma(delta x + tau) on the cubic."""
    od = config.od
    with mpmath.workdps(dps):
        d = config.ctx.root.mp(dps)
        sp = [config.param(ind_plus(i)).mp(dps) for i in (1, 2, 3)]
        sm = [config.param(ind_minus(i)).mp(dps) for i in (1, 2, 3)]
        shifts = [(sm[k] - d * sp[k]) / (3 * (d - 1)) for k in range(3)]
        spread = max(abs(a - shifts[0]) for a in shifts)
        if spread > mpmath.mpf(10) ** (-(dps // 2)):
            raise ExplicitMapError(f"collinearity constraints inconsistent (spread {mpmath.nstr(spread, 5)})")
        c = shifts[0]
        tau = c * (1 - d)
        xp = [v + c for v in sp]
        T = _mat([[xp[0], xp[1], xp[2]], [xp[0] ** 3, xp[1] ** 3, xp[2] ** 3], [1, 1, 1]])
        Tinv = T ** -1
        rows = []
        xs = [mpmath.mpf(k) / 3 - mpmath.mpf(samples) / 6 + mpmath.mpf("0.0731") for k in range(samples)]
        for x in xs:
            g = gamma(x)
            q = [sum(Tinv[a, u] * g[u] for u in range(3)) for a in range(3)]
            v = _unit([q[1] * q[2], q[0] * q[2], q[0] * q[1]])
            w = gamma(d * x + tau).coords
            # (M v) x w = 0, linear in the 9 entries of M
            for (r1, r2) in ((1, 2), (2, 0), (0, 1)):
                row = [mpmath.mpf(0)] * 9
                for cc in range(3):
                    row[3 * r1 + cc] += v[cc] * w[r2]
                    row[3 * r2 + cc] -= v[cc] * w[r1]
                rows.append(row)
        A = mpmath.matrix(rows)
        _, S, V = mpmath.svd_r(A)
        svals = sorted((S[i], i) for i in range(len(S)))
        smax = svals[-1][0]
        residual = svals[0][0] / smax
        gap = svals[1][0] / smax
        k = svals[0][1]
        m = [V[k, j] for j in range(9)]
        scale = max(m, key=abs)
        M = _mat([[m[3 * r + cc] / scale for cc in range(3)] for r in range(3)])
        fmap = QuadMapHom(M, Tinv, d, tau, {"orbit_data": str(od), "dps": dps})
        if residual > mpmath.mpf(10) ** (-(dps // 2)) or gap < mpmath.mpf(10) ** (-8):
            raise ExplicitMapError(
                f"no consistent quadratic map (residual {mpmath.nstr(residual, 5)}, gap {mpmath.nstr(gap, 5)})")
        return ConstructedMap(od, config, fmap, c, residual, gap, dps)


def build_map(od: OrbitData, dps: int = DEFAULT_DPS) -> ConstructedMap:
    return construct_map(require_realizable(od), dps)


def cubic_residual(cm: ConstructedMap, count: int = 20):
    """max |f(gamma(s)) ^ gamma(f_C(s))| over sample parameters."""
    f = cm.map
    worst = mpmath.mpf(0)
    with mpmath.workdps(cm.dps):
        for k in range(count):
            x = mpmath.mpf(k) / 4 - mpmath.mpf(count) / 8 + mpmath.mpf("0.0123")
            worst = max(worst, f(gamma(x)).dist(gamma(f.delta * x + f.tau)))
    return worst


# -- orbits --------------------------------------------------------------------------------

def iterate(fmap: QuadMapHom, point: ProjPoint, n: int, tol=None) -> list:
    """[point, f(point), ..., f^n(point)]; raises IndeterminacyHit when all forms vanish."""
    tol = tol if tol is not None else mpmath.mpf(10) ** (-(mpmath.mp.dps // 2))
    scale = max(abs(fmap.M[r, k]) for r in range(3) for k in range(3))
    out = [point]
    p = point
    for step in range(1, n + 1):
        F = fmap.forms(p)
        if max(abs(v) for v in F) < tol * scale:
            raise IndeterminacyHit(step)
        p = ProjPoint.of(*F)
        out.append(p)
    return out


def is_indeterminate(fmap: QuadMapHom, p: ProjPoint, tol=None) -> bool:
    tol = tol if tol is not None else mpmath.mpf(10) ** (-(mpmath.mp.dps // 2))
    scale = max(abs(fmap.M[r, k]) for r in range(3) for k in range(3))
    return max(abs(v) for v in fmap.forms(ProjPoint.of(*p.coords))) < tol * scale


def verify_orbit_data(cm: ConstructedMap):
    """Worst distance along the critical orbits, terminal collisions and line contractions."""
    f = cm.map
    od = cm.od
    worst = mpmath.mpf(0)
    with mpmath.workdps(cm.dps):
        for i in (1, 2, 3):
            p = cm.point(ind_minus(i))
            for j in range(1, od.n(i)):
                p = f(p)
                worst = max(worst, p.dist(cm.point(blown(i, j + 1))))
            worst = max(worst, p.dist(plus_point_coords(cm, od.s(i))))
            if not is_indeterminate(f, p, mpmath.mpf(10) ** (-(cm.dps // 3))):
                worst = max(worst, mpmath.mpf(1))
            # the line through the other two p^+ collapses to p_i^-
            j, l = [k for k in (1, 2, 3) if k != i]
            a, b = plus_point_coords(cm, j), plus_point_coords(cm, l)
            on_line = ProjPoint.of(*[mpmath.mpf("0.3719") * x + mpmath.mpf("1.1") * y
                                     for x, y in zip(_unit(a.coords), _unit(b.coords))])
            worst = max(worst, f(on_line).dist(cm.point(ind_minus(i))))
    return worst


def plus_point_coords(cm: ConstructedMap, k: int) -> ProjPoint:
    """p_k^+ as the k-th column of T."""
    T = cm.map.Tinv ** -1
    return ProjPoint.of(*[T[r, k - 1] for r in range(3)])


# -- derivatives and multipliers -------------------------------------------------------------

def _chart(p: ProjPoint) -> int:
    return max(range(3), key=lambda k: abs(p.coords[k]))


def chart_jacobian(fmap: QuadMapHom, p: ProjPoint, a: int, b: int) -> list:
    """2x2 Jacobian of f from the chart {coord a = 1} at p to the chart {coord b = 1}."""
    q = [c / p.coords[a] for c in p.coords]
    F = fmap.forms(q)
    DF = fmap.jacobian_h(q)
    src = [j for j in range(3) if j != a]
    dst = [i for i in range(3) if i != b]
    return [[(DF[i][j] * F[b] - F[i] * DF[b][j]) / F[b] ** 2 for j in src] for i in dst]


def _mul2(A, B):
    return [[A[i][0] * B[0][j] + A[i][1] * B[1][j] for j in range(2)] for i in range(2)]


def eig2(A) -> tuple:
    tr = A[0][0] + A[1][1]
    det = A[0][0] * A[1][1] - A[0][1] * A[1][0]
    disc = mpmath.sqrt(mpmath.mpc(tr * tr - 4 * det))
    m1, m2 = (tr + disc) / 2, (tr - disc) / 2
    out = sorted((_clean(m1), _clean(m2)), key=lambda z: abs(z))
    return tuple(out)


def _clean(z):
    z = mpmath.mpc(z)
    if abs(z.imag) <= mpmath.mpf(10) ** (-(mpmath.mp.dps // 2)) * max(1, abs(z)):
        return mpmath.mpf(z.real)
    return z


def multipliers(fmap: QuadMapHom, p: ProjPoint, period: int = 1) -> tuple:
    """Eigenvalues of D(f^period) at a periodic point, smaller modulus first."""
    orbit = [p]
    for _ in range(period - 1):
        orbit.append(fmap(orbit[-1]))
    charts = [_chart(q) for q in orbit] + [_chart(p)]
    J = [[mpmath.mpf(1), mpmath.mpf(0)], [mpmath.mpf(0), mpmath.mpf(1)]]
    for k, q in enumerate(orbit):
        J = _mul2(chart_jacobian(fmap, q, charts[k], charts[k + 1]), J)
    return eig2(J)


def classify(mults, tol=1e-9) -> str:
    a, b = sorted(float(abs(m)) for m in mults)
    if abs(a - 1) < tol or abs(b - 1) < tol:
        return "marginal"
    if b < 1:
        return "attracting"
    if a > 1:
        return "repelling"
    return "saddle"


def real_index(mults) -> int:
    """sign det(Df - I) for a nondegenerate real fixed point."""
    v = (1 - mults[0]) * (1 - mults[1])
    v = mpmath.re(v)
    if v == 0:
        raise ExplicitMapError("degenerate fixed point")
    return 1 if v > 0 else -1


@dataclass
class FixedPointRecord:
    location: ProjPoint
    on_cubic: bool
    multipliers: tuple
    kind: str
    is_cusp: bool = False

    @property
    def real(self) -> bool:
        return self.location.is_real(mpmath.mpf(10) ** (-(mpmath.mp.dps // 3)))

    def index(self) -> int:
        return real_index(self.multipliers)

    def to_dict(self, digits: int = 15) -> dict:
        return {
            "location": self.location.to_list(digits),
            "on_cubic": self.on_cubic,
            "cusp": self.is_cusp,
            "real": self.real,
            "multipliers": [mpmath.nstr(m, digits) for m in self.multipliers],
            "moduli": [mpmath.nstr(abs(m), digits) for m in self.multipliers],
            "kind": self.kind,
        }


def _on_cubic(p: ProjPoint, tol) -> bool:
    x, y, z = _unit(p.coords)
    return abs(y * z * z - x ** 3) < tol


def _newton_fixed(fmap: QuadMapHom, x, y, steps: int = 80):
    """Polish a fixed point in the z = 1 chart."""
    x, y = mpmath.mpc(x), mpmath.mpc(y)
    for _ in range(steps):
        F = fmap.forms((x, y, 1))
        DF = fmap.jacobian_h((x, y, 1))
        g1 = F[0] - x * F[2]
        g2 = F[1] - y * F[2]
        a11 = DF[0][0] - F[2] - x * DF[2][0]
        a12 = DF[0][1] - x * DF[2][1]
        a21 = DF[1][0] - y * DF[2][0]
        a22 = DF[1][1] - F[2] - y * DF[2][1]
        det = a11 * a22 - a12 * a21
        if det == 0:
            break
        dx = (g1 * a22 - g2 * a12) / det
        dy = (a11 * g2 - a21 * g1) / det
        x, y = x - dx, y - dy
        if abs(dx) + abs(dy) < mpmath.mpf(10) ** (-(mpmath.mp.dps - 5)) * (1 + abs(x) + abs(y)):
            break
    return x, y


def fixed_points(fmap: QuadMapHom, expected: Optional[int] = None) -> list:
    """All fixed points: resultant elimination in the z = 1 chart, Newton polish, plus the cusp."""
    x, y, (F1, F2, F3) = fmap.affine_polys()
    G1 = sympy.Poly(sympy.expand(F1 - x * F3), x, y)
    G2 = sympy.Poly(sympy.expand(F2 - y * F3), x, y)
    res = sympy.Poly(sympy.resultant(G1.as_expr(), G2.as_expr(), y), x)
    coeffs = [mpmath.mpf(Fraction(int(c.p), int(c.q)).numerator) / int(c.q) for c in res.all_coeffs()]
    while coeffs and coeffs[0] == 0:
        coeffs.pop(0)
    xs = mpmath.polyroots(coeffs, maxsteps=400, extraprec=4 * mpmath.mp.prec) if len(coeffs) > 1 else []
    g1x = sympy.Poly(G1.as_expr(), y)
    g2x = sympy.Poly(G2.as_expr(), y)
    tol = mpmath.mpf(10) ** (-(mpmath.mp.dps // 3))
    found = []
    for x0 in xs:
        cands = []
        for g in (g1x, g2x):
            cs = [complex_eval(c, x, x0) for c in g.all_coeffs()]
            while len(cs) > 1 and abs(cs[0]) < tol:
                cs.pop(0)
            if len(cs) > 1:
                cands += list(mpmath.polyroots(cs, maxsteps=200, extraprec=2 * mpmath.mp.prec))
        best = None
        for y0 in cands:
            F = fmap.forms((x0, y0, 1))
            err = abs(F[0] - x0 * F[2]) + abs(F[1] - y0 * F[2])
            if best is None or err < best[0]:
                best = (err, y0)
        if best is None:
            continue
        xp, yp = _newton_fixed(fmap, x0, best[1])
        p = ProjPoint.of(_clean(xp), _clean(yp), mpmath.mpf(1))
        if is_indeterminate(fmap, p, tol):
            continue
        q = fmap(p)
        if q.dist(p) > tol:
            continue
        if any(p.dist(r.location) < tol for r in found):
            continue
        m = multipliers(fmap, p)
        found.append(FixedPointRecord(p, _on_cubic(p, tol), m, classify(m)))
    if not is_indeterminate(fmap, CUSP, tol) and fmap(CUSP).dist(CUSP) < tol:
        m = multipliers(fmap, CUSP)
        found.append(FixedPointRecord(CUSP, True, m, classify(m), is_cusp=True))
    found.extend(_fixed_at_infinity(fmap, found, tol))
    if expected is not None and len(found) != expected:
        raise ExplicitMapError(f"found {len(found)} fixed points, Lefschetz count is {expected}")
    return found


def complex_eval(expr, var, value):
    f = sympy.lambdify(var, expr, modules="mpmath")
    return mpmath.mpmathify(f(value))


def _fixed_at_infinity(fmap, found, tol) -> list:
    """Fixed points on z = 0 other than the cusp (none expected for maps fixing the cubic)."""
    out = []
    for a in (mpmath.mpf(1), mpmath.mpf(0)):
        # points [1, s, 0] need F3 = 0 and F2 - s F1 = 0; points [0, 1, 0] handled separately
        if a == 0:
            continue
        s = sympy.Symbol("s")
        x, y, (F1, F2, F3) = fmap.affine_polys()
        # homogeneous forms at [1, s, 0]: drop z terms by rebuilding from coefficients
        rows = fmap.coefficients()

        def form(r):
            c = _rational_row(rows[r])
            return c[0] + c[1] * s ** 2 + c[5] * s
        f3 = sympy.Poly(form(2), s)
        if f3.is_zero:
            continue
        cs = [mpmath.mpf(sympy.Rational(c).p) / int(sympy.Rational(c).q) for c in f3.all_coeffs()]
        roots = mpmath.polyroots(cs, maxsteps=200, extraprec=mpmath.mp.prec) if len(cs) > 1 else []
        for s0 in roots:
            p = ProjPoint.of(mpmath.mpf(1), _clean(s0), mpmath.mpf(0))
            if is_indeterminate(fmap, p, tol) or fmap(p).dist(p) > tol:
                continue
            if any(p.dist(r.location) < tol for r in found + out):
                continue
            m = multipliers(fmap, p)
            out.append(FixedPointRecord(p, _on_cubic(p, tol), m, classify(m)))
    return out


def periodic_points(fmap: QuadMapHom, period: int, seeds, tol=None) -> list:
    """Real points of minimal period dividing ``period`` found by Newton on f^period from seeds."""
    tol = tol if tol is not None else mpmath.mpf(10) ** (-(mpmath.mp.dps // 3))
    found = []
    for sx, sy in seeds:
        x, y = mpmath.mpf(sx), mpmath.mpf(sy)
        ok = False
        for _ in range(60):
            try:
                orbit = iterate(fmap, ProjPoint.of(x, y, mpmath.mpf(1)), period)
            except IndeterminacyHit:
                break
            end = orbit[-1]
            if abs(end.coords[2]) < tol:
                break
            ex, ey = end.dehomogenize().affine()
            J = _affine_jacobian_power(fmap, orbit)
            if J is None:
                break
            a11, a12, a21, a22 = J[0][0] - 1, J[0][1], J[1][0], J[1][1] - 1
            det = a11 * a22 - a12 * a21
            if det == 0:
                break
            g1, g2 = ex - x, ey - y
            dx = -(g1 * a22 - g2 * a12) / det
            dy = -(a11 * g2 - a21 * g1) / det
            x, y = x + dx, y + dy
            if abs(x) > 1e8 or abs(y) > 1e8:
                break
            if abs(dx) + abs(dy) < tol * (1 + abs(x) + abs(y)):
                ok = True
                break
        if not ok:
            continue
        p = ProjPoint.of(x, y, mpmath.mpf(1))
        if any(p.dist(q) < tol for q in found):
            continue
        try:
            end = iterate(fmap, p, period)[-1]
        except IndeterminacyHit:
            continue
        if end.dist(p) < tol:
            found.append(p)
    return found


def _affine_jacobian_power(fmap, orbit):
    J = [[mpmath.mpf(1), mpmath.mpf(0)], [mpmath.mpf(0), mpmath.mpf(1)]]
    for q in orbit[:-1]:
        if abs(q.coords[2]) < mpmath.mpf(10) ** -30:
            return None
        J = _mul2(chart_jacobian(fmap, q, 2, 2), J)
    return J


def minimal_period(fmap: QuadMapHom, p: ProjPoint, period: int, tol=None) -> int:
    tol = tol if tol is not None else mpmath.mpf(10) ** (-(mpmath.mp.dps // 3))
    orbit = iterate(fmap, p, period)
    for k in range(1, period + 1):
        if period % k == 0 and orbit[k].dist(p) < tol:
            return k
    return period


# -- normal form with p_i^+ at the coordinate points -----------------------------------------

def normal_frame(cm: ConstructedMap, base: str = "cusp") -> mpmath.matrix:
    """Projective change of coordinates sending p_i^+ to e_i and ``base`` to [1,1,1].

    ``base`` is "cusp" or "fixed" (the fixed point on the regular part of the cubic).
    """
    with mpmath.workdps(cm.dps):
        w = CUSP.coords if base == "cusp" else cm.point(FIXED).coords
        q = [sum(cm.map.Tinv[a, u] * w[u] for u in range(3)) for a in range(3)]
        D = mpmath.diag([1 / v for v in q])
        return D * cm.map.Tinv


def to_frame(P: mpmath.matrix, p: ProjPoint) -> ProjPoint:
    v = [sum(P[r, u] * p.coords[u] for u in range(3)) for r in range(3)]
    return ProjPoint.of(*v).dehomogenize()


def normal_form_matrix(cm: ConstructedMap, base: str = "cusp") -> mpmath.matrix:
    """L with f conjugate to L . J in the normal frame, scaled so the largest entry is 1."""
    with mpmath.workdps(cm.dps):
        P = normal_frame(cm, base)
        # f = M J Tinv and P = D Tinv, so P f P^-1 = P M J D^-1 ~ P M D J
        D = P * cm.map.Tinv ** -1
        L = P * cm.map.M * D
        s = max((L[r, k] for r in range(3) for k in range(3)), key=abs)
        return L / s


# -- the closed-form (3,3,n) family -----------------------------------------------------------

def _p(d, coeffs):
    """Evaluate sum coeffs[k] d**k."""
    return mpmath.polyval(list(reversed(coeffs)), d)


def matrix_L_33n(delta) -> mpmath.matrix:
    d = mpmath.mpmathify(delta)
    P = lambda *c: _p(d, c)
    l11 = -d ** 4 * P(1, -1, 1) * P(1, -1, 0, 1) * P(1, 0, -1, 0, 1)
    l12 = P(1, 1) * P(1, -1, 0, 1) ** 2 * P(1, -1, 0, 1, -1, 1)
    l13 = P(1, -1, 1) * P(1, 0, -1, 1) * P(1, 0, -1, 0, 1) * P(-1, 1, 0, -1, 1, -1, -1, 1)
    l21 = -d ** 4 * P(1, -1, 0, 1) * P(1, 0, -1, 1) * P(1, 0, -1, 1, 0, -1, 1)
    l22 = P(1, 0, 0, 0, 0, 1) * P(1, -1, 0, 1, -1, 1) * P(1, -1, 0, 2, -1, -1, 1)
    l23 = P(1, 0, -1, 0, 1) * P(1, -1, 1, 0, -1, 1) * P(-1, 1, 0, -2, 2, 0, -2, 1)
    l31 = -d ** 7 * P(1, 0, -1, 1) ** 2
    l32 = d ** 3 * P(1, -1, 0, 1) * P(1, 0, 0, 0, 0, 1)
    l33 = d ** 3 * P(1, 0, -1, 1) * P(1, -1, 1, 0, -1, 1) * P(-1, 0, 1, -1, -1, 1)
    return mpmath.matrix([[l11, l12, l13], [l21, l22, l23], [l31, l32, l33]])


def map_33n(delta) -> QuadMapHom:
    d = mpmath.mpmathify(delta)
    return QuadMapHom(matrix_L_33n(d), mpmath.eye(3), d, None, {"family": "3,3,n closed form"})


def xi_33n(x, delta):
    d = mpmath.mpmathify(delta)
    P = lambda *c: _p(d, c)
    N0 = -d ** 3 * P(1, -1, 0, 1)
    N1 = P(1, -1, 0, 1, -1, 1) * P(1, -1, 0, 2, -1, -1, 1)
    D0 = d ** 7 * P(1, 0, -1, 1) ** 2
    D1 = -d ** 3 * (d - 1) * P(1, 0, -1, 1) * P(1, -1, 0, 3, -2, -1, 4, -2, -1)
    D2 = P(1, 0, -1, 0, 1) * P(1, -1, 1, 0, -1, 1) * P(-1, 1, 0, -2, 2, 0, -2, 1)
    return -(d ** 5 + 1) * x * (N0 + N1 * x) / (D0 + D1 * x + D2 * x ** 2)


def quadratic_33n(delta) -> tuple:
    """(B0, B1, B2) of the quadratic whose roots are the x-coordinates of the off-cubic fixed points."""
    d = mpmath.mpmathify(delta)
    P = lambda *c: _p(d, c)
    B0 = d ** 6 * P(1, -1, 0, 1) * P(1, 0, -1, 1)
    B1 = -d ** 3 * P(2, -3, -2, 10, -7, -7, 16, -7, -7, 10, -2, -3, 2)
    B2 = P(1, 0, -1, 0, 1) ** 2 * P(1, -1, 1, 0, -1, 1) * P(1, -1, 0, 1, -1, 1)
    return B0, B1, B2


def discriminant_33n_closed(delta):
    d = mpmath.mpmathify(delta)
    P = lambda *c: _p(d, c)
    return -(d - 1) ** 6 * d ** 8 * (d + 1) ** 2 * P(1, 0, 0, 1, 0, 0, 1) * P(3, -4, -4, 11, -4, -4, 3)


def zeta_eta_33n(delta) -> tuple:
    d = mpmath.mpmathify(delta)
    P = lambda *c: _p(d, c)
    Dstar = 2 * P(1, 0, -1, 0, 1) * P(1, -1, 1, 0, -1, 1) * P(1, -1, 0, 1, -1, 1)
    zeta = (d - 1) * P(1, -1, 0, 0, 0, 1, 2, -5, 2, 5, -8, 4, 2, -3, 1) / Dstar
    eta = ((d - 1) * P(1, -1, 0, 1, -1, 1, 0, -1, 1)
           * mpmath.sqrt(P(1, 0, 0, 1, 0, 0, 1) * P(3, -4, -4, 11, -4, -4, 3)) / Dstar)
    return zeta, eta


def multipliers_33n_closed(delta) -> tuple:
    """Roots of t^2 + (1 + zeta - eta i) t + delta, smaller modulus first."""
    d = mpmath.mpmathify(delta)
    zeta, eta = zeta_eta_33n(d)
    b = 1 + zeta - eta * 1j
    disc = mpmath.sqrt(b * b - 4 * d)
    r = [(-b + disc) / 2, (-b - disc) / 2]
    return tuple(sorted(r, key=abs))


def delta_33n(n: int, digits: int = 40):
    return dynamical_degree(OrbitData(3, 3, n, (2, 3, 1)), digits).mp(digits)


def delta_infinity_33n(digits: int = 40):
    """Largest real root of t^7 h(1/t) with h = t^7 - t^6 + 2t^4 - 2t^3 + 2t - 1."""
    h = IntPoly([-1, 2, 0, -2, 2, 0, -1, 1])
    return largest_real_root(reverse(h), digits).mp(digits)


def multiplier_vs_n(n_min: int = 4, n_max: int = 30) -> list:
    """[(n, |smaller multiplier|)] from the closed form."""
    out = []
    for n in range(n_min, n_max + 1):
        with mpmath.workdps(40):
            m = multipliers_33n_closed(delta_33n(n))
            out.append((n, abs(m[0])))
    return out


# -- orientation oracle ------------------------------------------------------------------------

def jacobian_orientation(cm: ConstructedMap, x) -> int:
    """Sign of the affine Jacobian determinant of f at gamma(x), chart z = 1 on both sides."""
    f = cm.map
    with mpmath.workdps(cm.dps):
        J = chart_jacobian(f, gamma(mpmath.mpmathify(x)), 2, 2)
        det = J[0][0] * J[1][1] - J[0][1] * J[1][0]
        if abs(det) < mpmath.mpf(10) ** (-(cm.dps // 2)):
            raise ExplicitMapError("Jacobian degenerate at this point")
        return 1 if det > 0 else -1


def _triangle_sign(f: QuadMapHom, x, r) -> int:
    src, img = [], []
    for k in range(3):
        th = 2 * mpmath.pi * k / 3
        px, py = x + r * mpmath.cos(th), x ** 3 + r * mpmath.sin(th)
        F = f.forms((px, py, 1))
        src.append((px, py))
        img.append((F[0] / F[2], F[1] / F[2]))
    a1 = _signed_area(img)
    if a1 == 0:
        return 0
    return 1 if (_signed_area(src) > 0) == (a1 > 0) else -1


def orientation_oracle(cm: ConstructedMap, x) -> int:
    """+1 if f preserves the orientation of a small loop around gamma(x), else -1.

    The loop is a triangle of three samples at 0, 120 and 240 degrees.  Its radius is
    min(1e-3, a quarter of the distance to the critical lines of f), and it shrinks by
    factors of ten until three consecutive radii give the same nonzero answer.
    """
    f = cm.map
    with mpmath.workdps(cm.dps):
        x = mpmath.mpmathify(x)
        r = min(mpmath.mpf(10) ** -3, critical_distance(cm, x) / 4)
        floor = mpmath.mpf(10) ** (-(cm.dps // 4))
        streak, prev = 0, None
        while r > floor:
            sign = _triangle_sign(f, x, r)
            streak = streak + 1 if (sign != 0 and sign == prev) else 1
            if streak == 3:
                return sign
            prev = sign
            r /= 10
        raise ExplicitMapError("orientation loop did not stabilize; base point too close to a critical line")


def critical_distance(cm: ConstructedMap, x):
    """Euclidean distance in the affine chart from gamma(x) to the three critical lines of f."""
    px, py = x, x ** 3
    plus = [plus_point_coords(cm, k).dehomogenize().affine() for k in (1, 2, 3)]
    best = None
    for a, b in ((0, 1), (0, 2), (1, 2)):
        (ax, ay), (bx, by) = plus[a], plus[b]
        dx, dy = mpmath.re(bx - ax), mpmath.re(by - ay)
        d = abs(dx * (py - mpmath.re(ay)) - dy * (px - mpmath.re(ax))) / mpmath.sqrt(dx * dx + dy * dy)
        best = d if best is None else min(best, d)
    return best


def _signed_area(pts):
    (x0, y0), (x1, y1), (x2, y2) = pts
    return (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0)


def parity_orientation(cm: ConstructedMap, x) -> int:
    """Combinatorial rule: even number of special points before gamma(x) means +1."""
    with mpmath.workdps(cm.dps):
        count = sum(1 for lbl in cm.special_points() if cm.x(lbl) < x)
    return 1 if count % 2 == 0 else -1


# -- exports -----------------------------------------------------------------------------------

def fixed_points_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "y", "z", "on_cubic", "cusp", "mu1", "mu2", "abs_mu1", "abs_mu2", "kind"])
    for r in records:
        w.writerow(r.location.to_list(15) + [r.on_cubic, r.is_cusp]
                   + [mpmath.nstr(m, 15) for m in r.multipliers]
                   + [mpmath.nstr(abs(m), 15) for m in r.multipliers] + [r.kind])
    return buf.getvalue()


def trajectory_csv(points) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["step", "x", "y", "z"])
    for k, p in enumerate(points):
        w.writerow([k] + p.to_list(15))
    return buf.getvalue()


def multiplier_vs_n_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "abs_mu_small"])
    for n, v in rows:
        w.writerow([n, mpmath.nstr(v, 12)])
    return buf.getvalue()


def lefschetz_fixed_count(od: OrbitData) -> int:
    """2 + trace of the H2 action: number of fixed points with multiplicity."""
    return 2 + power_sum(charpoly_complex(od), 1)
