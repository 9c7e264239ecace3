"""Orbit data, the three characteristic-polynomial families, dynamical degree."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from .polylab import IntPoly, RootBracket, T, largest_real_root, sturm_count
from .polylab.intmatrix import charpoly

IDENTITY = (1, 2, 3)
TRANSPOSITION = (2, 1, 3)
CYCLE = (2, 3, 1)

SIGMA_NAMES = {
    (1, 2, 3): "id",
    (2, 1, 3): "12",
    (2, 3, 1): "123",
    (3, 2, 1): "13",
    (1, 3, 2): "23",
    (3, 1, 2): "132",
}
SIGMA_BY_NAME = {v: k for k, v in SIGMA_NAMES.items()}
SIGMA_BY_NAME.update({"(12)": (2, 1, 3), "(123)": (2, 3, 1), "cyc": (2, 3, 1),
                      "(13)": (3, 2, 1), "(23)": (1, 3, 2), "(132)": (3, 1, 2)})
CANONICAL = (IDENTITY, TRANSPOSITION, CYCLE)


class OrbitDataError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class OrbitData:
    """Critical orbit lengths n1, n2, n3 and the permutation sigma (as images of 1,2,3)."""

    n1: int
    n2: int
    n3: int
    sigma: tuple = IDENTITY

    def __post_init__(self):
        if min(self.n1, self.n2, self.n3) < 1:
            raise OrbitDataError("orbit lengths must be positive")
        if sorted(self.sigma) != [1, 2, 3]:
            raise OrbitDataError(f"sigma {self.sigma} is not a permutation of 1,2,3")

    @property
    def lengths(self) -> tuple:
        return (self.n1, self.n2, self.n3)

    @property
    def total(self) -> int:
        return self.n1 + self.n2 + self.n3

    def n(self, i: int) -> int:
        return self.lengths[i - 1]

    def s(self, i: int) -> int:
        """sigma(i), 1-based."""
        return self.sigma[i - 1]

    def s_inv(self, i: int) -> int:
        return self.sigma.index(i) + 1

    @property
    def sigma_name(self) -> str:
        return SIGMA_NAMES[self.sigma]

    @property
    def family(self) -> str:
        """'id', 'transposition' or 'cyclic'."""
        fixed = sum(1 for i in (1, 2, 3) if self.s(i) == i)
        return {3: "id", 1: "transposition", 0: "cyclic"}[fixed]

    def __str__(self):
        return f"{self.n1},{self.n2},{self.n3}:{self.sigma_name}"

    @classmethod
    def parse(cls, text: str) -> "OrbitData":
        try:
            lengths, name = text.strip().split(":")
            ns = [int(x) for x in lengths.split(",")]
            if len(ns) != 3:
                raise ValueError
            sigma = SIGMA_BY_NAME[name.strip()]
        except (ValueError, KeyError) as exc:
            raise OrbitDataError(f"cannot parse orbit data {text!r}; expected 'n1,n2,n3:sigma'") from exc
        return cls(*ns, sigma)

    def to_dict(self) -> dict:
        return {"n1": self.n1, "n2": self.n2, "n3": self.n3, "sigma": self.sigma_name}

    @classmethod
    def from_dict(cls, d: dict) -> "OrbitData":
        return cls(d["n1"], d["n2"], d["n3"], SIGMA_BY_NAME[d["sigma"]])

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def cyc(n1, n2, n3) -> OrbitData:
    return OrbitData(n1, n2, n3, CYCLE)


def ident(n1, n2, n3) -> OrbitData:
    return OrbitData(n1, n2, n3, IDENTITY)


def transp(n1, n2, n3) -> OrbitData:
    return OrbitData(n1, n2, n3, TRANSPOSITION)


# -- canonical forms ---------------------------------------------------------------

def relabel(lengths, sigma, pi) -> tuple:
    """Apply the relabeling old i -> pi[i-1]; returns (lengths', sigma')."""
    new_len = [0, 0, 0]
    new_sig = [0, 0, 0]
    for i in (1, 2, 3):
        new_len[pi[i - 1] - 1] = lengths[i - 1]
        new_sig[pi[i - 1] - 1] = pi[sigma[i - 1] - 1]
    return tuple(new_len), tuple(new_sig)


def canonicalize(lengths, sigma) -> tuple:
    """Conjugate into sigma in {id, (12), (123)} with the least admissible lengths.

    Returns (OrbitData, relabel) where relabel[i-1] is the new label of old i.
    """
    sigma = tuple(sigma)
    best = None
    for pi in itertools.permutations((1, 2, 3)):
        nl, ns = relabel(tuple(lengths), sigma, pi)
        if ns not in CANONICAL:
            continue
        key = (nl, pi)
        if best is None or key < best[0]:
            best = (key, ns)
    (nl, pi), ns = best
    return OrbitData(*nl, ns), pi


def is_canonical(od: OrbitData) -> bool:
    return canonicalize(od.lengths, od.sigma)[0] == od


def canonical_orbit_data(max_sum: int, families=("id", "12", "123"), min_sum: int = 3):
    """All canonical orbit data with min_sum <= n1+n2+n3 <= max_sum, in a fixed order."""
    out = []
    for name in families:
        sigma = SIGMA_BY_NAME[name]
        for total in range(min_sum, max_sum + 1):
            for n1 in range(1, total - 1):
                for n2 in range(1, total - n1):
                    n3 = total - n1 - n2
                    od = OrbitData(n1, n2, n3, sigma)
                    if is_canonical(od):
                        out.append(od)
    return out


# -- characteristic polynomials ------------------------------------------------------

def _tn(k: int) -> IntPoly:
    return IntPoly.monomial(k)


@lru_cache(maxsize=4096)
def charpoly_complex(od: OrbitData) -> IntPoly:
    """Characteristic polynomial of the H2 action from the family formula."""
    n1, n2, n3 = od.lengths
    N = od.total
    one = IntPoly([1])
    if od.sigma == CYCLE:
        return T - _tn(N) + (T - 1) * (_tn(n1) + one) * (_tn(n2) + one) * (_tn(n3) + one)
    if od.sigma == IDENTITY:
        return ((T - 1) * (_tn(N) - _tn(n1) - _tn(n2) - _tn(n3) + 2)
                - (_tn(n1) - one) * (_tn(n2) - one) * (_tn(n3) - one))
    if od.sigma == TRANSPOSITION:
        return ((T - 1) * (_tn(n3) * (_tn(n1) + one) * (_tn(n2) + one) - _tn(n1) - _tn(n2) - 2)
                - (_tn(n1 + n2) - one) * (_tn(n3) - one))
    raise OrbitDataError(f"charpoly formula needs canonical sigma, got {od.sigma_name}")


def h2_basis(od: OrbitData) -> list:
    return ["L"] + [f"E{i},{j}" for i in (1, 2, 3) for j in range(1, od.n(i) + 1)]


def h2_action_matrix(od: OrbitData) -> list:
    """Matrix (columns = images) of f_* on H2 in the basis L, E_{i,j}; any sigma."""
    idx = {}
    k = 1
    for i in (1, 2, 3):
        for j in range(1, od.n(i) + 1):
            idx[(i, j)] = k
            k += 1
    dim = k
    M = [[0] * dim for _ in range(dim)]
    M[0][0] = 2
    for i in (1, 2, 3):
        M[idx[(i, 1)]][0] -= 1
    for i in (1, 2, 3):
        for j in range(1, od.n(i)):
            M[idx[(i, j + 1)]][idx[(i, j)]] = 1
        col = idx[(i, od.n(i))]
        target = od.s(i)
        M[0][col] += 1
        for jj in (1, 2, 3):
            if jj != target:
                M[idx[(jj, 1)]][col] -= 1
    return M


def charpoly_h2_matrix(od: OrbitData) -> IntPoly:
    return charpoly(h2_action_matrix(od))


@dataclass(frozen=True)
class SpectralSummary:
    chi: IntPoly
    delta: Optional[RootBracket]
    entropy: float
    degree_check: int

    def to_dict(self, digits: int = 30) -> dict:
        return {
            "chi": [str(c) for c in self.chi.coeffs],
            "delta": self.delta.to_dict(digits) if self.delta else None,
            "entropy": self.entropy,
            "degree": self.degree_check,
        }


@lru_cache(maxsize=4096)
def dynamical_degree(od: OrbitData, digits: int = 40) -> Optional[RootBracket]:
    """Bracket of the unique root of chi in (1, oo), or None."""
    chi = charpoly_complex(od)
    if sturm_count(chi, 1, float("inf")) == 0:
        return None
    return largest_real_root(chi, digits)


def entropy(od: OrbitData) -> float:
    """Natural-log topological entropy of the complex automorphism."""
    d = dynamical_degree(od)
    return 0.0 if d is None else math.log(float(d.approx))


def spectral_summary(od: OrbitData) -> SpectralSummary:
    chi = charpoly_complex(od)
    return SpectralSummary(chi, dynamical_degree(od), entropy(od), chi.degree)
