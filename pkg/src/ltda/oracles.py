"""Brute-force oracles and closed-form golden cases.

Nothing here touches the path, gap or reduction code of the pipeline. The
homology below is computed from explicit cycle and boundary bases with its
own elimination routine; only Vietoris-Rips simplex listing is shared.

Landscape conventions (same as the pipeline, see README):
  * the module at (r, S) is zero for r < 0;
  * a union of diameter 0 contributes nothing as the source of a map;
  * a map whose target (r', S') has r' >= diam(S') has rank 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .filtration import rips_values
from .metric_space import LabeledMetricSpace, diam_of, from_point_cloud
from .poset import WeightedPoset, power_poset, weight_constant

MAX_SIMPLICES = 10**4


class OracleLimit(RuntimeError):
    pass


# --- Z/2 linear algebra on int bitsets, pivoting on the lowest set bit ---

def _insert(basis: dict[int, int], v: int) -> bool:
    while v:
        low = v & -v
        if low in basis:
            v ^= basis[low]
        else:
            basis[low] = v
            return True
    return False


def _rank(vectors) -> int:
    basis: dict[int, int] = {}
    return sum(_insert(basis, v) for v in vectors)


class _Chains:
    """Bitset chain groups of all simplices on a point set."""

    def __init__(self, dist, pts, j):
        vals = rips_values(dist, pts, j + 1)
        if len(vals) > MAX_SIMPLICES:
            raise OracleLimit(f"{len(vals)} simplices exceed the oracle cap of {MAX_SIMPLICES}")
        self.vals = vals
        self.j = j
        # plain lexicographic numbering per dimension
        self.num = {}
        for dim in range(j + 2):
            for n, s in enumerate(sorted(s for s in vals if len(s) == dim + 1)):
                self.num[s] = n

    def boundary(self, s) -> int:
        v = 0
        for i in range(len(s)):
            v ^= 1 << self.num[s[:i] + s[i + 1:]]
        return v

    def cycles(self, pts, r) -> list[int]:
        """A basis of Z_j of VR_r(pts)."""
        ps = set(pts)
        simp = sorted(s for s, f in self.vals.items() if len(s) == self.j + 1 and f <= r and ps.issuperset(s))
        if self.j == 0:
            return [1 << self.num[s] for s in simp]
        # eliminate boundaries while tracking which simplices were combined
        basis: dict[int, tuple[int, int]] = {}
        out = []
        for s in simp:
            v, c = self.boundary(s), 1 << self.num[s]
            while v:
                low = v & -v
                if low not in basis:
                    basis[low] = (v, c)
                    break
                bv, bc = basis[low]
                v ^= bv
                c ^= bc
            if not v:
                out.append(c)
        return out

    def boundaries(self, pts, r) -> list[int]:
        """Spanning set of B_j of VR_r(pts)."""
        ps = set(pts)
        return [self.boundary(s) for s, f in self.vals.items()
                if len(s) == self.j + 2 and f <= r and ps.issuperset(s)]


def _map_rank(ch: _Chains, A, ra, B, rb) -> int:
    Z = ch.cycles(A, ra)
    if not Z:
        return 0
    Bd = ch.boundaries(B, rb)
    return _rank(Z + Bd) - _rank(Bd)


def brute_rank(lms: LabeledMetricSpace, union_a, r_a: float, union_b, r_b: float, j: int) -> int:
    """Rank of H_j(VR_{r_a}(A)) -> H_j(VR_{r_b}(B)) over Z/2, by explicit bases.

    union_a and union_b are point index sets with A inside B and r_a <= r_b.
    """
    A, B = sorted(set(union_a)), sorted(set(union_b))
    if not set(A) <= set(B):
        raise ValueError("union_a must be contained in union_b")
    if r_a > r_b:
        raise ValueError("need r_a <= r_b")
    if r_a < 0 or not A:
        return 0
    return _map_rank(_Chains(lms.dist, B, j), A, r_a, B, r_b)


def epsilon_scan(breaks: Sequence[float], elements: Sequence[frozenset], poset: WeightedPoset,
                 grid: Sequence[float], n_max: int, rank: Callable, mode: str = "sum",
                 kind: str = "geodesic") -> dict:
    """Landscape values from ranks on cells, straight from the definition.

    Cells are (-inf, c_0) with index -1, then [c_i, c_{i+1}). The rank
    callback takes (cell_a, p_a, cell_b, p_b). The value at x is the least
    epsilon at which some map a -> b through x with rank < n fits in the
    epsilon-ball, i.e. an infimum over bad pairs of the larger of the two
    distances to x.
    """
    if mode not in ("sum", "max"):
        raise ValueError("mode must be 'sum' or 'max'")
    c = np.asarray(breaks, dtype=float)
    C = len(c)
    lo = np.concatenate([[-math.inf], c])
    hi = np.concatenate([c, [math.inf]])
    elements = [frozenset(e) for e in elements]
    dP = {(p, q): poset.distance(p, q, kind) for p in elements for q in elements}
    rank_tab = {}
    for pa in elements:
        for pb in elements:
            if dP[pa, pb] == math.inf:
                continue
            R = np.full((C + 1, C + 1), np.iinfo(np.int64).max, dtype=np.int64)
            for ca in range(-1, C):
                for cb in range(ca, C):
                    R[ca + 1, cb + 1] = rank(ca, pa, cb, pb)
            rank_tab[pa, pb] = R
    out = {p: np.zeros((n_max, len(grid))) for p in elements}
    for p in elements:
        for g, r in enumerate(grid):
            best = np.full(n_max, math.inf)
            ea = r - np.minimum(hi, r)
            eb = np.maximum(lo, r) - r
            a_ok = lo <= r
            b_ok = hi > r
            for pa in elements:
                da = dP[pa, p]
                if da == math.inf:
                    continue
                for pb in elements:
                    db = dP[p, pb]
                    if db == math.inf:
                        continue
                    if mode == "sum":
                        cand = np.maximum((ea + da)[:, None], (eb + db)[None, :])
                    else:
                        cand = np.maximum(np.maximum(ea, da)[:, None], np.maximum(eb, db)[None, :])
                    ok = a_ok[:, None] & b_ok[None, :]
                    R = rank_tab[pa, pb]
                    for n in range(1, n_max + 1):
                        m = ok & (R < n)
                        if m.any():
                            best[n - 1] = min(best[n - 1], cand[m].min())
            out[p][:, g] = best
    return out


def brute_generalized_landscape(lms: LabeledMetricSpace, poset: WeightedPoset, j: int,
                                grid: Sequence[float], n_max: int, mode: str = "sum",
                                kind: str = "geodesic", max_points: int = 8) -> dict:
    """Landscape of labeled persistent homology by rank scanning.

    Returns {element: array (n_max, len(grid))} over the nonempty elements.
    """
    if lms.n_points > max_points:
        raise OracleLimit(f"{lms.n_points} points exceed the oracle limit of {max_points}")
    elements = [poset.elements[i] for i in poset.nonempty()]
    unions = {p: lms.union(p) for p in elements}
    diam = {p: diam_of(lms.dist, unions[p]) for p in elements}
    everything = tuple(range(lms.n_points))
    ch = _Chains(lms.dist, everything, j)
    crit = {0.0} | {float(v) for v in ch.vals.values()} | set(diam.values())
    breaks = sorted(v for v in crit if v >= 0)
    memo = {}

    def rank(ca, pa, cb, pb):
        if ca < 0 or cb < 0 or diam[pa] == 0:
            return 0
        rb = breaks[cb]
        if rb >= diam[pb]:
            return 0
        key = (ca, pa, cb, pb)
        if key not in memo:
            memo[key] = _map_rank(ch, unions[pa], breaks[ca], unions[pb], rb)
        return memo[key]

    return epsilon_scan(breaks, elements, poset, grid, n_max, rank, mode, kind)


# --- golden closed forms ---

@dataclass(frozen=True)
class GoldenCase:
    name: str
    lms: LabeledMetricSpace
    poset: WeightedPoset
    degree: int
    n_max: int
    formula: Callable[[frozenset, int, float], float]
    source: str


def _pos(x):
    return max(x, 0.0)


def single_points_case(d1: float = 0.25, d2: float = 0.25) -> GoldenCase:
    lms = from_point_cloud([[0, 0], [0, 1]], [[0], [1]])
    P = _two_weights(d1, d2)

    def f(p, n, r):
        if p != frozenset({0, 1}) or n > 2 or not 0 <= r < 1:
            return 0.0
        return min(d1, d2, 1 - r, r)

    return GoldenCase("two one-point classes, H0", lms, P, 0, 2, f, "worked example 1")


def square_loop_case(d1: float = 1.0, d2: float = 1.0) -> GoldenCase:
    lms = from_point_cloud([[0, 0], [1, 0], [0, 1], [1, 1]], [[0, 1], [2, 3]])
    P = _two_weights(d1, d2)
    s2 = math.sqrt(2)

    def f(p, n, r):
        if p != frozenset({0, 1}) or n > 1 or not 1 <= r < s2:
            return 0.0
        return min(d1, d2, s2 - r, r - 1)

    return GoldenCase("two two-point classes, H1", lms, P, 1, 1, f, "worked example 2")


def three_point_classes_case(d1: float = 0.1, d2: float = 0.1) -> GoldenCase:
    xs = [0.0, 0.4, 1.0]
    lms = from_point_cloud([[x, 0] for x in xs] + [[x, 1] for x in xs], [[0, 1, 2], [3, 4, 5]])
    P = _two_weights(d1, d2)
    s2 = math.sqrt(2)

    def single(n, r):
        if not 0 <= r < 1:
            return 0.0
        if n == 1:
            return min(r, 1 - r)
        if n == 2:
            return _pos(min(r, 0.6 - r))
        if n == 3:
            return _pos(min(r, 0.4 - r))
        return 0.0

    def union(n, r):
        if r < 0:
            return 0.0
        if n == 1:
            return _pos(min(s2 - r, r))
        if n == 2:
            if r < 0.6:
                return min(1 - r, r, max(d1, 0.6 - r), max(d2, 0.6 - r))
            return _pos(min(1 - r, d1, d2)) if r < 1 else 0.0
        if n == 3:
            if r < 0.4:
                return min(0.6 - r, r, max(d1, 0.4 - r), max(d2, 0.4 - r))
            return min(0.6 - r, d1, d2) if r < 0.6 else 0.0
        if n == 4:
            return min(d1, d2, 0.6 - r, r) if r < 0.6 else 0.0
        if n in (5, 6):
            return min(d1, d2, 0.4 - r, r) if r < 0.4 else 0.0
        return 0.0

    def f(p, n, r):
        return union(n, r) if p == frozenset({0, 1}) else single(n, r)

    return GoldenCase("two three-point classes, H0", lms, P, 0, 6, f, "worked example 3")


def _two_weights(d1: float, d2: float) -> WeightedPoset:
    """k=2 power set with w({1}->{1,2}) = d1 and w({2}->{1,2}) = d2."""
    P = weight_constant(power_poset(2), 0.0)
    full = frozenset({0, 1})
    ws = []
    for u, v, _ in P.edges:
        src = P.elements[u]
        if P.elements[v] == full:
            ws.append(d1 if src == frozenset({0}) else d2)
        else:
            ws.append(0.0)
    return WeightedPoset(P.k, P.elements, P.edges, tuple(ws), P.kind)


def golden_cases() -> list[GoldenCase]:
    return [single_points_case(), square_loop_case(), three_point_classes_case()]


def random_instance(seed: int, n_points: int | None = None, max_points: int = 6) -> LabeledMetricSpace:
    """Seeded uniform points in the unit square; even indices get label 1, odd label 2.

    With n_points unset, the size is drawn from 2..max_points by the same
    generator, so a failing seed replays exactly.
    """
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, max_points + 1)) if n_points is None else n_points
    pts = rng.random((n, 2))
    return from_point_cloud(pts, [range(0, n, 2), range(1, n, 2)])
