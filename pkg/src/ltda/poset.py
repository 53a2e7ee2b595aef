"""Weighted posets of label sets, their quasimetrics, and grid paths.

Elements are frozensets of 0-based label indices. The power set of [k]
has single-label insertions as Hasse edges; a chain has nested prefixes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .metric_space import LabeledMetricSpace, diam_of, hausdorff

DEFAULT_PATH_BUDGET = 10**6
GEODESIC, ULTRAMETRIC = "geodesic", "ultrametric"


class PathBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class WeightedPoset:
    """Elements, covering edges (u, v, added label) and one weight per edge."""

    k: int
    elements: tuple[frozenset, ...]
    edges: tuple[tuple[int, int, int], ...]
    weights: tuple[float, ...]
    kind: str = "power"
    _tables: dict = field(default_factory=dict, compare=False, repr=False)

    def index(self, p) -> int:
        p = frozenset(p)
        try:
            return self.elements.index(p)
        except ValueError:
            raise KeyError(f"{sorted(p)} is not an element of this poset") from None

    def leq(self, p, q) -> bool:
        return frozenset(p) <= frozenset(q)

    def up_edges(self, u: int) -> list[tuple[int, int, float]]:
        """(target, added label, weight) for each edge out of u."""
        return [(v, lab, w) for (s, v, lab), w in zip(self.edges, self.weights) if s == u]

    def table(self, kind: str = GEODESIC) -> np.ndarray:
        """All-pairs extended quasimetric; +inf off the order relation."""
        if kind not in (GEODESIC, ULTRAMETRIC):
            raise ValueError(f"unknown distance kind {kind!r}")
        if kind not in self._tables:
            self._tables[kind] = _distance_table(self, kind)
        return self._tables[kind]

    def distance(self, p, q, kind: str = GEODESIC) -> float:
        return float(self.table(kind)[self.index(p), self.index(q)])

    def nonempty(self) -> list[int]:
        return [i for i, e in enumerate(self.elements) if e]


def _distance_table(P: WeightedPoset, kind: str) -> np.ndarray:
    n = len(P.elements)
    D = np.full((n, n), math.inf)
    # elements are listed in a topological order, so one forward sweep suffices
    out = [[] for _ in range(n)]
    for (u, v, _), w in zip(P.edges, P.weights):
        out[u].append((v, w))
    for s in range(n):
        D[s, s] = 0.0
        for u in range(s, n):
            if D[s, u] == math.inf:
                continue
            for v, w in out[u]:
                c = D[s, u] + w if kind == GEODESIC else max(D[s, u], w)
                if c < D[s, v]:
                    D[s, v] = c
    return D


def power_poset(k: int) -> WeightedPoset:
    """Power set of [k] under inclusion, unit weights on the Hasse edges."""
    if not 1 <= k <= 10:
        raise ValueError("k must be between 1 and 10")
    elems = sorted((frozenset(i for i in range(k) if m >> i & 1) for m in range(2**k)),
                   key=lambda s: (len(s), sorted(s)))
    where = {e: n for n, e in enumerate(elems)}
    edges = []
    for u, e in enumerate(elems):
        for i in range(k):
            if i not in e:
                edges.append((u, where[e | {i}], i))
    return WeightedPoset(k, tuple(elems), tuple(edges), tuple(1.0 for _ in edges), "power")


def chain_poset(k: int = 2) -> WeightedPoset:
    """Chain {0} < {0,1} < ... < {0..k-1} with unit weights."""
    if k < 1:
        raise ValueError("a chain needs at least one node")
    elems = tuple(frozenset(range(i + 1)) for i in range(k))
    edges = tuple((i, i + 1, i + 1) for i in range(k - 1))
    return WeightedPoset(k, elems, edges, tuple(1.0 for _ in edges), "chain")


def _reweight(P: WeightedPoset, weights) -> WeightedPoset:
    return WeightedPoset(P.k, P.elements, P.edges, tuple(float(w) for w in weights), P.kind)


def weight_constant(P: WeightedPoset, w: float) -> WeightedPoset:
    if w < 0:
        raise ValueError("weights must be nonnegative")
    return _reweight(P, [w] * len(P.edges))


def _check_k(P: WeightedPoset, lms: LabeledMetricSpace):
    if P.k != lms.k:
        raise ValueError(f"poset has k = {P.k} but the space has {lms.k} labels")


def weight_diameter(P: WeightedPoset, lms: LabeledMetricSpace) -> WeightedPoset:
    """Edge Q -> Q' weighted by the diameter of the union over Q'."""
    _check_k(P, lms)
    return _reweight(P, [diam_of(lms.dist, lms.union(P.elements[v])) for _, v, _ in P.edges])


def weight_hausdorff_fraction(P: WeightedPoset, lms: LabeledMetricSpace, alpha: float) -> WeightedPoset:
    """Edge Q -> Q' weighted by alpha times the Hausdorff distance of the unions.

    Edges out of the empty set use alpha times the diameter of the target.
    """
    _check_k(P, lms)
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    ws = []
    for u, v, _ in P.edges:
        A, B = lms.union(P.elements[u]), lms.union(P.elements[v])
        ws.append(alpha * (hausdorff(lms, A, B) if A else diam_of(lms.dist, B)))
    return _reweight(P, ws)


def poset_distance(P: WeightedPoset, p, q, kind: str = GEODESIC) -> float:
    return P.distance(p, q, kind)


def make_weighting(P: WeightedPoset, lms: LabeledMetricSpace, scheme: str, value: float | None = None) -> WeightedPoset:
    """Apply a weighting by name: constant, diameter or hausdorff."""
    if scheme == "constant":
        return weight_constant(P, 0.0 if value is None else value)
    if scheme == "diameter":
        return weight_diameter(P, lms)
    if scheme == "hausdorff":
        return weight_hausdorff_fraction(P, lms, 0.1 if value is None else value)
    raise ValueError(f"unknown weighting {scheme!r}")


@dataclass(frozen=True)
class Discretization:
    Z: np.ndarray
    poset: WeightedPoset

    def __post_init__(self):
        Z = np.asarray(self.Z, dtype=float)
        if Z.ndim != 1 or len(Z) == 0:
            raise ValueError("Z must be a nonempty 1-d grid")
        if np.any(np.diff(Z) <= 0):
            raise ValueError("Z must be strictly increasing")
        object.__setattr__(self, "Z", Z)


@dataclass(frozen=True)
class PosetPath:
    """A maximal chain in Z x P.

    nodes[i] is the poset element on segment i, crossings[i] = (alpha, added
    label, weight) is the move from nodes[i] to nodes[i+1] at r = alpha.
    """

    nodes: tuple[int, ...]
    crossings: tuple[tuple[float, int, float], ...]

    @property
    def alphas(self) -> tuple[float, ...]:
        return tuple(c[0] for c in self.crossings)

    def segments_at(self, p: int) -> list[int]:
        return [i for i, v in enumerate(self.nodes) if v == p]

    def contains(self, r: float, p: int) -> bool:
        al = self.alphas
        for i in self.segments_at(p):
            lo = -math.inf if i == 0 else al[i - 1]
            hi = math.inf if i == len(al) else al[i]
            if lo <= r <= hi:
                return True
        return False


def count_paths(k: int, nZ: int) -> int:
    """Maximal chains of Z x P_k: k! * C(|Z|+k-1, k)."""
    return math.factorial(k) * math.comb(nZ + k - 1, k)


def _chains(P: WeightedPoset, start: int, positions: Sequence[float]) -> Iterator[PosetPath]:
    """All maximal chains from start, moving up at nondecreasing positions."""
    m = len(positions)

    def rec(node, pos, nodes, cross):
        ups = P.up_edges(node)
        if not ups:
            yield PosetPath(tuple(nodes), tuple(cross))
            return
        for pi in range(pos, m):
            for v, lab, w in sorted(ups, key=lambda e: e[1]):
                nodes.append(v)
                cross.append((positions[pi], lab, w))
                yield from rec(v, pi, nodes, cross)
                nodes.pop()
                cross.pop()

    yield from rec(start, 0, [start], [])


def enumerate_paths(disc: Discretization, through: tuple[float, object] | None = None,
                    budget: int = DEFAULT_PATH_BUDGET, anchor: str = "empty") -> list[PosetPath]:
    """All maximal chains of the grid Z x P, optionally those through (r, p).

    anchor="empty" walks the whole poset, so for the power set every chain
    starts at the empty set and there are k! * C(|Z|+k-1, k) of them.
    anchor="singleton" leaves the empty set out and starts at the minimal
    nonempty elements (one chain for k = 1).
    """
    P = disc.poset
    if anchor == "empty":
        keep = set(range(len(P.elements)))
    elif anchor == "singleton":
        keep = set(P.nonempty())
    else:
        raise ValueError("anchor must be 'empty' or 'singleton'")
    minimal = [i for i in sorted(keep) if not any(v == i and u in keep for u, v, _ in P.edges)]
    if anchor == "empty" and P.kind == "power":
        total = count_paths(P.k, len(disc.Z))
        if total > budget:
            raise PathBudgetExceeded(f"{total} paths exceed budget {budget}")
    out = []
    for s in minimal:
        for path in _chains(P, s, list(disc.Z)):
            out.append(path)
            if len(out) > budget:
                raise PathBudgetExceeded(f"more than {budget} paths")
    if through is not None:
        r, p = through
        pi = P.index(p)
        out = [f for f in out if f.contains(r, pi)]
    return out


def landscape_paths(P: WeightedPoset, Z: Sequence[float], sentinel: float,
                    budget: int = DEFAULT_PATH_BUDGET) -> list[PosetPath]:
    """Chains used by the landscape pipeline.

    The empty set is left out. Each chain starts at a minimal nonempty
    element and may move up at the sentinel (a value below every grid
    point and below 0) or at any grid value.
    """
    positions = [sentinel] + list(Z)
    nonempty = set(P.nonempty())
    starts = [i for i in sorted(nonempty)
              if not any(v == i and u in nonempty for u, v, _ in P.edges)]
    out = []
    for s in starts:
        for path in _chains(P, s, positions):
            out.append(path)
            if len(out) > budget:
                raise PathBudgetExceeded(f"more than {budget} paths")
    return out
