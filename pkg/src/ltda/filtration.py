"""Vietoris-Rips filtrations and the gap-inserted complex of a poset path."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .metric_space import LabeledMetricSpace, diam_of
from .poset import PosetPath, WeightedPoset


@dataclass(frozen=True)
class GapAnnotation:
    """Crossings (alpha_i, added label, w_i) of a path, in order.

    cumulative[i] is w_1 + ... + w_i, with cumulative[0] = 0. The same
    running sums are used everywhere so filtration values, bar extension
    and landscape evaluation agree to the last bit.
    """

    triples: tuple[tuple[float, int, float], ...] = ()

    @property
    def cumulative(self) -> tuple[float, ...]:
        W = [0.0]
        for _, _, w in self.triples:
            W.append(W[-1] + w)
        return tuple(W)

    def arrivals(self) -> list[tuple[float, float]]:
        """(value where segment i begins, value where its gap begins) per crossing."""
        W = self.cumulative
        return [(a + W[i + 1], a + W[i]) for i, (a, _, _) in enumerate(self.triples)]


@dataclass(frozen=True)
class FilteredComplex:
    """Simplices sorted by (value, dimension, vertices).

    max_dim is the largest homology degree the complex can resolve, so it
    holds simplices up to dimension max_dim + 1. cap is the value at which
    essential classes are closed off by default.
    """

    simplices: tuple[tuple[int, ...], ...]
    values: np.ndarray
    max_dim: int
    cap: float
    gaps: GapAnnotation = GapAnnotation()
    # per-segment (union, diameter) of a path complex
    segments: tuple[tuple[tuple[int, ...], float], ...] = ()

    def __len__(self):
        return len(self.simplices)

    def check_monotone(self) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
        """Face/coface pairs violating monotonicity; empty when valid."""
        val = dict(zip(self.simplices, self.values))
        bad = []
        for s, v in val.items():
            if len(s) > 1:
                for f in itertools.combinations(s, len(s) - 1):
                    if f not in val or val[f] > v:
                        bad.append((f, s))
        return bad


def _sort_key(item):
    s, v = item
    return (v, len(s), s)


def rips_values(dist: np.ndarray, pts: Sequence[int], max_simplex_dim: int,
                r_max: float = math.inf) -> dict[tuple[int, ...], float]:
    """Every simplex on pts of dimension <= max_simplex_dim with diameter <= r_max."""
    pts = sorted(pts)
    out: dict[tuple[int, ...], float] = {}
    for p in pts:
        if r_max >= 0:
            out[(p,)] = 0.0
    # grow cliques one vertex at a time so pruned edges cut whole branches
    layer = [((p,), 0.0) for p in pts] if r_max >= 0 else []
    for _ in range(max_simplex_dim):
        nxt = []
        for s, v in layer:
            for q in pts:
                if q <= s[-1]:
                    continue
                f = max(v, max(float(dist[x, q]) for x in s))
                if f <= r_max:
                    t = s + (q,)
                    out[t] = f
                    nxt.append((t, f))
        layer = nxt
    return out


def _build(values: dict, max_dim: int, cap: float, gaps=GapAnnotation(), segments=()) -> FilteredComplex:
    items = sorted(values.items(), key=_sort_key)
    return FilteredComplex(
        tuple(s for s, _ in items),
        np.array([v for _, v in items], dtype=float),
        max_dim,
        cap,
        gaps,
        tuple(segments),
    )


def vietoris_rips(lms: LabeledMetricSpace, S: Iterable[int], max_dim: int = 0,
                  r_max: float | None = None) -> FilteredComplex:
    """VR filtration of the union of labels S (0-based), simplices up to dim max_dim+1."""
    S = list(S)
    if not S:
        raise ValueError("S must be nonempty")
    if max_dim < 0:
        raise ValueError("max_dim must be >= 0")
    pts = lms.union(S)
    d = diam_of(lms.dist, pts)
    if r_max is None:
        r_max = d
    if r_max < 0:
        raise ValueError("r_max must be >= 0")
    vals = rips_values(lms.dist, pts, max_dim + 1, r_max)
    return _build(vals, max_dim, d, segments=((pts, d),))


def path_complex(lms: LabeledMetricSpace, poset: WeightedPoset, path: PosetPath,
                 max_dim: int = 0, rips_cache: dict | None = None) -> FilteredComplex:
    """Single filtration along a poset path, with a gap of width w_i at each crossing.

    Each simplex carries (base, segment) and sits at base + W[segment]. At
    crossing i, simplices with base above alpha_i move to segment i, and
    simplices new to the union enter at max(diameter, alpha_i) in segment i.
    """
    unions = [lms.union(poset.elements[v]) for v in path.nodes]
    if rips_cache is None:
        rips_cache = {}

    def rips(u):
        if (u, max_dim) not in rips_cache:
            rips_cache[u, max_dim] = rips_values(lms.dist, u, max_dim + 1)
        return rips_cache[u, max_dim]

    gaps = GapAnnotation(tuple(path.crossings))
    W = gaps.cumulative
    entry: dict[tuple[int, ...], list] = {}
    for s, f in rips(unions[0]).items():
        entry[s] = [f, 0]
    for i, (alpha, _, _) in enumerate(path.crossings, start=1):
        for e in entry.values():
            if e[0] > alpha:
                e[1] = i
        for s, f in rips(unions[i]).items():
            if s not in entry:
                entry[s] = [max(f, alpha), i]
    values = {s: base + W[i] for s, (base, i) in entry.items()}
    segs = tuple((u, diam_of(lms.dist, u)) for u in unions)
    cap = segs[-1][1] + W[-1]
    return _build(values, max_dim, cap, gaps, segs)
