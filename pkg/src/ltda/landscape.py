"""Generalized landscapes over R x P on a finite grid.

For every chain f through the grid, the labeled Rips module restricted to
f is a one-parameter module. It is realized as one filtration by inserting
a gap of width w at each crossing, so arc length along the chain equals
r plus the weights crossed so far. The value at a grid point is the
minimum over chains through it of the chain's landscape, where each
chain landscape is the tent landscape of its barcode clipped by the
distance to the nearest zero source behind and zero target ahead.
"""
from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .filtration import path_complex
from .metric_space import LabeledMetricSpace, diam_of
from .persistence import Landscape1D, barcode, evaluate_1d, extend_bars, tents
from .poset import (DEFAULT_PATH_BUDGET, GEODESIC, ULTRAMETRIC, PosetPath, WeightedPoset,
                    chain_poset, landscape_paths, weight_constant)

DEFAULT_GRID = 64


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("LTDA_THREADS", "1")))
    except ValueError:
        return 1


@dataclass
class SampledLandscape:
    """Levels of a one-parameter landscape sampled on a grid r."""

    r: np.ndarray
    values: np.ndarray  # (n_levels, len(r))
    element: frozenset | None = None

    @property
    def n_levels(self) -> int:
        return self.values.shape[0]

    def __call__(self, n: int, r):
        if n > self.n_levels:
            return np.zeros_like(np.asarray(r, float))
        return np.interp(r, self.r, self.values[n - 1])


@dataclass
class GeneralizedLandscape:
    Z: np.ndarray
    poset: WeightedPoset
    elements: tuple[frozenset, ...]
    degree: int
    values: np.ndarray  # (n_max, len(Z), len(elements))
    provenance: np.ndarray  # index into paths of the minimizing chain
    paths: list[PosetPath] = field(repr=False)
    kind: str = GEODESIC
    mode: str = "sum"

    @property
    def n_max(self) -> int:
        return self.values.shape[0]

    def element_index(self, p) -> int:
        p = frozenset(p)
        try:
            return self.elements.index(p)
        except ValueError:
            raise KeyError(f"{sorted(p)} is not a nonempty poset element") from None

    def value(self, n: int, z_index: int, p) -> float:
        return float(self.values[n - 1, z_index, self.element_index(p)])


def _zero_regions(path: PosetPath, W, segs):
    """Arc-length intervals where the module is zero as a target and as a source."""
    al = path.alphas
    targets, sources = [], []
    m = len(segs)
    for i, (_, d) in enumerate(segs):
        lo = -math.inf if i == 0 else al[i - 1]
        hi = math.inf if i == m - 1 else al[i]
        # r < 0 is zero both ways
        if lo < 0:
            e = min(hi, 0.0)
            targets.append((lo + W[i], e + W[i]))
            sources.append((lo + W[i], e + W[i]))
        s = max(lo, d)
        if s <= hi:
            targets.append((s + W[i], hi + W[i]))
        if d == 0:
            sources.append((lo + W[i], hi + W[i]))
    return targets, sources


def _window(t: float, targets, sources) -> float:
    ahead = min((max(s, t) for s, e in targets if e >= t), default=math.inf)
    behind = max((min(e, t) for s, e in sources if s <= t), default=-math.inf)
    return min(ahead - t, t - behind)


def path_values(lms: LabeledMetricSpace, poset: WeightedPoset, path: PosetPath, j: int,
                Z: np.ndarray, n_max: int, rips_cache: dict | None = None):
    """Landscape of one chain at its grid points.

    Returns a list of (element index, grid indices, values (n_max, len)).
    """
    fc = path_complex(lms, poset, path, max_dim=j, rips_cache=rips_cache)
    bars = extend_bars(barcode(fc, j), fc.gaps).bars
    W = fc.gaps.cumulative
    targets, sources = _zero_regions(path, W, fc.segments)
    al = path.alphas
    out = []
    for i, node in enumerate(path.nodes):
        lo = -math.inf if i == 0 else al[i - 1]
        hi = math.inf if i == len(al) else al[i]
        idx = np.nonzero((Z >= lo) & (Z <= hi))[0]
        if len(idx) == 0:
            continue
        t = Z[idx] + W[i]
        vals = tents(bars, t, n_max)
        win = np.array([_window(float(x), targets, sources) for x in t])
        np.minimum(vals, np.maximum(win, 0.0)[None, :], out=vals)
        out.append((node, idx, vals))
    return out


def _chunk_worker(args):
    lms, poset, paths, j, Z, n_max = args
    cache: dict = {}
    return [path_values(lms, poset, f, j, Z, n_max, cache) for f in paths]


def _check_kind(poset: WeightedPoset, kind: str):
    if kind == GEODESIC:
        return
    if kind != ULTRAMETRIC:
        raise ValueError(f"unknown distance kind {kind!r}")
    # arc length matches the ultrametric only if no comparable nonempty
    # elements are two or more edges apart
    ne = [poset.elements[i] for i in poset.nonempty()]
    if any(p < q and len(q) - len(p) > 1 for p in ne for q in ne):
        raise ValueError("the ultrametric pipeline needs chains of at most one edge between nonempty elements")


def default_grid(lms: LabeledMetricSpace, poset: WeightedPoset, size: int = DEFAULT_GRID) -> np.ndarray:
    top = max(diam_of(lms.dist, lms.union(poset.elements[i])) for i in poset.nonempty())
    if top == 0:
        top = 1.0
    return np.linspace(0.0, top, size)


def default_levels(lms: LabeledMetricSpace, poset: WeightedPoset) -> int:
    return max(len(lms.union(poset.elements[i])) for i in poset.nonempty())


def generalized_landscape(lms: LabeledMetricSpace, poset: WeightedPoset, j: int = 0,
                          Z: Sequence[float] | None = None, n_max: int | None = None,
                          kind: str = GEODESIC, workers: int | None = None,
                          path_budget: int = DEFAULT_PATH_BUDGET) -> GeneralizedLandscape:
    """Landscape values on Z x (nonempty elements), minimum over chains through each point."""
    if poset.k != lms.k:
        raise ValueError(f"poset has k = {poset.k} but the space has {lms.k} labels")
    _check_kind(poset, kind)
    Z = default_grid(lms, poset) if Z is None else np.asarray(Z, dtype=float)
    if Z.ndim != 1 or len(Z) == 0:
        raise ValueError("Z must be a nonempty 1-d grid")
    if np.any(np.diff(Z) <= 0):
        raise ValueError("Z must be strictly increasing")
    if n_max is None:
        n_max = default_levels(lms, poset)
    sentinel = min(float(Z[0]), 0.0) - 1.0
    paths = landscape_paths(poset, Z, sentinel, path_budget)
    elements = tuple(poset.elements[i] for i in poset.nonempty())
    col = {poset.elements.index(e): c for c, e in enumerate(elements)}
    values = np.full((n_max, len(Z), len(elements)), math.inf)
    prov = np.full((n_max, len(Z), len(elements)), -1, dtype=np.int64)

    workers = default_workers() if workers is None else max(1, int(workers))
    if workers > 1 and len(paths) > 1:
        chunks = np.array_split(np.arange(len(paths)), workers)
        jobs = [(lms, poset, [paths[i] for i in ch], j, Z, n_max) for ch in chunks if len(ch)]
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = [r for part in ex.map(_chunk_worker, jobs) for r in part]
    else:
        results = _chunk_worker((lms, poset, paths, j, Z, n_max))

    # fold in path order; strict < keeps the first minimizing chain
    for pi, res in enumerate(results):
        for node, idx, vals in res:
            c = col[node]
            cur = values[:, idx, c]
            better = vals < cur
            cur[better] = vals[better]
            values[:, idx, c] = cur
            p = prov[:, idx, c]
            p[better] = pi
            prov[:, idx, c] = p
    return GeneralizedLandscape(Z, poset, elements, j, values, prov, paths, kind)


def interpolate(gl: GeneralizedLandscape, n: int, r: float, p) -> float:
    """Linear interpolation in r between the bracketing grid values at p."""
    if not gl.Z[0] <= r <= gl.Z[-1]:
        raise ValueError(f"r = {r} outside the grid [{gl.Z[0]}, {gl.Z[-1]}]")
    if n > gl.n_max:
        return 0.0
    return float(np.interp(r, gl.Z, gl.values[n - 1, :, gl.element_index(p)]))


def restrict_to(gl: GeneralizedLandscape, p) -> SampledLandscape:
    c = gl.element_index(p)
    return SampledLandscape(gl.Z.copy(), gl.values[:, :, c].copy(), frozenset(p))


def image_landscape(lms: LabeledMetricSpace, j: int = 0, n_max: int | None = None,
                    Z: Sequence[float] | None = None) -> SampledLandscape:
    """Landscape of the image of H_j(VR(X_1)) -> H_j(VR(X)) for labels (X_1, X)."""
    if lms.k != 2:
        raise ValueError("image_landscape needs labels (X_1, X)")
    if not set(lms.labels[0]) <= set(lms.labels[1]):
        raise ValueError("the first label must be a subset of the second")
    P = weight_constant(chain_poset(2), 0.0)
    gl = generalized_landscape(lms, P, j, Z, n_max)
    return restrict_to(gl, {0})


def _same_grid(a: GeneralizedLandscape, b: GeneralizedLandscape):
    if not np.array_equal(a.Z, b.Z) or a.elements != b.elements:
        raise ValueError("landscapes live on different grids or posets")


def _pad(v: np.ndarray, n: int) -> np.ndarray:
    if v.shape[0] >= n:
        return v
    pad = np.zeros((n - v.shape[0],) + v.shape[1:])
    return np.concatenate([v, pad])


def sup_distance(a: GeneralizedLandscape, b: GeneralizedLandscape) -> float:
    """Max over levels and grid points of the absolute difference."""
    _same_grid(a, b)
    n = max(a.n_max, b.n_max)
    return float(np.abs(_pad(a.values, n) - _pad(b.values, n)).max())


def _as_levels(x):
    """(callable(n, r), n_levels, r-range or None)."""
    if isinstance(x, SampledLandscape):
        return x, x.n_levels, (float(x.r[0]), float(x.r[-1]))
    if isinstance(x, Landscape1D):
        xs = [l[0] for l in x.levels if len(l[0])]
        span = (min(v[0] for v in xs), max(v[-1] for v in xs)) if xs else None
        return (lambda n, r: evaluate_1d(x, n, r)), x.n_levels, ("free", span)
    raise TypeError(f"cannot compare {type(x).__name__}")


def mse_distance(a, b, resample_count: int = 1000) -> float:
    """Sum over levels of the mean squared difference on a shared uniform r-grid.

    Sampled inputs fix the r-range (their intersection). Exact 1-d
    landscapes do not restrict it. Missing levels count as zero. Two
    generalized landscapes are compared element by element and summed.
    """
    if resample_count < 2:
        raise ValueError("resample_count must be at least 2")
    if isinstance(a, GeneralizedLandscape) or isinstance(b, GeneralizedLandscape):
        if not (isinstance(a, GeneralizedLandscape) and isinstance(b, GeneralizedLandscape)):
            raise TypeError("compare a generalized landscape only with another one")
        _same_grid(a, b)
        return sum(mse_distance(restrict_to(a, p), restrict_to(b, p), resample_count) for p in a.elements)
    fa, na, ra = _as_levels(a)
    fb, nb, rb = _as_levels(b)
    fixed = [r for r in (ra, rb) if r[0] != "free"]
    if fixed:
        lo = max(r[0] for r in fixed)
        hi = min(r[1] for r in fixed)
    else:
        spans = [r[1] for r in (ra, rb) if r[1] is not None]
        if not spans:
            return 0.0
        lo = min(s[0] for s in spans)
        hi = max(s[1] for s in spans)
    if hi < lo:
        raise ValueError("the inputs have no common r-range")
    r = np.linspace(lo, hi, resample_count)
    total = 0.0
    for n in range(1, max(na, nb) + 1):
        diff = np.asarray(fa(n, r), float) - np.asarray(fb(n, r), float)
        total += float(np.mean(diff**2))
    return total


def to_long_csv(gl: GeneralizedLandscape, header: dict | None = None) -> str:
    """Rows level,r,poset_element,value. Elements are written as 1-based labels joined by '+'."""
    lines = []
    if header is not None:
        lines.append("# " + json.dumps(header, sort_keys=True))
    lines.append("level,r,poset_element,value")
    names = [element_name(e) for e in gl.elements]
    for n in range(gl.n_max):
        for c, name in enumerate(names):
            for z, r in enumerate(gl.Z):
                lines.append(f"{n + 1},{float(r)!r},{name},{float(gl.values[n, z, c])!r}")
    return "\n".join(lines) + "\n"


def element_name(e: frozenset) -> str:
    return "+".join(str(i + 1) for i in sorted(e))


def to_json_doc(gl: GeneralizedLandscape, config: dict | None = None) -> dict:
    return {
        "format": "ltda-landscape/1",
        "degree": gl.degree,
        "levels": gl.n_max,
        "grid": [float(z) for z in gl.Z],
        "elements": [element_name(e) for e in gl.elements],
        "distance": {"mode": gl.mode, "kind": gl.kind},
        "edges": [
            {"from": element_name(gl.poset.elements[u]) or "{}", "to": element_name(gl.poset.elements[v]), "weight": w}
            for (u, v, _), w in zip(gl.poset.edges, gl.poset.weights)
        ],
        "paths": len(gl.paths),
        "config": config or {},
    }
