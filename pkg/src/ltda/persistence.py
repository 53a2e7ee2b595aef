"""Barcodes over Z/2, bar extension, exact 1-d landscapes, explicit modules."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .filtration import FilteredComplex, GapAnnotation


@dataclass(frozen=True)
class Barcode:
    degree: int
    bars: tuple[tuple[float, float], ...]

    def __len__(self):
        return len(self.bars)

    def to_csv(self) -> str:
        return barcodes_to_csv([self])


def barcodes_to_csv(bcs: Iterable[Barcode]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["degree", "birth", "death"])
    for bc in bcs:
        for b, d in bc.bars:
            w.writerow([bc.degree, repr(float(b)), repr(float(d))])
    return buf.getvalue()


def _reduce(fc: FilteredComplex, top: int, bottom: int):
    """Column reduction with clearing on dimensions top..bottom.

    Returns the persistence pairs (birth index, death index) and the set of
    columns that reduced to zero.
    """
    index = {s: n for n, s in enumerate(fc.simplices)}
    by_dim: dict[int, list[int]] = {}
    for n, s in enumerate(fc.simplices):
        by_dim.setdefault(len(s) - 1, []).append(n)
    pivot: dict[int, int] = {}
    reduced: dict[int, int] = {}
    cleared: set[int] = set()
    zero: set[int] = set()
    pairs = []
    for dim in range(top, bottom - 1, -1):
        for col in by_dim.get(dim, []):
            if col in cleared:
                continue
            s = fc.simplices[col]
            c = 0
            if dim > 0:
                for drop in range(len(s)):
                    c ^= 1 << index[s[:drop] + s[drop + 1:]]
            while c:
                low = c.bit_length() - 1
                other = pivot.get(low)
                if other is None:
                    break
                c ^= reduced[other]
            if c:
                low = c.bit_length() - 1
                pivot[low] = col
                reduced[col] = c
                pairs.append((low, col))
                cleared.add(low)
            else:
                zero.add(col)
    return pairs, zero, by_dim


def barcode(fc: FilteredComplex, j: int, cap: float | None = None) -> Barcode:
    """Degree-j barcode. Essential classes die at cap (default fc.cap).

    Zero-length bars are dropped. Pass cap=math.inf to keep essential
    classes open.
    """
    if j < 0 or j > fc.max_dim:
        raise ValueError(f"degree {j} needs simplices of dimension {j + 1}; complex resolves up to degree {fc.max_dim}")
    if cap is None:
        cap = fc.cap
    pairs, zero, by_dim = _reduce(fc, j + 1, max(j, 1))
    v = fc.values
    bars = []
    paired = set()
    for lo, hi in pairs:
        if len(fc.simplices[lo]) - 1 == j:
            paired.add(lo)
            if v[lo] < v[hi]:
                bars.append((float(v[lo]), float(v[hi])))
    for n in by_dim.get(j, []):
        if n in paired:
            continue
        if j == 0 or n in zero:
            if v[n] < cap:
                bars.append((float(v[n]), float(cap)))
    bars.sort()
    return Barcode(j, tuple(bars))


def extend_bars(bc: Barcode, gaps: GapAnnotation) -> Barcode:
    """Bars born exactly where the path enters a new union start at the gap instead."""
    moves = {}
    for arrive, depart in gaps.arrivals():
        moves.setdefault(arrive, depart)
    bars = tuple(sorted((moves.get(b, b), d) for b, d in bc.bars))
    return Barcode(bc.degree, bars)


def tents(bars: Sequence[tuple[float, float]], t: np.ndarray, n_max: int) -> np.ndarray:
    """L[n-1, m] = n-th largest of min(t_m - b, d - t_m)^+ over bars."""
    t = np.asarray(t, dtype=float)
    out = np.zeros((n_max, len(t)))
    if not bars or n_max == 0:
        return out
    B = np.asarray(bars, dtype=float)
    h = np.minimum(t[None, :] - B[:, :1], B[:, 1:] - t[None, :])
    np.maximum(h, 0.0, out=h)
    h = -np.sort(-h, axis=0)
    m = min(n_max, h.shape[0])
    out[:m] = h[:m]
    return out


@dataclass(frozen=True)
class Landscape1D:
    """Piecewise-linear levels stored as vertex lists (xs, ys); zero elsewhere."""

    levels: tuple[tuple[np.ndarray, np.ndarray], ...]

    @property
    def n_levels(self) -> int:
        return len(self.levels)

    def __call__(self, n: int, r):
        return evaluate_1d(self, n, r)


def landscape_1d(bc: Barcode | Sequence[tuple[float, float]], n_max: int | None = None) -> Landscape1D:
    """Exact landscape of a finite barcode.

    Between consecutive breakpoints (ends, midpoints, and crossings of a
    rising edge with a falling edge) every level is linear, so evaluating
    there gives the exact vertex list.
    """
    bars = list(bc.bars if isinstance(bc, Barcode) else bc)
    if n_max is None:
        n_max = len(bars)
    if not bars:
        return Landscape1D(tuple((np.array([0.0]), np.array([0.0])) for _ in range(n_max)))
    B = np.asarray(bars, dtype=float)
    if not np.all(np.isfinite(B)):
        raise ValueError("landscape_1d needs finite bars")
    b, d = B[:, 0], B[:, 1]
    xs = np.unique(np.concatenate([b, d, ((b[:, None] + d[None, :]) / 2).ravel()]))
    ys = tents(bars, xs, n_max)
    levels = []
    for n in range(n_max):
        y = ys[n]
        keep = np.ones(len(xs), bool)
        # drop interior points on straight runs
        if len(xs) > 2:
            s1 = (y[1:-1] - y[:-2]) / (xs[1:-1] - xs[:-2])
            s2 = (y[2:] - y[1:-1]) / (xs[2:] - xs[1:-1])
            keep[1:-1] = ~np.isclose(s1, s2, rtol=0, atol=1e-12)
        levels.append((xs[keep], y[keep]))
    return Landscape1D(tuple(levels))


def evaluate_1d(ls: Landscape1D, n: int, r):
    if n < 1:
        raise ValueError("levels start at 1")
    if n > ls.n_levels:
        return np.zeros_like(np.asarray(r, float)) if np.ndim(r) else 0.0
    xs, ys = ls.levels[n - 1]
    out = np.interp(r, xs, ys, left=0.0, right=0.0)
    return float(out) if np.ndim(out) == 0 else out


def _gf2_rank(M: np.ndarray) -> int:
    rows = [int("".join("1" if v else "0" for v in row), 2) if len(row) else 0 for row in (np.asarray(M) % 2)]
    basis: dict[int, int] = {}
    rank = 0
    for r in rows:
        while r:
            top = r.bit_length() - 1
            if top in basis:
                r ^= basis[top]
            else:
                basis[top] = r
                rank += 1
                break
    return rank


@dataclass
class ExplicitModule:
    """A finite presentation of an (R x P)-module over Z/2.

    breaks c_0 < ... < c_m split R into cells [c_i, c_{i+1}) plus [c_m, inf);
    the module is zero below c_0. dims[i][p] is the dimension on cell i at
    element p. horizontal[i][p] is the matrix from cell i to cell i+1 at p.
    vertical[i][(p, q)] is the matrix of a covering relation p < q on cell i.
    """

    breaks: Sequence[float]
    elements: Sequence[frozenset]
    dims: Sequence[dict]
    horizontal: Sequence[dict] = field(default_factory=list)
    vertical: Sequence[dict] = field(default_factory=list)

    def __post_init__(self):
        self.breaks = [float(c) for c in self.breaks]
        self.elements = [frozenset(e) for e in self.elements]
        self.dims = [{frozenset(p): int(v) for p, v in row.items()} for row in self.dims]
        self.horizontal = [{frozenset(p): np.asarray(M, int) % 2 for p, M in row.items()} for row in self.horizontal]
        self.vertical = [{(frozenset(p), frozenset(q)): np.asarray(M, int) % 2 for (p, q), M in row.items()}
                         for row in self.vertical]
        self._cover = {p: [q for q in self.elements if p < q and not any(p < m < q for m in self.elements)]
                       for p in self.elements}

    def dim(self, cell: int, p) -> int:
        if cell < 0:
            return 0
        return self.dims[cell].get(frozenset(p), 0)

    def _h(self, cell, p):
        M = self.horizontal[cell].get(p) if cell < len(self.horizontal) else None
        if M is None:
            M = np.zeros((self.dim(cell + 1, p), self.dim(cell, p)), int)
        return M.reshape(self.dim(cell + 1, p), self.dim(cell, p))

    def _v(self, cell, p, q):
        M = self.vertical[cell].get((p, q)) if cell < len(self.vertical) else None
        if M is None:
            M = np.zeros((self.dim(cell, q), self.dim(cell, p)), int)
        return M.reshape(self.dim(cell, q), self.dim(cell, p))

    def _chain_up(self, p, q):
        """Covering steps from p to q (any maximal chain; all agree if squares commute)."""
        path = [p]
        cur = p
        while cur != q:
            cur = next(m for m in self._cover[cur] if m <= q)
            path.append(cur)
        return path

    def induced(self, ca: int, p, cb: int, q) -> np.ndarray:
        """Matrix of the map from (cell ca, p) to (cell cb, q); horizontal first."""
        p, q = frozenset(p), frozenset(q)
        if ca < 0:
            return np.zeros((self.dim(cb, q), 0), int)
        M = np.eye(self.dim(ca, p), dtype=int)
        for c in range(ca, cb):
            M = self._h(c, p) @ M % 2
        chain = self._chain_up(p, q)
        for u, v in zip(chain, chain[1:]):
            M = self._v(cb, u, v) @ M % 2
        return M

    def rank(self, ca: int, p, cb: int, q) -> int:
        if ca < 0 or self.dim(ca, p) == 0 or self.dim(cb, q) == 0:
            return 0
        return _gf2_rank(self.induced(ca, p, cb, q))

    def check_commutes(self) -> list[str]:
        """Every non-commuting square: horizontal then vertical vs vertical then horizontal."""
        bad = []
        for c in range(len(self.breaks) - 1):
            for p in self.elements:
                for q in self._cover[p]:
                    a = self._v(c + 1, p, q) @ self._h(c, p) % 2
                    b = self._h(c, q) @ self._v(c, p, q) % 2
                    if a.shape != b.shape or np.any(a != b):
                        bad.append(f"cell {c}: {sorted(p)} -> {sorted(q)}")
        for c in range(len(self.breaks)):
            for p in self.elements:
                for q in self._cover[p]:
                    for q2 in self._cover[q]:
                        for m in self._cover[p]:
                            if m != q and q2 in self._cover[m]:
                                a = self._v(c, q, q2) @ self._v(c, p, q) % 2
                                b = self._v(c, m, q2) @ self._v(c, p, m) % 2
                                if np.any(a != b):
                                    bad.append(f"cell {c}: square {sorted(p)} -> {sorted(q2)}")
        return bad


class InconsistentModule(ValueError):
    pass


def oracle_generalized_landscape(m: ExplicitModule, poset, grid: Sequence[float], n_max: int,
                                 mode: str = "sum", kind: str = "geodesic") -> dict:
    """Landscape of an explicit module straight from the sup-over-epsilon definition.

    Returns {element: array of shape (n_max, len(grid))}.
    """
    from .oracles import epsilon_scan

    bad = m.check_commutes()
    if bad:
        raise InconsistentModule("; ".join(bad))
    return epsilon_scan(m.breaks, m.elements, poset, grid, n_max, m.rank, mode, kind)
