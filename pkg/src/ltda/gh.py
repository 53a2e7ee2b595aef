"""Exact labeled Gromov-Hausdorff distances on small spaces.

All variants reduce to one branch-and-bound search. A candidate solution is
a family of maps phi_b: A_b -> B_b and psi_b: B_b -> A_b, one pair per block
b. Its cost is the distortion of the relation formed by all graphs of phi_b
and all transposed graphs of psi_b, which is the max of every dis and codis
term between the maps. The distance is half the minimum cost.

Blocks are (X_i, Y_i) for registered labels and (X_i, Y_j) for (i, j) in a
label correspondence D.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .metric_space import LabeledMetricSpace, diam_of, permute_labels

DEFAULT_BUDGET = 10**8
MAX_PERM_K = 8
MAX_STAB_CELLS = 16


class GHBudgetExceeded(RuntimeError):
    """The exhaustive search is larger than the allowed budget.

    Callers can fall back to gh_lower_bound_diam.
    """

    def __init__(self, size: float, budget: float):
        super().__init__(
            f"enumeration size {size:.3g} exceeds budget {budget:.3g}; "
            "use the diameter lower bound instead"
        )
        self.size = size
        self.budget = budget


@dataclass(frozen=True)
class MapPair:
    """Maps per block as index tables.

    blocks[b] = (i, j) names the labels X_i and Y_j. phi[b][m] is the image
    of the m-th smallest point of X_i, psi[b][m] the image of the m-th
    smallest point of Y_j. All indices are 0-based point indices.
    """

    blocks: tuple[tuple[int, int], ...]
    phi: tuple[tuple[int, ...], ...]
    psi: tuple[tuple[int, ...], ...]

    def to_json(self, X: LabeledMetricSpace, Y: LabeledMetricSpace) -> list[dict]:
        out = []
        for (i, j), f, g in zip(self.blocks, self.phi, self.psi):
            out.append({
                "x_label": i + 1,
                "y_label": j + 1,
                "phi": {str(x + 1): y + 1 for x, y in zip(X.labels[i], f)},
                "psi": {str(y + 1): x + 1 for y, x in zip(Y.labels[j], g)},
            })
        return out


@dataclass(frozen=True)
class GHResult:
    value: float
    witness: MapPair | None
    sigma: tuple[int, ...] | None = None
    correspondence: tuple[tuple[int, int], ...] | None = None


def distortion_maps(f: dict, g: dict, dA: np.ndarray, dB: np.ndarray) -> float:
    """dis(f, g) = max |dA(a, a') - dB(f(a), g(a'))| over a in dom f, a' in dom g.

    Pass the matrices swapped for maps in the other direction.
    """
    if not f or not g:
        return 0.0
    a = np.fromiter(f.keys(), int)
    fa = np.fromiter(f.values(), int)
    a2 = np.fromiter(g.keys(), int)
    ga2 = np.fromiter(g.values(), int)
    return float(np.abs(dA[np.ix_(a, a2)] - dB[np.ix_(fa, ga2)]).max())


def codistortion(phi: dict, psi: dict, dX: np.ndarray, dY: np.ndarray) -> float:
    """codis(phi, psi) = max |dX(x, psi(y)) - dY(phi(x), y)|."""
    if not phi or not psi:
        return 0.0
    x = np.fromiter(phi.keys(), int)
    fx = np.fromiter(phi.values(), int)
    y = np.fromiter(psi.keys(), int)
    gy = np.fromiter(psi.values(), int)
    return float(np.abs(dX[np.ix_(x, gy)] - dY[np.ix_(fx, y)]).max())


def _slots(X: LabeledMetricSpace, Y: LabeledMetricSpace, blocks):
    """Candidate pair ids per slot, in witness-table order."""
    nY = Y.n_points
    slots = []
    for i, j in blocks:
        A, B = X.labels[i], Y.labels[j]
        for x in A:
            slots.append(np.array([x * nY + y for y in B]))
        for y in B:
            slots.append(np.array([x * nY + y for x in A]))
    return slots


def _size(slots) -> float:
    return math.prod(float(len(s)) for s in slots)


def _search(T: np.ndarray, slots, bound: float):
    """Lexicographically first assignment with cost strictly below bound.

    Returns (cost, choice indices) or None.
    """
    S = len(slots)
    best = [bound, None]
    chosen = []

    def rec(d, cur, costs):
        if d == S:
            best[0], best[1] = cur, list(chosen)
            return
        cands = slots[d]
        c0 = costs[0]
        for idx in range(len(cands)):
            v = cur if cur >= c0[idx] else c0[idx]
            if v >= best[0]:
                continue
            row = T[cands[idx]]
            nxt = []
            for s in range(1, len(costs)):
                nc = np.maximum(costs[s], row[slots[d + s]])
                if nc.min() >= best[0]:
                    break
                nxt.append(nc)
            else:
                chosen.append(idx)
                rec(d + 1, v, nxt)
                chosen.pop()

    if S == 0:
        return (0.0, []) if bound > 0 else None
    rec(0, 0.0, [np.zeros(len(s)) for s in slots])
    if best[1] is None:
        return None
    return best[0], best[1]


def _pair_costs(X: LabeledMetricSpace, Y: LabeledMetricSpace) -> np.ndarray:
    # T[(x,y),(x',y')] = |dX(x,x') - dY(y,y')|
    nX, nY = X.n_points, Y.n_points
    T = np.abs(X.dist[:, None, :, None] - Y.dist[None, :, None, :])
    return T.reshape(nX * nY, nX * nY)


def _solve_blocks(X, Y, blocks, budget, bound=math.inf, T=None):
    slots = _slots(X, Y, blocks)
    size = _size(slots)
    if size > budget:
        raise GHBudgetExceeded(size, budget)
    if T is None:
        T = _pair_costs(X, Y)
    found = _search(T, slots, bound)
    if found is None:
        return None
    cost, choice = found
    nY = Y.n_points
    picks = iter(int(slots[s][c]) for s, c in enumerate(choice))
    phi, psi = [], []
    for i, j in blocks:
        phi.append(tuple(next(picks) % nY for _ in X.labels[i]))
        psi.append(tuple(next(picks) // nY for _ in Y.labels[j]))
    return cost, MapPair(tuple(blocks), tuple(phi), tuple(psi))


def gh_k_exact(X: LabeledMetricSpace, Y: LabeledMetricSpace, budget: float = DEFAULT_BUDGET) -> GHResult:
    """Registered-label GH distance by exhaustive search over map pairs."""
    if X.k != Y.k:
        raise ValueError(f"label counts differ: {X.k} vs {Y.k}")
    cost, wit = _solve_blocks(X, Y, [(i, i) for i in range(X.k)], budget)
    return GHResult(0.5 * cost, wit)


def _coarsen(X: LabeledMetricSpace) -> LabeledMetricSpace:
    return LabeledMetricSpace(X.dist, (tuple(range(X.n_points)),), X.point_coords)


def gh_plain(X: LabeledMetricSpace, Y: LabeledMetricSpace, budget: float = DEFAULT_BUDGET) -> GHResult:
    """Classical GH distance of the underlying spaces."""
    return gh_k_exact(_coarsen(X), _coarsen(Y), budget)


def gh_perm_exact(X: LabeledMetricSpace, Y: LabeledMetricSpace, budget: float = DEFAULT_BUDGET) -> GHResult:
    """Minimum of gh_k over relabelings sigma of X; sigma in lexicographic order."""
    if X.k != Y.k:
        raise ValueError(f"label counts differ: {X.k} vs {Y.k}")
    if X.k > MAX_PERM_K:
        raise ValueError(f"k = {X.k} is too large for permutation search (max {MAX_PERM_K})")
    T = _pair_costs(X, Y)
    best = None
    bound = math.inf
    for sigma in itertools.permutations(range(X.k)):
        found = _solve_blocks(permute_labels(X, sigma), Y, [(i, i) for i in range(X.k)], budget, bound, T)
        if found is not None:
            bound = found[0]
            best = (found[0], found[1], sigma)
            if bound == 0:
                break
    cost, wit, sigma = best
    return GHResult(0.5 * cost, wit, sigma=tuple(sigma))


def minimal_correspondences(k: int, l: int) -> list[tuple[tuple[int, int], ...]]:
    """Inclusion-minimal D in [k] x [l] whose projections are both onto.

    A larger correspondence only adds map pairs, so these suffice for the
    minimum. Listed in increasing size, then lexicographically.
    """
    if k * l > MAX_STAB_CELLS:
        raise ValueError(f"k*l = {k * l} too large for correspondence enumeration")
    cells = [(i, j) for i in range(k) for j in range(l)]
    out = []
    for size in range(max(k, l), k + l):
        for D in itertools.combinations(cells, size):
            if {i for i, _ in D} != set(range(k)) or {j for _, j in D} != set(range(l)):
                continue
            # minimal iff every cell has an endpoint used only once
            ci = [0] * k
            cj = [0] * l
            for i, j in D:
                ci[i] += 1
                cj[j] += 1
            if all(ci[i] == 1 or cj[j] == 1 for i, j in D):
                out.append(D)
    return out


def gh_stab_exact(X: LabeledMetricSpace, Y: LabeledMetricSpace, budget: float = DEFAULT_BUDGET) -> GHResult:
    """GH distance modulo stabilization, via label correspondences."""
    Ds = minimal_correspondences(X.k, Y.k)
    if len(Ds) > budget:
        raise GHBudgetExceeded(len(Ds), budget)
    T = _pair_costs(X, Y)
    # budget first, so a too-large instance fails before any search
    for D in Ds:
        size = _size(_slots(X, Y, D))
        if size > budget:
            raise GHBudgetExceeded(size, budget)
    best = None
    bound = math.inf
    for D in Ds:
        found = _solve_blocks(X, Y, D, budget, bound, T)
        if found is not None:
            bound = found[0]
            best = (found[0], found[1], D)
            if bound == 0:
                break
    cost, wit, D = best
    return GHResult(0.5 * cost, wit, correspondence=tuple(D))


def gh_lower_bound_diam(X: LabeledMetricSpace, Y: LabeledMetricSpace) -> float:
    """Half the largest gap between Q-diameters over nonempty Q."""
    if X.k != Y.k:
        raise ValueError(f"label counts differ: {X.k} vs {Y.k}")
    if X.k > 20:
        raise ValueError("k > 20 makes the subset scan too large")
    best = 0.0
    for mask in range(1, 2**X.k):
        Q = [i for i in range(X.k) if mask >> i & 1]
        gap = abs(diam_of(X.dist, X.union(Q)) - diam_of(Y.dist, Y.union(Q)))
        best = max(best, gap)
    return 0.5 * best


def witness_cost(X: LabeledMetricSpace, Y: LabeledMetricSpace, wit: MapPair) -> float:
    """Max over all dis and codis terms of a witness, computed term by term."""
    phis = [dict(zip(X.labels[i], f)) for (i, _), f in zip(wit.blocks, wit.phi)]
    psis = [dict(zip(Y.labels[j], g)) for (_, j), g in zip(wit.blocks, wit.psi)]
    terms = [0.0]
    for a in range(len(wit.blocks)):
        for b in range(len(wit.blocks)):
            terms.append(distortion_maps(phis[a], phis[b], X.dist, Y.dist))
            terms.append(distortion_maps(psis[a], psis[b], Y.dist, X.dist))
            terms.append(codistortion(phis[a], psis[b], X.dist, Y.dist))
    return max(terms)


def enumeration_size(X: LabeledMetricSpace, Y: LabeledMetricSpace, blocks: Sequence[tuple[int, int]] | None = None) -> float:
    if blocks is None:
        blocks = [(i, i) for i in range(X.k)]
    return _size(_slots(X, Y, blocks))
