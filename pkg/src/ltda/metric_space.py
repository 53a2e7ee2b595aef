"""Finite labeled metric spaces.

A labeled metric space is a distance matrix plus an ordered list of k
nonempty label sets covering all points. Label sets may overlap and may
repeat. Indices are 0-based here; JSON files use 1-based point indices.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

TRIANGLE_SLACK = 1e-9


class LabelError(ValueError):
    """A label cover is malformed."""


class FormatError(ValueError):
    """An input document has the wrong shape."""


@dataclass(frozen=True)
class LabeledMetricSpace:
    dist: np.ndarray
    labels: tuple[tuple[int, ...], ...]
    point_coords: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        d = np.array(self.dist, dtype=float)
        d.setflags(write=False)
        object.__setattr__(self, "dist", d)
        object.__setattr__(self, "labels", tuple(tuple(sorted(set(int(i) for i in lab))) for lab in self.labels))
        if self.point_coords is not None:
            c = np.array(self.point_coords, dtype=float)
            c.setflags(write=False)
            object.__setattr__(self, "point_coords", c)

    @property
    def n_points(self) -> int:
        return self.dist.shape[0]

    @property
    def k(self) -> int:
        return len(self.labels)

    def union(self, Q: Iterable[int]) -> tuple[int, ...]:
        """Sorted point indices of the union of the labels in Q."""
        pts: set[int] = set()
        for i in Q:
            pts.update(self.labels[i])
        return tuple(sorted(pts))

    def __eq__(self, other):
        if not isinstance(other, LabeledMetricSpace):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.dist, other.dist)

    def __hash__(self):
        return hash((self.labels, self.dist.tobytes()))

    def to_json(self) -> dict:
        doc: dict = {}
        if self.point_coords is not None:
            doc["points"] = self.point_coords.tolist()
        else:
            doc["dist"] = self.dist.tolist()
        doc["labels"] = [[i + 1 for i in lab] for lab in self.labels]
        return doc


def _check_cover(n: int, labels: Sequence[Iterable[int]]) -> list[str]:
    problems = []
    if len(labels) == 0:
        problems.append("no labels given")
    covered: set[int] = set()
    for i, lab in enumerate(labels):
        lab = list(lab)
        if not lab:
            problems.append(f"label {i + 1} is empty")
        for p in lab:
            if not (0 <= p < n):
                problems.append(f"label {i + 1} refers to point {p + 1}, out of range 1..{n}")
            else:
                covered.add(p)
    for p in range(n):
        if p not in covered:
            problems.append(f"point {p + 1} is not covered by any label")
    return problems


def from_point_cloud(coords, labels: Sequence[Iterable[int]]) -> LabeledMetricSpace:
    """Euclidean labeled metric space from coordinates (0-based label indices)."""
    X = np.atleast_2d(np.asarray(coords, dtype=float))
    if X.shape[0] == 0:
        raise LabelError("empty point cloud")
    labels = [list(lab) for lab in labels]
    problems = _check_cover(X.shape[0], labels)
    if problems:
        raise LabelError("; ".join(problems))
    diff = X[:, None, :] - X[None, :, :]
    dist = np.sqrt((diff**2).sum(-1))
    return LabeledMetricSpace(dist, tuple(tuple(lab) for lab in labels), X)


def from_distance_matrix(dist, labels: Sequence[Iterable[int]]) -> LabeledMetricSpace:
    d = np.asarray(dist, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise FormatError("distance matrix must be square")
    labels = [list(lab) for lab in labels]
    problems = _check_cover(d.shape[0], labels)
    if problems:
        raise LabelError("; ".join(problems))
    return LabeledMetricSpace(d, tuple(tuple(lab) for lab in labels))


def validate(lms: LabeledMetricSpace) -> list[str]:
    """Every violated invariant, as readable strings. Empty iff valid."""
    d = lms.dist
    n = d.shape[0]
    report = []
    if not np.all(np.isfinite(d)):
        report.append("distance matrix has non-finite entries")
        return report
    for i in range(n):
        if d[i, i] != 0:
            report.append(f"dist[{i + 1}][{i + 1}] = {d[i, i]} is not zero")
    for i in range(n):
        for j in range(i + 1, n):
            if d[i, j] != d[j, i]:
                report.append(f"asymmetric: dist[{i + 1}][{j + 1}] = {d[i, j]} but dist[{j + 1}][{i + 1}] = {d[j, i]}")
            if d[i, j] < 0:
                report.append(f"negative distance dist[{i + 1}][{j + 1}] = {d[i, j]}")
    # d[i,j] <= d[i,m] + d[m,j] for all m, vectorized over m
    via = (d[:, :, None] + d[None, :, :]).min(axis=1)
    bad = np.argwhere(d > via + TRIANGLE_SLACK)
    for i, j in bad:
        if i < j:
            m = int(np.argmin(d[i, :] + d[:, j]))
            report.append(
                f"triangle inequality: dist[{i + 1}][{j + 1}] = {d[i, j]} > "
                f"dist[{i + 1}][{m + 1}] + dist[{m + 1}][{j + 1}] = {d[i, m] + d[m, j]}"
            )
    report.extend(_check_cover(n, lms.labels))
    return report


def diam_Q(lms: LabeledMetricSpace, Q: Iterable[int]) -> float:
    """Diameter of the union of the labels in Q (0-based label indices)."""
    Q = list(Q)
    if not Q:
        raise ValueError("Q must be nonempty")
    for i in Q:
        if not 0 <= i < lms.k:
            raise ValueError(f"label index {i} out of range")
    return diam_of(lms.dist, lms.union(Q))


def diam_of(dist: np.ndarray, pts: Sequence[int]) -> float:
    pts = list(pts)
    if len(pts) < 2:
        return 0.0
    return float(dist[np.ix_(pts, pts)].max())


def hausdorff(lms: LabeledMetricSpace, A: Iterable[int], B: Iterable[int]) -> float:
    """Hausdorff distance between two point index sets."""
    A, B = sorted(set(A)), sorted(set(B))
    if not A or not B:
        raise ValueError("Hausdorff distance needs nonempty sets")
    sub = lms.dist[np.ix_(A, B)]
    return float(max(sub.min(axis=1).max(), sub.min(axis=0).max()))


def restrict(lms: LabeledMetricSpace, I: Sequence[int]) -> LabeledMetricSpace:
    """The space over the union of labels I, relabeled (X_{i_1},...,X_{i_l})."""
    I = list(I)
    if not I:
        raise ValueError("I must be nonempty")
    if any(b <= a for a, b in zip(I, I[1:])):
        raise ValueError("I must be strictly increasing")
    if I[0] < 0 or I[-1] >= lms.k:
        raise ValueError("label index out of range")
    pts = lms.union(I)
    where = {p: n for n, p in enumerate(pts)}
    dist = lms.dist[np.ix_(pts, pts)]
    labels = tuple(tuple(where[p] for p in lms.labels[i]) for i in I)
    coords = None if lms.point_coords is None else lms.point_coords[list(pts)]
    return LabeledMetricSpace(dist, labels, coords)


def permute_labels(lms: LabeledMetricSpace, sigma: Sequence[int]) -> LabeledMetricSpace:
    """Labels reindexed so that label i becomes X_{sigma(i)}."""
    sigma = list(sigma)
    if sorted(sigma) != list(range(lms.k)):
        raise ValueError(f"{sigma} is not a permutation of 0..{lms.k - 1}")
    return LabeledMetricSpace(lms.dist, tuple(lms.labels[s] for s in sigma), lms.point_coords)


def stabilize(lms: LabeledMetricSpace, rho: Sequence[int]) -> LabeledMetricSpace:
    """q-stabilization with label i equal to X_{rho(i)}."""
    rho = list(rho)
    if len(rho) < lms.k:
        raise ValueError("q must be at least k")
    if set(rho) != set(range(lms.k)):
        raise ValueError("rho must be a surjection onto the labels")
    return LabeledMetricSpace(lms.dist, tuple(lms.labels[r] for r in rho), lms.point_coords)


@dataclass(frozen=True)
class ChromaticInput:
    """Points with integer colors and a family of allowed color sets."""

    dist: np.ndarray
    colors: tuple[int, ...]
    sigma: tuple[frozenset, ...]
    point_coords: np.ndarray | None = None


def chromatic_to_labeled(c: ChromaticInput) -> LabeledMetricSpace:
    """Label j is the set of points whose color lies in sigma_j."""
    if not c.sigma:
        raise LabelError("empty constraint family")
    for j, s in enumerate(c.sigma):
        if not s:
            raise LabelError(f"constraint set {j + 1} is empty")
    allowed = set().union(*c.sigma)
    for p, col in enumerate(c.colors):
        if col not in allowed:
            raise LabelError(f"point {p + 1} has color {col} outside every constraint set")
    labels = []
    for j, s in enumerate(c.sigma):
        lab = [p for p, col in enumerate(c.colors) if col in s]
        if not lab:
            raise LabelError(f"no point has a color in constraint set {j + 1}")
        labels.append(lab)
    return LabeledMetricSpace(np.asarray(c.dist, float), tuple(tuple(lab) for lab in labels), c.point_coords)


def parse_document(doc, strict: bool = True) -> LabeledMetricSpace:
    """Build a space from a parsed JSON document. Labels are 1-based.

    With strict=False a bad label cover is let through so that validate()
    can report it.
    """
    if not isinstance(doc, dict):
        raise FormatError("top level must be an object")
    if "points" in doc and "dist" in doc:
        raise FormatError("document provides both 'points' and 'dist'")
    if "labels" not in doc:
        raise FormatError("document has no 'labels'")
    raw = doc["labels"]
    if not isinstance(raw, list) or not all(isinstance(lab, list) for lab in raw):
        raise FormatError("'labels' must be a list of lists")
    labels = []
    for lab in raw:
        if not all(isinstance(p, int) and not isinstance(p, bool) for p in lab):
            raise FormatError("label entries must be integers")
        labels.append([p - 1 for p in lab])
    if "points" in doc:
        pts = doc["points"]
        if not isinstance(pts, list) or not pts:
            raise FormatError("'points' must be a nonempty list")
        widths = {len(p) if isinstance(p, list) else -1 for p in pts}
        if len(widths) != 1 or -1 in widths:
            raise FormatError("'points' rows must be lists of equal length")
        X = np.asarray(pts, dtype=float)
        if strict:
            return from_point_cloud(X, labels)
        diff = X[:, None, :] - X[None, :, :]
        return LabeledMetricSpace(np.sqrt((diff**2).sum(-1)), tuple(tuple(lab) for lab in labels), X)
    if "dist" in doc:
        d = doc["dist"]
        if not isinstance(d, list) or not all(isinstance(row, list) and len(row) == len(d) for row in d):
            raise FormatError("'dist' must be a square list of lists")
        if strict:
            return from_distance_matrix(d, labels)
        return LabeledMetricSpace(np.asarray(d, dtype=float), tuple(tuple(lab) for lab in labels))
    raise FormatError("document needs 'points' or 'dist'")


def load(path, strict: bool = True) -> LabeledMetricSpace:
    with open(path) as fh:
        return parse_document(json.load(fh), strict=strict)
