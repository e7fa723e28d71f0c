"""Agglomerative clustering over a precomputed distance matrix.

The dendrogram is built bottom-up under average (default), complete or
single linkage, with a deterministic tie-break: among pairs at the same
linkage distance, the pair whose smallest contained leaf indices compare
lowest merges first. Partitions are read off by cutting at a threshold;
the cut keeping every merge at height <= h groups exact duplicates at h=0.

Partition quality uses a variance-ratio (Calinski-Harabasz style) score
adapted to metric-only data: dispersion is measured with squared distances
to medoids instead of centroids, since sequences have no vector embedding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distance import check_matrix
from .errors import DegenerateK, TooFewPoints

LINKAGES = ("average", "complete", "single")


@dataclass(frozen=True)
class Dendrogram:
    """Merge list in scipy convention: leaves 0..n-1, merge i creates cluster n+i."""

    n_leaves: int
    merges: tuple[tuple[int, int, float], ...]

    def heights(self) -> list[float]:
        return [m[2] for m in self.merges]


@dataclass(frozen=True)
class Partition:
    """Disjoint member-index sets covering 0..n-1, with per-cluster medoids."""

    clusters: tuple[tuple[int, ...], ...]
    threshold: float
    medoids: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.clusters)

    def labels(self, n: int) -> list[int]:
        out = [-1] * n
        for ci, members in enumerate(self.clusters):
            for m in members:
                out[m] = ci
        return out

    def dominant(self) -> tuple[tuple[int, ...], ...]:
        """Clusters with at least two members (reporting label only)."""
        return tuple(c for c in self.clusters if len(c) >= 2)


def to_nested(dendrogram: Dendrogram):
    """Nested-list rendering of the merge tree, for quick visualization.

    Leaves are bare indices; each merge becomes a two-element list. With ties
    at equal heights the nesting mirrors the deterministic merge order.
    """
    nodes: dict[int, object] = {i: i for i in range(dendrogram.n_leaves)}
    min_leaf: dict[int, int] = {i: i for i in range(dendrogram.n_leaves)}
    next_id = dendrogram.n_leaves
    for a, b, _ in dendrogram.merges:
        first, second = (a, b) if min_leaf[a] <= min_leaf[b] else (b, a)
        nodes[next_id] = [nodes.pop(first), nodes.pop(second)]
        min_leaf[next_id] = min(min_leaf[a], min_leaf[b])
        next_id += 1
    remaining = [nodes[k] for k in sorted(nodes)]
    return remaining[0] if len(remaining) == 1 else remaining


def agglomerate(matrix: np.ndarray, linkage: str = "average") -> Dendrogram:
    """Standard agglomerative merge sequence under the chosen linkage."""
    if linkage not in LINKAGES:
        raise ValueError(f"unknown linkage {linkage!r}; expected one of {LINKAGES}")
    m = check_matrix(matrix)
    n = m.shape[0]
    # active cluster id -> (leaf set, smallest leaf index)
    members: dict[int, list[int]] = {i: [i] for i in range(n)}
    reps: dict[int, int] = {i: i for i in range(n)}
    # pairwise linkage distances between active clusters
    dist: dict[tuple[int, int], float] = {}
    for i in range(n):
        for j in range(i + 1, n):
            dist[(i, j)] = float(m[i, j])
    merges: list[tuple[int, int, float]] = []
    next_id = n
    active = set(range(n))
    while len(active) > 1:
        best: tuple[float, int, int, int, int] | None = None
        for (a, b), d in dist.items():
            key = (d, min(reps[a], reps[b]), max(reps[a], reps[b]), a, b)
            if best is None or key < best:
                best = key
        assert best is not None
        d, _, _, a, b = best
        merged = members[a] + members[b]
        new = next_id
        next_id += 1
        merges.append((min(a, b), max(a, b), d))
        active.discard(a)
        active.discard(b)
        new_dist: dict[tuple[int, int], float] = {}
        for (x, y), old in dist.items():
            if x in (a, b) or y in (a, b):
                continue
            new_dist[(x, y)] = old
        for c in active:
            if linkage == "average":
                total = sum(m[i, j] for i in merged for j in members[c])
                d_new = total / (len(merged) * len(members[c]))
            elif linkage == "complete":
                d_new = max(m[i, j] for i in merged for j in members[c])
            else:
                d_new = min(m[i, j] for i in merged for j in members[c])
            new_dist[(min(c, new), max(c, new))] = float(d_new)
        dist = new_dist
        members[new] = merged
        reps[new] = min(reps[a], reps[b])
        active.add(new)
    return Dendrogram(n_leaves=n, merges=tuple(merges))


def cut(dendrogram: Dendrogram, matrix: np.ndarray, threshold: float) -> Partition:
    """Partition formed by applying every merge at height <= threshold."""
    n = dendrogram.n_leaves
    parent = list(range(2 * n - 1))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    next_id = n
    for a, b, h in dendrogram.merges:
        if h <= threshold:
            parent[find(a)] = next_id
            parent[find(b)] = next_id
        next_id += 1
    groups: dict[int, list[int]] = {}
    for leaf in range(n):
        groups.setdefault(find(leaf), []).append(leaf)
    clusters = tuple(tuple(sorted(g)) for g in sorted(groups.values(), key=min))
    medoids = tuple(_medoid(c, matrix) for c in clusters)
    return Partition(clusters=clusters, threshold=float(threshold), medoids=medoids)


def _medoid(members: tuple[int, ...], matrix: np.ndarray) -> int:
    """Member minimizing the sum of squared distances to the others.

    Within-cluster ties (inevitable for two-member clusters) resolve toward
    the member closest to the whole corpus in total squared distance, which
    keeps the score independent of point labeling; only exact duplicates
    fall through to the index order, where the choice cannot matter.
    """
    sq = matrix * matrix

    def key(i: int) -> tuple[float, float, int]:
        return (float(sq[i, list(members)].sum()), float(sq[i].sum()), i)

    return min(members, key=key)


def vrc(partition: Partition, matrix: np.ndarray) -> float:
    """Variance ratio [B/(k-1)] / [W/(n-k)] with medoid-based dispersions.

    W sums squared member-to-medoid distances within clusters; B sums
    size-weighted squared medoid-to-global-medoid distances. W=0 with B>0
    scores +inf (perfectly tight, separated clusters).
    """
    m = check_matrix(matrix)
    n = m.shape[0]
    k = partition.k
    if k < 2 or k > n - 1:
        raise DegenerateK(f"VRC undefined for k={k} with n={n}")
    all_points = tuple(range(n))
    global_medoid = _medoid(all_points, m)
    within = 0.0
    between = 0.0
    for members, medoid in zip(partition.clusters, partition.medoids):
        within += sum(float(m[i, medoid]) ** 2 for i in members)
        between += len(members) * float(m[medoid, global_medoid]) ** 2
    if within == 0.0:
        return math.inf if between > 0.0 else 0.0
    return (between / (k - 1)) / (within / (n - k))


def select_partition(dendrogram: Dendrogram, matrix: np.ndarray, return_score: bool = False):
    """Best-VRC partition over cuts at the distinct merge heights.

    Only cuts with 2 <= k <= n-1 are scored; ties resolve toward the
    smaller threshold. All-identical inputs collapse to a single cluster at
    threshold 0. If no cut admits a valid k (e.g. two distinct points, or
    every merge at one height), the points stay singletons at threshold 0.
    """
    m = check_matrix(matrix)
    n = dendrogram.n_leaves
    if n < 2:
        raise TooFewPoints(f"need at least 2 points, got {n}")
    if not m.any():
        part = cut(dendrogram, m, 0.0)
        return (part, math.nan) if return_score else part
    thresholds = sorted({0.0} | set(dendrogram.heights()))
    best: tuple[float, float, Partition] | None = None
    for h in thresholds:
        part = cut(dendrogram, m, h)
        if not 2 <= part.k <= n - 1:
            continue
        score = vrc(part, m)
        # strictly-greater keeps the smallest threshold among ties
        if best is None or score > best[0]:
            best = (score, h, part)
    if best is None:
        part = cut(dendrogram, m, -1.0)  # nothing merged: all singletons
        part = Partition(clusters=part.clusters, threshold=0.0, medoids=part.medoids)
        return (part, math.nan) if return_score else part
    score, _, part = best
    return (part, score) if return_score else part
