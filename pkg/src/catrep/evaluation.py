"""Measurement apparatus: clustering quality, heterogeneity indicators,
margin goodness curves, and nearest-neighbor retrieval precision.

Ground-truth labels enter only here; representation learning never sees them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import linear_sum_assignment

from .coupling import CouplingSpace
from .dataset import CategoricalDataset
from .errors import DataError


@dataclass(frozen=True)
class ClusterAssignment:
    """Cluster ids per object plus the producing algorithm's objective value."""

    labels: np.ndarray
    k: int
    seed: int
    inertia: float

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        if labels.min() < 0 or labels.max() >= self.k:
            raise DataError("cluster id out of range")


@dataclass
class EvalReport:
    """Collected evaluation outputs for one embedding/similarity under test."""

    f_scores: dict = field(default_factory=dict)  # method -> {"median", "mean", "scores"}
    intra: float | None = None
    inter_per_attribute: tuple = ()
    goodness: np.ndarray | None = None
    precision: dict = field(default_factory=dict)  # k -> precision


def _label_codes(labels) -> np.ndarray:
    if labels is None:
        raise DataError("labels are required for evaluation")
    return np.unique(np.asarray(labels, dtype=object), return_inverse=True)[1]


def kmeans(x: np.ndarray, k: int, seed: int = 0, restarts: int = 10) -> ClusterAssignment:
    """Euclidean k-means (k-means++ seeding, Lloyd updates, best of restarts)."""
    from sklearn.cluster import KMeans

    x = np.asarray(x, dtype=np.float64)
    if not 1 <= k <= x.shape[0]:
        raise DataError(f"k={k} out of range for {x.shape[0]} objects")
    model = KMeans(n_clusters=k, n_init=restarts, random_state=seed).fit(x)
    return ClusterAssignment(model.labels_, k, seed, float(model.inertia_))


def _hamming_to(cells: np.ndarray, mode: np.ndarray) -> np.ndarray:
    return (cells != mode).sum(axis=1)


def _seed_modes(cells: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Distance-weighted (k-means++ style) seeding under Hamming distance."""
    n = cells.shape[0]
    modes = [cells[rng.integers(n)]]
    closest = _hamming_to(cells, modes[0]).astype(np.float64)
    for _ in range(k - 1):
        total = closest.sum()
        if total > 0:
            pick = rng.choice(n, p=closest / total)
        else:
            pick = rng.integers(n)
        modes.append(cells[pick])
        closest = np.minimum(closest, _hamming_to(cells, modes[-1]))
    return np.stack(modes)


def kmodes(
    dataset: CategoricalDataset, k: int, seed: int = 0, restarts: int = 10, max_iter: int = 100
) -> ClusterAssignment:
    """Lloyd-style k-modes: Hamming assignment, per-attribute mode centroids."""
    cells = dataset.cells
    n = cells.shape[0]
    if not 1 <= k <= n:
        raise DataError(f"k={k} out of range for {n} objects")

    best: tuple[float, np.ndarray] | None = None
    for child in np.random.SeedSequence(seed).spawn(restarts):
        rng = np.random.default_rng(child)
        modes = _seed_modes(cells, k, rng)
        assign = np.zeros(n, dtype=np.int64)
        for _ in range(max_iter):
            distances = np.stack([_hamming_to(cells, modes[c]) for c in range(k)])
            new_assign = np.argmin(distances, axis=0)
            # Re-seed empty clusters with the worst-fitting object.
            own = distances[new_assign, np.arange(n)]
            for c in range(k):
                if not np.any(new_assign == c):
                    loner = int(np.argmax(own))
                    new_assign[loner] = c
                    own[loner] = 0
            if np.array_equal(new_assign, assign):
                assign = new_assign
                break
            assign = new_assign
            for c in range(k):
                members = cells[assign == c]
                for j in range(cells.shape[1]):
                    modes[c, j] = np.argmax(np.bincount(members[:, j]))
        cost = float(np.stack([_hamming_to(cells, modes[c]) for c in range(k)])[assign, np.arange(n)].sum())
        if best is None or cost < best[0]:
            best = (cost, assign.copy())
    return ClusterAssignment(best[1], k, seed, best[0])


def f_score(assignment, labels) -> float:
    """Class-size-weighted F1 after one-to-one cluster/class matching.

    Clusters are matched to classes by maximum total overlap (Hungarian on
    the contingency table); surplus clusters or classes stay unmatched and
    contribute zero F1 for their class.
    """
    cluster_ids = assignment.labels if isinstance(assignment, ClusterAssignment) else np.asarray(assignment)
    codes = _label_codes(labels)
    if len(cluster_ids) != len(codes):
        raise DataError("assignment and labels have different lengths")
    cluster_codes = np.unique(cluster_ids, return_inverse=True)[1]
    n_clusters = cluster_codes.max() + 1
    n_classes = codes.max() + 1
    contingency = np.zeros((n_clusters, n_classes), dtype=np.int64)
    np.add.at(contingency, (cluster_codes, codes), 1)

    rows, cols = linear_sum_assignment(contingency, maximize=True)
    cluster_of_class = {c: r for r, c in zip(rows, cols)}
    cluster_sizes = contingency.sum(axis=1)
    class_sizes = contingency.sum(axis=0)

    weighted = 0.0
    for c in range(n_classes):
        r = cluster_of_class.get(c)
        if r is None or contingency[r, c] == 0:
            continue
        precision = contingency[r, c] / cluster_sizes[r]
        recall = contingency[r, c] / class_sizes[c]
        weighted += class_sizes[c] * (2 * precision * recall / (precision + recall))
    return float(weighted / len(codes))


def intra_indicator(dataset: CategoricalDataset, labels=None) -> float:
    """Heterogeneity of value distributions across ground-truth clusters.

    Per value: x = sqrt(sum over clusters of (share of the value's objects in
    that cluster)^2), normalized so uniform spread gives 0 and single-cluster
    concentration gives 1; value scores are averaged within each attribute,
    then over attributes.
    """
    if labels is None:
        labels = dataset.labels
    codes = _label_codes(labels)
    if len(codes) != dataset.n_objects:
        raise DataError("labels length does not match dataset")
    n_clusters = codes.max() + 1
    if n_clusters < 2:
        raise DataError("intra indicator needs at least two clusters")
    # sqrt(1/n) rather than 1/sqrt(n): the uniform-spread statistic rounds to
    # the same float, so the indicator hits its 0 extreme exactly.
    denom = 1.0 - math.sqrt(1.0 / n_clusters)

    attr_scores = []
    for j in range(dataset.n_attributes):
        n_vj = dataset.value_counts[j]
        counts = np.zeros((n_vj, n_clusters))
        np.add.at(counts, (dataset.cells[:, j], codes), 1.0)
        shares = counts / counts.sum(axis=1, keepdims=True)
        x = np.sqrt((shares**2).sum(axis=1))
        attr_scores.append(np.mean(1.0 - (1.0 - x) / denom))
    return float(np.mean(attr_scores))


def coupling_matrix(space: CouplingSpace) -> np.ndarray:
    """Pairwise Euclidean distances between the value vectors of one space."""
    v = space.vectors
    sq = np.sum(v * v, axis=1)
    d2 = np.maximum(sq[:, None] + sq[None, :] - 2.0 * (v @ v.T), 0.0)
    np.fill_diagonal(d2, 0.0)
    d = np.sqrt(d2)
    return np.triu(d) + np.triu(d, 1).T


def inter_indicator(matrices) -> float:
    """Root-mean-square disagreement between an attribute's coupling matrices."""
    mats = [np.asarray(m, dtype=np.float64) for m in matrices]
    if not mats:
        raise DataError("inter indicator needs at least one coupling matrix")
    side = mats[0].shape
    if len(side) != 2 or side[0] != side[1] or any(m.shape != side for m in mats):
        raise DataError("coupling matrices must be square and share one shape")
    n_m = len(mats)
    per_entry = side[0] * side[0]
    acc = 0.0
    for a in mats:
        for b in mats:
            acc += float(((a - b) ** 2).sum()) / per_entry
    return math.sqrt(acc / n_m**2)


def goodness_curve(similarity: np.ndarray, labels, eps_step: float = 0.01) -> np.ndarray:
    """(epsilon, gamma) margin curve of a similarity matrix under labels.

    Each object's margin is its mean same-class similarity minus its mean
    other-class similarity (self excluded).  gamma(eps) is the margin still
    achieved by the top ceil((1 - eps) * n_o) objects; only the nonnegative
    segment is reported.
    """
    s = np.asarray(similarity, dtype=np.float64)
    codes = _label_codes(labels)
    n = len(codes)
    if s.shape != (n, n):
        raise DataError("similarity shape does not match labels")
    if codes.max() + 1 < 2:
        raise DataError("goodness curve needs at least two classes")
    counts = np.bincount(codes)
    if counts.min() < 2:
        raise DataError("every class needs at least two members")

    same = codes[:, None] == codes[None, :]
    np.fill_diagonal(same, False)
    other = codes[:, None] != codes[None, :]
    margins = np.empty(n)
    for i in range(n):
        margins[i] = s[i, same[i]].mean() - s[i, other[i]].mean()
    ordered = np.sort(margins)[::-1]

    step = Fraction(str(eps_step))
    if not 0 < step < 1:
        raise DataError("eps_step must lie in (0, 1)")
    samples = []
    t = 0
    while t * step < 1:
        eps = t * step
        rank = math.ceil((1 - eps) * n)  # exact: eps is rational
        gamma = ordered[rank - 1]
        if gamma >= 0.0:
            samples.append((float(eps), gamma))
        t += 1
    return np.array(samples, dtype=np.float64).reshape(-1, 2)


def precision_at_k(x: np.ndarray, labels, k: int) -> float:
    """Mean fraction of each object's k nearest neighbors sharing its class.

    Euclidean distance on the embedding rows; self excluded; distance ties
    broken by ascending object index.
    """
    x = np.asarray(x, dtype=np.float64)
    codes = _label_codes(labels)
    n = x.shape[0]
    if len(codes) != n:
        raise DataError("labels length does not match embedding")
    if not 1 <= k < n:
        raise DataError(f"k={k} must satisfy 1 <= k < n_o={n}")
    sq = np.sum(x * x, axis=1)
    d2 = np.maximum(sq[:, None] + sq[None, :] - 2.0 * (x @ x.T), 0.0)
    np.fill_diagonal(d2, np.inf)
    total = 0.0
    for i in range(n):
        neighbors = np.argsort(d2[i], kind="stable")[:k]
        total += float(np.mean(codes[neighbors] == codes[i]))
    return total / n
