"""Heterogeneity weights and the object-level similarity / vector outputs.

One nonnegative diagonal weight vector per kernel entry (the per-value and
per-kernel-space weights folded into a single parameter) turns the stack into

    s(i, j) = sum_p sum_t w_p[t] * K_p[row_i, t] * K_p[row_j, t]

which is a positive semi-definite kernel over objects.  The same weights give
the explicit factor X with rows x_i = concat_p sqrt(w_p) * K_p[row_i, :], so
S = X X^T holds by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError
from .kernels import KernelStack


@dataclass(frozen=True)
class HeterogeneityParams:
    """Flat nonnegative weight vector over all kernel entries.

    The feasible set is {w >= 0, sum(w) = len(w)}: a scaled simplex that keeps
    the all-ones initialization feasible and the linear objective bounded.
    """

    values: np.ndarray
    sizes: tuple[int, ...]

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if values.ndim != 1 or len(values) != sum(self.sizes):
            raise DataError("weight vector length does not match entry sizes")

    @classmethod
    def ones(cls, stack: KernelStack) -> "HeterogeneityParams":
        sizes = stack.entry_sizes
        return cls(np.ones(sum(sizes)), sizes)

    @property
    def n_weights(self) -> int:
        return len(self.values)

    def entry_weights(self, p: int) -> np.ndarray:
        start = sum(self.sizes[:p])
        return self.values[start : start + self.sizes[p]]

    def is_feasible(self, tol: float = 1e-9) -> bool:
        total = self.values.sum()
        return bool(self.values.min() >= 0.0 and abs(total - self.n_weights) <= tol * max(1.0, self.n_weights))

    def replace(self, values: np.ndarray) -> "HeterogeneityParams":
        return HeterogeneityParams(values, self.sizes)


@dataclass(frozen=True)
class Representation:
    """Learned outputs: similarity matrix S, embedding X, and fit metadata."""

    similarity: np.ndarray | None
    embedding: np.ndarray | None
    meta: dict = field(default_factory=dict)


def _space_weights(stack: KernelStack, params: HeterogeneityParams, s: int) -> np.ndarray:
    """Weights of space s as an (n_funcs, n_v) block (entries are space-major)."""
    start, stop = stack.space_weight_block(s)
    return params.values[start:stop].reshape(len(stack.funcs), stack.spaces[s].n_values)


def object_similarity(stack: KernelStack, params: HeterogeneityParams, i: int, j: int) -> float:
    """Weighted similarity of one object pair."""
    if not (0 <= i < stack.n_objects and 0 <= j < stack.n_objects):
        raise DataError("object index out of range")
    total = 0.0
    for s, tensor in enumerate(stack.space_tensors):
        w = _space_weights(stack, params, s)
        ri = stack.object_rows[s][i]
        rj = stack.object_rows[s][j]
        total += float(np.sum(tensor[:, ri, :] * w * tensor[:, rj, :]))
    return total


def _weighted_value_grams(stack: KernelStack, params: HeterogeneityParams) -> list[np.ndarray]:
    """Per space: G = sum over its kernels of K diag(w) K^T (value-level)."""
    grams = []
    for s, tensor in enumerate(stack.space_tensors):
        w = _space_weights(stack, params, s)
        weighted = tensor * w[:, None, :]
        grams.append(np.matmul(weighted, tensor.transpose(0, 2, 1)).sum(axis=0))
    return grams


def similarity_matrix(
    stack: KernelStack, params: HeterogeneityParams, objects: np.ndarray | None = None
) -> np.ndarray:
    """Similarity matrix over all objects (or the given subset); exactly symmetric."""
    grams = _weighted_value_grams(stack, params)
    n = stack.n_objects if objects is None else len(objects)
    out = np.zeros((n, n))
    for s, gram in enumerate(grams):
        rows = stack.object_rows[s] if objects is None else stack.object_rows[s][objects]
        out += gram[np.ix_(rows, rows)]
    return np.triu(out) + np.triu(out, 1).T


def vector_representation(
    stack: KernelStack, params: HeterogeneityParams, objects: np.ndarray | None = None
) -> np.ndarray:
    """Embedding X: row i concatenates sqrt(w_p) * K_p[row_i, :] over entries."""
    if params.values.min() < 0:
        raise DataError("negative heterogeneity weight")
    n = stack.n_objects if objects is None else len(objects)
    out = np.empty((n, params.n_weights))
    offsets = stack.entry_offsets
    roots = np.sqrt(params.values)
    for p, entry in enumerate(stack.entries):
        rows = stack.object_rows[entry.space_id]
        if objects is not None:
            rows = rows[objects]
        start = offsets[p]
        stop = start + entry.matrix.shape[0]
        out[:, start:stop] = entry.matrix[rows] * roots[start:stop]
    return out
