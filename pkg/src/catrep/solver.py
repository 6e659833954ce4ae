"""Alternating optimizer for the heterogeneity weights.

The objective is the relaxed kernel k-means loss Tr(S (I - H H^T)) with S the
weighted object similarity and H an orthonormal n_o x n_c matrix.  Each outer
iteration first takes H = top eigenvectors of S (the spectral optimum for
fixed weights), then improves the weights for fixed H: the loss is linear in
the weights, so full mode jumps to the best vertex of the feasible simplex
while stochastic mode takes an Adam step on a sampled batch of object pairs
followed by projection back onto the simplex.
"""

from __future__ import annotations

import hashlib
import math
import time
from dataclasses import dataclass, field, asdict

import numpy as np

from .coupling import build_all
from .dataset import CategoricalDataset
from .errors import ConfigError, DataError, NumericError
from .heterogeneity import (
    HeterogeneityParams,
    Representation,
    similarity_matrix,
    vector_representation,
)
from .kernels import KernelStack, build_stack

FULL = "full"
STOCHASTIC = "stochastic"


@dataclass(frozen=True)
class FitConfig:
    """Optimizer settings; defaults follow the stochastic Adam recipe."""

    n_clusters: int
    mode: str = STOCHASTIC
    learning_rate: float = 1e-3
    batch_size: int = 20
    max_iterations: int = 1000
    delta: float = 1e-6
    seed: int = 0
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8

    def __post_init__(self):
        if self.n_clusters < 2:
            raise ConfigError("n_clusters must be at least 2")
        if self.mode not in (FULL, STOCHASTIC):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if not self.delta > 0:
            raise ConfigError("delta must be positive")
        if self.batch_size < 1:
            raise ConfigError("batch_size must be at least 1")
        if self.max_iterations < 1:
            raise ConfigError("max_iterations must be at least 1")
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate must be positive")


@dataclass
class FitTrace:
    """Per outer iteration: loss, loss change, and a hash of the weights."""

    losses: list[float] = field(default_factory=list)
    deltas: list[float] = field(default_factory=list)
    weight_hashes: list[str] = field(default_factory=list)

    def record(self, loss_value: float, delta: float, params: HeterogeneityParams) -> None:
        self.losses.append(float(loss_value))
        self.deltas.append(float(delta))
        self.weight_hashes.append(hashlib.sha1(params.values.tobytes()).hexdigest()[:12])

    def __len__(self) -> int:
        return len(self.losses)


@dataclass
class AdamState:
    """First/second moment accumulators for the stochastic weight step."""

    m: np.ndarray
    v: np.ndarray
    t: int = 0

    @classmethod
    def zeros(cls, n: int) -> "AdamState":
        return cls(np.zeros(n), np.zeros(n))


def h_step(similarity: np.ndarray, n_clusters: int) -> np.ndarray:
    """Top-n_clusters eigenvectors of the symmetrized similarity matrix.

    Columns are sorted by descending eigenvalue; each eigenvector's
    largest-magnitude entry is made positive so the result is reproducible.
    """
    s = np.asarray(similarity, dtype=np.float64)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise DataError("similarity matrix must be square")
    if not np.all(np.isfinite(s)):
        raise NumericError("similarity matrix has non-finite entries")
    if not 1 <= n_clusters <= s.shape[0]:
        raise DataError("n_clusters out of range for this matrix")
    eigenvalues, eigenvectors = np.linalg.eigh((s + s.T) / 2.0)
    order = np.argsort(eigenvalues)[::-1][:n_clusters]
    h = eigenvectors[:, order]
    for c in range(h.shape[1]):
        peak = np.argmax(np.abs(h[:, c]))
        if h[peak, c] < 0:
            h[:, c] = -h[:, c]
    return h


def loss(similarity: np.ndarray, h: np.ndarray) -> float:
    """Relaxed kernel k-means loss Tr(S) - Tr(H^T S H)."""
    s = np.asarray(similarity, dtype=np.float64)
    h = np.asarray(h, dtype=np.float64)
    if h.ndim != 2 or s.shape[0] != s.shape[1] or h.shape[0] != s.shape[0]:
        raise DataError("similarity/H shape mismatch")
    return float(np.trace(s) - np.sum(h * (s @ h)))


def omega_gradient(
    stack: KernelStack,
    h: np.ndarray,
    pairs: np.ndarray | None = None,
    pair_rows: np.ndarray | None = None,
) -> np.ndarray:
    """Exact gradient of the (batch-restricted) loss w.r.t. the flat weights.

    The loss is linear in the weights; the coefficient of weight (p, t) is
    sum over ordered pairs (i, j) of A_ij * K_p[row_i, t] * K_p[row_j, t]
    with A = I - H H^T.  pairs=None uses all n_o^2 ordered pairs.  For batch
    use, `pairs` holds object ids and `pair_rows` the matching row indices
    into `h` (defaults to the ids themselves).
    """
    h = np.asarray(h, dtype=np.float64)
    grad = np.empty(stack.n_weights)
    offsets = stack.entry_offsets
    n_funcs = len(stack.funcs)

    if pairs is None:
        a = -(h @ h.T)
        a[np.diag_indices_from(a)] += 1.0
        for s, tensor in enumerate(stack.space_tensors):
            rows = stack.object_rows[s]
            gathered = tensor[:, rows, :]  # (n_funcs, n_o, n_v)
            coeff = np.einsum("fit,ij,fjt->ft", gathered, a, gathered, optimize=True)
            for q in range(n_funcs):
                p = s * n_funcs + q
                grad[offsets[p] : offsets[p] + tensor.shape[1]] = coeff[q]
        return grad

    pairs = np.asarray(pairs)
    if pairs.ndim != 2 or pairs.shape[1] != 2 or len(pairs) == 0:
        raise DataError("pairs must be a non-empty (n, 2) array")
    rows_h = pairs if pair_rows is None else np.asarray(pair_rows)
    a_vals = (pairs[:, 0] == pairs[:, 1]).astype(np.float64)
    a_vals -= np.sum(h[rows_h[:, 0]] * h[rows_h[:, 1]], axis=1)
    for s, tensor in enumerate(stack.space_tensors):
        ri = stack.object_rows[s][pairs[:, 0]]
        rj = stack.object_rows[s][pairs[:, 1]]
        xi = tensor[:, ri, :]
        xj = tensor[:, rj, :]
        coeff = np.einsum("b,fbt,fbt->ft", a_vals, xi, xj)
        for q in range(n_funcs):
            p = s * n_funcs + q
            grad[offsets[p] : offsets[p] + tensor.shape[1]] = coeff[q]
    return grad


def project_weights(values: np.ndarray) -> np.ndarray:
    """Project onto {w >= 0, sum(w) = len(w)}: clip, then rescale the sum.

    An all-zero vector (nothing left after clipping) resets to all-ones.
    """
    w = np.maximum(np.asarray(values, dtype=np.float64), 0.0)
    total = w.sum()
    if total <= 0.0:
        return np.ones(len(w))
    return w * (len(w) / total)


def omega_step(
    params: HeterogeneityParams,
    gradient: np.ndarray,
    config: FitConfig,
    adam: AdamState | None = None,
) -> HeterogeneityParams:
    """One weight update.

    Full mode minimizes the linear objective exactly: all mass goes to the
    minimum-coefficient entry (ties to the lowest index).  Stochastic mode
    takes an Adam step and projects back onto the feasible simplex.
    """
    gradient = np.asarray(gradient, dtype=np.float64)
    if not np.all(np.isfinite(gradient)):
        raise NumericError("non-finite gradient")
    if gradient.shape != params.values.shape:
        raise DataError("gradient length does not match weight vector")

    if config.mode == FULL:
        values = np.zeros_like(params.values)
        values[int(np.argmin(gradient))] = float(params.n_weights)
        return params.replace(values)

    if adam is None:
        raise ConfigError("stochastic mode needs an AdamState")
    adam.t += 1
    adam.m = config.adam_beta1 * adam.m + (1.0 - config.adam_beta1) * gradient
    adam.v = config.adam_beta2 * adam.v + (1.0 - config.adam_beta2) * gradient**2
    m_hat = adam.m / (1.0 - config.adam_beta1**adam.t)
    v_hat = adam.v / (1.0 - config.adam_beta2**adam.t)
    stepped = params.values - config.learning_rate * m_hat / (np.sqrt(v_hat) + config.adam_eps)
    return params.replace(project_weights(stepped))


def fit(
    dataset: CategoricalDataset,
    funcs,
    config: FitConfig,
    with_similarity: bool = True,
    with_embedding: bool = True,
) -> tuple[Representation, HeterogeneityParams, FitTrace]:
    """Learn the heterogeneity weights and produce the representations.

    Builds the coupling spaces and the kernel stack, starts from all-ones
    weights, and alternates the spectral H-step with one weight update per
    outer iteration until the loss change drops to `delta` or the iteration
    budget runs out.  Deterministic for a given seed.

    `with_similarity` / `with_embedding` control whether the dense S and X
    are materialized in the returned Representation (the weight learning
    itself never needs the full S in stochastic mode).
    """
    if config.n_clusters > dataset.n_objects:
        raise ConfigError("n_clusters cannot exceed the number of objects")

    t0 = time.perf_counter()
    spaces = build_all(dataset)
    stack = build_stack(spaces, funcs, dataset)
    params = HeterogeneityParams.ones(stack)
    build_seconds = time.perf_counter() - t0

    trace = FitTrace()
    t1 = time.perf_counter()
    if config.n_clusters == dataset.n_objects:
        # Degenerate: H spans everything, the loss is identically zero.
        trace.record(0.0, 0.0, params)
    elif config.mode == FULL:
        params = _fit_full(stack, params, config, trace)
    else:
        params = _fit_stochastic(stack, params, config, trace)
    learn_seconds = time.perf_counter() - t1

    similarity = similarity_matrix(stack, params) if with_similarity else None
    embedding = vector_representation(stack, params) if with_embedding else None
    meta = {
        "config": asdict(config),
        "kernel_bank": [f.token() for f in stack.funcs],
        "seed": config.seed,
        "loss_trace": list(trace.losses),
        "iterations": len(trace),
        "build_seconds": build_seconds,
        "learn_seconds": learn_seconds,
    }
    return Representation(similarity, embedding, meta), params, trace


def _fit_full(stack, params, config, trace):
    similarity = similarity_matrix(stack, params)
    previous = math.inf
    for _ in range(config.max_iterations):
        h = h_step(similarity, config.n_clusters)
        coefficients = omega_gradient(stack, h)
        params = omega_step(params, coefficients, config)
        similarity = similarity_matrix(stack, params)
        current = loss(similarity, h)
        change = abs(current - previous)
        trace.record(current, change, params)
        previous = current
        if change <= config.delta:
            break
    return params


def _fit_stochastic(stack, params, config, trace):
    rng = np.random.default_rng(config.seed)
    adam = AdamState.zeros(params.n_weights)
    n_objects = stack.n_objects
    previous = math.inf
    for _ in range(config.max_iterations):
        pairs = rng.integers(0, n_objects, size=(config.batch_size, 2))
        batch_objects, flat_positions = np.unique(pairs.reshape(-1), return_inverse=True)
        pair_rows = flat_positions.reshape(-1, 2)
        n_batch = len(batch_objects)

        batch_similarity = similarity_matrix(stack, params, objects=batch_objects)
        h = h_step(batch_similarity, min(config.n_clusters, n_batch))
        gradient = omega_gradient(stack, h, pairs=pairs, pair_rows=pair_rows)
        params = omega_step(params, gradient, config, adam)

        batch_similarity = similarity_matrix(stack, params, objects=batch_objects)
        current = loss(batch_similarity, h)
        change = abs(current - previous)
        trace.record(current, change, params)
        previous = current
        if change <= config.delta:
            break
    return params
