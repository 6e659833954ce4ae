"""Kernel bank and value-level kernel matrices over coupling spaces.

Each coupling space is pushed through every kernel function of the bank,
yielding one symmetric PSD value-level matrix per (space, kernel) pair.  The
stack keeps the pairs in space-major, kernel-minor order and carries the
object -> value-row index map used by the object-level similarity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coupling import CouplingSpace
from .dataset import CategoricalDataset
from .errors import ConfigError, DataError

GAUSSIAN = "gaussian"
POLYNOMIAL = "polynomial"
LINEAR = "linear"

# 11 gaussian widths 2^-5 .. 2^5 plus polynomial orders 1..3.
DEFAULT_KERNEL_TOKENS = tuple(f"gaussian:{2.0 ** e:g}" for e in range(-5, 6)) + (
    "poly:1",
    "poly:2",
    "poly:3",
)


@dataclass(frozen=True)
class KernelFunction:
    """One kernel: gaussian (width w), polynomial (order d), or linear.

    The polynomial kernel follows the libsvm/sklearn convention
    (a.b / dim + 1)^d: the dimension scaling keeps polynomial outputs on the
    same footing as the bounded gaussian outputs, so no single kernel family
    dominates the concatenated embedding.
    """

    family: str
    parameter: float | None = None

    def __post_init__(self):
        if self.family == GAUSSIAN:
            if self.parameter is None or self.parameter <= 0:
                raise ConfigError("gaussian kernel needs width > 0")
        elif self.family == POLYNOMIAL:
            if self.parameter is None or self.parameter < 1 or self.parameter != int(self.parameter):
                raise ConfigError("polynomial kernel needs integer order >= 1")
        elif self.family == LINEAR:
            if self.parameter is not None:
                raise ConfigError("linear kernel takes no parameter")
        else:
            raise ConfigError(f"unknown kernel family {self.family!r}")

    def token(self) -> str:
        if self.family == GAUSSIAN:
            return f"gaussian:{self.parameter:g}"
        if self.family == POLYNOMIAL:
            return f"poly:{int(self.parameter)}"
        return "linear"


def parse_kernel_token(token: str) -> KernelFunction:
    """Parse one "gaussian:<w>" / "poly:<d>" / "linear" token."""
    token = token.strip()
    if token == LINEAR:
        return KernelFunction(LINEAR)
    name, sep, arg = token.partition(":")
    if not sep:
        raise ConfigError(f"bad kernel token {token!r}")
    try:
        value = float(arg)
    except ValueError:
        raise ConfigError(f"bad kernel parameter in token {token!r}") from None
    if name == GAUSSIAN:
        return KernelFunction(GAUSSIAN, value)
    if name == "poly":
        return KernelFunction(POLYNOMIAL, value)
    raise ConfigError(f"unknown kernel token {token!r}")


def parse_kernel_bank(tokens) -> tuple[KernelFunction, ...]:
    """Parse a comma-separated string or an iterable of kernel tokens."""
    if isinstance(tokens, str):
        tokens = [t for t in tokens.split(",") if t.strip()]
    funcs = tuple(parse_kernel_token(t) for t in tokens)
    if not funcs:
        raise ConfigError("kernel bank is empty")
    return funcs


def default_kernel_bank() -> tuple[KernelFunction, ...]:
    return parse_kernel_bank(list(DEFAULT_KERNEL_TOKENS))


def kernel_eval(func: KernelFunction, a, b) -> float:
    """Evaluate one kernel on a pair of equal-length vectors."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DataError(f"kernel arguments have different shapes {a.shape} vs {b.shape}")
    if func.family == GAUSSIAN:
        d2 = float(np.sum((a - b) ** 2))
        return float(np.exp(-d2 / (2.0 * func.parameter**2)))
    dot = float(a @ b)
    if func.family == POLYNOMIAL:
        return (dot / a.shape[0] + 1.0) ** int(func.parameter)
    return dot


def build_kernel_matrix(space: CouplingSpace, func: KernelFunction) -> np.ndarray:
    """Value-level kernel matrix of one coupling space; exactly symmetric."""
    v = space.vectors
    gram = v @ v.T
    if func.family == GAUSSIAN:
        sq = np.sum(v * v, axis=1)
        d2 = np.maximum(sq[:, None] + sq[None, :] - 2.0 * gram, 0.0)
        k = np.exp(-d2 / (2.0 * func.parameter**2))
    elif func.family == POLYNOMIAL:
        k = (gram / v.shape[1] + 1.0) ** int(func.parameter)
    else:
        k = gram
    # Keep a single triangle so K[i, j] and K[j, i] are the same float.
    return np.triu(k) + np.triu(k, 1).T


@dataclass(frozen=True)
class KernelEntry:
    """One (coupling space, kernel function) pair and its value-level matrix."""

    space_id: int
    func: KernelFunction
    matrix: np.ndarray


@dataclass(frozen=True)
class KernelStack:
    """All value-level kernel matrices plus the object -> value-row index map.

    entries are space-major, kernel-minor.  space_tensors[s] stacks the
    matrices of space s as (n_funcs, n_v, n_v); entry matrices are views into
    it.  object_rows[s][i] is the row of object i inside every matrix of
    space s.
    """

    entries: tuple[KernelEntry, ...]
    spaces: tuple[CouplingSpace, ...]
    funcs: tuple[KernelFunction, ...]
    space_tensors: tuple[np.ndarray, ...]
    object_rows: tuple[np.ndarray, ...]

    @property
    def n_entries(self) -> int:
        return len(self.entries)

    @property
    def entry_sizes(self) -> tuple[int, ...]:
        """Weight-vector length of each entry (its matrix side)."""
        return tuple(e.matrix.shape[0] for e in self.entries)

    @property
    def entry_offsets(self) -> tuple[int, ...]:
        offsets, total = [], 0
        for size in self.entry_sizes:
            offsets.append(total)
            total += size
        return tuple(offsets)

    @property
    def n_weights(self) -> int:
        return sum(self.entry_sizes)

    @property
    def n_objects(self) -> int:
        return len(self.object_rows[0])

    def value_row(self, i: int, p: int) -> int:
        """Row index of object i's value inside entry p's matrix."""
        return int(self.object_rows[self.entries[p].space_id][i])

    def space_weight_block(self, s: int) -> tuple[int, int]:
        """Flat-weight range [start, stop) covered by the entries of space s."""
        per_space = len(self.funcs) * self.spaces[s].n_values
        starts = [0]
        for t in range(len(self.spaces)):
            starts.append(starts[-1] + len(self.funcs) * self.spaces[t].n_values)
        return starts[s], starts[s] + per_space


def build_stack(
    spaces, funcs, dataset: CategoricalDataset
) -> KernelStack:
    """Build every |spaces| x |funcs| kernel matrix and the object index map."""
    funcs = tuple(funcs)
    if not funcs:
        raise ConfigError("kernel bank is empty")
    spaces = tuple(spaces)
    tensors = []
    entries = []
    for s, space in enumerate(spaces):
        mats = np.stack([build_kernel_matrix(space, f) for f in funcs])
        mats.setflags(write=False)
        tensors.append(mats)
        entries.extend(KernelEntry(s, f, mats[q]) for q, f in enumerate(funcs))
    object_rows = tuple(dataset.cells[:, space.attr].copy() for space in spaces)
    for rows in object_rows:
        rows.setflags(write=False)
    return KernelStack(
        entries=tuple(entries),
        spaces=spaces,
        funcs=funcs,
        space_tensors=tuple(tensors),
        object_rows=object_rows,
    )
