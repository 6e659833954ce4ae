"""Intra- and inter-attribute coupling spaces.

A coupling space embeds the values of one attribute as numeric vectors:

* intra: the 1-dimensional value-frequency embedding, entry |g(v)| / n_o;
* inter: the conditional-probability embedding against every value w of every
  other attribute, entry |g(v) ∩ g(w)| / |g(w)|.

Column order of inter spaces is fixed (ascending attribute index excluding the
own attribute, dictionary value order) so vectors are reproducible.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .dataset import CategoricalDataset
from .errors import DataError


@dataclass(frozen=True)
class CouplingSpace:
    """Per-attribute matrix of value coupling vectors (one row per value)."""

    attr: int
    kind: str  # "intra" | "inter"
    vectors: np.ndarray
    column_key: tuple[tuple[int, int], ...] | None = None  # inter: (attribute, value index) per column

    def __post_init__(self):
        vectors = np.asarray(self.vectors, dtype=np.float64)
        vectors.setflags(write=False)
        object.__setattr__(self, "vectors", vectors)
        if self.kind not in ("intra", "inter"):
            raise DataError(f"unknown coupling kind {self.kind!r}")
        if self.kind == "inter":
            if self.column_key is None or len(self.column_key) != vectors.shape[1]:
                raise DataError("inter coupling space needs one column_key entry per column")

    @property
    def n_values(self) -> int:
        return self.vectors.shape[0]

    @property
    def dimension(self) -> int:
        return self.vectors.shape[1]


def intra_coupling(dataset: CategoricalDataset, j: int) -> CouplingSpace:
    """Value-frequency space of attribute j: row(v) = [ |g(v)| / n_o ]."""
    counts = np.bincount(dataset.cells[:, j], minlength=dataset.value_counts[j])
    vectors = (counts / dataset.n_objects).reshape(-1, 1)
    return CouplingSpace(attr=j, kind="intra", vectors=vectors)


def inter_coupling(dataset: CategoricalDataset, j: int) -> CouplingSpace:
    """Conditional-probability space of attribute j against all other attributes.

    Row of value v holds p(v | w) = |g(v) ∩ g(w)| / |g(w)| for every value w
    of every attribute k != j, in column_key order.
    """
    if dataset.n_attributes < 2:
        raise DataError("inter coupling needs at least two attributes")
    n_vj = dataset.value_counts[j]
    blocks = []
    key: list[tuple[int, int]] = []
    for k in range(dataset.n_attributes):
        if k == j:
            continue
        n_vk = dataset.value_counts[k]
        joint = np.bincount(dataset.cells[:, j] * n_vk + dataset.cells[:, k], minlength=n_vj * n_vk)
        joint = joint.reshape(n_vj, n_vk).astype(np.float64)
        blocks.append(joint / joint.sum(axis=0))  # divide by |g(w)|, never zero
        key.extend((k, v) for v in range(n_vk))
    return CouplingSpace(attr=j, kind="inter", vectors=np.hstack(blocks), column_key=tuple(key))


def build_all(dataset: CategoricalDataset) -> tuple[CouplingSpace, ...]:
    """All coupling spaces: intra for every attribute, then inter for every attribute.

    Single-attribute datasets have no inter spaces (the conditioning value set
    is empty there).
    """
    spaces = [intra_coupling(dataset, j) for j in range(dataset.n_attributes)]
    if dataset.n_attributes >= 2:
        spaces.extend(inter_coupling(dataset, j) for j in range(dataset.n_attributes))
    return tuple(spaces)


def dump_csv(space: CouplingSpace, dataset: CategoricalDataset, path) -> None:
    """Debug dump: rows = values of the attribute, header = conditioning columns."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        if space.kind == "intra":
            header = ["value", "frequency"]
        else:
            header = ["value"] + [
                f"{dataset.attr_names[k]}={dataset.value_dicts[k][v]}" for k, v in space.column_key
            ]
        writer.writerow(header)
        for i in range(space.n_values):
            writer.writerow([dataset.value_dicts[space.attr][i]] + [repr(x) for x in space.vectors[i]])
