"""Categorical dataset container, CSV I/O, description, and synthetic generation.

Every other module indexes objects, attributes, and values through the
containers defined here.  Values are kept verbatim as strings; each attribute
owns an ordered dictionary of its distinct values (first-appearance order) and
cells store indices into those dictionaries.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DataError

# Empty cells become this explicit per-attribute category.
MISSING_VALUE = "⟨missing⟩"


@dataclass(frozen=True)
class CategoricalDataset:
    """Immutable table of objects x categorical attributes.

    Attributes:
        attr_names: one name per attribute column.
        value_dicts: per attribute, the ordered tuple of its distinct values.
        cells: (n_o, n_a) integer array; cell (i, j) indexes value_dicts[j].
        labels: optional per-object class/cluster identifiers.  Held out of
            all representation learning; only evaluation reads them.
    """

    attr_names: tuple[str, ...]
    value_dicts: tuple[tuple[str, ...], ...]
    cells: np.ndarray
    labels: tuple | None = None

    def __post_init__(self):
        cells = np.asarray(self.cells, dtype=np.int64)
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)
        if cells.ndim != 2 or cells.shape[0] < 1 or cells.shape[1] < 1:
            raise DataError("dataset needs at least one object and one attribute")
        if len(self.attr_names) != cells.shape[1]:
            raise DataError("attr_names length does not match cell columns")
        if len(self.value_dicts) != cells.shape[1]:
            raise DataError("value_dicts length does not match cell columns")
        for j, values in enumerate(self.value_dicts):
            if len(values) == 0:
                raise DataError(f"attribute {self.attr_names[j]!r} has no values")
            if len(set(values)) != len(values):
                raise DataError(f"attribute {self.attr_names[j]!r} has duplicate dictionary values")
            col = cells[:, j]
            if col.min() < 0 or col.max() >= len(values):
                raise DataError(f"attribute {self.attr_names[j]!r} has out-of-range cell indices")
        if self.labels is not None and len(self.labels) != cells.shape[0]:
            raise DataError("labels length does not match object count")

    @property
    def n_objects(self) -> int:
        return self.cells.shape[0]

    @property
    def n_attributes(self) -> int:
        return self.cells.shape[1]

    @property
    def value_counts(self) -> tuple[int, ...]:
        """Number of distinct values per attribute."""
        return tuple(len(v) for v in self.value_dicts)

    @property
    def n_values(self) -> int:
        """Total distinct values across all attributes."""
        return sum(self.value_counts)

    @property
    def value_offsets(self) -> tuple[int, ...]:
        """Offset of each attribute's dictionary inside the concatenated value list."""
        offsets, total = [], 0
        for c in self.value_counts:
            offsets.append(total)
            total += c
        return tuple(offsets)

    def objects_with_value(self, j: int, value_index: int) -> np.ndarray:
        """Indices of objects holding the given value in attribute j."""
        return np.flatnonzero(self.cells[:, j] == value_index)

    def without_labels(self) -> "CategoricalDataset":
        return CategoricalDataset(self.attr_names, self.value_dicts, self.cells, None)


@dataclass(frozen=True)
class DataFactors:
    """Summary factors of a dataset: sizes, class count, value-count statistics."""

    n_objects: int
    n_attributes: int
    n_classes: int
    avg_values: float
    max_values: int

    def __post_init__(self):
        if self.max_values < self.avg_values or self.avg_values < 1:
            raise DataError("inconsistent value-count factors")

    def as_key_values(self) -> str:
        return (
            f"n_o={self.n_objects}\nn_a={self.n_attributes}\nn_c={self.n_classes}\n"
            f"n_av={self.avg_values:g}\nn_mv={self.max_values}\n"
        )


def load_csv(path, has_header: bool = True, label_column: str | int | None = None) -> CategoricalDataset:
    """Load a categorical dataset from an RFC 4180 CSV file.

    Every column is treated as categorical verbatim (no numeric coercion).
    Empty cells become the MISSING_VALUE category of their attribute.

    Args:
        path: file to read, UTF-8.
        has_header: first row holds column names.
        label_column: optional column (name if has_header, else 0-based index)
            removed from the attributes and stored as labels.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = [row for row in csv.reader(fh)]
    if not rows:
        raise DataError(f"empty CSV file: {path}")

    if has_header:
        header, data_rows, first_row_no = rows[0], rows[1:], 2
    else:
        header = [f"a{j}" for j in range(len(rows[0]))]
        data_rows, first_row_no = rows, 1
    if not data_rows:
        raise DataError(f"CSV file has a header but no data rows: {path}")

    width = len(header)
    for offset, row in enumerate(data_rows):
        if len(row) != width:
            raise DataError(f"ragged CSV row {first_row_no + offset}: expected {width} fields, got {len(row)}")

    label_idx: int | None = None
    if label_column is not None:
        if isinstance(label_column, int):
            label_idx = label_column
            if not 0 <= label_idx < width:
                raise DataError(f"label column index {label_column} out of range")
        else:
            if label_column not in header:
                raise DataError(f"unknown label column {label_column!r}")
            label_idx = header.index(label_column)
    if width - (label_idx is not None) < 1:
        raise DataError("dataset needs at least one non-label column")

    attr_cols = [j for j in range(width) if j != label_idx]
    attr_names = tuple(header[j] for j in attr_cols)
    labels = tuple(row[label_idx] for row in data_rows) if label_idx is not None else None

    value_dicts: list[list[str]] = [[] for _ in attr_cols]
    index_of: list[dict[str, int]] = [{} for _ in attr_cols]
    cells = np.empty((len(data_rows), len(attr_cols)), dtype=np.int64)
    for i, row in enumerate(data_rows):
        for a, j in enumerate(attr_cols):
            value = row[j] if row[j] != "" else MISSING_VALUE
            idx = index_of[a].get(value)
            if idx is None:
                idx = len(value_dicts[a])
                value_dicts[a].append(value)
                index_of[a][value] = idx
            cells[i, a] = idx

    return CategoricalDataset(attr_names, tuple(tuple(v) for v in value_dicts), cells, labels)


def save_csv(dataset: CategoricalDataset, path, label_name: str = "label") -> None:
    """Write a dataset back to CSV (header included; labels as a last column)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        header = list(dataset.attr_names) + ([label_name] if dataset.labels is not None else [])
        writer.writerow(header)
        for i in range(dataset.n_objects):
            row = [dataset.value_dicts[j][dataset.cells[i, j]] for j in range(dataset.n_attributes)]
            if dataset.labels is not None:
                row.append(str(dataset.labels[i]))
            writer.writerow(row)


def describe(dataset: CategoricalDataset) -> DataFactors:
    """Exact data factors: object/attribute/class counts and value-count stats."""
    counts = dataset.value_counts
    n_classes = len(set(dataset.labels)) if dataset.labels is not None else 0
    return DataFactors(
        n_objects=dataset.n_objects,
        n_attributes=dataset.n_attributes,
        n_classes=n_classes,
        avg_values=float(np.mean(counts)),
        max_values=int(max(counts)),
    )


def synth_generate(
    n_objects: int,
    n_attributes: int,
    max_values: int,
    n_clusters: int,
    separation: float,
    seed: int,
) -> CategoricalDataset:
    """Generate a labeled synthetic categorical dataset, deterministic per seed.

    Objects are assigned to clusters round-robin.  Each cluster holds one
    preferred value per attribute; a cell takes the preferred value with
    probability `separation` and a uniform draw over the attribute's values
    otherwise.  Every dictionary value is forced to appear at least once.
    """
    if n_objects < 1 or n_attributes < 1 or max_values < 1 or n_clusters < 1:
        raise ConfigError("synthetic data counts must be positive")
    if n_clusters > n_objects:
        raise ConfigError("n_clusters cannot exceed n_objects")
    if not 0.0 <= separation <= 1.0:
        raise ConfigError("separation must lie in [0, 1]")

    rng = np.random.default_rng(seed)
    n_values = min(max_values, n_objects)
    labels = np.arange(n_objects) % n_clusters

    # Preferred values are spread by a per-attribute offset so that distinct
    # clusters keep distinct preferences whenever n_clusters <= n_values.
    offsets = rng.integers(0, n_values, size=n_attributes)
    preferred = (labels[:, None] + offsets[None, :]) % n_values
    uniform = rng.integers(0, n_values, size=(n_objects, n_attributes))
    take_preferred = rng.random((n_objects, n_attributes)) < separation
    cells = np.where(take_preferred, preferred, uniform)

    # Force unseen dictionary values into rows whose current value occurs
    # at least twice (always possible since n_values <= n_objects).
    for j in range(n_attributes):
        counts = np.bincount(cells[:, j], minlength=n_values)
        for v in np.flatnonzero(counts == 0):
            for r in rng.permutation(n_objects):
                if counts[cells[r, j]] >= 2:
                    counts[cells[r, j]] -= 1
                    cells[r, j] = v
                    counts[v] += 1
                    break

    attr_names = tuple(f"a{j}" for j in range(n_attributes))
    value_dicts = tuple(tuple(f"v{v}" for v in range(n_values)) for _ in range(n_attributes))
    return CategoricalDataset(attr_names, value_dicts, cells, tuple(int(c) for c in labels))
