"""Model persistence, delimited matrix I/O, and out-of-sample transform.

The model file is versioned JSON holding everything needed to embed new data
with the training-time geometry: value dictionaries, coupling space vectors,
kernel bank tokens, learned weights, and the effective configuration.
"""

from __future__ import annotations

import gzip
import json
import os
import tempfile
from dataclasses import dataclass

import numpy as np

from .coupling import CouplingSpace
from .dataset import CategoricalDataset
from .errors import DataError
from .heterogeneity import HeterogeneityParams, vector_representation
from .kernels import KernelFunction, KernelStack, build_stack, parse_kernel_bank

MODEL_FORMAT = "catrep-model"
MODEL_VERSION = 1


@dataclass(frozen=True)
class ModelBundle:
    """A trained model: training geometry plus learned weights."""

    attr_names: tuple[str, ...]
    value_dicts: tuple[tuple[str, ...], ...]
    spaces: tuple[CouplingSpace, ...]
    funcs: tuple[KernelFunction, ...]
    weights: np.ndarray
    config: dict

    def stack_for(self, dataset: CategoricalDataset) -> KernelStack:
        """Kernel stack over `dataset` objects using the training coupling spaces."""
        return build_stack(self.spaces, self.funcs, dataset)

    def params_for(self, stack: KernelStack) -> HeterogeneityParams:
        return HeterogeneityParams(self.weights, stack.entry_sizes)


def _atomic_write(path, data: bytes) -> None:
    """Write via a temp file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-catrep-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_model(path, bundle: ModelBundle) -> None:
    document = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "config": bundle.config,
        "attr_names": list(bundle.attr_names),
        "value_dicts": [list(v) for v in bundle.value_dicts],
        "spaces": [
            {
                "attr": sp.attr,
                "kind": sp.kind,
                "vectors": [list(row) for row in sp.vectors],
                "column_key": [list(c) for c in sp.column_key] if sp.column_key else None,
            }
            for sp in bundle.spaces
        ],
        "kernel_bank": [f.token() for f in bundle.funcs],
        "weights": list(bundle.weights),
    }
    _atomic_write(path, json.dumps(document, sort_keys=True).encode("utf-8"))


def load_model(path) -> ModelBundle:
    with open(path, "r", encoding="utf-8") as fh:
        document = json.load(fh)
    if document.get("format") != MODEL_FORMAT:
        raise DataError(f"{path} is not a model file")
    if document.get("version") != MODEL_VERSION:
        raise DataError(f"unsupported model version {document.get('version')!r}")
    spaces = tuple(
        CouplingSpace(
            attr=sp["attr"],
            kind=sp["kind"],
            vectors=np.array(sp["vectors"], dtype=np.float64),
            column_key=tuple(tuple(c) for c in sp["column_key"]) if sp["column_key"] else None,
        )
        for sp in document["spaces"]
    )
    return ModelBundle(
        attr_names=tuple(document["attr_names"]),
        value_dicts=tuple(tuple(v) for v in document["value_dicts"]),
        spaces=spaces,
        funcs=parse_kernel_bank(document["kernel_bank"]),
        weights=np.array(document["weights"], dtype=np.float64),
        config=document["config"],
    )


def reindex_dataset(bundle: ModelBundle, dataset: CategoricalDataset) -> CategoricalDataset:
    """Map a dataset onto the model's value dictionaries; unseen values are rejected."""
    if dataset.attr_names != bundle.attr_names:
        raise DataError("dataset attributes do not match the model")
    index_of = [{v: i for i, v in enumerate(vd)} for vd in bundle.value_dicts]
    cells = np.empty_like(dataset.cells)
    for j in range(dataset.n_attributes):
        for v, name in enumerate(dataset.value_dicts[j]):
            idx = index_of[j].get(name)
            if idx is None:
                raise DataError(
                    f"value {name!r} of attribute {dataset.attr_names[j]!r} was not seen at fit time"
                )
            cells[dataset.cells[:, j] == v, j] = idx
    return CategoricalDataset(bundle.attr_names, bundle.value_dicts, cells, dataset.labels)


def transform(bundle: ModelBundle, dataset: CategoricalDataset) -> np.ndarray:
    """Embed a dataset with a trained model (training dictionaries reused)."""
    mapped = reindex_dataset(bundle, dataset)
    stack = bundle.stack_for(mapped)
    return vector_representation(stack, bundle.params_for(stack))


def write_matrix_csv(path, matrix: np.ndarray, header_comments=()) -> None:
    """Delimited matrix output, full float precision, optional gzip (.gz path)."""
    lines = [f"# {c}" for c in header_comments]
    lines.extend(",".join(repr(float(x)) for x in row) for row in np.atleast_2d(matrix))
    data = ("\n".join(lines) + "\n").encode("utf-8")
    if str(path).endswith(".gz"):
        data = gzip.compress(data, mtime=0)
    _atomic_write(path, data)


def read_matrix_csv(path) -> np.ndarray:
    """Read a matrix written by write_matrix_csv (comment lines skipped)."""
    opener = gzip.open if str(path).endswith(".gz") else open
    with opener(path, "rt", encoding="utf-8") as fh:
        rows = [
            [float(x) for x in line.strip().split(",")]
            for line in fh
            if line.strip() and not line.startswith("#")
        ]
    if not rows:
        raise DataError(f"no matrix rows in {path}")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise DataError(f"ragged matrix rows in {path}")
    return np.array(rows, dtype=np.float64)


def write_table_csv(path, header, rows, header_comments=()) -> None:
    """Small report tables (trace, curves, precision) with provenance comments."""
    buf = []
    for c in header_comments:
        buf.append(f"# {c}")
    buf.append(",".join(header))
    for row in rows:
        buf.append(",".join(repr(x) if isinstance(x, float) else str(x) for x in row))
    _atomic_write(path, ("\n".join(buf) + "\n").encode("utf-8"))


def write_key_values(path, mapping: dict, header_comments=()) -> None:
    buf = [f"# {c}" for c in header_comments]
    buf.extend(f"{k}={v}" for k, v in mapping.items())
    _atomic_write(path, ("\n".join(buf) + "\n").encode("utf-8"))
