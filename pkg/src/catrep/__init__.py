"""Unsupervised similarity and vector representations for categorical data.

The pipeline embeds attribute values through intra-/inter-attribute coupling
statistics, transforms each coupling space with a bank of kernels, and learns
nonnegative per-value kernel weights against a relaxed kernel k-means
objective.  The outputs are a PSD object similarity matrix S and an explicit
embedding X with S = X X^T.
"""

from .dataset import (
    MISSING_VALUE,
    CategoricalDataset,
    DataFactors,
    describe,
    load_csv,
    save_csv,
    synth_generate,
)
from .coupling import CouplingSpace, build_all, inter_coupling, intra_coupling
from .errors import CatrepError, ConfigError, DataError, NumericError
from .evaluation import (
    ClusterAssignment,
    EvalReport,
    coupling_matrix,
    f_score,
    goodness_curve,
    inter_indicator,
    intra_indicator,
    kmeans,
    kmodes,
    precision_at_k,
)
from .heterogeneity import (
    HeterogeneityParams,
    Representation,
    object_similarity,
    similarity_matrix,
    vector_representation,
)
from .kernels import (
    DEFAULT_KERNEL_TOKENS,
    KernelFunction,
    KernelStack,
    build_kernel_matrix,
    build_stack,
    default_kernel_bank,
    kernel_eval,
    parse_kernel_bank,
)
from .persist import ModelBundle, load_model, read_matrix_csv, save_model, transform, write_matrix_csv
from .solver import (
    AdamState,
    FitConfig,
    FitTrace,
    fit,
    h_step,
    loss,
    omega_gradient,
    omega_step,
    project_weights,
)

__version__ = "0.1.0"

__all__ = [
    "MISSING_VALUE",
    "CategoricalDataset",
    "DataFactors",
    "describe",
    "load_csv",
    "save_csv",
    "synth_generate",
    "CouplingSpace",
    "build_all",
    "inter_coupling",
    "intra_coupling",
    "CatrepError",
    "ConfigError",
    "DataError",
    "NumericError",
    "ClusterAssignment",
    "EvalReport",
    "coupling_matrix",
    "f_score",
    "goodness_curve",
    "inter_indicator",
    "intra_indicator",
    "kmeans",
    "kmodes",
    "precision_at_k",
    "HeterogeneityParams",
    "Representation",
    "object_similarity",
    "similarity_matrix",
    "vector_representation",
    "DEFAULT_KERNEL_TOKENS",
    "KernelFunction",
    "KernelStack",
    "build_kernel_matrix",
    "build_stack",
    "default_kernel_bank",
    "kernel_eval",
    "parse_kernel_bank",
    "ModelBundle",
    "load_model",
    "read_matrix_csv",
    "save_model",
    "transform",
    "write_matrix_csv",
    "AdamState",
    "FitConfig",
    "FitTrace",
    "fit",
    "h_step",
    "loss",
    "omega_gradient",
    "omega_step",
    "project_weights",
]
