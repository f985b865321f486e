"""distinct: statistical distinguishability of embedding distributions.

Unbiased squared-MMD estimation, permutation hypothesis testing, power
analysis, robustness ablations, and an item-level nearest-neighbor
memorization audit, over labeled embedding tables.
"""

from .audit import AuditConfig, AuditReport, audit, calibrate_threshold, nn_similarity
from .errors import (
    DegenerateBandwidthError,
    DistinctError,
    GramBudgetExceeded,
    TableFormatError,
)
from .kernels import (
    KernelMatrix,
    KernelSpec,
    gram_matrix,
    kernel_value,
    median_heuristic_sigma,
    precompute_gram,
    resolve_sigma,
)
from .mmd import MmdEstimate, mmd_from_gram, mmd_squared_unbiased
from .permutation import TestConfig, TestResult, permutation_test, quantile
from .power import (
    BootstrapCi,
    MmdMatrix,
    PowerCurve,
    bootstrap_ci,
    mmd_matrix,
    rejection_rate_curve,
    threshold_sample_size,
)
from .robustness import (
    AblationReport,
    PerturbationSpec,
    ReducerSpec,
    StabilityReport,
    ablation_report,
    check_perturbation_bound,
    paired_perturbation_test,
    perturb,
    reduce,
    stability_analysis,
)
from .store import (
    EmbeddingRecord,
    EmbeddingTable,
    GroupedDataset,
    load_table,
    save_table,
    split_half,
    subsample,
)

__version__ = "0.1.0"
