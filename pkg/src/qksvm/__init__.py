"""Quantum-kernel support vector machines for multispectral pixel data.

A small statevector simulator drives ZZ-map embeddings on a trainable
ansatz; state fidelities form SVM kernels whose target alignment is
maximized with SPSA; the SVM itself is an SMO solver over precomputed
kernels, benchmarked against an RBF baseline with Wilcoxon significance
testing.
"""

from .alignment import (
    AlignmentTrace,
    SpsaConfig,
    alignment_objective,
    frobenius_inner,
    ideal_kernel,
    spsa_maximize,
    target_alignment,
)
from .bench import (
    ExperimentConfig,
    ExperimentReport,
    SplitResult,
    run_experiment,
    run_split,
)
from .data import (
    PcaModel,
    PixelTable,
    PrincipalComponents,
    SplitSpec,
    UnitIntervalScaler,
    load_pixels,
    make_blob_table,
    patch_stats,
    sample_split,
    select_patches,
)
from .featuremap import (
    FeatureMapConfig,
    ansatz_circuit,
    embed,
    pair_phase,
    single_phase,
    zz_feature_map_circuit,
)
from .hybrid import QuantumKernelSVC
from .qkernel import cross_gram, gram_matrix, kernel_entry
from .statevector import (
    Circuit,
    Gate,
    StateVector,
    apply_circuit,
    apply_gate,
    fidelity,
    zero_state,
)
from .stats import WilcoxonResult, summarize, wilcoxon_signed_rank
from .svm import KernelSVC, accuracy, rbf_default_gamma, rbf_gram

__version__ = "0.1.0"

__all__ = [
    "AlignmentTrace",
    "Circuit",
    "ExperimentConfig",
    "ExperimentReport",
    "FeatureMapConfig",
    "Gate",
    "KernelSVC",
    "PcaModel",
    "PixelTable",
    "PrincipalComponents",
    "QuantumKernelSVC",
    "SplitResult",
    "SplitSpec",
    "SpsaConfig",
    "StateVector",
    "UnitIntervalScaler",
    "WilcoxonResult",
    "accuracy",
    "alignment_objective",
    "ansatz_circuit",
    "apply_circuit",
    "apply_gate",
    "cross_gram",
    "embed",
    "fidelity",
    "frobenius_inner",
    "gram_matrix",
    "ideal_kernel",
    "kernel_entry",
    "load_pixels",
    "make_blob_table",
    "pair_phase",
    "patch_stats",
    "rbf_default_gamma",
    "rbf_gram",
    "run_experiment",
    "run_split",
    "sample_split",
    "select_patches",
    "single_phase",
    "spsa_maximize",
    "summarize",
    "target_alignment",
    "wilcoxon_signed_rank",
    "zero_state",
    "zz_feature_map_circuit",
]
