"""Sparse group restricted Boltzmann machines and two-layer DBMs."""

from sgrbm._core import (
    Dataset,
    GradientEstimate,
    Grouping,
    RbmParams,
    RegularizerConfig,
    RngStream,
    SgrbmError,
    TrainConfig,
    ais_log_partition,
    avg_test_log_prob,
    cd_gradient,
    energy,
    exact_log_partition,
    free_energies,
    free_energy,
    group_norms,
    hidden_probabilities,
    hoyer_sparseness,
    linear_probe,
    load_idx,
    load_idx_with_labels,
    load_rbm_checkpoint,
    mixed_norm_penalty,
    penalty_gradient,
    regularized_cd_gradient,
    representation_sparseness,
    save_idx_images,
    save_idx_labels,
    save_rbm_checkpoint,
    synthetic_digits,
    third_order_responsibility,
    train_rbm,
    visible_probabilities,
)

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "GradientEstimate",
    "Grouping",
    "RbmParams",
    "RegularizerConfig",
    "RngStream",
    "SgrbmError",
    "TrainConfig",
    "ais_log_partition",
    "avg_test_log_prob",
    "cd_gradient",
    "energy",
    "exact_log_partition",
    "free_energies",
    "free_energy",
    "group_norms",
    "hidden_probabilities",
    "hoyer_sparseness",
    "linear_probe",
    "load_idx",
    "load_idx_with_labels",
    "load_rbm_checkpoint",
    "mixed_norm_penalty",
    "penalty_gradient",
    "regularized_cd_gradient",
    "representation_sparseness",
    "save_idx_images",
    "save_idx_labels",
    "save_rbm_checkpoint",
    "synthetic_digits",
    "third_order_responsibility",
    "train_rbm",
    "visible_probabilities",
]
