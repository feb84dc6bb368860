# Copyright 2026 The velocomp Authors
# SPDX-License-Identifier: Apache-2.0

"""Flow-matching compositional zero-shot learning on precomputed embeddings."""

from velocomp._core import (
    CheckpointError,
    ConfigError,
    ContractError,
    DataError,
    Dataset,
    DomainError,
    Error,
    EvalReport,
    FormatError,
    IoError,
    NumericError,
    ProtocolError,
    RunConfig,
    ShapeError,
    SplitError,
    SyntheticConfig,
    bias_sweep,
    decode_dataset,
    evaluate,
    generate_synthetic,
    harmonic_mean,
    init_models,
    least_squares_coefficients,
    load_config,
    load_dataset,
    load_models,
    load_score_matrix,
    probe,
    save_dataset,
    save_score_matrix,
    train,
)

__all__ = [name for name in dir() if not name.startswith("_")]
