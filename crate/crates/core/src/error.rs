// Copyright 2026 The qwalk Authors
// SPDX-License-Identifier: Apache-2.0

use crate::hilbert::Coin;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("position {position} outside lattice bounds [{min}, {max}]")]
    OutOfBounds { position: i64, min: i64, max: i64 },

    #[error("mode index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not diagonal: |entry ({row}, {col})| = {magnitude:e}")]
    NotDiagonal { row: usize, col: usize, magnitude: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid walk configuration: {0}")]
    InvalidConfig(String),

    #[error("walker reached the lattice edge at position {position} ({coin}); lattice too small")]
    LatticeExceeded { position: i64, coin: Coin },

    #[error("requested {requested} steps but the configuration allows at most {max}")]
    TooManySteps { requested: usize, max: usize },

    #[error("conditioning event ({position}, {coin}) at step {step} has zero probability")]
    ZeroProbabilityCondition { position: i64, coin: Coin, step: usize },

    #[error("K = C violated: K = {k}, C_prob = {c_prob}, C_superop = {c_superop}")]
    IdentityViolation { k: f64, c_prob: f64, c_superop: f64 },

    #[error("total surviving intensity {0:e} too small to renormalize")]
    DegenerateRenormalization(f64),

    #[error("negative propagation time {0}")]
    NegativeTime(f64),

    #[error("intermediate time {s} exceeds final time {t}")]
    InvalidTimes { s: f64, t: f64 },

    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    #[error("observable is degenerate: label {0:?} repeated")]
    DegenerateObservable(String),

    #[error("{what} = {value} exceeds the supported limit {limit}")]
    ResourceLimit { what: &'static str, value: usize, limit: usize },

    #[error("invalid perturbation spec: {0}")]
    InvalidSpec(String),
}
