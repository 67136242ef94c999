// Copyright 2026 The qwalk Authors
// SPDX-License-Identifier: Apache-2.0

//! Multi-time measurement statistics of discrete-time quantum walks.
//!
//! The crate computes one-time and conditional position/coin distributions of
//! a walk on a line, the Kolmogorov-violation quantifier `K`, the
//! generated-and-detected coherence quantifier `C` (in superoperator and
//! probability form), and checks that the two coincide. The same machinery is
//! generalised to finite-dimensional Lindblad dynamics in [`lindblad`].
//!
//! Supporting modules cover second-quantized photon statistics ([`fock`]) and
//! Monte-Carlo error bars under parameter jitter and lossy, imperfect
//! intermediate measurements ([`montecarlo`]).

pub mod error;
pub mod fock;
pub mod hilbert;
pub mod lindblad;
pub mod montecarlo;
pub mod quantifiers;
pub mod walk;

pub use error::{Error, Result};
pub use hilbert::{Coin, DensityMatrix, LatticeBounds, Mode, ModeTable, ProbabilityDistribution, PureState};
pub use quantifiers::QuantifierReport;
pub use walk::{InitialCoin, StepOperator, WalkConfig};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
