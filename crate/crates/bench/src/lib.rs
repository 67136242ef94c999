// Copyright 2026 The qwalk Authors
// SPDX-License-Identifier: Apache-2.0

//! Shared fixtures for the criterion benchmarks.

use qwalk_core::{InitialCoin, WalkConfig};

/// `N = 20`, `M = 10`, walker starting at the origin with coin `V`.
pub fn table_config(theta_deg: f64) -> WalkConfig {
    WalkConfig::new(theta_deg, 20, 10, 0, InitialCoin::V).expect("valid configuration")
}
