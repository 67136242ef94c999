// Copyright 2026 The qwalk Authors
// SPDX-License-Identifier: Apache-2.0

//! Non-classicality and coherence quantifiers of the walk.
//!
//! * `K` measures how much an intermediate position/coin measurement at step
//!   `M` changes the statistics at step `N` (violation of the Kolmogorov
//!   consistency conditions).
//! * `C` measures the coherence generated during the first `M` steps that is
//!   turned into populations by step `N`. It is computed twice: with the
//!   dephasing map acting on density matrices, and from one-time
//!   distributions alone.
//!
//! For unitary dynamics and initial states diagonal in the measured basis the
//! three numbers coincide. Each is evaluated through its own code path so the
//! equality is a real check: `K` projects the propagated density matrix,
//! `C_superop` dephases it, `C_prob` combines fresh pure-state walks.

use crate::error::{Error, Result};
use crate::hilbert::{
    dephase, trace_norm_diagonal, DensityMatrix, LatticeBounds, Mode, ModeTable, ProbabilityDistribution,
};
use crate::walk::{
    fresh_distribution, initial_density, one_time_distribution, one_time_distribution_density, project_and_evolve,
    Evolve, InitialCoin, StepOperator, WalkConfig, ZERO_PROBABILITY,
};

/// Tolerance of the `K = C` identity.
pub const IDENTITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantifierReport {
    pub theta_deg: f64,
    pub x0: i64,
    pub initial: InitialCoin,
    pub steps: usize,
    pub intermediate: usize,
    pub k: f64,
    pub c_superop: f64,
    pub c_prob: f64,
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn l1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

/// `Σ_{y,c'} P(x, c, N | y, c', M) P(y, c', M)` for every `(x, c)`.
///
/// Conditioning events with probability at most `1e-12` are skipped.
pub fn kolmogorov_combined(cfg: &WalkConfig) -> Result<ModeTable> {
    let op = cfg.step_operator();
    let bounds = cfg.bounds();
    let m = cfg.intermediate();
    let rho_m = initial_density(cfg).evolve_with(&op, m)?;
    let p_m = rho_m.diagonal();
    let mut acc = vec![0.0; bounds.dim()];
    for (idx, &w) in p_m.iter().enumerate() {
        if w <= ZERO_PROBABILITY {
            continue;
        }
        let mode = bounds.mode_at(idx)?;
        let cond = project_and_evolve(&rho_m, &op, mode, m, cfg.steps() - m)?;
        for (a, q) in acc.iter_mut().zip(cond.values()) {
            *a += q * w;
        }
    }
    ModeTable::new(bounds, acc)
}

/// Signed terms inside the absolute value of `K`, one per mode.
pub fn kolmogorov_terms(cfg: &WalkConfig) -> Result<ModeTable> {
    let combined = kolmogorov_combined(cfg)?;
    let p_n = one_time_distribution_density(cfg, cfg.steps())?;
    ModeTable::new(cfg.bounds(), sub(combined.values(), p_n.values()))
}

/// Degree of violation of the Kolmogorov consistency conditions.
pub fn kolmogorov_k(cfg: &WalkConfig) -> Result<f64> {
    Ok(kolmogorov_terms(cfg)?.l1_norm())
}

/// `‖(Δ ∘ 𝒰^{N-M} ∘ Δ ∘ 𝒰^M − Δ ∘ 𝒰^N) ρ0‖₁`.
pub fn coherence_c_superop(cfg: &WalkConfig) -> Result<f64> {
    coherence_superop_at(cfg, cfg.intermediate())
}

pub(crate) fn coherence_superop_at(cfg: &WalkConfig, m: usize) -> Result<f64> {
    let op = cfg.step_operator();
    let rho0 = initial_density(cfg);
    let rho_m = rho0.evolve_with(&op, m)?;
    let dephased = DensityMatrix::unchecked(dephase(rho_m.entries()));
    let measured = dephase(dephased.evolve_with(&op, cfg.steps() - m)?.entries());
    let unmeasured = dephase(rho0.evolve_with(&op, cfg.steps())?.entries());
    trace_norm_diagonal(&(measured - unmeasured))
}

/// `Σ_{y,c'} P_{y,c'}(x, c, remaining) P(y, c', M)` from fresh walks.
pub fn fresh_combination(op: &StepOperator, p_m: &ProbabilityDistribution, remaining: usize) -> Result<Vec<f64>> {
    let mut acc = vec![0.0; op.dim()];
    for (mode, w) in p_m.support() {
        let fresh = fresh_distribution(op, mode, remaining)?;
        for (a, q) in acc.iter_mut().zip(fresh.values()) {
            *a += q * w;
        }
    }
    Ok(acc)
}

/// Coherence quantifier evaluated from one-time distributions only.
pub fn coherence_c_prob(cfg: &WalkConfig) -> Result<f64> {
    Ok(l1(&coherence_terms(cfg, cfg.intermediate())?))
}

fn coherence_terms(cfg: &WalkConfig, m: usize) -> Result<Vec<f64>> {
    let op = cfg.step_operator();
    let p_m = one_time_distribution(cfg, m)?;
    let p_n = one_time_distribution(cfg, cfg.steps())?;
    let combined = fresh_combination(&op, &p_m, cfg.steps() - m)?;
    Ok(sub(&combined, p_n.values()))
}

/// Computes `K`, `C_superop` and `C_prob` and checks that they agree within
/// [`IDENTITY_TOL`]; a mismatch is reported as [`Error::IdentityViolation`].
pub fn verify_identity(cfg: &WalkConfig) -> Result<QuantifierReport> {
    let k = kolmogorov_k(cfg)?;
    let c_superop = coherence_c_superop(cfg)?;
    let c_prob = coherence_c_prob(cfg)?;
    if (k - c_prob).abs() > IDENTITY_TOL || (c_superop - c_prob).abs() > IDENTITY_TOL {
        return Err(Error::IdentityViolation { k, c_prob, c_superop });
    }
    Ok(QuantifierReport {
        theta_deg: cfg.theta_deg(),
        x0: cfg.x0(),
        initial: cfg.initial(),
        steps: cfg.steps(),
        intermediate: cfg.intermediate(),
        k,
        c_superop,
        c_prob,
    })
}

/// Modes reachable at step `m` from `x0`: `|y - x0| ≤ m` with matching
/// parity, both coins. There are `2 (m + 1)` of them.
pub fn parity_allowed_modes(bounds: LatticeBounds, x0: i64, m: usize) -> Vec<Mode> {
    let m = m as i64;
    bounds
        .modes()
        .filter(|md| {
            let dx = md.position - x0;
            dx.abs() <= m && (dx + m).rem_euclid(2) == 0
        })
        .collect()
}

/// `Σ_{y,c'} P_{y,c'}(x, c, N - M) / [2 (M + 1)]`: the final statistics when
/// the intermediate measurement leaves a flat ensemble over the
/// parity-allowed modes at step `M`.
pub fn randomizing_combined(cfg: &WalkConfig) -> Result<Vec<f64>> {
    let op = cfg.step_operator();
    let modes = parity_allowed_modes(cfg.bounds(), cfg.x0(), cfg.intermediate());
    let w = 1.0 / modes.len() as f64;
    let mut acc = vec![0.0; op.dim()];
    for mode in modes {
        let fresh = fresh_distribution(&op, mode, cfg.steps() - cfg.intermediate())?;
        for (a, q) in acc.iter_mut().zip(fresh.values()) {
            *a += q * w;
        }
    }
    Ok(acc)
}

/// `K` for a maximally randomizing intermediate measurement.
pub fn randomizing_k(cfg: &WalkConfig) -> Result<f64> {
    let combined = randomizing_combined(cfg)?;
    let p_n = one_time_distribution(cfg, cfg.steps())?;
    Ok(l1(&sub(&combined, p_n.values())))
}

/// The three panels behind a coherence visualisation at `M = N / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceTables {
    /// `P_{x0,p}(x, c, N)`.
    pub unmeasured: ProbabilityDistribution,
    /// `Σ_{y,c'} P_{y,c'}(x, c, N/2) P_{x0,p}(y, c', N/2)`.
    pub recombined: ProbabilityDistribution,
    /// `recombined − unmeasured`, signed.
    pub difference: ModeTable,
}

pub fn visualize_difference(cfg: &WalkConfig) -> Result<DifferenceTables> {
    if cfg.steps() % 2 != 0 {
        return Err(Error::InvalidConfig(format!(
            "difference tables need an even number of steps (M = N/2), got N = {}",
            cfg.steps()
        )));
    }
    let half = cfg.steps() / 2;
    let op = cfg.step_operator();
    let bounds = cfg.bounds();
    let unmeasured = one_time_distribution(cfg, cfg.steps())?;
    let p_half = one_time_distribution(cfg, half)?;
    let recombined = fresh_combination(&op, &p_half, half)?;
    let difference = ModeTable::new(bounds, sub(&recombined, unmeasured.values()))?;
    Ok(DifferenceTables { unmeasured, recombined: ProbabilityDistribution::new(bounds, recombined)?, difference })
}
