// Copyright 2026 The qwalk Authors
// SPDX-License-Identifier: Apache-2.0

//! Lossy walks, imperfect intermediate measurements, and Monte-Carlo error
//! bars for `K` and `C` under parameter jitter.
//!
//! Loss is modelled per shift branch: each step multiplies the H branch by
//! `√η_H` and the V branch by `√η_V`, and every reported distribution is
//! renormalized. Equal transmissions therefore cancel exactly.
//!
//! An imperfect intermediate measurement leaves a residual fraction `ε` of
//! the light in the walk. Two residual models are available, see
//! [`ResidualModel`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{Coin, DensityMatrix, LatticeBounds, Mode, ProbabilityDistribution, PureState};
use crate::quantifiers::parity_allowed_modes;
use crate::walk::{initial_density, initial_pure, Evolve, StepOperator, WalkConfig, ZERO_PROBABILITY};
use crate::C64;

/// Smallest total intensity that is still renormalized.
pub const MIN_SURVIVING_INTENSITY: f64 = 1e-12;

/// What an imperfect out-coupling leaves behind besides the detected mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResidualModel {
    /// `(1 − ε) |y, c'⟩⟨y, c'| + ε · flat mixture over the modes reachable at
    /// step `M`. Interpolates between the ideal and the randomizing
    /// measurement.
    #[default]
    Randomizing,
    /// Field-level residual: amplitude 1 on `|y, c'⟩` and `√ε` on every other
    /// mode, applied to the state at step `M`. `ε = 1` is no measurement.
    Coherent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossModel {
    pub eta_h: f64,
    pub eta_v: f64,
    pub residual: f64,
    #[serde(default)]
    pub residual_model: ResidualModel,
}

impl Default for LossModel {
    fn default() -> Self {
        LossModel::ideal()
    }
}

impl LossModel {
    pub fn new(eta_h: f64, eta_v: f64, residual: f64, residual_model: ResidualModel) -> Result<Self> {
        let m = LossModel { eta_h, eta_v, residual, residual_model };
        m.validate()?;
        Ok(m)
    }

    pub fn ideal() -> Self {
        LossModel { eta_h: 1.0, eta_v: 1.0, residual: 0.0, residual_model: ResidualModel::default() }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, eta) in [("eta_h", self.eta_h), ("eta_v", self.eta_v)] {
            if !(eta > 0.0 && eta <= 1.0) {
                return Err(Error::InvalidConfig(format!("{name} = {eta} outside (0, 1]")));
            }
        }
        if !(self.residual >= 0.0 && self.residual < 1.0) {
            // ε = 1 is allowed for the coherent model, where it means no measurement
            let coherent_one = self.residual == 1.0 && self.residual_model == ResidualModel::Coherent;
            if !coherent_one {
                return Err(Error::InvalidConfig(format!("residual transmission {} outside [0, 1)", self.residual)));
            }
        }
        Ok(())
    }

    fn step_operator(&self, cfg: &WalkConfig) -> StepOperator {
        StepOperator::lossy(cfg.theta_deg(), cfg.bounds(), self.eta_h, self.eta_v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JitterShape {
    /// Jitter values are standard deviations.
    #[default]
    Gaussian,
    /// Jitter values are half-widths of a uniform interval.
    Uniform,
}

/// Parameter uncertainties for [`sample_quantifiers`].
///
/// `theta_jitter` is in degrees, `coupling_jitter` is relative to the
/// nominal transmissions, `extinction_jitter` is in units of `ε`. Perturbed
/// transmissions are clamped to `(0, 1]` and `ε` to `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PerturbationSpec {
    pub theta_jitter: f64,
    pub coupling_jitter: f64,
    pub extinction_jitter: f64,
    pub samples: usize,
    pub seed: u64,
    pub distribution: JitterShape,
}

impl Default for PerturbationSpec {
    fn default() -> Self {
        PerturbationSpec {
            theta_jitter: 0.5,
            coupling_jitter: 0.02,
            extinction_jitter: 0.02,
            samples: 1000,
            seed: 0,
            distribution: JitterShape::default(),
        }
    }
}

impl PerturbationSpec {
    /// Same sampling, no perturbation.
    pub fn without_jitter(self) -> Self {
        PerturbationSpec { theta_jitter: 0.0, coupling_jitter: 0.0, extinction_jitter: 0.0, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, j) in [
            ("theta_jitter", self.theta_jitter),
            ("coupling_jitter", self.coupling_jitter),
            ("extinction_jitter", self.extinction_jitter),
        ] {
            if !(j >= 0.0) || !j.is_finite() {
                return Err(Error::InvalidSpec(format!("{name} = {j} must be a finite nonnegative number")));
            }
        }
        if self.samples == 0 {
            return Err(Error::InvalidSpec("samples must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub index: usize,
    pub theta_deg: f64,
    pub eta_h: f64,
    pub eta_v: f64,
    pub residual: f64,
    pub k: f64,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBars {
    pub mean_k: f64,
    pub std_k: f64,
    pub mean_c: f64,
    pub std_c: f64,
    pub samples: Vec<SampleRecord>,
}

fn normalize(bounds: LatticeBounds, intensities: Vec<f64>) -> Result<ProbabilityDistribution> {
    let total: f64 = intensities.iter().sum();
    if !(total >= MIN_SURVIVING_INTENSITY) {
        return Err(Error::DegenerateRenormalization(total));
    }
    ProbabilityDistribution::new(bounds, intensities.into_iter().map(|i| i / total).collect())
}

fn lossy_intensities(cfg: &WalkConfig, op: &StepOperator, steps: usize) -> Result<Vec<f64>> {
    if steps > cfg.steps() {
        return Err(Error::TooManySteps { requested: steps, max: cfg.steps() });
    }
    let mut acc = vec![0.0; op.dim()];
    for (coin, w) in cfg.initial().components() {
        let psi = initial_pure(cfg, coin).evolve_with(op, steps)?;
        for (a, i) in acc.iter_mut().zip(psi.intensities()) {
            *a += w * i;
        }
    }
    Ok(acc)
}

/// Normalized position/coin distribution after `steps` lossy steps.
pub fn lossy_one_time_distribution(cfg: &WalkConfig, loss: &LossModel, steps: usize) -> Result<ProbabilityDistribution> {
    loss.validate()?;
    let op = loss.step_operator(cfg);
    normalize(cfg.bounds(), lossy_intensities(cfg, &op, steps)?)
}

fn unnormalized_fresh(op: &StepOperator, mode: Mode, steps: usize) -> Result<Vec<f64>> {
    let b = op.bounds();
    let psi = PureState::basis(b.dim(), b.mode_index(mode)?)?.evolve_with(op, steps)?;
    Ok(psi.intensities())
}

/// Everything that does not depend on the conditioning mode.
struct ImperfectContext {
    op: StepOperator,
    rho_m: DensityMatrix,
    p_m: ProbabilityDistribution,
    // evolved flat mixture over the modes reachable at step M, unnormalized
    flat_tail: Vec<f64>,
    remaining: usize,
}

impl ImperfectContext {
    fn new(cfg: &WalkConfig, loss: &LossModel) -> Result<Self> {
        loss.validate()?;
        let op = loss.step_operator(cfg);
        let rho_m = initial_density(cfg).evolve_with(&op, cfg.intermediate())?;
        let p_m = normalize(cfg.bounds(), rho_m.diagonal())?;
        let remaining = cfg.steps() - cfg.intermediate();
        let mut flat_tail = vec![0.0; op.dim()];
        if loss.residual > 0.0 && loss.residual_model == ResidualModel::Randomizing {
            let modes = parity_allowed_modes(cfg.bounds(), cfg.x0(), cfg.intermediate());
            let w = 1.0 / modes.len() as f64;
            for mode in modes {
                for (a, i) in flat_tail.iter_mut().zip(unnormalized_fresh(&op, mode, remaining)?) {
                    *a += w * i;
                }
            }
        }
        Ok(ImperfectContext { op, rho_m, p_m, flat_tail, remaining })
    }

    fn conditional(&self, loss: &LossModel, mode: Mode, step: usize) -> Result<ProbabilityDistribution> {
        let b = self.op.bounds();
        let idx = b.mode_index(mode)?;
        if self.p_m.values()[idx] <= ZERO_PROBABILITY {
            return Err(Error::ZeroProbabilityCondition { position: mode.position, coin: mode.coin, step });
        }
        let eps = loss.residual;
        match loss.residual_model {
            ResidualModel::Randomizing => {
                let own = unnormalized_fresh(&self.op, mode, self.remaining)?;
                let mixed = own.iter().zip(&self.flat_tail).map(|(g, f)| (1.0 - eps) * g + eps * f).collect();
                normalize(b, mixed)
            }
            ResidualModel::Coherent => {
                // A ρ A† with A = |y⟩⟨y| + √ε (1 − |y⟩⟨y|)
                let s = eps.sqrt();
                let mut rho = self.rho_m.entries().clone();
                for i in 0..b.dim() {
                    for j in 0..b.dim() {
                        let fi = if i == idx { 1.0 } else { s };
                        let fj = if j == idx { 1.0 } else { s };
                        rho[(i, j)] *= C64::new(fi * fj, 0.0);
                    }
                }
                let out = DensityMatrix::unchecked(rho).evolve_with(&self.op, self.remaining)?;
                normalize(b, out.diagonal())
            }
        }
    }
}

/// `P(x, c, N | y, c', M)` for a lossy walk whose intermediate measurement
/// leaves a residual fraction `ε` behind.
pub fn imperfect_conditional_distribution(
    cfg: &WalkConfig,
    loss: &LossModel,
    y: i64,
    coin: Coin,
) -> Result<ProbabilityDistribution> {
    ImperfectContext::new(cfg, loss)?.conditional(loss, Mode::new(y, coin), cfg.intermediate())
}

/// `K` of the lossy walk with imperfect intermediate measurement.
pub fn imperfect_k(cfg: &WalkConfig, loss: &LossModel) -> Result<f64> {
    let ctx = ImperfectContext::new(cfg, loss)?;
    let mut combined = vec![0.0; ctx.op.dim()];
    for (mode, p) in ctx.p_m.iter() {
        if p <= ZERO_PROBABILITY {
            continue;
        }
        let cond = ctx.conditional(loss, mode, cfg.intermediate())?;
        for (a, q) in combined.iter_mut().zip(cond.values()) {
            *a += p * q;
        }
    }
    let p_n = normalize(cfg.bounds(), lossy_intensities(cfg, &ctx.op, cfg.steps())?)?;
    Ok(combined.iter().zip(p_n.values()).map(|(a, b)| (a - b).abs()).sum())
}

/// `C` of the lossy walk, from normalized one-time distributions only: fresh
/// lossy walks from every mode occupied at step `M`, weighted by the
/// step-`M` distribution.
pub fn lossy_c(cfg: &WalkConfig, loss: &LossModel) -> Result<f64> {
    loss.validate()?;
    let op = loss.step_operator(cfg);
    let remaining = cfg.steps() - cfg.intermediate();
    let p_m = normalize(cfg.bounds(), lossy_intensities(cfg, &op, cfg.intermediate())?)?;
    let p_n = normalize(cfg.bounds(), lossy_intensities(cfg, &op, cfg.steps())?)?;
    let mut combined = vec![0.0; op.dim()];
    for (mode, p) in p_m.support() {
        let fresh = normalize(cfg.bounds(), unnormalized_fresh(&op, mode, remaining)?)?;
        for (a, q) in combined.iter_mut().zip(fresh.values()) {
            *a += p * q;
        }
    }
    Ok(combined.iter().zip(p_n.values()).map(|(a, b)| (a - b).abs()).sum())
}

fn draw<R: Rng>(rng: &mut R, shape: JitterShape) -> f64 {
    match shape {
        JitterShape::Gaussian => rng.sample(StandardNormal),
        JitterShape::Uniform => rng.random_range(-1.0..=1.0),
    }
}

fn perturbed(cfg: &WalkConfig, nominal: &LossModel, spec: &PerturbationSpec, index: usize) -> (WalkConfig, LossModel) {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(index as u64);
    let shape = spec.distribution;
    let theta = cfg.theta_deg() + spec.theta_jitter * draw(&mut rng, shape);
    let eta_h = (nominal.eta_h * (1.0 + spec.coupling_jitter * draw(&mut rng, shape))).clamp(1e-9, 1.0);
    let eta_v = (nominal.eta_v * (1.0 + spec.coupling_jitter * draw(&mut rng, shape))).clamp(1e-9, 1.0);
    let upper = if nominal.residual_model == ResidualModel::Coherent { 1.0 } else { 1.0 - 1e-9 };
    let residual = (nominal.residual + spec.extinction_jitter * draw(&mut rng, shape)).clamp(0.0, upper);
    (
        cfg.with_theta(theta),
        LossModel { eta_h, eta_v, residual, residual_model: nominal.residual_model },
    )
}

fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    // shifted by the first value so identical samples give exactly zero spread
    let mut it = values.clone();
    let Some(first) = it.next() else { return (f64::NAN, f64::NAN) };
    let n = values.clone().count() as f64;
    let shift = values.clone().map(|v| v - first).sum::<f64>() / n;
    let var = values.map(|v| (v - first - shift).powi(2)).sum::<f64>() / n;
    (first + shift, var.sqrt())
}

/// Monte-Carlo error bars around the ideal walk. See
/// [`sample_quantifiers_with`].
pub fn sample_quantifiers(cfg: &WalkConfig, spec: &PerturbationSpec) -> Result<ErrorBars> {
    sample_quantifiers_with(cfg, &LossModel::ideal(), spec)
}

/// Draws `spec.samples` perturbed instances of `(cfg, nominal)`, computes
/// [`imperfect_k`] and [`lossy_c`] (which ignores `ε`) for each, and returns
/// the means and population standard deviations.
///
/// Sample `i` uses its own ChaCha stream `i` of `spec.seed`, so the result
/// does not depend on evaluation order or thread count.
pub fn sample_quantifiers_with(cfg: &WalkConfig, nominal: &LossModel, spec: &PerturbationSpec) -> Result<ErrorBars> {
    spec.validate()?;
    nominal.validate()?;
    let samples = (0..spec.samples)
        .into_par_iter()
        .map(|index| {
            let (c, loss) = perturbed(cfg, nominal, spec, index);
            Ok(SampleRecord {
                index,
                theta_deg: c.theta_deg(),
                eta_h: loss.eta_h,
                eta_v: loss.eta_v,
                residual: loss.residual,
                k: imperfect_k(&c, &loss)?,
                c: lossy_c(&c, &loss)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let (mean_k, std_k) = mean_std(samples.iter().map(|s| s.k));
    let (mean_c, std_c) = mean_std(samples.iter().map(|s| s.c));
    Ok(ErrorBars { mean_k, std_k, mean_c, std_c, samples })
}
