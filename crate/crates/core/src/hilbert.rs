// Copyright 2026 The qwalk Authors
// SPDX-License-Identifier: Apache-2.0

//! State representations over the position ⊗ coin space.
//!
//! Modes are ordered position-major, coin-minor with `H` before `V`, so the
//! site `x` occupies indices `2 (x - min)` and `2 (x - min) + 1`.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// Elementwise Hermiticity tolerance.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Trace tolerance for freshly built states.
pub const TRACE_TOL: f64 = 1e-12;
/// Smallest eigenvalue allowed before a matrix is declared non-positive.
pub const PSD_TOL: f64 = 1e-10;
/// Slack for probabilities that leave `[0, 1]` by roundoff.
pub const PROB_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Coin {
    H,
    V,
}

impl Coin {
    pub const ALL: [Coin; 2] = [Coin::H, Coin::V];

    #[inline]
    pub fn offset(self) -> usize {
        match self {
            Coin::H => 0,
            Coin::V => 1,
        }
    }

    pub fn flipped(self) -> Coin {
        match self {
            Coin::H => Coin::V,
            Coin::V => Coin::H,
        }
    }
}

impl fmt::Display for Coin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Coin::H => "H",
            Coin::V => "V",
        })
    }
}

impl std::str::FromStr for Coin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "H" | "h" => Ok(Coin::H),
            "V" | "v" => Ok(Coin::V),
            other => Err(Error::InvalidConfig(format!("unknown coin value {other:?}, expected H or V"))),
        }
    }
}

/// A basis label `|x, c⟩` of the walker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mode {
    pub position: i64,
    pub coin: Coin,
}

impl Mode {
    pub fn new(position: i64, coin: Coin) -> Self {
        Mode { position, coin }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{}, {}⟩", self.position, self.coin)
    }
}

/// Closed interval of lattice sites `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LatticeBounds {
    min: i64,
    max: i64,
}

impl LatticeBounds {
    pub fn new(min: i64, max: i64) -> Result<Self> {
        if min > max {
            return Err(Error::InvalidConfig(format!("empty lattice [{min}, {max}]")));
        }
        Ok(LatticeBounds { min, max })
    }

    /// `[center - radius, center + radius]`.
    pub fn centered(center: i64, radius: usize) -> Self {
        let r = radius as i64;
        LatticeBounds { min: center - r, max: center + r }
    }

    pub fn min(&self) -> i64 {
        self.min
    }

    pub fn max(&self) -> i64 {
        self.max
    }

    pub fn sites(&self) -> usize {
        (self.max - self.min + 1) as usize
    }

    /// Hilbert-space dimension (two coin states per site).
    pub fn dim(&self) -> usize {
        2 * self.sites()
    }

    pub fn contains(&self, position: i64) -> bool {
        (self.min..=self.max).contains(&position)
    }

    pub fn mode_index(&self, mode: Mode) -> Result<usize> {
        if !self.contains(mode.position) {
            return Err(Error::OutOfBounds { position: mode.position, min: self.min, max: self.max });
        }
        Ok(2 * (mode.position - self.min) as usize + mode.coin.offset())
    }

    pub fn mode_at(&self, index: usize) -> Result<Mode> {
        if index >= self.dim() {
            return Err(Error::IndexOutOfRange { index, dim: self.dim() });
        }
        let coin = if index % 2 == 0 { Coin::H } else { Coin::V };
        Ok(Mode::new(self.min + (index / 2) as i64, coin))
    }

    pub fn modes(&self) -> impl Iterator<Item = Mode> + '_ {
        (self.min..=self.max).flat_map(|x| Coin::ALL.into_iter().map(move |c| Mode::new(x, c)))
    }

    /// Same interval moved by `k` sites.
    pub fn translated(&self, k: i64) -> Self {
        LatticeBounds { min: self.min + k, max: self.max + k }
    }
}

/// Complex amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: DVector<C64>,
}

impl PureState {
    /// Normalized state; fails if the squared norm differs from one by more than `1e-12`.
    pub fn new(amplitudes: DVector<C64>) -> Result<Self> {
        let n = amplitudes.norm_squared();
        if (n - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("squared norm {n} is not 1")));
        }
        Ok(PureState { amplitudes })
    }

    /// Lossy or otherwise unnormalized amplitudes.
    pub fn unnormalized(amplitudes: DVector<C64>) -> Self {
        PureState { amplitudes }
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
        let mut v = DVector::zeros(dim);
        v[index] = C64::new(1.0, 0.0);
        Ok(PureState { amplitudes: v })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> DVector<C64> {
        self.amplitudes
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    /// Squared magnitudes, not renormalized.
    pub fn intensities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix { entries: &self.amplitudes * self.amplitudes.adjoint() }
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: DMatrix<C64>,
}

impl DensityMatrix {
    /// Validated constructor (Hermitian, unit trace, PSD).
    pub fn new(entries: DMatrix<C64>) -> Result<Self> {
        let rho = DensityMatrix { entries };
        rho.validate(TRACE_TOL)?;
        Ok(rho)
    }

    /// Wraps a matrix without checks; used for lossy or intermediate results.
    pub fn unchecked(entries: DMatrix<C64>) -> Self {
        DensityMatrix { entries }
    }

    pub fn from_diagonal(populations: &[f64]) -> Result<Self> {
        let d = DVector::from_iterator(populations.len(), populations.iter().map(|&p| C64::new(p, 0.0)));
        DensityMatrix::new(DMatrix::from_diagonal(&d))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<C64> {
        self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    /// Real parts of the diagonal (the populations).
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.entries[(i, i)].re).collect()
    }

    /// Shared validator: Hermiticity within `1e-12`, trace within `trace_tol`,
    /// smallest eigenvalue at least `-1e-10`.
    pub fn validate(&self, trace_tol: f64) -> Result<()> {
        let m = &self.entries;
        if !m.is_square() {
            return Err(Error::InvalidState(format!("non-square {}x{} matrix", m.nrows(), m.ncols())));
        }
        let d = m.nrows();
        for i in 0..d {
            for j in i..d {
                let dev = (m[(i, j)] - m[(j, i)].conj()).norm();
                if dev > HERMITIAN_TOL {
                    return Err(Error::InvalidState(format!("not Hermitian at ({i}, {j}): deviation {dev:e}")));
                }
            }
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > trace_tol {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let min_eig = self.min_eigenvalue();
        if min_eig < -PSD_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:e}")));
        }
        Ok(())
    }

    pub fn min_eigenvalue(&self) -> f64 {
        if self.dim() == 0 {
            return 0.0;
        }
        // symmetrize first so roundoff asymmetry does not leak into the solver
        let h = (&self.entries + self.entries.adjoint()) * C64::new(0.5, 0.0);
        h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Normalized real weights over the modes of a lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityDistribution {
    bounds: LatticeBounds,
    probs: Vec<f64>,
}

impl ProbabilityDistribution {
    /// Entries must lie in `[-1e-12, 1 + 1e-12]` and are clamped to `[0, 1]`.
    pub fn new(bounds: LatticeBounds, values: Vec<f64>) -> Result<Self> {
        if values.len() != bounds.dim() {
            return Err(Error::DimensionMismatch { expected: bounds.dim(), found: values.len() });
        }
        let mut probs = values;
        for p in probs.iter_mut() {
            if !p.is_finite() || *p < -PROB_SLACK || *p > 1.0 + PROB_SLACK {
                return Err(Error::InvalidProbability(*p));
            }
            *p = p.clamp(0.0, 1.0);
        }
        Ok(ProbabilityDistribution { bounds, probs })
    }

    /// Divides by the total weight first.
    pub fn normalized(bounds: LatticeBounds, mut values: Vec<f64>) -> Result<Self> {
        let total: f64 = values.iter().sum();
        if !(total > 1e-12) {
            return Err(Error::DegenerateRenormalization(total));
        }
        values.iter_mut().for_each(|v| *v /= total);
        Self::new(bounds, values)
    }

    pub fn bounds(&self) -> LatticeBounds {
        self.bounds
    }

    pub fn values(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, mode: Mode) -> f64 {
        self.bounds.mode_index(mode).map(|i| self.probs[i]).unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Mode, f64)> + '_ {
        self.bounds.modes().zip(self.probs.iter().copied())
    }

    /// Nonzero entries only.
    pub fn support(&self) -> impl Iterator<Item = (Mode, f64)> + '_ {
        self.iter().filter(|(_, p)| *p > 0.0)
    }

    pub fn l1_distance(&self, other: &ProbabilityDistribution) -> f64 {
        self.probs.iter().zip(&other.probs).map(|(a, b)| (a - b).abs()).sum()
    }
}

/// Signed real values over the modes of a lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeTable {
    bounds: LatticeBounds,
    values: Vec<f64>,
}

impl ModeTable {
    pub fn new(bounds: LatticeBounds, values: Vec<f64>) -> Result<Self> {
        if values.len() != bounds.dim() {
            return Err(Error::DimensionMismatch { expected: bounds.dim(), found: values.len() });
        }
        Ok(ModeTable { bounds, values })
    }

    pub fn bounds(&self) -> LatticeBounds {
        self.bounds
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (Mode, f64)> + '_ {
        self.bounds.modes().zip(self.values.iter().copied())
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum()
    }
}

impl From<&ProbabilityDistribution> for ModeTable {
    fn from(p: &ProbabilityDistribution) -> Self {
        ModeTable { bounds: p.bounds, values: p.probs.clone() }
    }
}

/// Largest entry modulus.
pub fn max_abs<'a>(entries: impl IntoIterator<Item = &'a C64>) -> f64 {
    entries.into_iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Total dephasing map Δ: zeroes every off-diagonal entry.
pub fn total_dephasing(rho: &DensityMatrix) -> DensityMatrix {
    DensityMatrix { entries: dephase(&rho.entries) }
}

pub(crate) fn dephase(m: &DMatrix<C64>) -> DMatrix<C64> {
    let mut out = DMatrix::zeros(m.nrows(), m.ncols());
    for i in 0..m.nrows().min(m.ncols()) {
        out[(i, i)] = m[(i, i)];
    }
    out
}

/// Trace norm of a diagonal (possibly non-positive) matrix.
///
/// Only diagonal inputs are accepted; any off-diagonal entry above `1e-12`
/// is reported as [`Error::NotDiagonal`].
pub fn trace_norm_diagonal(m: &DMatrix<C64>) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
    }
    let d = m.nrows();
    let mut sum = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i == j {
                sum += m[(i, i)].norm();
            } else if m[(i, j)].norm() > HERMITIAN_TOL {
                return Err(Error::NotDiagonal { row: i, col: j, magnitude: m[(i, j)].norm() });
            }
        }
    }
    Ok(sum)
}

/// Convex combination `p ρ_a + (1 - p) ρ_b`.
pub fn mix(rho_a: &DensityMatrix, rho_b: &DensityMatrix, p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    if rho_a.dim() != rho_b.dim() {
        return Err(Error::DimensionMismatch { expected: rho_a.dim(), found: rho_b.dim() });
    }
    let m = &rho_a.entries * C64::new(p, 0.0) + &rho_b.entries * C64::new(1.0 - p, 0.0);
    Ok(DensityMatrix { entries: m })
}
