// Copyright 2026 The qwalk Authors
// SPDX-License-Identifier: Apache-2.0

//! Second-quantized walk statistics for one photon, two photons and a
//! coherent state injected into the same input mode.
//!
//! The walk acts on creation operators as `a_0† → Σ_i A_i(N) a_i†`, where
//! `A_i(N)` are the single-photon amplitudes. Multi-photon states are built
//! by applying that transformed operator to the vacuum with the bosonic
//! `√(n + 1)` factors, so no many-body Hamiltonian is ever formed.

use std::collections::BTreeMap;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::hilbert::{Coin, LatticeBounds, Mode, PureState};
use crate::quantifiers::parity_allowed_modes;
use crate::walk::Evolve;
use crate::{StepOperator, C64};

/// Largest walk length accepted by [`two_photon_distribution`].
pub const MAX_TWO_PHOTON_STEPS: usize = 8;

/// Single-photon amplitudes `A_i(N)` over the `2 (N + 1)` modes a walk of
/// `N` steps from the origin can reach.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeProfile {
    modes: Vec<Mode>,
    amplitudes: DVector<C64>,
}

impl AmplitudeProfile {
    pub fn new(modes: Vec<Mode>, amplitudes: DVector<C64>) -> Result<Self> {
        if modes.len() != amplitudes.len() {
            return Err(Error::DimensionMismatch { expected: modes.len(), found: amplitudes.len() });
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!("amplitude profile has norm² {norm}")));
        }
        Ok(AmplitudeProfile { modes, amplitudes })
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// `|A_m|²` per mode.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// `Û^N a_0† |0⟩` for one photon entering at `(0, coin)`.
pub fn single_photon_amplitudes(theta_deg: f64, steps: usize, coin: Coin) -> Result<AmplitudeProfile> {
    let bounds = LatticeBounds::centered(0, steps);
    let op = StepOperator::new(theta_deg, bounds);
    let start = bounds.mode_index(Mode::new(0, coin))?;
    let psi = PureState::basis(bounds.dim(), start)?.evolve_with(&op, steps)?;
    let modes = parity_allowed_modes(bounds, 0, steps);
    let mut amps = Vec::with_capacity(modes.len());
    for m in &modes {
        amps.push(psi.amplitudes()[bounds.mode_index(*m)?]);
    }
    AmplitudeProfile::new(modes, DVector::from_vec(amps))
}

/// Occupation numbers over the modes of an [`AmplitudeProfile`].
type Occupation = Vec<u8>;

/// Finite superposition of Fock states.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FockState {
    terms: BTreeMap<Occupation, C64>,
}

impl FockState {
    pub fn vacuum(modes: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![0; modes], C64::new(1.0, 0.0));
        FockState { terms }
    }

    /// Applies `Σ_i c_i a_i†`.
    pub fn create(&self, coefficients: &DVector<C64>) -> Self {
        let mut terms: BTreeMap<Occupation, C64> = BTreeMap::new();
        for (occ, amp) in &self.terms {
            for (i, c) in coefficients.iter().enumerate() {
                if *c == C64::new(0.0, 0.0) {
                    continue;
                }
                let mut next = occ.clone();
                next[i] += 1;
                let factor = (next[i] as f64).sqrt();
                *terms.entry(next).or_default() += amp * c * factor;
            }
        }
        FockState { terms }
    }

    pub fn scale(mut self, s: f64) -> Self {
        self.terms.values_mut().for_each(|a| *a *= s);
        self
    }

    pub fn norm_squared(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u8], C64)> {
        self.terms.iter().map(|(o, a)| (o.as_slice(), *a))
    }

    /// `⟨n_m⟩` for every mode.
    pub fn mean_occupations(&self, modes: usize) -> Vec<f64> {
        let mut out = vec![0.0; modes];
        for (occ, amp) in &self.terms {
            let w = amp.norm_sqr();
            for (o, n) in out.iter_mut().zip(occ) {
                *o += w * f64::from(*n);
            }
        }
        out
    }
}

/// `(a_0†)^n / √(n!) |0⟩` after the walk, i.e. `(Σ_i A_i a_i†)^n / √(n!) |0⟩`.
pub fn evolved_fock_state(profile: &AmplitudeProfile, photons: usize) -> FockState {
    let mut state = FockState::vacuum(profile.len());
    let mut factorial = 1.0;
    for k in 1..=photons {
        state = state.create(profile.amplitudes());
        factorial *= k as f64;
    }
    state.scale(1.0 / factorial.sqrt())
}

/// Per-mode detection probability of one of two photons entering at
/// `(0, coin)`: `⟨n_m⟩ / 2`, so `|1_m, 1_j⟩` contributes half its weight and
/// `|2_m⟩` all of it.
pub fn two_photon_distribution(theta_deg: f64, steps: usize, coin: Coin) -> Result<Vec<f64>> {
    if steps > MAX_TWO_PHOTON_STEPS {
        return Err(Error::ResourceLimit { what: "two-photon walk length", value: steps, limit: MAX_TWO_PHOTON_STEPS });
    }
    let profile = single_photon_amplitudes(theta_deg, steps, coin)?;
    let state = evolved_fock_state(&profile, 2);
    let norm = state.norm_squared();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidState(format!("two-photon state has norm² {norm}")));
    }
    Ok(state.mean_occupations(profile.len()).into_iter().map(|n| n / 2.0).collect())
}

/// `|⟨1_m| Û^N |α⟩|²`-type weight `e^{−|α|²} |α|² |A_m(N)|²` per mode.
pub fn coherent_state_distribution(alpha: C64, theta_deg: f64, steps: usize, coin: Coin) -> Result<Vec<f64>> {
    let profile = single_photon_amplitudes(theta_deg, steps, coin)?;
    let a2 = alpha.norm_sqr();
    let prefactor = (-a2).exp() * a2;
    Ok(profile.probabilities().into_iter().map(|p| prefactor * p).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::{one_time_distribution, InitialCoin};
    use crate::WalkConfig;
    use proptest::prelude::*;

    #[test]
    fn zero_steps() {
        let p = single_photon_amplitudes(30.0, 0, Coin::V).unwrap();
        assert_eq!(p.modes(), &[Mode::new(0, Coin::H), Mode::new(0, Coin::V)]);
        assert_eq!(p.probabilities(), vec![0.0, 1.0]);
    }

    #[test]
    fn balanced_two_steps() {
        let p = single_photon_amplitudes(45.0, 2, Coin::H).unwrap();
        assert_eq!(p.len(), 6);
        let nonzero: Vec<f64> = p.probabilities().into_iter().filter(|q| *q > 1e-15).collect();
        assert_eq!(nonzero.len(), 4);
        assert!(nonzero.iter().all(|q| (q - 0.25).abs() < 1e-15));
    }

    #[test]
    fn matches_walk_distribution() {
        for coin in Coin::ALL {
            let cfg = WalkConfig::new(19.0, 5, 1, 0, InitialCoin::pure(coin)).unwrap();
            let walk = one_time_distribution(&cfg, 5).unwrap();
            let p = single_photon_amplitudes(19.0, 5, coin).unwrap();
            for (m, q) in p.modes().iter().zip(p.probabilities()) {
                assert!((walk.get(*m) - q).abs() < 1e-12);
            }
            let total: f64 = p.probabilities().iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn two_photon_state_structure() {
        let profile = single_photon_amplitudes(45.0, 1, Coin::H).unwrap();
        let state = evolved_fock_state(&profile, 2);
        let a = profile.amplitudes();
        let sqrt2 = std::f64::consts::SQRT_2;
        for (occ, amp) in state.terms() {
            let occupied: Vec<usize> = (0..occ.len()).filter(|&i| occ[i] > 0).collect();
            let expect = match occupied.as_slice() {
                [i] => a[*i] * a[*i],
                [i, k] => a[*i] * a[*k] * sqrt2,
                _ => unreachable!(),
            };
            assert!((amp - expect).norm() < 1e-15);
        }
        assert!((state.norm_squared() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_photon_ballistic() {
        let d = two_photon_distribution(0.0, 3, Coin::H).unwrap();
        let profile = single_photon_amplitudes(0.0, 3, Coin::H).unwrap();
        let idx = profile.modes().iter().position(|m| *m == Mode::new(3, Coin::H)).unwrap();
        assert!((d[idx] - 1.0).abs() < 1e-15);
        assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_photon_guard() {
        assert!(matches!(two_photon_distribution(45.0, 9, Coin::H), Err(Error::ResourceLimit { .. })));
    }

    #[test]
    fn coherent_examples() {
        let zero = coherent_state_distribution(C64::new(0.0, 0.0), 45.0, 3, Coin::V).unwrap();
        assert!(zero.iter().all(|w| *w == 0.0));
        let alpha = C64::new(0.6, -0.9);
        let w = coherent_state_distribution(alpha, 45.0, 3, Coin::V).unwrap();
        let total: f64 = w.iter().sum();
        let a2 = alpha.norm_sqr();
        assert!((total - (-a2).exp() * a2).abs() < 1e-14);
    }

    #[test]
    fn three_photon_intensity() {
        let profile = single_photon_amplitudes(31.0, 4, Coin::V).unwrap();
        let state = evolved_fock_state(&profile, 3);
        assert!((state.norm_squared() - 1.0).abs() < 1e-12);
        for (n, p) in state.mean_occupations(profile.len()).iter().zip(profile.probabilities()) {
            assert!((n / 3.0 - p).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn multiphoton_marginals_match_single_photon(theta in 0.0f64..90.0, n in 0usize..=6, h in any::<bool>()) {
            let coin = if h { Coin::H } else { Coin::V };
            let single = single_photon_amplitudes(theta, n, coin).unwrap().probabilities();
            let two = two_photon_distribution(theta, n, coin).unwrap();
            let coh = coherent_state_distribution(C64::new(1.3, 0.2), theta, n, coin).unwrap();
            let total: f64 = coh.iter().sum();
            for i in 0..single.len() {
                prop_assert!((two[i] - single[i]).abs() < 1e-12);
                prop_assert!((coh[i] / total - single[i]).abs() < 1e-12);
            }
        }
    }
}
