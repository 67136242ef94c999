// Copyright 2026 The qwalk Authors
// SPDX-License-Identifier: Apache-2.0

//! Discrete-time walk on a line: coin, shift and step operators, and the
//! one-time and conditional distributions of position and coin.
//!
//! The lattice is `[x0 - N, x0 + N]`, which a valid configuration never
//! leaves. The structured [`StepOperator`] refuses to shift amplitude past
//! the edge instead of wrapping or truncating it.

use std::fmt;

use nalgebra::{DMatrix, DVector, Matrix2};

use crate::error::{Error, Result};
use crate::hilbert::{mix, Coin, DensityMatrix, LatticeBounds, Mode, ProbabilityDistribution, PureState};
use crate::C64;

/// Conditioning events at or below this probability are treated as impossible.
pub const ZERO_PROBABILITY: f64 = 1e-12;

/// Initial coin of the walker: pure `H`, pure `V`, or the mixture
/// `p |H⟩⟨H| + (1 - p) |V⟩⟨V|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialCoin {
    H,
    V,
    Mixture(f64),
}

impl InitialCoin {
    /// Probability of `H`.
    pub fn p_h(&self) -> f64 {
        match *self {
            InitialCoin::H => 1.0,
            InitialCoin::V => 0.0,
            InitialCoin::Mixture(p) => p,
        }
    }

    pub fn pure(coin: Coin) -> Self {
        match coin {
            Coin::H => InitialCoin::H,
            Coin::V => InitialCoin::V,
        }
    }

    /// `(coin, weight)` pairs with nonzero weight.
    pub fn components(&self) -> Vec<(Coin, f64)> {
        let p = self.p_h();
        [(Coin::H, p), (Coin::V, 1.0 - p)].into_iter().filter(|(_, w)| *w > 0.0).collect()
    }
}

impl fmt::Display for InitialCoin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialCoin::H => f.write_str("H"),
            InitialCoin::V => f.write_str("V"),
            InitialCoin::Mixture(p) => write!(f, "p={p}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkConfig {
    theta_deg: f64,
    steps: usize,
    intermediate: usize,
    x0: i64,
    initial: InitialCoin,
}

impl WalkConfig {
    /// Requires `0 < intermediate < steps`, a finite angle and `p ∈ [0, 1]`.
    pub fn new(theta_deg: f64, steps: usize, intermediate: usize, x0: i64, initial: InitialCoin) -> Result<Self> {
        if !theta_deg.is_finite() {
            return Err(Error::InvalidConfig(format!("coin angle {theta_deg} is not finite")));
        }
        if intermediate == 0 || intermediate >= steps {
            return Err(Error::InvalidConfig(format!(
                "need 0 < M < N, got N = {steps}, M = {intermediate}"
            )));
        }
        let p = initial.p_h();
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability(p));
        }
        Ok(WalkConfig { theta_deg, steps, intermediate, x0, initial })
    }

    pub fn theta_deg(&self) -> f64 {
        self.theta_deg
    }

    pub fn theta_rad(&self) -> f64 {
        self.theta_deg.to_radians()
    }

    /// Total number of steps `N`.
    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Step `M` of the intermediate measurement.
    pub fn intermediate(&self) -> usize {
        self.intermediate
    }

    pub fn x0(&self) -> i64 {
        self.x0
    }

    pub fn initial(&self) -> InitialCoin {
        self.initial
    }

    pub fn bounds(&self) -> LatticeBounds {
        LatticeBounds::centered(self.x0, self.steps)
    }

    pub fn with_theta(mut self, theta_deg: f64) -> Self {
        self.theta_deg = theta_deg;
        self
    }

    pub fn with_initial(mut self, initial: InitialCoin) -> Result<Self> {
        Self::new(self.theta_deg, self.steps, self.intermediate, self.x0, initial)?;
        self.initial = initial;
        Ok(self)
    }

    pub fn translated(mut self, k: i64) -> Self {
        self.x0 += k;
        self
    }

    pub fn step_operator(&self) -> StepOperator {
        StepOperator::new(self.theta_deg, self.bounds())
    }
}

/// `[[cos θ, sin θ], [sin θ, -cos θ]]`, angle in degrees.
pub fn coin_operator(theta_deg: f64) -> Matrix2<C64> {
    let (s, c) = theta_deg.to_radians().sin_cos();
    Matrix2::new(C64::new(c, 0.0), C64::new(s, 0.0), C64::new(s, 0.0), C64::new(-c, 0.0))
}

/// Dense conditional shift on the lattice.
///
/// The two edge transitions (`H` at `max`, `V` at `min`) are closed
/// cyclically so the matrix is exactly unitary; valid walks never use them.
pub fn shift_operator(bounds: LatticeBounds) -> DMatrix<C64> {
    let sites = bounds.sites();
    let mut s = DMatrix::zeros(bounds.dim(), bounds.dim());
    for i in 0..sites {
        let right = (i + 1) % sites;
        let left = (i + sites - 1) % sites;
        s[(2 * right, 2 * i)] = C64::new(1.0, 0.0);
        s[(2 * left + 1, 2 * i + 1)] = C64::new(1.0, 0.0);
    }
    s
}

/// Dense step `Û = Ŝ (𝟙 ⊗ Ĉ)`.
pub fn step_unitary(cfg: &WalkConfig) -> DMatrix<C64> {
    let bounds = cfg.bounds();
    let coin = coin_operator(cfg.theta_deg);
    let mut block = DMatrix::zeros(bounds.dim(), bounds.dim());
    for i in 0..bounds.sites() {
        for (r, c) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            block[(2 * i + r, 2 * i + c)] = coin[(r, c)];
        }
    }
    shift_operator(bounds) * block
}

/// One walk step applied structurally in `O(d)` per vector.
///
/// `amp_h` and `amp_v` are per-step amplitude transmissions of the two shift
/// branches; both are 1 for the ideal walk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOperator {
    bounds: LatticeBounds,
    cos: f64,
    sin: f64,
    amp_h: f64,
    amp_v: f64,
}

impl StepOperator {
    pub fn new(theta_deg: f64, bounds: LatticeBounds) -> Self {
        let (sin, cos) = theta_deg.to_radians().sin_cos();
        StepOperator { bounds, cos, sin, amp_h: 1.0, amp_v: 1.0 }
    }

    /// Step with intensity transmissions `eta_h`, `eta_v` on the two branches.
    pub fn lossy(theta_deg: f64, bounds: LatticeBounds, eta_h: f64, eta_v: f64) -> Self {
        StepOperator { amp_h: eta_h.sqrt(), amp_v: eta_v.sqrt(), ..Self::new(theta_deg, bounds) }
    }

    pub fn bounds(&self) -> LatticeBounds {
        self.bounds
    }

    pub fn dim(&self) -> usize {
        self.bounds.dim()
    }

    fn apply_slice(&self, input: impl Iterator<Item = C64> + Clone, out: &mut [C64]) -> Result<()> {
        let sites = self.bounds.sites();
        let mut it = input;
        out.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        for i in 0..sites {
            let a = it.next().unwrap_or_default();
            let b = it.next().unwrap_or_default();
            if a == C64::new(0.0, 0.0) && b == C64::new(0.0, 0.0) {
                continue;
            }
            let h = a * self.cos + b * self.sin;
            let v = a * self.sin - b * self.cos;
            if h != C64::new(0.0, 0.0) {
                if i + 1 >= sites {
                    return Err(Error::LatticeExceeded { position: self.bounds.max(), coin: Coin::H });
                }
                out[2 * (i + 1)] += h * self.amp_h;
            }
            if v != C64::new(0.0, 0.0) {
                if i == 0 {
                    return Err(Error::LatticeExceeded { position: self.bounds.min(), coin: Coin::V });
                }
                out[2 * (i - 1) + 1] += v * self.amp_v;
            }
        }
        Ok(())
    }

    pub fn apply_vector(&self, psi: &DVector<C64>) -> Result<DVector<C64>> {
        if psi.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: psi.len() });
        }
        let mut out = DVector::zeros(psi.len());
        self.apply_slice(psi.iter().copied(), out.as_mut_slice())?;
        Ok(out)
    }

    /// `A ρ A†`, computed column by column.
    pub fn apply_matrix(&self, rho: &DMatrix<C64>) -> Result<DMatrix<C64>> {
        let d = self.dim();
        if rho.nrows() != d || rho.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: rho.nrows() });
        }
        let left = self.apply_columns(rho)?;
        Ok(self.apply_columns(&left.adjoint())?.adjoint())
    }

    fn apply_columns(&self, m: &DMatrix<C64>) -> Result<DMatrix<C64>> {
        let mut out = DMatrix::zeros(m.nrows(), m.ncols());
        for j in 0..m.ncols() {
            let col = m.column(j);
            if col.iter().all(|z| *z == C64::new(0.0, 0.0)) {
                continue;
            }
            let mut buf = vec![C64::new(0.0, 0.0); m.nrows()];
            self.apply_slice(col.iter().copied(), &mut buf)?;
            out.column_mut(j).copy_from_slice(&buf);
        }
        Ok(out)
    }
}

/// States the walk can propagate.
pub trait Evolve: Sized + Clone {
    fn step_with(&self, op: &StepOperator) -> Result<Self>;

    fn evolve_with(&self, op: &StepOperator, steps: usize) -> Result<Self> {
        let mut s = self.clone();
        for _ in 0..steps {
            s = s.step_with(op)?;
        }
        Ok(s)
    }
}

impl Evolve for PureState {
    fn step_with(&self, op: &StepOperator) -> Result<Self> {
        Ok(PureState::unnormalized(op.apply_vector(self.amplitudes())?))
    }
}

impl Evolve for DensityMatrix {
    fn step_with(&self, op: &StepOperator) -> Result<Self> {
        Ok(DensityMatrix::unchecked(op.apply_matrix(self.entries())?))
    }
}

/// Applies `steps` walk steps of `cfg` (at most `N`).
pub fn evolve<S: Evolve>(state: &S, cfg: &WalkConfig, steps: usize) -> Result<S> {
    if steps > cfg.steps {
        return Err(Error::TooManySteps { requested: steps, max: cfg.steps });
    }
    state.evolve_with(&cfg.step_operator(), steps)
}

/// `|x0, coin⟩` on the lattice of `cfg`.
pub fn initial_pure(cfg: &WalkConfig, coin: Coin) -> PureState {
    let b = cfg.bounds();
    let idx = b.mode_index(Mode::new(cfg.x0, coin)).expect("x0 is the lattice centre");
    PureState::basis(b.dim(), idx).expect("index within dimension")
}

/// `ρ0 = |x0⟩⟨x0| ⊗ (p |H⟩⟨H| + (1 - p) |V⟩⟨V|)`.
pub fn initial_density(cfg: &WalkConfig) -> DensityMatrix {
    let h = initial_pure(cfg, Coin::H).to_density();
    let v = initial_pure(cfg, Coin::V).to_density();
    mix(&h, &v, cfg.initial.p_h()).expect("validated probability")
}

fn diagonal_distribution(bounds: LatticeBounds, rho: &DensityMatrix) -> Result<ProbabilityDistribution> {
    ProbabilityDistribution::new(bounds, rho.diagonal())
}

/// `P_{x0,p}(x, c, steps)` as a convex mixture of the pure-coin runs.
pub fn one_time_distribution(cfg: &WalkConfig, steps: usize) -> Result<ProbabilityDistribution> {
    if steps > cfg.steps {
        return Err(Error::TooManySteps { requested: steps, max: cfg.steps });
    }
    let op = cfg.step_operator();
    let mut probs = vec![0.0; op.dim()];
    for (coin, w) in cfg.initial.components() {
        let psi = initial_pure(cfg, coin).evolve_with(&op, steps)?;
        for (p, i) in probs.iter_mut().zip(psi.intensities()) {
            *p += w * i;
        }
    }
    ProbabilityDistribution::new(cfg.bounds(), probs)
}

/// Same as [`one_time_distribution`], propagating the mixed `ρ0` directly.
pub fn one_time_distribution_density(cfg: &WalkConfig, steps: usize) -> Result<ProbabilityDistribution> {
    let rho = evolve(&initial_density(cfg), cfg, steps)?;
    diagonal_distribution(cfg.bounds(), &rho)
}

/// `P_{y,c'}(x, c, steps)`: a fresh walk started from `mode`.
pub fn fresh_distribution(op: &StepOperator, mode: Mode, steps: usize) -> Result<ProbabilityDistribution> {
    let b = op.bounds();
    let psi = PureState::basis(b.dim(), b.mode_index(mode)?)?.evolve_with(op, steps)?;
    ProbabilityDistribution::new(b, psi.intensities())
}

/// Projects `rho_m` onto `mode`, renormalizes and evolves `remaining` steps.
pub(crate) fn project_and_evolve(
    rho_m: &DensityMatrix,
    op: &StepOperator,
    mode: Mode,
    step: usize,
    remaining: usize,
) -> Result<ProbabilityDistribution> {
    let b = op.bounds();
    let idx = b.mode_index(mode)?;
    let weight = rho_m.entries()[(idx, idx)].re;
    if weight <= ZERO_PROBABILITY {
        return Err(Error::ZeroProbabilityCondition { position: mode.position, coin: mode.coin, step });
    }
    // P ρ P keeps the single entry (idx, idx)
    let mut projected = DMatrix::zeros(b.dim(), b.dim());
    projected[(idx, idx)] = rho_m.entries()[(idx, idx)] / weight;
    let rho = DensityMatrix::unchecked(projected).evolve_with(op, remaining)?;
    diagonal_distribution(b, &rho)
}

/// `P_{x0,p}(x, c, N | y, c', M)`: evolve `ρ0` for `M` steps, project onto
/// `|y, c'⟩`, renormalize and evolve the remaining `N - M` steps.
pub fn conditional_distribution(cfg: &WalkConfig, y: i64, coin: Coin) -> Result<ProbabilityDistribution> {
    let op = cfg.step_operator();
    let rho_m = initial_density(cfg).evolve_with(&op, cfg.intermediate)?;
    project_and_evolve(&rho_m, &op, Mode::new(y, coin), cfg.intermediate, cfg.steps - cfg.intermediate)
}

/// Shortcut for unitary dynamics: the conditional distribution equals a fresh
/// walk from `|y, c'⟩` over `N - M` steps, provided the event is possible.
pub fn conditional_distribution_fresh(cfg: &WalkConfig, y: i64, coin: Coin) -> Result<ProbabilityDistribution> {
    let mode = Mode::new(y, coin);
    let p_m = one_time_distribution(cfg, cfg.intermediate)?;
    if p_m.get(mode) <= ZERO_PROBABILITY {
        return Err(Error::ZeroProbabilityCondition { position: y, coin, step: cfg.intermediate });
    }
    fresh_distribution(&cfg.step_operator(), mode, cfg.steps - cfg.intermediate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::max_abs;
    use proptest::prelude::*;

    const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn cfg(theta: f64, n: usize, m: usize, x0: i64, init: InitialCoin) -> WalkConfig {
        WalkConfig::new(theta, n, m, x0, init).unwrap()
    }

    fn amp(psi: &PureState, b: LatticeBounds, x: i64, c: Coin) -> C64 {
        psi.amplitudes()[b.mode_index(Mode::new(x, c)).unwrap()]
    }

    fn close(a: C64, b: f64) -> bool {
        (a - C64::new(b, 0.0)).norm() < 1e-14
    }

    /// Step matrix assembled entry by entry from the definitions, with no
    /// edge transitions. Independent of `step_unitary` and `StepOperator`.
    fn brute_force_step(theta_deg: f64, b: LatticeBounds) -> DMatrix<C64> {
        let t = theta_deg.to_radians();
        let coin = [[t.cos(), t.sin()], [t.sin(), -t.cos()]];
        let d = b.dim();
        let mut u = DMatrix::zeros(d, d);
        for x in b.min()..=b.max() {
            for (ci, cin) in Coin::ALL.iter().enumerate() {
                let col = b.mode_index(Mode::new(x, *cin)).unwrap();
                for (co, cout) in Coin::ALL.iter().enumerate() {
                    let target = match cout {
                        Coin::H => x + 1,
                        Coin::V => x - 1,
                    };
                    if let Ok(row) = b.mode_index(Mode::new(target, *cout)) {
                        u[(row, col)] += C64::new(coin[co][ci], 0.0);
                    }
                }
            }
        }
        u
    }

    #[test]
    fn coin_examples() {
        let c0 = coin_operator(0.0);
        assert_eq!(c0, Matrix2::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(-1.0, 0.0)));
        let c90 = coin_operator(90.0);
        assert!((c90 - Matrix2::new(0.0, 1.0, 1.0, 0.0).map(|v| C64::new(v, 0.0))).norm() < 1e-15);
        let c45 = coin_operator(45.0);
        let expect = Matrix2::new(SQRT_HALF, SQRT_HALF, SQRT_HALF, -SQRT_HALF).map(|v| C64::new(v, 0.0));
        assert!((c45 - expect).norm() < 1e-15);
        for th in [0.0, 13.0, 45.0, 77.7] {
            let c = coin_operator(th);
            assert!((c.adjoint() * c - Matrix2::identity()).norm() < 1e-14);
            assert!((c.adjoint() - c).norm() < 1e-15);
        }
    }

    #[test]
    fn shift_examples() {
        let b = LatticeBounds::new(-2, 2).unwrap();
        let s = shift_operator(b);
        let e0h = PureState::basis(b.dim(), b.mode_index(Mode::new(0, Coin::H)).unwrap()).unwrap();
        let out = PureState::unnormalized(&s * e0h.amplitudes());
        assert!(close(amp(&out, b, 1, Coin::H), 1.0));
        let e0v = PureState::basis(b.dim(), b.mode_index(Mode::new(0, Coin::V)).unwrap()).unwrap();
        let out = PureState::unnormalized(&s * e0v.amplitudes());
        assert!(close(amp(&out, b, -1, Coin::V), 1.0));
        let id = DMatrix::<C64>::identity(b.dim(), b.dim());
        assert!(max_abs((s.adjoint() * &s - id).iter()) < 1e-15);
    }

    #[test]
    fn step_examples() {
        let c = cfg(0.0, 3, 1, 0, InitialCoin::H);
        let b = c.bounds();
        let psi = evolve(&initial_pure(&c, Coin::H), &c, 1).unwrap();
        assert!(close(amp(&psi, b, 1, Coin::H), 1.0));

        let c = c.with_theta(45.0);
        let psi = evolve(&initial_pure(&c, Coin::H), &c, 1).unwrap();
        assert!(close(amp(&psi, b, 1, Coin::H), SQRT_HALF));
        assert!(close(amp(&psi, b, -1, Coin::V), SQRT_HALF));

        let c = c.with_theta(90.0);
        let psi = evolve(&initial_pure(&c, Coin::H), &c, 1).unwrap();
        assert!(close(amp(&psi, b, -1, Coin::V), 1.0));
        assert!((psi.norm_squared() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn step_unitary_is_unitary() {
        for th in [0.0, 7.0, 45.0, 123.4, -30.0] {
            let c = cfg(th, 6, 3, 2, InitialCoin::V);
            let u = step_unitary(&c);
            let id = DMatrix::<C64>::identity(u.nrows(), u.ncols());
            assert!(max_abs((u.adjoint() * &u - id).iter()) < 1e-12);
        }
    }

    #[test]
    fn evolve_two_steps_balanced() {
        // hand propagation: ½(|2,H⟩ + |0,V⟩ + |0,H⟩ − |−2,V⟩)
        let c = cfg(45.0, 4, 1, 0, InitialCoin::H);
        let b = c.bounds();
        let psi = evolve(&initial_pure(&c, Coin::H), &c, 2).unwrap();
        assert!(close(amp(&psi, b, 2, Coin::H), 0.5));
        assert!(close(amp(&psi, b, 0, Coin::V), 0.5));
        assert!(close(amp(&psi, b, 0, Coin::H), 0.5));
        assert!(close(amp(&psi, b, -2, Coin::V), -0.5));
        assert!((psi.norm_squared() - 1.0).abs() < 1e-14);

        let zero = evolve(&initial_pure(&c, Coin::H), &c, 0).unwrap();
        assert_eq!(zero, initial_pure(&c, Coin::H));
    }

    #[test]
    fn evolve_matches_brute_force_matrix() {
        for (th, n) in [(7.0, 5), (45.0, 6), (61.3, 4), (-20.0, 5)] {
            let c = cfg(th, n, 1, 1, InitialCoin::V);
            let u = brute_force_step(th, c.bounds());
            let mut oracle = initial_pure(&c, Coin::V).into_amplitudes();
            for _ in 0..n {
                oracle = &u * oracle;
            }
            let got = evolve(&initial_pure(&c, Coin::V), &c, n).unwrap();
            assert!(max_abs((got.amplitudes() - &oracle).iter()) < 1e-14);

            let dense = step_unitary(&c);
            let mut via_dense = initial_pure(&c, Coin::V).into_amplitudes();
            for _ in 0..n {
                via_dense = &dense * via_dense;
            }
            assert!(max_abs((via_dense - oracle).iter()) < 1e-14);
        }
    }

    #[test]
    fn one_step_general_angle() {
        let th = 33.0f64;
        let c = cfg(th, 2, 1, 0, InitialCoin::H);
        let p = one_time_distribution(&c, 1).unwrap();
        let (s, co) = th.to_radians().sin_cos();
        assert!((p.get(Mode::new(1, Coin::H)) - co * co).abs() < 1e-15);
        assert!((p.get(Mode::new(-1, Coin::V)) - s * s).abs() < 1e-15);
        assert_eq!(p.support().count(), 2);
    }

    #[test]
    fn one_time_examples() {
        let c = cfg(45.0, 2, 1, 0, InitialCoin::H);
        let p = one_time_distribution(&c, 2).unwrap();
        for m in [Mode::new(2, Coin::H), Mode::new(0, Coin::V), Mode::new(0, Coin::H), Mode::new(-2, Coin::V)] {
            assert!((p.get(m) - 0.25).abs() < 1e-15);
        }
        let c = cfg(0.0, 20, 10, 3, InitialCoin::Mixture(0.3));
        let p = one_time_distribution(&c, 20).unwrap();
        assert!((p.get(Mode::new(23, Coin::H)) - 0.3).abs() < 1e-15);
        assert!((p.get(Mode::new(-17, Coin::V)) - 0.7).abs() < 1e-15);
        assert!((p.total() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn too_many_steps_rejected() {
        let c = cfg(10.0, 4, 2, 0, InitialCoin::H);
        assert!(matches!(one_time_distribution(&c, 5), Err(Error::TooManySteps { requested: 5, max: 4 })));
    }

    #[test]
    fn undersized_lattice_is_an_error() {
        let op = StepOperator::new(45.0, LatticeBounds::new(-1, 1).unwrap());
        let psi = PureState::basis(6, 0).unwrap();
        let err = psi.evolve_with(&op, 3).unwrap_err();
        assert!(matches!(err, Error::LatticeExceeded { .. }));
    }

    #[test]
    fn invalid_configs() {
        assert!(WalkConfig::new(10.0, 4, 0, 0, InitialCoin::H).is_err());
        assert!(WalkConfig::new(10.0, 4, 4, 0, InitialCoin::H).is_err());
        assert!(WalkConfig::new(10.0, 4, 2, 0, InitialCoin::Mixture(1.2)).is_err());
        assert!(WalkConfig::new(f64::NAN, 4, 2, 0, InitialCoin::H).is_err());
    }

    #[test]
    fn conditional_examples() {
        // ballistic walk: conditioning on the only occupied mode changes nothing
        let c = cfg(0.0, 6, 3, 0, InitialCoin::H);
        let cond = conditional_distribution(&c, 3, Coin::H).unwrap();
        assert_eq!(cond, one_time_distribution(&c, 6).unwrap());

        let c = cfg(45.0, 2, 1, 0, InitialCoin::H);
        let cond = conditional_distribution(&c, 1, Coin::H).unwrap();
        assert!((cond.get(Mode::new(2, Coin::H)) - 0.5).abs() < 1e-15);
        assert!((cond.get(Mode::new(0, Coin::V)) - 0.5).abs() < 1e-15);
        assert_eq!(cond.support().count(), 2);
    }

    #[test]
    fn conditional_on_impossible_event() {
        let c = cfg(30.0, 4, 2, 0, InitialCoin::H);
        let err = conditional_distribution(&c, 1, Coin::H).unwrap_err();
        assert!(matches!(err, Error::ZeroProbabilityCondition { position: 1, coin: Coin::H, step: 2 }));
        assert!(conditional_distribution_fresh(&c, 1, Coin::H).is_err());
    }

    #[test]
    fn density_and_mixture_paths_agree() {
        for p in [0.0, 0.25, 0.5, 1.0] {
            let c = cfg(37.0, 8, 3, -1, InitialCoin::Mixture(p));
            for steps in [0, 1, 5, 8] {
                let a = one_time_distribution(&c, steps).unwrap();
                let b = one_time_distribution_density(&c, steps).unwrap();
                assert!(a.l1_distance(&b) < 1e-13, "p={p} steps={steps}");
            }
        }
    }

    proptest! {
        #[test]
        fn dense_step_unitary_for_all_angles(theta in -360.0f64..360.0, n in 1usize..8) {
            let c = cfg(theta, n + 1, 1, 0, InitialCoin::H);
            let u = step_unitary(&c);
            let id = DMatrix::<C64>::identity(u.nrows(), u.ncols());
            prop_assert!(max_abs((u.adjoint() * &u - id).iter()) <= 1e-12);
        }

        #[test]
        fn parity_and_light_cone(theta in 0.0f64..180.0, n in 2usize..=12, pi in 0usize..4, x0 in -3i64..4) {
            let p = [0.0, 0.25, 0.5, 1.0][pi];
            let c = cfg(theta, n, 1, x0, InitialCoin::Mixture(p));
            for steps in 0..=n {
                let d = one_time_distribution(&c, steps).unwrap();
                prop_assert!((d.total() - 1.0).abs() < 1e-10);
                for (m, w) in d.support() {
                    let dx = m.position - x0;
                    prop_assert!(dx.unsigned_abs() as usize <= steps);
                    prop_assert!((dx + steps as i64) % 2 == 0, "mode {} weight {}", m, w);
                }
            }
        }

        #[test]
        fn mixture_linearity(theta in 0.0f64..90.0, n in 2usize..=10, p in 0.0f64..=1.0) {
            let c = cfg(theta, n, 1, 0, InitialCoin::Mixture(p));
            let mixed = one_time_distribution(&c, n).unwrap();
            let h = one_time_distribution(&c.with_initial(InitialCoin::H).unwrap(), n).unwrap();
            let v = one_time_distribution(&c.with_initial(InitialCoin::V).unwrap(), n).unwrap();
            for ((a, b), m) in h.values().iter().zip(v.values()).zip(mixed.values()) {
                prop_assert!((p * a + (1.0 - p) * b - m).abs() <= 1e-12);
            }
        }

        #[test]
        fn translation_invariance(theta in 0.0f64..90.0, n in 2usize..=10, k in -20i64..20) {
            let c = cfg(theta, n, n / 2, 0, InitialCoin::Mixture(0.3));
            let a = one_time_distribution(&c, n).unwrap();
            let b = one_time_distribution(&c.translated(k), n).unwrap();
            prop_assert_eq!(a.values(), b.values());
            for (m, w) in a.support() {
                prop_assert_eq!(b.get(Mode::new(m.position + k, m.coin)), w);
            }
        }

        #[test]
        fn total_probability_and_fresh_shortcut(theta in 0.0f64..90.0, n in 2usize..=9, mfrac in 0.0f64..1.0, p in 0.0f64..=1.0) {
            let m = 1 + ((n - 1) as f64 * mfrac) as usize;
            let m = m.min(n - 1);
            let c = cfg(theta, n, m, 0, InitialCoin::Mixture(p));
            let pm = one_time_distribution(&c, m).unwrap();
            let mut combined = vec![0.0; c.bounds().dim()];
            for (mode, w) in pm.support().filter(|(_, w)| *w > ZERO_PROBABILITY) {
                let cond = conditional_distribution(&c, mode.position, mode.coin).unwrap();
                let fresh = conditional_distribution_fresh(&c, mode.position, mode.coin).unwrap();
                for (a, b) in cond.values().iter().zip(fresh.values()) {
                    prop_assert!((a - b).abs() <= 1e-12);
                }
                for (acc, q) in combined.iter_mut().zip(cond.values()) {
                    *acc += w * q;
                }
            }
            let total: f64 = combined.iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-10);
            prop_assert!(combined.iter().all(|v| *v >= -1e-12));
        }
    }
}
