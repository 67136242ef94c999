// Copyright 2026 The qwalk Authors
// SPDX-License-Identifier: Apache-2.0

//! Finite-dimensional Lindblad dynamics, two-time joint probabilities from
//! the quantum regression prescription, and the open-system versions of the
//! coherence and non-classicality quantifiers.
//!
//! Propagation `e^{𝓛t} ρ` uses a Taylor series on substeps short enough that
//! `h ‖𝓛‖ ≤ 1`, where `‖𝓛‖` is bounded through spectral norms of the
//! Hamiltonian and jump operators. The superoperator is never formed.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::hilbert::{dephase, trace_norm_diagonal, DensityMatrix, HERMITIAN_TOL};
use crate::walk::{initial_density, step_unitary, WalkConfig};
use crate::C64;

const MAX_SUBSTEP_NORM: f64 = 1.0;
const TAYLOR_MAX_TERMS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct JumpOperator {
    pub operator: DMatrix<C64>,
    pub rate: f64,
}

/// `𝓛ρ = −i[H, ρ] + Σ_j c_j (L_j ρ L_j† − ½{L_j† L_j, ρ})`.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladGenerator {
    hamiltonian: DMatrix<C64>,
    jumps: Vec<JumpOperator>,
    // L_j† L_j, cached
    decay: Vec<DMatrix<C64>>,
    norm_bound: f64,
}

fn spectral_norm_hermitian(m: &DMatrix<C64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    h.symmetric_eigenvalues().iter().fold(0.0f64, |a, e| a.max(e.abs()))
}

impl LindbladGenerator {
    pub fn new(hamiltonian: DMatrix<C64>, jumps: Vec<JumpOperator>) -> Result<Self> {
        let d = hamiltonian.nrows();
        if hamiltonian.ncols() != d {
            return Err(Error::InvalidGenerator(format!("Hamiltonian is {}x{}", d, hamiltonian.ncols())));
        }
        for i in 0..d {
            for j in i..d {
                let dev = (hamiltonian[(i, j)] - hamiltonian[(j, i)].conj()).norm();
                if dev > HERMITIAN_TOL {
                    return Err(Error::InvalidGenerator(format!(
                        "Hamiltonian not Hermitian at ({i}, {j}): deviation {dev:e}"
                    )));
                }
            }
        }
        for (k, j) in jumps.iter().enumerate() {
            if j.operator.nrows() != d || j.operator.ncols() != d {
                return Err(Error::DimensionMismatch { expected: d, found: j.operator.nrows() });
            }
            if !(j.rate >= 0.0) || !j.rate.is_finite() {
                return Err(Error::InvalidGenerator(format!("rate {} of jump {k} is not a nonnegative number", j.rate)));
            }
        }
        let decay: Vec<_> = jumps.iter().map(|j| j.operator.adjoint() * &j.operator).collect();
        let norm_bound = 2.0 * spectral_norm_hermitian(&hamiltonian)
            + jumps.iter().zip(&decay).map(|(j, dd)| 2.0 * j.rate * spectral_norm_hermitian(dd)).sum::<f64>();
        Ok(LindbladGenerator { hamiltonian, jumps, decay, norm_bound })
    }

    /// Closed system, `e^{𝓛t} ρ = e^{-iHt} ρ e^{iHt}`.
    pub fn unitary(hamiltonian: DMatrix<C64>) -> Result<Self> {
        Self::new(hamiltonian, Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.nrows()
    }

    pub fn hamiltonian(&self) -> &DMatrix<C64> {
        &self.hamiltonian
    }

    pub fn jumps(&self) -> &[JumpOperator] {
        &self.jumps
    }

    /// Upper bound on the induced Hilbert-Schmidt norm of `𝓛`.
    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    fn apply_unchecked(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let i = C64::new(0.0, 1.0);
        let mut out = (&self.hamiltonian * rho - rho * &self.hamiltonian) * (-i);
        for (j, dd) in self.jumps.iter().zip(&self.decay) {
            if j.rate == 0.0 {
                continue;
            }
            let l = &j.operator;
            let sandwich = l * rho * l.adjoint();
            let anti = dd * rho + rho * dd;
            out += (sandwich - anti * C64::new(0.5, 0.0)) * C64::new(j.rate, 0.0);
        }
        out
    }

    /// `e^{𝓛t}` applied to an arbitrary (not necessarily positive) matrix.
    pub fn propagate_matrix(&self, m: &DMatrix<C64>, t: f64) -> Result<DMatrix<C64>> {
        if t < 0.0 || !t.is_finite() {
            return Err(Error::NegativeTime(t));
        }
        self.check_dim(m.nrows())?;
        if t == 0.0 || self.norm_bound == 0.0 {
            return Ok(m.clone());
        }
        let substeps = ((self.norm_bound * t) / MAX_SUBSTEP_NORM).ceil().max(1.0) as usize;
        let h = t / substeps as f64;
        let mut cur = m.clone();
        for _ in 0..substeps {
            let mut term = cur.clone();
            let mut sum = cur.clone();
            for k in 1..=TAYLOR_MAX_TERMS {
                term = self.apply_unchecked(&term) * C64::new(h / k as f64, 0.0);
                sum += &term;
                if term.norm() <= 1e-18 * sum.norm().max(1e-300) {
                    break;
                }
            }
            cur = sum;
        }
        Ok(cur)
    }

    fn check_dim(&self, d: usize) -> Result<()> {
        if d != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: d });
        }
        Ok(())
    }
}

/// Outcome labels of a non-degenerate observable, identified with the
/// computational basis in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservableBasis {
    labels: Vec<String>,
}

impl ObservableBasis {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::DegenerateObservable(l.clone()));
            }
        }
        Ok(ObservableBasis { labels })
    }

    /// Labels `"0"`, `"1"`, ….
    pub fn numbered(d: usize) -> Self {
        ObservableBasis { labels: (0..d).map(|i| i.to_string()).collect() }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// `ρ0 = Σ_x p_x |x⟩⟨x|`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalInitialState {
    populations: Vec<f64>,
}

impl DiagonalInitialState {
    pub fn new(populations: Vec<f64>) -> Result<Self> {
        if populations.iter().any(|p| !(*p >= 0.0)) {
            return Err(Error::InvalidState("negative or NaN population".into()));
        }
        let total: f64 = populations.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!("populations sum to {total}")));
        }
        Ok(DiagonalInitialState { populations })
    }

    pub fn populations(&self) -> &[f64] {
        &self.populations
    }

    pub fn dim(&self) -> usize {
        self.populations.len()
    }

    pub fn to_matrix(&self) -> DMatrix<C64> {
        DMatrix::from_diagonal(&DVector::from_iterator(
            self.dim(),
            self.populations.iter().map(|&p| C64::new(p, 0.0)),
        ))
    }
}

/// `𝓛ρ`.
pub fn lindblad_apply(gen: &LindbladGenerator, rho: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    if !rho.is_square() {
        return Err(Error::DimensionMismatch { expected: rho.nrows(), found: rho.ncols() });
    }
    gen.check_dim(rho.nrows())?;
    Ok(gen.apply_unchecked(rho))
}

/// `e^{𝓛t} ρ0` for `t ≥ 0`.
pub fn lindblad_propagate(gen: &LindbladGenerator, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    Ok(DensityMatrix::unchecked(gen.propagate_matrix(rho0.entries(), t)?))
}

fn check_inputs(gen: &LindbladGenerator, basis: &ObservableBasis, rho0: &DiagonalInitialState) -> Result<()> {
    gen.check_dim(basis.dim())?;
    gen.check_dim(rho0.dim())
}

fn check_times(s: f64, t: f64) -> Result<()> {
    if s < 0.0 {
        return Err(Error::NegativeTime(s));
    }
    if s > t {
        return Err(Error::InvalidTimes { s, t });
    }
    Ok(())
}

fn real_diagonal(m: &DMatrix<C64>) -> Vec<f64> {
    (0..m.nrows()).map(|i| m[(i, i)].re).collect()
}

/// `P_{ρ0}(x, t)` for every outcome `x`.
pub fn one_time_probabilities(gen: &LindbladGenerator, rho0: &DiagonalInitialState, t: f64) -> Result<Vec<f64>> {
    gen.check_dim(rho0.dim())?;
    Ok(real_diagonal(&gen.propagate_matrix(&rho0.to_matrix(), t)?))
}

fn project(m: &DMatrix<C64>, y: usize) -> DMatrix<C64> {
    let mut p = DMatrix::zeros(m.nrows(), m.ncols());
    p[(y, y)] = m[(y, y)];
    p
}

/// `P(x, t; y, s) = tr{𝒫_x e^{𝓛(t−s)} 𝒫_y e^{𝓛s} ρ0}`.
pub fn regression_joint(
    gen: &LindbladGenerator,
    basis: &ObservableBasis,
    rho0: &DiagonalInitialState,
    x: usize,
    t: f64,
    y: usize,
    s: f64,
) -> Result<f64> {
    check_inputs(gen, basis, rho0)?;
    check_times(s, t)?;
    for idx in [x, y] {
        if idx >= basis.dim() {
            return Err(Error::IndexOutOfRange { index: idx, dim: basis.dim() });
        }
    }
    let rho_s = gen.propagate_matrix(&rho0.to_matrix(), s)?;
    let later = gen.propagate_matrix(&project(&rho_s, y), t - s)?;
    Ok(later[(x, x)].re)
}

/// All joint probabilities at once, indexed `[x][y]`.
pub fn regression_joint_table(
    gen: &LindbladGenerator,
    basis: &ObservableBasis,
    rho0: &DiagonalInitialState,
    s: f64,
    t: f64,
) -> Result<Vec<Vec<f64>>> {
    check_inputs(gen, basis, rho0)?;
    check_times(s, t)?;
    let d = basis.dim();
    let rho_s = gen.propagate_matrix(&rho0.to_matrix(), s)?;
    let mut table = vec![vec![0.0; d]; d];
    for y in 0..d {
        if rho_s[(y, y)].norm() == 0.0 {
            continue;
        }
        let later = gen.propagate_matrix(&project(&rho_s, y), t - s)?;
        for (x, row) in table.iter_mut().enumerate() {
            row[y] = later[(x, x)].re;
        }
    }
    Ok(table)
}

/// `‖(Δ ∘ e^{𝓛(t−s)} ∘ Δ ∘ e^{𝓛s} − Δ ∘ e^{𝓛t}) ρ0‖₁`.
pub fn generalized_c(
    gen: &LindbladGenerator,
    basis: &ObservableBasis,
    rho0: &DiagonalInitialState,
    s: f64,
    t: f64,
) -> Result<f64> {
    check_inputs(gen, basis, rho0)?;
    check_times(s, t)?;
    let rho0 = rho0.to_matrix();
    let dephased_s = dephase(&gen.propagate_matrix(&rho0, s)?);
    let measured = dephase(&gen.propagate_matrix(&dephased_s, t - s)?);
    let unmeasured = dephase(&gen.propagate_matrix(&rho0, t)?);
    trace_norm_diagonal(&(measured - unmeasured))
}

/// `Σ_x |Σ_y P(x, t; y, s) − P(x, t)|` with the joint probabilities from
/// [`regression_joint_table`].
pub fn generalized_k(
    gen: &LindbladGenerator,
    basis: &ObservableBasis,
    rho0: &DiagonalInitialState,
    s: f64,
    t: f64,
) -> Result<f64> {
    let table = regression_joint_table(gen, basis, rho0, s, t)?;
    let p_t = one_time_probabilities(gen, rho0, t)?;
    Ok(table.iter().zip(&p_t).map(|(row, p)| (row.iter().sum::<f64>() - p).abs()).sum())
}

/// Closed-system generator whose unit-time propagator is one walk step.
///
/// The shift is closed cyclically (see [`crate::walk::shift_operator`]) so
/// the step is unitary; `H = Q diag(−arg λ) Q†` from a Schur decomposition
/// `Û = Q diag(λ) Q†`. Only integer times are meaningful, so the branch of
/// the logarithm does not matter. Returns the generator, the mode labels and
/// the initial populations of `cfg`.
pub fn walk_embedding(cfg: &WalkConfig) -> Result<(LindbladGenerator, ObservableBasis, DiagonalInitialState)> {
    let u = step_unitary(cfg);
    let d = u.nrows();
    let (q, tri) = nalgebra::Schur::new(u).unpack();
    let phases = DVector::from_iterator(d, (0..d).map(|k| C64::new(-tri[(k, k)].arg(), 0.0)));
    let h = &q * DMatrix::from_diagonal(&phases) * q.adjoint();
    let h = (&h + h.adjoint()) * C64::new(0.5, 0.0);
    let gen = LindbladGenerator::unitary(h)?;
    let basis = ObservableBasis::new(cfg.bounds().modes().map(|m| format!("{}{}", m.position, m.coin)).collect())?;
    let rho0 = DiagonalInitialState::new(initial_density(cfg).diagonal())?;
    Ok((gen, basis, rho0))
}

/// Random Hermitian Hamiltonian plus `jumps` random jump operators with
/// rates in `[0, 1)`.
pub fn random_generator<R: Rng + ?Sized>(d: usize, jumps: usize, rng: &mut R) -> LindbladGenerator {
    let gaussian = |rng: &mut R| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
    let a = DMatrix::from_fn(d, d, |_, _| gaussian(rng));
    let h = (&a + a.adjoint()) * C64::new(0.5, 0.0);
    let scale = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    let ops = (0..jumps)
        .map(|_| JumpOperator { operator: DMatrix::from_fn(d, d, |_, _| gaussian(rng)) * scale, rate: rng.random::<f64>() })
        .collect();
    LindbladGenerator::new(h, ops).expect("random generator is valid by construction")
}

/// Random populations summing to one.
pub fn random_diagonal_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DiagonalInitialState {
    let raw: Vec<f64> = (0..d).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = raw.iter().sum();
    DiagonalInitialState::new(raw.iter().map(|r| r / total).collect()).expect("normalized")
}

/// Diagonal Hamiltonian with one dephasing projector `|k⟩⟨k|` per basis state.
pub fn pure_dephasing_generator(energies: &[f64], rates: &[f64]) -> Result<LindbladGenerator> {
    let d = energies.len();
    let h = DMatrix::from_diagonal(&DVector::from_iterator(d, energies.iter().map(|&e| C64::new(e, 0.0))));
    let jumps = rates
        .iter()
        .enumerate()
        .map(|(k, &rate)| {
            let mut op = DMatrix::zeros(d, d);
            op[(k % d.max(1), k % d.max(1))] = C64::new(1.0, 0.0);
            JumpOperator { operator: op, rate }
        })
        .collect();
    LindbladGenerator::new(h, jumps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::max_abs;
    use crate::quantifiers::{coherence_c_superop, kolmogorov_k};
    use crate::walk::{evolve, one_time_distribution, InitialCoin};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn lowering() -> DMatrix<C64> {
        // |0⟩⟨1|
        let mut l = DMatrix::zeros(2, 2);
        l[(0, 1)] = c(1.0);
        l
    }

    fn sigma_x() -> DMatrix<C64> {
        DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)])
    }

    /// Column-stacking superoperator, built independently of the generator.
    fn superoperator(h: &DMatrix<C64>, jumps: &[(DMatrix<C64>, f64)]) -> DMatrix<C64> {
        let d = h.nrows();
        let id = DMatrix::<C64>::identity(d, d);
        let i = C64::new(0.0, 1.0);
        let mut s = (id.kronecker(h) - h.transpose().kronecker(&id)) * (-i);
        for (l, rate) in jumps {
            let ldl = l.adjoint() * l;
            let term = l.conjugate().kronecker(l)
                - id.kronecker(&ldl) * c(0.5)
                - ldl.transpose().kronecker(&id) * c(0.5);
            s += term * c(*rate);
        }
        s
    }

    fn vec_of(m: &DMatrix<C64>) -> DVector<C64> {
        DVector::from_column_slice(m.as_slice())
    }

    #[test]
    fn apply_examples() {
        let h = DMatrix::from_diagonal(&DVector::from_vec(vec![c(1.0), c(-0.5)]));
        let gen = LindbladGenerator::new(h, vec![JumpOperator { operator: lowering(), rate: 0.0 }]).unwrap();
        let rho = DMatrix::from_diagonal(&DVector::from_vec(vec![c(0.3), c(0.7)]));
        assert!(max_abs(lindblad_apply(&gen, &rho).unwrap().iter()) < 1e-15);

        let gen = LindbladGenerator::new(DMatrix::zeros(2, 2), vec![JumpOperator { operator: lowering(), rate: 1.0 }]).unwrap();
        let excited = DMatrix::from_diagonal(&DVector::from_vec(vec![c(0.0), c(1.0)]));
        let out = lindblad_apply(&gen, &excited).unwrap();
        assert!(max_abs((out - DMatrix::from_diagonal(&DVector::from_vec(vec![c(1.0), c(-1.0)]))).iter()) < 1e-15);

        assert!(matches!(lindblad_apply(&gen, &DMatrix::zeros(3, 3)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn generator_validation() {
        let mut h = sigma_x();
        h[(0, 1)] = C64::new(1.0, 0.5);
        assert!(LindbladGenerator::unitary(h).is_err());
        let bad_rate = LindbladGenerator::new(sigma_x(), vec![JumpOperator { operator: lowering(), rate: -0.1 }]);
        assert!(bad_rate.is_err());
        assert!(matches!(ObservableBasis::new(vec!["a".into(), "a".into()]), Err(Error::DegenerateObservable(_))));
    }

    #[test]
    fn propagate_examples() {
        let gen = LindbladGenerator::new(sigma_x(), vec![JumpOperator { operator: lowering(), rate: 0.3 }]).unwrap();
        let rho0 = DensityMatrix::from_diagonal(&[0.25, 0.75]).unwrap();
        assert_eq!(lindblad_propagate(&gen, &rho0, 0.0).unwrap(), rho0);
        assert!(matches!(lindblad_propagate(&gen, &rho0, -1.0), Err(Error::NegativeTime(_))));

        // closed system: e^{-iHt} ρ e^{iHt} with H = σx
        let gen = LindbladGenerator::unitary(sigma_x()).unwrap();
        let t = 0.7f64;
        let u = DMatrix::from_row_slice(2, 2, &[c(t.cos()), C64::new(0.0, -t.sin()), C64::new(0.0, -t.sin()), c(t.cos())]);
        let expect = &u * rho0.entries() * u.adjoint();
        let got = lindblad_propagate(&gen, &rho0, t).unwrap();
        assert!(max_abs((got.entries() - expect).iter()) < 1e-13);
    }

    #[test]
    fn amplitude_damping_decay() {
        for rate in [0.2, 1.0, 3.5] {
            let gen = LindbladGenerator::new(DMatrix::zeros(2, 2), vec![JumpOperator { operator: lowering(), rate }]).unwrap();
            let rho0 = DensityMatrix::from_diagonal(&[0.0, 1.0]).unwrap();
            for t in [0.1, 1.0, 2.5] {
                let rho = lindblad_propagate(&gen, &rho0, t).unwrap();
                assert!((rho.entries()[(1, 1)].re - (-rate * t).exp()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn propagation_matches_superoperator_exponential() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in [2usize, 3, 4] {
            let gen = random_generator(d, 2, &mut rng);
            let jumps: Vec<_> = gen.jumps().iter().map(|j| (j.operator.clone(), j.rate)).collect();
            let sup = superoperator(gen.hamiltonian(), &jumps);
            let rho0 = random_diagonal_state(d, &mut rng).to_matrix();
            let t = 1.3;
            let oracle = (sup * c(t)).exp() * vec_of(&rho0);
            let got = gen.propagate_matrix(&rho0, t).unwrap();
            assert!(max_abs((vec_of(&got) - oracle).iter()) < 1e-10, "d={d}");
        }
    }

    #[test]
    fn rabi_coherence_against_superoperator_oracle() {
        let gen = LindbladGenerator::unitary(sigma_x()).unwrap();
        let basis = ObservableBasis::numbered(2);
        let rho0 = DiagonalInitialState::new(vec![1.0, 0.0]).unwrap();
        let t = std::f64::consts::FRAC_PI_4;
        let s = t / 2.0;

        let sup = superoperator(&sigma_x(), &[]);
        let prop = |m: &DMatrix<C64>, tau: f64| {
            let v = (&sup * c(tau)).exp() * vec_of(m);
            DMatrix::from_column_slice(2, 2, v.as_slice())
        };
        let measured = dephase(&prop(&dephase(&prop(&rho0.to_matrix(), s)), t - s));
        let unmeasured = dephase(&prop(&rho0.to_matrix(), t));
        let oracle = trace_norm_diagonal(&(measured - unmeasured)).unwrap();
        // cos⁴(π/8) + sin⁴(π/8) − cos²(π/4) = 1/4 per outcome
        assert!((oracle - 0.5).abs() < 1e-12);

        let got = generalized_c(&gen, &basis, &rho0, s, t).unwrap();
        assert!((got - oracle).abs() < 1e-10);
        assert!((generalized_k(&gen, &basis, &rho0, s, t).unwrap() - oracle).abs() < 1e-10);
    }

    #[test]
    fn joint_probability_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let gen = random_generator(4, 1, &mut rng);
        let basis = ObservableBasis::numbered(4);
        let rho0 = random_diagonal_state(4, &mut rng);
        let (s, t) = (0.4, 1.1);
        let table = regression_joint_table(&gen, &basis, &rho0, s, t).unwrap();
        let total: f64 = table.iter().flatten().sum();
        assert!((total - 1.0).abs() < 1e-10);
        let p_s = one_time_probabilities(&gen, &rho0, s).unwrap();
        for y in 0..4 {
            let col: f64 = (0..4).map(|x| table[x][y]).sum();
            assert!((col - p_s[y]).abs() < 1e-10);
            for x in 0..4 {
                let single = regression_joint(&gen, &basis, &rho0, x, t, y, s).unwrap();
                assert!((single - table[x][y]).abs() < 1e-14);
                assert!((-1e-12..=1.0 + 1e-12).contains(&single));
            }
        }
        // equal times: repeated instantaneous measurement
        for x in 0..4 {
            for y in 0..4 {
                let j = regression_joint(&gen, &basis, &rho0, x, s, y, s).unwrap();
                let expect = if x == y { p_s[y] } else { 0.0 };
                assert!((j - expect).abs() < 1e-14);
            }
        }
        assert!(matches!(regression_joint(&gen, &basis, &rho0, 0, 0.5, 0, 0.6), Err(Error::InvalidTimes { .. })));
        assert!(generalized_k(&gen, &basis, &rho0, t, t).unwrap() < 1e-12);
    }

    #[test]
    fn pure_dephasing_generates_nothing() {
        let gen = pure_dephasing_generator(&[0.0, 0.4, -1.2], &[0.5, 1.0, 0.2]).unwrap();
        let basis = ObservableBasis::numbered(3);
        let rho0 = DiagonalInitialState::new(vec![0.2, 0.5, 0.3]).unwrap();
        assert!(generalized_c(&gen, &basis, &rho0, 0.7, 2.0).unwrap() < 1e-14);
        assert!(generalized_k(&gen, &basis, &rho0, 0.7, 2.0).unwrap() < 1e-14);
    }

    #[test]
    fn walk_embedding_reproduces_steps_and_quantifiers() {
        let cfg = WalkConfig::new(33.0, 6, 3, 0, InitialCoin::Mixture(0.3)).unwrap();
        let (gen, basis, rho0) = walk_embedding(&cfg).unwrap();
        for n in [1usize, 3, 6] {
            let p = one_time_probabilities(&gen, &rho0, n as f64).unwrap();
            let walk = one_time_distribution(&cfg, n).unwrap();
            for (a, b) in p.iter().zip(walk.values()) {
                assert!((a - b).abs() < 1e-10, "n={n}");
            }
        }
        let rho = evolve(&initial_density(&cfg), &cfg, 2).unwrap();
        let via_gen = gen.propagate_matrix(&initial_density(&cfg).into_entries(), 2.0).unwrap();
        assert!(max_abs((via_gen - rho.entries()).iter()) < 1e-10);

        let k = generalized_k(&gen, &basis, &rho0, 3.0, 6.0).unwrap();
        let cg = generalized_c(&gen, &basis, &rho0, 3.0, 6.0).unwrap();
        assert!((k - kolmogorov_k(&cfg).unwrap()).abs() < 1e-9);
        assert!((cg - coherence_c_superop(&cfg).unwrap()).abs() < 1e-9);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn propagation_is_trace_preserving_and_positive(seed in any::<u64>(), d in 2usize..=8, jumps in 0usize..=2, t in 0.0f64..5.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let gen = random_generator(d, jumps, &mut rng);
            let rho0 = DensityMatrix::new(random_diagonal_state(d, &mut rng).to_matrix()).unwrap();
            let rho = lindblad_propagate(&gen, &rho0, t).unwrap();
            prop_assert!((rho.trace() - 1.0).abs() < 1e-10);
            prop_assert!(rho.min_eigenvalue() >= -1e-10);
            let traceless = lindblad_apply(&gen, rho.entries()).unwrap().trace();
            prop_assert!(traceless.norm() < 1e-12);
        }

        #[test]
        fn semigroup(seed in any::<u64>(), d in 2usize..=5, t1 in 0.0f64..2.0, t2 in 0.0f64..2.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let gen = random_generator(d, 2, &mut rng);
            let rho0 = random_diagonal_state(d, &mut rng).to_matrix();
            let once = gen.propagate_matrix(&rho0, t1 + t2).unwrap();
            let twice = gen.propagate_matrix(&gen.propagate_matrix(&rho0, t1).unwrap(), t2).unwrap();
            prop_assert!(max_abs((once - twice).iter()) < 1e-9);
        }

        #[test]
        fn generalized_identity(seed in any::<u64>(), d in 2usize..=6, jumps in 0usize..=2, s in 0.0f64..2.0, dt in 0.0f64..2.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let gen = random_generator(d, jumps, &mut rng);
            let basis = ObservableBasis::numbered(d);
            let rho0 = random_diagonal_state(d, &mut rng);
            let k = generalized_k(&gen, &basis, &rho0, s, s + dt).unwrap();
            let cg = generalized_c(&gen, &basis, &rho0, s, s + dt).unwrap();
            prop_assert!((k - cg).abs() <= 1e-10, "K={} C={}", k, cg);
        }
    }
}
