// Copyright 2026 The qwalk Authors
// SPDX-License-Identifier: Apache-2.0

//! TOML experiment configuration.
//!
//! ```toml
//! [walk]
//! theta_deg = 23.0
//! N = 20
//! M = 10
//! x0 = 0
//! initial = "V"      # or: p = 0.3 (probability of H)
//!
//! [loss]
//! eta_h = 0.98
//! eta_v = 1.0
//! residual = 0.02
//! residual_model = "randomizing"
//!
//! [montecarlo]
//! samples = 1000
//! seed = 7
//!
//! [output]
//! directory = "out"
//! formats = ["csv", "svg"]
//! ```

use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use qwalk_core::lindblad::{
    random_diagonal_state, random_generator, walk_embedding, DiagonalInitialState, JumpOperator, LindbladGenerator,
    ObservableBasis,
};
use qwalk_core::montecarlo::{LossModel, PerturbationSpec};
use qwalk_core::{Coin, InitialCoin, WalkConfig, C64};

use crate::error::CliError;

/// Used when neither the command line nor the config names a directory.
pub const OUTPUT_DIR_ENV: &str = "QWALK_OUTPUT_DIR";

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub walk: Option<WalkSection>,
    pub loss: Option<LossModel>,
    pub montecarlo: Option<PerturbationSpec>,
    pub lindblad: Option<LindbladSection>,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WalkSection {
    pub theta_deg: f64,
    #[serde(rename = "N", alias = "n")]
    pub steps: usize,
    #[serde(rename = "M", alias = "m")]
    pub intermediate: usize,
    #[serde(default)]
    pub x0: i64,
    pub initial: Option<Coin>,
    pub p: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Svg,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub directory: Option<PathBuf>,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
    #[serde(default)]
    pub dense: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { directory: None, formats: default_formats(), dense: false }
    }
}

fn default_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Svg]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LindbladSource {
    Matrices,
    Walk,
    Random,
}

/// Complex matrix as rows of `[re, im]` pairs.
pub type MatrixEntries = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpSection {
    pub rate: f64,
    pub operator: MatrixEntries,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LindbladSection {
    pub source: LindbladSource,
    pub hamiltonian: Option<MatrixEntries>,
    #[serde(default)]
    pub jumps: Vec<JumpSection>,
    pub labels: Option<Vec<String>>,
    pub populations: Option<Vec<f64>>,
    pub s: Option<f64>,
    pub t: Option<f64>,
    pub dimension: Option<usize>,
    pub jump_count: Option<usize>,
    #[serde(default)]
    pub seed: u64,
}

/// A generator, its observable and initial state, and the two times.
pub struct LindbladProblem {
    pub generator: LindbladGenerator,
    pub basis: ObservableBasis,
    pub rho0: DiagonalInitialState,
    pub s: f64,
    pub t: f64,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<(Self, Vec<u8>), CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let text = std::str::from_utf8(&bytes)
            .map_err(|e| CliError::Config(format!("{}: not UTF-8: {e}", path.display())))?;
        let cfg = Self::parse(text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })?;
        Ok((cfg, bytes))
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn walk(&self) -> Result<WalkConfig, CliError> {
        let w = self.walk.as_ref().ok_or_else(|| CliError::Config("missing [walk] section".into()))?;
        w.to_config()
    }

    pub fn loss(&self) -> Result<LossModel, CliError> {
        let loss = self.loss.unwrap_or_default();
        loss.validate().map_err(|e| CliError::Config(format!("[loss]: {e}")))?;
        Ok(loss)
    }

    pub fn perturbation(&self) -> Result<PerturbationSpec, CliError> {
        let spec = self.montecarlo.unwrap_or_default();
        spec.validate().map_err(|e| CliError::Config(format!("[montecarlo]: {e}")))?;
        Ok(spec)
    }

    /// Output directory: explicit override, then `[output] directory`, then
    /// `$QWALK_OUTPUT_DIR`, then `qwalk-output`.
    pub fn output_dir(&self, overridden: Option<&Path>) -> PathBuf {
        overridden
            .map(Path::to_path_buf)
            .or_else(|| self.output.directory.clone())
            .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("qwalk-output"))
    }

    pub fn lindblad_problem(&self) -> Result<LindbladProblem, CliError> {
        let sec = self.lindblad.as_ref().ok_or_else(|| CliError::Config("missing [lindblad] section".into()))?;
        sec.build(self)
    }
}

impl WalkSection {
    pub fn initial_coin(&self) -> Result<InitialCoin, CliError> {
        match (self.initial, self.p) {
            (Some(c), None) => Ok(InitialCoin::pure(c)),
            (None, Some(p)) => Ok(InitialCoin::Mixture(p)),
            (Some(_), Some(_)) => Err(CliError::Config("[walk]: give either `initial` or `p`, not both".into())),
            (None, None) => Err(CliError::Config("[walk]: missing initial coin (`initial = \"H\"|\"V\"` or `p`)".into())),
        }
    }

    pub fn to_config(&self) -> Result<WalkConfig, CliError> {
        WalkConfig::new(self.theta_deg, self.steps, self.intermediate, self.x0, self.initial_coin()?)
            .map_err(|e| CliError::Config(format!("[walk]: {e}")))
    }
}

fn matrix(name: &str, entries: &MatrixEntries) -> Result<DMatrix<C64>, CliError> {
    let d = entries.len();
    if let Some((i, row)) = entries.iter().enumerate().find(|(_, r)| r.len() != d) {
        return Err(CliError::Config(format!(
            "[lindblad] {name}: row {i} has {} entries, expected {d}",
            row.len()
        )));
    }
    Ok(DMatrix::from_fn(d, d, |i, j| C64::new(entries[i][j][0], entries[i][j][1])))
}

impl LindbladSection {
    fn build(&self, cfg: &ExperimentConfig) -> Result<LindbladProblem, CliError> {
        let invalid = |e: qwalk_core::Error| CliError::Config(format!("[lindblad]: {e}"));
        let (generator, basis, rho0, default_times) = match self.source {
            LindbladSource::Walk => {
                let walk = cfg.walk()?;
                let (g, b, r) = walk_embedding(&walk).map_err(invalid)?;
                (g, b, r, Some((walk.intermediate() as f64, walk.steps() as f64)))
            }
            LindbladSource::Matrices => {
                let h = self
                    .hamiltonian
                    .as_ref()
                    .ok_or_else(|| CliError::Config("[lindblad]: source \"matrices\" needs `hamiltonian`".into()))?;
                let h = matrix("hamiltonian", h)?;
                let jumps = self
                    .jumps
                    .iter()
                    .enumerate()
                    .map(|(k, j)| Ok(JumpOperator { operator: matrix(&format!("jumps[{k}]"), &j.operator)?, rate: j.rate }))
                    .collect::<Result<Vec<_>, CliError>>()?;
                let d = h.nrows();
                let g = LindbladGenerator::new(h, jumps).map_err(invalid)?;
                let pops = self
                    .populations
                    .clone()
                    .ok_or_else(|| CliError::Config("[lindblad]: source \"matrices\" needs `populations`".into()))?;
                let r = DiagonalInitialState::new(pops).map_err(invalid)?;
                let b = match &self.labels {
                    Some(l) => ObservableBasis::new(l.clone()).map_err(invalid)?,
                    None => ObservableBasis::numbered(d),
                };
                (g, b, r, None)
            }
            LindbladSource::Random => {
                let d = self
                    .dimension
                    .ok_or_else(|| CliError::Config("[lindblad]: source \"random\" needs `dimension`".into()))?;
                if d == 0 {
                    return Err(CliError::Config("[lindblad]: dimension must be positive".into()));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                let g = random_generator(d, self.jump_count.unwrap_or(1), &mut rng);
                let r = match &self.populations {
                    Some(p) => DiagonalInitialState::new(p.clone()).map_err(invalid)?,
                    None => random_diagonal_state(d, &mut rng),
                };
                (g, ObservableBasis::numbered(d), r, None)
            }
        };
        if basis.dim() != generator.dim() || rho0.dim() != generator.dim() {
            return Err(CliError::Config(format!(
                "[lindblad]: generator has dimension {}, labels {}, populations {}",
                generator.dim(),
                basis.dim(),
                rho0.dim()
            )));
        }
        let (s, t) = match (self.s, self.t, default_times) {
            (Some(s), Some(t), _) => (s, t),
            (None, None, Some(st)) => st,
            (s, t, st) => (
                s.or(st.map(|x| x.0)).ok_or_else(|| CliError::Config("[lindblad]: missing `s`".into()))?,
                t.or(st.map(|x| x.1)).ok_or_else(|| CliError::Config("[lindblad]: missing `t`".into()))?,
            ),
        };
        if !(s >= 0.0 && s <= t && t.is_finite()) {
            return Err(CliError::Config(format!("[lindblad]: need 0 ≤ s ≤ t, got s = {s}, t = {t}")));
        }
        Ok(LindbladProblem { generator, basis, rho0, s, t })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_walk() {
        let cfg = ExperimentConfig::parse("[walk]\ntheta_deg = 45\nN = 2\nM = 1\ninitial = \"H\"\n").unwrap();
        let w = cfg.walk().unwrap();
        assert_eq!((w.steps(), w.intermediate(), w.x0()), (2, 1, 0));
        assert_eq!(w.initial(), InitialCoin::H);
        assert_eq!(cfg.output.formats, vec![Format::Csv, Format::Svg]);
        assert_eq!(cfg.loss().unwrap(), LossModel::ideal());
    }

    #[test]
    fn missing_walk_is_named() {
        let cfg = ExperimentConfig::parse("[output]\ndense = true\n").unwrap();
        let err = cfg.walk().unwrap_err();
        assert!(err.to_string().contains("[walk]"));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn initial_coin_exactly_once() {
        let both = ExperimentConfig::parse("[walk]\ntheta_deg = 1\nN = 2\nM = 1\ninitial = \"V\"\np = 0.5\n").unwrap();
        assert!(both.walk().is_err());
        let none = ExperimentConfig::parse("[walk]\ntheta_deg = 1\nN = 2\nM = 1\n").unwrap();
        assert!(none.walk().is_err());
        let mixed = ExperimentConfig::parse("[walk]\ntheta_deg = 1\nN = 2\nM = 1\np = 0.3\n").unwrap();
        assert_eq!(mixed.walk().unwrap().initial(), InitialCoin::Mixture(0.3));
    }

    #[test]
    fn unknown_field_reports_location() {
        let err = ExperimentConfig::parse("[walk]\ntheta_deg = 1\nN = 2\nM = 1\ninitial = \"V\"\nsteps = 4\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("steps") && msg.contains("line 6"), "{msg}");
    }

    #[test]
    fn lindblad_matrices() {
        let text = r#"
[lindblad]
source = "matrices"
hamiltonian = [[[0, 0], [1, 0]], [[1, 0], [0, 0]]]
populations = [1.0, 0.0]
labels = ["up", "down"]
s = 0.3
t = 0.9
[[lindblad.jumps]]
rate = 0.5
operator = [[[0, 0], [1, 0]], [[0, 0], [0, 0]]]
"#;
        let p = ExperimentConfig::parse(text).unwrap().lindblad_problem().unwrap();
        assert_eq!(p.generator.dim(), 2);
        assert_eq!(p.generator.jumps().len(), 1);
        assert_eq!(p.basis.labels(), &["up".to_string(), "down".to_string()]);
        assert_eq!((p.s, p.t), (0.3, 0.9));
    }

    #[test]
    fn lindblad_walk_defaults_to_walk_times() {
        let text = "[walk]\ntheta_deg = 30\nN = 4\nM = 2\ninitial = \"V\"\n[lindblad]\nsource = \"walk\"\n";
        let p = ExperimentConfig::parse(text).unwrap().lindblad_problem().unwrap();
        assert_eq!((p.s, p.t), (2.0, 4.0));
        assert_eq!(p.generator.dim(), 18);
    }

    #[test]
    fn lindblad_bad_shapes() {
        let ragged = "[lindblad]\nsource = \"matrices\"\nhamiltonian = [[[0, 0]], [[1, 0], [0, 0]]]\npopulations = [1, 0]\ns = 0\nt = 1\n";
        assert!(ExperimentConfig::parse(ragged).unwrap().lindblad_problem().is_err());
        let times = "[lindblad]\nsource = \"random\"\ndimension = 3\ns = 2\nt = 1\n";
        assert!(ExperimentConfig::parse(times).unwrap().lindblad_problem().is_err());
    }
}
