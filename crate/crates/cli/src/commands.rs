// Copyright 2026 The qwalk Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};

use qwalk_core::lindblad::{generalized_c, generalized_k};
use qwalk_core::montecarlo::{sample_quantifiers_with, JitterShape};
use qwalk_core::quantifiers::{
    kolmogorov_k, parity_allowed_modes, randomizing_k, verify_identity, visualize_difference, IDENTITY_TOL,
};
use qwalk_core::walk::one_time_distribution;
use qwalk_core::{Coin, InitialCoin, Mode, QuantifierReport, WalkConfig};

use crate::config::{ExperimentConfig, LindbladSource};
use crate::error::CliError;
use crate::output::{num, Csv, OutputWriter, ZERO_ROW};
use crate::svg::{self, BarPanel, Marker, Point, Series};

/// Coin angles of the reference table, in degrees.
pub const TABLE_ANGLES: [f64; 6] = [0.0, 7.0, 11.0, 23.0, 34.0, 47.0];
const TABLE_STEPS: usize = 20;
const TABLE_INTERMEDIATE: usize = 10;
const PROBABILITY_SUM_TOL: f64 = 1e-10;

/// A loaded config plus where its outputs go.
pub struct Context {
    pub config: ExperimentConfig,
    pub config_path: PathBuf,
    pub config_bytes: Vec<u8>,
    pub output_dir: PathBuf,
    pub dense: bool,
}

impl Context {
    pub fn load(path: &Path, output: Option<&Path>, dense: bool) -> Result<Self, CliError> {
        let (config, config_bytes) = ExperimentConfig::load(path)?;
        let output_dir = config.output_dir(output);
        let dense = dense || config.output.dense;
        Ok(Context { config, config_path: path.to_path_buf(), config_bytes, output_dir, dense })
    }

    fn writer(&self, command: &str) -> Result<OutputWriter, CliError> {
        OutputWriter::create(&self.output_dir, &self.config.output.formats, command, &self.config_path, &self.config_bytes)
    }
}

fn coin_str(c: Coin) -> String {
    c.to_string()
}

fn probability_rows(modes: impl Iterator<Item = (Mode, f64)>) -> Csv {
    let mut csv = Csv::new(&["position", "coin", "probability"]);
    for (m, p) in modes {
        csv.row(&[m.position.to_string(), coin_str(m.coin), num(p)]);
    }
    csv
}

/// `(position, V, H)` triples for the bar charts.
fn bars(modes: &[(Mode, f64)]) -> Vec<(i64, f64, f64)> {
    let mut out: Vec<(i64, f64, f64)> = Vec::new();
    for (m, v) in modes {
        if out.last().map(|b| b.0) != Some(m.position) {
            out.push((m.position, 0.0, 0.0));
        }
        let last = out.last_mut().expect("just pushed");
        match m.coin {
            Coin::V => last.1 = *v,
            Coin::H => last.2 = *v,
        }
    }
    out
}

fn rows_for(cfg: &WalkConfig, steps: usize, dense: bool, values: &[f64], keep: impl Fn(usize) -> bool) -> Vec<(Mode, f64)> {
    let b = cfg.bounds();
    if dense {
        parity_allowed_modes(b, cfg.x0(), steps)
            .into_iter()
            .map(|m| (m, values[b.mode_index(m).expect("mode on lattice")]))
            .collect()
    } else {
        b.modes().enumerate().filter(|(i, _)| keep(*i)).map(|(i, m)| (m, values[i])).collect()
    }
}

pub fn simulate(ctx: &Context, steps: Option<usize>) -> Result<(), CliError> {
    let cfg = ctx.config.walk()?;
    let steps = steps.unwrap_or(cfg.steps());
    let dist = one_time_distribution(&cfg, steps)?;
    let total = dist.total();
    if (total - 1.0).abs() > PROBABILITY_SUM_TOL {
        return Err(CliError::Numerical(format!("probabilities sum to {total}")));
    }
    let values = dist.values();
    let rows = rows_for(&cfg, steps, ctx.dense, values, |i| values[i] > ZERO_ROW);

    let mut w = ctx.writer("simulate")?;
    let csv = w.csv("simulate.csv", probability_rows(rows.iter().copied()))?;
    w.svg("simulate.svg", || {
        svg::grouped_bars(
            "position x",
            &[BarPanel {
                title: format!("θ = {}°, initial {}, n = {steps}", cfg.theta_deg(), cfg.initial()),
                y_label: "P(x, c, n)".into(),
                bars: bars(&rows),
            }],
        )
    })?;
    println!("{} nonzero modes after {steps} steps, total probability {}", dist.support().count(), num(total));
    if let Some(p) = csv {
        println!("wrote {}", p.display());
    }
    finish(w)
}

fn report_row(csv: &mut Csv, r: &QuantifierReport) {
    csv.row(&[
        num(r.theta_deg),
        r.initial.to_string(),
        r.steps.to_string(),
        r.intermediate.to_string(),
        num(r.k),
        num(r.c_superop),
        num(r.c_prob),
    ]);
}

pub fn quantify(ctx: &Context, sweep: bool) -> Result<(), CliError> {
    let base = ctx.config.walk()?;
    let configs: Vec<WalkConfig> = if sweep {
        let mut v = Vec::new();
        for theta in TABLE_ANGLES {
            for coin in [Coin::V, Coin::H] {
                v.push(base.with_theta(theta).with_initial(InitialCoin::pure(coin))?);
            }
        }
        v
    } else {
        vec![base]
    };
    let reports = configs.iter().map(verify_identity).collect::<Result<Vec<_>, _>>()?;

    let mut csv = Csv::new(&["theta_deg", "initial", "N", "M", "K", "C_superop", "C_prob"]);
    for r in &reports {
        report_row(&mut csv, r);
        println!(
            "θ = {:>6}°  {:<6} K = {:.6}  C = {:.6}  |K − C| = {:.1e}",
            num(r.theta_deg),
            r.initial.to_string(),
            r.k,
            r.c_prob,
            (r.k - r.c_prob).abs()
        );
    }
    let mut w = ctx.writer("quantify")?;
    w.csv("quantify.csv", csv)?;
    w.svg("quantify.svg", || {
        let points: Vec<Point> = reports
            .iter()
            .map(|r| Point {
                x: r.c_prob,
                y: r.k,
                marker: if r.initial == InitialCoin::H { Marker::Circle } else { Marker::Cross },
            })
            .collect();
        svg::scatter_identity("non-classicality versus coherence", "C (coherence generated and detected)", "K (non-classicality)", &points)
    })?;
    finish(w)
}

pub fn table1(ctx: &Context) -> Result<(), CliError> {
    let base = ctx.config.walk()?;
    if base.steps() != TABLE_STEPS || base.intermediate() != TABLE_INTERMEDIATE {
        return Err(CliError::Config(format!(
            "[walk]: table1 requires N = {TABLE_STEPS} and M = {TABLE_INTERMEDIATE}, got N = {} and M = {}",
            base.steps(),
            base.intermediate()
        )));
    }
    let mut rows = Vec::new();
    for theta in TABLE_ANGLES {
        for coin in [Coin::V, Coin::H] {
            let cfg = base.with_theta(theta).with_initial(InitialCoin::pure(coin))?;
            rows.push((theta, coin, kolmogorov_k(&cfg)?, randomizing_k(&cfg)?));
        }
    }
    let mut csv = Csv::new(&["theta_deg", "initial", "K_theory", "K_randomizing"]);
    println!("{:>6}  {:<3} {:>9} {:>13}", "θ/deg", "c0", "theory", "randomizing");
    for (theta, coin, k, kr) in &rows {
        csv.row(&[num(*theta), coin_str(*coin), num(*k), num(*kr)]);
        println!("{theta:>6}  {coin:<3} {k:>9.3} {kr:>13.3}");
    }
    let mut w = ctx.writer("table1")?;
    w.csv("table1.csv", csv)?;
    w.svg("table1.svg", || {
        let series = |name: &str, color, pick: fn(&(f64, Coin, f64, f64)) -> f64| Series {
            name: name.to_string(),
            color,
            points: rows.iter().filter(|r| r.1 == Coin::V).map(|r| (r.0, pick(r))).collect(),
        };
        svg::line_plot(
            "K at N = 20, M = 10",
            "coin angle θ (deg)",
            "K",
            &[series("theory", svg::BLUE, |r| r.2), series("randomizing", svg::RED, |r| r.3)],
        )
    })?;
    finish(w)
}

pub fn visualize(ctx: &Context) -> Result<(), CliError> {
    let cfg = ctx.config.walk()?;
    if cfg.steps() % 2 != 0 {
        return Err(CliError::Config(format!(
            "visualize needs an even N because the intermediate measurement is taken at M = N/2; got N = {}",
            cfg.steps()
        )));
    }
    let tables = visualize_difference(&cfg)?;
    let a = tables.unmeasured.values();
    let b = tables.recombined.values();
    let c = tables.difference.values();
    let keep = |i: usize| a[i] > ZERO_ROW || b[i] > ZERO_ROW;
    let rows_a = rows_for(&cfg, cfg.steps(), ctx.dense, a, keep);
    let rows_b = rows_for(&cfg, cfg.steps(), ctx.dense, b, keep);
    let rows_c = rows_for(&cfg, cfg.steps(), ctx.dense, c, keep);

    let mut diff = Csv::new(&["position", "coin", "difference"]);
    for (m, d) in &rows_c {
        diff.row(&[m.position.to_string(), coin_str(m.coin), num(*d)]);
    }
    let mut w = ctx.writer("visualize")?;
    w.csv("visualize_a_unmeasured.csv", probability_rows(rows_a.iter().copied()))?;
    w.csv("visualize_b_recombined.csv", probability_rows(rows_b.iter().copied()))?;
    w.csv("visualize_c_difference.csv", diff)?;
    let n = cfg.steps();
    let init = cfg.initial();
    w.svg("visualize.svg", || {
        svg::grouped_bars(
            "position x",
            &[
                BarPanel {
                    title: format!("(a) P(x, c, {n}), initial {init}, θ = {}°", cfg.theta_deg()),
                    y_label: "probability".into(),
                    bars: bars(&rows_a),
                },
                BarPanel {
                    title: format!("(b) Σ P_y,c'(x, c, {}) P(y, c', {})", n / 2, n / 2),
                    y_label: "probability".into(),
                    bars: bars(&rows_b),
                },
                BarPanel { title: "(c) difference (b) − (a)".into(), y_label: "difference".into(), bars: bars(&rows_c) },
            ],
        )
    })?;
    println!("Σ|difference| = {}", num(tables.difference.l1_norm()));
    finish(w)
}

pub fn montecarlo(ctx: &Context, samples: Option<usize>, seed: Option<u64>) -> Result<(), CliError> {
    let cfg = ctx.config.walk()?;
    let loss = ctx.config.loss()?;
    let mut spec = ctx.config.perturbation()?;
    if let Some(n) = samples {
        spec.samples = n;
    }
    if let Some(s) = seed {
        spec.seed = s;
    }
    spec.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let bars = sample_quantifiers_with(&cfg, &loss, &spec)?;

    let shape = match spec.distribution {
        JitterShape::Gaussian => "gaussian",
        JitterShape::Uniform => "uniform",
    };
    let mut summary = Csv::new(&[
        "theta_deg", "initial", "N", "M", "samples", "seed", "distribution", "mean_K", "std_K", "mean_C", "std_C",
    ]);
    summary.row(&[
        num(cfg.theta_deg()),
        cfg.initial().to_string(),
        cfg.steps().to_string(),
        cfg.intermediate().to_string(),
        spec.samples.to_string(),
        spec.seed.to_string(),
        shape.to_string(),
        num(bars.mean_k),
        num(bars.std_k),
        num(bars.mean_c),
        num(bars.std_c),
    ]);
    let mut per_sample = Csv::new(&["sample", "theta_deg", "eta_h", "eta_v", "residual", "K", "C"]);
    for s in &bars.samples {
        per_sample.row(&[s.index.to_string(), num(s.theta_deg), num(s.eta_h), num(s.eta_v), num(s.residual), num(s.k), num(s.c)]);
    }
    let mut w = ctx.writer("montecarlo")?;
    w.set_seed(spec.seed);
    w.csv("montecarlo_summary.csv", summary)?;
    w.csv("montecarlo_samples.csv", per_sample)?;
    println!(
        "{} samples: K = {:.4} ± {:.4}, C = {:.4} ± {:.4}",
        spec.samples, bars.mean_k, bars.std_k, bars.mean_c, bars.std_c
    );
    finish(w)
}

pub fn lindblad_check(ctx: &Context) -> Result<(), CliError> {
    let problem = ctx.config.lindblad_problem()?;
    let section = ctx.config.lindblad.as_ref().expect("problem built from the section");
    let k = generalized_k(&problem.generator, &problem.basis, &problem.rho0, problem.s, problem.t)?;
    let c = generalized_c(&problem.generator, &problem.basis, &problem.rho0, problem.s, problem.t)?;
    let reference = match section.source {
        LindbladSource::Walk => Some(kolmogorov_k(&ctx.config.walk()?)?),
        _ => None,
    };
    let source = match section.source {
        LindbladSource::Matrices => "matrices",
        LindbladSource::Walk => "walk",
        LindbladSource::Random => "random",
    };
    let mut csv = Csv::new(&["source", "dimension", "jumps", "s", "t", "K", "C", "abs_difference", "walk_K"]);
    csv.row(&[
        source.to_string(),
        problem.generator.dim().to_string(),
        problem.generator.jumps().len().to_string(),
        num(problem.s),
        num(problem.t),
        num(k),
        num(c),
        num((k - c).abs()),
        reference.map(num).unwrap_or_default(),
    ]);
    let mut w = ctx.writer("lindblad-check")?;
    if section.source == LindbladSource::Random {
        w.set_seed(section.seed);
    }
    w.csv("lindblad_check.csv", csv)?;
    println!("K = {}  C = {}  |K − C| = {:.3e}", num(k), num(c), (k - c).abs());
    if let Some(r) = reference {
        println!("walk-module K = {}  |difference| = {:.3e}", num(r), (k - r).abs());
    }
    finish(w)?;
    if (k - c).abs() > IDENTITY_TOL {
        return Err(CliError::Numerical(format!("generalized K = {k} and C = {c} differ by more than {IDENTITY_TOL:e}")));
    }
    Ok(())
}

fn finish(w: OutputWriter) -> Result<(), CliError> {
    let files: Vec<PathBuf> = w.files().collect();
    let manifest = w.finish()?;
    for f in files {
        println!("  {}", f.display());
    }
    println!("manifest: {}", manifest.display());
    Ok(())
}
