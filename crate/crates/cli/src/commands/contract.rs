//! `contract`: posterior-contraction study. The literal contraction event
//! of the theory involves an unknown leading constant, so contraction is
//! verified as shrinkage of posterior excess-risk quantiles with n: the
//! thresholds are data-driven quantiles of the smallest-n posterior, and
//! the report tracks how much posterior mass falls below them as n grows.

use std::fmt::Write as _;
use std::path::Path;

use sixm_core::datagen::fmt_f64;
use sixm_core::diagnostics::{mean_and_stderr, quantile};

use crate::config::ExperimentConfig;
use crate::study::{run_study, StudyResult};
use crate::CliError;

pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    if cfg.contract_epsilons.len() != cfg.rate_n_grid.len() {
        return Err(CliError::Config(format!(
            "contract.epsilons needs one entry per grid point ({} vs {})",
            cfg.contract_epsilons.len(),
            cfg.rate_n_grid.len()
        )));
    }
    if cfg.contract_epsilons.iter().any(|&e| e <= 0.0) {
        return Err(CliError::Config("epsilons must be positive".into()));
    }
    let study = run_study(cfg)?;
    let table = contraction_table(cfg, &study);
    super::write_text(&out.join("contraction.csv"), &contraction_csv(&table))?;

    let mut summary = String::new();
    let _ = writeln!(summary, "contraction study summary");
    for row in &table {
        let _ = writeln!(
            summary,
            "  n = {:>6}: eps = {}, mass(excess <= {}) = {} (se {}), q90 = {} (se {}), bound {}",
            row.n,
            fmt_f64(row.epsilon),
            fmt_f64(row.threshold),
            fmt_f64(row.mass),
            fmt_f64(row.mass_se),
            fmt_f64(row.q90_mean),
            fmt_f64(row.q90_se),
            if row.bound_satisfied { "met" } else { "missed" }
        );
    }
    super::write_text(&out.join("summary.txt"), &summary)?;
    print!("{summary}");
    Ok(())
}

#[derive(Debug, Clone)]
pub struct ContractionRow {
    pub n: usize,
    pub epsilon: f64,
    /// Excess-risk threshold: the `(1 - eps)` quantile of the baseline
    /// (smallest n) pooled posterior; infinite for eps >= 1 (the bound is
    /// trivially satisfied there).
    pub threshold: f64,
    /// Posterior mass below the threshold (mean over replicates).
    pub mass: f64,
    pub mass_se: f64,
    pub q50_mean: f64,
    pub q90_mean: f64,
    pub q90_se: f64,
    /// Whether `mass >= 1 - eps`.
    pub bound_satisfied: bool,
}

pub fn contraction_table(cfg: &ExperimentConfig, study: &StudyResult) -> Vec<ContractionRow> {
    let baseline = study.points[0].pooled_excess();
    study
        .points
        .iter()
        .zip(&cfg.contract_epsilons)
        .map(|(p, &eps)| {
            let threshold = if eps >= 1.0 {
                f64::INFINITY
            } else {
                quantile(&baseline, 1.0 - eps)
            };
            let fractions: Vec<f64> = p
                .replicates
                .iter()
                .map(|r| {
                    r.draw_excess.iter().filter(|&&e| e <= threshold).count() as f64
                        / r.draw_excess.len() as f64
                })
                .collect();
            let (mass, mass_se) = mean_and_stderr(&fractions);
            let q50s: Vec<f64> = p.replicates.iter().map(|r| r.q50).collect();
            let (q50_mean, _) = mean_and_stderr(&q50s);
            ContractionRow {
                n: p.n,
                epsilon: eps,
                threshold,
                mass,
                mass_se,
                q50_mean,
                q90_mean: p.q90_mean,
                q90_se: p.q90_se,
                bound_satisfied: mass >= 1.0 - eps,
            }
        })
        .collect()
}

pub fn contraction_csv(rows: &[ContractionRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# sixm-contraction v1");
    let _ = writeln!(
        out,
        "n,epsilon,threshold,mass,mass_stderr,q50_mean,q90_mean,q90_stderr,bound_satisfied"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.n,
            fmt_f64(r.epsilon),
            fmt_f64(r.threshold),
            fmt_f64(r.mass),
            fmt_f64(r.mass_se),
            fmt_f64(r.q50_mean),
            fmt_f64(r.q90_mean),
            fmt_f64(r.q90_se),
            u8::from(r.bound_satisfied)
        );
    }
    out
}
