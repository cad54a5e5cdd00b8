//! `rate`: replicated fits over a grid of sample sizes, excess-risk decay
//! curve with a fitted log-log slope.

use std::fmt::Write as _;
use std::path::Path;

use sixm_core::datagen::fmt_f64;

use crate::config::ExperimentConfig;
use crate::study::{run_study, StudyResult};
use crate::svg::{render, LogLogPlot};
use crate::CliError;

pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    if cfg.rate_n_grid.len() < 4 {
        return Err(CliError::Config(
            "rate study needs at least four grid points".into(),
        ));
    }
    let study = run_study(cfg)?;
    super::write_text(&out.join("rate.csv"), &rate_csv(&study))?;

    let points: Vec<(f64, f64, f64)> = study
        .points
        .iter()
        .map(|p| (p.n as f64, p.mean_excess, p.mean_excess_se))
        .collect();
    let plot = LogLogPlot {
        title: "posterior mean excess risk vs sample size",
        x_label: "n (log scale)",
        y_label: "excess risk (log scale)",
        points: &points,
        slope: study.slope,
        intercept: study.intercept,
    };
    super::write_text(&out.join("rate.svg"), &render(&plot))?;

    let mut summary = String::new();
    let _ = writeln!(summary, "rate study summary");
    let _ = writeln!(
        summary,
        "  replicates per n = {}, chains per fit = {}",
        cfg.rate_replicates, cfg.chain.chains
    );
    for p in &study.points {
        let _ = writeln!(
            summary,
            "  n = {:>6}: lambda = {}, mean excess = {} (se {})",
            p.n,
            fmt_f64(p.lambda),
            fmt_f64(p.mean_excess),
            fmt_f64(p.mean_excess_se)
        );
    }
    let _ = writeln!(
        summary,
        "  log-log slope = {} (se {}), 95% interval [{}, {}]",
        fmt_f64(study.slope),
        fmt_f64(study.slope_se),
        fmt_f64(study.slope - 2.0 * study.slope_se),
        fmt_f64(study.slope + 2.0 * study.slope_se)
    );
    let worst_rhat = study
        .points
        .iter()
        .flat_map(|p| p.replicates.iter().map(|r| r.rhat))
        .fold(f64::MIN, f64::max);
    let _ = writeln!(
        summary,
        "  worst split R-hat on r_n across fits = {}{}",
        fmt_f64(worst_rhat),
        if worst_rhat > 1.1 {
            "  (warning: above 1.1)"
        } else {
            ""
        }
    );
    super::write_text(&out.join("summary.txt"), &summary)?;
    print!("{summary}");
    Ok(())
}

pub fn rate_csv(study: &StudyResult) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# sixm-rate v1");
    let _ = writeln!(out, "# slope={}", fmt_f64(study.slope));
    let _ = writeln!(out, "# slope_stderr={}", fmt_f64(study.slope_se));
    let _ = writeln!(out, "# intercept={}", fmt_f64(study.intercept));
    let _ = writeln!(out, "n,lambda,mean_excess,stderr");
    for p in &study.points {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            p.n,
            fmt_f64(p.lambda),
            fmt_f64(p.mean_excess),
            fmt_f64(p.mean_excess_se)
        );
    }
    out
}
