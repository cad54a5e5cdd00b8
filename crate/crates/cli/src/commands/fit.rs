//! `fit`: run chains on one dataset, select the posterior-draw estimator,
//! report risks.

use std::fmt::Write as _;
use std::path::Path;

use sixm_core::datagen::fmt_f64;
use sixm_core::diagnostics::mean_and_stderr;
use sixm_core::risk::{ExcessEvaluator, RiskReport};
use sixm_core::sampler::{draw_estimator, draws_to_csv, MoveSlot};
use sixm_core::seed::{rng_substream, STREAM_ESTIMATOR, STREAM_MC};

use crate::config::ExperimentConfig;
use crate::pipeline::{acquire_data, constants_for, prior_for, run_configured_chains};
use crate::CliError;

pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    let (truth, data) = acquire_data(cfg)?;
    let constants = constants_for(cfg, data.len())?;
    let prior = prior_for(cfg, data.len())?;
    let multi = run_configured_chains(cfg, &data, &constants, &prior, cfg.seed, cfg.workers)?;
    let draws: Vec<_> = multi.merged_draws().into_iter().cloned().collect();

    // The estimator is a single posterior draw, selected uniformly.
    let mut est_rng = rng_substream(cfg.seed, STREAM_ESTIMATOR);
    let estimator = draw_estimator(&draws, &mut est_rng)?.clone();

    let mut mc_rng = rng_substream(cfg.seed, STREAM_MC);
    let evaluator = ExcessEvaluator::new(&truth, cfg.risk_n_mc, &mut mc_rng)?;
    let budget = prior.coefficient_budget();
    let (est_excess, est_se) = evaluator.excess(
        &estimator.dense_b(cfg.truth.d),
        &estimator.link(budget),
    )?;

    // Posterior summaries over (a subsample of) the retained draws.
    let step = (draws.len() / 400).max(1);
    let mut per_draw_excess = Vec::new();
    for dr in draws.iter().step_by(step) {
        per_draw_excess.push(
            evaluator
                .excess(&dr.dense_b(cfg.truth.d), &dr.link(budget))?
                .0,
        );
    }
    let (post_mean_excess, post_mean_excess_se) = mean_and_stderr(&per_draw_excess);
    let post_mean_risk =
        draws.iter().map(|d| d.emp_risk).sum::<f64>() / draws.len() as f64;

    let report = RiskReport {
        n: data.len(),
        d: cfg.truth.d,
        m: estimator.model_dimension(),
        lambda: constants.lambda,
        emp_risk: estimator.emp_risk,
        excess: est_excess,
        stderr: est_se,
        seed: cfg.seed,
    };
    super::write_text(
        &out.join("report.csv"),
        &format!("{}\n{}\n", RiskReport::CSV_HEADER, report.to_csv_row()),
    )?;
    super::write_text(
        &out.join("draws.csv"),
        &draws_to_csv(&draws, cfg.truth.d, cfg.seed),
    )?;

    let stats = multi.stats();
    let mut summary = String::new();
    let _ = writeln!(summary, "fit summary");
    let _ = writeln!(summary, "  n = {}, d = {}, seed = {}", data.len(), cfg.truth.d, cfg.seed);
    let _ = writeln!(
        summary,
        "  lambda = {} (w = {}, C1 = {})",
        fmt_f64(constants.lambda),
        fmt_f64(constants.w),
        fmt_f64(constants.c1)
    );
    let _ = writeln!(
        summary,
        "  chains = {}, iterations = {}, burn-in = {}, thin = {}, retained draws = {}",
        cfg.chain.chains,
        cfg.chain.iterations,
        cfg.chain.effective_burn_in(),
        cfg.chain.thin,
        draws.len()
    );
    let _ = writeln!(
        summary,
        "  split R-hat on r_n = {}{}",
        fmt_f64(multi.rhat_emp_risk),
        if multi.rhat_emp_risk > 1.1 {
            "  (warning: above 1.1, chains may not have mixed)"
        } else {
            ""
        }
    );
    for (name, slot) in [
        ("rotation", MoveSlot::Rotation),
        ("spectrum", MoveSlot::Spectrum),
        ("coefficient", MoveSlot::Coefficient),
        ("birth", MoveSlot::Birth),
        ("death", MoveSlot::Death),
    ] {
        let rate = stats.acceptance_rate(slot);
        if !rate.is_nan() {
            let _ = writeln!(
                summary,
                "  acceptance[{name}] = {:.3} ({} / {})",
                rate,
                stats.accepted[slot as usize],
                stats.proposed[slot as usize]
            );
        }
    }
    let _ = writeln!(
        summary,
        "  estimator: M = {}, r_n = {}, excess = {} (stderr {})",
        estimator.model_dimension(),
        fmt_f64(estimator.emp_risk),
        fmt_f64(est_excess),
        fmt_f64(est_se)
    );
    let _ = writeln!(
        summary,
        "  posterior mean r_n = {}",
        fmt_f64(post_mean_risk)
    );
    let _ = writeln!(
        summary,
        "  posterior mean excess = {} (stderr {}, {} draws scored)",
        fmt_f64(post_mean_excess),
        fmt_f64(post_mean_excess_se),
        per_draw_excess.len()
    );
    super::write_text(&out.join("summary.txt"), &summary)?;
    print!("{summary}");
    Ok(())
}
