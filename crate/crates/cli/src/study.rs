//! Replicated multi-`n` study shared by the rate and contraction commands.
//!
//! One fixed truth; for every sample size in the grid, `replicates`
//! independent datasets are fitted. Each fit is summarized by the
//! Monte-Carlo excess risk of its posterior draws, scored against a design
//! sample shared across the whole study (the same evaluator for every fit
//! removes scoring noise from between-fit comparisons).

use sixm_core::datagen::generate;
use sixm_core::diagnostics::{least_squares_slope, mean_and_stderr, quantile};
use sixm_core::risk::ExcessEvaluator;
use sixm_core::sampler::GibbsTarget;
use sixm_core::sampler::{run_chains, ChainSettings};
use sixm_core::seed::{derive_seed, rng_substream, STREAM_MC, STREAM_REPLICATE_BASE};

use crate::config::ExperimentConfig;
use crate::pipeline::{build_truth, constants_for, prior_for};
use crate::CliError;

/// Cap on the number of draws scored per fit.
const MAX_SCORED_DRAWS: usize = 400;

/// Summary of one replicate fit.
#[derive(Debug, Clone)]
pub struct ReplicateSummary {
    pub mean_excess: f64,
    pub q50: f64,
    pub q90: f64,
    pub rhat: f64,
    /// Per-draw excess estimates of the scored draws.
    pub draw_excess: Vec<f64>,
}

/// Aggregated results at one sample size.
#[derive(Debug, Clone)]
pub struct NPointSummary {
    pub n: usize,
    pub lambda: f64,
    pub replicates: Vec<ReplicateSummary>,
    pub mean_excess: f64,
    pub mean_excess_se: f64,
    pub q90_mean: f64,
    pub q90_se: f64,
}

impl NPointSummary {
    /// All scored per-draw excess values pooled over replicates.
    pub fn pooled_excess(&self) -> Vec<f64> {
        self.replicates
            .iter()
            .flat_map(|r| r.draw_excess.iter().cloned())
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct StudyResult {
    pub points: Vec<NPointSummary>,
    /// Least-squares slope of log excess against log n.
    pub slope: f64,
    pub slope_se: f64,
    pub intercept: f64,
}

pub fn run_study(cfg: &ExperimentConfig) -> Result<StudyResult, CliError> {
    if cfg.rate_n_grid.len() < 2 {
        return Err(CliError::Config(
            "rate study needs at least two grid points".into(),
        ));
    }
    if !cfg.rate_n_grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(CliError::Config(
            "rate.n_grid must be strictly increasing".into(),
        ));
    }
    if cfg.rate_replicates == 0 {
        return Err(CliError::Config("rate.replicates must be >= 1".into()));
    }
    let truth = build_truth(cfg)?;
    let mut mc_rng = rng_substream(cfg.seed, STREAM_MC);
    let evaluator = ExcessEvaluator::new(&truth, cfg.risk_n_mc, &mut mc_rng)?;

    let reps = cfg.rate_replicates;
    let tasks = cfg.rate_n_grid.len() * reps;
    let results: Vec<Result<ReplicateSummary, CliError>> =
        sixm_core::parallel::map_indexed(tasks, cfg.workers, |task| {
            let n_idx = task / reps;
            let rep = task % reps;
            let n = cfg.rate_n_grid[n_idx];
            let rep_seed = derive_seed(
                cfg.seed,
                STREAM_REPLICATE_BASE + (n_idx as u64) * 4096 + rep as u64,
            );
            run_one_fit(cfg, &truth, &evaluator, n, rep_seed)
        });

    let mut points = Vec::with_capacity(cfg.rate_n_grid.len());
    for (n_idx, &n) in cfg.rate_n_grid.iter().enumerate() {
        let mut replicates = Vec::with_capacity(reps);
        for rep in 0..reps {
            match &results[n_idx * reps + rep] {
                Ok(s) => replicates.push(s.clone()),
                Err(e) => return Err(CliError::Config(format!("fit n={n} rep={rep}: {e}"))),
            }
        }
        let means: Vec<f64> = replicates.iter().map(|r| r.mean_excess).collect();
        let q90s: Vec<f64> = replicates.iter().map(|r| r.q90).collect();
        let (mean_excess, mean_excess_se) = mean_and_stderr(&means);
        let (q90_mean, q90_se) = mean_and_stderr(&q90s);
        points.push(NPointSummary {
            n,
            lambda: constants_for(cfg, n)?.lambda,
            replicates,
            mean_excess,
            mean_excess_se,
            q90_mean,
            q90_se,
        });
    }

    let xs: Vec<f64> = points.iter().map(|p| (p.n as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.mean_excess.max(1e-300).ln()).collect();
    let (slope, intercept, slope_se) = least_squares_slope(&xs, &ys);
    Ok(StudyResult {
        points,
        slope,
        slope_se,
        intercept,
    })
}

fn run_one_fit(
    cfg: &ExperimentConfig,
    truth: &sixm_core::datagen::TruthSpec,
    evaluator: &ExcessEvaluator,
    n: usize,
    rep_seed: u64,
) -> Result<ReplicateSummary, CliError> {
    let data = generate(truth, n, &cfg.noise, derive_seed(rep_seed, 0x10))?;
    let constants = constants_for(cfg, n)?;
    let prior = prior_for(cfg, n)?;
    let target = GibbsTarget::new(&data, &constants, &prior)?;
    let settings = ChainSettings::new(
        cfg.chain.iterations,
        cfg.chain.effective_burn_in(),
        cfg.chain.thin,
        rep_seed,
    )?;
    // Chains run serially inside a fit; parallelism lives at the replicate
    // level.
    let multi = run_chains(&target, &settings, cfg.chain.chains, 1)?;
    let draws = multi.merged_draws();
    let step = (draws.len() / MAX_SCORED_DRAWS).max(1);
    let budget = prior.coefficient_budget();
    let mut draw_excess = Vec::with_capacity(draws.len() / step + 1);
    for dr in draws.iter().step_by(step) {
        let (e, _) = evaluator.excess(&dr.dense_b(cfg.truth.d), &dr.link(budget))?;
        draw_excess.push(e);
    }
    let (mean_excess, _) = mean_and_stderr(&draw_excess);
    Ok(ReplicateSummary {
        mean_excess,
        q50: quantile(&draw_excess, 0.5),
        q90: quantile(&draw_excess, 0.9),
        rhat: multi.rhat_emp_risk,
        draw_excess,
    })
}
