//! `validate`: machine-checkable suites over the library's oracles.
//!
//! Four suites: the prior small-ball mass against its analytic lower
//! bound, grid-oracle versus chain agreement, the risk-decomposition
//! identity, and the discrete detailed-balance toy. The toy honors the
//! `debug.flip_mh_sign` negative control, which must make it fail.

use std::fmt::Write as _;
use std::path::Path;

use sixm_core::datagen::{fmt_f64, generate, make_truth, LinkSpec, NoiseKind, NoiseSpec};
use sixm_core::diagnostics::mc_stderr;
use sixm_core::prior::{
    sample_link_prior, sample_matrix_prior, small_ball_lower_bound, small_ball_probability_mc,
    PriorConfig,
};
use sixm_core::risk::{lambda_schedule, pythagoras_check};
use sixm_core::sampler::oracle::{exact_posterior_oracle, GridSpec};
use sixm_core::sampler::toy::{run_detailed_balance_toy, ToyConfig};
use sixm_core::sampler::{run_chains, ChainSettings, GibbsTarget, MhBug};
use sixm_core::seed::{derive_seed, rng_substream};

use crate::config::ExperimentConfig;
use crate::CliError;

#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub suite: String,
    pub metric: String,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    let results = run_suites(cfg)?;
    let mut csv = String::from("# sixm-validate v1\nsuite,metric,value,bound,pass\n");
    let mut summary = String::from("validation summary\n");
    for r in &results {
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            r.suite,
            r.metric,
            fmt_f64(r.value),
            fmt_f64(r.bound),
            u8::from(r.pass)
        );
        let _ = writeln!(
            summary,
            "  [{}] {}: {} = {} vs bound {}",
            if r.pass { "PASS" } else { "FAIL" },
            r.suite,
            r.metric,
            fmt_f64(r.value),
            fmt_f64(r.bound)
        );
    }
    super::write_text(&out.join("validate.csv"), &csv)?;
    super::write_text(&out.join("summary.txt"), &summary)?;
    print!("{summary}");
    let failures: Vec<&SuiteResult> = results.iter().filter(|r| !r.pass).collect();
    if !failures.is_empty() {
        return Err(CliError::Suite(format!(
            "{} of {} validation suites failed",
            failures.len(),
            results.len()
        )));
    }
    Ok(())
}

pub fn run_suites(cfg: &ExperimentConfig) -> Result<Vec<SuiteResult>, CliError> {
    let mut results = Vec::new();

    // Small-ball mass of the matrix prior around a drawn target, one-sided
    // confidence-aware comparison against the analytic lower bound.
    for d in [2usize, 3] {
        let prior = PriorConfig::new(d, 5, 1.0)?;
        let mut rng = rng_substream(cfg.seed, 0x50 + d as u64);
        let target_v = sixm_core::manifold::sample_haar_orthogonal(d, &mut rng)?;
        let target_g = sixm_core::manifold::sample_dirichlet(&prior.alpha, &mut rng)?;
        let draws = if d == 2 {
            cfg.validate.small_ball_draws
        } else {
            cfg.validate.small_ball_draws / 2
        };
        let (p, se) = small_ball_probability_mc(
            &prior, &target_v, &target_g, 0.25, 0.25, 1, draws, &mut rng,
        )?;
        let bound = small_ball_lower_bound(d, 1, 0.25);
        results.push(SuiteResult {
            suite: format!("small_ball_d{d}"),
            metric: "lower_confidence_bound".into(),
            value: p - 3.0 * se,
            bound,
            pass: p - 3.0 * se >= bound,
        });
    }

    // Grid oracle versus chain posterior mean (one-dimensional instance).
    {
        let n = 50;
        let mut rng = rng_substream(cfg.seed, 0x60);
        let truth = make_truth(1, 1, &LinkSpec::Constant(0.5), 1.0, &mut rng)?;
        let noise = NoiseSpec::new(NoiseKind::Gaussian, 0.3)?;
        let data = generate(&truth, n, &noise, derive_seed(cfg.seed, 0x61))?;
        let (s, l) = noise.assumption_constants();
        let constants = lambda_schedule(1.0, l, s, n)?;
        let prior = PriorConfig::new(1, n, 1.0)?.with_m_max(1)?;
        let grid = GridSpec {
            beta_cells: 2048,
            ..GridSpec::default()
        };
        let post = exact_posterior_oracle(&data, &constants, &prior, &grid)?;
        let oracle_mean = post.posterior_mean(|c| c.beta[0]);
        let target = GibbsTarget::new(&data, &constants, &prior)?;
        let mut settings = ChainSettings::new(32_000, 2_000, 5, derive_seed(cfg.seed, 0x62))?;
        settings.bug = bug_of(cfg);
        let multi = run_chains(&target, &settings, 2, cfg.workers)?;
        let vals: Vec<f64> = multi.merged_draws().iter().map(|d| d.beta[0]).collect();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let se = mc_stderr(&vals);
        results.push(SuiteResult {
            suite: "oracle_equivalence_d1".into(),
            metric: "abs_mean_difference".into(),
            value: (mean - oracle_mean).abs(),
            bound: 3.0 * se,
            pass: (mean - oracle_mean).abs() <= 3.0 * se,
        });
    }

    // Risk-decomposition identity under shared draws.
    {
        let mut rng = rng_substream(cfg.seed, 0x70);
        let truth = make_truth(2, 1, &LinkSpec::SobolevDecay { k: 2, m: 8 }, 1.0, &mut rng)?;
        let noise = NoiseSpec::new(NoiseKind::Gaussian, 0.5)?;
        let prior = PriorConfig::new(2, 10, 1.0)?;
        let mut worst = 0.0f64;
        for _ in 0..cfg.validate.pythagoras_pairs {
            let b = sample_matrix_prior(&prior, &mut rng)?;
            let f = sample_link_prior(&prior, &mut rng)?;
            let (disc, se) = pythagoras_check(
                &b,
                &f,
                &truth,
                &noise,
                cfg.validate.pythagoras_draws,
                &mut rng,
            )?;
            worst = worst.max(disc / (6.0 * se).max(1e-300));
        }
        results.push(SuiteResult {
            suite: "pythagoras".into(),
            metric: "max_discrepancy_over_6se".into(),
            value: worst,
            bound: 1.0,
            pass: worst <= 1.0,
        });
    }

    // Discrete detailed-balance toy (honors the negative control).
    {
        let report = run_detailed_balance_toy(&ToyConfig {
            steps: cfg.validate.toy_steps,
            seed: derive_seed(cfg.seed, 0x80),
            lambda: 2.0,
            bug: bug_of(cfg),
        });
        results.push(SuiteResult {
            suite: "detailed_balance_toy".into(),
            metric: "max_flow_asymmetry".into(),
            value: report.max_flow_asymmetry,
            bound: 1e-2,
            pass: report.max_flow_asymmetry < 1e-2 && report.kernel_consistent,
        });
    }

    Ok(results)
}

fn bug_of(cfg: &ExperimentConfig) -> MhBug {
    if cfg.flip_mh_sign {
        MhBug::FlipAcceptSign
    } else {
        MhBug::Off
    }
}
