//! Grid-oracle versus chain cross-validation on tiny instances.

use sixm_core::datagen::{generate, make_truth, LinkSpec, NoiseKind, NoiseSpec};
use sixm_core::diagnostics::mc_stderr;
use sixm_core::prior::PriorConfig;
use sixm_core::risk::lambda_schedule;
use sixm_core::sampler::oracle::{exact_posterior_oracle, GridSpec};
use sixm_core::sampler::{run_chains, ChainSettings, GibbsTarget};
use sixm_core::seed::rng_from_seed;

#[test]
fn d1_single_dimension_posterior_mean_matches_oracle() {
    let n = 50;
    let mut rng = rng_from_seed(300);
    let truth = make_truth(1, 1, &LinkSpec::Constant(0.5), 1.0, &mut rng).unwrap();
    let noise = NoiseSpec::new(NoiseKind::Gaussian, 0.3).unwrap();
    let data = generate(&truth, n, &noise, 11).unwrap();
    let (s, l) = noise.assumption_constants();
    let constants = lambda_schedule(1.0, l, s, n).unwrap();
    let prior = PriorConfig::new(1, n, 1.0).unwrap().with_m_max(1).unwrap();

    let grid = GridSpec {
        beta_cells: 4096,
        ..GridSpec::default()
    };
    let post = exact_posterior_oracle(&data, &constants, &prior, &grid).unwrap();
    assert!((post.total_weight() - 1.0).abs() < 1e-12);
    let oracle_mean = post.posterior_mean(|c| c.beta[0]);

    let target = GibbsTarget::new(&data, &constants, &prior).unwrap();
    let settings = ChainSettings::new(42_000, 2_000, 5, 7).unwrap();
    let multi = run_chains(&target, &settings, 2, 1).unwrap();
    let chain_vals: Vec<f64> = multi
        .merged_draws()
        .iter()
        .map(|d| d.beta[0])
        .collect();
    let chain_mean = chain_vals.iter().sum::<f64>() / chain_vals.len() as f64;
    let se = mc_stderr(&chain_vals);
    assert!(
        (chain_mean - oracle_mean).abs() <= 3.0 * se,
        "chain {chain_mean:.5} vs oracle {oracle_mean:.5}, se {se:.5}"
    );
}

#[test]
fn d2_posterior_mean_risk_matches_oracle() {
    let n = 40;
    let mut rng = rng_from_seed(301);
    let truth = make_truth(2, 1, &LinkSpec::Coefficients(vec![0.3, 0.3]), 1.0, &mut rng)
        .unwrap();
    let noise = NoiseSpec::new(NoiseKind::Gaussian, 0.3).unwrap();
    let data = generate(&truth, n, &noise, 13).unwrap();
    let (s, l) = noise.assumption_constants();
    let constants = lambda_schedule(1.0, l, s, n).unwrap();
    let prior = PriorConfig::new(2, n, 1.0).unwrap().with_m_max(2).unwrap();

    let grid = GridSpec {
        theta_cells: 24,
        g_cells: 24,
        beta_cells: 40,
        subgrid: 8,
    };
    let post = exact_posterior_oracle(&data, &constants, &prior, &grid).unwrap();
    let oracle_mean_risk = post.posterior_mean(|c| c.emp_risk);

    let target = GibbsTarget::new(&data, &constants, &prior).unwrap();
    let settings = ChainSettings::new(82_000, 2_000, 5, 9).unwrap();
    let multi = run_chains(&target, &settings, 2, 1).unwrap();
    let chain_vals: Vec<f64> = multi.merged_draws().iter().map(|d| d.emp_risk).collect();
    let chain_mean = chain_vals.iter().sum::<f64>() / chain_vals.len() as f64;
    let se = mc_stderr(&chain_vals);
    assert!(
        (chain_mean - oracle_mean_risk).abs() <= 3.0 * se,
        "chain {chain_mean:.5} vs oracle {oracle_mean_risk:.5}, se {se:.6}"
    );
}
