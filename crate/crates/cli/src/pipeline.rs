//! Shared fit pipeline: truth construction, data acquisition, constant
//! derivation, chain execution.

use sixm_core::datagen::{generate, make_truth, read_dataset, LabeledDataset, TruthSpec};
use sixm_core::prior::PriorConfig;
use sixm_core::risk::{lambda_schedule, ModelConstants};
use sixm_core::sampler::{run_chains, ChainSettings, MhBug, MultiChainRun, GibbsTarget};
use sixm_core::seed::{derive_seed, rng_substream, STREAM_DESIGN, STREAM_TRUTH};

use crate::config::ExperimentConfig;
use crate::CliError;

/// Builds the ground truth from the config, seeded by the truth substream
/// of the master seed.
pub fn build_truth(cfg: &ExperimentConfig) -> Result<TruthSpec, CliError> {
    let mut rng = rng_substream(cfg.seed, STREAM_TRUTH);
    Ok(make_truth(
        cfg.truth.d,
        cfg.truth.rank,
        &cfg.truth.link,
        cfg.truth.c,
        &mut rng,
    )?)
}

/// Either loads the dataset file named by the config or generates one.
/// Returns the truth actually in force (the file's, when loading).
pub fn acquire_data(cfg: &ExperimentConfig) -> Result<(TruthSpec, LabeledDataset), CliError> {
    if let Some(path) = &cfg.data_file {
        if !path.exists() {
            return Err(CliError::Config(format!(
                "dataset file not found: {}",
                path.display()
            )));
        }
        let (data, truth) = read_dataset(path)?;
        if data.len() != cfg.n {
            return Err(CliError::Config(format!(
                "dataset file has n = {} but config asks for n = {}",
                data.len(),
                cfg.n
            )));
        }
        return Ok((truth, data));
    }
    let truth = build_truth(cfg)?;
    let data_seed = derive_seed(cfg.seed, STREAM_DESIGN);
    let data = generate(&truth, cfg.n, &cfg.noise, data_seed)?;
    Ok((truth, data))
}

/// Derives the temperature schedule for sample size `n`.
pub fn constants_for(cfg: &ExperimentConfig, n: usize) -> Result<ModelConstants, CliError> {
    Ok(lambda_schedule(
        cfg.truth.c,
        cfg.effective_big_l(),
        cfg.noise.sigma,
        n,
    )?)
}

/// Prior configuration for sample size `n`.
pub fn prior_for(cfg: &ExperimentConfig, n: usize) -> Result<PriorConfig, CliError> {
    let prior = PriorConfig::new(cfg.truth.d, n, cfg.truth.c)?
        .with_decay_base(cfg.decay_base)?;
    let m_max = if cfg.m_max == 0 { n } else { cfg.m_max };
    Ok(prior.with_m_max(m_max.min(n))?)
}

/// Runs the configured number of chains against a dataset, seeding chains
/// from `chain_seed`.
pub fn run_configured_chains(
    cfg: &ExperimentConfig,
    data: &LabeledDataset,
    constants: &ModelConstants,
    prior: &PriorConfig,
    chain_seed: u64,
    workers: usize,
) -> Result<MultiChainRun, CliError> {
    let target = GibbsTarget::new(data, constants, prior)?;
    let mut settings = ChainSettings::new(
        cfg.chain.iterations,
        cfg.chain.effective_burn_in(),
        cfg.chain.thin,
        chain_seed,
    )?;
    settings.bug = if cfg.flip_mh_sign {
        MhBug::FlipAcceptSign
    } else {
        MhBug::Off
    };
    Ok(run_chains(&target, &settings, cfg.chain.chains, workers)?)
}
