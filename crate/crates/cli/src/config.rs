//! Flat `key = value` configuration files with dotted section prefixes.
//!
//! Example:
//!
//! ```text
//! seed = 42
//! truth.d = 3
//! truth.rank = 1
//! truth.link = sobolev
//! truth.sobolev_k = 2
//! noise.kind = gaussian
//! noise.sigma = 0.5
//! data.n = 500
//! chain.iterations = 20000
//! ```
//!
//! Unknown keys are rejected so typos cannot silently change an experiment.

use std::path::PathBuf;

use sixm_core::datagen::{LinkSpec, NoiseKind, NoiseSpec};

use crate::CliError;

#[derive(Debug, Clone)]
pub struct TruthConfig {
    pub d: usize,
    pub rank: usize,
    pub c: f64,
    pub link: LinkSpec,
}

#[derive(Debug, Clone)]
pub struct ChainConfig {
    pub iterations: usize,
    /// 0 means the default 20% of iterations.
    pub burn_in: usize,
    pub thin: usize,
    pub chains: usize,
}

impl ChainConfig {
    pub fn effective_burn_in(&self) -> usize {
        if self.burn_in == 0 {
            self.iterations / 5
        } else {
            self.burn_in
        }
    }
}

#[derive(Debug, Clone)]
pub struct ValidateConfig {
    pub small_ball_draws: usize,
    pub toy_steps: usize,
    pub pythagoras_draws: usize,
    pub pythagoras_pairs: usize,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub workers: usize,
    pub out_dir: Option<PathBuf>,
    pub truth: TruthConfig,
    pub noise: NoiseSpec,
    pub n: usize,
    pub data_file: Option<PathBuf>,
    /// Override for the sub-exponential scale constant; defaults to the
    /// noise kind's certified value.
    pub big_l: Option<f64>,
    pub decay_base: f64,
    /// 0 means the full range `1..=n`.
    pub m_max: usize,
    pub chain: ChainConfig,
    pub risk_n_mc: usize,
    pub rate_n_grid: Vec<usize>,
    pub rate_replicates: usize,
    pub contract_epsilons: Vec<f64>,
    pub validate: ValidateConfig,
    pub flip_mh_sign: bool,
}

impl ExperimentConfig {
    /// The `L` constant fed to the temperature schedule.
    pub fn effective_big_l(&self) -> f64 {
        self.big_l
            .unwrap_or_else(|| self.noise.assumption_constants().1)
            .max(1e-6)
    }

    pub fn effective_m_max(&self) -> usize {
        if self.m_max == 0 {
            self.n
        } else {
            self.m_max
        }
    }
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, CliError> {
    // Defaults; seed and truth dimensions must be provided.
    let mut seed: Option<u64> = None;
    let mut workers = 1usize;
    let mut out_dir: Option<PathBuf> = None;
    let mut d: Option<usize> = None;
    let mut rank = 1usize;
    let mut c = 1.0f64;
    let mut link_kind = String::from("constant");
    let mut link_constant = 0.5f64;
    let mut link_gain = 2.0f64;
    let mut link_coefficients: Vec<f64> = Vec::new();
    let mut sobolev_k = 2u32;
    let mut sobolev_m = 16usize;
    let mut noise_kind = NoiseKind::Gaussian;
    let mut sigma = 0.5f64;
    let mut n: Option<usize> = None;
    let mut data_file: Option<PathBuf> = None;
    let mut big_l: Option<f64> = None;
    let mut decay_base = 10.0f64;
    let mut m_max = 0usize;
    let mut iterations = 20_000usize;
    let mut burn_in = 0usize;
    let mut thin = 10usize;
    let mut chains = 4usize;
    let mut risk_n_mc = 10_000usize;
    let mut rate_n_grid = vec![100usize, 300, 1000, 3000];
    let mut rate_replicates = 8usize;
    let mut contract_epsilons = vec![0.5f64, 0.3, 0.2, 0.1];
    let mut small_ball_draws = 2_000_000usize;
    let mut toy_steps = 2_000_000usize;
    let mut pythagoras_draws = 200_000usize;
    let mut pythagoras_pairs = 5usize;
    let mut flip_mh_sign = false;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Config(format!("line {}: expected `key = value`", lineno + 1))
        })?;
        let key = key.trim();
        let value = value.trim();
        if value.is_empty() {
            return Err(CliError::Config(format!(
                "line {}: key `{key}` has an empty value",
                lineno + 1
            )));
        }
        let bad = |what: &str| {
            CliError::Config(format!(
                "line {}: cannot parse `{value}` as {what} for `{key}`",
                lineno + 1
            ))
        };
        match key {
            "seed" => seed = Some(value.parse().map_err(|_| bad("integer"))?),
            "workers" => workers = value.parse().map_err(|_| bad("integer"))?,
            "out_dir" => out_dir = Some(PathBuf::from(value)),
            "truth.d" => d = Some(value.parse().map_err(|_| bad("integer"))?),
            "truth.rank" => rank = value.parse().map_err(|_| bad("integer"))?,
            "truth.c" => c = value.parse().map_err(|_| bad("float"))?,
            "truth.link" => link_kind = value.to_string(),
            "truth.constant" => link_constant = value.parse().map_err(|_| bad("float"))?,
            "truth.gain" => link_gain = value.parse().map_err(|_| bad("float"))?,
            "truth.coefficients" => {
                link_coefficients = parse_float_list(value).ok_or_else(|| bad("float list"))?
            }
            "truth.sobolev_k" => sobolev_k = value.parse().map_err(|_| bad("integer"))?,
            "truth.sobolev_m" => sobolev_m = value.parse().map_err(|_| bad("integer"))?,
            "noise.kind" => {
                noise_kind = NoiseKind::parse(value)
                    .map_err(|e| CliError::Config(format!("line {}: {e}", lineno + 1)))?
            }
            "noise.sigma" => sigma = value.parse().map_err(|_| bad("float"))?,
            "data.n" => n = Some(value.parse().map_err(|_| bad("integer"))?),
            "data.file" => data_file = Some(PathBuf::from(value)),
            "constants.big_l" => big_l = Some(value.parse().map_err(|_| bad("float"))?),
            "prior.decay_base" => decay_base = value.parse().map_err(|_| bad("float"))?,
            "prior.m_max" => m_max = value.parse().map_err(|_| bad("integer"))?,
            "chain.iterations" => iterations = value.parse().map_err(|_| bad("integer"))?,
            "chain.burn_in" => burn_in = value.parse().map_err(|_| bad("integer"))?,
            "chain.thin" => thin = value.parse().map_err(|_| bad("integer"))?,
            "chain.chains" => chains = value.parse().map_err(|_| bad("integer"))?,
            "risk.n_mc" => risk_n_mc = value.parse().map_err(|_| bad("integer"))?,
            "rate.n_grid" => {
                rate_n_grid = parse_usize_list(value).ok_or_else(|| bad("integer list"))?
            }
            "rate.replicates" => rate_replicates = value.parse().map_err(|_| bad("integer"))?,
            "contract.epsilons" => {
                contract_epsilons = parse_float_list(value).ok_or_else(|| bad("float list"))?
            }
            "validate.small_ball_draws" => {
                small_ball_draws = value.parse().map_err(|_| bad("integer"))?
            }
            "validate.toy_steps" => toy_steps = value.parse().map_err(|_| bad("integer"))?,
            "validate.pythagoras_draws" => {
                pythagoras_draws = value.parse().map_err(|_| bad("integer"))?
            }
            "validate.pythagoras_pairs" => {
                pythagoras_pairs = value.parse().map_err(|_| bad("integer"))?
            }
            "debug.flip_mh_sign" => {
                flip_mh_sign = value.parse().map_err(|_| bad("boolean"))?
            }
            other => {
                return Err(CliError::Config(format!(
                    "line {}: unknown configuration key `{other}`",
                    lineno + 1
                )))
            }
        }
    }

    let seed = seed.ok_or_else(|| CliError::Config("missing mandatory key `seed`".into()))?;
    let d = d.ok_or_else(|| CliError::Config("missing mandatory key `truth.d`".into()))?;
    let n = n.ok_or_else(|| CliError::Config("missing mandatory key `data.n`".into()))?;

    let link = match link_kind.as_str() {
        "constant" => LinkSpec::Constant(link_constant),
        "tanh" => LinkSpec::Tanh { gain: link_gain },
        "coefficients" => {
            if link_coefficients.is_empty() {
                return Err(CliError::Config(
                    "truth.link = coefficients requires truth.coefficients".into(),
                ));
            }
            LinkSpec::Coefficients(link_coefficients)
        }
        "sobolev" => LinkSpec::SobolevDecay {
            k: sobolev_k,
            m: sobolev_m,
        },
        other => {
            return Err(CliError::Config(format!(
                "unknown truth.link `{other}` (expected constant | tanh | coefficients | sobolev)"
            )))
        }
    };

    let noise = NoiseSpec::new(noise_kind, sigma)
        .map_err(|e| CliError::Config(format!("noise: {e}")))?;

    Ok(ExperimentConfig {
        seed,
        workers,
        out_dir,
        truth: TruthConfig { d, rank, c, link },
        noise,
        n,
        data_file,
        big_l,
        decay_base,
        m_max,
        chain: ChainConfig {
            iterations,
            burn_in,
            thin,
            chains,
        },
        risk_n_mc,
        rate_n_grid,
        rate_replicates,
        contract_epsilons,
        validate: ValidateConfig {
            small_ball_draws,
            toy_steps,
            pythagoras_draws,
            pythagoras_pairs,
        },
        flip_mh_sign,
    })
}

fn parse_float_list(s: &str) -> Option<Vec<f64>> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().ok())
        .collect()
}

fn parse_usize_list(s: &str) -> Option<Vec<usize>> {
    s.split(',')
        .map(|p| p.trim().parse::<usize>().ok())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "seed = 1\ntruth.d = 2\ndata.n = 50\n";

    #[test]
    fn minimal_config_parses_with_defaults() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.seed, 1);
        assert_eq!(cfg.truth.d, 2);
        assert_eq!(cfg.n, 50);
        assert_eq!(cfg.chain.iterations, 20_000);
        assert_eq!(cfg.chain.effective_burn_in(), 4_000);
        assert_eq!(cfg.effective_m_max(), 50);
        assert!((cfg.effective_big_l() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn unknown_key_is_rejected() {
        let err = parse_config("seed = 1\ntruth.d = 2\ndata.n = 5\nchain.iters = 7\n");
        assert!(matches!(err, Err(CliError::Config(_))));
    }

    #[test]
    fn missing_seed_is_rejected() {
        let err = parse_config("truth.d = 2\ndata.n = 5\n");
        let msg = format!("{}", err.unwrap_err());
        assert!(msg.contains("seed"), "{msg}");
    }

    #[test]
    fn comments_and_lists_parse() {
        let text = "seed = 7 # master seed\ntruth.d = 3\ndata.n = 100\n\
                    rate.n_grid = 10, 20, 40\ncontract.epsilons = 0.5,0.25\n\
                    truth.link = sobolev\ntruth.sobolev_k = 3\n";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.rate_n_grid, vec![10, 20, 40]);
        assert_eq!(cfg.contract_epsilons, vec![0.5, 0.25]);
        assert!(matches!(cfg.truth.link, LinkSpec::SobolevDecay { k: 3, m: 16 }));
    }

    #[test]
    fn sigma_zero_keeps_schedule_valid() {
        let cfg = parse_config("seed = 1\ntruth.d = 2\ndata.n = 50\nnoise.sigma = 0\n").unwrap();
        assert!(cfg.effective_big_l() > 0.0);
    }
}
