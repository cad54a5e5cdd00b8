//! `gen-data`: synthesize a dataset file from the config.

use std::path::Path;

use sixm_core::datagen::dataset_to_string;

use crate::config::ExperimentConfig;
use crate::pipeline::acquire_data;
use crate::CliError;

pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    let (truth, data) = acquire_data(cfg)?;
    let path = out.join("dataset.csv");
    super::write_text(&path, &dataset_to_string(&data, &truth))?;
    println!("wrote {} ({} observations, d = {})", path.display(), data.len(), data.d);
    Ok(())
}
