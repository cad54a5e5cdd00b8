pub mod contract;
pub mod fit;
pub mod gendata;
pub mod rate;
pub mod validate;

use std::path::Path;

use crate::CliError;

/// Writes a file, mapping errors to the CLI error space.
pub(crate) fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}
