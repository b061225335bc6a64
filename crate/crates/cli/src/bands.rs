use std::path::Path;
use std::process::ExitCode;

use mdprolate::export;
use serde::Serialize;

use crate::config::load_bands;
use crate::error::CliError;

#[derive(Serialize)]
struct Validated {
    valid: bool,
    dim: usize,
    cubic: usize,
    parallelepiped: usize,
    measure: f64,
}

/// Prints a short summary of a valid band file; invalid files exit with
/// code 2 and the list of violations.
pub fn validate(path: &Path) -> Result<ExitCode, CliError> {
    let bands = load_bands(path)?;
    let cubic = if bands.cubic.is_empty() {
        0.0
    } else {
        bands.cubic_union()?.measure()
    };
    let pp = if bands.parallelepiped.is_empty() {
        0.0
    } else {
        bands.parallelepiped_union()?.measure()
    };
    print!(
        "{}",
        export::to_json(&Validated {
            valid: true,
            dim: bands.dim,
            cubic: bands.cubic.len(),
            parallelepiped: bands.parallelepiped.len(),
            measure: cubic + pp,
        })?
    );
    Ok(ExitCode::SUCCESS)
}
