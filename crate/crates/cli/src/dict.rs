use std::process::ExitCode;

use mdprolate::dictionary::{
    self, orthonormalize, phi_from_spectrum, projection_residuals, psi_gram_bound,
    psi_residual_bound, Sizing,
};
use mdprolate::export;
use mdprolate::mdoperator::{self, OperatorSpec};
use mdprolate::prolate::{GRAM_BOUND_SLACK, RESIDUAL_BOUND_SLACK};

use crate::config::{RunConfig, SizingRule};
use crate::error::CliError;
use crate::report::{emit_report, grid_label, ReportRow};

/// Orthonormality tolerance for atoms that should be exactly orthonormal.
const ORTHO_TOL: f64 = 1e-9;

pub fn sizing(spec: &OperatorSpec, cfg: &RunConfig) -> Result<Sizing, CliError> {
    Ok(match &cfg.sizing {
        SizingRule::PhiCoversPsi => Sizing::phi_covers_psi(spec, cfg.eps)?,
        SizingRule::PsiCoversPhi => Sizing::psi_covers_phi(spec, cfg.eps)?,
        SizingRule::Explicit { p, q } => {
            let size = spec.size();
            if *p > size || q.iter().any(|&x| x > size) {
                return Err(CliError::config(format!(
                    "dictionary sizes must not exceed the {size} grid samples"
                )));
            }
            if q.len() != spec.bands().len() {
                return Err(CliError::config(format!(
                    "--q needs one count per band ({}), got {}",
                    spec.bands().len(),
                    q.len()
                )));
            }
            Sizing {
                p: *p,
                q: q.clone(),
            }
        }
    })
}

/// Rows comparing Φ and Ψ at the given sizing; shared with `verify`.
pub fn dictionary_rows(
    spec: &OperatorSpec,
    sizes: &Sizing,
    min_cos: f64,
    export_dir: Option<&std::path::Path>,
) -> Result<Vec<ReportRow>, CliError> {
    let cov = mdoperator::materialize_cubic(spec)?;
    let s = mdoperator::spectrum(&cov)?;
    let phi = phi_from_spectrum(spec, &s, sizes.p)?;
    let psi = dictionary::build_psi(spec, &sizes.q)?;
    if let Some(dir) = export_dir {
        export::write_dictionary(dir, "phi", &phi)?;
        export::write_dictionary(dir, "psi", &psi)?;
    }

    let q: Vec<String> = sizes.q.iter().map(ToString::to_string).collect();
    let params = format!("{};p={};q={}", grid_label(spec.dims()), sizes.p, q.join("/"));
    let row = |metric: &str, value: f64, tol: f64| ReportRow::at_most("dict", &params, metric, value, tol);
    let mut rows = Vec::new();

    if phi.is_empty() || psi.is_empty() {
        return Err(CliError::config("both dictionaries need at least one atom"));
    }
    let phi_basis = orthonormalize(&phi)?;
    let psi_basis = orthonormalize(&psi)?;
    let cos = dictionary::cos_theta(&phi_basis, &psi_basis)?;
    rows.push(ReportRow::at_least("dict", &params, "cos_theta", cos, min_cos));

    // Residuals of the smaller dictionary projected onto the larger span.
    let residuals = if phi_basis.rank() >= psi_basis.rank() {
        projection_residuals(&phi_basis, &psi)?
    } else {
        projection_residuals(&psi_basis, &phi)?
    };
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    rows.push(row("max_projection_residual", max_residual, 1.0 - min_cos * min_cos));

    rows.push(row("phi_orthonormality_defect", phi.orthonormality_defect(false), ORTHO_TOL));
    rows.push(row("psi_within_band_defect", psi.orthonormality_defect(true), ORTHO_TOL));

    let gram = psi_gram_bound(&psi);
    rows.push(ReportRow::at_least(
        "dict",
        &params,
        "psi_max_gram_offdiag",
        psi.max_cross_band_inner(),
        0.0,
    ));
    rows.push(row("psi_gram_bound_violations", gram.violations.len() as f64, 0.0));
    rows.push(row("psi_gram_bound_max_ratio", gram.max_ratio, 1.0 + GRAM_BOUND_SLACK));
    let residual = psi_residual_bound(spec, &psi)?;
    rows.push(row("psi_residual_bound_max_excess", residual.max_excess.max(0.0), RESIDUAL_BOUND_SLACK));
    Ok(rows)
}

pub fn run(cfg: &RunConfig, min_cos: f64, export_dicts: bool) -> Result<ExitCode, CliError> {
    if export_dicts && cfg.out.is_none() {
        return Err(CliError::config("--export needs --out"));
    }
    let spec = cfg.cubic_2d()?;
    let sizes = sizing(&spec, cfg)?;
    let rows = dictionary_rows(&spec, &sizes, min_cos, cfg.out.as_deref().filter(|_| export_dicts))?;
    emit_report(cfg, "dict_report", rows)
}
