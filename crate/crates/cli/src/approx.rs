use std::process::ExitCode;

use mdprolate::dictionary::{approx_mse, SubspaceBasis};
use mdprolate::mdoperator;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::report::{emit_report, grid_label, ReportRow};

/// `Σ_i ⌈size · ‖W_i‖ (1 + ε)⌉`.
pub fn default_rank(size: usize, measures: &[f64], eps: f64) -> usize {
    measures
        .iter()
        .map(|m| (size as f64 * m * (1.0 + eps) - 1e-9).ceil() as usize)
        .sum::<usize>()
        .min(size)
}

pub fn run(cfg: &RunConfig, p: Option<usize>, tolerance: f64) -> Result<ExitCode, CliError> {
    let problem = cfg.problem()?;
    let cov = problem.materialize()?;
    let size = cov.size();
    let p = p.unwrap_or_else(|| default_rank(size, &problem.band_measures(), cfg.eps));
    if p > size {
        return Err(CliError::config(format!("p = {p} exceeds the {size} grid samples")));
    }
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(CliError::config("tolerance must be positive"));
    }
    let spectrum = mdoperator::spectrum(&cov)?;
    let basis = if p == 0 {
        let dims = spectrum.dims();
        SubspaceBasis::trivial((dims[0], size / dims[0]))
    } else {
        SubspaceBasis::leading(&spectrum, p)?
    };
    let report = approx_mse(&basis, &spectrum, cfg.trials, cfg.seed)?;

    let params = format!(
        "{};kind={};p={p};trials={};seed={}",
        grid_label(problem.grid().dims()),
        problem.kind(),
        cfg.trials,
        cfg.seed
    );
    let rows = vec![
        ReportRow::at_least("approx", &params, "empirical_mse", report.empirical, 0.0),
        ReportRow::at_least("approx", &params, "analytic_tail", report.analytic, -1e-9),
        ReportRow::at_most("approx", &params, "relative_error", report.relative_error(), tolerance),
    ];
    emit_report(cfg, "approx_report", rows)
}
