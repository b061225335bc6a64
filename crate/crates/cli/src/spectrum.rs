use std::process::ExitCode;

use mdprolate::export;
use mdprolate::mdoperator::{self, transition_count};
use mdprolate::prolate::{cluster_counts, ClusterCounts};
use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::error::CliError;
use crate::report::{write_file, write_or_print};

#[derive(Serialize)]
struct Summary {
    kind: &'static str,
    grid: Vec<usize>,
    bands: usize,
    measure: f64,
    trace: f64,
    eigenvalue_sum: f64,
    frob_sq: f64,
    gap: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    gap_bound: Option<f64>,
    eps: f64,
    cluster_counts: ClusterCounts,
    transition_count: usize,
}

#[derive(Serialize)]
struct Combined<'a> {
    summary: &'a Summary,
    eigenvalues: &'a [f64],
}

pub fn run(cfg: &RunConfig, vectors: bool) -> Result<ExitCode, CliError> {
    if vectors && cfg.out.is_none() {
        return Err(CliError::config("--vectors needs --out"));
    }
    let problem = cfg.problem()?;
    let cov = problem.materialize()?;
    let gap = mdoperator::trace_frobenius_gap(&cov)?;
    let (values, vecs) = if vectors {
        let s = mdoperator::spectrum(&cov)?;
        let m = faer::Mat::from_fn(s.size(), s.len(), |i, j| s.eigen_vector(j)[i]);
        (s.eigenvalues().to_vec(), Some(m))
    } else {
        (mdoperator::eigenvalues(&cov)?, None)
    };

    let summary = Summary {
        kind: problem.kind(),
        grid: problem.grid().dims().to_vec(),
        bands: cov.band_count(),
        measure: cov.measure(),
        trace: gap.trace,
        eigenvalue_sum: values.iter().sum(),
        frob_sq: gap.frob_sq,
        gap: gap.gap,
        gap_bound: gap.bound,
        eps: cfg.eps,
        cluster_counts: cluster_counts(&values, cfg.eps),
        transition_count: transition_count(&values, cfg.eps),
    };

    match (&cfg.out, cfg.format) {
        (Some(dir), format) => {
            let body = match format {
                Format::Csv => export::spectrum_csv(&values)?,
                Format::Json => export::to_json(&values)?,
            };
            write_or_print(cfg, "spectrum", &body)?;
            write_file(dir, "summary.json", &export::to_json(&summary)?)?;
            if let Some(m) = vecs {
                write_file(dir, "eigenvectors.csv", &export::eigenvectors_csv(m.as_ref())?)?;
            }
        }
        (None, Format::Csv) => print!("{}", export::spectrum_csv(&values)?),
        (None, Format::Json) => print!(
            "{}",
            export::to_json(&Combined {
                summary: &summary,
                eigenvalues: &values,
            })?
        ),
    }
    Ok(ExitCode::SUCCESS)
}
