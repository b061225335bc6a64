use std::path::Path;
use std::process::ExitCode;

use mdprolate::export;
use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::error::CliError;

/// How a row's value is compared with its tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    /// Passes when `value <= tolerance`.
    AtMost,
    /// Passes when `value >= tolerance`.
    AtLeast,
}

/// One line of a check report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub experiment: String,
    pub parameters: String,
    pub metric: String,
    pub value: f64,
    pub tolerance: f64,
    pub check: Check,
    pub pass: bool,
}

impl ReportRow {
    pub fn at_most(experiment: &str, parameters: &str, metric: &str, value: f64, tolerance: f64) -> Self {
        Self::new(experiment, parameters, metric, value, tolerance, Check::AtMost)
    }

    pub fn at_least(experiment: &str, parameters: &str, metric: &str, value: f64, tolerance: f64) -> Self {
        Self::new(experiment, parameters, metric, value, tolerance, Check::AtLeast)
    }

    fn new(
        experiment: &str,
        parameters: &str,
        metric: &str,
        value: f64,
        tolerance: f64,
        check: Check,
    ) -> Self {
        let pass = value.is_finite()
            && match check {
                Check::AtMost => value <= tolerance,
                Check::AtLeast => value >= tolerance,
            };
        ReportRow {
            experiment: experiment.to_owned(),
            parameters: parameters.to_owned(),
            metric: metric.to_owned(),
            value,
            tolerance,
            check,
            pass,
        }
    }
}

/// Sorts by experiment then parameters; rows of one experiment and
/// parameter set keep their emission order.
pub fn sort_rows(rows: &mut [ReportRow]) {
    rows.sort_by(|a, b| {
        (a.experiment.as_str(), a.parameters.as_str()).cmp(&(b.experiment.as_str(), b.parameters.as_str()))
    });
}

pub fn rows_csv(rows: &[ReportRow]) -> Result<String, CliError> {
    export::ensure_finite(rows.iter().map(|r| &r.value), "report value")?;
    export::ensure_finite(rows.iter().map(|r| &r.tolerance), "report tolerance")?;
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.experiment.clone(),
                r.parameters.clone(),
                r.metric.clone(),
                export::format_f64(r.value),
                export::format_f64(r.tolerance),
                match r.check {
                    Check::AtMost => "at_most".into(),
                    Check::AtLeast => "at_least".into(),
                },
                r.pass.to_string(),
            ]
        })
        .collect();
    Ok(export::table_csv(
        &["experiment", "parameters", "metric", "value", "tolerance", "check", "pass"],
        &table,
    )?)
}

/// Writes or prints a report and turns it into an exit code.
pub fn emit_report(cfg: &RunConfig, stem: &str, mut rows: Vec<ReportRow>) -> Result<ExitCode, CliError> {
    sort_rows(&mut rows);
    let body = match cfg.format {
        Format::Csv => rows_csv(&rows)?,
        Format::Json => export::to_json(&rows)?,
    };
    write_or_print(cfg, stem, &body)?;
    Ok(if rows.iter().all(|r| r.pass) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

pub fn extension(format: Format) -> &'static str {
    match format {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

/// `{out}/{stem}.{ext}` when `--out` is set, stdout otherwise.
pub fn write_or_print(cfg: &RunConfig, stem: &str, body: &str) -> Result<(), CliError> {
    match &cfg.out {
        Some(dir) => write_file(dir, &format!("{stem}.{}", extension(cfg.format)), body),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

pub fn write_file(dir: &Path, name: &str, body: &str) -> Result<(), CliError> {
    Ok(export::write_atomic(&dir.join(name), body)?)
}

/// `M=..,N=..` style label for a grid.
pub fn grid_label(dims: &[usize]) -> String {
    const AXES: [&str; 3] = ["M", "N", "P"];
    dims.iter()
        .zip(AXES)
        .map(|(n, a)| format!("{a}={n}"))
        .collect::<Vec<_>>()
        .join(";")
}
