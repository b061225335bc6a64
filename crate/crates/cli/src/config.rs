use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::ValueEnum;
use mdprolate::bandspec::{BandConfig, SamplingGrid};
use mdprolate::mdoperator::{self, DenseCovariance, OperatorSpec};
use mdprolate::parallelepiped::{self, PPOperatorSpec};

use crate::error::CliError;

pub const THREADS_VAR: &str = "MDPROLATE_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SizingMode {
    /// p = Σ⌈MN‖W_i‖(1+ε)⌉, q_i = ⌊MN‖W_i‖(1-ε)⌋.
    PhiCoversPsi,
    /// p = Σ⌊MN‖W_i‖(1-ε)⌋, q_i = ⌈MN‖W_i‖(1+ε)⌉.
    PsiCoversPhi,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SizingRule {
    PhiCoversPsi,
    PsiCoversPhi,
    Explicit { p: usize, q: Vec<usize> },
}

impl From<SizingMode> for SizingRule {
    fn from(mode: SizingMode) -> Self {
        match mode {
            SizingMode::PhiCoversPsi => SizingRule::PhiCoversPsi,
            SizingMode::PsiCoversPhi => SizingRule::PsiCoversPhi,
        }
    }
}

/// `MxN`, `N` or `MxNxP`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridArg(pub Vec<usize>);

impl FromStr for GridArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(['x', 'X'])
            .map(|part| {
                part.trim()
                    .parse::<usize>()
                    .map_err(|_| format!("invalid grid `{s}`, expected e.g. 32x32"))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(GridArg)
    }
}

pub struct RunOptions {
    pub bands_path: Option<PathBuf>,
    pub grid: Option<GridArg>,
    pub eps: f64,
    pub sizing: SizingRule,
    pub trials: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
}

/// Validated settings shared by all subcommands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub bands: Option<BandConfig>,
    pub grid: Option<SamplingGrid>,
    pub eps: f64,
    pub sizing: SizingRule,
    pub trials: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
}

/// The operator a band file describes.
pub enum Problem {
    Cubic(OperatorSpec),
    Parallelepiped(PPOperatorSpec),
}

impl Problem {
    pub fn materialize(&self) -> Result<DenseCovariance, CliError> {
        Ok(match self {
            Problem::Cubic(spec) => mdoperator::materialize_cubic(spec)?,
            Problem::Parallelepiped(spec) => parallelepiped::pp_materialize(spec)?,
        })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Problem::Cubic(_) => "cubic",
            Problem::Parallelepiped(_) => "parallelepiped",
        }
    }

    pub fn grid(&self) -> &SamplingGrid {
        match self {
            Problem::Cubic(spec) => spec.grid(),
            Problem::Parallelepiped(spec) => spec.grid(),
        }
    }

    /// Measure of every band, in order.
    pub fn band_measures(&self) -> Vec<f64> {
        match self {
            Problem::Cubic(spec) => spec.bands().bands().iter().map(|b| b.measure()).collect(),
            Problem::Parallelepiped(spec) => {
                spec.bands().bands().iter().map(|b| b.measure()).collect()
            }
        }
    }
}

pub fn load_bands(path: &Path) -> Result<BandConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    let config = BandConfig::from_json(&text)?;
    config.validate().into_result()?;
    Ok(config)
}

impl RunConfig {
    pub fn new(opts: RunOptions) -> Result<Self, CliError> {
        if !(opts.eps > 0.0 && opts.eps < 0.5) {
            return Err(CliError::config(format!(
                "epsilon must lie in (0, 1/2), got {}",
                opts.eps
            )));
        }
        if opts.trials == 0 {
            return Err(CliError::config("trials must be at least 1"));
        }
        let bands = opts.bands_path.as_deref().map(load_bands).transpose()?;
        let grid = match opts.grid {
            Some(GridArg(dims)) => Some(SamplingGrid::new(dims)?),
            None => match &bands {
                Some(b) => b.sampling_grid()?,
                None => None,
            },
        };
        Ok(RunConfig {
            bands,
            grid,
            eps: opts.eps,
            sizing: opts.sizing,
            trials: opts.trials,
            seed: opts.seed,
            out: opts.out,
            format: opts.format,
        })
    }

    pub fn band_config(&self) -> Result<&BandConfig, CliError> {
        self.bands
            .as_ref()
            .ok_or_else(|| CliError::config("a band file is required (--config)"))
    }

    pub fn grid_or_error(&self) -> Result<&SamplingGrid, CliError> {
        self.grid.as_ref().ok_or_else(|| {
            CliError::config("no sampling grid: add \"grid\" to the band file or pass --grid")
        })
    }

    /// The single operator of the band file.
    pub fn problem(&self) -> Result<Problem, CliError> {
        let bands = self.band_config()?;
        let grid = self.grid_or_error()?.clone();
        match (bands.cubic.is_empty(), bands.parallelepiped.is_empty()) {
            (false, true) => Ok(Problem::Cubic(OperatorSpec::new(grid, bands.cubic_union()?)?)),
            (true, false) => Ok(Problem::Parallelepiped(PPOperatorSpec::new(
                grid,
                bands.parallelepiped_union()?,
            )?)),
            _ => Err(CliError::config(
                "band file must contain either cubic or parallelepiped bands, not both",
            )),
        }
    }

    /// A 2-D cubic operator, as dictionaries require.
    pub fn cubic_2d(&self) -> Result<OperatorSpec, CliError> {
        match self.problem()? {
            Problem::Cubic(spec) if spec.grid().dim() == 2 => Ok(spec),
            Problem::Cubic(spec) => Err(CliError::config(format!(
                "dictionaries need a 2-D grid, got {} axes",
                spec.grid().dim()
            ))),
            Problem::Parallelepiped(_) => {
                Err(CliError::config("dictionaries need cubic (box) bands"))
            }
        }
    }
}

/// Reads `MDPROLATE_THREADS` and caps parallelism accordingly.
pub fn apply_thread_limit() -> Result<(), CliError> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::config(format!("{THREADS_VAR} must be a positive integer, got `{value}`")))?;
    mdprolate::set_thread_limit(threads)?;
    Ok(())
}
