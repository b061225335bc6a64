//! The invariant suite behind `mdprolate verify`.
//!
//! Without a band file the suite runs on three built-in desk-scale
//! configurations: two intervals on 256 samples, two boxes on a 16x16 grid
//! and two parallelograms of the same total measure on a 16x16 grid.

use std::process::ExitCode;

use faer::Mat;
use mdprolate::bandspec::{
    BandConfig, CubicBand, CubicBandUnion, ParallelepipedBand, ParallelepipedUnion, SamplingGrid,
};
use mdprolate::dictionary::{approx_mse, Sizing, SubspaceBasis};
use mdprolate::linalg;
use mdprolate::mdoperator::{
    self, apply_cubic, gap_bound_2d, materialize_cubic, separable_spectrum, transition_count,
    DenseCovariance, OperatorSpec,
};
use mdprolate::parallelepiped::{pp_center_invariance, pp_materialize, PPOperatorSpec};
use mdprolate::prolate::{
    self, cross_band_gram_1d, pseudo_residual_1d, GRAM_BOUND_MIN_SIZE, RESIDUAL_BOUND_SLACK,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::approx::default_rank;
use crate::config::RunConfig;
use crate::dict::dictionary_rows;
use crate::error::CliError;
use crate::report::{emit_report, grid_label, ReportRow};

const TRACE_TOL: f64 = 1e-9;
const RANGE_TOL: f64 = 1e-10;
const HERMITIAN_TOL: f64 = 1e-12;
const APPLY_TOL: f64 = 1e-10;
const IDENTITY_TOL: f64 = 1e-8;
const SEPARABLE_TOL: f64 = 1e-9;
const INVARIANCE_TOL: f64 = 1e-9;
const MSE_TOL: f64 = 0.1;
const DICT_EPS: f64 = 0.2;

fn default_config() -> BandConfig {
    BandConfig {
        dim: 2,
        cubic: vec![
            CubicBand::new(vec![-0.2, -0.15], vec![0.12, 0.1]),
            CubicBand::new(vec![0.2, 0.2], vec![0.1, 0.12]),
        ],
        parallelepiped: vec![
            ParallelepipedBand::new(1.0, 0.5, 0.0, 1.0, [0.12, 0.1], [-0.2, -0.15]),
            ParallelepipedBand::new(1.0, 0.0, 0.4, 1.0, [0.12, 0.1], [0.2, 0.2]),
        ],
        grid: Some(vec![16, 16]),
    }
}

fn default_grid(dim: usize) -> Vec<usize> {
    match dim {
        1 => vec![256],
        2 => vec![16, 16],
        _ => vec![8; dim],
    }
}

struct Suite<'a> {
    cfg: &'a RunConfig,
    corrupt: Option<f64>,
    rows: Vec<ReportRow>,
}

impl Suite<'_> {
    fn materialized(&self, mut cov: DenseCovariance) -> DenseCovariance {
        if let Some(delta) = self.corrupt {
            cov.corrupt(delta);
        }
        cov
    }

    fn push_at_most(&mut self, exp: &str, params: &str, metric: &str, value: f64, tol: f64) {
        self.rows.push(ReportRow::at_most(exp, params, metric, value, tol));
    }

    fn push_at_least(&mut self, exp: &str, params: &str, metric: &str, value: f64, tol: f64) {
        self.rows.push(ReportRow::at_least(exp, params, metric, value, tol));
    }

    /// Checks every operator matrix must pass.
    fn operator_rows(&mut self, exp: &str, params: &str, cov: &DenseCovariance) -> Result<Vec<f64>, CliError> {
        self.push_at_most(exp, params, "hermitian_defect", hermitian_defect(cov), HERMITIAN_TOL);
        let eigs = mdoperator::eigenvalues(cov)?;
        let sum: f64 = eigs.iter().sum();
        let expected = cov.expected_trace();
        self.push_at_most(exp, params, "trace_relative_error", (cov.trace() - expected).abs() / expected, TRACE_TOL);
        self.push_at_most(exp, params, "eigenvalue_sum_relative_error", (sum - expected).abs() / expected, TRACE_TOL);
        self.push_at_least(exp, params, "min_eigenvalue", eigs[eigs.len() - 1], -RANGE_TOL);
        self.push_at_most(exp, params, "max_eigenvalue", eigs[0], 1.0 + RANGE_TOL);

        let gap = prolate::GapReport::from_matrix(cov.matrix(), None);
        let direct: f64 = eigs.iter().map(|x| x * (1.0 - x)).sum();
        self.push_at_most(exp, params, "frobenius_identity_error", (gap.gap - direct).abs(), IDENTITY_TOL);
        Ok(eigs)
    }

    fn mse_rows(&mut self, exp: &str, params: &str, cov: &DenseCovariance, measures: &[f64]) -> Result<(), CliError> {
        let spectrum = mdoperator::spectrum(cov)?;
        let p = default_rank(cov.size(), measures, DICT_EPS);
        let basis = if p == 0 {
            SubspaceBasis::trivial((cov.dims()[0], cov.size() / cov.dims()[0]))
        } else {
            SubspaceBasis::leading(&spectrum, p)?
        };
        let report = approx_mse(&basis, &spectrum, self.cfg.trials, self.cfg.seed)?;
        self.push_at_most(exp, &format!("{params};p={p};trials={}", self.cfg.trials), "mse_relative_error", report.relative_error(), MSE_TOL);
        Ok(())
    }

    fn one_d(&mut self, union: &CubicBandUnion, n: usize) -> Result<(), CliError> {
        let params = format!("{};J={}", grid_label(&[n]), union.len());
        let spec = OperatorSpec::new(SamplingGrid::new(vec![n])?, union.clone())?;
        let cov = self.materialized(materialize_cubic(&spec)?);
        self.operator_rows("prolate", &params, &cov)?;
        let gap = prolate::GapReport::from_matrix(cov.matrix(), None);
        let bound = prolate::gap_bound_1d(n, union.len());
        self.push_at_most("prolate", &params, "gap_minus_bound", gap.gap - bound, 0.0);

        for (i, band) in union.bands().iter().enumerate() {
            let (c, w) = (band.center[0], band.half_widths[0]);
            let shifted = prolate::sinc_kernel(n, c, w)?.eigenvalues()?;
            let base = prolate::sinc_kernel(n, 0.0, w)?.eigenvalues()?;
            let dev = shifted.iter().zip(&base).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            self.push_at_most("prolate", &format!("{params};band={i}"), "band_pass_deviation", dev, SEPARABLE_TOL);
        }
        if n >= GRAM_BOUND_MIN_SIZE && union.len() > 1 {
            let eps = DICT_EPS;
            let gram = cross_band_gram_1d(n, union, eps)?;
            self.push_at_most("prolate", &params, "gram_bound_violations", gram.violations.len() as f64, 0.0);
        }
        let residual = pseudo_residual_1d(n, union, DICT_EPS)?;
        self.push_at_most("prolate", &params, "residual_bound_max_excess", residual.max_excess.max(0.0), RESIDUAL_BOUND_SLACK);
        Ok(())
    }

    fn cubic(&mut self, spec: &OperatorSpec) -> Result<(), CliError> {
        let params = format!("{};J={}", grid_label(spec.dims()), spec.bands().len());
        let cov = self.materialized(materialize_cubic(spec)?);
        let eigs = self.operator_rows("cubic", &params, &cov)?;
        let gap = prolate::GapReport::from_matrix(cov.matrix(), None);
        let size = spec.size();
        let ceiling = size - (size as f64 * spec.measure() + 1e-9).floor() as usize;
        self.push_at_most("cubic", &params, "transition_count", transition_count(&eigs, 0.05) as f64, ceiling as f64);

        let Ok((m, n)) = spec.grid().shape_2d() else {
            return Ok(());
        };
        self.push_at_most("cubic", &params, "gap_minus_bound", gap.gap - gap_bound_2d(m, n, spec.bands().len()), 0.0);

        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        let y = Mat::from_fn(m, n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let direct = apply_cubic(spec, y.as_ref())?;
        let via = linalg::unvectorize(&cov.apply_vec(&linalg::vectorize(y.as_ref())), m, n);
        let diff = Mat::from_fn(m, n, |i, j| direct[(i, j)] - via[(i, j)]);
        let rel = (linalg::frobenius_norm_sq(diff.as_ref()) / linalg::frobenius_norm_sq(direct.as_ref())).sqrt();
        self.push_at_most("cubic", &params, "apply_vs_materialized", rel, APPLY_TOL);

        for (i, band) in spec.bands().bands().iter().enumerate() {
            let dense = mdoperator::eigenvalues(&materialize_cubic(&spec.single_band(i))?)?;
            let sep = separable_spectrum(m, n, band)?;
            let dev = dense.iter().zip(sep.eigenvalues()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            self.push_at_most("cubic", &format!("{params};band={i}"), "separable_deviation", dev, SEPARABLE_TOL);
        }

        if let Ok(sizes) = Sizing::phi_covers_psi(spec, DICT_EPS) {
            self.rows.extend(dictionary_rows(spec, &sizes, 0.0, None)?);
        }
        let measures: Vec<f64> = spec.bands().bands().iter().map(|b| b.measure()).collect();
        self.mse_rows("cubic", &params, &cov, &measures)
    }

    fn parallelepiped(&mut self, spec: &PPOperatorSpec) -> Result<(), CliError> {
        let (m, n) = spec.grid().shape_2d()?;
        let params = format!("{};J={}", grid_label(&[m, n]), spec.bands().len());
        let cov = self.materialized(pp_materialize(spec)?);
        self.operator_rows("parallelepiped", &params, &cov)?;
        let gap = prolate::GapReport::from_matrix(cov.matrix(), None);
        self.push_at_most("parallelepiped", &params, "gap_minus_cubic_bound", gap.gap - gap_bound_2d(m, n, spec.bands().len()), 0.0);

        for (i, band) in spec.bands().bands().iter().enumerate() {
            let single = PPOperatorSpec::new(spec.grid().clone(), ParallelepipedUnion::new(vec![band.clone()])?)?;
            let centered = single.shifted(&[[-band.center[0], -band.center[1]]])?;
            let dev = pp_center_invariance(&single, &centered)?;
            self.push_at_most("parallelepiped", &format!("{params};band={i}"), "center_shift_deviation", dev, INVARIANCE_TOL);
        }
        let measures: Vec<f64> = spec.bands().bands().iter().map(|b| b.measure()).collect();
        self.mse_rows("parallelepiped", &params, &cov, &measures)
    }
}

fn hermitian_defect(cov: &DenseCovariance) -> f64 {
    let k = cov.matrix();
    let mut worst = 0.0_f64;
    for j in 0..k.ncols() {
        for i in 0..=j {
            worst = worst.max((k[(i, j)] - k[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn run(cfg: &RunConfig, corrupt: Option<f64>) -> Result<ExitCode, CliError> {
    let mut suite = Suite {
        cfg,
        corrupt,
        rows: Vec::new(),
    };
    let user = cfg.bands.is_some();
    let bands = cfg.bands.clone().unwrap_or_else(default_config);
    let dims = match (&cfg.grid, user) {
        (Some(g), _) => g.dims().to_vec(),
        (None, _) => default_grid(bands.dim),
    };
    if dims.len() != bands.dim {
        return Err(CliError::config(format!(
            "grid has {} axes but the bands are {}-dimensional",
            dims.len(),
            bands.dim
        )));
    }

    if !user {
        let two = CubicBandUnion::intervals(&[(-0.1, 0.05), (0.2, 0.05)])?;
        suite.one_d(&two, 256)?;
    }
    if !bands.cubic.is_empty() {
        let union = bands.cubic_union()?;
        if bands.dim == 1 {
            suite.one_d(&union, dims[0])?;
        } else {
            suite.cubic(&OperatorSpec::new(SamplingGrid::new(dims.clone())?, union)?)?;
        }
    }
    if !bands.parallelepiped.is_empty() {
        let spec = PPOperatorSpec::new(SamplingGrid::new(dims)?, bands.parallelepiped_union()?)?;
        suite.parallelepiped(&spec)?;
    }
    emit_report(cfg, "verify_report", suite.rows)
}
