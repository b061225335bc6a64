//! One-dimensional sinc kernels and discrete prolate spheroidal sequences.
//!
//! The covariance of `n` unit-spaced samples of a process whose power
//! spectrum is the indicator of a union of intervals `[f_i - W_i, f_i + W_i]`
//! is
//!
//! ```text
//! B[m, k] = Σ_i e^{j2π f_i (m-k)} sin(2π W_i (m-k)) / (π (m-k)),
//! ```
//!
//! with `2 Σ W_i` on the diagonal. For a single baseband interval its
//! eigenvectors are the DPSS; shifting the band to `f_c` multiplies each
//! eigenvector by `e^{j2π f_c m}` and leaves the eigenvalues alone.

use std::f64::consts::PI;

use faer::{Mat, MatRef};
use num_complex::Complex64;
use serde::Serialize;

use crate::bandspec::{CubicBandUnion, TOUCH_TOLERANCE};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};

/// Below this argument `sin(x)/x` is replaced by its limit.
pub const SINC_GUARD: f64 = 1e-8;

/// Size from which the cross-band DPSS correlation bound is enforced.
pub const GRAM_BOUND_MIN_SIZE: usize = 128;

/// Absolute slack added to the correlation bound to absorb roundoff in
/// inner products of nearly orthogonal vectors.
pub const GRAM_BOUND_SLACK: f64 = 1e-10;

/// `sin(x) / x`, equal to 1 for `|x| < 1e-8`.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < SINC_GUARD {
        1.0
    } else {
        x.sin() / x
    }
}

/// `∫_{c-W}^{c+W} e^{j2π f t} df = e^{j2π c t} · 2W · sinc(2π W t)`.
pub fn band_lag(t: i64, center: f64, half_width: f64) -> Complex64 {
    let t = t as f64;
    let magnitude = 2.0 * half_width * sinc(2.0 * PI * half_width * t);
    if center == 0.0 {
        Complex64::new(magnitude, 0.0)
    } else {
        Complex64::from_polar(magnitude, 2.0 * PI * center * t)
    }
}

/// Dense Hermitian `n x n` sinc kernel for one or more intervals.
#[derive(Debug, Clone)]
pub struct SincKernel {
    matrix: CMat,
    bands: Vec<(f64, f64)>,
}

impl SincKernel {
    fn from_bands(n: usize, bands: Vec<(f64, f64)>) -> Self {
        let lags: Vec<Complex64> = (0..n as i64)
            .map(|t| {
                bands
                    .iter()
                    .fold(Complex64::new(0.0, 0.0), |acc, &(c, w)| acc + band_lag(t, c, w))
            })
            .collect();
        let matrix = Mat::from_fn(n, n, |i, j| {
            if i >= j {
                lags[i - j]
            } else {
                lags[j - i].conj()
            }
        });
        SincKernel { matrix, bands }
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> MatRef<'_, Complex64> {
        self.matrix.as_ref()
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    /// `(center, half_width)` of every interval, in input order.
    pub fn bands(&self) -> &[(f64, f64)] {
        &self.bands
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(self.matrix.as_ref()).re
    }

    /// Full descending eigendecomposition.
    pub fn spectrum(&self) -> Result<Spectrum1D> {
        let e = linalg::hermitian_eigen(self.matrix.as_ref(), true, &self.describe())?;
        Ok(Spectrum1D {
            eigenvalues: e.values,
            eigenvectors: e.vectors.expect("vectors requested"),
        })
    }

    /// Descending eigenvalues only.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(linalg::hermitian_eigen(self.matrix.as_ref(), false, &self.describe())?.values)
    }

    fn describe(&self) -> String {
        format!("sinc kernel n={} bands={:?}", self.n(), self.bands)
    }
}

fn check_interval(center: f64, half_width: f64) -> Result<()> {
    if !(half_width > 0.0 && half_width <= 0.5) {
        return Err(Error::InvalidArgument(format!(
            "half-width must lie in (0, 1/2], got {half_width}"
        )));
    }
    if !center.is_finite() || center.abs() + half_width > 0.5 + TOUCH_TOLERANCE {
        return Err(Error::InvalidArgument(format!(
            "band {center} ± {half_width} leaves [-1/2, 1/2]"
        )));
    }
    Ok(())
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("kernel size must be positive".into()));
    }
    Ok(())
}

/// Kernel of the single interval `[f_c - W, f_c + W]`.
pub fn sinc_kernel(n: usize, f_c: f64, half_width: f64) -> Result<SincKernel> {
    check_size(n)?;
    check_interval(f_c, half_width)?;
    Ok(SincKernel::from_bands(n, vec![(f_c, half_width)]))
}

/// Sum of the per-interval kernels of a 1-D band union.
pub fn multiband_kernel_1d(n: usize, union: &CubicBandUnion) -> Result<SincKernel> {
    check_size(n)?;
    if union.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: union.dim(),
        });
    }
    let bands = union
        .bands()
        .iter()
        .map(|b| (b.center[0], b.half_widths[0]))
        .collect();
    Ok(SincKernel::from_bands(n, bands))
}

/// Descending eigenvalues with their eigenvectors as matching columns.
#[derive(Debug, Clone)]
pub struct Spectrum1D {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMat,
}

impl Spectrum1D {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn vector(&self, l: usize) -> Vec<Complex64> {
        self.eigenvectors.col(l).iter().copied().collect()
    }

    /// Every eigenvector multiplied by `e^{j2π f_c m}`.
    pub fn modulated(&self, f_c: f64) -> CMat {
        let n = self.eigenvectors.nrows();
        let phase: Vec<Complex64> = (0..n).map(|m| modulation_factor(f_c, m)).collect();
        Mat::from_fn(n, self.eigenvectors.ncols(), |i, j| {
            phase[i] * self.eigenvectors[(i, j)]
        })
    }
}

/// Slepian sequences for the band `[-W, W]`: eigendecomposition of
/// `sinc_kernel(n, 0, W)`.
pub fn dpss(n: usize, half_width: f64) -> Result<Spectrum1D> {
    sinc_kernel(n, 0.0, half_width)?
        .spectrum()
        .map_err(|e| match e {
            Error::Eigensolver { reason, .. } => Error::Eigensolver {
                context: format!("dpss(n={n}, W={half_width})"),
                reason,
            },
            other => other,
        })
}

fn modulation_factor(f_c: f64, m: usize) -> Complex64 {
    if f_c == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::from_polar(1.0, 2.0 * PI * f_c * m as f64)
    }
}

/// `out[m] = e^{j2π f_c m} v[m]`.
pub fn modulate(v: &[Complex64], f_c: f64) -> Vec<Complex64> {
    v.iter()
        .enumerate()
        .map(|(m, &x)| modulation_factor(f_c, m) * x)
        .collect()
}

/// Split of a spectrum into values near one, in the transition band, and
/// near zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClusterCounts {
    /// `λ > 1 - eps`
    pub near_one: usize,
    /// `eps <= λ <= 1 - eps`
    pub middle: usize,
    /// `λ < eps`
    pub near_zero: usize,
}

pub fn cluster_counts(eigs: &[f64], eps: f64) -> ClusterCounts {
    let near_one = eigs.iter().filter(|&&x| x > 1.0 - eps).count();
    let near_zero = eigs.iter().filter(|&&x| x < eps).count();
    ClusterCounts {
        near_one,
        middle: eigs.len() - near_one - near_zero,
        near_zero,
    }
}

/// `trace - ||K||_F^2 = Σ λ (1 - λ)` together with its a-priori bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapReport {
    pub trace: f64,
    pub frob_sq: f64,
    pub gap: f64,
    /// Upper bound on `gap`; absent where no bound is available.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
}

impl GapReport {
    pub fn from_matrix(k: MatRef<'_, Complex64>, bound: Option<f64>) -> Self {
        let trace = linalg::trace(k).re;
        let frob_sq = linalg::frobenius_norm_sq(k);
        GapReport {
            trace,
            frob_sq,
            gap: trace - frob_sq,
            bound,
        }
    }

    pub fn within_bound(&self) -> bool {
        self.bound.is_none_or(|b| self.gap <= b)
    }

    pub fn check(self) -> Result<Self> {
        match self.bound {
            Some(bound) if self.gap > bound => Err(Error::GapBound {
                trace: self.trace,
                frob_sq: self.frob_sq,
                gap: self.gap,
                bound,
            }),
            _ => Ok(self),
        }
    }
}

/// `(4 n J / π²)(3 + ln n)`.
pub fn gap_bound_1d(n: usize, bands: usize) -> f64 {
    4.0 * n as f64 * bands as f64 / (PI * PI) * (3.0 + (n as f64).ln())
}

/// Same bound with a base-10 logarithm; informational only.
pub fn gap_bound_1d_log10(n: usize, bands: usize) -> f64 {
    4.0 * n as f64 * bands as f64 / (PI * PI) * (3.0 + (n as f64).log10())
}

/// Trace/Frobenius gap of a 1-D multiband kernel, checked against
/// [`gap_bound_1d`].
pub fn frobenius_gap_1d(kernel: &SincKernel) -> Result<GapReport> {
    GapReport::from_matrix(
        kernel.matrix(),
        Some(gap_bound_1d(kernel.n(), kernel.bands().len())),
    )
    .check()
}

/// One offending pair in a correlation-bound check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GramViolation {
    pub first: (usize, usize),
    pub second: (usize, usize),
    pub inner: f64,
    pub bound: f64,
}

/// Result of checking `|<x, y>| <= 3 sqrt(1 - min(λ_x, λ_y))` over all
/// cross-band pairs.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct GramBoundReport {
    pub pairs_checked: usize,
    pub max_inner: f64,
    /// Largest `|<x, y>| / bound` (bounds of zero are skipped).
    pub max_ratio: f64,
    pub violations: Vec<GramViolation>,
}

impl GramBoundReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }

    pub(crate) fn record(
        &mut self,
        first: (usize, usize),
        second: (usize, usize),
        inner: f64,
        min_eigenvalue: f64,
    ) {
        let bound = correlation_bound(min_eigenvalue);
        self.pairs_checked += 1;
        self.max_inner = self.max_inner.max(inner);
        if bound > 0.0 {
            self.max_ratio = self.max_ratio.max(inner / bound);
        }
        if inner > bound + GRAM_BOUND_SLACK {
            self.violations.push(GramViolation {
                first,
                second,
                inner,
                bound,
            });
        }
    }
}

/// `3 sqrt(1 - λ)`, with `1 - λ` clamped at zero.
pub fn correlation_bound(min_eigenvalue: f64) -> f64 {
    3.0 * (1.0 - min_eigenvalue).max(0.0).sqrt()
}

/// Checks the cross-band correlation bound for the first
/// `⌊2 n W_i (1 - eps)⌋` modulated DPSS of every interval of `union`.
/// Pairs are identified as `(band, dpss index)`.
pub fn cross_band_gram_1d(n: usize, union: &CubicBandUnion, eps: f64) -> Result<GramBoundReport> {
    if union.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: union.dim(),
        });
    }
    let mut families = Vec::with_capacity(union.len());
    for band in union.bands() {
        let (c, w) = (band.center[0], band.half_widths[0]);
        let spec = dpss(n, w)?;
        let keep = floor_count(2.0 * n as f64 * w * (1.0 - eps));
        let vectors = spec.modulated(c);
        families.push((spec.eigenvalues[..keep].to_vec(), vectors, keep));
    }
    let mut report = GramBoundReport::default();
    for i in 0..families.len() {
        for j in i + 1..families.len() {
            let (li, vi, ki) = &families[i];
            let (lj, vj, kj) = &families[j];
            let cross = vj.subcols(0, *kj).adjoint() * vi.subcols(0, *ki);
            for a in 0..*ki {
                for b in 0..*kj {
                    report.record((i, a), (j, b), cross[(b, a)].norm(), li[a].min(lj[b]));
                }
            }
        }
    }
    Ok(report)
}

/// Absolute slack on the pseudo-eigen residual bound.
pub const RESIDUAL_BOUND_SLACK: f64 = 1e-8;

/// One offending vector in a pseudo-eigen residual check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualViolation {
    pub atom: (usize, usize),
    pub residual_sq: f64,
    pub bound: f64,
}

/// Result of checking `||K x - λ x||² <= 1 - λ²` for vectors `x` that are
/// exact eigenvectors of one band's kernel only.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ResidualReport {
    pub checked: usize,
    pub max_residual_sq: f64,
    /// Largest `residual - bound`; negative when every vector passes.
    pub max_excess: f64,
    pub violations: Vec<ResidualViolation>,
}

impl ResidualReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }

    pub(crate) fn record(&mut self, atom: (usize, usize), residual_sq: f64, eigenvalue: f64) {
        let bound = 1.0 - eigenvalue * eigenvalue;
        let excess = residual_sq - bound;
        if self.checked == 0 || excess > self.max_excess {
            self.max_excess = excess;
        }
        self.checked += 1;
        self.max_residual_sq = self.max_residual_sq.max(residual_sq);
        if excess > RESIDUAL_BOUND_SLACK {
            self.violations.push(ResidualViolation {
                atom,
                residual_sq,
                bound,
            });
        }
    }
}

/// Applies the full multiband kernel to the first `⌊2 n W_i (1 - eps)⌋`
/// modulated DPSS of every interval and checks the residual against
/// `1 - λ²`. Vectors are identified as `(band, dpss index)`.
pub fn pseudo_residual_1d(n: usize, union: &CubicBandUnion, eps: f64) -> Result<ResidualReport> {
    let kernel = multiband_kernel_1d(n, union)?;
    let mut report = ResidualReport::default();
    for (i, band) in union.bands().iter().enumerate() {
        let (c, w) = (band.center[0], band.half_widths[0]);
        let spec = dpss(n, w)?;
        let keep = floor_count(2.0 * n as f64 * w * (1.0 - eps));
        let vectors = spec.modulated(c).subcols(0, keep).to_owned();
        let applied = kernel.matrix() * &vectors;
        for l in 0..keep {
            let lambda = spec.eigenvalues[l];
            let r: f64 = (0..n)
                .map(|m| (applied[(m, l)] - vectors[(m, l)] * lambda).norm_sqr())
                .sum();
            report.record((i, l), r, lambda);
        }
    }
    Ok(report)
}

/// `⌊x⌋` with a small allowance for products that should be integers.
pub(crate) fn floor_count(x: f64) -> usize {
    (x + 1e-9).floor().max(0.0) as usize
}

/// `⌈x⌉` with a small allowance for products that should be integers.
pub(crate) fn ceil_count(x: f64) -> usize {
    (x - 1e-9).ceil().max(0.0) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn two_intervals() -> CubicBandUnion {
        CubicBandUnion::intervals(&[(-0.1, 0.05), (0.2, 0.05)]).unwrap()
    }

    #[test]
    fn diagonal_is_twice_the_half_width() {
        let k = sinc_kernel(4, 0.0, 0.25).unwrap();
        for i in 0..4 {
            assert_eq!(k.matrix()[(i, i)], Complex64::new(0.5, 0.0));
        }
    }

    #[test]
    fn full_band_kernel_is_identity() {
        let k = sinc_kernel(9, 0.0, 0.5).unwrap();
        for i in 0..9 {
            for j in 0..9 {
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((k.matrix()[(i, j)] - target).norm() < 1e-15);
            }
        }
        let eigs = k.eigenvalues().unwrap();
        assert!(eigs.iter().all(|x| (x - 1.0).abs() < 1e-12));
    }

    #[test]
    fn band_pass_entry_closed_form() {
        let k = sinc_kernel(6, 0.25, 0.1).unwrap();
        let expected = -(0.4 * PI).sin() / (2.0 * PI);
        let got = k.matrix()[(3, 1)];
        assert!((got.re - expected).abs() < 1e-15);
        assert!(got.im.abs() < 1e-15);
        assert!((expected + 0.1513655).abs() < 1e-6);
    }

    #[test]
    fn kernel_is_exactly_hermitian() {
        let k = multiband_kernel_1d(17, &two_intervals()).unwrap();
        let m = k.matrix();
        for i in 0..17 {
            for j in 0..17 {
                assert_eq!(m[(i, j)], m[(j, i)].conj());
            }
        }
    }

    #[test]
    fn two_interval_kernel_trace() {
        let k = multiband_kernel_1d(256, &two_intervals()).unwrap();
        assert!((k.trace() - 51.2).abs() < 51.2 * 1e-12);
    }

    #[test]
    fn single_band_multiband_is_bitwise_sinc_kernel() {
        let u = CubicBandUnion::intervals(&[(0.0, 0.13)]).unwrap();
        let a = multiband_kernel_1d(20, &u).unwrap();
        let b = sinc_kernel(20, 0.0, 0.13).unwrap();
        assert_eq!(a.matrix(), b.matrix());
    }

    #[test]
    fn multiband_requires_one_dimension() {
        let u = CubicBandUnion::new(
            2,
            vec![crate::bandspec::CubicBand::new(vec![0.0, 0.0], vec![0.1, 0.1])],
        )
        .unwrap();
        assert!(matches!(
            multiband_kernel_1d(8, &u),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn rejects_out_of_range_band() {
        assert!(sinc_kernel(8, 0.45, 0.1).is_err());
        assert!(sinc_kernel(8, 0.0, 0.0).is_err());
        assert!(sinc_kernel(8, 0.0, 0.6).is_err());
    }

    #[test]
    fn dpss_trace_and_full_band() {
        let s = dpss(256, 0.1).unwrap();
        let total: f64 = s.eigenvalues.iter().sum();
        assert!((total - 51.2).abs() < 51.2 * 1e-9);

        let full = dpss(16, 0.5).unwrap();
        assert!(full.eigenvalues.iter().all(|x| (x - 1.0).abs() < 1e-12));
    }

    #[test]
    fn dpss_are_real_with_positive_peak() {
        let s = dpss(32, 0.1).unwrap();
        for l in 0..32 {
            let v = s.vector(l);
            assert!(v.iter().all(|x| x.im == 0.0));
            let peak = v.iter().map(|x| x.re.abs()).fold(0.0, f64::max);
            let first = v.iter().find(|x| x.re.abs() >= peak * (1.0 - 1e-9)).unwrap();
            assert!(first.re > 0.0);
        }
    }

    #[test]
    fn modulation_keeps_magnitudes() {
        let v: Vec<Complex64> = (0..7)
            .map(|i| Complex64::new(i as f64 - 3.0, 0.5 * i as f64))
            .collect();
        assert_eq!(modulate(&v, 0.0), v);
        for (x, y) in modulate(&v, 0.37).iter().zip(&v) {
            assert!((x.norm() - y.norm()).abs() < 1e-14);
        }
    }

    #[test]
    fn modulated_dpss_is_band_pass_eigenvector() {
        let s = dpss(64, 0.05).unwrap();
        let k = sinc_kernel(64, 0.2, 0.05).unwrap();
        let v = modulate(&s.vector(0), 0.2);
        let col = Mat::from_fn(64, 1, |i, _| v[i]);
        let kv = k.matrix() * &col;
        let residual: f64 = (0..64)
            .map(|i| (kv[(i, 0)] - v[i] * s.eigenvalues[0]).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(residual <= 1e-10, "residual {residual}");
    }

    #[test]
    fn cluster_counts_partition() {
        assert_eq!(
            cluster_counts(&[1.0; 5], 0.1),
            ClusterCounts {
                near_one: 5,
                middle: 0,
                near_zero: 0
            }
        );
        let c = cluster_counts(&[0.99, 0.7, 0.5, 0.2, 0.01], 0.05);
        assert_eq!((c.near_one, c.middle, c.near_zero), (1, 3, 1));
    }

    #[test]
    fn two_interval_gap_within_bound() {
        let k = multiband_kernel_1d(256, &two_intervals()).unwrap();
        let gap = frobenius_gap_1d(&k).unwrap();
        assert!(gap.gap > 0.0 && gap.within_bound());
        assert!(gap.gap <= gap_bound_1d_log10(256, 2));
    }

    #[test]
    fn two_interval_cross_band_gram_bound() {
        let report = cross_band_gram_1d(128, &two_intervals(), 0.2).unwrap();
        // ⌊2·128·0.05·0.8⌋ = 10 per band.
        assert_eq!(report.pairs_checked, 100);
        assert!(report.holds(), "{:?}", report.violations);
    }

    #[test]
    fn two_interval_pseudo_residual_bound() {
        let report = pseudo_residual_1d(128, &two_intervals(), 0.2).unwrap();
        assert_eq!(report.checked, 20);
        assert!(report.holds(), "{:?}", report.violations);
        assert!(report.max_excess <= RESIDUAL_BOUND_SLACK);
    }

    #[test]
    fn count_rounding_tolerates_roundoff() {
        assert_eq!(floor_count(51.999_999_999_99), 52);
        assert_eq!(ceil_count(52.000_000_000_01), 52);
        assert_eq!(floor_count(10.5), 10);
        assert_eq!(ceil_count(10.5), 11);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn trace_and_range(n in 2usize..48, w in 0.01f64..0.5) {
            let k = sinc_kernel(n, 0.0, w).unwrap();
            let eigs = k.eigenvalues().unwrap();
            let total: f64 = eigs.iter().sum();
            let expected = 2.0 * n as f64 * w;
            prop_assert!((total - expected).abs() <= 1e-9 * expected);
            prop_assert!(eigs.iter().all(|&x| (-1e-10..=1.0 + 1e-10).contains(&x)));
        }

        #[test]
        fn band_pass_spectrum_equals_baseband(n in 2usize..40, w in 0.01f64..0.2, shift in -1.0f64..1.0) {
            let f_c = shift * (0.5 - w);
            let base = sinc_kernel(n, 0.0, w).unwrap().eigenvalues().unwrap();
            let moved = sinc_kernel(n, f_c, w).unwrap().eigenvalues().unwrap();
            for (x, y) in base.iter().zip(&moved) {
                prop_assert!((x - y).abs() <= 1e-9);
            }
        }

        #[test]
        fn eigenvectors_orthonormal(n in 2usize..32, w in 0.02f64..0.45) {
            let s = dpss(n, w).unwrap();
            let gram = s.eigenvectors.adjoint() * &s.eigenvectors;
            for i in 0..n {
                for j in 0..n {
                    let target = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((gram[(i, j)] - target).norm() <= 1e-9);
                }
            }
        }
    }
}
