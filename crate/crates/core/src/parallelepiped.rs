//! The 2-D operator for unions of parallelogram-shaped subbands.
//!
//! A band `{(f, g) : |a f' + b g'| <= W0, |c f' + d g'| <= W1}` with
//! `(f', g') = (f, g) - center` is the image of a box under a linear map, so
//! its Fourier integral still factors into two sincs. With `V = ad - bc`,
//! `t = m - p` and `s = n - q`,
//!
//! ```text
//! K[(m,n),(p,q)] = 4 W0 W1 / |V| · sinc(2π W0 (t d - s c) / V)
//!                               · sinc(2π W1 (s a - t b) / V)
//!                               · e^{j2π (f_c t + g_c s)}.
//! ```
//!
//! The band center only contributes the phase, which is a diagonal unitary
//! similarity and leaves the spectrum unchanged.

use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64;

use crate::bandspec::{ParallelepipedBand, ParallelepipedUnion, SamplingGrid};
use crate::error::{Error, Result};
use crate::mdoperator::{self, CovarianceSource, DenseCovariance, MATERIALIZE_CAP};
use crate::prolate::sinc;

/// 2-D grid plus a union of parallelograms.
#[derive(Debug, Clone, PartialEq)]
pub struct PPOperatorSpec {
    grid: SamplingGrid,
    bands: ParallelepipedUnion,
}

impl PPOperatorSpec {
    pub fn new(grid: SamplingGrid, bands: ParallelepipedUnion) -> Result<Self> {
        grid.shape_2d()?;
        Ok(PPOperatorSpec { grid, bands })
    }

    pub fn grid(&self) -> &SamplingGrid {
        &self.grid
    }

    pub fn bands(&self) -> &ParallelepipedUnion {
        &self.bands
    }

    pub fn size(&self) -> usize {
        self.grid.size()
    }

    pub fn measure(&self) -> f64 {
        self.bands.measure()
    }

    /// Same grid with every band moved by `offsets[i]`; the moved union is
    /// validated again.
    pub fn shifted(&self, offsets: &[[f64; 2]]) -> Result<Self> {
        if offsets.len() != self.bands.len() {
            return Err(Error::DimensionMismatch {
                expected: self.bands.len(),
                found: offsets.len(),
            });
        }
        let bands = self
            .bands
            .bands()
            .iter()
            .zip(offsets)
            .map(|(b, &o)| b.shifted(o))
            .collect();
        PPOperatorSpec::new(self.grid.clone(), ParallelepipedUnion::new(bands)?)
    }
}

/// Covariance between samples whose indices differ by `(t, s)`.
///
/// Evaluated directly for the half-plane `s > 0 || (s == 0 && t >= 0)` and
/// by conjugation otherwise, so the result is exactly Hermitian.
pub fn pp_lag(band: &ParallelepipedBand, t: i64, s: i64) -> Complex64 {
    if s < 0 || (s == 0 && t < 0) {
        return pp_lag(band, -t, -s).conj();
    }
    let v = band.determinant();
    let [w0, w1] = band.half_widths;
    let (tf, sf) = (t as f64, s as f64);
    let alpha = tf * band.d - sf * band.c;
    let beta = sf * band.a - tf * band.b;
    let magnitude =
        4.0 * w0 * w1 / v.abs() * sinc(2.0 * PI * w0 * alpha / v) * sinc(2.0 * PI * w1 * beta / v);
    let phase = 2.0 * PI * (band.center[0] * tf + band.center[1] * sf);
    if phase == 0.0 {
        Complex64::new(magnitude, 0.0)
    } else {
        Complex64::from_polar(magnitude, phase)
    }
}

/// Covariance between the samples at `(m, n)` and `(p, q)`.
pub fn pp_entry(band: &ParallelepipedBand, m: usize, n: usize, p: usize, q: usize) -> Complex64 {
    pp_lag(band, m as i64 - p as i64, n as i64 - q as i64)
}

/// Dense `MN x MN` covariance, `vec` ordering with the first axis fastest.
pub fn pp_materialize(spec: &PPOperatorSpec) -> Result<DenseCovariance> {
    let size = spec.size();
    if size > MATERIALIZE_CAP {
        return Err(Error::CapExceeded {
            size,
            cap: MATERIALIZE_CAP,
        });
    }
    let (m, n) = spec.grid.shape_2d()?;
    // All entries depend on (t, s) only; tabulate each lag once.
    let (tw, sw) = (2 * m - 1, 2 * n - 1);
    let mut table = vec![Complex64::new(0.0, 0.0); tw * sw];
    for (idx, slot) in table.iter_mut().enumerate() {
        let t = (idx % tw) as i64 - (m as i64 - 1);
        let s = (idx / tw) as i64 - (n as i64 - 1);
        *slot = spec.bands.bands().iter().map(|b| pp_lag(b, t, s)).sum();
    }
    let matrix = Mat::from_fn(size, size, |i, j| {
        let t = (i % m) + m - 1 - (j % m);
        let s = (i / m) + n - 1 - (j / m);
        table[t + tw * s]
    });
    Ok(DenseCovariance::new(
        vec![m, n],
        matrix,
        spec.measure(),
        spec.bands.len(),
        CovarianceSource::Parallelepiped,
    ))
}

/// Largest deviation between the sorted spectra of two specs that differ
/// only in band centers.
pub fn pp_center_invariance(spec: &PPOperatorSpec, shifted: &PPOperatorSpec) -> Result<f64> {
    if spec.grid != shifted.grid {
        return Err(Error::InvalidArgument(
            "center-invariance check needs identical grids".into(),
        ));
    }
    if !spec.bands.same_shapes(&shifted.bands) {
        return Err(Error::InvalidArgument(
            "center-invariance check needs identical band shapes".into(),
        ));
    }
    let a = mdoperator::eigenvalues(&pp_materialize(spec)?)?;
    let b = mdoperator::eigenvalues(&pp_materialize(shifted)?)?;
    Ok(a.iter()
        .zip(&b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bandspec::{CubicBand, CubicBandUnion};
    use crate::mdoperator::{materialize_cubic, OperatorSpec};
    use proptest::prelude::*;

    fn sheared() -> ParallelepipedBand {
        ParallelepipedBand::new(1.0, 0.5, 0.0, 1.0, [0.12, 0.1], [0.0, 0.0])
    }

    fn spec_of(m: usize, bands: Vec<ParallelepipedBand>) -> PPOperatorSpec {
        PPOperatorSpec::new(
            SamplingGrid::square(m).unwrap(),
            ParallelepipedUnion::new(bands).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn diagonal_entry_is_measure() {
        let b = ParallelepipedBand::new(1.0, 0.3, -0.2, 0.8, [0.1, 0.15], [0.05, -0.1]);
        let got = pp_entry(&b, 3, 4, 3, 4);
        assert!((got.re - 4.0 * 0.1 * 0.15 / b.determinant().abs()).abs() < 1e-15);
        assert_eq!(got.im, 0.0);
    }

    #[test]
    fn identity_transform_decouples_axes() {
        let b = ParallelepipedBand::from_box([0.12, 0.2], [0.0, 0.0]);
        let k0 = crate::prolate::sinc_kernel(6, 0.0, 0.12).unwrap();
        let k1 = crate::prolate::sinc_kernel(6, 0.0, 0.2).unwrap();
        for (m, n, p, q) in [(0, 0, 3, 5), (4, 1, 2, 2), (5, 5, 0, 1)] {
            let expected = k0.matrix()[(m, p)] * k1.matrix()[(n, q)];
            assert!((pp_entry(&b, m, n, p, q) - expected).norm() < 1e-15);
        }
    }

    #[test]
    fn identity_transform_matches_cubic_operator() {
        let pp = spec_of(
            7,
            vec![ParallelepipedBand::from_box([0.1, 0.15], [0.2, -0.1])],
        );
        let cubic = OperatorSpec::new(
            SamplingGrid::square(7).unwrap(),
            CubicBandUnion::new(2, vec![CubicBand::new(vec![0.2, -0.1], vec![0.1, 0.15])])
                .unwrap(),
        )
        .unwrap();
        let a = pp_materialize(&pp).unwrap();
        let b = materialize_cubic(&cubic).unwrap();
        for i in 0..49 {
            for j in 0..49 {
                assert!((a.matrix()[(i, j)] - b.matrix()[(i, j)]).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn degenerate_denominators_use_limit() {
        // With c = 0, d = 1 the first factor's argument vanishes whenever t = 0.
        let b = sheared();
        let v = b.determinant();
        let got = pp_lag(&b, 0, 3);
        let beta = 3.0;
        let expected = 4.0 * 0.12 * 0.1 / v * (2.0 * PI * 0.1 * beta / v).sin()
            / (2.0 * PI * 0.1 * beta / v);
        assert!((got.re - expected).abs() < 1e-15);
    }

    #[test]
    fn negative_determinant_matches_flipped_band() {
        let flipped = ParallelepipedBand::new(0.5, 1.0, 1.0, 0.0, [0.1, 0.12], [0.0, 0.0]);
        assert!(flipped.determinant() < 0.0);
        let straight = ParallelepipedBand::new(1.0, 0.0, 0.5, 1.0, [0.12, 0.1], [0.0, 0.0]);
        for (t, s) in [(1, 2), (-3, 1), (0, 4), (5, -2)] {
            assert!((pp_lag(&flipped, t, s) - pp_lag(&straight, t, s)).norm() < 1e-15);
        }
    }

    #[test]
    fn trace_is_grid_times_measure() {
        let spec = spec_of(
            8,
            vec![
                ParallelepipedBand::new(1.0, 0.5, 0.0, 1.0, [0.12, 0.1], [-0.2, -0.15]),
                ParallelepipedBand::new(1.0, 0.0, 0.4, 1.0, [0.12, 0.1], [0.2, 0.2]),
            ],
        );
        let cov = pp_materialize(&spec).unwrap();
        assert!((cov.trace() - 64.0 * 0.096).abs() < 64.0 * 0.096 * 1e-9);
        assert!(mdoperator::trace_frobenius_gap(&cov).unwrap().bound.is_none());
    }

    #[test]
    fn center_invariance() {
        let spec = spec_of(10, vec![sheared()]);
        assert_eq!(pp_center_invariance(&spec, &spec).unwrap(), 0.0);
        let moved = spec.shifted(&[[0.1, -0.05]]).unwrap();
        assert!(pp_center_invariance(&spec, &moved).unwrap() <= 1e-9);
    }

    #[test]
    fn shift_out_of_range_is_rejected() {
        let spec = spec_of(4, vec![sheared()]);
        assert!(matches!(
            spec.shifted(&[[0.4, 0.0]]),
            Err(Error::InvalidBands(_))
        ));
    }

    #[test]
    fn mismatched_shapes_are_rejected() {
        let a = spec_of(4, vec![sheared()]);
        let b = spec_of(4, vec![ParallelepipedBand::from_box([0.1, 0.1], [0.0, 0.0])]);
        assert!(pp_center_invariance(&a, &b).is_err());
    }

    #[test]
    fn cap_is_enforced() {
        let spec = spec_of(65, vec![sheared()]);
        assert!(matches!(pp_materialize(&spec), Err(Error::CapExceeded { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn entries_are_hermitian(
            b in -0.8f64..0.8,
            c in -0.8f64..0.8,
            cx in -0.1f64..0.1,
            cy in -0.1f64..0.1,
            m in 0usize..9, n in 0usize..9, p in 0usize..9, q in 0usize..9,
        ) {
            prop_assume!((1.0 - b * c).abs() > 0.1);
            let band = ParallelepipedBand::new(1.0, b, c, 1.0, [0.05, 0.07], [cx, cy]);
            prop_assert_eq!(pp_entry(&band, m, n, p, q), pp_entry(&band, p, q, m, n).conj());
        }

        #[test]
        fn spectrum_in_unit_interval(b in -0.6f64..0.6, w0 in 0.03f64..0.15, w1 in 0.03f64..0.15) {
            let band = ParallelepipedBand::new(1.0, b, 0.0, 1.0, [w0, w1], [0.0, 0.0]);
            let spec = spec_of(6, vec![band]);
            let cov = pp_materialize(&spec).unwrap();
            let eigs = mdoperator::eigenvalues(&cov).unwrap();
            prop_assert!(eigs.iter().all(|&x| x > -1e-10 && x < 1.0 + 1e-10));
            let total: f64 = eigs.iter().sum();
            prop_assert!((total - cov.expected_trace()).abs() <= 1e-9 * cov.expected_trace());
        }
    }
}
