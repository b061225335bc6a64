//! The time- and band-limiting operator for unions of axis-aligned boxes.
//!
//! On a 2-D grid the operator acts on an `M x N` array `Y` as
//! `Σ_i B⁰_i Y (B¹_i)ᵀ`, where `B⁰_i` and `B¹_i` are the 1-D sinc kernels of
//! band `i` along each axis and `ᵀ` is the plain transpose. Its matrix on
//! `vec(Y)` is `Σ_i B¹_i ⊗ B⁰_i`, with the first axis varying fastest, so
//! that `vec(u vᵀ) = v ⊗ u`.

use std::f64::consts::PI;

use faer::{Mat, MatRef};
use num_complex::Complex64;

use crate::bandspec::{CubicBand, CubicBandUnion, SamplingGrid};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::prolate::{self, GapReport, SincKernel};

/// Largest operator dimension `Π dims` that will be formed densely.
pub const MATERIALIZE_CAP: usize = 4096;

/// Grid plus band union of matching dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSpec {
    grid: SamplingGrid,
    bands: CubicBandUnion,
}

impl OperatorSpec {
    pub fn new(grid: SamplingGrid, bands: CubicBandUnion) -> Result<Self> {
        if grid.dim() != bands.dim() {
            return Err(Error::DimensionMismatch {
                expected: grid.dim(),
                found: bands.dim(),
            });
        }
        if grid.dim() > 3 {
            return Err(Error::InvalidArgument(format!(
                "operators are supported up to three dimensions, got {}",
                grid.dim()
            )));
        }
        Ok(OperatorSpec { grid, bands })
    }

    pub fn grid(&self) -> &SamplingGrid {
        &self.grid
    }

    pub fn bands(&self) -> &CubicBandUnion {
        &self.bands
    }

    pub fn dims(&self) -> &[usize] {
        self.grid.dims()
    }

    pub fn size(&self) -> usize {
        self.grid.size()
    }

    pub fn measure(&self) -> f64 {
        self.bands.measure()
    }

    /// The same grid restricted to band `i`.
    pub fn single_band(&self, i: usize) -> OperatorSpec {
        OperatorSpec {
            grid: self.grid.clone(),
            bands: self.bands.single(i),
        }
    }

    /// `kernels[i][axis]` is the 1-D kernel of band `i` along `axis`.
    fn axis_kernels(&self) -> Result<Vec<Vec<SincKernel>>> {
        self.bands
            .bands()
            .iter()
            .map(|band| axis_kernels_of(self.dims(), band))
            .collect()
    }
}

fn axis_kernels_of(dims: &[usize], band: &CubicBand) -> Result<Vec<SincKernel>> {
    dims.iter()
        .enumerate()
        .map(|(axis, &n)| prolate::sinc_kernel(n, band.center[axis], band.half_widths[axis]))
        .collect()
}

/// Where a dense covariance came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CovarianceSource {
    Cubic,
    Parallelepiped,
}

/// Dense Hermitian covariance of the samples on a grid, equivalently the
/// matrix of the time- and band-limiting operator in `vec` ordering.
#[derive(Debug, Clone)]
pub struct DenseCovariance {
    dims: Vec<usize>,
    matrix: CMat,
    measure: f64,
    bands: usize,
    source: CovarianceSource,
}

impl DenseCovariance {
    pub(crate) fn new(
        dims: Vec<usize>,
        matrix: CMat,
        measure: f64,
        bands: usize,
        source: CovarianceSource,
    ) -> Self {
        DenseCovariance {
            dims,
            matrix,
            measure,
            bands,
            source,
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> MatRef<'_, Complex64> {
        self.matrix.as_ref()
    }

    /// Total measure of the band union.
    pub fn measure(&self) -> f64 {
        self.measure
    }

    /// Number of subbands `J`.
    pub fn band_count(&self) -> usize {
        self.bands
    }

    pub fn source(&self) -> CovarianceSource {
        self.source
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(self.matrix.as_ref()).re
    }

    /// `Π dims · measure`, which the trace must equal.
    pub fn expected_trace(&self) -> f64 {
        self.size() as f64 * self.measure
    }

    /// Matrix-vector product in `vec` ordering.
    pub fn apply_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.size());
        let col = Mat::from_fn(v.len(), 1, |i, _| v[i]);
        let out = &self.matrix * &col;
        (0..v.len()).map(|i| out[(i, 0)]).collect()
    }

    /// Test hook: adds `delta` to one off-diagonal entry without restoring
    /// Hermitian symmetry.
    #[doc(hidden)]
    pub fn corrupt(&mut self, delta: f64) {
        if self.size() > 1 {
            self.matrix[(0, 1)] += Complex64::new(delta, 0.0);
        } else {
            self.matrix[(0, 0)] += Complex64::new(delta, 0.0);
        }
    }
}

/// `Σ_i B⁰_i Y (B¹_i)ᵀ` for a 2-D spec, without forming the `MN x MN` matrix.
pub fn apply_cubic(spec: &OperatorSpec, y: MatRef<'_, Complex64>) -> Result<CMat> {
    let (m, n) = spec.grid.shape_2d()?;
    if (y.nrows(), y.ncols()) != (m, n) {
        return Err(Error::ShapeMismatch {
            expected: (m, n),
            found: (y.nrows(), y.ncols()),
        });
    }
    let mut out = CMat::zeros(m, n);
    for kernels in spec.axis_kernels()? {
        out += kernels[0].matrix() * y * kernels[1].matrix().transpose();
    }
    Ok(out)
}

/// Dense `Σ_i B^{d-1}_i ⊗ … ⊗ B⁰_i` for `d ∈ {1, 2, 3}`.
pub fn materialize_cubic(spec: &OperatorSpec) -> Result<DenseCovariance> {
    let size = spec.size();
    if size > MATERIALIZE_CAP {
        return Err(Error::CapExceeded {
            size,
            cap: MATERIALIZE_CAP,
        });
    }
    let dims = spec.dims().to_vec();
    let matrix = if dims.len() == 1 {
        prolate::multiband_kernel_1d(dims[0], &spec.bands)?.into_matrix()
    } else {
        let kernels = spec.axis_kernels()?;
        let split = |mut i: usize| {
            let mut idx = [0usize; 3];
            for (axis, &n) in dims.iter().enumerate() {
                idx[axis] = i % n;
                i /= n;
            }
            idx
        };
        Mat::from_fn(size, size, |i, j| {
            let (a, b) = (split(i), split(j));
            kernels
                .iter()
                .map(|band| {
                    band.iter()
                        .enumerate()
                        .map(|(axis, k)| k.matrix()[(a[axis], b[axis])])
                        .product::<Complex64>()
                })
                .sum()
        })
    };
    Ok(DenseCovariance::new(
        dims,
        matrix,
        spec.measure(),
        spec.bands.len(),
        CovarianceSource::Cubic,
    ))
}

/// How the eigen-tensors of a [`SpectrumND`] are stored.
#[derive(Debug, Clone)]
enum TensorBasis {
    /// Columns are eigenvectors in `vec` ordering.
    Dense(CMat),
    /// Eigen-tensor `p` is `u_l vᵀ_k` with `(l, k) = pairs[p]`.
    Separable {
        rows: CMat,
        cols: CMat,
        pairs: Vec<(usize, usize)>,
    },
}

/// Descending eigenvalues of an operator with its eigen-tensors.
#[derive(Debug, Clone)]
pub struct SpectrumND {
    dims: Vec<usize>,
    eigenvalues: Vec<f64>,
    basis: TensorBasis,
}

impl SpectrumND {
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// 1-D factor indices `(l, k)` of each eigen-tensor, if separable.
    pub fn factor_indices(&self) -> Option<&[(usize, usize)]> {
        match &self.basis {
            TensorBasis::Separable { pairs, .. } => Some(pairs),
            TensorBasis::Dense(_) => None,
        }
    }

    /// Unit 1-D factors `(u, v)` with eigen-tensor `p` equal to `u vᵀ`, if
    /// separable.
    pub fn factors(&self, p: usize) -> Option<(Vec<Complex64>, Vec<Complex64>)> {
        match &self.basis {
            TensorBasis::Separable { rows, cols, pairs } => {
                let (l, k) = pairs[p];
                Some((
                    rows.col(l).iter().copied().collect(),
                    cols.col(k).iter().copied().collect(),
                ))
            }
            TensorBasis::Dense(_) => None,
        }
    }

    /// Eigenvector `p` in `vec` ordering.
    pub fn eigen_vector(&self, p: usize) -> Vec<Complex64> {
        match &self.basis {
            TensorBasis::Dense(v) => v.col(p).iter().copied().collect(),
            TensorBasis::Separable { rows, cols, pairs } => {
                let (l, k) = pairs[p];
                let m = rows.nrows();
                (0..m * cols.nrows())
                    .map(|i| rows[(i % m, l)] * cols[(i / m, k)])
                    .collect()
            }
        }
    }

    /// Eigen-tensor `p` as a matrix whose rows follow the first axis. For a
    /// 1-D spectrum this is a column; for 3-D it is the unfolding with the
    /// remaining axes along the columns.
    pub fn eigen_tensor(&self, p: usize) -> CMat {
        let rows = self.dims[0];
        let cols = self.dims[1..].iter().product::<usize>().max(1);
        linalg::unvectorize(&self.eigen_vector(p), rows, cols)
    }

    /// `Σ_p coeffs[p] · vec(Φ_p)` over the leading `coeffs.len()` tensors.
    pub fn combine(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        assert!(coeffs.len() <= self.len());
        match &self.basis {
            TensorBasis::Dense(v) => {
                let c = Mat::from_fn(coeffs.len(), 1, |i, _| coeffs[i]);
                let out = v.subcols(0, coeffs.len()) * &c;
                (0..v.nrows()).map(|i| out[(i, 0)]).collect()
            }
            TensorBasis::Separable { .. } => {
                let mut out = vec![Complex64::new(0.0, 0.0); self.size()];
                for (p, &c) in coeffs.iter().enumerate() {
                    for (o, x) in out.iter_mut().zip(self.eigen_vector(p)) {
                        *o += c * x;
                    }
                }
                out
            }
        }
    }

    /// Number of samples `Π dims`.
    pub fn size(&self) -> usize {
        self.dims.iter().product()
    }
}

/// Full eigendecomposition of a dense covariance.
pub fn spectrum(cov: &DenseCovariance) -> Result<SpectrumND> {
    let e = linalg::hermitian_eigen(cov.matrix(), true, &describe(cov))?;
    Ok(SpectrumND {
        dims: cov.dims.clone(),
        eigenvalues: e.values,
        basis: TensorBasis::Dense(e.vectors.expect("vectors requested")),
    })
}

/// Descending eigenvalues of a dense covariance.
pub fn eigenvalues(cov: &DenseCovariance) -> Result<Vec<f64>> {
    Ok(linalg::hermitian_eigen(cov.matrix(), false, &describe(cov))?.values)
}

fn describe(cov: &DenseCovariance) -> String {
    format!(
        "{:?} operator on grid {:?} with {} band(s)",
        cov.source, cov.dims, cov.bands
    )
}

/// Eigen-pairs of a single 2-D box from its two 1-D decompositions:
/// tensors `E_{f⁰} s_l (E_{f¹} s_k)ᵀ` with eigenvalues `λ_l λ_k`, sorted by
/// descending product and then by `(l, k)`.
pub fn separable_spectrum(m: usize, n: usize, band: &CubicBand) -> Result<SpectrumND> {
    if band.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: band.dim(),
        });
    }
    let row = prolate::dpss(m, band.half_widths[0])?;
    let col = prolate::dpss(n, band.half_widths[1])?;
    let mut pairs: Vec<(usize, usize)> =
        (0..m).flat_map(|l| (0..n).map(move |k| (l, k))).collect();
    let product = |&(l, k): &(usize, usize)| row.eigenvalues[l] * col.eigenvalues[k];
    pairs.sort_by(|x, y| product(y).total_cmp(&product(x)));
    Ok(SpectrumND {
        dims: vec![m, n],
        eigenvalues: pairs.iter().map(product).collect(),
        basis: TensorBasis::Separable {
            rows: row.modulated(band.center[0]),
            cols: col.modulated(band.center[1]),
            pairs,
        },
    })
}

/// `#{p : eps <= λ_p <= 1 - eps}`.
pub fn transition_count(eigs: &[f64], eps: f64) -> usize {
    eigs.iter().filter(|&&x| eps <= x && x <= 1.0 - eps).count()
}

/// `(4MJ/π²)(3 + ln N) + (4NJ/π²)(3 + ln M)`.
pub fn gap_bound_2d(m: usize, n: usize, bands: usize) -> f64 {
    let (mf, nf, j) = (m as f64, n as f64, bands as f64);
    4.0 * j / (PI * PI) * (mf * (3.0 + nf.ln()) + nf * (3.0 + mf.ln()))
}

/// `trace - ||K||_F²`, checked against the a-priori bound for cubic
/// operators in one or two dimensions. Parallelepiped and 3-D operators are
/// reported without a bound.
pub fn trace_frobenius_gap(cov: &DenseCovariance) -> Result<GapReport> {
    let bound = match (cov.source, cov.dims()) {
        (CovarianceSource::Cubic, &[n]) => Some(prolate::gap_bound_1d(n, cov.bands)),
        (CovarianceSource::Cubic, &[m, n]) => Some(gap_bound_2d(m, n, cov.bands)),
        _ => None,
    };
    GapReport::from_matrix(cov.matrix(), bound).check()
}
