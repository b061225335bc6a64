//! Eigen-tensor dictionaries, projections and subspace angles.
//!
//! `Φ` holds the leading eigen-tensors of the full multiband operator. `Ψ`
//! holds, for each box separately, the leading modulated DPSS outer
//! products `E_{f⁰} s_l (E_{f¹} s_k)ᵀ`. Atoms of one box are exactly
//! orthonormal; atoms of different boxes are only nearly so, which is why
//! spans are compared through an orthonormalized basis.

use faer::{Mat, MatRef};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::bandspec::{CubicBandUnion, SamplingGrid};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::mdoperator::{self, OperatorSpec, SpectrumND};
use crate::prolate::{ceil_count, floor_count, GramBoundReport, ResidualReport};

/// Singular values below `RANK_TOLERANCE · σ_max` are treated as zero.
pub const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AtomSource {
    Phi,
    Psi,
}

/// Where an atom came from and the eigenvalue it carries.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomMeta {
    pub source: AtomSource,
    /// Box index for `Ψ` atoms.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub band: Option<usize>,
    /// Rank in the operator spectrum for `Φ` atoms.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    /// DPSS indices `(l, k)` for `Ψ` atoms.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factors: Option<(usize, usize)>,
    pub eigenvalue: f64,
}

/// A unit-norm `M x N` tensor.
#[derive(Debug, Clone)]
pub struct Atom {
    pub tensor: CMat,
    pub meta: AtomMeta,
}

/// Ordered atoms on a common grid.
#[derive(Debug, Clone)]
pub struct Dictionary {
    atoms: Vec<Atom>,
    grid: SamplingGrid,
    bands: CubicBandUnion,
}

impl Dictionary {
    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn grid(&self) -> &SamplingGrid {
        &self.grid
    }

    pub fn bands(&self) -> &CubicBandUnion {
        &self.bands
    }

    /// `(M, N)` of every atom.
    pub fn shape(&self) -> (usize, usize) {
        self.grid.shape_2d().expect("dictionaries are 2-D")
    }

    /// Vectorized atoms as columns.
    pub fn stacked(&self) -> CMat {
        let size = self.grid.size();
        let (m, _) = self.shape();
        Mat::from_fn(size, self.atoms.len(), |i, j| {
            self.atoms[j].tensor[(i % m, i / m)]
        })
    }

    /// `G[i, j] = <a_j, a_i>`.
    pub fn gram(&self) -> CMat {
        let a = self.stacked();
        a.adjoint() * &a
    }

    /// Largest `|<a_i, a_j> - δ_ij|`. With `within_band` set, pairs of `Ψ`
    /// atoms from different boxes are skipped.
    pub fn orthonormality_defect(&self, within_band: bool) -> f64 {
        let g = self.gram();
        let mut worst = 0.0_f64;
        for j in 0..self.len() {
            for i in 0..self.len() {
                if within_band && self.atoms[i].meta.band != self.atoms[j].meta.band {
                    continue;
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - target).norm());
            }
        }
        worst
    }

    /// Largest `|<a_i, a_j>|` over pairs from different boxes.
    pub fn max_cross_band_inner(&self) -> f64 {
        let g = self.gram();
        let mut worst = 0.0_f64;
        for j in 0..self.len() {
            for i in 0..self.len() {
                if self.atoms[i].meta.band != self.atoms[j].meta.band {
                    worst = worst.max(g[(i, j)].norm());
                }
            }
        }
        worst
    }
}

fn require_2d(spec: &OperatorSpec) -> Result<(usize, usize)> {
    spec.grid().shape_2d()
}

fn check_count(count: usize, size: usize) -> Result<()> {
    if count > size {
        return Err(Error::InvalidArgument(format!(
            "dictionary size {count} exceeds the {size} samples of the grid"
        )));
    }
    Ok(())
}

/// The leading `p` eigen-tensors of the full operator.
pub fn build_phi(spec: &OperatorSpec, p: usize) -> Result<Dictionary> {
    require_2d(spec)?;
    check_count(p, spec.size())?;
    let cov = mdoperator::materialize_cubic(spec)?;
    phi_from_spectrum(spec, &mdoperator::spectrum(&cov)?, p)
}

/// [`build_phi`] from an already computed spectrum of `spec`.
pub fn phi_from_spectrum(spec: &OperatorSpec, spectrum: &SpectrumND, p: usize) -> Result<Dictionary> {
    require_2d(spec)?;
    check_count(p, spectrum.len())?;
    let atoms = (0..p)
        .map(|rank| Atom {
            tensor: spectrum.eigen_tensor(rank),
            meta: AtomMeta {
                source: AtomSource::Phi,
                band: None,
                rank: Some(rank),
                factors: None,
                eigenvalue: spectrum.eigenvalues()[rank],
            },
        })
        .collect();
    Ok(Dictionary {
        atoms,
        grid: spec.grid().clone(),
        bands: spec.bands().clone(),
    })
}

/// For each box `i`, its leading `q[i]` separable eigen-tensors, ranked by
/// `λ_l λ_k` and then by `(l, k)`; boxes are concatenated in order.
pub fn build_psi(spec: &OperatorSpec, q: &[usize]) -> Result<Dictionary> {
    let (m, n) = require_2d(spec)?;
    if q.len() != spec.bands().len() {
        return Err(Error::DimensionMismatch {
            expected: spec.bands().len(),
            found: q.len(),
        });
    }
    let mut atoms = Vec::with_capacity(q.iter().sum());
    for (i, (band, &count)) in spec.bands().bands().iter().zip(q).enumerate() {
        check_count(count, spec.size())?;
        let sep = mdoperator::separable_spectrum(m, n, band)?;
        let pairs = sep.factor_indices().expect("separable spectrum");
        for p in 0..count {
            atoms.push(Atom {
                tensor: sep.eigen_tensor(p),
                meta: AtomMeta {
                    source: AtomSource::Psi,
                    band: Some(i),
                    rank: None,
                    factors: Some(pairs[p]),
                    eigenvalue: sep.eigenvalues()[p],
                },
            });
        }
    }
    Ok(Dictionary {
        atoms,
        grid: spec.grid().clone(),
        bands: spec.bands().clone(),
    })
}

/// Dictionary sizes `p` for `Φ` and `q_i` for each box of `Ψ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Sizing {
    pub p: usize,
    pub q: Vec<usize>,
}

impl Sizing {
    /// `p = Σ ⌈MN‖W_i‖(1+ε)⌉`, `q_i = ⌊MN‖W_i‖(1-ε)⌋`: a slightly larger
    /// `Φ` that should contain the span of `Ψ`.
    pub fn phi_covers_psi(spec: &OperatorSpec, eps: f64) -> Result<Sizing> {
        let (large, small) = Self::counts(spec, eps)?;
        Ok(Sizing {
            p: large.iter().sum(),
            q: small,
        })
    }

    /// Roles swapped: `p = Σ ⌊MN‖W_i‖(1-ε)⌋`, `q_i = ⌈MN‖W_i‖(1+ε)⌉`.
    pub fn psi_covers_phi(spec: &OperatorSpec, eps: f64) -> Result<Sizing> {
        let (large, small) = Self::counts(spec, eps)?;
        Ok(Sizing {
            p: small.iter().sum(),
            q: large,
        })
    }

    /// Largest admissible `ε`, `min(1, 1/‖W‖ - 1)`.
    pub fn max_eps(measure: f64) -> f64 {
        (1.0 / measure - 1.0).min(1.0)
    }

    fn counts(spec: &OperatorSpec, eps: f64) -> Result<(Vec<usize>, Vec<usize>)> {
        let upper = Self::max_eps(spec.measure());
        if !(eps > 0.0 && eps < upper) {
            return Err(Error::InvalidArgument(format!(
                "epsilon must lie in (0, {upper}), got {eps}"
            )));
        }
        let size = spec.size() as f64;
        let per_band: Vec<f64> = spec
            .bands()
            .bands()
            .iter()
            .map(|b| size * b.measure())
            .collect();
        let large: Vec<usize> = per_band.iter().map(|x| ceil_count(x * (1.0 + eps))).collect();
        let small = per_band.iter().map(|x| floor_count(x * (1.0 - eps))).collect();
        if large.iter().sum::<usize>() > spec.size() {
            return Err(Error::InvalidArgument(format!(
                "epsilon {eps} asks for more atoms than the {} grid samples",
                spec.size()
            )));
        }
        Ok((large, small))
    }
}

/// Orthonormal basis of a dictionary's span.
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    q: CMat,
    shape: (usize, usize),
    tolerance: f64,
    singular_values: Vec<f64>,
}

impl SubspaceBasis {
    /// The zero subspace on an `M x N` grid.
    pub fn trivial(shape: (usize, usize)) -> Self {
        SubspaceBasis {
            q: CMat::zeros(shape.0 * shape.1, 0),
            shape,
            tolerance: 0.0,
            singular_values: Vec::new(),
        }
    }

    /// Span of the leading `p` eigen-tensors of `spectrum`, which are
    /// already orthonormal. Works for any operator, including
    /// parallelogram bands that have no [`OperatorSpec`].
    pub fn leading(spectrum: &SpectrumND, p: usize) -> Result<Self> {
        check_count(p, spectrum.len())?;
        let dims = spectrum.dims();
        let rows = dims[0];
        let size = spectrum.size();
        let cols: Vec<Vec<Complex64>> = (0..p).map(|k| spectrum.eigen_vector(k)).collect();
        Ok(SubspaceBasis {
            q: Mat::from_fn(size, p, |i, k| cols[k][i]),
            shape: (rows, size / rows),
            tolerance: 0.0,
            singular_values: vec![1.0; p],
        })
    }

    pub fn rank(&self) -> usize {
        self.q.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.shape
    }

    /// Absolute singular-value threshold used to decide the rank.
    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Singular values of the stacked atoms, descending.
    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    /// Orthonormal columns in `vec` ordering.
    pub fn columns(&self) -> MatRef<'_, Complex64> {
        self.q.as_ref()
    }

    fn project_columns(&self, a: MatRef<'_, Complex64>) -> CMat {
        let coeffs = self.q.adjoint() * a;
        &self.q * &coeffs
    }
}

/// Orthonormal basis of `span(atoms)` from a thin SVD of the stacked atoms,
/// keeping singular values above `1e-10 · σ_max`.
pub fn orthonormalize(d: &Dictionary) -> Result<SubspaceBasis> {
    if d.is_empty() {
        return Err(Error::EmptyDictionary);
    }
    let a = d.stacked();
    let svd = a.thin_svd().map_err(|e| Error::Svd(format!("{e:?}")))?;
    let sigma: Vec<f64> = svd.S().column_vector().iter().map(|x| x.re).collect();
    let max = sigma.iter().copied().fold(0.0, f64::max);
    let tolerance = RANK_TOLERANCE * max;
    let rank = sigma.iter().filter(|&&s| s > tolerance).count();
    Ok(SubspaceBasis {
        q: svd.U().subcols(0, rank).to_owned(),
        shape: d.shape(),
        tolerance,
        singular_values: sigma,
    })
}

/// Orthogonal projection of `y` onto the span.
pub fn project(basis: &SubspaceBasis, y: MatRef<'_, Complex64>) -> Result<CMat> {
    if (y.nrows(), y.ncols()) != basis.shape {
        return Err(Error::ShapeMismatch {
            expected: basis.shape,
            found: (y.nrows(), y.ncols()),
        });
    }
    let v = linalg::vectorize(y);
    let col = Mat::from_fn(v.len(), 1, |i, _| v[i]);
    let out = basis.project_columns(col.as_ref());
    Ok(Mat::from_fn(basis.shape.0, basis.shape.1, |i, j| {
        out[(i + basis.shape.0 * j, 0)]
    }))
}

/// `||a - P a||_F²` for every atom of `d`.
pub fn projection_residuals(basis: &SubspaceBasis, d: &Dictionary) -> Result<Vec<f64>> {
    if d.shape() != basis.shape {
        return Err(Error::ShapeMismatch {
            expected: basis.shape,
            found: d.shape(),
        });
    }
    let a = d.stacked();
    let pa = basis.project_columns(a.as_ref());
    Ok((0..a.ncols())
        .map(|j| (0..a.nrows()).map(|i| (a[(i, j)] - pa[(i, j)]).norm_sqr()).sum())
        .collect())
}

/// Cosine of the largest principal angle between the smaller span and the
/// larger one: `inf_{x ∈ span(small), ||x|| = 1} ||P_large x||`.
pub fn subspace_cos_theta(a: &Dictionary, b: &Dictionary) -> Result<f64> {
    if a.grid() != b.grid() {
        return Err(Error::InvalidArgument(
            "dictionaries live on different grids".into(),
        ));
    }
    cos_theta(&orthonormalize(a)?, &orthonormalize(b)?)
}

/// [`subspace_cos_theta`] on already orthonormalized bases.
pub fn cos_theta(a: &SubspaceBasis, b: &SubspaceBasis) -> Result<f64> {
    if a.shape != b.shape {
        return Err(Error::ShapeMismatch {
            expected: a.shape,
            found: b.shape,
        });
    }
    let (small, large) = if a.rank() <= b.rank() { (a, b) } else { (b, a) };
    if small.rank() == 0 {
        return Err(Error::EmptyDictionary);
    }
    let cross = large.q.adjoint() * &small.q;
    let sigma = cross
        .singular_values()
        .map_err(|e| Error::Svd(format!("{e:?}")))?;
    let min = sigma.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(min.clamp(0.0, 1.0))
}

/// Cross-box correlation bound `|<ψ₁, ψ₂>| <= 3 sqrt(1 - min(λ₁, λ₂))` on a
/// built `Ψ`. Atoms are identified as `(box, position within box)`.
pub fn psi_gram_bound(psi: &Dictionary) -> GramBoundReport {
    let ids = within_band_ids(psi);
    let g = psi.gram();
    let mut report = GramBoundReport::default();
    for j in 0..psi.len() {
        for i in j + 1..psi.len() {
            let (x, y) = (&psi.atoms[i].meta, &psi.atoms[j].meta);
            if x.band != y.band {
                report.record(ids[j], ids[i], g[(i, j)].norm(), x.eigenvalue.min(y.eigenvalue));
            }
        }
    }
    report
}

/// `||𝓑(ψ) - λ ψ||_F² <= 1 - λ²` for every atom of a built `Ψ`, with `𝓑`
/// the full multiband operator of `spec`.
pub fn psi_residual_bound(spec: &OperatorSpec, psi: &Dictionary) -> Result<ResidualReport> {
    let ids = within_band_ids(psi);
    let mut report = ResidualReport::default();
    for (atom, id) in psi.atoms.iter().zip(ids) {
        let applied = mdoperator::apply_cubic(spec, atom.tensor.as_ref())?;
        let lambda = atom.meta.eigenvalue;
        let mut r = 0.0;
        for j in 0..applied.ncols() {
            for i in 0..applied.nrows() {
                r += (applied[(i, j)] - atom.tensor[(i, j)] * lambda).norm_sqr();
            }
        }
        report.record(id, r, lambda);
    }
    Ok(report)
}

/// Both `Ψ` bounds computed from the 1-D factors without storing atoms, for
/// grids too large for a dense dictionary.
pub fn separable_psi_bounds(
    spec: &OperatorSpec,
    q: &[usize],
) -> Result<(GramBoundReport, ResidualReport)> {
    let (m, n) = require_2d(spec)?;
    if q.len() != spec.bands().len() {
        return Err(Error::DimensionMismatch {
            expected: spec.bands().len(),
            found: q.len(),
        });
    }
    let seps = spec
        .bands()
        .bands()
        .iter()
        .map(|b| mdoperator::separable_spectrum(m, n, b))
        .collect::<Result<Vec<_>>>()?;
    for (&count, _) in q.iter().zip(&seps) {
        check_count(count, spec.size())?;
    }
    // Factor columns: rows is M x q_i, cols is N x q_i.
    let factors: Vec<(CMat, CMat)> = seps
        .iter()
        .zip(q)
        .map(|(sep, &count)| {
            let pairs: Vec<_> = (0..count).map(|p| sep.factors(p).expect("separable")).collect();
            (
                Mat::from_fn(m, count, |i, p| pairs[p].0[i]),
                Mat::from_fn(n, count, |j, p| pairs[p].1[j]),
            )
        })
        .collect();

    let mut gram = GramBoundReport::default();
    for a in 0..seps.len() {
        for b in a + 1..seps.len() {
            let ru = factors[b].0.adjoint() * &factors[a].0;
            let rv = factors[b].1.adjoint() * &factors[a].1;
            for x in 0..q[a] {
                for y in 0..q[b] {
                    let inner = (ru[(y, x)] * rv[(y, x)]).norm();
                    let lambda = seps[a].eigenvalues()[x].min(seps[b].eigenvalues()[y]);
                    gram.record((a, x), (b, y), inner, lambda);
                }
            }
        }
    }

    let kernels = spec
        .bands()
        .bands()
        .iter()
        .map(|band| {
            Ok((
                crate::prolate::sinc_kernel(m, band.center[0], band.half_widths[0])?,
                crate::prolate::sinc_kernel(n, band.center[1], band.half_widths[1])?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut residual = ResidualReport::default();
    for (a, (rows, cols)) in factors.iter().enumerate() {
        let applied: Vec<(CMat, CMat)> = kernels
            .iter()
            .map(|(k0, k1)| (k0.matrix() * rows, k1.matrix() * cols))
            .collect();
        for x in 0..q[a] {
            let lambda = seps[a].eigenvalues()[x];
            let mut r = 0.0;
            for j in 0..n {
                for i in 0..m {
                    let mut z = -lambda * rows[(i, x)] * cols[(j, x)];
                    for (bu, bv) in &applied {
                        z += bu[(i, x)] * bv[(j, x)];
                    }
                    r += z.norm_sqr();
                }
            }
            residual.record((a, x), r, lambda);
        }
    }
    Ok((gram, residual))
}

fn within_band_ids(d: &Dictionary) -> Vec<(usize, usize)> {
    let mut next = std::collections::BTreeMap::new();
    d.atoms
        .iter()
        .map(|a| {
            let band = a.meta.band.unwrap_or(0);
            let slot = next.entry(band).or_insert(0usize);
            *slot += 1;
            (band, *slot - 1)
        })
        .collect()
}

/// One draw `x = Σ_k sqrt(λ_k) g_k Φ_k` with `g_k` independent circular
/// complex standard Gaussians; negative roundoff eigenvalues count as zero.
/// The result has covariance equal to the operator matrix.
pub fn sample_signal(spectrum: &SpectrumND, seed: u64) -> CMat {
    let v = sample_vec(spectrum, seed);
    let rows = spectrum.dims()[0];
    linalg::unvectorize(&v, rows, v.len() / rows)
}

fn sample_vec(spectrum: &SpectrumND, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let coeffs: Vec<Complex64> = spectrum
        .eigenvalues()
        .iter()
        .map(|&lambda| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re, im) * (scale * lambda.max(0.0).sqrt())
        })
        .collect();
    spectrum.combine(&coeffs)
}

/// Empirical against analytic approximation error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MseReport {
    pub trials: usize,
    pub rank: usize,
    /// Mean of `||x - P x||_F²` over the draws.
    pub empirical: f64,
    /// `Σ_{k >= rank} λ_k`, the exact expectation when the basis spans the
    /// leading `rank` eigen-tensors.
    pub analytic: f64,
}

impl MseReport {
    /// `|empirical - analytic| / analytic`, or the absolute difference when
    /// the analytic value is zero.
    pub fn relative_error(&self) -> f64 {
        let diff = (self.empirical - self.analytic).abs();
        if self.analytic > 0.0 {
            diff / self.analytic
        } else {
            diff
        }
    }
}

/// Draws `trials` signals with seeds `seed, seed + 1, …` and averages the
/// squared projection residual.
pub fn approx_mse(
    basis: &SubspaceBasis,
    spectrum: &SpectrumND,
    trials: usize,
    seed: u64,
) -> Result<MseReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("at least one trial is required".into()));
    }
    if basis.q.nrows() != spectrum.size() {
        return Err(Error::DimensionMismatch {
            expected: spectrum.size(),
            found: basis.q.nrows(),
        });
    }
    let residuals: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let x = sample_vec(spectrum, seed.wrapping_add(t));
            let col = Mat::from_fn(x.len(), 1, |i, _| x[i]);
            let px = basis.project_columns(col.as_ref());
            (0..x.len()).map(|i| (x[i] - px[(i, 0)]).norm_sqr()).sum()
        })
        .collect();
    let rank = basis.rank().min(spectrum.len());
    Ok(MseReport {
        trials,
        rank,
        empirical: residuals.iter().sum::<f64>() / trials as f64,
        analytic: spectrum.eigenvalues()[rank..].iter().sum(),
    })
}
