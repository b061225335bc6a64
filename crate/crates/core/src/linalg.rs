//! Dense Hermitian eigendecomposition and small matrix helpers.
//!
//! Every operator in this crate has entries that depend only on index
//! differences, so its matrix `K` satisfies `J K J = conj(K)` where `J`
//! reverses the index order. For such matrices the unitary
//! `U = (I + iJ)/sqrt(2)` makes `U^H K U` real symmetric, which lets the
//! eigensolver run in real arithmetic. Matrices without that structure go
//! through the complex solver.

use faer::prelude::{Reborrow, ReborrowMut};
use faer::{Mat, MatRef, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix used throughout the crate.
pub type CMat = Mat<Complex64>;

const PERSYMMETRY_TOLERANCE: f64 = 1e-14;
const PHASE_TIE_TOLERANCE: f64 = 1e-9;

/// Eigenvalues in descending order with matching eigenvector columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: Option<CMat>,
}

/// Which arithmetic the last decomposition used. Exposed for tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverPath {
    Real,
    Persymmetric,
    Complex,
}

/// `(A + A^H) / 2`.
pub fn hermitian_part(a: MatRef<'_, Complex64>) -> CMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| {
        (a[(i, j)] + a[(j, i)].conj()) * 0.5
    })
}

pub fn solver_path(h: MatRef<'_, Complex64>) -> SolverPath {
    let n = h.nrows();
    let mut real = true;
    let mut scale = 0.0_f64;
    let mut deviation = 0.0_f64;
    for j in 0..n {
        for i in 0..n {
            let x = h[(i, j)];
            real &= x.im == 0.0;
            scale = scale.max(x.norm());
            deviation = deviation.max((h[(n - 1 - i, n - 1 - j)] - x.conj()).norm());
        }
    }
    if real {
        SolverPath::Real
    } else if deviation <= PERSYMMETRY_TOLERANCE * scale.max(1.0) {
        SolverPath::Persymmetric
    } else {
        SolverPath::Complex
    }
}

/// Full or values-only eigendecomposition of the Hermitian part of `a`.
///
/// Eigenvalues come back in descending order (stable with respect to the
/// solver's output on ties). Each eigenvector is scaled so that its
/// largest-magnitude entry is real and positive; among entries within a
/// relative `1e-9` of the maximum, the first index wins.
pub fn hermitian_eigen(
    a: MatRef<'_, Complex64>,
    want_vectors: bool,
    context: &str,
) -> Result<HermitianEigen> {
    if a.nrows() != a.ncols() {
        return Err(Error::ShapeMismatch {
            expected: (a.nrows(), a.nrows()),
            found: (a.nrows(), a.ncols()),
        });
    }
    let n = a.nrows();
    let h = hermitian_part(a);
    let fail = |reason: String| Error::Eigensolver {
        context: context.to_owned(),
        reason,
    };

    let (ascending, vectors) = match solver_path(h.as_ref()) {
        SolverPath::Real => {
            let re = Mat::from_fn(n, n, |i, j| h[(i, j)].re);
            real_eigen(re.as_ref(), want_vectors)
                .map_err(fail)?
                .map_vectors(|w| Mat::from_fn(n, w.ncols(), |i, j| Complex64::new(w[(i, j)], 0.0)))
        }
        SolverPath::Persymmetric => {
            // Re(K) + i(KJ - JK)/2, real because (KJ - JK) is purely imaginary.
            let s = Mat::from_fn(n, n, |i, j| {
                h[(i, j)].re - 0.5 * (h[(i, n - 1 - j)].im - h[(n - 1 - i, j)].im)
            });
            let r = std::f64::consts::FRAC_1_SQRT_2;
            real_eigen(s.as_ref(), want_vectors)
                .map_err(fail)?
                .map_vectors(|w| {
                    Mat::from_fn(n, w.ncols(), |i, j| {
                        Complex64::new(r * w[(i, j)], r * w[(n - 1 - i, j)])
                    })
                })
        }
        SolverPath::Complex => {
            if want_vectors {
                let evd = h
                    .self_adjoint_eigen(Side::Lower)
                    .map_err(|e| fail(format!("{e:?}")))?;
                let values = evd.S().column_vector().iter().map(|x| x.re).collect();
                (values, Some(evd.U().to_owned()))
            } else {
                let values = h
                    .self_adjoint_eigenvalues(Side::Lower)
                    .map_err(|e| fail(format!("{e:?}")))?;
                (values, None)
            }
        }
    };

    if ascending.iter().any(|x| !x.is_finite()) {
        return Err(fail("non-finite eigenvalue".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| ascending[y].total_cmp(&ascending[x]));
    let values = order.iter().map(|&k| ascending[k]).collect();
    let vectors = vectors.map(|u| {
        let mut sorted = Mat::from_fn(n, n, |i, j| u[(i, order[j])]);
        for j in 0..n {
            normalize_phase(sorted.as_mut().col_mut(j));
        }
        sorted
    });
    Ok(HermitianEigen { values, vectors })
}

type Ascending<T> = (Vec<f64>, Option<T>);

trait MapVectors<T> {
    fn map_vectors<U>(self, f: impl FnOnce(T) -> U) -> Ascending<U>;
}

impl<T> MapVectors<T> for Ascending<T> {
    fn map_vectors<U>(self, f: impl FnOnce(T) -> U) -> Ascending<U> {
        (self.0, self.1.map(f))
    }
}

fn real_eigen(
    s: MatRef<'_, f64>,
    want_vectors: bool,
) -> std::result::Result<Ascending<Mat<f64>>, String> {
    if want_vectors {
        let evd = s
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| format!("{e:?}"))?;
        let values = evd.S().column_vector().iter().copied().collect();
        Ok((values, Some(evd.U().to_owned())))
    } else {
        let values = s
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| format!("{e:?}"))?;
        Ok((values, None))
    }
}

/// Rotates `v` so that its (first) largest-magnitude entry is real positive.
pub fn normalize_phase(mut v: faer::ColMut<'_, Complex64>) {
    let peak = v.rb().iter().map(|x| x.norm()).fold(0.0_f64, f64::max);
    if peak == 0.0 {
        return;
    }
    let pivot = v
        .rb()
        .iter()
        .position(|x| x.norm() >= peak * (1.0 - PHASE_TIE_TOLERANCE))
        .expect("peak entry exists");
    let x = v[pivot];
    let rot = x.conj() / x.norm();
    for z in v.rb_mut().iter_mut() {
        *z *= rot;
    }
}

/// Frobenius inner product `<A, B> = trace(B^H A)`.
pub fn frobenius_inner(a: MatRef<'_, Complex64>, b: MatRef<'_, Complex64>) -> Complex64 {
    debug_assert_eq!((a.nrows(), a.ncols()), (b.nrows(), b.ncols()));
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            acc += b[(i, j)].conj() * a[(i, j)];
        }
    }
    acc
}

pub fn frobenius_norm_sq(a: MatRef<'_, Complex64>) -> f64 {
    let mut acc = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            acc += a[(i, j)].norm_sqr();
        }
    }
    acc
}

pub fn trace(a: MatRef<'_, Complex64>) -> Complex64 {
    (0..a.nrows().min(a.ncols())).map(|i| a[(i, i)]).sum()
}

/// Column-major vectorization: `vec(Y)[m + M n] = Y[m, n]`.
pub fn vectorize(y: MatRef<'_, Complex64>) -> Vec<Complex64> {
    let (m, n) = (y.nrows(), y.ncols());
    let mut out = Vec::with_capacity(m * n);
    for j in 0..n {
        for i in 0..m {
            out.push(y[(i, j)]);
        }
    }
    out
}

/// Inverse of [`vectorize`] for an `rows x cols` shape.
pub fn unvectorize(v: &[Complex64], rows: usize, cols: usize) -> CMat {
    assert_eq!(v.len(), rows * cols);
    Mat::from_fn(rows, cols, |i, j| v[i + rows * j])
}
