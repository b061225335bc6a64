//! Reference implementations that share no code with the library: kernels
//! built straight from the closed forms with nalgebra, nalgebra's own
//! Hermitian eigensolver, and adaptive Gauss-Kronrod quadrature.

#![allow(dead_code)]

use std::f64::consts::PI;

use mdprolate::bandspec::ParallelepipedBand;
use nalgebra::DMatrix;
use num_complex::Complex64;

pub type OMat = DMatrix<Complex64>;

/// `e^{j2πct} sin(2πwt) / (πt)`, with the `t = 0` value `2w`.
pub fn lag_1d(t: i64, center: f64, w: f64) -> Complex64 {
    let t = t as f64;
    let base = if t == 0.0 {
        2.0 * w
    } else {
        (2.0 * PI * w * t).sin() / (PI * t)
    };
    Complex64::from_polar(1.0, 2.0 * PI * center * t) * base
}

pub fn kernel_1d(n: usize, bands: &[(f64, f64)]) -> OMat {
    OMat::from_fn(n, n, |i, j| {
        bands
            .iter()
            .map(|&(c, w)| lag_1d(i as i64 - j as i64, c, w))
            .sum()
    })
}

/// Sum over boxes of `K_1 ⊗ K_0`; index `m + M n`.
pub fn cubic_2d(m: usize, n: usize, bands: &[([f64; 2], [f64; 2])]) -> OMat {
    let mut total = OMat::zeros(m * n, m * n);
    for &(c, w) in bands {
        let k0 = kernel_1d(m, &[(c[0], w[0])]);
        let k1 = kernel_1d(n, &[(c[1], w[1])]);
        total += k1.kronecker(&k0);
    }
    total
}

pub fn eigenvalues_desc(k: &OMat) -> Vec<f64> {
    let mut e: Vec<f64> = k.clone().symmetric_eigenvalues().iter().copied().collect();
    e.sort_by(|a, b| b.total_cmp(a));
    e
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Eigenvalues of the symmetric tridiagonal matrix that commutes with the
/// `n x n` baseband sinc kernel, with the matching eigenvectors, ordered
/// by descending tridiagonal eigenvalue.
pub fn tridiagonal_dpss(n: usize, w: f64) -> Vec<Vec<f64>> {
    let mut t = DMatrix::<f64>::zeros(n, n);
    let half = (n as f64 - 1.0) / 2.0;
    for i in 0..n {
        t[(i, i)] = (half - i as f64).powi(2) * (2.0 * PI * w).cos();
        if i + 1 < n {
            let off = (i + 1) as f64 * (n - i - 1) as f64 / 2.0;
            t[(i, i + 1)] = off;
            t[(i + 1, i)] = off;
        }
    }
    let eig = t.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    order
        .into_iter()
        .map(|k| eig.eigenvectors.column(k).iter().copied().collect())
        .collect()
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const K15_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const G7_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64) {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let centre = f(mid);
    let mut kronrod = centre * K15_WEIGHTS[7];
    let mut gauss = centre * G7_WEIGHTS[3];
    for i in 0..7 {
        let x = half * GK_NODES[i];
        let pair = f(mid - x) + f(mid + x);
        kronrod += pair * K15_WEIGHTS[i];
        if i % 2 == 1 {
            gauss += pair * G7_WEIGHTS[i / 2];
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).norm())
}

/// Adaptive Gauss-Kronrod 7/15 on `[a, b]` to absolute tolerance `tol`.
pub fn integrate(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64, tol: f64) -> Complex64 {
    fn go(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64, tol: f64, depth: u32) -> Complex64 {
        let (value, err) = gk15(f, a, b);
        if err <= tol || depth == 0 {
            return value;
        }
        let mid = 0.5 * (a + b);
        go(f, a, mid, tol / 2.0, depth - 1) + go(f, mid, b, tol / 2.0, depth - 1)
    }
    if a == b {
        return Complex64::new(0.0, 0.0);
    }
    go(f, a, b, tol, 40)
}

/// `y` range of the parallelogram over the vertical line at `f0`, from the
/// two strips `|a x + b y| <= W0` and `|c x + d y| <= W1` around the centre.
fn vertical_section(band: &ParallelepipedBand, f0: f64) -> Option<(f64, f64)> {
    let x = f0 - band.center[0];
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for (p, q, w) in [
        (band.a, band.b, band.half_widths[0]),
        (band.c, band.d, band.half_widths[1]),
    ] {
        if q == 0.0 {
            if (p * x).abs() > w {
                return None;
            }
            continue;
        }
        let (y0, y1) = ((-w - p * x) / q, (w - p * x) / q);
        lo = lo.max(y0.min(y1));
        hi = hi.min(y0.max(y1));
    }
    (hi > lo).then(|| (lo + band.center[1], hi + band.center[1]))
}

/// `∬ e^{j2π(f0 t + f1 s)} df` over the parallelogram, integrated in the
/// original frequency coordinates with the outer axis split at the
/// vertices so every panel has linear section limits.
pub fn pp_lag_quadrature(band: &ParallelepipedBand, t: i64, s: i64, tol: f64) -> Complex64 {
    let (tf, sf) = (t as f64, s as f64);
    let mut xs: Vec<f64> = band.vertices().iter().map(|v| v[0]).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    let inner = |f0: f64| -> Complex64 {
        match vertical_section(band, f0) {
            Some((lo, hi)) => {
                let g = |f1: f64| Complex64::from_polar(1.0, 2.0 * PI * (f0 * tf + f1 * sf));
                integrate(&g, lo, hi, tol * 1e-2)
            }
            None => Complex64::new(0.0, 0.0),
        }
    };
    xs.windows(2)
        .map(|w| integrate(&inner, w[0], w[1], tol / xs.len() as f64))
        .sum()
}
