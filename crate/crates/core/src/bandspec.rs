//! Band geometry: unions of axis-aligned boxes and of parallelograms in
//! normalized frequency, plus the sampling grid they are paired with.
//!
//! Frequencies are in cycles/sample, so every band must sit inside
//! `[-1/2, 1/2]^d`. Bands that only share a boundary are considered
//! disjoint; the touch tolerance is [`TOUCH_TOLERANCE`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed when testing containment and disjointness.
pub const TOUCH_TOLERANCE: f64 = 1e-12;

/// Smallest admissible `|ad - bc|` for a parallelepiped transform.
pub const MIN_DETERMINANT: f64 = 1e-12;

/// One axis-aligned frequency box `center ± half_widths`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CubicBand {
    pub center: Vec<f64>,
    pub half_widths: Vec<f64>,
}

impl CubicBand {
    pub fn new(center: Vec<f64>, half_widths: Vec<f64>) -> Self {
        CubicBand {
            center,
            half_widths,
        }
    }

    /// Lebesgue measure of the box.
    pub fn measure(&self) -> f64 {
        self.half_widths.iter().map(|w| 2.0 * w).product()
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    fn interval(&self, axis: usize) -> (f64, f64) {
        (
            self.center[axis] - self.half_widths[axis],
            self.center[axis] + self.half_widths[axis],
        )
    }
}

/// A parallelogram `{(f, g) : |a f + b g| <= W0, |c f + d g| <= W1}`
/// translated by `center`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParallelepipedBand {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub half_widths: [f64; 2],
    pub center: [f64; 2],
}

impl ParallelepipedBand {
    pub fn new(a: f64, b: f64, c: f64, d: f64, half_widths: [f64; 2], center: [f64; 2]) -> Self {
        ParallelepipedBand {
            a,
            b,
            c,
            d,
            half_widths,
            center,
        }
    }

    /// Axis-aligned box expressed as an identity-transform parallelogram.
    pub fn from_box(half_widths: [f64; 2], center: [f64; 2]) -> Self {
        Self::new(1.0, 0.0, 0.0, 1.0, half_widths, center)
    }

    /// Determinant `ad - bc` of the defining transform.
    pub fn determinant(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    /// `4 W0 W1 / |V|`.
    pub fn measure(&self) -> f64 {
        4.0 * self.half_widths[0] * self.half_widths[1] / self.determinant().abs()
    }

    /// The same shape moved by `offset` in frequency.
    pub fn shifted(&self, offset: [f64; 2]) -> Self {
        ParallelepipedBand {
            center: [self.center[0] + offset[0], self.center[1] + offset[1]],
            ..self.clone()
        }
    }

    /// Corner points in `(f, g)`, in cyclic order.
    pub fn vertices(&self) -> [[f64; 2]; 4] {
        let v = self.determinant();
        let [w0, w1] = self.half_widths;
        let corner = |u: f64, s: f64| {
            [
                (self.d * u - self.b * s) / v + self.center[0],
                (-self.c * u + self.a * s) / v + self.center[1],
            ]
        };
        [
            corner(w0, w1),
            corner(-w0, w1),
            corner(-w0, -w1),
            corner(w0, -w1),
        ]
    }

    /// Unit normals of the two edge directions.
    fn edge_normals(&self) -> [[f64; 2]; 2] {
        let unit = |x: f64, y: f64| {
            let n = x.hypot(y);
            [x / n, y / n]
        };
        [unit(self.a, self.b), unit(self.c, self.d)]
    }

    fn same_shape(&self, other: &Self) -> bool {
        self.a == other.a
            && self.b == other.b
            && self.c == other.c
            && self.d == other.d
            && self.half_widths == other.half_widths
    }
}

/// A single violated invariant, naming the offending band(s).
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NoBands,
    ZeroDimension,
    DimensionMismatch {
        band: usize,
        expected: usize,
        found: usize,
    },
    NonPositiveHalfWidth {
        band: usize,
        axis: usize,
        value: f64,
    },
    NonFinite {
        band: usize,
    },
    OutOfRange {
        band: usize,
        axis: usize,
        extent: f64,
    },
    DegenerateTransform {
        band: usize,
        determinant: f64,
    },
    Overlap {
        first: usize,
        second: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoBands => write!(f, "no bands given"),
            Violation::ZeroDimension => write!(f, "dimension must be positive"),
            Violation::DimensionMismatch {
                band,
                expected,
                found,
            } => write!(f, "band {band} has dimension {found}, expected {expected}"),
            Violation::NonPositiveHalfWidth { band, axis, value } => {
                write!(f, "band {band} has half-width {value} on axis {axis}")
            }
            Violation::NonFinite { band } => write!(f, "band {band} has a non-finite parameter"),
            Violation::OutOfRange { band, axis, extent } => write!(
                f,
                "band {band} reaches {extent} on axis {axis}, outside [-1/2, 1/2]"
            ),
            Violation::DegenerateTransform { band, determinant } => {
                write!(f, "band {band} has degenerate transform, ad-bc = {determinant}")
            }
            Violation::Overlap { first, second } => {
                write!(f, "bands {first} and {second} overlap")
            }
        }
    }
}

/// Outcome of [`validate_cubic`] / [`validate_parallelepipeds`].
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_ok() {
            Ok(())
        } else {
            Err(Error::InvalidBands(self.violations))
        }
    }
}

/// Checks every invariant of a cubic band union and reports all violations.
///
/// Overlap is decided per axis: two boxes overlap iff their intervals
/// intersect with positive length on every axis.
pub fn validate_cubic(dim: usize, bands: &[CubicBand]) -> ValidationReport {
    let mut violations = Vec::new();
    if dim == 0 {
        violations.push(Violation::ZeroDimension);
    }
    if bands.is_empty() {
        violations.push(Violation::NoBands);
    }
    let mut shaped = vec![true; bands.len()];
    for (i, band) in bands.iter().enumerate() {
        if band.center.len() != dim || band.half_widths.len() != dim {
            let found = if band.center.len() != dim {
                band.center.len()
            } else {
                band.half_widths.len()
            };
            violations.push(Violation::DimensionMismatch {
                band: i,
                expected: dim,
                found,
            });
            shaped[i] = false;
            continue;
        }
        if band
            .center
            .iter()
            .chain(&band.half_widths)
            .any(|x| !x.is_finite())
        {
            violations.push(Violation::NonFinite { band: i });
            shaped[i] = false;
            continue;
        }
        for axis in 0..dim {
            let w = band.half_widths[axis];
            if w <= 0.0 {
                violations.push(Violation::NonPositiveHalfWidth {
                    band: i,
                    axis,
                    value: w,
                });
            }
            let extent = band.center[axis].abs() + w;
            if extent > 0.5 + TOUCH_TOLERANCE {
                violations.push(Violation::OutOfRange {
                    band: i,
                    axis,
                    extent,
                });
            }
        }
    }
    for i in 0..bands.len() {
        for j in i + 1..bands.len() {
            if shaped[i] && shaped[j] && boxes_overlap(&bands[i], &bands[j]) {
                violations.push(Violation::Overlap {
                    first: i,
                    second: j,
                });
            }
        }
    }
    ValidationReport { violations }
}

fn boxes_overlap(x: &CubicBand, y: &CubicBand) -> bool {
    (0..x.dim()).all(|axis| {
        let (lo_x, hi_x) = x.interval(axis);
        let (lo_y, hi_y) = y.interval(axis);
        hi_x.min(hi_y) - lo_x.max(lo_y) > TOUCH_TOLERANCE
    })
}

/// Checks every invariant of a parallelogram union and reports all
/// violations. Overlap uses the separating-axis test on the edge normals of
/// both quadrilaterals.
pub fn validate_parallelepipeds(bands: &[ParallelepipedBand]) -> ValidationReport {
    let mut violations = Vec::new();
    if bands.is_empty() {
        violations.push(Violation::NoBands);
    }
    let mut usable = vec![true; bands.len()];
    for (i, band) in bands.iter().enumerate() {
        let params = [
            band.a,
            band.b,
            band.c,
            band.d,
            band.half_widths[0],
            band.half_widths[1],
            band.center[0],
            band.center[1],
        ];
        if params.iter().any(|x| !x.is_finite()) {
            violations.push(Violation::NonFinite { band: i });
            usable[i] = false;
            continue;
        }
        for (axis, &w) in band.half_widths.iter().enumerate() {
            if w <= 0.0 {
                violations.push(Violation::NonPositiveHalfWidth {
                    band: i,
                    axis,
                    value: w,
                });
                usable[i] = false;
            }
        }
        let det = band.determinant();
        if det.abs() < MIN_DETERMINANT {
            violations.push(Violation::DegenerateTransform {
                band: i,
                determinant: det,
            });
            usable[i] = false;
            continue;
        }
        let vertices = band.vertices();
        for axis in 0..2 {
            let extent = vertices
                .iter()
                .map(|v| v[axis].abs())
                .fold(0.0_f64, f64::max);
            if extent > 0.5 + TOUCH_TOLERANCE {
                violations.push(Violation::OutOfRange {
                    band: i,
                    axis,
                    extent,
                });
            }
        }
    }
    for i in 0..bands.len() {
        for j in i + 1..bands.len() {
            if usable[i] && usable[j] && parallelograms_overlap(&bands[i], &bands[j]) {
                violations.push(Violation::Overlap {
                    first: i,
                    second: j,
                });
            }
        }
    }
    ValidationReport { violations }
}

fn parallelograms_overlap(x: &ParallelepipedBand, y: &ParallelepipedBand) -> bool {
    let (vx, vy) = (x.vertices(), y.vertices());
    let project = |vs: &[[f64; 2]; 4], n: [f64; 2]| {
        vs.iter()
            .map(|v| v[0] * n[0] + v[1] * n[1])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                (lo.min(p), hi.max(p))
            })
    };
    let axes = x.edge_normals().into_iter().chain(y.edge_normals());
    for n in axes {
        let (lo_x, hi_x) = project(&vx, n);
        let (lo_y, hi_y) = project(&vy, n);
        if hi_x.min(hi_y) - lo_x.max(lo_y) <= TOUCH_TOLERANCE {
            return false;
        }
    }
    true
}

/// A validated union of `J` disjoint axis-aligned boxes in `[-1/2, 1/2]^d`.
/// Band order is preserved and used for all per-band indexing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CubicBandUnion {
    dim: usize,
    bands: Vec<CubicBand>,
}

impl CubicBandUnion {
    pub fn new(dim: usize, bands: Vec<CubicBand>) -> Result<Self> {
        validate_cubic(dim, &bands).into_result()?;
        Ok(CubicBandUnion { dim, bands })
    }

    /// Convenience constructor for 1-D unions from `(center, half_width)`.
    pub fn intervals(bands: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            1,
            bands
                .iter()
                .map(|&(c, w)| CubicBand::new(vec![c], vec![w]))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bands(&self) -> &[CubicBand] {
        &self.bands
    }

    pub fn len(&self) -> usize {
        self.bands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bands.is_empty()
    }

    pub fn measure(&self) -> f64 {
        measure_cubic(self)
    }

    /// Union containing only band `index`.
    pub fn single(&self, index: usize) -> CubicBandUnion {
        CubicBandUnion {
            dim: self.dim,
            bands: vec![self.bands[index].clone()],
        }
    }
}

/// Total Lebesgue measure `Σ_i Π_j 2 W_i[j]`.
pub fn measure_cubic(union: &CubicBandUnion) -> f64 {
    union.bands.iter().map(CubicBand::measure).sum()
}

/// `4 W0 W1 / |ad - bc|`.
pub fn measure_pp(band: &ParallelepipedBand) -> f64 {
    band.measure()
}

/// A validated union of disjoint parallelograms inside `[-1/2, 1/2]^2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParallelepipedUnion {
    bands: Vec<ParallelepipedBand>,
}

impl ParallelepipedUnion {
    pub fn new(bands: Vec<ParallelepipedBand>) -> Result<Self> {
        validate_parallelepipeds(&bands).into_result()?;
        Ok(ParallelepipedUnion { bands })
    }

    pub fn bands(&self) -> &[ParallelepipedBand] {
        &self.bands
    }

    pub fn len(&self) -> usize {
        self.bands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bands.is_empty()
    }

    pub fn measure(&self) -> f64 {
        self.bands.iter().map(measure_pp).sum()
    }

    /// Whether `other` consists of the same shapes, in the same order,
    /// possibly at different centers.
    pub fn same_shapes(&self, other: &ParallelepipedUnion) -> bool {
        self.len() == other.len()
            && self
                .bands
                .iter()
                .zip(&other.bands)
                .all(|(x, y)| x.same_shape(y))
    }
}

/// Samples per axis; every axis needs at least two samples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SamplingGrid {
    dims: Vec<usize>,
}

impl SamplingGrid {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidArgument("sampling grid has no axes".into()));
        }
        if let Some((axis, &size)) = dims.iter().enumerate().find(|(_, &n)| n < 2) {
            return Err(Error::GridTooSmall { axis, size });
        }
        Ok(SamplingGrid { dims })
    }

    pub fn square(n: usize) -> Result<Self> {
        Self::new(vec![n, n])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.dims.len()
    }

    /// Number of samples, `Π dims`.
    pub fn size(&self) -> usize {
        self.dims.iter().product()
    }

    /// `(M, N)` for a 2-D grid.
    pub fn shape_2d(&self) -> Result<(usize, usize)> {
        match self.dims[..] {
            [m, n] => Ok((m, n)),
            _ => Err(Error::DimensionMismatch {
                expected: 2,
                found: self.dim(),
            }),
        }
    }
}

/// Maps analog bands (Hz) to normalized frequency by multiplying centers and
/// half-widths componentwise by the sampling periods `ts` (seconds).
pub fn scale_analog(analog: &[CubicBand], ts: &[f64]) -> Result<CubicBandUnion> {
    if let Some(&t) = ts.iter().find(|&&t| !(t > 0.0 && t.is_finite())) {
        return Err(Error::InvalidArgument(format!(
            "sampling period must be positive, got {t}"
        )));
    }
    let dim = ts.len();
    let mut scaled = Vec::with_capacity(analog.len());
    for (i, band) in analog.iter().enumerate() {
        if band.center.len() != dim || band.half_widths.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: band.center.len(),
            });
        }
        for axis in 0..dim {
            let reach = ts[axis] * (band.center[axis].abs() + band.half_widths[axis]);
            if reach > 0.5 + TOUCH_TOLERANCE {
                return Err(Error::Nyquist {
                    band: i,
                    axis,
                    scaled: reach,
                });
            }
        }
        scaled.push(CubicBand::new(
            band.center.iter().zip(ts).map(|(c, t)| c * t).collect(),
            band.half_widths.iter().zip(ts).map(|(w, t)| w * t).collect(),
        ));
    }
    CubicBandUnion::new(dim, scaled)
}

/// The JSON band document accepted by the CLI:
///
/// ```json
/// {"dim": 2,
///  "cubic": [{"center": [0.1, 0.0], "half_widths": [0.05, 0.05]}],
///  "parallelepiped": [{"a": 1, "b": 0.5, "c": 0, "d": 1,
///                      "half_widths": [0.1, 0.1], "center": [0, 0]}],
///  "grid": [32, 32]}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandConfig {
    pub dim: usize,
    #[serde(default)]
    pub cubic: Vec<CubicBand>,
    #[serde(default)]
    pub parallelepiped: Vec<ParallelepipedBand>,
    #[serde(default)]
    pub grid: Option<Vec<usize>>,
}

impl BandConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Validation report covering whichever band kinds are present.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        if self.cubic.is_empty() && self.parallelepiped.is_empty() {
            report.violations.push(Violation::NoBands);
            return report;
        }
        if !self.cubic.is_empty() {
            report.violations.extend(validate_cubic(self.dim, &self.cubic).violations);
        }
        if !self.parallelepiped.is_empty() {
            if self.dim != 2 {
                report.violations.push(Violation::DimensionMismatch {
                    band: 0,
                    expected: 2,
                    found: self.dim,
                });
            }
            report
                .violations
                .extend(validate_parallelepipeds(&self.parallelepiped).violations);
        }
        report
    }

    pub fn cubic_union(&self) -> Result<CubicBandUnion> {
        CubicBandUnion::new(self.dim, self.cubic.clone())
    }

    pub fn parallelepiped_union(&self) -> Result<ParallelepipedUnion> {
        if self.dim != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: self.dim,
            });
        }
        ParallelepipedUnion::new(self.parallelepiped.clone())
    }

    pub fn sampling_grid(&self) -> Result<Option<SamplingGrid>> {
        self.grid.clone().map(SamplingGrid::new).transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn band2(c: [f64; 2], w: [f64; 2]) -> CubicBand {
        CubicBand::new(c.to_vec(), w.to_vec())
    }

    #[test]
    fn measure_of_two_intervals() {
        let u = CubicBandUnion::intervals(&[(-0.1, 0.05), (0.2, 0.05)]).unwrap();
        assert!((measure_cubic(&u) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn measure_of_boxes() {
        let one = CubicBandUnion::new(2, vec![band2([0.0, 0.0], [0.05, 0.05])]).unwrap();
        assert!((one.measure() - 0.01).abs() < 1e-15);
        let two = CubicBandUnion::new(
            2,
            vec![band2([-0.2, 0.0], [0.05, 0.05]), band2([0.2, 0.1], [0.1, 0.025])],
        )
        .unwrap();
        assert!((two.measure() - 0.02).abs() < 1e-15);
    }

    #[test]
    fn measure_of_parallelograms() {
        let id = ParallelepipedBand::from_box([0.1, 0.1], [0.0, 0.0]);
        assert!((measure_pp(&id) - 0.04).abs() < 1e-15);
        let scaled = ParallelepipedBand::new(2.0, 0.0, 0.0, 2.0, [0.1, 0.1], [0.0, 0.0]);
        assert!((measure_pp(&scaled) - 0.01).abs() < 1e-15);
        let shear = ParallelepipedBand::new(1.0, 1.0, 0.0, 1.0, [0.1, 0.1], [0.0, 0.0]);
        assert!((measure_pp(&shear) - 0.04).abs() < 1e-15);
    }

    #[test]
    fn identity_parallelogram_matches_box_measure() {
        let pp = ParallelepipedBand::from_box([0.07, 0.12], [0.1, -0.2]);
        let cubic = CubicBandUnion::new(2, vec![band2([0.1, -0.2], [0.07, 0.12])]).unwrap();
        assert!((pp.measure() - cubic.measure()).abs() < 1e-15);
    }

    #[test]
    fn two_intervals_are_valid() {
        let report = validate_cubic(
            1,
            &[
                CubicBand::new(vec![-0.1], vec![0.05]),
                CubicBand::new(vec![0.2], vec![0.05]),
            ],
        );
        assert!(report.is_ok(), "{report:?}");
    }

    #[test]
    fn identical_bands_overlap() {
        let b = CubicBand::new(vec![0.1], vec![0.05]);
        let report = validate_cubic(1, &[b.clone(), b]);
        assert_eq!(
            report.violations,
            vec![Violation::Overlap {
                first: 0,
                second: 1
            }]
        );
    }

    #[test]
    fn band_past_nyquist_is_out_of_range() {
        let report = validate_cubic(1, &[CubicBand::new(vec![0.5], vec![0.1])]);
        assert!(matches!(
            report.violations[..],
            [Violation::OutOfRange { band: 0, axis: 0, .. }]
        ));
    }

    #[test]
    fn touching_bands_are_accepted() {
        let report = validate_cubic(
            1,
            &[
                CubicBand::new(vec![-0.1], vec![0.1]),
                CubicBand::new(vec![0.1], vec![0.1]),
            ],
        );
        assert!(report.is_ok());
    }

    #[test]
    fn boxes_disjoint_on_one_axis_do_not_overlap() {
        let report = validate_cubic(
            2,
            &[band2([0.0, -0.2], [0.2, 0.1]), band2([0.0, 0.2], [0.2, 0.1])],
        );
        assert!(report.is_ok());
    }

    #[test]
    fn all_violations_are_reported() {
        let report = validate_cubic(
            2,
            &[
                band2([0.0, 0.0], [0.1, -0.1]),
                band2([0.45, 0.0], [0.1, 0.1]),
                CubicBand::new(vec![0.0], vec![0.1]),
            ],
        );
        assert_eq!(report.violations.len(), 3, "{:?}", report.violations);
    }

    #[test]
    fn sheared_parallelograms_overlap_detection() {
        // Bounding boxes intersect but the shapes are separated along (1, -1).
        let left = ParallelepipedBand::new(1.0, -1.0, 1.0, 1.0, [0.05, 0.2], [-0.1, 0.0]);
        let right = ParallelepipedBand::new(1.0, -1.0, 1.0, 1.0, [0.05, 0.2], [0.1, -0.1]);
        assert!(validate_parallelepipeds(&[left.clone(), right]).is_ok());
        let hit = left.shifted([0.02, 0.0]);
        let report = validate_parallelepipeds(&[left, hit]);
        assert_eq!(
            report.violations,
            vec![Violation::Overlap {
                first: 0,
                second: 1
            }]
        );
    }

    #[test]
    fn degenerate_and_escaping_parallelograms() {
        let flat = ParallelepipedBand::new(1.0, 2.0, 0.5, 1.0, [0.1, 0.1], [0.0, 0.0]);
        assert!(matches!(
            validate_parallelepipeds(&[flat]).violations[..],
            [Violation::DegenerateTransform { band: 0, .. }]
        ));
        let big = ParallelepipedBand::new(1.0, 1.0, 0.0, 1.0, [0.45, 0.1], [0.0, 0.0]);
        assert!(matches!(
            validate_parallelepipeds(&[big]).violations[..],
            [Violation::OutOfRange { band: 0, axis: 0, .. }]
        ));
    }

    #[test]
    fn scale_analog_maps_hz_to_cycles_per_sample() {
        let analog = [CubicBand::new(vec![100.0], vec![20.0])];
        let u = scale_analog(&analog, &[1.0 / 400.0]).unwrap();
        assert!((u.bands()[0].center[0] - 0.25).abs() < 1e-15);
        assert!((u.bands()[0].half_widths[0] - 0.05).abs() < 1e-15);

        let normalized = [CubicBand::new(vec![0.1, -0.2], vec![0.05, 0.1])];
        let same = scale_analog(&normalized, &[1.0, 1.0]).unwrap();
        assert_eq!(same.bands(), &normalized[..]);

        let too_fast = [CubicBand::new(vec![300.0], vec![10.0])];
        assert!(matches!(
            scale_analog(&too_fast, &[1.0 / 400.0]),
            Err(Error::Nyquist { band: 0, axis: 0, .. })
        ));
    }

    #[test]
    fn grid_requires_two_samples_per_axis() {
        assert!(SamplingGrid::new(vec![8, 1]).is_err());
        assert_eq!(SamplingGrid::new(vec![4, 8]).unwrap().size(), 32);
    }

    #[test]
    fn band_config_rejects_unknown_keys() {
        let ok = r#"{"dim": 1, "cubic": [{"center": [0.1], "half_widths": [0.05]}], "grid": [64]}"#;
        let cfg = BandConfig::from_json(ok).unwrap();
        assert!(cfg.validate().is_ok());
        assert_eq!(cfg.sampling_grid().unwrap().unwrap().dims(), &[64]);

        let extra = r#"{"dim": 1, "cubic": [], "colour": "red"}"#;
        assert!(BandConfig::from_json(extra).is_err());
        let nested = r#"{"dim": 1, "cubic": [{"center": [0.1], "half_widths": [0.05], "w": 1}]}"#;
        assert!(BandConfig::from_json(nested).is_err());
    }

    #[test]
    fn empty_config_is_reported() {
        let cfg = BandConfig::from_json(r#"{"dim": 2}"#).unwrap();
        assert_eq!(cfg.validate().violations, vec![Violation::NoBands]);
    }
}
