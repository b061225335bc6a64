//! CSV and JSON output.
//!
//! Numbers are written with 17 significant digits, enough for an exact
//! round trip of any `f64`. Files are written to a temporary sibling and
//! renamed into place, so readers never observe a partial file. Non-finite
//! values are refused before anything is written.

use std::fs;
use std::io::Write;
use std::path::Path;

use faer::MatRef;
use num_complex::Complex64;
use serde::Serialize;

use crate::bandspec::CubicBandUnion;
use crate::dictionary::{AtomMeta, Dictionary};
use crate::error::{Error, Result};

/// `x` in scientific notation with 17 significant digits.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn ensure_finite<'a>(values: impl IntoIterator<Item = &'a f64>, what: &str) -> Result<()> {
    if values.into_iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what.to_owned()))
    }
}

fn ensure_finite_complex<'a>(
    values: impl IntoIterator<Item = &'a Complex64>,
    what: &str,
) -> Result<()> {
    if values.into_iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what.to_owned()))
    }
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is ASCII"))
}

/// `index,eigenvalue` rows.
pub fn spectrum_csv(eigenvalues: &[f64]) -> Result<String> {
    ensure_finite(eigenvalues, "spectrum")?;
    let mut w = csv_writer();
    w.write_record(["index", "eigenvalue"])?;
    for (i, &x) in eigenvalues.iter().enumerate() {
        w.write_record([i.to_string(), format_f64(x)])?;
    }
    finish(w)
}

/// One row per matrix row; each column `j` becomes `c{j}_re,c{j}_im`.
pub fn complex_matrix_csv(m: MatRef<'_, Complex64>, label: &str) -> Result<String> {
    let mut w = csv_writer();
    let mut header = vec!["row".to_owned()];
    for j in 0..m.ncols() {
        header.push(format!("{label}{j}_re"));
        header.push(format!("{label}{j}_im"));
    }
    w.write_record(&header)?;
    for i in 0..m.nrows() {
        let mut row = vec![i.to_string()];
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::NonFinite(format!("{label} matrix entry ({i}, {j})")));
            }
            row.push(format_f64(z.re));
            row.push(format_f64(z.im));
        }
        w.write_record(&row)?;
    }
    finish(w)
}

/// Eigenvectors as columns `v{j}_re,v{j}_im`.
pub fn eigenvectors_csv(vectors: MatRef<'_, Complex64>) -> Result<String> {
    complex_matrix_csv(vectors, "v")
}

/// Header plus rows of already formatted fields.
pub fn table_csv<S: AsRef<str>>(header: &[&str], rows: &[Vec<S>]) -> Result<String> {
    let mut w = csv_writer();
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(AsRef::as_ref))?;
    }
    finish(w)
}

/// Pretty JSON with a trailing newline; refuses NaN and infinities, which
/// JSON cannot represent.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let tree = serde_json::to_value(value)?;
    if has_null_number(&tree) {
        return Err(Error::NonFinite("JSON document".into()));
    }
    let mut s = serde_json::to_string_pretty(&tree)?;
    s.push('\n');
    Ok(s)
}

// serde_json maps non-finite floats to null. Optional fields in this crate
// are skipped rather than serialized as null, so any null is a bad number.
fn has_null_number(v: &serde_json::Value) -> bool {
    match v {
        serde_json::Value::Null => true,
        serde_json::Value::Array(items) => items.iter().any(has_null_number),
        serde_json::Value::Object(map) => map.values().any(has_null_number),
        _ => false,
    }
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory followed by a rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

#[derive(Serialize)]
struct ManifestEntry<'a> {
    file: String,
    #[serde(flatten)]
    meta: &'a AtomMeta,
}

#[derive(Serialize)]
struct Manifest<'a> {
    name: &'a str,
    grid: (usize, usize),
    bands: &'a CubicBandUnion,
    atoms: Vec<ManifestEntry<'a>>,
}

/// Writes every atom as `{name}/atom_{k:05}.csv` (rows `m`, columns
/// `c{n}_re,c{n}_im`) and a `{name}/manifest.json` with the metadata in
/// dictionary order.
pub fn write_dictionary(dir: &Path, name: &str, d: &Dictionary) -> Result<()> {
    let sub = dir.join(name);
    fs::create_dir_all(&sub)?;
    let mut entries = Vec::with_capacity(d.len());
    for (k, atom) in d.atoms().iter().enumerate() {
        ensure_finite_complex(
            (0..atom.tensor.ncols()).flat_map(|j| atom.tensor.col(j).iter().collect::<Vec<_>>()),
            "dictionary atom",
        )?;
        ensure_finite([&atom.meta.eigenvalue], "atom eigenvalue")?;
        let file = format!("atom_{k:05}.csv");
        write_atomic(&sub.join(&file), &complex_matrix_csv(atom.tensor.as_ref(), "c")?)?;
        entries.push(ManifestEntry {
            file,
            meta: &atom.meta,
        });
    }
    let manifest = Manifest {
        name,
        grid: d.shape(),
        bands: d.bands(),
        atoms: entries,
    };
    write_atomic(&sub.join("manifest.json"), &to_json(&manifest)?)
}
