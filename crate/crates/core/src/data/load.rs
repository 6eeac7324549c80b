use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::LabeledDataset;
use crate::numerics::Matrix;
use crate::{Error, Result};

/// On-disk layout of a feature file.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FileFormat {
    /// `label,f1,f2,…`; whitespace-separated rows are accepted too.
    Csv,
    /// `label idx:val …`, 1-based indices, missing entries are zero.
    /// `dim` fixes the feature count; otherwise the largest index is used.
    Sparse { dim: Option<usize> },
}

impl FromStr for FileFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" | "dense" => Ok(FileFormat::Csv),
            "sparse" | "libsvm" | "svmlight" => Ok(FileFormat::Sparse { dim: None }),
            other => Err(Error::InvalidConfig(format!("unknown file format `{other}`"))),
        }
    }
}

/// Whether `[−1, 1]` sources are mapped onto `[0, 1]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Rescale {
    #[default]
    Auto,
    None,
}

impl FromStr for Rescale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "auto" => Ok(Rescale::Auto),
            "none" | "off" => Ok(Rescale::None),
            other => Err(Error::InvalidConfig(format!("unknown rescale mode `{other}`"))),
        }
    }
}

/// Affine map `x ↦ scale·x + offset` applied to every feature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RescaleApplied {
    pub scale: f64,
    pub offset: f64,
    pub source_min: f64,
    pub source_max: f64,
}

struct RawRows {
    path: PathBuf,
    labels: Vec<i64>,
    rows: Vec<Vec<f64>>,
}

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse { path: path.to_path_buf(), line, message: message.into() }
}

/// Integer label; `6.0000`-style spellings are accepted.
fn parse_label(path: &Path, line: usize, field: &str) -> Result<i64> {
    if let Ok(v) = field.parse::<i64>() {
        return Ok(v);
    }
    match field.parse::<f64>() {
        Ok(v) if v.is_finite() && v.fract() == 0.0 && v.abs() < 1e15 => Ok(v as i64),
        _ => Err(parse_error(path, line, format!("label `{field}` is not an integer"))),
    }
}

fn parse_value(path: &Path, line: usize, field: &str) -> Result<f64> {
    match field.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(_) => Err(parse_error(path, line, format!("non-finite feature `{field}`"))),
        Err(_) => Err(parse_error(path, line, format!("feature `{field}` is not a number"))),
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

/// Lines that carry data, with 1-based line numbers.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn read_dense(path: &Path) -> Result<RawRows> {
    let text = read_text(path)?;
    let mut labels = Vec::new();
    let mut rows = Vec::new();
    let mut dim = None;
    for (line_no, line) in data_lines(&text) {
        let fields: Vec<&str> = if line.contains(',') {
            line.split(',').map(str::trim).collect()
        } else {
            line.split_whitespace().collect()
        };
        let (label, features) = fields.split_first().expect("non-empty line");
        let label = parse_label(path, line_no, label)?;
        let row = features.iter().map(|f| parse_value(path, line_no, f)).collect::<Result<Vec<_>>>()?;
        match dim {
            None if row.is_empty() => return Err(parse_error(path, line_no, "row has no features")),
            None => dim = Some(row.len()),
            Some(d) if d != row.len() => {
                return Err(Error::InconsistentDimension {
                    path: path.to_path_buf(),
                    line: line_no,
                    expected: d,
                    actual: row.len(),
                })
            }
            Some(_) => {}
        }
        labels.push(label);
        rows.push(row);
    }
    Ok(RawRows { path: path.to_path_buf(), labels, rows })
}

/// Rows are returned at their own width; padding happens once the joint
/// dimension is known.
fn read_sparse(path: &Path, dim: Option<usize>) -> Result<RawRows> {
    let text = read_text(path)?;
    let mut labels = Vec::new();
    let mut rows = Vec::new();
    for (line_no, line) in data_lines(&text) {
        let mut fields = line.split_whitespace();
        let label = parse_label(path, line_no, fields.next().expect("non-empty line"))?;
        let mut row = Vec::new();
        let mut last = 0usize;
        for field in fields {
            let (idx, val) = field
                .split_once(':')
                .ok_or_else(|| parse_error(path, line_no, format!("expected idx:val, got `{field}`")))?;
            let idx: usize = idx
                .parse()
                .map_err(|_| parse_error(path, line_no, format!("bad feature index `{idx}`")))?;
            if idx == 0 {
                return Err(parse_error(path, line_no, "feature indices are 1-based"));
            }
            if idx <= last {
                return Err(parse_error(path, line_no, "feature indices must be strictly increasing"));
            }
            if let Some(d) = dim {
                if idx > d {
                    return Err(Error::InconsistentDimension {
                        path: path.to_path_buf(),
                        line: line_no,
                        expected: d,
                        actual: idx,
                    });
                }
            }
            last = idx;
            row.resize(idx, 0.0);
            row[idx - 1] = parse_value(path, line_no, val)?;
        }
        labels.push(label);
        rows.push(row);
    }
    Ok(RawRows { path: path.to_path_buf(), labels, rows })
}

fn read_rows(path: &Path, format: FileFormat) -> Result<RawRows> {
    match format {
        FileFormat::Csv => read_dense(path),
        FileFormat::Sparse { dim } => read_sparse(path, dim),
    }
}

fn sparse_width(sets: &[&RawRows], format: FileFormat) -> Option<usize> {
    match format {
        FileFormat::Csv => None,
        FileFormat::Sparse { dim: Some(d) } => Some(d),
        FileFormat::Sparse { dim: None } => {
            Some(sets.iter().flat_map(|s| s.rows.iter().map(Vec::len)).max().unwrap_or(0).max(1))
        }
    }
}

fn assemble(raw: RawRows, width: Option<usize>, names: &[i64], complete: bool) -> Result<LabeledDataset> {
    if raw.rows.is_empty() {
        return Err(Error::EmptyClass(format!("{} contains no samples", raw.path.display())));
    }
    let d = width.unwrap_or(raw.rows[0].len());
    let mut data = Vec::with_capacity(d * raw.rows.len());
    for mut row in raw.rows {
        row.resize(d, 0.0);
        data.extend(row);
    }
    let lookup: BTreeMap<i64, usize> = names.iter().enumerate().map(|(i, &n)| (n, i)).collect();
    let labels: Vec<usize> = raw.labels.iter().map(|l| lookup[l]).collect();
    let m = labels.len();
    let features = Matrix::from_col_major(d, m, data)?;
    if complete {
        LabeledDataset::new(features, labels, names.to_vec())
    } else {
        LabeledDataset::with_label_map(features, labels, names.to_vec())
    }
}

fn label_names<'a>(sets: impl IntoIterator<Item = &'a RawRows>) -> Vec<i64> {
    let mut names: Vec<i64> = sets.into_iter().flat_map(|s| s.labels.iter().copied()).collect();
    names.sort_unstable();
    names.dedup();
    names
}

/// Loads one feature file; labels are remapped to dense ids in ascending
/// order of the original values.
pub fn load_csv(path: impl AsRef<Path>, format: FileFormat) -> Result<LabeledDataset> {
    let raw = read_rows(path.as_ref(), format)?;
    let width = sparse_width(&[&raw], format);
    let names = label_names([&raw]);
    assemble(raw, width, &names, true)
}

/// Loads a train/test pair under one label map and one feature width.
///
/// Every test label must also occur in the training file; the test side
/// may miss classes.
pub fn load_train_test(
    train: impl AsRef<Path>,
    test: impl AsRef<Path>,
    format: FileFormat,
) -> Result<(LabeledDataset, LabeledDataset)> {
    let train = read_rows(train.as_ref(), format)?;
    let test = read_rows(test.as_ref(), format)?;
    if let (Some(a), Some(b)) = (train.rows.first(), test.rows.first()) {
        if format == FileFormat::Csv && a.len() != b.len() {
            return Err(Error::InconsistentDimension { path: test.path.clone(), line: 1, expected: a.len(), actual: b.len() });
        }
    }
    let width = sparse_width(&[&train, &test], format);
    let names = label_names([&train, &test]);
    let train_names = label_names([&train]);
    if let Some(missing) = names.iter().find(|n| train_names.binary_search(n).is_err()) {
        return Err(Error::EmptyClass(format!("{missing} (absent from {})", train.path.display())));
    }
    Ok((assemble(train, width, &names, true)?, assemble(test, width, &names, false)?))
}

/// Maps features onto `[0, 1]` when `Auto` is requested and every value
/// lies in `[−1, 1]` with at least one negative entry. The same map is
/// applied to all `sets` so train and test stay comparable.
pub fn rescale_unit_range(sets: &mut [&mut LabeledDataset], mode: Rescale) -> Result<Option<RescaleApplied>> {
    if mode == Rescale::None {
        return Ok(None);
    }
    let (lo, hi) = sets
        .iter()
        .flat_map(|s| s.features().as_slice().iter().copied())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !(lo < 0.0 && lo >= -1.0 && hi <= 1.0) {
        return Ok(None);
    }
    for s in sets.iter_mut() {
        s.map_features(|v| 0.5 * v + 0.5)?;
    }
    Ok(Some(RescaleApplied { scale: 0.5, offset: 0.5, source_min: lo, source_max: hi }))
}
