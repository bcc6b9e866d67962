//! File formats, seeded synthetic data, and evaluation metrics.
//!
//! Matrices are comma-separated decimal rows with an optional header row
//! (detected when the first row does not parse as numbers). Label and
//! vector files hold one decimal per line. Solution files list only the
//! nonzero entries as `index,value`. Floats are written with 17
//! significant digits so that reading them back is exact.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{OglError, Result};
use crate::group_model::{parse_groups, GroupStructure};
use crate::linalg::DenseMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub a: DenseMatrix,
    pub b: Vec<f64>,
    pub feature_names: Option<Vec<String>>,
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| OglError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| OglError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Formats a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// A parsed CSV matrix and the header row, if one was present.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvMatrix {
    pub matrix: DenseMatrix,
    pub header: Option<Vec<String>>,
}

/// Parses CSV text into a matrix; a non-numeric first row is taken as a header.
pub fn parse_matrix_csv(text: &str) -> Result<CsvMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut header = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (k, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| OglError::Parse {
            path: None,
            line: e.position().map_or(k + 1, |p| p.line() as usize),
            column: None,
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(k + 1, |p| p.line() as usize);
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let parsed: Vec<std::result::Result<f64, usize>> = rec
            .iter()
            .enumerate()
            .map(|(c, f)| f.parse::<f64>().map_err(|_| c + 1))
            .collect();
        if rows.is_empty() && header.is_none() && parsed.iter().any(|r| r.is_err()) {
            header = Some(rec.iter().map(str::to_string).collect::<Vec<_>>());
            width = Some(rec.len());
            continue;
        }
        let expected = *width.get_or_insert(rec.len());
        if rec.len() != expected {
            return Err(OglError::RaggedRows {
                path: None,
                line,
                expected,
                got: rec.len(),
            });
        }
        let mut row = Vec::with_capacity(rec.len());
        for (c, r) in parsed.into_iter().enumerate() {
            match r {
                Ok(v) if v.is_finite() => row.push(v),
                _ => {
                    return Err(OglError::Parse {
                        path: None,
                        line,
                        column: Some(c + 1),
                        message: format!("invalid number {:?}", &rec[c]),
                    })
                }
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(OglError::EmptyFile { path: None });
    }
    Ok(CsvMatrix {
        matrix: DenseMatrix::from_rows(&rows)?,
        header,
    })
}

pub fn load_matrix_csv(path: &Path) -> Result<DenseMatrix> {
    Ok(load_matrix_csv_with_header(path)?.matrix)
}

pub fn load_matrix_csv_with_header(path: &Path) -> Result<CsvMatrix> {
    parse_matrix_csv(&read_text(path)?).map_err(|e| e.with_path(path))
}

pub fn format_matrix_csv(m: &DenseMatrix) -> String {
    let mut out = String::with_capacity(m.rows() * m.cols() * 24);
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|&v| fmt_f64(v)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn write_matrix_csv(path: &Path, m: &DenseMatrix) -> Result<()> {
    write_text(path, &format_matrix_csv(m))
}

/// One decimal per non-empty line.
pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        match t.parse::<f64>() {
            Ok(v) if v.is_finite() => out.push(v),
            _ => {
                return Err(OglError::Parse {
                    path: None,
                    line: k + 1,
                    column: None,
                    message: format!("invalid number {t:?}"),
                })
            }
        }
    }
    if out.is_empty() {
        return Err(OglError::EmptyFile { path: None });
    }
    Ok(out)
}

pub fn load_vector(path: &Path) -> Result<Vec<f64>> {
    parse_vector(&read_text(path)?).map_err(|e| e.with_path(path))
}

pub fn format_vector(v: &[f64]) -> String {
    let mut out = String::with_capacity(v.len() * 24);
    for &x in v {
        out.push_str(&fmt_f64(x));
        out.push('\n');
    }
    out
}

pub fn write_vector(path: &Path, v: &[f64]) -> Result<()> {
    write_text(path, &format_vector(v))
}

/// Loads a dense vector stored either one value per line or as a CSV with a
/// single row or column.
pub fn load_dense_vector(path: &Path) -> Result<Vec<f64>> {
    let text = read_text(path)?;
    if !text.contains(',') {
        return parse_vector(&text).map_err(|e| e.with_path(path));
    }
    let m = parse_matrix_csv(&text)
        .map_err(|e| e.with_path(path))?
        .matrix;
    if m.rows() == 1 || m.cols() == 1 {
        Ok(m.data().to_vec())
    } else {
        Err(OglError::InvalidParameter(format!(
            "{}: expected a single row or column, got {}×{}",
            path.display(),
            m.rows(),
            m.cols()
        )))
    }
}

/// Nonzero entries as `index,value` lines under an `index,value` header.
pub fn format_sparse_solution(x: &[f64]) -> String {
    let mut out = String::from("index,value\n");
    for (j, &v) in x.iter().enumerate() {
        if v != 0.0 {
            out.push_str(&format!("{j},{}\n", fmt_f64(v)));
        }
    }
    out
}

pub fn write_sparse_solution(path: &Path, x: &[f64]) -> Result<()> {
    write_text(path, &format_sparse_solution(x))
}

pub fn parse_sparse_solution(text: &str, p: usize) -> Result<Vec<f64>> {
    let mut x = vec![0.0; p];
    for (k, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || (k == 0 && t.starts_with("index")) {
            continue;
        }
        let err = |message: String| OglError::Parse {
            path: None,
            line: k + 1,
            column: None,
            message,
        };
        let (i, v) = t
            .split_once(',')
            .ok_or_else(|| err(format!("expected index,value, got {t:?}")))?;
        let i: usize = i
            .trim()
            .parse()
            .map_err(|_| err(format!("invalid index {i:?}")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| err(format!("invalid value {v:?}")))?;
        if i >= p {
            return Err(err(format!("index {i} out of range for p = {p}")));
        }
        x[i] = v;
    }
    Ok(x)
}

pub fn load_sparse_solution(path: &Path, p: usize) -> Result<Vec<f64>> {
    parse_sparse_solution(&read_text(path)?, p).map_err(|e| e.with_path(path))
}

/// Reads a group file; `auto` weights resolve to `√|G_i|`.
pub fn load_groups(path: &Path, p: usize) -> Result<GroupStructure> {
    parse_groups(&read_text(path)?, p).map_err(|e| e.with_path(path))
}

pub fn write_groups(path: &Path, gs: &GroupStructure) -> Result<()> {
    write_text(path, &crate::group_model::format_groups(gs))
}

/// Parameters for [`synth_overlap_dataset`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub p: usize,
    pub n: usize,
    pub g: usize,
    pub group_size: usize,
    /// Indices shared by consecutive groups in the chain.
    pub overlap: usize,
    pub active_groups: usize,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl SynthSpec {
    /// Number of features touched by the chain of groups.
    pub fn chain_span(&self) -> usize {
        if self.g == 0 {
            0
        } else {
            (self.g - 1) * (self.group_size - self.overlap) + self.group_size
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(OglError::SpecInfeasible(m));
        if self.p == 0 || self.n == 0 || self.g == 0 || self.group_size == 0 {
            return fail("p, n, g and group_size must be positive".into());
        }
        if self.overlap >= self.group_size {
            return fail(format!(
                "overlap {} must be smaller than group_size {}",
                self.overlap, self.group_size
            ));
        }
        if self.active_groups > self.g {
            return fail(format!(
                "active_groups {} exceeds g {}",
                self.active_groups, self.g
            ));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return fail(format!("noise_sigma {} must be >= 0", self.noise_sigma));
        }
        if self.chain_span() > self.p {
            return fail(format!(
                "chain of {} groups of size {} with overlap {} spans {} features > p = {}",
                self.g,
                self.group_size,
                self.overlap,
                self.chain_span(),
                self.p
            ));
        }
        Ok(())
    }
}

/// Stream ids of the generator, one per artifact.
const STREAM_DESIGN: u64 = 0;
const STREAM_TRUTH: u64 = 1;
const STREAM_NOISE: u64 = 2;

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Chain of groups `{k·step, …, k·step + size − 1}` with `step = size − overlap`.
pub fn chain_groups(g: usize, group_size: usize, overlap: usize) -> Vec<Vec<usize>> {
    let step = group_size - overlap;
    (0..g)
        .map(|k| (k * step..k * step + group_size).collect())
        .collect()
}

/// Seeded synthetic regression data with a chain of overlapping groups.
///
/// Uses ChaCha8 with separate streams for the design matrix, the true
/// coefficients and the noise. `x_true` is nonzero exactly on the union of
/// `active_groups` randomly chosen groups, with values `±U[1, 2)`.
pub fn synth_overlap_dataset(spec: &SynthSpec) -> Result<(Dataset, GroupStructure, Vec<f64>)> {
    spec.validate()?;
    let groups = chain_groups(spec.g, spec.group_size, spec.overlap);

    let mut rng = stream(spec.seed, STREAM_TRUTH);
    let mut order: Vec<usize> = (0..spec.g).collect();
    for i in 0..spec.active_groups {
        let j = rng.random_range(i..spec.g);
        order.swap(i, j);
    }
    let mut active = order[..spec.active_groups].to_vec();
    active.sort_unstable();
    let mut x_true = vec![0.0; spec.p];
    for &gi in &active {
        for &j in &groups[gi] {
            if x_true[j] == 0.0 {
                let mag: f64 = rng.random_range(1.0..2.0);
                x_true[j] = if rng.random::<bool>() { mag } else { -mag };
            }
        }
    }

    let mut rng = stream(spec.seed, STREAM_DESIGN);
    let data: Vec<f64> = (0..spec.n * spec.p)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    let a = DenseMatrix::new(spec.n, spec.p, data)?;

    let mut b = a.mul_vec(&x_true);
    if spec.noise_sigma > 0.0 {
        let mut rng = stream(spec.seed, STREAM_NOISE);
        for bi in &mut b {
            *bi += spec.noise_sigma * rng.sample::<f64, _>(StandardNormal);
        }
    }
    let gs = GroupStructure::with_sqrt_weights(groups, spec.p)?;
    Ok((
        Dataset {
            a,
            b,
            feature_names: None,
        },
        gs,
        x_true,
    ))
}

fn check_pm1(v: &[f64], what: &str) -> Result<()> {
    if let Some((i, x)) = v
        .iter()
        .enumerate()
        .find(|(_, x)| **x != 1.0 && **x != -1.0)
    {
        return Err(OglError::InvalidParameter(format!(
            "{what}[{i}] = {x} is not ±1"
        )));
    }
    Ok(())
}

/// Thresholds real scores at zero: `≥ 0 → +1`, `< 0 → −1`.
pub fn sign_labels(scores: &[f64]) -> Vec<f64> {
    scores
        .iter()
        .map(|&s| if s >= 0.0 { 1.0 } else { -1.0 })
        .collect()
}

/// Mean of the per-class misclassification rates.
pub fn balanced_error_rate(predictions: &[f64], labels: &[f64]) -> Result<f64> {
    if predictions.len() != labels.len() {
        return Err(OglError::LengthMismatch {
            what: "predictions vs. labels",
            expected: labels.len(),
            got: predictions.len(),
        });
    }
    check_pm1(predictions, "predictions")?;
    check_pm1(labels, "labels")?;
    let (mut pos, mut neg, mut pos_err, mut neg_err) = (0usize, 0usize, 0usize, 0usize);
    for (&p, &l) in predictions.iter().zip(labels) {
        if l > 0.0 {
            pos += 1;
            pos_err += usize::from(p != l);
        } else {
            neg += 1;
            neg_err += usize::from(p != l);
        }
    }
    if pos == 0 || neg == 0 {
        return Err(OglError::SingleClassLabels);
    }
    Ok(0.5 * (pos_err as f64 / pos as f64 + neg_err as f64 / neg as f64))
}

/// F1 score of the support of `estimate` against the support of `truth`.
pub fn support_f1(estimate: &[f64], truth: &[f64]) -> f64 {
    let (mut tp, mut fp, mut fneg) = (0usize, 0usize, 0usize);
    for (&e, &t) in estimate.iter().zip(truth) {
        match (e != 0.0, t != 0.0) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fneg += 1,
            (false, false) => {}
        }
    }
    if tp == 0 {
        return 0.0;
    }
    2.0 * tp as f64 / (2 * tp + fp + fneg) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_examples() {
        let m = parse_matrix_csv("1,2\n3,4").unwrap();
        assert_eq!(
            m.matrix,
            DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap()
        );
        assert!(m.header.is_none());

        let m = parse_matrix_csv("a,b\n1,2").unwrap();
        assert_eq!((m.matrix.rows(), m.matrix.cols()), (1, 2));
        assert_eq!(m.header.unwrap(), vec!["a", "b"]);

        assert!(matches!(
            parse_matrix_csv("1,2\n3"),
            Err(OglError::RaggedRows {
                line: 2,
                expected: 2,
                got: 1,
                ..
            })
        ));
        assert!(matches!(
            parse_matrix_csv(""),
            Err(OglError::EmptyFile { .. })
        ));
        assert!(matches!(
            parse_matrix_csv("a,b\n"),
            Err(OglError::EmptyFile { .. })
        ));
        assert!(matches!(
            parse_matrix_csv("1,2\n3,x\n"),
            Err(OglError::Parse {
                line: 2,
                column: Some(2),
                ..
            })
        ));
        let crlf = parse_matrix_csv("1, 2\r\n3 ,4\r\n").unwrap();
        assert_eq!(crlf.matrix.data(), &[1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn vectors_and_solutions() {
        assert_eq!(
            parse_vector("1\n-1\r\n\n2.5\n").unwrap(),
            vec![1.0, -1.0, 2.5]
        );
        assert!(matches!(
            parse_vector("1\nfoo\n"),
            Err(OglError::Parse { line: 2, .. })
        ));
        let x = [0.0, 1.5, 0.0, -0.1];
        let text = format_sparse_solution(&x);
        assert_eq!(text.lines().count(), 3);
        assert_eq!(parse_sparse_solution(&text, 4).unwrap(), x.to_vec());
        assert!(parse_sparse_solution("index,value\n7,1.0\n", 4).is_err());
    }

    #[test]
    fn chain_layout() {
        let spec = SynthSpec {
            p: 10,
            n: 5,
            g: 4,
            group_size: 3,
            overlap: 1,
            active_groups: 2,
            noise_sigma: 0.0,
            seed: 7,
        };
        let (ds, gs, xt) = synth_overlap_dataset(&spec).unwrap();
        assert_eq!(
            gs.groups(),
            &[vec![0, 1, 2], vec![2, 3, 4], vec![4, 5, 6], vec![6, 7, 8]]
        );
        assert_eq!(ds.b, ds.a.mul_vec(&xt));
        let active = gs
            .groups()
            .iter()
            .filter(|g| g.iter().all(|&j| xt[j] != 0.0))
            .count();
        assert!(active >= 2);
        assert_eq!(xt[9], 0.0);
    }

    #[test]
    fn synth_is_deterministic_and_validated() {
        let spec = SynthSpec {
            p: 30,
            n: 12,
            g: 5,
            group_size: 6,
            overlap: 2,
            active_groups: 2,
            noise_sigma: 0.5,
            seed: 99,
        };
        let a = synth_overlap_dataset(&spec).unwrap();
        let b = synth_overlap_dataset(&spec).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.2, b.2);
        let other = synth_overlap_dataset(&SynthSpec {
            seed: 100,
            ..spec.clone()
        })
        .unwrap();
        assert_ne!(a.0.a, other.0.a);

        for bad in [
            SynthSpec {
                p: 10,
                ..spec.clone()
            },
            SynthSpec {
                overlap: 6,
                ..spec.clone()
            },
            SynthSpec {
                active_groups: 6,
                ..spec.clone()
            },
        ] {
            assert!(matches!(
                synth_overlap_dataset(&bad),
                Err(OglError::SpecInfeasible(_))
            ));
        }
    }

    #[test]
    fn ber_examples() {
        let labels = [1.0, 1.0, -1.0, -1.0];
        assert_eq!(
            balanced_error_rate(&[1.0, -1.0, -1.0, -1.0], &labels).unwrap(),
            0.25
        );
        assert_eq!(balanced_error_rate(&labels, &labels).unwrap(), 0.0);
        assert_eq!(balanced_error_rate(&[1.0; 4], &labels).unwrap(), 0.5);
        assert!(matches!(
            balanced_error_rate(&[1.0, 1.0], &[1.0, 1.0]),
            Err(OglError::SingleClassLabels)
        ));
        assert!(matches!(
            balanced_error_rate(&[1.0], &labels),
            Err(OglError::LengthMismatch { .. })
        ));
        assert!(balanced_error_rate(&[0.5, 1.0, 1.0, 1.0], &labels).is_err());
    }

    #[test]
    fn f1_counts() {
        assert_eq!(support_f1(&[1.0, 0.0, 2.0], &[1.0, 0.0, 3.0]), 1.0);
        assert_eq!(support_f1(&[0.0, 0.0], &[1.0, 0.0]), 0.0);
        assert!((support_f1(&[1.0, 1.0, 0.0], &[1.0, 0.0, 1.0]) - 0.5).abs() < 1e-15);
    }
}
