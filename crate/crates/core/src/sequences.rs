//! Sequences, windows, datasets and per-sequence normalization.
//!
//! Offsets are 0-based and slices are half-open: `slice(s, i, j)` returns
//! `s[i]..s[j-1]`.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Sequence {
    pub id: usize,
    pub label: Option<String>,
    values: Vec<f64>,
}

impl Sequence {
    /// Builds a sequence, rejecting empty input and non-finite samples.
    pub fn new(id: usize, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSequence(format!("sequence {id} is empty")));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSequence(format!(
                "sequence {id} has non-finite value at offset {pos}"
            )));
        }
        Ok(Self {
            id,
            label: None,
            values,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `S[start : start + len]`, or `OutOfBounds`.
    pub fn window_values(&self, start: usize, len: usize) -> Result<&[f64]> {
        slice(&self.values, start, start + len)
    }
}

/// A view into one sequence: `(sequence id, start offset, length)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Window {
    pub sequence_id: usize,
    pub start: usize,
    pub length: usize,
}

impl Window {
    pub fn end(&self) -> usize {
        self.start + self.length
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataFormat {
    UcrWhitespace,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    sequences: Vec<Sequence>,
    pub source: String,
}

impl Dataset {
    /// Re-numbers the sequences densely from 0 in the given order.
    pub fn from_sequences(sequences: Vec<Sequence>) -> Result<Self> {
        if sequences.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let sequences = sequences
            .into_iter()
            .enumerate()
            .map(|(id, mut s)| {
                s.id = id;
                s
            })
            .collect();
        Ok(Self {
            sequences,
            source: "inline".to_string(),
        })
    }

    pub fn from_values(rows: Vec<Vec<f64>>) -> Result<Self> {
        let seqs = rows
            .into_iter()
            .enumerate()
            .map(|(id, v)| Sequence::new(id, v))
            .collect::<Result<Vec<_>>>()?;
        Self::from_sequences(seqs)
    }

    pub fn sequences(&self) -> &[Sequence] {
        &self.sequences
    }

    pub fn get(&self, id: usize) -> Option<&Sequence> {
        self.sequences.get(id)
    }

    pub fn len(&self) -> usize {
        self.sequences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }

    pub fn max_len(&self) -> usize {
        self.sequences.iter().map(Sequence::len).max().unwrap_or(0)
    }

    /// Values of a window, or `OutOfBounds` when the window does not exist.
    pub fn window_values(&self, w: &Window) -> Result<&[f64]> {
        let seq = self.get(w.sequence_id).ok_or(Error::OutOfBounds {
            start: w.sequence_id,
            end: w.sequence_id + 1,
            len: self.len(),
        })?;
        seq.window_values(w.start, w.length)
    }
}

/// Loads a dataset with one sequence per non-empty, non-comment line.
///
/// When `labeled` is set the first token of every line is kept as the label
/// instead of being parsed as a sample.
pub fn load_dataset(path: impl AsRef<Path>, format: DataFormat, labeled: bool) -> Result<Dataset> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(Error::FileNotFound(path.to_path_buf()));
    }
    let text = fs::read_to_string(path)?;
    let mut ds = parse_dataset(&text, format, labeled)?;
    ds.source = path.display().to_string();
    Ok(ds)
}

pub fn parse_dataset(text: &str, format: DataFormat, labeled: bool) -> Result<Dataset> {
    let mut sequences = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = match format {
            DataFormat::UcrWhitespace => trimmed.split_whitespace().collect(),
            DataFormat::Csv => trimmed.split(',').map(str::trim).collect(),
        };
        let (label, samples) = if labeled {
            (Some(tokens[0].to_string()), &tokens[1..])
        } else {
            (None, &tokens[..])
        };
        if samples.is_empty() {
            return Err(Error::Parse {
                line: line_no,
                column: tokens.len() + 1,
                message: "expected at least one numeric value".into(),
            });
        }
        let first_col = usize::from(labeled) + 1;
        let mut values = Vec::with_capacity(samples.len());
        for (k, tok) in samples.iter().enumerate() {
            let v: f64 = tok.parse().map_err(|_| Error::Parse {
                line: line_no,
                column: first_col + k,
                message: format!("malformed number {tok:?}"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line: line_no,
                    column: first_col + k,
                    message: format!("non-finite value {tok:?}"),
                });
            }
            values.push(v);
        }
        let mut seq = Sequence::new(sequences.len(), values)?;
        seq.label = label;
        sequences.push(seq);
    }
    Dataset::from_sequences(sequences)
}

/// `values[start..end]` with explicit bounds checking (`start < end <= len`).
pub fn slice(values: &[f64], start: usize, end: usize) -> Result<&[f64]> {
    if start >= end || end > values.len() {
        return Err(Error::OutOfBounds {
            start,
            end,
            len: values.len(),
        });
    }
    Ok(&values[start..end])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    ZScore,
    MinMax,
}

/// Normalizes a non-empty series. Constant input maps to all zeros.
pub fn normalize(values: &[f64], method: Normalization) -> Vec<f64> {
    match method {
        Normalization::ZScore => zscore(values),
        Normalization::MinMax => minmax(values),
    }
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Population standard deviation.
pub fn pop_std(values: &[f64]) -> f64 {
    let m = mean(values);
    (values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64).sqrt()
}

fn zscore(values: &[f64]) -> Vec<f64> {
    let m = mean(values);
    let sd = pop_std(values);
    if sd == 0.0 || !sd.is_finite() {
        return vec![0.0; values.len()];
    }
    values.iter().map(|v| (v - m) / sd).collect()
}

fn minmax(values: &[f64]) -> Vec<f64> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi <= lo {
        return vec![0.0; values.len()];
    }
    values.iter().map(|v| (v - lo) / (hi - lo)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_labeled_ucr_lines() {
        let ds =
            parse_dataset("1 0.5 0.7 0.9\n2 1.0 1.1", DataFormat::UcrWhitespace, true).unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.sequences()[0].len(), 3);
        assert_eq!(ds.sequences()[1].len(), 2);
        assert_eq!(ds.sequences()[1].label.as_deref(), Some("2"));
        assert_eq!(ds.sequences()[1].id, 1);
    }

    #[test]
    fn malformed_token_reports_line_and_column() {
        let err = parse_dataset("1 0.5 abc", DataFormat::UcrWhitespace, true).unwrap_err();
        assert!(
            matches!(
                err,
                Error::Parse {
                    line: 1,
                    column: 3,
                    ..
                }
            ),
            "{err:?}"
        );
    }

    #[test]
    fn empty_input_is_empty_dataset() {
        assert_eq!(
            parse_dataset("", DataFormat::UcrWhitespace, false).unwrap_err(),
            Error::EmptyDataset
        );
        assert_eq!(
            parse_dataset("# only a comment\n\n", DataFormat::Csv, false).unwrap_err(),
            Error::EmptyDataset
        );
    }

    #[test]
    fn csv_with_comments() {
        let ds = parse_dataset("# header\n1.0, 2.0,3\n\n4,5\n", DataFormat::Csv, false).unwrap();
        assert_eq!(ds.sequences()[0].values(), &[1.0, 2.0, 3.0]);
        assert_eq!(ds.sequences()[1].values(), &[4.0, 5.0]);
    }

    #[test]
    fn missing_file() {
        let err = load_dataset("/nonexistent/x.txt", DataFormat::Csv, false).unwrap_err();
        assert!(matches!(err, Error::FileNotFound(_)));
    }

    #[test]
    fn label_without_values_is_rejected() {
        let err = parse_dataset("7\n", DataFormat::UcrWhitespace, true).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn slice_examples() {
        assert_eq!(slice(&[1.0, 2.0, 3.0, 4.0], 1, 3).unwrap(), &[2.0, 3.0]);
        assert_eq!(slice(&[7.0], 0, 1).unwrap(), &[7.0]);
        assert!(matches!(
            slice(&[1.0, 2.0], 1, 4),
            Err(Error::OutOfBounds { .. })
        ));
        assert!(slice(&[1.0, 2.0], 1, 1).is_err());
    }

    #[test]
    fn sequence_rejects_nan() {
        assert!(Sequence::new(0, vec![1.0, f64::NAN]).is_err());
        assert!(Sequence::new(0, vec![]).is_err());
    }

    #[test]
    fn zscore_hand_values() {
        let z = normalize(&[2.0, 4.0, 6.0], Normalization::ZScore);
        // mean 4, population std sqrt(8/3)
        let sd = (8.0f64 / 3.0).sqrt();
        let expected = [-2.0 / sd, 0.0, 2.0 / sd];
        for (a, b) in z.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((z[0] + 1.2247).abs() < 1e-4);
        assert_eq!(
            normalize(&[5.0, 5.0, 5.0], Normalization::ZScore),
            vec![0.0; 3]
        );
    }

    #[test]
    fn minmax_endpoints() {
        assert_eq!(
            normalize(&[1.0, 3.0], Normalization::MinMax),
            vec![0.0, 1.0]
        );
        assert_eq!(
            normalize(&[2.0, 2.0], Normalization::MinMax),
            vec![0.0, 0.0]
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn whole_slice_is_identity(v in prop::collection::vec(-1e3f64..1e3, 1..64)) {
                prop_assert_eq!(slice(&v, 0, v.len()).unwrap(), &v[..]);
            }

            #[test]
            fn zscore_moments_and_idempotence(v in prop::collection::vec(-1e3f64..1e3, 2..64)) {
                prop_assume!(pop_std(&v) > 1e-6);
                let z = normalize(&v, Normalization::ZScore);
                prop_assert!(mean(&z).abs() < 1e-9);
                prop_assert!((pop_std(&z) - 1.0).abs() < 1e-9);
                let zz = normalize(&z, Normalization::ZScore);
                for (a, b) in z.iter().zip(&zz) {
                    prop_assert!((a - b).abs() < 1e-9);
                }
            }
        }
    }
}
