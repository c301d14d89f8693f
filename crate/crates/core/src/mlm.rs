//! Classical minimal learning machine for multi-label classification.
//!
//! Training fits `B` in `D_x · B ≈ D_y`, where `D_x` holds Euclidean distances
//! from the training inputs to a set of reference points and `D_y` the
//! distances between training labels. Prediction maps a query's reference
//! distances through `B` and returns the training label with the smallest
//! estimated output-space distance.

use std::fmt::Write as _;

use crate::bits::{hamming, BitString};
use crate::error::{Error, Result};
use crate::fmt::format_sig;
use crate::linalg::{solve_linear_map_real, RealMatrix};
use crate::select::argmin;

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    inputs: Vec<Vec<f64>>,
    labels: Vec<BitString>,
}

impl LabeledDataset {
    pub fn new(inputs: Vec<Vec<f64>>, labels: Vec<BitString>) -> Result<Self> {
        if inputs.is_empty() {
            return Err(Error::TooSmall { needed: 1, got: 0 });
        }
        if inputs.len() != labels.len() {
            return Err(Error::CountMismatch {
                inputs: inputs.len(),
                outputs: labels.len(),
            });
        }
        let m = inputs[0].len();
        if let Some(bad) = inputs.iter().find(|x| x.len() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: bad.len(),
            });
        }
        if inputs.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("non-finite input feature".into()));
        }
        let l = labels[0].len();
        if let Some(bad) = labels.iter().find(|y| y.len() != l) {
            return Err(Error::LengthMismatch {
                left: l,
                right: bad.len(),
            });
        }
        Ok(Self { inputs, labels })
    }

    /// Like [`LabeledDataset::new`], additionally requiring at least one
    /// instance with more than one active label.
    pub fn new_multi_label(inputs: Vec<Vec<f64>>, labels: Vec<BitString>) -> Result<Self> {
        let data = Self::new(inputs, labels)?;
        if !data.labels.iter().any(|y| y.count_ones() > 1) {
            return Err(Error::Invalid(
                "multi-label dataset needs an instance with more than one label".into(),
            ));
        }
        Ok(data)
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn input_dim(&self) -> usize {
        self.inputs[0].len()
    }

    pub fn label_len(&self) -> usize {
        self.labels[0].len()
    }

    pub fn inputs(&self) -> &[Vec<f64>] {
        &self.inputs
    }

    pub fn labels(&self) -> &[BitString] {
        &self.labels
    }

    /// CSV with header `x_1..x_M,y_1..y_L`.
    pub fn to_csv(&self) -> String {
        let mut header: Vec<String> = (1..=self.input_dim()).map(|k| format!("x_{k}")).collect();
        header.extend((1..=self.label_len()).map(|k| format!("y_{k}")));
        let mut out = header.join(",");
        out.push('\n');
        for (x, y) in self.inputs.iter().zip(&self.labels) {
            let mut fields: Vec<String> = x.iter().map(|&v| format_sig(v, 17)).collect();
            fields.extend(
                y.bits()
                    .iter()
                    .map(|&b| if b { "1" } else { "0" }.to_string()),
            );
            let _ = writeln!(out, "{}", fields.join(","));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty dataset file".into()))?;
        let names: Vec<&str> = header.split(',').map(str::trim).collect();
        let m = names.iter().take_while(|n| n.starts_with("x_")).count();
        let l = names.len() - m;
        let expected: Vec<String> = (1..=m)
            .map(|k| format!("x_{k}"))
            .chain((1..=l).map(|k| format!("y_{k}")))
            .collect();
        if m == 0 || l == 0 || names != expected {
            return Err(Error::Parse(format!(
                "dataset header must be x_1..x_M,y_1..y_L, got `{header}`"
            )));
        }
        let mut inputs = Vec::new();
        let mut labels = Vec::new();
        for (row, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != m + l {
                return Err(Error::Parse(format!(
                    "row {}: expected {} fields, got {}",
                    row + 1,
                    m + l,
                    fields.len()
                )));
            }
            let x = fields[..m]
                .iter()
                .map(|f| {
                    f.parse::<f64>()
                        .map_err(|_| Error::Parse(format!("row {}: bad number `{f}`", row + 1)))
                })
                .collect::<Result<Vec<_>>>()?;
            let y = fields[m..]
                .iter()
                .map(|f| match *f {
                    "0" => Ok(false),
                    "1" => Ok(true),
                    _ => Err(Error::Parse(format!("row {}: label bit `{f}`", row + 1))),
                })
                .collect::<Result<Vec<_>>>()?;
            inputs.push(x);
            labels.push(BitString::new(y));
        }
        Self::new(inputs, labels)
    }
}

/// Euclidean distances: entry `(i, j)` is `‖points[i] − refs[j]‖₂`.
pub fn distance_matrix(points: &[Vec<f64>], refs: &[Vec<f64>]) -> Result<RealMatrix> {
    let dim = points.first().or(refs.first()).map_or(0, Vec::len);
    for v in points.iter().chain(refs) {
        if v.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: v.len(),
            });
        }
    }
    Ok(RealMatrix::from_fn(points.len(), refs.len(), |i, j| {
        euclidean(&points[i], &refs[j])
    }))
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Output-space distances `‖y_i − y_j‖₂ = √d_H(y_i, y_j)` between labels.
pub fn label_distance_matrix(labels: &[BitString]) -> Result<RealMatrix> {
    let n = labels.len();
    let mut m = RealMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let d = (hamming(&labels[i], &labels[j])? as f64).sqrt();
            m[(i, j)] = d;
            m[(j, i)] = d;
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlmModel {
    references: Vec<Vec<f64>>,
    train_labels: Vec<BitString>,
    /// `K × N` map from reference distances to label distances.
    b: RealMatrix,
}

impl MlmModel {
    pub fn references(&self) -> &[Vec<f64>] {
        &self.references
    }

    pub fn train_labels(&self) -> &[BitString] {
        &self.train_labels
    }

    pub fn coefficients(&self) -> &RealMatrix {
        &self.b
    }

    /// Three CSV blocks, each introduced by a `# name rows cols` line:
    /// `references`, `labels` (one bit string per line) and `b`.
    pub fn to_csv_blocks(&self) -> String {
        let mut out = String::new();
        let k = self.references.len();
        let m = self.references.first().map_or(0, Vec::len);
        let _ = writeln!(out, "# references {k} {m}");
        for r in &self.references {
            let row: Vec<String> = r.iter().map(|&v| format_sig(v, 17)).collect();
            let _ = writeln!(out, "{}", row.join(","));
        }
        let _ = writeln!(out, "# labels {} 1", self.train_labels.len());
        for y in &self.train_labels {
            let _ = writeln!(out, "{y}");
        }
        let _ = writeln!(out, "# b {} {}", self.b.rows(), self.b.cols());
        for i in 0..self.b.rows() {
            let row: Vec<String> = self.b.row(i).iter().map(|&v| format_sig(v, 17)).collect();
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}

/// Fits the coefficient map. `refs = None` uses every training input as a
/// reference point (`K = N`), which makes training deterministic.
pub fn train_mlm(
    data: &LabeledDataset,
    refs: Option<&[Vec<f64>]>,
    rcond: Option<f64>,
) -> Result<MlmModel> {
    let references = refs.unwrap_or(data.inputs()).to_vec();
    if references.is_empty() {
        return Err(Error::TooSmall { needed: 1, got: 0 });
    }
    let dx = distance_matrix(data.inputs(), &references)?;
    let dy = label_distance_matrix(data.labels())?;
    let b = solve_linear_map_real(&dx, &dy, rcond)?;
    Ok(MlmModel {
        references,
        train_labels: data.labels().to_vec(),
        b,
    })
}

/// Estimated output-space distances from `x` to every training label.
pub fn estimated_distances(model: &MlmModel, x: &[f64]) -> Result<Vec<f64>> {
    let d = distance_matrix(&[x.to_vec()], &model.references)?;
    Ok(model.b.left_apply(d.row(0))?)
}

/// Index and label of the training instance with the smallest estimated
/// output distance (ties go to the lowest index).
pub fn predict_mlm(model: &MlmModel, x: &[f64]) -> Result<(usize, BitString)> {
    let distances = estimated_distances(model, x)?;
    let idx = argmin(&distances).expect("model has at least one training label");
    Ok((idx, model.train_labels[idx].clone()))
}
