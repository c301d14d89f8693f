use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::fidelity::{fidelity_pure, fidelity_row, gram_mixed, gram_pure};
use crate::fmt::format_sig;
use crate::io::{
    csv_files, density_to_csv, read_state, real_matrix_from_csv, real_matrix_to_csv,
    statevector_to_csv, StateFile,
};
use crate::linalg::{default_rcond, solve_linear_map_real, RealMatrix};
use crate::quantum::{DensityMatrix, Statevector};
use crate::select::argmax;

use super::encoding::{decode_label, encode_label};

/// Trained quantum MLM.
///
/// `b` solves `D_X · b ≈ D_Y` in the least-squares sense, with `D_X` the
/// Uhlmann-fidelity Gram matrix of the training inputs and `D_Y` the Gram
/// matrix of the training outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct QmlmModel {
    train_inputs: Vec<DensityMatrix>,
    train_outputs: Vec<Statevector>,
    /// Bit strings behind `train_outputs` for the multi-label variant.
    labels: Option<Vec<BitString>>,
    b: RealMatrix,
    rcond: f64,
    seed: Option<u64>,
}

impl QmlmModel {
    pub fn len(&self) -> usize {
        self.train_inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.train_inputs.is_empty()
    }

    pub fn input_qubits(&self) -> usize {
        self.train_inputs[0].n_qubits()
    }

    pub fn train_inputs(&self) -> &[DensityMatrix] {
        &self.train_inputs
    }

    pub fn train_outputs(&self) -> &[Statevector] {
        &self.train_outputs
    }

    pub fn labels(&self) -> Option<&[BitString]> {
        self.labels.as_deref()
    }

    pub fn coefficients(&self) -> &RealMatrix {
        &self.b
    }

    pub fn rcond(&self) -> f64 {
        self.rcond
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Records the seed the training data was generated from (persisted in `meta`).
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

fn check_uniform<T>(items: &[T], dim: impl Fn(&T) -> usize) -> Result<()> {
    if let Some(first) = items.first() {
        let d = dim(first);
        if let Some(bad) = items.iter().find(|s| dim(s) != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: dim(bad),
            });
        }
    }
    Ok(())
}

/// Fits `b = pinv(D_X) · D_Y`. `rcond = None` uses the default relative
/// singular-value cutoff.
pub fn train_qmlm(
    inputs: &[DensityMatrix],
    outputs: &[Statevector],
    rcond: Option<f64>,
) -> Result<QmlmModel> {
    if inputs.len() != outputs.len() {
        return Err(Error::CountMismatch {
            inputs: inputs.len(),
            outputs: outputs.len(),
        });
    }
    if inputs.is_empty() {
        return Err(Error::TooSmall { needed: 1, got: 0 });
    }
    check_uniform(inputs, DensityMatrix::dim)?;
    check_uniform(outputs, Statevector::dim)?;
    let n = inputs.len();
    let rcond = rcond.unwrap_or_else(|| default_rcond(n, n));
    let dx = gram_mixed(inputs)?;
    let dy = gram_pure(outputs)?;
    let b = solve_linear_map_real(dx.as_matrix(), dy.as_matrix(), Some(rcond))?;
    Ok(QmlmModel {
        train_inputs: inputs.to_vec(),
        train_outputs: outputs.to_vec(),
        labels: None,
        b,
        rcond,
        seed: None,
    })
}

/// Multi-label variant: outputs are the label encodings of `labels`.
pub fn train_qmlm_labels(
    inputs: &[DensityMatrix],
    labels: &[BitString],
    rcond: Option<f64>,
) -> Result<QmlmModel> {
    let outputs = labels
        .iter()
        .map(encode_label)
        .collect::<Result<Vec<_>>>()?;
    let mut model = train_qmlm(inputs, &outputs, rcond)?;
    model.labels = Some(labels.to_vec());
    Ok(model)
}

/// Mapped similarities `s = f · b` for the fidelity row
/// `f[i] = F(test, input_i)`.
pub fn similarity_scores(model: &QmlmModel, test_input: &DensityMatrix) -> Result<Vec<f64>> {
    if test_input.dim() != model.train_inputs[0].dim() {
        return Err(Error::DimensionMismatch {
            expected: model.train_inputs[0].dim(),
            found: test_input.dim(),
        });
    }
    let f = fidelity_row(test_input, &model.train_inputs)?;
    Ok(model.b.left_apply(&f)?)
}

/// Index and copy of the stored output with the highest mapped similarity
/// (ties go to the lowest index).
pub fn predict_qmlm(model: &QmlmModel, test_input: &DensityMatrix) -> Result<(usize, Statevector)> {
    let scores = similarity_scores(model, test_input)?;
    let idx = argmax(&scores).expect("model has at least one training pair");
    Ok((idx, model.train_outputs[idx].clone()))
}

/// Predicted bit string for a model trained with [`train_qmlm_labels`].
pub fn predict_label_qmlm(model: &QmlmModel, test_input: &DensityMatrix) -> Result<BitString> {
    if model.labels.is_none() {
        return Err(Error::Invalid("model was not trained on labels".into()));
    }
    let (_, state) = predict_qmlm(model, test_input)?;
    decode_label(&state)
}

/// Fidelity between a predicted and the true ideal state.
pub fn prediction_quality(predicted: &Statevector, true_ideal: &Statevector) -> Result<f64> {
    fidelity_pure(predicted, true_ideal)
}

fn numbered(i: usize, n: usize) -> String {
    let width = n.saturating_sub(1).to_string().len().max(3);
    format!("{i:0width$}.csv")
}

/// Writes the model as a directory: `inputs/*.csv` (density matrices),
/// `outputs/*.csv` (statevectors), `b.csv`, `meta`, and `labels` for the
/// multi-label variant.
pub fn save_model(model: &QmlmModel, dir: &Path) -> Result<()> {
    let n = model.len();
    fs::create_dir_all(dir.join("inputs"))?;
    fs::create_dir_all(dir.join("outputs"))?;
    for (i, rho) in model.train_inputs.iter().enumerate() {
        fs::write(dir.join("inputs").join(numbered(i, n)), density_to_csv(rho))?;
    }
    for (i, psi) in model.train_outputs.iter().enumerate() {
        fs::write(
            dir.join("outputs").join(numbered(i, n)),
            statevector_to_csv(psi),
        )?;
    }
    fs::write(dir.join("b.csv"), real_matrix_to_csv(&model.b))?;
    let mut meta = String::new();
    let _ = writeln!(meta, "N = {n}");
    let _ = writeln!(meta, "n_qubits = {}", model.input_qubits());
    let _ = writeln!(meta, "rcond = {}", format_sig(model.rcond, 17));
    match model.seed {
        Some(s) => {
            let _ = writeln!(meta, "seed = {s}");
        }
        None => {
            let _ = writeln!(meta, "seed = none");
        }
    }
    fs::write(dir.join("meta"), meta)?;
    if let Some(labels) = &model.labels {
        let text: String = labels.iter().map(|l| format!("{l}\n")).collect();
        fs::write(dir.join("labels"), text)?;
    }
    Ok(())
}

fn meta_value<'a>(meta: &'a str, key: &str) -> Result<&'a str> {
    meta.lines()
        .filter_map(|l| l.split_once('='))
        .find(|(k, _)| k.trim() == key)
        .map(|(_, v)| v.trim())
        .ok_or_else(|| Error::Parse(format!("meta: missing `{key}`")))
}

fn parse_meta<T: std::str::FromStr>(meta: &str, key: &str) -> Result<T> {
    let v = meta_value(meta, key)?;
    v.parse()
        .map_err(|_| Error::Parse(format!("meta: bad `{key}` value `{v}`")))
}

/// Reads a directory written by [`save_model`].
pub fn load_model(dir: &Path) -> Result<QmlmModel> {
    let meta = fs::read_to_string(dir.join("meta"))?;
    let n: usize = parse_meta(&meta, "N")?;
    let n_qubits: usize = parse_meta(&meta, "n_qubits")?;
    let rcond: f64 = parse_meta(&meta, "rcond")?;
    let seed = match meta_value(&meta, "seed")? {
        "none" => None,
        _ => Some(parse_meta::<u64>(&meta, "seed")?),
    };

    let mut train_inputs = Vec::with_capacity(n);
    for path in csv_files(&dir.join("inputs"))? {
        train_inputs.push(read_state(&path)?.to_density());
    }
    let mut train_outputs = Vec::with_capacity(n);
    for path in csv_files(&dir.join("outputs"))? {
        match read_state(&path)? {
            StateFile::Pure(s) => train_outputs.push(s),
            StateFile::Mixed(_) => {
                return Err(Error::Parse(format!(
                    "{}: expected a statevector",
                    path.display()
                )))
            }
        }
    }
    if train_inputs.len() != n || train_outputs.len() != n {
        return Err(Error::CountMismatch {
            inputs: train_inputs.len(),
            outputs: train_outputs.len(),
        });
    }
    if train_inputs.iter().any(|r| r.n_qubits() != n_qubits) {
        return Err(Error::Parse("meta: n_qubits disagrees with inputs/".into()));
    }
    let b = real_matrix_from_csv(&fs::read_to_string(dir.join("b.csv"))?)?;
    if b.shape() != (n, n) {
        return Err(Error::Parse(format!(
            "b.csv is {:?}, expected {n}x{n}",
            b.shape()
        )));
    }
    let labels_path = dir.join("labels");
    let labels = if labels_path.exists() {
        let labels = fs::read_to_string(labels_path)?
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| l.trim().parse::<BitString>())
            .collect::<Result<Vec<_>>>()?;
        if labels.len() != n {
            return Err(Error::CountMismatch {
                inputs: n,
                outputs: labels.len(),
            });
        }
        Some(labels)
    } else {
        None
    };
    Ok(QmlmModel {
        train_inputs,
        train_outputs,
        labels,
        b,
        rcond,
        seed,
    })
}
