use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Deserialize;

use super::ansatz::{AnsatzSpec, NoiseSpec};
use crate::error::{Error, Result};

pub const DEFAULT_DATASET_SIZES: [usize; 6] = [10, 20, 40, 80, 160, 320];
pub const DEFAULT_TRIALS: usize = 400;

/// The parameter varied along a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepKind {
    Qubits,
    Delta,
    Layers,
    /// Values are factors applied to the base `(p1, p2)`.
    Noise,
}

impl SweepKind {
    pub fn name(self) -> &'static str {
        match self {
            SweepKind::Qubits => "qubits",
            SweepKind::Delta => "delta",
            SweepKind::Layers => "layers",
            SweepKind::Noise => "noise",
        }
    }

    pub fn default_values(self) -> Vec<f64> {
        match self {
            SweepKind::Qubits => vec![1.0, 2.0, 3.0, 4.0, 5.0],
            SweepKind::Delta => vec![PI, PI / 2.0, PI / 4.0, PI / 8.0, PI / 16.0],
            SweepKind::Layers => vec![1.0, 2.0, 3.0, 4.0],
            SweepKind::Noise => vec![0.0, 1.0, 5.0, 10.0, 25.0],
        }
    }
}

impl fmt::Display for SweepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "qubits" => Ok(SweepKind::Qubits),
            "delta" => Ok(SweepKind::Delta),
            "layers" => Ok(SweepKind::Layers),
            "noise" => Ok(SweepKind::Noise),
            other => Err(Error::Invalid(format!(
                "unknown sweep kind `{other}` (expected qubits, delta, layers or noise)"
            ))),
        }
    }
}

/// A complete sweep description: the base point, what is varied, and how
/// many training sizes and trials to evaluate.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub ansatz: AnsatzSpec,
    pub noise: NoiseSpec,
    pub dataset_sizes: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub sweep: SweepKind,
    pub sweep_values: Vec<f64>,
}

impl ExperimentConfig {
    pub fn new(ansatz: AnsatzSpec, noise: NoiseSpec, sweep: SweepKind, seed: u64) -> Self {
        ExperimentConfig {
            ansatz,
            noise,
            dataset_sizes: DEFAULT_DATASET_SIZES.to_vec(),
            trials: DEFAULT_TRIALS,
            seed,
            sweep,
            sweep_values: sweep.default_values(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.ansatz.validate()?;
        self.noise.validate()?;
        if self.trials == 0 {
            return Err(Error::Invalid("trials must be at least 1".into()));
        }
        if self.dataset_sizes.is_empty() {
            return Err(Error::Invalid("dataset_sizes is empty".into()));
        }
        if self.dataset_sizes[0] == 0 {
            return Err(Error::Invalid("dataset sizes must be at least 1".into()));
        }
        if self.dataset_sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invalid(
                "dataset_sizes must be strictly ascending".into(),
            ));
        }
        if self.sweep_values.is_empty() {
            return Err(Error::Invalid("sweep.values is empty".into()));
        }
        for &v in &self.sweep_values {
            self.point(v)?;
        }
        Ok(())
    }

    /// Ansatz and noise at one sweep value.
    pub fn point(&self, value: f64) -> Result<(AnsatzSpec, NoiseSpec)> {
        let mut ansatz = self.ansatz;
        let mut noise = self.noise;
        match self.sweep {
            SweepKind::Qubits => ansatz.n_qubits = positive_integer(value, "qubits")?,
            SweepKind::Layers => ansatz.layers = positive_integer(value, "layers")?,
            SweepKind::Delta => ansatz.delta = value,
            SweepKind::Noise => {
                if !(value >= 0.0 && value.is_finite()) {
                    return Err(Error::Invalid(format!(
                        "noise factor {value} must be non-negative"
                    )));
                }
                noise = noise.scaled(value);
            }
        }
        ansatz.validate()?;
        noise.validate()?;
        Ok((ansatz, noise))
    }

    /// Parses the TOML config format:
    ///
    /// ```toml
    /// qubits = 3
    /// layers = 1
    /// delta = "pi/8"          # or a number in radians
    /// p1 = 0.001
    /// p2 = 0.01
    /// dataset_sizes = [10, 20, 40]
    /// trials = 400
    /// seed = 42
    ///
    /// [sweep]
    /// kind = "delta"
    /// values = ["pi", "pi/4", "pi/16"]
    /// ```
    ///
    /// Every key except `seed` and `sweep.kind` has a default.
    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let delta = raw
            .delta
            .map(Angle::radians)
            .transpose()?
            .unwrap_or(PI / 8.0);
        let base_noise = NoiseSpec::default();
        let config = ExperimentConfig {
            ansatz: AnsatzSpec {
                n_qubits: raw.qubits.unwrap_or(3),
                layers: raw.layers.unwrap_or(1),
                delta,
            },
            noise: NoiseSpec {
                p1: raw.p1.unwrap_or(base_noise.p1),
                p2: raw.p2.unwrap_or(base_noise.p2),
            },
            dataset_sizes: raw
                .dataset_sizes
                .unwrap_or_else(|| DEFAULT_DATASET_SIZES.to_vec()),
            trials: raw.trials.unwrap_or(DEFAULT_TRIALS),
            seed: raw.seed,
            sweep: raw.sweep.kind,
            sweep_values: match raw.sweep.values {
                Some(vs) => vs.into_iter().map(Angle::radians).collect::<Result<_>>()?,
                None => raw.sweep.kind.default_values(),
            },
        };
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Io(_) => e,
            other => Error::Invalid(format!("{}: {other}", path.display())),
        })
    }
}

fn positive_integer(value: f64, what: &str) -> Result<usize> {
    if value >= 1.0 && value.fract() == 0.0 && value <= 64.0 {
        Ok(value as usize)
    } else {
        Err(Error::Invalid(format!(
            "{what} value {value} is not a positive integer"
        )))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    qubits: Option<usize>,
    layers: Option<usize>,
    delta: Option<Angle>,
    p1: Option<f64>,
    p2: Option<f64>,
    dataset_sizes: Option<Vec<usize>>,
    trials: Option<usize>,
    seed: u64,
    sweep: RawSweep,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    kind: SweepKind,
    values: Option<Vec<Angle>>,
}

/// A number, or an expression such as `"pi"`, `"pi/8"`, `"3*pi/4"`.
#[derive(Deserialize)]
#[serde(untagged)]
enum Angle {
    Int(i64),
    Float(f64),
    Expr(String),
}

impl Angle {
    fn radians(self) -> Result<f64> {
        match self {
            Angle::Int(i) => Ok(i as f64),
            Angle::Float(x) => Ok(x),
            Angle::Expr(s) => parse_angle(&s),
        }
    }
}

pub fn parse_angle(expr: &str) -> Result<f64> {
    let bad = || {
        Error::Parse(format!(
            "cannot read `{expr}` as a number or multiple of pi"
        ))
    };
    let compact: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
    let compact = compact.to_ascii_lowercase().replace('π', "pi");
    let (num, den) = match compact.split_once('/') {
        Some((n, d)) => (n, d.parse::<f64>().map_err(|_| bad())?),
        None => (compact.as_str(), 1.0),
    };
    let num = match num.strip_suffix("pi") {
        Some("") => PI,
        Some(coef) => {
            coef.trim_end_matches('*')
                .parse::<f64>()
                .map_err(|_| bad())?
                * PI
        }
        None => num.parse::<f64>().map_err(|_| bad())?,
    };
    let v = num / den;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}
