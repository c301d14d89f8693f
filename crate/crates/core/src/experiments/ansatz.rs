use std::f64::consts::PI;

use rand::Rng;

use crate::error::{Error, Result};
use crate::qmlm::{predict_qmlm, prediction_quality, QmlmModel};
use crate::quantum::{simulate_ideal, simulate_noisy, Circuit, DensityMatrix, Gate, Statevector};

/// Shape of the variational circuit and the range of its rotation angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnsatzSpec {
    pub n_qubits: usize,
    pub layers: usize,
    /// Angles are drawn uniformly from `[−delta, delta]`.
    pub delta: f64,
}

impl AnsatzSpec {
    pub fn new(n_qubits: usize, layers: usize, delta: f64) -> Result<Self> {
        let spec = AnsatzSpec {
            n_qubits,
            layers,
            delta,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 {
            return Err(Error::Invalid("ansatz needs at least one qubit".into()));
        }
        if self.layers == 0 {
            return Err(Error::Invalid("ansatz needs at least one layer".into()));
        }
        if !(self.delta > 0.0 && self.delta <= PI) {
            return Err(Error::Invalid(format!(
                "delta {} is outside (0, pi]",
                self.delta
            )));
        }
        Ok(())
    }

    /// One RX and one RZ angle per qubit per layer.
    pub fn parameter_count(&self) -> usize {
        2 * self.n_qubits * self.layers
    }
}

/// Per-gate depolarizing probabilities for 1- and 2-qubit gates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub p1: f64,
    pub p2: f64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        NoiseSpec {
            p1: 0.001,
            p2: 0.01,
        }
    }
}

impl NoiseSpec {
    pub fn new(p1: f64, p2: f64) -> Result<Self> {
        let noise = NoiseSpec { p1, p2 };
        noise.validate()?;
        Ok(noise)
    }

    pub fn noiseless() -> Self {
        NoiseSpec { p1: 0.0, p2: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        for p in [self.p1, self.p2] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::ProbabilityOutOfRange(p));
            }
        }
        Ok(())
    }

    /// Both probabilities multiplied by `factor`, capped at 1.
    pub fn scaled(&self, factor: f64) -> Self {
        NoiseSpec {
            p1: (self.p1 * factor).min(1.0),
            p2: (self.p2 * factor).min(1.0),
        }
    }
}

/// Layer by layer: `RX(θ) RZ(θ)` on each qubit in turn, then the CNOT chain
/// `0→1, 1→2, …`. Angles are consumed in that order.
pub fn build_ansatz(spec: &AnsatzSpec, thetas: &[f64]) -> Result<Circuit> {
    spec.validate()?;
    if thetas.len() != spec.parameter_count() {
        return Err(Error::ThetaCountMismatch {
            expected: spec.parameter_count(),
            got: thetas.len(),
        });
    }
    let q = spec.n_qubits;
    let mut gates = Vec::with_capacity(spec.layers * (3 * q - 1));
    let mut angles = thetas.iter().copied();
    for _ in 0..spec.layers {
        for qubit in 0..q {
            gates.push(Gate::Rx {
                qubit,
                theta: angles.next().unwrap(),
            });
            gates.push(Gate::Rz {
                qubit,
                theta: angles.next().unwrap(),
            });
        }
        for control in 1..q {
            gates.push(Gate::Cnot {
                control: control - 1,
                target: control,
            });
        }
    }
    Circuit::with_gates(q, gates)
}

/// `count` i.i.d. draws from `U[−delta, delta]`.
pub fn sample_thetas(rng: &mut impl Rng, count: usize, delta: f64) -> Vec<f64> {
    (0..count).map(|_| rng.gen_range(-delta..=delta)).collect()
}

/// A fresh random circuit with its noisy and ideal final states.
pub fn sample_circuit(
    spec: &AnsatzSpec,
    noise: &NoiseSpec,
    rng: &mut impl Rng,
) -> Result<(Circuit, DensityMatrix, Statevector)> {
    let thetas = sample_thetas(rng, spec.parameter_count(), spec.delta);
    let circuit = build_ansatz(spec, &thetas)?;
    let noisy = simulate_noisy(&circuit, noise.p1, noise.p2)?;
    let ideal = simulate_ideal(&circuit)?;
    Ok((circuit, noisy, ideal))
}

/// `n` random circuits: noisy final states as inputs, ideal ones as outputs.
pub fn generate_dataset(
    spec: &AnsatzSpec,
    noise: &NoiseSpec,
    n: usize,
    rng: &mut impl Rng,
) -> Result<(Vec<DensityMatrix>, Vec<Statevector>)> {
    if n == 0 {
        return Err(Error::TooSmall { needed: 1, got: 0 });
    }
    noise.validate()?;
    let mut inputs = Vec::with_capacity(n);
    let mut outputs = Vec::with_capacity(n);
    for _ in 0..n {
        let (_, noisy, ideal) = sample_circuit(spec, noise, rng)?;
        inputs.push(noisy);
        outputs.push(ideal);
    }
    Ok((inputs, outputs))
}

/// Predicts the ideal state of one fresh random circuit and returns the
/// fidelity between prediction and truth.
pub fn run_trial(
    model: &QmlmModel,
    spec: &AnsatzSpec,
    noise: &NoiseSpec,
    rng: &mut impl Rng,
) -> Result<f64> {
    if model.input_qubits() != spec.n_qubits {
        return Err(Error::DimensionMismatch {
            expected: model.input_qubits(),
            found: spec.n_qubits,
        });
    }
    let (_, noisy, ideal) = sample_circuit(spec, noise, rng)?;
    let (_, predicted) = predict_qmlm(model, &noisy)?;
    prediction_quality(&predicted, &ideal)
}
