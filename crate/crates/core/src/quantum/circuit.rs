use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::fmt::format_sig;
use crate::linalg::{kron, ComplexMatrix, C64, ONE, ZERO};

/// 2×2 unitary in row-major order.
pub type Matrix2 = [[C64; 2]; 2];

/// Gate set used by the ansatz and the label encoder.
///
/// `RX(θ) = cos(θ/2)·I − i·sin(θ/2)·X`, `RZ(θ) = diag(e^{−iθ/2}, e^{+iθ/2})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    Rx { qubit: usize, theta: f64 },
    Rz { qubit: usize, theta: f64 },
    H { qubit: usize },
    Cnot { control: usize, target: usize },
}

impl Gate {
    /// Qubits the gate acts on (control first for CNOT).
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Rx { qubit, .. } | Gate::Rz { qubit, .. } | Gate::H { qubit } => vec![qubit],
            Gate::Cnot { control, target } => vec![control, target],
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Gate::Cnot { .. } => 2,
            _ => 1,
        }
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        for q in self.qubits() {
            if q >= n_qubits {
                return Err(Error::InvalidQubitIndex { index: q, n_qubits });
            }
        }
        if let Gate::Cnot { control, target } = *self {
            if control == target {
                return Err(Error::Invalid(format!(
                    "CNOT control and target are both qubit {control}"
                )));
            }
        }
        if let Gate::Rx { theta, .. } | Gate::Rz { theta, .. } = *self {
            if !theta.is_finite() {
                return Err(Error::Invalid(format!("non-finite angle {theta}")));
            }
        }
        Ok(())
    }

    /// The 2×2 matrix of a single-qubit gate; `None` for CNOT.
    pub fn single_qubit_matrix(&self) -> Option<Matrix2> {
        match *self {
            Gate::Rx { theta, .. } => {
                let c = C64::new((theta / 2.0).cos(), 0.0);
                let s = C64::new(0.0, -(theta / 2.0).sin());
                Some([[c, s], [s, c]])
            }
            Gate::Rz { theta, .. } => {
                let half = theta / 2.0;
                Some([
                    [C64::from_polar(1.0, -half), ZERO],
                    [ZERO, C64::from_polar(1.0, half)],
                ])
            }
            Gate::H { .. } => {
                let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                Some([[h, h], [h, -h]])
            }
            Gate::Cnot { .. } => None,
        }
    }

    /// Full `2^n × 2^n` unitary, built by Kronecker products with identities.
    pub fn unitary(&self, n_qubits: usize) -> Result<ComplexMatrix> {
        self.validate(n_qubits)?;
        let id = ComplexMatrix::identity(2);
        let embed = |factors: &dyn Fn(usize) -> ComplexMatrix| {
            (1..n_qubits).fold(factors(0), |acc, q| kron(&acc, &factors(q)))
        };
        Ok(match self.single_qubit_matrix() {
            Some(m) => {
                let target = self.qubits()[0];
                let u = ComplexMatrix::from_fn(2, 2, |i, j| m[i][j]);
                embed(&|q| if q == target { u.clone() } else { id.clone() })
            }
            None => {
                let (control, target) = match *self {
                    Gate::Cnot { control, target } => (control, target),
                    _ => unreachable!(),
                };
                let p0 = ComplexMatrix::from_diag(&[1.0, 0.0]);
                let p1 = ComplexMatrix::from_diag(&[0.0, 1.0]);
                let x = ComplexMatrix::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]])?;
                let idle = embed(&|q| if q == control { p0.clone() } else { id.clone() });
                let flip = embed(&|q| {
                    if q == control {
                        p1.clone()
                    } else if q == target {
                        x.clone()
                    } else {
                        id.clone()
                    }
                });
                idle.add(&flip)?
            }
        })
    }
}

/// Ordered gate list over a fixed number of qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::Invalid("circuit needs at least one qubit".into()));
        }
        Ok(Self {
            n_qubits,
            gates: Vec::new(),
        })
    }

    pub fn with_gates(n_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        let mut c = Self::new(n_qubits)?;
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Line-oriented text form: a `QUBITS n` header followed by one gate per
    /// line (`RX q θ`, `RZ q θ`, `H q`, `CNOT c t`), angles with 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = format!("QUBITS {}\n", self.n_qubits);
        for g in &self.gates {
            let _ = match *g {
                Gate::Rx { qubit, theta } => writeln!(out, "RX {qubit} {}", format_sig(theta, 17)),
                Gate::Rz { qubit, theta } => writeln!(out, "RZ {qubit} {}", format_sig(theta, 17)),
                Gate::H { qubit } => writeln!(out, "H {qubit}"),
                Gate::Cnot { control, target } => writeln!(out, "CNOT {control} {target}"),
            };
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Parse("missing QUBITS header".into()))?;
        let n_qubits = match header.split_whitespace().collect::<Vec<_>>()[..] {
            ["QUBITS", n] => parse_num::<usize>(n, 1)?,
            _ => {
                return Err(Error::Parse(format!(
                    "line 1: expected `QUBITS n`, got `{header}`"
                )))
            }
        };
        let mut circuit = Self::new(n_qubits)?;
        for (lineno, line) in lines {
            let fields: Vec<&str> = line.split_whitespace().collect();
            let gate = match fields[..] {
                ["RX", q, t] => Gate::Rx {
                    qubit: parse_num(q, lineno)?,
                    theta: parse_num(t, lineno)?,
                },
                ["RZ", q, t] => Gate::Rz {
                    qubit: parse_num(q, lineno)?,
                    theta: parse_num(t, lineno)?,
                },
                ["H", q] => Gate::H {
                    qubit: parse_num(q, lineno)?,
                },
                ["CNOT", c, t] => Gate::Cnot {
                    control: parse_num(c, lineno)?,
                    target: parse_num(t, lineno)?,
                },
                _ => {
                    return Err(Error::Parse(format!(
                        "line {lineno}: unrecognized gate `{line}`"
                    )))
                }
            };
            circuit.push(gate)?;
        }
        Ok(circuit)
    }
}

fn parse_num<T: std::str::FromStr>(s: &str, lineno: usize) -> Result<T> {
    s.parse()
        .map_err(|_| Error::Parse(format!("line {lineno}: bad number `{s}`")))
}
