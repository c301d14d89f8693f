use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, ComplexMatrix, C64, HERMITIAN_TOL, ONE, PSD_TOL, ZERO};

/// Tolerance on `Σ|a|² = 1` for statevectors.
pub const NORM_TOL: f64 = 1e-10;
/// Tolerance on `Tr ρ = 1` for density matrices.
pub const TRACE_TOL: f64 = 1e-9;

fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::InvalidState(format!(
            "dimension {dim} is not a power of two >= 2"
        )));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Pure state of `n` qubits. Basis index bits are big-endian: qubit 0 is the
/// most significant bit.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amplitudes: Vec<C64>,
}

impl Statevector {
    /// Wraps amplitudes that must already be normalized.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let n_qubits = qubits_for_dim(amplitudes.len())?;
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidState("non-finite amplitude".into()));
        }
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("squared norm {norm} != 1")));
        }
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Normalizes `amplitudes` before wrapping them.
    pub fn normalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        for z in &mut amplitudes {
            *z /= norm;
        }
        Self::new(amplitudes)
    }

    pub(crate) fn from_raw(n_qubits: usize, amplitudes: Vec<C64>) -> Self {
        debug_assert_eq!(amplitudes.len(), 1 << n_qubits);
        Self {
            n_qubits,
            amplitudes,
        }
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if n_qubits == 0 || index >= dim {
            return Err(Error::InvalidState(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Ok(Self::from_raw(n_qubits, amplitudes))
    }

    /// `|0…0⟩`.
    pub fn zero_state(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::from_raw(
            self.n_qubits,
            ComplexMatrix::outer(&self.amplitudes, &self.amplitudes),
        )
    }
}

/// Mixed state of `n` qubits: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates all density-matrix invariants.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidState(format!(
                "density matrix must be square, got {:?}",
                matrix.shape()
            )));
        }
        let n_qubits = qubits_for_dim(matrix.rows())?;
        let deviation = matrix.hermitian_deviation();
        if deviation > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {deviation:e})"
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        let min = hermitian_eigenvalues(&matrix)?[0];
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { n_qubits, matrix })
    }

    pub(crate) fn from_raw(n_qubits: usize, matrix: ComplexMatrix) -> Self {
        debug_assert_eq!(matrix.rows(), 1 << n_qubits);
        Self { n_qubits, matrix }
    }

    pub fn from_pure(psi: &Statevector) -> Self {
        psi.to_density()
    }

    /// `I / d`.
    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidState("zero qubits".into()));
        }
        let d = 1usize << n_qubits;
        Ok(Self::from_raw(
            n_qubits,
            ComplexMatrix::identity(d).scale(C64::new(1.0 / d as f64, 0.0)),
        ))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub(crate) fn matrix_mut(&mut self) -> &mut ComplexMatrix {
        &mut self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `Tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        self.matrix
            .trace_product(&self.matrix)
            .expect("square matrix")
            .re
    }
}
