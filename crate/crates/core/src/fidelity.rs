//! State fidelities and fidelity Gram matrices.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fmt::format_sig;
use crate::linalg::{hermitian_eigenvalues, matrix_sqrt_psd, ComplexMatrix, RealMatrix};
use crate::quantum::{DensityMatrix, Statevector};

/// Eigenvalues of `√a·b·√a` below `SPECTRAL_CUTOFF · d · λ_max` are treated as
/// zero before taking square roots. Without this, rounding-level eigenvalues
/// of order `1e-17` each contribute `~3e-9` to the trace for near-pure states.
const SPECTRAL_CUTOFF: f64 = 64.0 * f64::EPSILON;

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch {
            expected: a,
            found: b,
        });
    }
    Ok(())
}

/// `|⟨a|b⟩|²`.
pub fn fidelity_pure(a: &Statevector, b: &Statevector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().min(1.0))
}

/// `⟨ψ|ρ|ψ⟩`, the fidelity between a pure and a mixed state.
pub fn fidelity_pure_mixed(psi: &Statevector, rho: &DensityMatrix) -> Result<f64> {
    check_dims(psi.dim(), rho.dim())?;
    let amps = psi.amplitudes();
    let r = rho.matrix().apply(amps)?;
    let value: f64 = amps.iter().zip(&r).map(|(a, b)| (a.conj() * b).re).sum();
    Ok(value.clamp(0.0, 1.0))
}

/// Uhlmann fidelity `(Tr √(√a · b · √a))²`, clamped to `[0, 1]`.
pub fn fidelity_mixed(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    check_dims(a.dim(), b.dim())?;
    let sqrt_a = matrix_sqrt_psd(a.matrix())?;
    fidelity_from_sqrt(&sqrt_a, b)
}

/// Fidelity given a precomputed `√a`.
fn fidelity_from_sqrt(sqrt_a: &ComplexMatrix, b: &DensityMatrix) -> Result<f64> {
    let m = sqrt_a.matmul(b.matrix())?.matmul(sqrt_a)?.hermitian_part();
    let eigenvalues = hermitian_eigenvalues(&m)?;
    let largest = eigenvalues.last().copied().unwrap_or(0.0).max(0.0);
    let cutoff = SPECTRAL_CUTOFF * m.rows() as f64 * largest;
    let root_trace: f64 = eigenvalues
        .iter()
        .filter(|&&l| l > cutoff)
        .map(|l| l.sqrt())
        .sum();
    Ok((root_trace * root_trace).clamp(0.0, 1.0))
}

/// Fidelities of `test` against every state in `states`, in order.
/// The square root of `test` is computed once.
pub fn fidelity_row(test: &DensityMatrix, states: &[DensityMatrix]) -> Result<Vec<f64>> {
    let sqrt_test = matrix_sqrt_psd(test.matrix())?;
    states
        .par_iter()
        .map(|s| {
            check_dims(test.dim(), s.dim())?;
            fidelity_from_sqrt(&sqrt_test, s)
        })
        .collect()
}

/// Square matrix of pairwise fidelities: symmetric, unit diagonal, entries in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    entries: RealMatrix,
}

impl GramMatrix {
    const SYMMETRY_TOL: f64 = 1e-10;
    const DIAGONAL_TOL: f64 = 1e-9;
    const RANGE_TOL: f64 = 1e-9;

    /// Validates the Gram invariants.
    pub fn new(entries: RealMatrix) -> Result<Self> {
        let (rows, cols) = entries.shape();
        if rows != cols || rows == 0 {
            return Err(Error::Invalid(format!(
                "Gram matrix must be square and non-empty, got {rows}x{cols}"
            )));
        }
        for i in 0..rows {
            if (entries[(i, i)] - 1.0).abs() > Self::DIAGONAL_TOL {
                return Err(Error::Invalid(format!(
                    "diagonal entry {i} is {} (expected 1)",
                    entries[(i, i)]
                )));
            }
            for j in 0..rows {
                let v = entries[(i, j)];
                if !(-Self::RANGE_TOL..=1.0 + Self::RANGE_TOL).contains(&v) {
                    return Err(Error::Invalid(format!(
                        "entry ({i},{j}) = {v} outside [0, 1]"
                    )));
                }
                if (v - entries[(j, i)]).abs() > Self::SYMMETRY_TOL {
                    return Err(Error::Invalid(format!("entry ({i},{j}) breaks symmetry")));
                }
            }
        }
        Ok(Self { entries })
    }

    /// Builds from the upper triangle: `f(i, j)` is evaluated for `i < j` only
    /// (in parallel) and mirrored; the diagonal is exactly 1.
    fn from_upper<F>(n: usize, f: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> Result<f64> + Sync,
    {
        let rows: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| ((i + 1)..n).map(|j| f(i, j)).collect::<Result<Vec<f64>>>())
            .collect::<Result<_>>()?;
        let mut m = RealMatrix::identity(n);
        for (i, row) in rows.iter().enumerate() {
            for (off, &v) in row.iter().enumerate() {
                let j = i + 1 + off;
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Ok(Self { entries: m })
    }

    pub fn size(&self) -> usize {
        self.entries.rows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    pub fn as_matrix(&self) -> &RealMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> RealMatrix {
        self.entries
    }

    /// Header-less CSV: one row per line, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.size() {
            let line: Vec<String> = self
                .entries
                .row(i)
                .iter()
                .map(|&v| format_sig(v, 17))
                .collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let rows: Vec<Vec<f64>> = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .enumerate()
            .map(|(i, l)| {
                l.split(',')
                    .map(|v| {
                        v.trim()
                            .parse::<f64>()
                            .map_err(|_| Error::Parse(format!("row {}: bad number `{v}`", i + 1)))
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        Self::new(RealMatrix::from_rows(&rows)?)
    }
}

/// Gram matrix of pairwise pure-state fidelities.
pub fn gram_pure(states: &[Statevector]) -> Result<GramMatrix> {
    let first = states
        .first()
        .ok_or(Error::TooSmall { needed: 1, got: 0 })?;
    for s in states {
        check_dims(first.dim(), s.dim())?;
    }
    GramMatrix::from_upper(states.len(), |i, j| fidelity_pure(&states[i], &states[j]))
}

/// Gram matrix of pairwise Uhlmann fidelities. The diagonal is exactly 1.
pub fn gram_mixed(states: &[DensityMatrix]) -> Result<GramMatrix> {
    let first = states
        .first()
        .ok_or(Error::TooSmall { needed: 1, got: 0 })?;
    for s in states {
        check_dims(first.dim(), s.dim())?;
    }
    let roots: Vec<ComplexMatrix> = states
        .par_iter()
        .map(|s| matrix_sqrt_psd(s.matrix()))
        .collect::<std::result::Result<_, _>>()?;
    GramMatrix::from_upper(states.len(), |i, j| {
        fidelity_from_sqrt(&roots[i], &states[j])
    })
}

/// Mean and (population) variance of the strictly off-diagonal Gram entries.
/// A mean drifting towards a constant with vanishing variance signals
/// exponential concentration of the kernel.
pub fn concentration_stats(g: &GramMatrix) -> Result<(f64, f64)> {
    let n = g.size();
    if n < 2 {
        return Err(Error::TooSmall { needed: 2, got: n });
    }
    let values: Vec<f64> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| g.get(i, j))
        .collect();
    let count = values.len() as f64;
    let mean = values.iter().sum::<f64>() / count;
    let variance = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / count;
    Ok((mean, variance))
}
