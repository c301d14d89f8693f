//! Built-in identity checks run by `qmlm selftest`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::{hamming, BitString};
use crate::error::Result;
use crate::fidelity::fidelity_pure;
use crate::linalg::{pinv, ComplexMatrix, C64};
use crate::qmlm::encode_label;
use crate::quantum::{depolarize_global, Statevector};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub cases: usize,
    pub max_error: f64,
    pub tolerance: f64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.max_error <= self.tolerance
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {} cases, max error {:.3e} (tolerance {:.0e})",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.cases,
            self.max_error,
            self.tolerance
        )
    }
}

/// Random normalized state with i.i.d. uniform real and imaginary parts.
pub fn random_statevector(rng: &mut impl Rng, n_qubits: usize) -> Statevector {
    loop {
        let amps = (0..1usize << n_qubits)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        if let Ok(s) = Statevector::normalized(amps) {
            return s;
        }
    }
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

/// Encoded-label fidelity equals `2^{−hamming}` for every pair of 8-bit strings.
pub fn check_label_fidelity() -> Result<CheckResult> {
    let l = 8;
    let labels: Vec<BitString> = (0..1usize << l)
        .map(|v| BitString::from_index(v, l))
        .collect();
    let states = labels
        .iter()
        .map(encode_label)
        .collect::<Result<Vec<_>>>()?;
    let mut max_error = 0.0f64;
    for (a, sa) in labels.iter().zip(&states) {
        for (b, sb) in labels.iter().zip(&states) {
            let expected = 0.5f64.powi(hamming(a, b)? as i32);
            max_error = max_error.max((fidelity_pure(sa, sb)? - expected).abs());
        }
    }
    Ok(CheckResult {
        name: "label fidelity 2^-hamming",
        cases: labels.len() * labels.len(),
        max_error,
        tolerance: 1e-12,
    })
}

/// `Tr(ρ₁′ρ₂′) = αF + (1−α)/d` for globally depolarized pure 2-qubit states.
pub fn check_depolarized_overlap(seed: u64) -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lambdas = [0.0, 0.3, 0.7, 1.0];
    let d = 4.0;
    let mut max_error = 0.0f64;
    let mut cases = 0;
    for _ in 0..100 {
        let a = random_statevector(&mut rng, 2);
        let b = random_statevector(&mut rng, 2);
        let f = fidelity_pure(&a, &b)?;
        for &l1 in &lambdas {
            for &l2 in &lambdas {
                let ra = depolarize_global(&a.to_density(), l1)?;
                let rb = depolarize_global(&b.to_density(), l2)?;
                let overlap = ra.matrix().trace_product(rb.matrix())?.re;
                let alpha = (1.0 - l1) * (1.0 - l2);
                max_error = max_error.max((overlap - (alpha * f + (1.0 - alpha) / d)).abs());
                cases += 1;
            }
        }
    }
    Ok(CheckResult {
        name: "depolarized overlap",
        cases,
        max_error,
        tolerance: 1e-10,
    })
}

/// Worst violation of the four Penrose conditions for `a` and its pseudoinverse.
pub fn penrose_error(a: &ComplexMatrix, p: &ComplexMatrix) -> Result<f64> {
    let ap = a.matmul(p)?;
    let pa = p.matmul(a)?;
    Ok([
        ap.matmul(a)?.max_abs_diff(a),
        pa.matmul(p)?.max_abs_diff(p),
        ap.hermitian_deviation(),
        pa.hermitian_deviation(),
    ]
    .into_iter()
    .fold(0.0, f64::max))
}

/// Penrose conditions over square, tall, wide and rank-deficient matrices.
pub fn check_pseudoinverse(seed: u64) -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_error = 0.0f64;
    let cases = 50;
    for k in 0..cases {
        let rows = rng.gen_range(1..=64);
        let cols = match k % 4 {
            0 => rows,
            1 => rng.gen_range(1..=rows),
            _ => rng.gen_range(1..=64),
        };
        let a = if k % 4 == 3 {
            let rank = rng.gen_range(1..=rows.min(cols));
            random_matrix(&mut rng, rows, rank).matmul(&random_matrix(&mut rng, rank, cols))?
        } else {
            random_matrix(&mut rng, rows, cols)
        };
        max_error = max_error.max(penrose_error(&a, &pinv(&a, None)?)?);
    }
    Ok(CheckResult {
        name: "Moore-Penrose conditions",
        cases,
        max_error,
        tolerance: 1e-8,
    })
}

/// Every suite, in a fixed order.
pub fn run_all(seed: u64) -> Result<Vec<CheckResult>> {
    Ok(vec![
        check_label_fidelity()?,
        check_depolarized_overlap(seed)?,
        check_pseudoinverse(seed)?,
    ])
}
